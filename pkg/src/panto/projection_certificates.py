"""Subsurface projections in the slot model and the support certificate.

Curves are slot states: a pants-curve slot and a slope in its
complexity-one piece.  Two states in the same slot intersect exactly when
their slopes differ.  States in different slots are treated as disjoint, which
is exact for pants curves and for curves moved within disjoint pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

from .end_periodic import (
    CurveState,
    EndPeriodicMap,
    Twist,
    act_on_curve,
    apply_word,
    compose_with_twists,
    declared_shift,
    inverse,
    is_ladder,
    ladder_model,
    parse_ladder_id,
    power,
    shift_id,
)
from .errors import ConventionViolation, EmptyProjection, OrbitEscapedWindow
from .pants_graph import UNKNOWN, Unknown, farey_distance
from .surface_model import (
    BASE_SLOPE,
    Curve,
    CuffSlot,
    Internal,
    PantsDecomposition,
    SurfaceSig,
    WindowBoundary,
    complexity,
)

CERTIFICATE_THRESHOLD = 9
BALL_RADIUS = 2


class Separation(str, Enum):
    FULLY = "fully separating"
    PARTIALLY = "partially separating"
    NEITHER = "not separating"


@dataclass(frozen=True)
class Cut:
    """A boundary curve of the support and the ends on its far side."""

    curve: str
    ends: frozenset[str]


@dataclass(frozen=True)
class ConventionFlags:
    planar_complement: bool = False
    boundary_arc_condition: bool = False
    strip_genus_ge_2: bool = False
    disjoint_from_U: bool = False

    def failed(self) -> list[str]:
        return [name for name, ok in vars(self).items() if not ok]


@dataclass(frozen=True)
class SupportDescriptor:
    sig: SurfaceSig
    interior: frozenset[str]
    plus_cuts: tuple[Cut, ...]
    minus_cuts: tuple[Cut, ...]
    flags: ConventionFlags = ConventionFlags()
    attracting: frozenset[str] = frozenset()
    repelling: frozenset[str] = frozenset()
    rho_eta: str | None = None
    rho_inv_alpha: str | None = None

    @property
    def boundary(self) -> frozenset[str]:
        return frozenset(c.curve for c in self.plus_cuts + self.minus_cuts)

    @property
    def separation(self) -> Separation:
        cuts = self.plus_cuts + self.minus_cuts
        if all(len(c.ends) == 1 for c in cuts):
            return Separation.FULLY
        if all(c.ends <= self.attracting or c.ends <= self.repelling for c in cuts):
            return Separation.PARTIALLY
        return Separation.NEITHER

    def to_dict(self) -> dict:
        out = {
            "sig": [self.sig.genus, self.sig.punctures_or_boundary],
            "interior": sorted(self.interior),
            "plus": [{"curve": c.curve, "ends": sorted(c.ends)} for c in self.plus_cuts],
            "minus": [{"curve": c.curve, "ends": sorted(c.ends)} for c in self.minus_cuts],
            "flags": vars(self.flags),
        }
        if self.rho_eta is not None:
            out["rho_eta"] = self.rho_eta
        if self.rho_inv_alpha is not None:
            out["rho_inv_alpha"] = self.rho_inv_alpha
        return out


def support_from_dict(data: dict, f: EndPeriodicMap) -> SupportDescriptor:
    w = f.shift.shift_vector(f.window.end_ids)
    return SupportDescriptor(
        SurfaceSig(int(data["sig"][0]), int(data["sig"][1])),
        frozenset(data.get("interior", [])),
        tuple(Cut(c["curve"], frozenset(c["ends"])) for c in data.get("plus", [])),
        tuple(Cut(c["curve"], frozenset(c["ends"])) for c in data.get("minus", [])),
        ConventionFlags(**{k: bool(v) for k, v in data.get("flags", {}).items()}),
        frozenset(e for e, x in zip(f.window.end_ids, w) if x > 0),
        frozenset(e for e, x in zip(f.window.end_ids, w) if x < 0),
        data.get("rho_eta"),
        data.get("rho_inv_alpha"),
    )


# ---------------------------------------------------------------------------
# Projections and distances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exact:
    d: int


@dataclass(frozen=True)
class LowerBound:
    d: int


DistanceResult = Exact | LowerBound | Unknown


@dataclass(frozen=True)
class ProjectionQuery:
    subsurface: SurfaceSig
    marking_a: CurveState | None
    marking_b: CurveState | None


def slot_intersects(a: CurveState, b: CurveState) -> bool:
    return a.curve == b.curve and a.slope != b.slope


def projection_nonempty(alpha: CurveState, C: SupportDescriptor) -> bool:
    if alpha.curve in C.interior:
        return True
    # a boundary slot twisted off its base slope crosses that boundary curve
    return alpha.curve in C.boundary and alpha.slope != BASE_SLOPE


def distance_in_piece(q: ProjectionQuery) -> DistanceResult:
    a, b = q.marking_a, q.marking_b
    if a is None or b is None:
        raise EmptyProjection("both markings need nonempty projections")
    if complexity(q.subsurface) == 1:
        if a.curve != b.curve:
            return UNKNOWN
        return Exact(farey_distance(a.slope, b.slope))
    if a == b:
        return Exact(0)
    if not slot_intersects(a, b):
        return Exact(1)
    return LowerBound(2)


# ---------------------------------------------------------------------------
# Certificate
# ---------------------------------------------------------------------------


class ClassKind(str, Enum):
    STRONGLY_IRREDUCIBLE = "strongly irreducible"
    IRREDUCIBLE = "irreducible"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Classification:
    kind: ClassKind
    reason: str | None = None
    evidence: tuple[tuple[str, str], ...] = field(default=())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Classification):
            return NotImplemented
        return (self.kind, self.reason) == (other.kind, other.reason)

    def __hash__(self) -> int:
        return hash((self.kind, self.reason))


def ladder_support(f: EndPeriodicMap) -> SupportDescriptor:
    """The window core as the support: cut off by the two window boundary
    curves.  Its complement carries genus, so it is not planar."""
    model = ladder_model(f)
    return SupportDescriptor(
        SurfaceSig(model.genus, 2),
        frozenset(model.internal_ids()),
        (Cut(f"s{model.hi}", frozenset({model.attracting})),),
        (Cut(f"s{model.lo}", frozenset({model.repelling})),),
        ConventionFlags(
            planar_complement=False,
            boundary_arc_condition=False,
            strip_genus_ge_2=all(s.window_genus >= 2 for s in f.shift.strips),
            disjoint_from_U=all(g.slot in model.internal_ids() for g in f.compact_word),
        ),
        frozenset({model.attracting}),
        frozenset({model.repelling}),
    )


def _rho(f: EndPeriodicMap, C: SupportDescriptor, cid: str, forward: bool) -> str:
    declared = C.rho_eta if forward else C.rho_inv_alpha
    if declared is not None:
        return declared
    if is_ladder(f):
        k = ladder_model(f).strips
        return shift_id(cid, k if forward else -k)
    raise ConventionViolation("the support descriptor must declare rho(eta) and rho^-1(alpha)")


def certify(f: EndPeriodicMap, C: SupportDescriptor, eta: str, alpha: str) -> Classification:
    if eta not in {c.curve for c in C.minus_cuts}:
        raise ConventionViolation(f"{eta} is not on the repelling side of the support boundary")
    if alpha not in {c.curve for c in C.plus_cuts}:
        raise ConventionViolation(f"{alpha} is not on the attracting side of the support boundary")
    rho_eta = CurveState(_rho(f, C, eta, True))
    rho_inv_alpha = CurveState(_rho(f, C, alpha, False))
    if slot_intersects(rho_eta, rho_inv_alpha):
        raise ConventionViolation("rho(eta) and rho^-1(alpha) intersect")

    evidence: list[tuple[str, str]] = []
    failures: list[str] = []
    flags = C.flags
    strips_ok = all(s.window_genus >= 2 for s in f.shift.strips)
    if flags.strip_genus_ge_2 and not strips_ok:
        flags = replace(flags, strip_genus_ge_2=False)
    for name, ok in vars(flags).items():
        evidence.append((name, "yes" if ok else "no"))
        if not ok:
            failures.append(f"convention flag {name} fails")
    sep = C.separation
    evidence.append(("separation", sep.value))
    if sep is Separation.NEITHER:
        failures.append("support separates an attracting end from a repelling end in no cut")

    image = apply_word(f, rho_eta)
    evidence.append(("rho(eta)", str(rho_eta)))
    evidence.append(("h(rho(eta))", str(image)))
    if not projection_nonempty(rho_eta, C) or not projection_nonempty(image, C):
        failures.append("rho(eta) does not project to the support")
        d: DistanceResult = UNKNOWN
    else:
        d = distance_in_piece(ProjectionQuery(C.sig, rho_eta, image))
    oracle = "Farey distance" if complexity(C.sig) == 1 else "intersection criterion"
    evidence.append(("distance", _describe(d)))
    evidence.append(("oracle", oracle))
    if isinstance(d, Unknown):
        failures.append("distance not certified")
    elif d.d < CERTIFICATE_THRESHOLD:
        word = "distance" if isinstance(d, Exact) else "certified lower bound"
        failures.append(f"{word} {d.d} is below {CERTIFICATE_THRESHOLD}")
    if failures:
        return Classification(ClassKind.INCONCLUSIVE, failures[0], tuple(evidence))
    kind = ClassKind.STRONGLY_IRREDUCIBLE if sep is Separation.FULLY else ClassKind.IRREDUCIBLE
    return Classification(kind, None, tuple(evidence))


def _describe(d: DistanceResult) -> str:
    if isinstance(d, Exact):
        return f"exact {d.d}"
    if isinstance(d, LowerBound):
        return f"at least {d.d}"
    return "unknown"


# ---------------------------------------------------------------------------
# Orbit probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeEntry:
    j: int
    orbit: str
    state: str
    distance: str
    status: str


@dataclass(frozen=True)
class ProbeReport:
    entries: tuple[ProbeEntry, ...]

    @property
    def all_in_ball(self) -> bool:
        return all(e.status in ("in ball", "empty projection") for e in self.entries)


def _ball_status(state: CurveState, center: CurveState, C: SupportDescriptor) -> tuple[str, str]:
    if not projection_nonempty(state, C):
        return "-", "empty projection"
    d = distance_in_piece(ProjectionQuery(C.sig, state, center))
    if isinstance(d, Exact):
        return _describe(d), "in ball" if d.d <= BALL_RADIUS else "outside ball"
    if isinstance(d, LowerBound) and d.d > BALL_RADIUS:
        return _describe(d), "outside ball"
    return _describe(d), "undetermined"


def filling_pair_probe(
    f: EndPeriodicMap,
    C: SupportDescriptor,
    k: int,
    eta: str | None = None,
    alpha: str | None = None,
) -> ProbeReport:
    """Follow f^j(eta) and f^-j(alpha) for 1 <= j <= k and test whether their
    projections stay in the ball of radius two about rho(eta) (the second
    after applying h)."""
    if k < 1:
        raise ValueError("k must be positive")
    eta = eta or C.minus_cuts[0].curve
    alpha = alpha or C.plus_cuts[0].curve
    center = CurveState(_rho(f, C, eta, True))
    entries = []
    if not is_ladder(f):
        if k > 1:
            raise OrbitEscapedWindow("a declared window only tracks one step of rho")
        back = apply_word(f, CurveState(_rho(f, C, alpha, False)), inverse=True)
        pairs = [("f^j(eta)", center), ("h f^-j(alpha)", apply_word(f, back))]
        for name, state in pairs:
            dist, status = _ball_status(state, center, C)
            entries.append(ProbeEntry(1, name, str(state), dist, status))
        return ProbeReport(tuple(entries))
    model = ladder_model(f)
    depth = min(e.stub_depth for e in f.window.end_stubs)
    lo, hi = model.lo - depth * model.strips, model.hi + depth * model.strips
    for j in range(1, k + 1):
        fwd = act_on_curve(power(f, j), CurveState(eta))
        bwd = act_on_curve(inverse(power(f, j)), CurveState(alpha))
        for name, state in (("f^j(eta)", fwd), ("h f^-j(alpha)", apply_word(f, bwd))):
            pos = parse_ladder_id(state.curve)[1]
            if not lo <= pos <= hi:
                raise OrbitEscapedWindow(f"{name} at j={j} leaves the window and its stubs")
            dist, status = _ball_status(state, center, C)
            entries.append(ProbeEntry(j, name, str(state), dist, status))
    return ProbeReport(tuple(entries))


# ---------------------------------------------------------------------------
# Demonstration windows with a four-holed-sphere support
# ---------------------------------------------------------------------------


def _demo_pants(split: bool) -> tuple[PantsDecomposition, list[str]]:
    if not split:
        pants = ["P1", "P2"]
        curves = [
            Curve("z", Internal(CuffSlot("P1", 1), CuffSlot("P2", 1))),
            Curve("b1", WindowBoundary("E1", CuffSlot("P1", 2))),
            Curve("b2", WindowBoundary("E2", CuffSlot("P1", 3))),
            Curve("b3", WindowBoundary("E3", CuffSlot("P2", 2))),
            Curve("b4", WindowBoundary("E4", CuffSlot("P2", 3))),
        ]
        return PantsDecomposition.build(pants, curves), ["z"]
    pants = ["P1", "P2", "P3"]
    curves = [
        Curve("c", Internal(CuffSlot("P1", 3), CuffSlot("P2", 1))),
        Curve("z", Internal(CuffSlot("P2", 3), CuffSlot("P3", 1))),
        Curve("b1", WindowBoundary("E1", CuffSlot("P1", 1))),
        Curve("b2", WindowBoundary("E2", CuffSlot("P1", 2))),
        Curve("b3", WindowBoundary("E3", CuffSlot("P2", 2))),
        Curve("b4", WindowBoundary("E4", CuffSlot("P3", 2))),
        Curve("b5", WindowBoundary("E5", CuffSlot("P3", 3))),
    ]
    return PantsDecomposition.build(pants, curves), ["c", "z"]


_DEMO_FLAGS = ConventionFlags(True, True, True, True)


def certificate_demo(k: int, fully: bool = True) -> tuple[EndPeriodicMap, SupportDescriptor, str, str]:
    """A handle shift with a four-holed-sphere support C around the curve z,
    composed with h = (T_{z*} T_z)^k.  The fully separating version has four
    ends, each cut off by its own boundary curve of C.  The other has five
    ends and one boundary curve of C cutting off two attracting ends."""
    if fully:
        base = declared_shift((1, 1, -1, -1))
        pd, internal = _demo_pants(False)
        C = SupportDescriptor(
            SurfaceSig(0, 4),
            frozenset({"z"}),
            (Cut("b1", frozenset({"E1"})), Cut("b2", frozenset({"E2"}))),
            (Cut("b3", frozenset({"E3"})), Cut("b4", frozenset({"E4"}))),
            _DEMO_FLAGS,
            frozenset({"E1", "E2"}),
            frozenset({"E3", "E4"}),
            "z",
            "z",
        )
        eta, alpha = "b3", "b1"
    else:
        base = declared_shift((1, 1, 1, -1, -2))
        pd, internal = _demo_pants(True)
        C = SupportDescriptor(
            SurfaceSig(0, 4),
            frozenset({"z"}),
            (Cut("c", frozenset({"E1", "E2"})), Cut("b3", frozenset({"E3"}))),
            (Cut("b4", frozenset({"E4"})), Cut("b5", frozenset({"E5"}))),
            _DEMO_FLAGS,
            frozenset({"E1", "E2", "E3"}),
            frozenset({"E4", "E5"}),
            "z",
            "z",
        )
        eta, alpha = "b4", "c"
    rho = replace(base, pants=pd, support=frozenset({"z"}))
    f = compose_with_twists(rho, [("z", 1), ("z*", 1)] * k)
    return f, C, eta, alpha


def twist_pair_family(k: int, fully: bool = True) -> EndPeriodicMap:
    """h_k = T_{z*}^k T_z^-k on the demo window."""
    f, _, _, _ = certificate_demo(0, fully)
    return compose_with_twists(f, [("z", -k), ("z*", k)])


def demo_word(f: EndPeriodicMap) -> Sequence[Twist]:
    return f.compact_word
