"""Block decomposition of the drilled mapping torus from a pants path.

The mapping torus is cut into n levels, one per elementary move of a path
P_0 -> ... -> P_n = f^-1(P_0).  Level l carries the pants decomposition P_l,
and the seam glues P_n to P_0 through f.  A curve id at level l names the curve
of P_l with that label; ids survive moves (only slopes and cuff wiring change),
so the flow between levels is the identity on ids except at the seam, where
``dynamics.image`` applies.

Tracing a curve forward until it becomes the moved curve of some level gives
the link annuli.  Tracing a pair of pants forward until one of its cuffs moves
gives the face gluings.  Orbits that never stop are read off against the
periodic structure near the ends and land on the boundary surfaces.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence

import mpmath

from .end_periodic import (
    CurveState,
    EndPeriodicMap,
    act_on_pants,
    end_behavior,
    inverse,
    phi_star_norm,
    seam_dynamics,
)
from .errors import InvariantViolation, NonTerminatingOrbit, PathEndpointMismatch
from .pants_graph import MovePath
from .surface_model import (
    PantsDecomposition,
    PieceKind,
    SurfaceSig,
    complexity_one_piece,
    piece_cuffs,
    validate_pants,
)
from .volume_bounds import hyperbolic_constants

GLUING_HEADER = "# panto gluing v1"


class SeamDynamics(Protocol):
    period: int

    def image(self, cid: str) -> str: ...

    def preimage(self, cid: str) -> str: ...

    def escape_class(self, cid: str, forward: bool) -> str | None: ...

    def pant_escape_class(self, cuffs: Sequence[str], forward: bool) -> str | None: ...

    def boundary_surface(self) -> PantsDecomposition: ...

    def boundary_genus(self) -> int: ...


# ---------------------------------------------------------------------------
# Curve tracing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlipEvent:
    """The orbit reaches the moved curve of block ``block`` (its bottom when
    tracing forward, its top when tracing backward)."""

    block: int
    steps: int
    state: tuple[int, str]


@dataclass(frozen=True)
class EscapeEvent:
    side: str
    cls: str
    steps: int


Outcome = FlipEvent | EscapeEvent


@dataclass(frozen=True)
class FlipRecord:
    forward: Outcome
    backward: Outcome


@dataclass(frozen=True)
class FlipTable:
    n: int
    records: tuple[tuple[tuple[int, str], FlipRecord], ...]

    def __getitem__(self, key: tuple[int, str]) -> FlipRecord:
        return dict(self.records)[key]

    def __len__(self) -> int:
        return len(self.records)


class _Tracer:
    def __init__(self, dyn: SeamDynamics, moved: Sequence[str], bound: int) -> None:
        self.dyn = dyn
        # an empty path still has one level, glued to itself by f
        self.moved = list(moved) or [None]
        self.n = len(self.moved)
        self.bound = bound

    def forward(self, level: int, cid: str) -> tuple[Outcome, list[tuple[int, str]]]:
        seen = set()
        orbit = []
        steps = 0
        while True:
            state = (level, cid)
            if state in seen:
                raise NonTerminatingOrbit(f"curve {cid} returns to level {level} without flipping", state)
            seen.add(state)
            orbit.append(state)
            if self.moved[level] == cid:
                return FlipEvent(level, steps, state), orbit
            cls = self.dyn.escape_class(cid, True)
            if cls is not None:
                return EscapeEvent("S+", cls, steps), orbit
            if steps >= self.bound:
                raise NonTerminatingOrbit(f"curve {cid} neither flips nor escapes within {self.bound} steps", state)
            steps += 1
            level += 1
            if level >= self.n:
                level = 0
                cid = self.dyn.image(cid)

    def backward(self, level: int, cid: str) -> tuple[Outcome, list[tuple[int, str]]]:
        """Trace back from the curve ``cid`` of P_level; a flip at block b
        means ``cid`` is the curve produced by move b."""
        seen = set()
        orbit = []
        steps = 0
        while True:
            if level == 0:
                level = self.n
                cid = self.dyn.preimage(cid)
            state = (level, cid)
            if state in seen:
                raise NonTerminatingOrbit(f"curve {cid} returns to level {level} without flipping", state)
            seen.add(state)
            orbit.append(state)
            if self.moved[level - 1] == cid:
                return FlipEvent(level - 1, steps, state), orbit
            cls = self.dyn.escape_class(cid, False)
            if cls is not None:
                return EscapeEvent("S-", cls, steps), orbit
            if steps >= self.bound:
                raise NonTerminatingOrbit(f"curve {cid} neither flips nor escapes within {self.bound} steps", state)
            steps += 1
            level -= 1


def trace_orbits(
    dyn: SeamDynamics,
    moved: Sequence[str],
    curves: Sequence[str],
    bound: int,
) -> FlipTable:
    """Flip data for every curve id at every level; an orbit that escapes in
    both directions without flipping is a reducing line."""
    tr = _Tracer(dyn, moved, bound)
    records = []
    for level in range(tr.n):
        for cid in curves:
            fwd, _ = tr.forward(level, cid)
            bwd, _ = tr.backward(level, cid)
            if isinstance(fwd, EscapeEvent) and isinstance(bwd, EscapeEvent):
                raise NonTerminatingOrbit(
                    f"curve {cid} at level {level} never flips: it runs from {bwd.side} to {fwd.side}",
                    (level, cid),
                )
            records.append(((level, cid), FlipRecord(fwd, bwd)))
    return FlipTable(len(moved), tuple(records))


def orbit_bound(f: EndPeriodicMap, path: MovePath) -> int:
    n = len(path.moves)
    depth = max((e.stub_depth for e in f.window.end_stubs), default=0)
    return n * len(path.base.curves) + depth * n


def _check_endpoint(f: EndPeriodicMap, path: MovePath) -> list[PantsDecomposition]:
    decomps = path.decompositions()
    if decomps[-1] != act_on_pants(inverse(f), path.base):
        raise PathEndpointMismatch("path does not end at f^-1 of its base")
    return decomps


def trace_flips(f: EndPeriodicMap, path: MovePath) -> FlipTable:
    _check_endpoint(f, path)
    dyn = seam_dynamics(f, path)
    curves = [c.id for c in path.base.curves]
    return trace_orbits(dyn, [m.curve for m in path.moves], curves, orbit_bound(f, path))


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PantsBlock:
    level: int
    kind: PieceKind
    d1_minus: CurveState
    d1_plus: CurveState
    d1_v: tuple[str, ...]
    d2_minus: tuple[str, ...]
    d2_plus: tuple[str, ...]


@dataclass(frozen=True)
class BlockEnd:
    block: int
    side: str

    def __str__(self) -> str:
        return f"{self.block}.{self.side}"


@dataclass(frozen=True)
class BoundaryEnd:
    side: str
    cls: str

    def __str__(self) -> str:
        return f"boundary.{self.side}.{self.cls}"


@dataclass(frozen=True)
class AnnulusRecord:
    id: str
    curve_orbit: tuple[tuple[int, str], ...]
    lower_end: BlockEnd | BoundaryEnd
    upper_end: BlockEnd | BoundaryEnd
    degenerate: bool

    @property
    def block_attached_ends(self) -> int:
        return sum(isinstance(e, BlockEnd) for e in (self.lower_end, self.upper_end))


@dataclass(frozen=True)
class BoundaryPants:
    plus: PantsDecomposition
    minus: PantsDecomposition

    @property
    def curve_count(self) -> int:
        return len(self.plus.curves) + len(self.minus.curves)

    def canonical(self) -> tuple:
        return (self.plus.canonical(), self.minus.canonical())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundaryPants):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())


@dataclass(frozen=True, eq=False)
class BlockComplex:
    blocks: tuple[PantsBlock, ...] = ()
    gluings: tuple[tuple[str, str], ...] = ()
    annuli: tuple[AnnulusRecord, ...] = ()
    boundary_pants: BoundaryPants | None = None
    face_cuffs: tuple[tuple[str, tuple[str, ...]], ...] = field(default=(), repr=False)
    period: int = 0

    @property
    def gluing_map(self) -> dict[str, str]:
        out = {}
        for a, b in self.gluings:
            out[a] = b
            if not b.startswith("boundary."):
                out[b] = a
        return out

    @property
    def n_T(self) -> int:
        return sum(1 for b in self.blocks if b.kind is PieceKind.T)

    @property
    def n_S(self) -> int:
        return sum(1 for b in self.blocks if b.kind is PieceKind.S)

    def faces(self) -> list[str]:
        return [x for b in self.blocks for x in b.d2_minus + b.d2_plus]


def _face_id(block: int, side: str, idx: int) -> str:
    return f"{block}.{side}.{idx}"


def _face_sort_key(face: str) -> tuple:
    if face.startswith("boundary."):
        return (1, face)
    b, side, idx = face.split(".")
    return (0, int(b), 0 if side == "-" else 1, int(idx))


def _adjacent_pants(pd: PantsDecomposition, cid: str) -> list[tuple[str, ...]]:
    seen = []
    for p in pd.pants_of(cid):
        cuffs = tuple(sorted(pd.cuffs(p)))
        if cuffs not in seen:
            seen.append(cuffs)
    return sorted(seen)


def _boundary_from_classes(dyn: SeamDynamics, classes: dict[str, tuple[str, ...]]) -> PantsDecomposition:
    """Rebuild the boundary decomposition from the escaping pants and check
    that it is the periodic quotient it should be."""
    expected = dyn.boundary_surface()
    got = Counter(tuple(sorted(c)) for c in classes.values())
    if got != expected.pant_cuff_multisets():
        raise InvariantViolation("escaping pants do not assemble into the boundary decomposition")
    report = validate_pants(expected, SurfaceSig(dyn.boundary_genus(), 0))
    if not report.ok:
        raise InvariantViolation("; ".join(report.violations))
    return expected


def assemble(
    dyn: SeamDynamics,
    path: MovePath,
    decomps: Sequence[PantsDecomposition],
    bound: int,
) -> BlockComplex:
    moves = path.moves
    n = len(moves)
    if n == 0:
        return BlockComplex()
    moved = [m.curve for m in moves]
    tr = _Tracer(dyn, moved, bound)
    # the flip table doubles as the reducibility check
    trace_orbits(dyn, moved, [c.id for c in path.base.curves], bound)

    blocks = []
    minus_faces: dict[int, list[tuple[str, ...]]] = {}
    plus_faces: dict[int, list[tuple[str, ...]]] = {}
    for j, m in enumerate(moves):
        before, after = decomps[j], decomps[j + 1]
        minus_faces[j] = _adjacent_pants(before, m.curve)
        plus_faces[j] = _adjacent_pants(after, m.curve)
        blocks.append(
            PantsBlock(
                j,
                complexity_one_piece(before, m.curve),
                CurveState(m.curve, m.old_slope),
                CurveState(m.curve, m.new_slope),
                tuple(sorted(piece_cuffs(before, m.curve))),
                tuple(_face_id(j, "-", i) for i in range(len(minus_faces[j]))),
                tuple(_face_id(j, "+", i) for i in range(len(plus_faces[j]))),
            )
        )

    # faces: push every plus face forward until one of its cuffs moves
    glue: dict[str, str] = {}
    hit: Counter = Counter()
    plus_classes: dict[str, tuple[str, ...]] = {}
    minus_classes: dict[str, tuple[str, ...]] = {}
    for j in range(n):
        for i, cuffs in enumerate(plus_faces[j]):
            target, cls = _flow_face(dyn, moved, minus_faces, j, cuffs, bound)
            face = _face_id(j, "+", i)
            if target is not None:
                glue[face] = target
                hit[target] += 1
            else:
                glue[face] = str(BoundaryEnd("S+", cls[0]))
                plus_classes.setdefault(cls[0], cls[1])
                hit[glue[face]] += 1
    for j in range(n):
        for i, cuffs in enumerate(minus_faces[j]):
            face = _face_id(j, "-", i)
            if hit[face] > 1:
                raise InvariantViolation(f"face {face} is glued more than once")
            if hit[face] == 1:
                continue
            cls = _flow_face_back(dyn, moved, plus_faces, j, cuffs, bound)
            glue[face] = str(BoundaryEnd("S-", cls[0]))
            minus_classes.setdefault(cls[0], cls[1])
            hit[glue[face]] += 1

    expected_pants = dyn.boundary_surface().pants
    for side in ("S+", "S-"):
        for p in expected_pants:
            key = str(BoundaryEnd(side, p))
            if hit[key] != 1:
                raise InvariantViolation(f"boundary pant {key} is glued {hit[key]} times")
    plus_surface = _boundary_from_classes(dyn, plus_classes)
    minus_surface = _boundary_from_classes(dyn, minus_classes)

    gluings = []
    for a, b in glue.items():
        if not b.startswith("boundary.") and _face_sort_key(b) < _face_sort_key(a):
            a, b = b, a
        gluings.append((a, b))
    gluings.sort(key=lambda ab: _face_sort_key(ab[0]))

    annuli = _annuli(dyn, tr, moved, plus_surface)

    face_cuffs = []
    for j in range(n):
        face_cuffs.extend((_face_id(j, "-", i), c) for i, c in enumerate(minus_faces[j]))
        face_cuffs.extend((_face_id(j, "+", i), c) for i, c in enumerate(plus_faces[j]))
    return BlockComplex(
        tuple(blocks),
        tuple(gluings),
        tuple(annuli),
        BoundaryPants(plus_surface, minus_surface),
        tuple(face_cuffs),
        dyn.period,
    )


def _flow_face(dyn, moved, minus_faces, j, cuffs, bound):
    n = len(moved)
    level = j + 1
    cur = tuple(cuffs)
    for _ in range(bound + 1):
        if level >= n:
            level = 0
            cur = tuple(dyn.image(c) for c in cur)
        if moved[level] in cur:
            key = tuple(sorted(cur))
            if key not in minus_faces[level]:
                raise InvariantViolation(f"pant {key} reaches block {level} but is not one of its faces")
            return _face_id(level, "-", minus_faces[level].index(key)), None
        cls = dyn.pant_escape_class(cur, True)
        if cls is not None:
            return None, (cls, _class_cuffs(dyn, cur))
        level += 1
    raise NonTerminatingOrbit(f"pant {cuffs} of block {j} never reaches a block or the boundary", (j, cuffs))


def _flow_face_back(dyn, moved, plus_faces, j, cuffs, bound):
    level = j
    cur = tuple(cuffs)
    n = len(moved)
    for _ in range(bound + 1):
        if level == 0:
            level = n
            cur = tuple(dyn.preimage(c) for c in cur)
        if moved[level - 1] in cur:
            raise InvariantViolation(f"pant {cuffs} of block {j} meets block {level - 1} but was not glued to it")
        cls = dyn.pant_escape_class(cur, False)
        if cls is not None:
            return cls, _class_cuffs(dyn, cur)
        level -= 1
    raise NonTerminatingOrbit(f"pant {cuffs} of block {j} never reaches the boundary", (j, cuffs))


def _class_cuffs(dyn, cuffs) -> tuple[str, ...]:
    out = []
    for c in cuffs:
        fwd = dyn.escape_class(c, True)
        bwd = dyn.escape_class(c, False)
        out.append(fwd or bwd or c)
    return tuple(sorted(out))


def _annuli(dyn, tr: _Tracer, moved, boundary: PantsDecomposition) -> list[AnnulusRecord]:
    n = len(moved)
    out = []
    upper_hits: Counter = Counter()
    for j in range(n):
        level, cid = j + 1, moved[j]
        if level == n:
            level, cid = 0, dyn.image(cid)
        res, orbit = tr.forward(level, cid)
        if isinstance(res, FlipEvent):
            upper: BlockEnd | BoundaryEnd = BlockEnd(res.block, "-")
            degenerate = res.steps == 0
        else:
            upper = BoundaryEnd(res.side, res.cls)
            degenerate = False
        upper_hits[str(upper)] += 1
        out.append((BlockEnd(j, "+"), upper, degenerate, orbit))
    classes = sorted(c.id for c in boundary.curves)
    lo = getattr(dyn, "active_lo", 0)
    for cls in classes:
        start = _representative(dyn, cls, lo)
        res, orbit = tr.forward(0, start)
        if isinstance(res, EscapeEvent):
            raise NonTerminatingOrbit(f"boundary curve {cls} runs from S- to S+ without flipping", cls)
        upper = BlockEnd(res.block, "-")
        upper_hits[str(upper)] += 1
        out.append((BoundaryEnd("S-", cls), upper, False, orbit))
    for j in range(n):
        key = str(BlockEnd(j, "-"))
        if upper_hits[key] != 1:
            raise InvariantViolation(f"bottom curve of block {j} ends {upper_hits[key]} annuli")
    for cls in classes:
        key = str(BoundaryEnd("S+", cls))
        if upper_hits[key] != 1:
            raise InvariantViolation(f"boundary curve {key} ends {upper_hits[key]} annuli")
    # backward tracing must agree with the forward assignment
    lower_of = {str(u): lower for lower, u, _, _ in out}
    for j in range(n):
        res, _ = tr.backward(j, moved[j])
        want = lower_of[str(BlockEnd(j, "-"))]
        got = BlockEnd(res.block, "+") if isinstance(res, FlipEvent) else BoundaryEnd(res.side, res.cls)
        if str(got) != str(want):
            raise InvariantViolation(f"block {j}: backward trace gives {got}, forward gives {want}")
    return [
        AnnulusRecord(f"A{i}", tuple(orbit), lower, upper, deg)
        for i, (lower, upper, deg, orbit) in enumerate(out)
    ]


def _representative(dyn, cls: str, lo: int) -> str:
    """A curve id of the given boundary class sitting just below the active
    region, hence escaping backward into that class."""
    t, r = cls[0], int(cls[1:])
    p = dyn.period
    start = lo - p
    pos = start + ((r - start) % p)
    return f"{t}{pos}"


def build_blocks(f: EndPeriodicMap, path: MovePath) -> BlockComplex:
    decomps = _check_endpoint(f, path)
    dyn = seam_dynamics(f, path)
    if not path.moves:
        trace_orbits(dyn, [], [c.id for c in path.base.curves], orbit_bound(f, path) + 1)
        return BlockComplex()
    bc = assemble(dyn, path, decomps, orbit_bound(f, path))
    expected = len(path.moves) + Fraction(3, 2) * phi_star_norm(end_behavior(f))
    if link_components(bc) != expected:
        raise InvariantViolation(f"{link_components(bc)} link components, expected {expected}")
    return bc


def link_components(bc: BlockComplex) -> int:
    return len(bc.annuli)


@dataclass(frozen=True)
class DrilledVolume:
    coefficient: int
    value: mpmath.mpf

    def __str__(self) -> str:
        return f"{self.coefficient}*V_oct = {mpmath.nstr(self.value, 13)}"


def drilled_volume(bc: BlockComplex, precision: int = 15) -> DrilledVolume:
    coeff = bc.n_T + 2 * bc.n_S
    return DrilledVolume(coeff, coeff * hyperbolic_constants(precision).v_oct)


def export_gluing(bc: BlockComplex) -> str:
    lines = [GLUING_HEADER]
    for b in bc.blocks:
        lines.append(f"block {b.level} {b.kind.value} {b.d1_minus.slope} {b.d1_plus.slope}")
    for a, b in bc.gluings:
        lines.append(f"glue {a} {b}")
    for an in bc.annuli:
        lines.append(f"annulus {an.id} {an.lower_end} {an.upper_end} {'true' if an.degenerate else 'false'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Covering checks
# ---------------------------------------------------------------------------


def _project_label(label: str, period: int) -> str:
    head = label[0]
    return f"{head}{int(label[1:]) % period}"


def boundary_covers(big: BlockComplex, small: BlockComplex) -> bool:
    """Whether the boundary decomposition of ``big`` is the lift of that of
    ``small`` under reduction of labels mod the smaller period."""
    if big.boundary_pants is None or small.boundary_pants is None or big.period % small.period:
        return False
    deg = big.period // small.period
    for a, b in ((big.boundary_pants.plus, small.boundary_pants.plus), (big.boundary_pants.minus, small.boundary_pants.minus)):
        pants_img = Counter(
            tuple(sorted(_project_label(c, small.period) for c in a.cuffs(p))) for p in a.pants
        )
        want = Counter({k: v * deg for k, v in b.pant_cuff_multisets().items()})
        if pants_img != want:
            return False
        curve_img = Counter(_project_label(c.id, small.period) for c in a.curves)
        if curve_img != Counter({c.id: deg for c in b.curves}):
            return False
    return True
