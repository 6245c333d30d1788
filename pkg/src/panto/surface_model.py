"""Finite-type surface signatures, truncation windows and pants decompositions.

A pants decomposition is stored as a trivalent graph: every pant has three
cuff slots, every internal curve occupies two slots and every window-boundary
curve occupies one.  Curves keep a stable opaque id for their whole life; a
complexity-one piece around an internal curve carries a slope recording which
curve of that piece is currently in the decomposition.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import CurveNotInternal, InputError


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceSig:
    genus: int
    punctures_or_boundary: int

    def __post_init__(self) -> None:
        if self.genus < 0 or self.punctures_or_boundary < 0:
            raise ValueError("genus and boundary count must be nonnegative")

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.punctures_or_boundary


def complexity(sig: SurfaceSig) -> int:
    return 3 * sig.genus - 3 + sig.punctures_or_boundary


def admits_pants(sig: SurfaceSig) -> bool:
    """True when the surface can be cut into pairs of pants."""
    if sig.genus == 0:
        return sig.punctures_or_boundary >= 3
    if sig.genus == 1:
        return sig.punctures_or_boundary >= 1
    return True


def pants_count(sig: SurfaceSig) -> int:
    return -sig.euler_characteristic


# ---------------------------------------------------------------------------
# Slopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Slope:
    """An extended rational p/q with q >= 0; infinity is 1/0."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 0:
            raise ValueError(f"slope denominator must be nonnegative: {self.p}/{self.q}")
        if self.p == 0 and self.q == 0:
            raise ValueError("0/0 is not a slope")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"slope {self.p}/{self.q} is not reduced")
        if self.q == 0 and self.p != 1:
            raise ValueError("infinity must be written 1/0")

    @classmethod
    def of(cls, p: int, q: int) -> Slope:
        """Normalize an arbitrary nonzero integer vector to a slope."""
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> Slope:
        raw = text.strip()
        if raw in ("inf", "oo", "∞"):
            return cls(1, 0)
        try:
            num, _, den = raw.partition("/")
            p = int(num)
            q = int(den) if den else 1
        except ValueError as exc:
            raise InputError(f"bad slope {text!r}") from exc
        if p == 0 and q == 0:
            raise InputError("0/0 is not a slope")
        return cls.of(p, q)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


BASE_SLOPE = Slope(0, 1)
INFINITY = Slope(1, 0)


def parity_class(s: Slope) -> int:
    """Index of the mod-2 class of a slope: 0/1 -> 0, 1/0 -> 1, 1/1 -> 2."""
    key = (s.p % 2, s.q % 2)
    return {(0, 1): 0, (1, 0): 1, (1, 1): 2}[key]


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------


class Orientation(str, Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class EndStub:
    end_id: str
    orientation: Orientation
    stub_depth: int = 1

    def __post_init__(self) -> None:
        if self.stub_depth < 0:
            raise ValueError("stub_depth must be nonnegative")


@dataclass(frozen=True)
class Window:
    """The compact core of S cut along the end curves, plus end stubs.

    ``offset`` locates the core inside a ladder surface (index of its first
    handle); it is zero for every window that is not ladder-shaped.
    """

    core: SurfaceSig
    end_stubs: tuple[EndStub, ...]
    offset: int = 0

    def __post_init__(self) -> None:
        if len(self.end_stubs) < 2:
            raise ValueError("a window needs at least two ends")
        if self.core.punctures_or_boundary != len(self.end_stubs):
            raise ValueError("core boundary count must equal the number of ends")
        ids = [e.end_id for e in self.end_stubs]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate end ids")

    @property
    def n_ends(self) -> int:
        return len(self.end_stubs)

    @property
    def end_ids(self) -> tuple[str, ...]:
        return tuple(e.end_id for e in self.end_stubs)

    def stub(self, end_id: str) -> EndStub:
        for e in self.end_stubs:
            if e.end_id == end_id:
                return e
        raise KeyError(end_id)

    @classmethod
    def make(cls, genus: int, ends: Iterable[EndStub], offset: int = 0) -> Window:
        ends = tuple(ends)
        return cls(SurfaceSig(genus, len(ends)), ends, offset)

    def to_dict(self) -> dict:
        out: dict = {
            "genus": self.core.genus,
            "ends": [
                {"id": e.end_id, "orientation": e.orientation.value, "stub_depth": e.stub_depth}
                for e in self.end_stubs
            ],
        }
        if self.offset:
            out["offset"] = self.offset
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> Window:
        try:
            ends = tuple(
                EndStub(str(e["id"]), Orientation(e.get("orientation", "unassigned")), int(e.get("stub_depth", 1)))
                for e in data["ends"]
            )
            return cls.make(int(data["genus"]), ends, int(data.get("offset", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad window: {exc}") from exc


# ---------------------------------------------------------------------------
# Pants decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CuffSlot:
    pant: str
    index: int

    def __str__(self) -> str:
        return f"{self.pant}.s{self.index}"

    @classmethod
    def parse(cls, text: str) -> CuffSlot:
        pant, sep, idx = text.rpartition(".s")
        if not sep or not pant:
            raise InputError(f"bad cuff slot {text!r}")
        try:
            index = int(idx)
        except ValueError as exc:
            raise InputError(f"bad cuff slot {text!r}") from exc
        if index not in (1, 2, 3):
            raise InputError(f"cuff slot index must be 1, 2 or 3 in {text!r}")
        return cls(pant, index)


@dataclass(frozen=True)
class Internal:
    a: CuffSlot
    b: CuffSlot


@dataclass(frozen=True)
class WindowBoundary:
    end_id: str
    slot: CuffSlot | None = None


Attachment = Union[Internal, WindowBoundary]


@dataclass(frozen=True)
class Curve:
    id: str
    attachment: Attachment

    @property
    def is_internal(self) -> bool:
        return isinstance(self.attachment, Internal)


class PieceKind(str, Enum):
    T = "T"
    S = "S"


@dataclass(frozen=True)
class PieceFrame:
    """Reference data for tracking cuff pairings of a four-holed sphere.

    ``cuffs`` is the sorted cuff multiset, ``base_class`` the parity class of
    the slope when the frame was fixed and ``base_pairing`` the index of the
    partner of the smallest cuff at that time.
    """

    cuffs: tuple[str, ...]
    base_class: int
    base_pairing: int


@dataclass(frozen=True, eq=False)
class PantsDecomposition:
    pants: tuple[str, ...]
    curves: tuple[Curve, ...]
    slopes: tuple[tuple[str, Slope], ...] = ()
    frames: tuple[tuple[str, PieceFrame], ...] = field(default=(), repr=False)

    @classmethod
    def build(
        cls,
        pants: Iterable[str],
        curves: Iterable[Curve],
        slopes: Mapping[str, Slope] | None = None,
        frames: Mapping[str, PieceFrame] | None = None,
    ) -> PantsDecomposition:
        pants = tuple(pants)
        curves = _place_boundary_curves(pants, tuple(curves))
        slope_map = dict(slopes or {})
        for c in curves:
            if c.is_internal:
                slope_map.setdefault(c.id, BASE_SLOPE)
        return cls(
            pants,
            curves,
            tuple(sorted(slope_map.items())),
            tuple(sorted((frames or {}).items())),
        )

    # lookups ---------------------------------------------------------------

    @cached_property
    def curve_map(self) -> dict[str, Curve]:
        return {c.id: c for c in self.curves}

    @cached_property
    def slope_map(self) -> dict[str, Slope]:
        return dict(self.slopes)

    @cached_property
    def frame_map(self) -> dict[str, PieceFrame]:
        return dict(self.frames)

    @cached_property
    def slot_map(self) -> dict[CuffSlot, str]:
        out: dict[CuffSlot, str] = {}
        for c in self.curves:
            for slot in attachment_slots(c.attachment):
                out[slot] = c.id
        return out

    def curve(self, cid: str) -> Curve:
        try:
            return self.curve_map[cid]
        except KeyError:
            raise CurveNotInternal(f"unknown curve {cid!r}") from None

    def slope(self, cid: str) -> Slope:
        return self.slope_map[cid]

    def cuffs(self, pant: str) -> tuple[str, str, str]:
        """Curve ids on the three slots of a pant, in slot order."""
        out = []
        for i in (1, 2, 3):
            slot = CuffSlot(pant, i)
            cid = self.slot_map.get(slot)
            if cid is None:
                raise KeyError(f"empty slot {slot}")
            out.append(cid)
        return (out[0], out[1], out[2])

    def pants_of(self, cid: str) -> tuple[str, ...]:
        return tuple(s.pant for s in attachment_slots(self.curve(cid).attachment))

    @property
    def internal_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.curves if c.is_internal)

    @property
    def boundary_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.curves if not c.is_internal)

    def pant_cuff_multisets(self) -> Counter:
        return Counter(tuple(sorted(self.cuffs(p))) for p in self.pants)

    # value semantics -------------------------------------------------------

    def canonical(self) -> tuple:
        """Pant names are labels only: two decompositions are equal when they
        have the same curves, boundary ends, slopes and pant cuff multisets."""
        bnd = tuple(sorted((c.id, c.attachment.end_id) for c in self.curves if isinstance(c.attachment, WindowBoundary)))
        return (
            tuple(sorted(self.internal_ids)),
            bnd,
            self.slopes,
            tuple(sorted(self.pant_cuff_multisets().items())),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PantsDecomposition):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    # updates ---------------------------------------------------------------

    def with_slopes(self, updates: Mapping[str, Slope]) -> PantsDecomposition:
        slopes = dict(self.slopes)
        slopes.update(updates)
        return PantsDecomposition(self.pants, self.curves, tuple(sorted(slopes.items())), self.frames)

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        curves = []
        for c in self.curves:
            if isinstance(c.attachment, Internal):
                curves.append({"id": c.id, "attach": [str(c.attachment.a), str(c.attachment.b)]})
            else:
                att = {"boundary": c.attachment.end_id}
                if c.attachment.slot is not None:
                    att["slot"] = str(c.attachment.slot)
                curves.append({"id": c.id, "attach": att})
        return {
            "pants": list(self.pants),
            "curves": curves,
            "slopes": {cid: str(s) for cid, s in self.slopes},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> PantsDecomposition:
        try:
            pants = [str(p) for p in data["pants"]]
            curves = []
            for entry in data["curves"]:
                att = entry["attach"]
                if isinstance(att, Mapping):
                    slot = CuffSlot.parse(str(att["slot"])) if "slot" in att else None
                    curves.append(Curve(str(entry["id"]), WindowBoundary(str(att["boundary"]), slot)))
                else:
                    a, b = att
                    curves.append(Curve(str(entry["id"]), Internal(CuffSlot.parse(a), CuffSlot.parse(b))))
            slopes = {str(k): Slope.parse(str(v)) for k, v in (data.get("slopes") or {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad pants decomposition: {exc}") from exc
        return cls.build(pants, curves, slopes)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_pants(pd: PantsDecomposition, target: Window | SurfaceSig) -> ValidationReport:
    if isinstance(target, Window):
        sig = target.core
        end_ids: tuple[str, ...] | None = target.end_ids
    else:
        sig = target
        end_ids = None
    problems: list[str] = []

    if len(set(pd.pants)) != len(pd.pants):
        problems.append("duplicate pant id")
    ids = [c.id for c in pd.curves]
    if len(set(ids)) != len(ids):
        problems.append("duplicate curve id")

    pant_set = set(pd.pants)
    uses: Counter = Counter()
    for c in pd.curves:
        for slot in attachment_slots(c.attachment):
            if slot.pant not in pant_set or slot.index not in (1, 2, 3):
                problems.append(f"unknown slot {slot} on curve {c.id}")
            uses[slot] += 1
    reused = sorted(str(s) for s, n in uses.items() if n > 1)
    if reused:
        problems.append("slot reuse: " + ", ".join(reused))

    n_internal = sum(1 for c in pd.curves if c.is_internal)
    n_boundary = len(pd.curves) - n_internal
    if n_internal != complexity(sig):
        problems.append(f"wrong curve count: {n_internal} internal curves, expected {complexity(sig)}")
    if n_boundary != sig.punctures_or_boundary:
        problems.append(
            f"wrong curve count: {n_boundary} boundary curves, expected {sig.punctures_or_boundary}"
        )
    if len(pd.pants) != pants_count(sig):
        problems.append(f"wrong pants count: {len(pd.pants)}, expected {pants_count(sig)}")
    free = 3 * len(pd.pants) - len(uses)
    if free:
        problems.append(f"unused slots: {free}")

    if end_ids is not None:
        seen = Counter(c.attachment.end_id for c in pd.curves if isinstance(c.attachment, WindowBoundary))
        if sorted(seen.elements()) != sorted(end_ids):
            problems.append("boundary curves do not match window ends")

    for cid, _ in pd.slopes:
        c = pd.curve_map.get(cid)
        if c is None or not c.is_internal:
            problems.append(f"slope on non-internal curve {cid}")

    if pd.pants and not _dual_graph_connected(pd):
        problems.append("disconnected dual graph")
    return ValidationReport(tuple(problems))


def attachment_slots(att: Attachment) -> tuple[CuffSlot, ...]:
    if isinstance(att, Internal):
        return (att.a, att.b)
    return (att.slot,) if att.slot is not None else ()


def _place_boundary_curves(pants: tuple[str, ...], curves: tuple[Curve, ...]) -> tuple[Curve, ...]:
    """Give boundary curves without an explicit slot the free slots in order."""
    if all(isinstance(c.attachment, Internal) or c.attachment.slot is not None for c in curves):
        return curves
    used = {s for c in curves for s in attachment_slots(c.attachment)}
    free = iter(CuffSlot(p, i) for p in pants for i in (1, 2, 3) if CuffSlot(p, i) not in used)
    out = []
    for c in curves:
        att = c.attachment
        if isinstance(att, WindowBoundary) and att.slot is None:
            att = WindowBoundary(att.end_id, next(free, None))
        out.append(Curve(c.id, att))
    return tuple(out)


def _dual_graph_connected(pd: PantsDecomposition) -> bool:
    adj: dict[str, set[str]] = {p: set() for p in pd.pants}
    for c in pd.curves:
        if isinstance(c.attachment, Internal):
            a, b = c.attachment.a.pant, c.attachment.b.pant
            if a in adj and b in adj:
                adj[a].add(b)
                adj[b].add(a)
    start = pd.pants[0]
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(adj)


def complexity_one_piece(pd: PantsDecomposition, cid: str) -> PieceKind:
    c = pd.curve(cid)
    if not isinstance(c.attachment, Internal):
        raise CurveNotInternal(f"{cid} is a window-boundary curve")
    return PieceKind.T if c.attachment.a.pant == c.attachment.b.pant else PieceKind.S


def piece_cuffs(pd: PantsDecomposition, cid: str) -> tuple[str, ...]:
    """Boundary curves of the complexity-one piece around ``cid``, with
    multiplicity: one for a one-holed torus, four for a four-holed sphere."""
    c = pd.curve(cid)
    if not isinstance(c.attachment, Internal):
        raise CurveNotInternal(f"{cid} is a window-boundary curve")
    a, b = c.attachment.a, c.attachment.b
    if a.pant == b.pant:
        rest = [pd.cuffs(a.pant)[i - 1] for i in (1, 2, 3) if i not in (a.index, b.index)]
        return tuple(rest)
    out: list[str] = []
    for slot in (a, b):
        out.extend(pd.cuffs(slot.pant)[i - 1] for i in (1, 2, 3) if i != slot.index)
    return tuple(out)
