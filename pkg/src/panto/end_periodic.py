"""End-periodic maps f = rho o h as a handle-shift system plus a twist word.

Two layers live here.  The end-behaviour formulas (shift vector, quotient
genus, boundary complexity) work for any number of ends.  The action on pants
decompositions is modelled on the two-ended ladder surface, a chain of
handles indexed by the integers with curves

    s<h>  separating handle h-1 from handle h,
    a<h>  cutting off handle h,
    m<h>  a meridian of handle h,

cut into pants Y<h> = (s<h>, s<h+1>, a<h>) and X<h> = (a<h>, m<h>, m<h>).
A shift with k strips moves handle h to handle h+k.  This is the one family in
which a shift-invariant pants decomposition exists, so it is the family on
which paths and block decompositions are computed.  Windows with more ends
are accepted for the formulas and for declared certificates only.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import (
    CurveOutsideWindow,
    InputError,
    InvalidPath,
    InvariantViolation,
    SupportMismatch,
    UnbalancedEndBehavior,
    ZeroShiftEnd,
)
from .pants_graph import (
    IDENTITY,
    ElementaryMove,
    Matrix,
    MovePath,
    act,
    apply_move,
    geodesic_moves,
    matinv,
    matmul,
    to_infinity,
)
from .surface_model import (
    BASE_SLOPE,
    Curve,
    CuffSlot,
    EndStub,
    Internal,
    Orientation,
    PantsDecomposition,
    PieceFrame,
    PieceKind,
    Slope,
    SurfaceSig,
    Window,
    WindowBoundary,
    complexity,
    complexity_one_piece,
    validate_pants,
)


# ---------------------------------------------------------------------------
# End behaviour
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EndBehavior:
    """Signed genus shifted past each end; positive for attracting ends."""

    w: tuple[int, ...]
    ends: tuple[str, ...] | None = None

    def index(self, end: int | str) -> int:
        if isinstance(end, int):
            return end
        if self.ends is None:
            raise KeyError(end)
        return self.ends.index(end)


def phi_star_norm(b: EndBehavior) -> int:
    if sum(b.w) != 0:
        raise UnbalancedEndBehavior(f"shift vector {b.w} does not sum to zero")
    return sum(abs(x) for x in b.w)


def quotient_genus(b: EndBehavior, end: int | str) -> int:
    """Genus of the boundary component of the compactified mapping torus
    associated with one end."""
    w = b.w[b.index(end)]
    if w == 0:
        raise ZeroShiftEnd(f"end {end} has zero shift")
    return 1 + abs(w)


def side_complexity(b: EndBehavior) -> tuple[int, int]:
    """Complexities of the attracting and repelling boundary surfaces,
    summed component by component."""
    plus = minus = 0
    for i, w in enumerate(b.w):
        xi = complexity(SurfaceSig(quotient_genus(b, i), 0))
        if w > 0:
            plus += xi
        else:
            minus += xi
    return plus, minus


def boundary_complexity(b: EndBehavior) -> int:
    phi_star_norm(b)
    plus, minus = side_complexity(b)
    return plus + minus


# ---------------------------------------------------------------------------
# Handle strips and maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StripRecord:
    id: str
    repelling_end: str
    attracting_end: str
    window_genus: int = 3


@dataclass(frozen=True)
class HandleShiftSystem:
    strips: tuple[StripRecord, ...]

    def shift_vector(self, end_ids: Sequence[str]) -> tuple[int, ...]:
        out = []
        for e in end_ids:
            into = sum(1 for s in self.strips if s.attracting_end == e)
            out_of = sum(1 for s in self.strips if s.repelling_end == e)
            out.append(into - out_of)
        return tuple(out)


def strips_for(w: Sequence[int], end_ids: Sequence[str], window_genus: int = 3) -> HandleShiftSystem:
    """Pair repelling and attracting ends greedily into |w|/2 strips."""
    if sum(w) != 0:
        raise UnbalancedEndBehavior(f"shift vector {tuple(w)} does not sum to zero")
    sources = [[e, -x] for e, x in zip(end_ids, w) if x < 0]
    sinks = [[e, x] for e, x in zip(end_ids, w) if x > 0]
    strips = []
    i = j = 0
    while i < len(sources) and j < len(sinks):
        strips.append(StripRecord(f"R{len(strips) + 1}", sources[i][0], sinks[j][0], window_genus))
        sources[i][1] -= 1
        sinks[j][1] -= 1
        if sources[i][1] == 0:
            i += 1
        if sinks[j][1] == 0:
            j += 1
    return HandleShiftSystem(tuple(strips))


@dataclass(frozen=True)
class Twist:
    """A Dehn twist power.  ``curve`` names a pants curve; a trailing ``*``
    names the dual curve of that curve's complexity-one piece instead."""

    curve: str
    power: int

    @property
    def slot(self) -> str:
        return self.curve.rstrip("*")

    @property
    def dual(self) -> bool:
        return self.curve.endswith("*")


@dataclass(frozen=True)
class EndPeriodicMap:
    window: Window
    shift: HandleShiftSystem
    compact_word: tuple[Twist, ...] = ()
    support: frozenset[str] = frozenset()
    pants: PantsDecomposition | None = None
    exponent: int = 1

    def __post_init__(self) -> None:
        if self.exponent == 0:
            raise ValueError("exponent must be nonzero")


def end_behavior(f: EndPeriodicMap) -> EndBehavior:
    w = f.shift.shift_vector(f.window.end_ids)
    return EndBehavior(tuple(x * f.exponent for x in w), f.window.end_ids)


def map_violations(f: EndPeriodicMap) -> list[str]:
    problems = []
    w = f.shift.shift_vector(f.window.end_ids)
    ids = set(f.window.end_ids)
    for s in f.shift.strips:
        if s.repelling_end not in ids or s.attracting_end not in ids:
            problems.append(f"strip {s.id} names an unknown end")
    for e, x in zip(f.window.end_stubs, w):
        if x == 0:
            problems.append(f"end {e.end_id} has zero shift")
        if x > 0 and any(s.repelling_end == e.end_id for s in f.shift.strips):
            problems.append(f"attracting end {e.end_id} also repels a strip")
        if x < 0 and any(s.attracting_end == e.end_id for s in f.shift.strips):
            problems.append(f"repelling end {e.end_id} also attracts a strip")
        if x > 0 and e.orientation is Orientation.REPELLING:
            problems.append(f"end {e.end_id} is marked repelling but attracts genus")
        if x < 0 and e.orientation is Orientation.ATTRACTING:
            problems.append(f"end {e.end_id} is marked attracting but repels genus")
    if f.pants is not None:
        problems.extend(validate_pants(f.pants, f.window).violations)
    for g in f.compact_word:
        if g.slot not in f.support:
            problems.append(f"twist curve {g.curve} lies outside the support")
    return problems


# ---------------------------------------------------------------------------
# The ladder model
# ---------------------------------------------------------------------------

_LADDER_ID = re.compile(r"^([sam])(-?\d+)$")


def parse_ladder_id(cid: str) -> tuple[str, int]:
    m = _LADDER_ID.match(cid)
    if not m:
        raise SupportMismatch(f"{cid!r} is not a ladder curve")
    return m.group(1), int(m.group(2))


def ladder_id(kind: str, pos: int) -> str:
    return f"{kind}{pos}"


def shift_id(cid: str, d: int) -> str:
    t, p = parse_ladder_id(cid)
    return ladder_id(t, p + d)


def ladder_piece_kind(cid: str) -> PieceKind:
    return PieceKind.T if parse_ladder_id(cid)[0] == "m" else PieceKind.S


def ladder_pant_cuffs(name: str) -> tuple[str, str, str]:
    kind, pos = name[0], int(name[1:])
    if kind == "Y":
        return (f"s{pos}", f"s{pos + 1}", f"a{pos}")
    return (f"a{pos}", f"m{pos}", f"m{pos}")


@dataclass(frozen=True)
class LadderModel:
    lo: int
    hi: int
    strips: int
    attracting: str
    repelling: str

    @property
    def genus(self) -> int:
        return self.hi - self.lo

    def pant_names(self, lo: int | None = None, hi: int | None = None) -> list[str]:
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        return [n for h in range(lo, hi) for n in (f"Y{h}", f"X{h}")]

    def curve_ids(self, lo: int | None = None, hi: int | None = None) -> list[str]:
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        out = []
        for h in range(lo, hi + 1):
            out.append(f"s{h}")
            if h < hi:
                out.extend((f"a{h}", f"m{h}"))
        return out

    def internal_ids(self) -> list[str]:
        return [c for c in self.curve_ids() if c not in (f"s{self.lo}", f"s{self.hi}")]

    def window(self, stub_depth: int = 2) -> Window:
        return Window.make(
            self.genus,
            (
                EndStub(self.attracting, Orientation.ATTRACTING, stub_depth),
                EndStub(self.repelling, Orientation.REPELLING, stub_depth),
            ),
            self.lo,
        )

    def with_range(self, lo: int, hi: int) -> LadderModel:
        return replace(self, lo=lo, hi=hi)

    def base(self) -> PantsDecomposition:
        return _config_to_pd(self, {n: ladder_pant_cuffs(n) for n in self.pant_names()}, {}, {})


def ladder_model(f: EndPeriodicMap) -> LadderModel:
    ends = f.window.end_stubs
    if len(ends) != 2 or not f.shift.strips:
        raise SupportMismatch("no periodic decomposition in this model: the window is not a two-ended ladder")
    w = f.shift.shift_vector(f.window.end_ids)
    attracting = [e.end_id for e, x in zip(ends, w) if x > 0]
    repelling = [e.end_id for e, x in zip(ends, w) if x < 0]
    if len(attracting) != 1 or len(repelling) != 1:
        raise SupportMismatch("no periodic decomposition in this model: shift vector is not (k, -k)")
    lo = f.window.offset
    return LadderModel(lo, lo + f.window.core.genus, len(f.shift.strips), attracting[0], repelling[0])


def is_ladder(f: EndPeriodicMap) -> bool:
    try:
        ladder_model(f)
    except SupportMismatch:
        return False
    return True


def model_for_pd(f: EndPeriodicMap, pd: PantsDecomposition) -> LadderModel:
    """The ladder model restricted to the core range spanned by ``pd``."""
    model = ladder_model(f)
    ends = {c.attachment.end_id: c.id for c in pd.curves if isinstance(c.attachment, WindowBoundary)}
    if set(ends) != {model.attracting, model.repelling}:
        raise SupportMismatch("decomposition boundary does not match the window ends")
    _, lo = parse_ladder_id(ends[model.repelling])
    _, hi = parse_ladder_id(ends[model.attracting])
    if hi <= lo:
        raise SupportMismatch("decomposition core is empty")
    sub = model.with_range(lo, hi)
    if sorted(c.id for c in pd.curves) != sorted(sub.curve_ids()) or sorted(pd.pants) != sorted(sub.pant_names()):
        raise SupportMismatch("decomposition is not ladder-shaped")
    report = validate_pants(pd, sub.window())
    if not report.ok:
        raise SupportMismatch("; ".join(report.violations))
    return sub


def ladder_base(f: EndPeriodicMap) -> PantsDecomposition:
    return ladder_model(f).base()


def _config_to_pd(
    model: LadderModel,
    pants: Mapping[str, tuple[str, str, str]],
    slopes: Mapping[str, Slope],
    frames: Mapping[str, PieceFrame],
) -> PantsDecomposition:
    names = model.pant_names()
    slots: dict[str, list[CuffSlot]] = {}
    for name in names:
        for i, cid in enumerate(pants[name], start=1):
            slots.setdefault(cid, []).append(CuffSlot(name, i))
    curves = []
    ids = model.curve_ids()
    for cid in ids:
        held = sorted(slots.get(cid, []))
        if cid == f"s{model.lo}":
            end = model.repelling
        elif cid == f"s{model.hi}":
            end = model.attracting
        else:
            end = None
        if end is not None:
            if len(held) != 1:
                raise SupportMismatch(f"boundary curve {cid} leaves its pant")
            curves.append(Curve(cid, WindowBoundary(end, held[0])))
        else:
            if len(held) != 2:
                raise SupportMismatch(f"curve {cid} is not internal to the window")
            curves.append(Curve(cid, Internal(held[0], held[1])))
    used = set(ids)
    for name in names:
        for cid in pants[name]:
            if cid not in used:
                raise SupportMismatch(f"pant {name} uses curve {cid} outside the window")
    internal = set(ids) - {f"s{model.lo}", f"s{model.hi}"}
    slope_map = {c: slopes.get(c, BASE_SLOPE) for c in internal}
    frame_map = {c: fr for c, fr in frames.items() if c in internal and all(x in used for x in fr.cuffs)}
    return PantsDecomposition.build(names, curves, slope_map, frame_map)


# ---------------------------------------------------------------------------
# Twist action
# ---------------------------------------------------------------------------


def twist_matrix(g: Twist, kind: PieceKind) -> Matrix:
    step = g.power if kind is PieceKind.T else 2 * g.power
    if g.dual:
        return ((1, step), (0, 1))
    return ((1, 0), (step, 1))


def slot_kind(f: EndPeriodicMap, slot: str) -> PieceKind:
    if f.pants is not None and slot in f.pants.curve_map:
        return complexity_one_piece(f.pants, slot)
    return ladder_piece_kind(slot)


def slot_matrix(f: EndPeriodicMap, slot: str) -> Matrix:
    """Matrix of the compact word on the slope of one slot (word order is
    composition order, the first generator acting last)."""
    m = IDENTITY
    for g in f.compact_word:
        if g.slot == slot:
            m = matmul(m, twist_matrix(g, slot_kind(f, slot)))
    return m


def twisted_slots(f: EndPeriodicMap) -> list[str]:
    seen: list[str] = []
    for g in f.compact_word:
        if g.slot not in seen and slot_matrix(f, g.slot) != IDENTITY:
            seen.append(g.slot)
    return seen


@dataclass(frozen=True)
class CurveState:
    """A curve of the model: the slot it occupies and its slope there."""

    curve: str
    slope: Slope = BASE_SLOPE

    def __str__(self) -> str:
        return f"{self.curve}@{self.slope}"


def apply_word(f: EndPeriodicMap, c: CurveState, inverse: bool = False) -> CurveState:
    m = slot_matrix(f, c.curve)
    if inverse:
        m = matinv(m)
    return CurveState(c.curve, act(m, c.slope))


def act_on_curve(f: EndPeriodicMap, c: CurveState) -> CurveState:
    """Image of a curve under f (or f^-1 for negative exponents); ladder only."""
    model = ladder_model(f)
    k = model.strips
    cur = c
    for _ in range(abs(f.exponent)):
        if f.exponent > 0:
            moved = apply_word(f, cur)
            cur = CurveState(shift_id(moved.curve, k), moved.slope)
        else:
            back = shift_id(cur.curve, -k)
            cur = apply_word(f, CurveState(back, cur.slope), inverse=True)
    return cur


# ---------------------------------------------------------------------------
# Action on pants decompositions
# ---------------------------------------------------------------------------


def act_on_pants(f: EndPeriodicMap, pd: PantsDecomposition) -> PantsDecomposition:
    model = model_for_pd(f, pd)
    k = model.strips
    margin = abs(f.exponent) * k + 1
    lo, hi = model.lo - margin, model.hi + margin
    pants = {n: ladder_pant_cuffs(n) for n in model.pant_names(lo, hi)}
    for n in pd.pants:
        pants[n] = pd.cuffs(n)
    slopes = dict(pd.slopes)
    for cid in model.curve_ids(lo, hi):
        slopes.setdefault(cid, BASE_SLOPE)
    frames = dict(pd.frames)
    for _ in range(abs(f.exponent)):
        d = k if f.exponent > 0 else -k
        new_slopes: dict[str, Slope] = {}
        for cid, s in slopes.items():
            if f.exponent > 0:
                new_slopes[shift_id(cid, d)] = apply_word(f, CurveState(cid, s)).slope
            else:
                target = shift_id(cid, d)
                new_slopes[target] = apply_word(f, CurveState(target, s), inverse=True).slope
        new_pants = {}
        for name, cuffs in pants.items():
            new_name = f"{name[0]}{int(name[1:]) + d}"
            new_pants[new_name] = tuple(shift_id(c, d) for c in cuffs)
        new_frames = {
            shift_id(c, d): PieceFrame(tuple(sorted(shift_id(x, d) for x in fr.cuffs)), fr.base_class, fr.base_pairing)
            for c, fr in frames.items()
        }
        # keep the extended range fixed: fill base data in, drop what left it
        for name in model.pant_names(lo, hi):
            new_pants.setdefault(name, ladder_pant_cuffs(name))
        for cid in model.curve_ids(lo, hi):
            new_slopes.setdefault(cid, BASE_SLOPE)
        keep = set(model.pant_names(lo, hi))
        for name in list(new_pants):
            if name not in keep:
                if tuple(sorted(new_pants[name])) != tuple(sorted(ladder_pant_cuffs(name))):
                    raise SupportMismatch("decomposition is not periodic far from the core")
                del new_pants[name]
        pants, slopes, frames = new_pants, new_slopes, new_frames
    # restrict to the core, insisting that nothing non-periodic is lost
    core = set(model.pant_names())
    core_curves = set(model.curve_ids())
    for name, cuffs in pants.items():
        if name not in core and tuple(sorted(cuffs)) != tuple(sorted(ladder_pant_cuffs(name))):
            raise SupportMismatch("image leaves the window: non-periodic pants outside the core")
    for cid, s in slopes.items():
        if cid not in core_curves and s != BASE_SLOPE:
            raise SupportMismatch(f"image leaves the window: curve {cid} is not periodic")
    for cid in (f"s{model.lo}", f"s{model.hi}"):
        if slopes.get(cid, BASE_SLOPE) != BASE_SLOPE:
            raise SupportMismatch(f"image leaves the window: window boundary {cid} moved")
    return _config_to_pd(model, {n: pants[n] for n in core}, slopes, frames)


def inverse(f: EndPeriodicMap) -> EndPeriodicMap:
    return replace(f, exponent=-f.exponent)


def power(f: EndPeriodicMap, n: int) -> EndPeriodicMap:
    if n < 1:
        raise ValueError("power must be positive")
    if n == 1:
        return f
    return replace(f, exponent=f.exponent * n)


def window_internal_ids(f: EndPeriodicMap) -> set[str]:
    if f.pants is not None:
        return set(f.pants.internal_ids)
    return set(ladder_model(f).internal_ids())


def compose_with_twists(f: EndPeriodicMap, twists: Iterable[tuple[str, int]]) -> EndPeriodicMap:
    """f composed on the right with T_{g_k}^{n_k} ... T_{g_1}^{n_1}."""
    twists = list(twists)
    if not twists:
        return f
    if f.exponent != 1:
        raise ValueError("compose twists onto a base map, not a power")
    allowed = window_internal_ids(f)
    extra = []
    for cid, n in twists:
        g = Twist(cid, int(n))
        if g.slot not in allowed:
            raise CurveOutsideWindow(f"{cid} is not an internal curve of the window")
        extra.append(g)
    word = f.compact_word + tuple(reversed(extra))
    support = f.support | {g.slot for g in extra}
    return replace(f, compact_word=word, support=frozenset(support))


# ---------------------------------------------------------------------------
# Seam dynamics for tracing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LadderDynamics:
    """How curve ids cross the seam of the mapping torus, and when they have
    left the region where the path does anything."""

    period: int
    active_lo: int
    active_hi: int

    def image(self, cid: str) -> str:
        return shift_id(cid, self.period)

    def preimage(self, cid: str) -> str:
        return shift_id(cid, -self.period)

    def _position(self, cid: str) -> int:
        return parse_ladder_id(cid)[1]

    def escape_class(self, cid: str, forward: bool) -> str | None:
        pos = self._position(cid)
        if (forward and pos > self.active_hi) or (not forward and pos < self.active_lo):
            t, _ = parse_ladder_id(cid)
            return f"{t}{pos % self.period}"
        return None

    def pant_escape_class(self, cuffs: Sequence[str], forward: bool) -> str | None:
        positions = [self._position(c) for c in cuffs]
        if forward and min(positions) <= self.active_hi:
            return None
        if not forward and max(positions) >= self.active_lo:
            return None
        srt = tuple(sorted(cuffs))
        for h in (min(positions), min(positions) - 1):
            for name in (f"Y{h}", f"X{h}"):
                if tuple(sorted(ladder_pant_cuffs(name))) == srt:
                    return f"{name[0]}{h % self.period}"
        raise InvariantViolation(f"escaping pant {cuffs} is not periodic")

    def boundary_surface(self) -> PantsDecomposition:
        """The pants decomposition induced on one boundary surface: the
        quotient of a fundamental domain of the ladder by the shift."""
        p = self.period
        pants = [n for r in range(p) for n in (f"Y{r}", f"X{r}")]
        curves = []
        for r in range(p):
            curves.append(Curve(f"s{r}", Internal(CuffSlot(f"Y{(r - 1) % p}", 2), CuffSlot(f"Y{r}", 1))))
            curves.append(Curve(f"a{r}", Internal(CuffSlot(f"Y{r}", 3), CuffSlot(f"X{r}", 1))))
            curves.append(Curve(f"m{r}", Internal(CuffSlot(f"X{r}", 2), CuffSlot(f"X{r}", 3))))
        return PantsDecomposition.build(pants, curves)

    def boundary_genus(self) -> int:
        return self.period + 1


def seam_dynamics(f: EndPeriodicMap, path: MovePath) -> LadderDynamics:
    model = model_for_pd(f, path.base)
    if f.exponent < 1:
        raise SupportMismatch("tracing needs a positive power")
    active = {parse_ladder_id(m.curve)[1] for m in path.moves}
    base = model.base()
    for cid, s in path.base.slopes:
        if s != BASE_SLOPE:
            active.add(parse_ladder_id(cid)[1])
    for name in path.base.pants:
        if tuple(sorted(path.base.cuffs(name))) != tuple(sorted(base.cuffs(name))):
            active.update(parse_ladder_id(c)[1] for c in path.base.cuffs(name))
    if not active:
        lo = hi = model.lo
        return LadderDynamics(model.strips * f.exponent, lo + 1, lo - 1)
    return LadderDynamics(model.strips * f.exponent, min(active), max(active))


# ---------------------------------------------------------------------------
# Paths from P to f^-1(P)
# ---------------------------------------------------------------------------


def path_to_preimage(
    f: EndPeriodicMap,
    base: PantsDecomposition | None = None,
    order: Sequence[str] | None = None,
) -> MovePath:
    """One contiguous run of Farey-geodesic moves per slot that changes.

    Runs on different slots are independent because every run returns the
    parity class of its slot, and with it the cuff pairing, to the start.
    """
    if base is None:
        base = ladder_base(f)
    target = act_on_pants(inverse(f), base)
    changed = [c for c in base.internal_ids if base.slope(c) != target.slope(c)]
    if order is not None:
        if sorted(order) != sorted(changed):
            raise ValueError("order must list exactly the slots that change")
        changed = list(order)
    else:
        changed.sort(key=_ladder_sort_key)
    moves: list[ElementaryMove] = []
    cur = base
    for cid in changed:
        kind = complexity_one_piece(cur, cid)
        run = geodesic_moves(cid, kind, cur.slope(cid), target.slope(cid))
        for m in run:
            cur = apply_move(cur, m)
        moves.extend(run)
    path = MovePath(base, tuple(moves))
    if cur != target:
        raise InvariantViolation("generated path misses f^-1(P)")
    return path


def insert_backtrack(path: MovePath, index: int, curve: str) -> MovePath:
    """Insert a move on ``curve`` and its inverse before move ``index``."""
    decomps = path.decompositions()
    pd = decomps[index]
    kind = complexity_one_piece(pd, curve)
    here = pd.slope(curve)
    m = matinv(to_infinity(here))
    there = act(m, BASE_SLOPE)
    if there == here:
        there = act(m, Slope.of(1, 1))
    step = ElementaryMove(curve, kind, here, there)
    moves = path.moves[:index] + (step, step.inverse()) + path.moves[index:]
    return MovePath(path.base, moves)


def swap_commuting(path: MovePath, index: int) -> MovePath | None:
    """Swap moves ``index`` and ``index + 1`` when they live in disjoint
    pieces; None when they do not commute."""
    if index < 0 or index + 1 >= len(path.moves):
        return None
    decomps = path.decompositions()
    a, b = path.moves[index], path.moves[index + 1]
    if a.curve == b.curve:
        return None
    before = decomps[index]
    if set(before.pants_of(a.curve)) & set(before.pants_of(b.curve)):
        return None
    moves = list(path.moves)
    moves[index], moves[index + 1] = b, a
    swapped = MovePath(path.base, tuple(moves))
    try:
        if swapped.endpoint() != decomps[-1]:
            return None
    except InvalidPath:
        return None
    return swapped


def commuting_swaps(path: MovePath) -> list[int]:
    return [i for i in range(len(path.moves) - 1) if swap_commuting(path, i) is not None]


def _ladder_sort_key(cid: str) -> tuple[int, str]:
    try:
        t, p = parse_ladder_id(cid)
    except SupportMismatch:
        return (0, cid)
    return (p, t)


def concatenated_path(f: EndPeriodicMap, path: MovePath, n: int) -> tuple[EndPeriodicMap, MovePath]:
    """f^n together with the path P -> f^-1 P -> ... -> f^-n P, built by
    transporting the single-period path with f^-1, on a core enlarged
    toward the repelling end so that every copy fits."""
    if n < 1:
        raise ValueError("n must be positive")
    model = model_for_pd(f, path.base)
    shift = model.strips * abs(f.exponent)
    grow = (n - 1) * shift
    big = model.with_range(model.lo - grow, model.hi)
    base = _embed(path.base, model, big)
    moves = list(path.moves)
    copy = list(path.moves)
    back = inverse(f)
    for _ in range(n - 1):
        nxt = []
        for m in copy:
            a = act_on_curve(back, CurveState(m.curve, m.old_slope))
            b = act_on_curve(back, CurveState(m.curve, m.new_slope))
            nxt.append(ElementaryMove(a.curve, m.kind, a.slope, b.slope))
        moves.extend(nxt)
        copy = nxt
    fn = power(f, n)
    if grow:
        fn = replace(fn, window=big.window(max(e.stub_depth for e in f.window.end_stubs)))
    return fn, MovePath(base, tuple(moves))


def _embed(pd: PantsDecomposition, small: LadderModel, big: LadderModel) -> PantsDecomposition:
    pants = {n: ladder_pant_cuffs(n) for n in big.pant_names()}
    for n in pd.pants:
        pants[n] = pd.cuffs(n)
    return _config_to_pd(big, pants, dict(pd.slopes), dict(pd.frames))


# ---------------------------------------------------------------------------
# Example maps
# ---------------------------------------------------------------------------


def ladder_shift(strips: int = 1, genus: int = 3, stub_depth: int = 2, window_genus: int = 3) -> EndPeriodicMap:
    """The pure handle shift on the two-ended ladder, with k strips."""
    model = LadderModel(0, genus, strips, "E1", "E2")
    shift = HandleShiftSystem(tuple(StripRecord(f"R{i + 1}", "E2", "E1", window_genus) for i in range(strips)))
    return EndPeriodicMap(model.window(stub_depth), shift, (), frozenset(model.internal_ids()))


def declared_shift(w: Sequence[int], genus: int = 0, stub_depth: int = 2, window_genus: int = 3) -> EndPeriodicMap:
    """A handle shift with arbitrary shift vector, ends E1..En."""
    ids = [f"E{i + 1}" for i in range(len(w))]
    ends = [
        EndStub(e, Orientation.ATTRACTING if x > 0 else Orientation.REPELLING, stub_depth) for e, x in zip(ids, w)
    ]
    return EndPeriodicMap(Window.make(genus, ends), strips_for(w, ids, window_genus))


def fenley_example(stub_depth: int = 2) -> EndPeriodicMap:
    """rho followed by one twist in each of the three curve classes of a
    single handle: the irreducible example on the genus-shifting ladder."""
    rho = ladder_shift(1, 3, stub_depth)
    return compose_with_twists(rho, [("s1*", 1), ("a1*", 1), ("m1*", 1)])


def random_ladder_map(rng: random.Random, strips: int, genus: int | None = None, extra: int = 1) -> EndPeriodicMap:
    """A ladder map with every curve class of the quotient twisted at least
    once, so that every orbit of pants curves flips."""
    genus = genus if genus is not None else strips + 2
    rho = ladder_shift(strips, genus)
    model = ladder_model(rho)
    internal = model.internal_ids()
    by_class: dict[tuple[str, int], list[str]] = {}
    for cid in internal:
        t, p = parse_ladder_id(cid)
        by_class.setdefault((t, p % strips), []).append(cid)
    chosen = [rng.choice(sorted(v)) for _, v in sorted(by_class.items())]
    for _ in range(extra):
        c = rng.choice(internal)
        if c not in chosen:
            chosen.append(c)
    twists: list[tuple[str, int]] = []
    for c in chosen:
        twists.append((c + "*", rng.choice([1, -1])))
        if rng.random() < 0.25:
            twists.append((c, rng.choice([1, -1])))
    return compose_with_twists(rho, twists)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def map_to_dict(f: EndPeriodicMap) -> dict:
    out: dict = {
        "window": f.window.to_dict(),
        "strips": [
            {"id": s.id, "from": s.repelling_end, "to": s.attracting_end, "window_genus": s.window_genus}
            for s in f.shift.strips
        ],
        "word": [{"twist": g.curve, "power": g.power} for g in f.compact_word],
        "support": sorted(f.support),
    }
    if f.pants is not None:
        out["pants"] = f.pants.to_dict()
    if f.exponent != 1:
        out["exponent"] = f.exponent
    return out


def map_from_dict(data: Mapping) -> EndPeriodicMap:
    try:
        window = Window.from_dict(data["window"])
        strips = tuple(
            StripRecord(
                str(s.get("id", f"R{i + 1}")),
                str(s["from"]),
                str(s["to"]),
                int(s.get("window_genus", 3)),
            )
            for i, s in enumerate(data.get("strips", []))
        )
        word = tuple(Twist(str(g["twist"]), int(g.get("power", 1))) for g in data.get("word", []))
        pants = PantsDecomposition.from_dict(data["pants"]) if "pants" in data else None
        exponent = int(data.get("exponent", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad map: {exc}") from exc
    if "support" in data:
        support = frozenset(str(c) for c in data["support"])
    else:
        support = frozenset(g.slot for g in word)
    f = EndPeriodicMap(window, HandleShiftSystem(strips), word, support, pants, exponent)
    problems = map_violations(f)
    if problems:
        raise InputError("; ".join(problems))
    return f
