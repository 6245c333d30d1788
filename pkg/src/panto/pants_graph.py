"""Elementary moves, move paths and exact distance inside complexity-one pieces.

Inside a one-holed torus or a four-holed sphere the curves are indexed by
extended rationals and the pants graph of the piece is the Farey graph, so
distances there are computed exactly from continued fractions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CurveNotInternal, InputError, InvalidPath, MoveNotApplicable, PathEndpointMismatch
from .surface_model import (
    BASE_SLOPE,
    INFINITY,
    Curve,
    CuffSlot,
    Internal,
    PantsDecomposition,
    PieceFrame,
    PieceKind,
    Slope,
    WindowBoundary,
    attachment_slots,
    complexity_one_piece,
    parity_class,
)

MoveKind = PieceKind


class Unknown(Enum):
    """Sentinel returned by the search oracle when it cannot decide."""

    UNKNOWN = "unknown"

    def __repr__(self) -> str:
        return "Unknown"


UNKNOWN = Unknown.UNKNOWN


# ---------------------------------------------------------------------------
# Slope arithmetic
# ---------------------------------------------------------------------------


def determinant(a: Slope, b: Slope) -> int:
    return a.p * b.q - a.q * b.p


def intersection(a: Slope, b: Slope, kind: PieceKind) -> int:
    """Geometric intersection of the curves with slopes a and b in a piece."""
    d = abs(determinant(a, b))
    return d if kind is PieceKind.T else 2 * d


def farey_adjacent(a: Slope, b: Slope) -> bool:
    return abs(determinant(a, b)) == 1


Matrix = tuple[tuple[int, int], tuple[int, int]]


def act(m: Matrix, s: Slope) -> Slope:
    (a, b), (c, d) = m
    return Slope.of(a * s.p + b * s.q, c * s.p + d * s.q)


def matmul(x: Matrix, y: Matrix) -> Matrix:
    (a, b), (c, d) = x
    (e, f), (g, h) = y
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def matinv(m: Matrix) -> Matrix:
    (a, b), (c, d) = m
    det = a * d - b * c
    if det not in (1, -1):
        raise ValueError("matrix is not unimodular")
    return ((d * det, -b * det), (-c * det, a * det))


IDENTITY: Matrix = ((1, 0), (0, 1))


def to_infinity(a: Slope) -> Matrix:
    """An SL(2,Z) matrix sending slope a to 1/0."""
    p, q = a.p, a.q
    g, x, y = _ext_gcd(p, q)  # p*x + q*y = 1
    # choose (r, s) with p*s - q*r = 1: s = x, r = -y
    s, r = x, -y
    return ((s, -r), (-q, p))


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# Farey distance
# ---------------------------------------------------------------------------


def _partial_quotients(num: int, den: int) -> list[int]:
    out = []
    while den:
        a, r = divmod(num, den)
        out.append(a)
        num, den = den, r
    return out


def distance_from_infinity(x: Slope) -> int:
    """Farey distance from 1/0 to x.

    Writing the fractional part of x as [0; a1, ..., ak], a geodesic from
    infinity enters the strip above x through one of the two integers
    bracketing x.  Unrolling that choice gives a short recursion over the
    partial quotients, evaluated here from the tail.
    """
    if x.q == 0:
        return 0
    if x.q == 1:
        return 1
    quotients = _partial_quotients(x.p % x.q, x.q)[1:]
    k = len(quotients)
    # full[i]: distance for the tail a_i..a_k; lead_one[i]: same tail with a_i replaced by 1
    full = [0] * (k + 2)
    lead_one = [0] * (k + 2)
    full[k] = 1  # empty tail: an integer
    full[k + 1] = 1
    for i in range(k - 1, -1, -1):
        if i == k - 1:
            lead_one[i] = 1
        else:
            lead_one[i] = 1 + min(full[i + 1], full[i + 2])
        a = quotients[i]
        if a == 1:
            full[i] = lead_one[i]
        else:
            full[i] = min(1 + full[i + 1], a - 1 + lead_one[i])
    return full[0]


def farey_distance(a: Slope, b: Slope) -> int:
    return distance_from_infinity(act(to_infinity(a), b))


def farey_geodesic(a: Slope, b: Slope) -> list[Slope]:
    """A shortest Farey path from a to b, endpoints included."""
    path = [a]
    cur = a
    remaining = farey_distance(a, b)
    while remaining:
        m = to_infinity(cur)
        x = act(m, b)
        back = matinv(m)
        if x.q == 1:
            nxt = b
        else:
            n = x.p // x.q
            nxt = None
            for cand in (Slope.of(n, 1), Slope.of(n + 1, 1)):
                step = act(back, cand)
                if farey_distance(step, b) == remaining - 1:
                    nxt = step
                    break
            assert nxt is not None
        path.append(nxt)
        cur = nxt
        remaining -= 1
    return path


def slopes_in_box(bound: int) -> list[Slope]:
    out = [INFINITY] if bound >= 1 else []
    for q in range(0, bound + 1):
        for p in range(-bound, bound + 1):
            if q == 0:
                continue
            try:
                out.append(Slope(p, q))
            except ValueError:
                continue
    return sorted(set(out))


def box_neighbours(s: Slope, bound: int) -> list[Slope]:
    """Farey neighbours of s with |p|, q <= bound."""
    out = []
    for q in range(0, bound + 1):
        for p in range(-bound, bound + 1):
            if q == 0 and p != 1:
                continue
            if abs(s.p * q - s.q * p) == 1:
                out.append(Slope.of(p, q))
    return out


def bfs_distance_oracle(a: Slope, b: Slope, denom_bound: int) -> int | Unknown:
    """Breadth-first distance in the Farey graph restricted to |p|, q <= bound."""

    def inside(s: Slope) -> bool:
        return abs(s.p) <= denom_bound and s.q <= denom_bound and denom_bound >= 1

    if not (inside(a) and inside(b)):
        return UNKNOWN
    if a == b:
        return 0
    adjacency = box_adjacency(denom_bound)
    dist = {a: 0}
    queue = deque([a])
    while queue:
        cur = queue.popleft()
        for nxt in adjacency[cur]:
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                if nxt == b:
                    return dist[nxt]
                queue.append(nxt)
    return UNKNOWN


_ADJ_CACHE: dict[int, dict[Slope, list[Slope]]] = {}


def box_adjacency(bound: int) -> dict[Slope, list[Slope]]:
    if bound not in _ADJ_CACHE:
        nodes = slopes_in_box(bound)
        index = set(nodes)
        adj: dict[Slope, list[Slope]] = {s: [] for s in nodes}
        for s in nodes:
            adj[s] = sorted(t for t in _family_neighbours(s, bound) if t in index)
        _ADJ_CACHE[bound] = adj
    return _ADJ_CACHE[bound]


def _family_neighbours(s: Slope, bound: int) -> Iterator[Slope]:
    # neighbours are t0 + j*s and -t0 + j*s for one fixed neighbour t0
    m = matinv(to_infinity(s))  # sends 1/0 to s; its second column is a neighbour
    t0 = (m[0][1], m[1][1])
    seen = set()
    for base in (t0, (-t0[0], -t0[1])):
        lo = -4 * bound - 4
        for j in range(lo, -lo + 1):
            p, q = base[0] + j * s.p, base[1] + j * s.q
            if q < 0 or (q == 0 and p <= 0):
                continue
            if abs(p) <= bound and q <= bound:
                t = Slope.of(p, q)
                if t not in seen:
                    seen.add(t)
                    yield t


# ---------------------------------------------------------------------------
# Elementary moves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ElementaryMove:
    curve: str
    kind: PieceKind
    old_slope: Slope
    new_slope: Slope

    @property
    def weight(self) -> int:
        return 1 if self.kind is PieceKind.T else 2

    def inverse(self) -> ElementaryMove:
        return ElementaryMove(self.curve, self.kind, self.new_slope, self.old_slope)

    def to_dict(self) -> dict:
        return {"curve": self.curve, "kind": self.kind.value, "from": str(self.old_slope), "to": str(self.new_slope)}

    @classmethod
    def from_dict(cls, data: Mapping) -> ElementaryMove:
        try:
            return cls(
                str(data["curve"]),
                PieceKind(data["kind"]),
                Slope.parse(str(data["from"])),
                Slope.parse(str(data["to"])),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad move: {exc}") from exc


def _pairing_index(cuffs: Sequence[str], pair: Sequence[str]) -> int:
    """Index j such that {c1, c_(j+2)} is the pair containing the smallest
    cuff, among sorted cuffs c1 <= c2 <= c3 <= c4."""
    srt = sorted(cuffs)
    first = srt[0]
    other = sorted(pair)
    if first in other:
        partner = other[1] if other[0] == first else other[0]
    else:
        rest = sorted(srt)
        for x in pair:
            rest.remove(x)
        partner = rest[1] if rest[0] == first else rest[0]
    return srt.index(partner, 1) - 1


def _pair_for_index(cuffs: Sequence[str], j: int) -> tuple[list[str], list[str]]:
    srt = sorted(cuffs)
    first = [srt[0], srt[j + 1]]
    second = [x for i, x in enumerate(srt) if i not in (0, j + 1)]
    return first, second


def apply_move(pd: PantsDecomposition, m: ElementaryMove) -> PantsDecomposition:
    kind = complexity_one_piece(pd, m.curve)
    if kind is not m.kind:
        raise MoveNotApplicable(f"{m.curve} sits in a {kind.value} piece, move is {m.kind.value}")
    current = pd.slope(m.curve)
    if current != m.old_slope:
        raise MoveNotApplicable(f"{m.curve} has slope {current}, move expects {m.old_slope}")
    if not farey_adjacent(m.old_slope, m.new_slope):
        raise MoveNotApplicable(f"slopes {m.old_slope} and {m.new_slope} are not adjacent")
    if kind is PieceKind.T:
        return pd.with_slopes({m.curve: m.new_slope})
    return _rewire(pd, m)


def _rewire(pd: PantsDecomposition, m: ElementaryMove) -> PantsDecomposition:
    att = pd.curve(m.curve).attachment
    assert isinstance(att, Internal)
    slot_a, slot_b = att.a, att.b
    side_a = [CuffSlot(slot_a.pant, i) for i in (1, 2, 3) if i != slot_a.index]
    side_b = [CuffSlot(slot_b.pant, i) for i in (1, 2, 3) if i != slot_b.index]
    cur_a = [pd.slot_map[s] for s in side_a]
    cur_b = [pd.slot_map[s] for s in side_b]
    cuffs = tuple(sorted(cur_a + cur_b))

    frame = pd.frame_map.get(m.curve)
    if frame is None or frame.cuffs != cuffs:
        frame = PieceFrame(cuffs, parity_class(m.old_slope), _pairing_index(cuffs, cur_a))
    target = (frame.base_pairing + parity_class(m.new_slope) - frame.base_class) % 3
    first, second = _pair_for_index(cuffs, target)

    new_slots = dict(zip(side_a, first))
    new_slots.update(zip(side_b, second))
    slot_owner = dict(pd.slot_map)
    slot_owner.update(new_slots)
    curves = _reattach(pd.curves, slot_owner)
    frames = dict(pd.frames)
    frames[m.curve] = frame
    slopes = dict(pd.slopes)
    slopes[m.curve] = m.new_slope
    return PantsDecomposition(pd.pants, curves, tuple(sorted(slopes.items())), tuple(sorted(frames.items())))


def _reattach(curves: Iterable[Curve], slot_owner: Mapping[CuffSlot, str]) -> tuple[Curve, ...]:
    held: dict[str, list[CuffSlot]] = {}
    for slot, cid in sorted(slot_owner.items()):
        held.setdefault(cid, []).append(slot)
    out = []
    for c in curves:
        slots = held.get(c.id, [])
        if isinstance(c.attachment, Internal):
            out.append(Curve(c.id, Internal(slots[0], slots[1])))
        else:
            out.append(Curve(c.id, WindowBoundary(c.attachment.end_id, slots[0] if slots else None)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MovePath:
    base: PantsDecomposition
    moves: tuple[ElementaryMove, ...] = ()

    @property
    def n_T(self) -> int:
        return sum(1 for m in self.moves if m.kind is PieceKind.T)

    @property
    def n_S(self) -> int:
        return sum(1 for m in self.moves if m.kind is PieceKind.S)

    @property
    def weight(self) -> int:
        return self.n_T + 2 * self.n_S

    def __len__(self) -> int:
        return len(self.moves)

    def decompositions(self) -> list[PantsDecomposition]:
        """P_0, ..., P_n; raises InvalidPath at the first bad move."""
        out = [self.base]
        cur = self.base
        for i, m in enumerate(self.moves):
            try:
                cur = apply_move(cur, m)
            except (MoveNotApplicable, CurveNotInternal, KeyError) as exc:
                raise InvalidPath(f"move {i} on {m.curve}: {exc}") from exc
            out.append(cur)
        return out

    def endpoint(self) -> PantsDecomposition:
        return self.decompositions()[-1]

    def then(self, other: MovePath) -> MovePath:
        return MovePath(self.base, self.moves + other.moves)

    def to_dict(self) -> dict:
        return {"base": self.base.to_dict(), "moves": [m.to_dict() for m in self.moves]}

    @classmethod
    def from_dict(cls, data: Mapping) -> MovePath:
        try:
            base = PantsDecomposition.from_dict(data["base"])
            moves = tuple(ElementaryMove.from_dict(m) for m in data.get("moves", []))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad path: {exc}") from exc
        return cls(base, moves)


def path_weight(path: MovePath) -> int:
    path.decompositions()
    return path.weight


def concatenate(first: MovePath, second: MovePath) -> MovePath:
    if first.endpoint() != second.base:
        raise InvalidPath("second path does not start where the first ends")
    return first.then(second)


def geodesic_moves(curve: str, kind: PieceKind, start: Slope, end: Slope) -> list[ElementaryMove]:
    slopes = farey_geodesic(start, end)
    return [ElementaryMove(curve, kind, a, b) for a, b in zip(slopes, slopes[1:])]


def upper_translation_estimate(f, path: MovePath, power: int) -> Fraction:
    """weight/power, an upper estimate for the translation length on the
    component of the base decomposition."""
    from .end_periodic import act_on_pants, inverse, power as map_power

    if power < 1:
        raise ValueError("power must be positive")
    expected = act_on_pants(inverse(map_power(f, power)), path.base)
    if path.endpoint() != expected:
        raise PathEndpointMismatch(f"path does not end at the image of its base under f^-{power}")
    return Fraction(path.weight, power)


__all__ = [
    "BASE_SLOPE",
    "ElementaryMove",
    "MoveKind",
    "MovePath",
    "UNKNOWN",
    "Unknown",
    "apply_move",
    "bfs_distance_oracle",
    "farey_distance",
    "farey_geodesic",
    "intersection",
    "path_weight",
    "upper_translation_estimate",
]
