from __future__ import annotations

from fractions import Fraction

import pytest

from oracles import farey_bfs
from panto.end_periodic import fenley_example, ladder_base, path_to_preimage
from panto.errors import InvalidPath, MoveNotApplicable, PathEndpointMismatch
from panto.pants_graph import (
    UNKNOWN,
    ElementaryMove,
    MovePath,
    apply_move,
    bfs_distance_oracle,
    box_adjacency,
    box_neighbours,
    concatenate,
    farey_distance,
    farey_geodesic,
    intersection,
    path_weight,
    upper_translation_estimate,
)
from panto.surface_model import (
    BASE_SLOPE,
    INFINITY,
    Curve,
    CuffSlot,
    Internal,
    PantsDecomposition,
    PieceKind,
    Slope,
    SurfaceSig,
    WindowBoundary,
    validate_pants,
)

S = Slope.parse


def torus_pd():
    return PantsDecomposition.build(
        ["P"],
        [
            Curve("c", Internal(CuffSlot("P", 1), CuffSlot("P", 2))),
            Curve("v", WindowBoundary("E1", CuffSlot("P", 3))),
        ],
    )


def test_t_move_examples():
    pd = torus_pd()
    moved = apply_move(pd, ElementaryMove("c", PieceKind.T, BASE_SLOPE, INFINITY))
    assert moved.slope("c") == INFINITY
    with pytest.raises(MoveNotApplicable):
        apply_move(pd, ElementaryMove("c", PieceKind.T, BASE_SLOPE, S("2/1")))
    with pytest.raises(MoveNotApplicable):
        apply_move(pd, ElementaryMove("c", PieceKind.T, S("1/1"), S("1/0")))
    with pytest.raises(MoveNotApplicable):
        apply_move(pd, ElementaryMove("c", PieceKind.S, BASE_SLOPE, INFINITY))


def test_s_move_chain_rewires_and_stays_valid():
    f = fenley_example()
    base = ladder_base(f)
    window = f.window
    a = apply_move(base, ElementaryMove("s2", PieceKind.S, BASE_SLOPE, INFINITY))
    b = apply_move(a, ElementaryMove("s2", PieceKind.S, INFINITY, S("1/1")))
    for pd in (a, b):
        assert validate_pants(pd, window).ok
    assert a.pant_cuff_multisets() != base.pant_cuff_multisets()
    assert b.pant_cuff_multisets() != a.pant_cuff_multisets()
    assert b.slope("s2") == S("1/1")
    # two more moves return to the base parity class and hence the base wiring
    c = apply_move(b, ElementaryMove("s2", PieceKind.S, S("1/1"), S("2/1")))
    assert c.pant_cuff_multisets() == base.pant_cuff_multisets()


def test_path_weight_examples():
    pd = torus_pd()
    moves = [
        ElementaryMove("c", PieceKind.T, S("0/1"), S("1/0")),
        ElementaryMove("c", PieceKind.T, S("1/0"), S("1/1")),
        ElementaryMove("c", PieceKind.T, S("1/1"), S("2/1")),
    ]
    assert path_weight(MovePath(pd, tuple(moves))) == 3
    assert path_weight(MovePath(pd, ())) == 0
    base = ladder_base(fenley_example())
    mixed = (
        ElementaryMove("m1", PieceKind.T, S("0/1"), S("1/0")),
        ElementaryMove("s1", PieceKind.S, S("0/1"), S("1/0")),
        ElementaryMove("s1", PieceKind.S, S("1/0"), S("1/1")),
    )
    assert path_weight(MovePath(base, mixed)) == 5
    with pytest.raises(InvalidPath):
        path_weight(MovePath(pd, (moves[1],)))


def test_farey_distance_examples():
    assert farey_distance(S("0/1"), S("1/0")) == 1
    assert farey_distance(S("0/1"), S("3/1")) == 2
    assert farey_distance(S("0/1"), S("0/1")) == 0
    assert farey_distance(S("0/1"), S("5/2")) == 3
    assert farey_distance(S("1/1"), S("-1/1")) == 2


def test_farey_distance_matches_plain_bfs():
    # plain BFS from the oracle module, on a small box
    pts = [(0, 1), (1, 0), (3, 1), (5, 2), (-4, 3), (2, 5), (-1, 4)]
    for a in pts:
        for b in pts:
            want = farey_bfs(a, b, 6)
            assert farey_distance(Slope.of(*a), Slope.of(*b)) == want


def test_bfs_oracle_examples():
    assert bfs_distance_oracle(S("0/1"), S("1/1"), 5) == 1
    assert bfs_distance_oracle(S("0/1"), S("5/2"), 50) == farey_distance(S("0/1"), S("5/2"))
    assert bfs_distance_oracle(S("0/1"), S("1/0"), 0) is UNKNOWN


def test_box_adjacency_matches_brute_force():
    adj = box_adjacency(8)
    for s, nbrs in adj.items():
        assert sorted(nbrs) == sorted(box_neighbours(s, 8))


def test_geodesic_is_a_shortest_path():
    for a, b in [("0/1", "5/2"), ("2/7", "-3/4"), ("1/0", "13/8")]:
        g = farey_geodesic(S(a), S(b))
        assert g[0] == S(a) and g[-1] == S(b)
        assert len(g) - 1 == farey_distance(S(a), S(b))
        for x, y in zip(g, g[1:]):
            assert intersection(x, y, PieceKind.T) == 1


def test_intersection_conventions():
    assert intersection(S("0/1"), S("1/0"), PieceKind.T) == 1
    assert intersection(S("0/1"), S("1/0"), PieceKind.S) == 2
    assert intersection(S("1/2"), S("3/1"), PieceKind.T) == 5


def test_upper_translation_estimate(fenley):
    f, path = fenley
    assert upper_translation_estimate(f, path, 1) == 9
    with pytest.raises(PathEndpointMismatch):
        upper_translation_estimate(f, MovePath(path.base, path.moves[:3]), 1)


def test_upper_estimate_divides_by_power():
    from panto.end_periodic import concatenated_path

    f = fenley_example()
    fn, pn = concatenated_path(f, path_to_preimage(f), 2)
    assert pn.weight == 18
    # the concatenated path is a path for f^2, so the estimate halves
    assert upper_translation_estimate(f, pn, 2) == Fraction(9)


def test_concatenate_adds_weights(fenley):
    f, path = fenley
    first = MovePath(path.base, path.moves[:2])
    second = MovePath(first.endpoint(), path.moves[2:])
    assert concatenate(first, second).weight == first.weight + second.weight
    with pytest.raises(InvalidPath):
        concatenate(second, first)


def test_move_then_inverse_restores(fenley):
    _, path = fenley
    pd = path.base
    for m in path.moves:
        nxt = apply_move(pd, m)
        assert apply_move(nxt, m.inverse()) == pd
        pd = nxt


def test_move_round_trip_dict():
    m = ElementaryMove("s1", PieceKind.S, S("1/0"), S("-2/1"))
    assert ElementaryMove.from_dict(m.to_dict()) == m
    assert m.to_dict() == {"curve": "s1", "kind": "S", "from": "1/0", "to": "-2/1"}
