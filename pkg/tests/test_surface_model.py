from __future__ import annotations

import pytest

from panto.errors import CurveNotInternal, InputError
from panto.pants_graph import ElementaryMove, apply_move
from panto.surface_model import (
    BASE_SLOPE,
    INFINITY,
    Curve,
    CuffSlot,
    EndStub,
    Internal,
    Orientation,
    PantsDecomposition,
    PieceKind,
    Slope,
    SurfaceSig,
    Window,
    WindowBoundary,
    admits_pants,
    complexity,
    complexity_one_piece,
    pants_count,
    parity_class,
    piece_cuffs,
    validate_pants,
)
from panto.end_periodic import fenley_example, ladder_base


def one_holed_torus():
    pd = PantsDecomposition.build(
        ["P"],
        [
            Curve("c", Internal(CuffSlot("P", 1), CuffSlot("P", 2))),
            Curve("v", WindowBoundary("E1", CuffSlot("P", 3))),
        ],
    )
    return pd


def test_complexity_examples():
    assert complexity(SurfaceSig(1, 1)) == 1
    assert complexity(SurfaceSig(0, 3)) == 0
    assert complexity(SurfaceSig(2, 0)) == 3


def test_pants_existence():
    assert admits_pants(SurfaceSig(0, 3))
    assert not admits_pants(SurfaceSig(1, 0))
    assert not admits_pants(SurfaceSig(0, 2))
    assert pants_count(SurfaceSig(2, 0)) == 2
    assert pants_count(SurfaceSig(3, 2)) == 6


def test_slope_normalization():
    assert Slope.of(2, -4) == Slope.of(-1, 2)
    assert Slope.of(-3, 0) == INFINITY
    assert Slope.parse("inf") == INFINITY
    assert Slope.parse("-2/1") == Slope(-2, 1)
    assert str(Slope.of(0, 5)) == "0/1"
    with pytest.raises(ValueError):
        Slope.of(0, 0)
    with pytest.raises(ValueError):
        Slope(2, 4)


def test_parity_classes():
    assert parity_class(BASE_SLOPE) == 0
    assert parity_class(INFINITY) == 1
    assert parity_class(Slope(1, 1)) == 2
    assert parity_class(Slope(3, 5)) == 2


def test_validate_one_holed_torus():
    assert validate_pants(one_holed_torus(), SurfaceSig(1, 1)).ok


def test_validate_genus_two_closed():
    pd = PantsDecomposition.build(
        ["A", "B"],
        [Curve(f"c{i}", Internal(CuffSlot("A", i), CuffSlot("B", i))) for i in (1, 2, 3)],
    )
    assert validate_pants(pd, SurfaceSig(2, 0)).ok


def test_validate_slot_reuse():
    pd = PantsDecomposition(
        ("P",),
        (
            Curve("c", Internal(CuffSlot("P", 1), CuffSlot("P", 2))),
            Curve("d", WindowBoundary("E1", CuffSlot("P", 1))),
        ),
        (("c", BASE_SLOPE),),
    )
    report = validate_pants(pd, SurfaceSig(1, 1))
    assert not report.ok
    assert any("slot reuse" in v for v in report.violations)


def test_validate_wrong_curve_count_and_disconnected():
    pd = PantsDecomposition.build(
        ["A", "B"],
        [
            Curve("x", Internal(CuffSlot("A", 1), CuffSlot("A", 2))),
            Curve("y", Internal(CuffSlot("B", 1), CuffSlot("B", 2))),
            Curve("u", WindowBoundary("E1", CuffSlot("A", 3))),
            Curve("v", WindowBoundary("E2", CuffSlot("B", 3))),
        ],
    )
    report = validate_pants(pd, SurfaceSig(2, 2))
    assert any("disconnected" in v for v in report.violations)
    assert any("wrong curve count" in v for v in report.violations)


def test_complexity_one_piece():
    pd = one_holed_torus()
    assert complexity_one_piece(pd, "c") is PieceKind.T
    assert piece_cuffs(pd, "c") == ("v",)
    with pytest.raises(CurveNotInternal):
        complexity_one_piece(pd, "v")
    base = ladder_base(fenley_example())
    assert complexity_one_piece(base, "s1") is PieceKind.S
    assert sorted(piece_cuffs(base, "s2")) == ["a1", "a2", "s1", "s3"]
    assert complexity_one_piece(base, "m1") is PieceKind.T


def test_handshake_and_euler():
    base = ladder_base(fenley_example())
    assert 2 * len(base.internal_ids) + len(base.boundary_ids) == 3 * len(base.pants)
    core = SurfaceSig(3, 2)
    assert complexity(core) == len(base.internal_ids)
    assert 2 - 2 * core.genus - core.punctures_or_boundary == -len(base.pants)


def test_round_trip_dict():
    base = ladder_base(fenley_example())
    moved = apply_move(base, ElementaryMove("s1", PieceKind.S, BASE_SLOPE, INFINITY))
    assert PantsDecomposition.from_dict(moved.to_dict()) == moved
    assert moved != base


def test_from_dict_rejects_garbage():
    with pytest.raises(InputError):
        PantsDecomposition.from_dict({"pants": ["P"], "curves": [{"id": "c", "attach": ["P.s9", "P.s1"]}]})


def test_window_needs_two_ends():
    with pytest.raises(ValueError):
        Window.make(1, [EndStub("E1", Orientation.ATTRACTING)])
