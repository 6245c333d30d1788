from __future__ import annotations

import random
from collections import Counter
from pathlib import Path

import pytest

from conftest import phi_of
from oracles import closed_pants_count, ladder_link_components
from panto.block_decomposition import (
    GLUING_HEADER,
    BlockComplex,
    EscapeEvent,
    FlipEvent,
    boundary_covers,
    build_blocks,
    drilled_volume,
    export_gluing,
    link_components,
    trace_flips,
    trace_orbits,
)
from panto.end_periodic import (
    commuting_swaps,
    concatenated_path,
    end_behavior,
    fenley_example,
    insert_backtrack,
    ladder_base,
    ladder_model,
    ladder_shift,
    path_to_preimage,
    quotient_genus,
    random_ladder_map,
    swap_commuting,
    twisted_slots,
)
from panto.errors import NonTerminatingOrbit, PathEndpointMismatch
from panto.pants_graph import MovePath
from panto.surface_model import PieceKind

GOLDEN = Path(__file__).resolve().parent / "golden"


def test_fenley_golden_gluing(fenley):
    f, path = fenley
    text = export_gluing(build_blocks(f, path))
    assert text == (GOLDEN / "fenley_gluing.txt").read_text()
    assert text == export_gluing(build_blocks(f, path))


def test_fenley_counts(fenley):
    f, path = fenley
    bc = build_blocks(f, path)
    assert len(bc.blocks) == 5
    assert (bc.n_T, bc.n_S) == (1, 4)
    assert link_components(bc) == 5 + 3
    assert bc.boundary_pants.curve_count == 6
    assert drilled_volume(bc).coefficient == 9


def test_block_face_counts(fenley):
    f, path = fenley
    for b in build_blocks(f, path).blocks:
        want = 1 if b.kind is PieceKind.T else 2
        assert len(b.d2_minus) == len(b.d2_plus) == want
        assert len(b.d1_v) == (1 if b.kind is PieceKind.T else 4)


def test_gluing_is_perfect_matching(instances):
    for f, path in instances:
        bc = build_blocks(f, path)
        faces = bc.faces()
        seen = Counter()
        for a, b in bc.gluings:
            seen[a] += 1
            if not b.startswith("boundary."):
                seen[b] += 1
                # a gluing joins a plus face to a minus face
                assert a.split(".")[1] != b.split(".")[1]
        assert set(seen) == set(faces)
        assert all(v == 1 for v in seen.values())


def test_boundary_faces_match_pants_counts(instances):
    for f, path in instances:
        bc = build_blocks(f, path)
        b = end_behavior(f)
        for side, sign in (("S+", 1), ("S-", -1)):
            want = sum(closed_pants_count(quotient_genus(b, i)) for i, w in enumerate(b.w) if w * sign > 0)
            got = sum(1 for _, t in bc.gluings if t.startswith(f"boundary.{side}."))
            assert got == want
        # Euler audit: sum of 2 - 2g over components is minus the pants count
        chi = sum(2 - 2 * quotient_genus(b, i) for i in range(len(b.w)))
        pants = len(bc.boundary_pants.plus.pants) + len(bc.boundary_pants.minus.pants)
        assert chi == -pants
        assert bc.boundary_pants.curve_count == 3 * phi_of(f)


def test_link_components_formula(instances):
    for f, path in instances:
        bc = build_blocks(f, path)
        assert link_components(bc) == len(path.moves) + 3 * phi_of(f) // 2


def test_link_components_match_union_find_oracle(instances):
    for f, path in instances:
        model = ladder_model(f)
        moved = [m.curve for m in path.moves]
        want = ladder_link_components(moved, model.strips, model.lo, model.hi)
        assert link_components(build_blocks(f, path)) == want


def test_three_strip_instance():
    # six ends' worth of shift needs at least fifteen moves in this model
    f = random_ladder_map(random.Random(0), 3, extra=0)
    path = path_to_preimage(f)
    assert phi_of(f) == 6
    assert len(path.moves) == 15
    assert link_components(build_blocks(f, path)) == 15 + 9


def test_annulus_endpoints(instances):
    for f, path in instances:
        bc = build_blocks(f, path)
        n = len(path.moves)
        block_ends = sum(a.block_attached_ends for a in bc.annuli)
        boundary_ends = 2 * len(bc.annuli) - block_ends
        assert block_ends == 2 * n
        assert boundary_ends == 3 * phi_of(f)
        for a in bc.annuli:
            if a.degenerate:
                assert a.lower_end.block + 1 == a.upper_end.block


def test_trace_flips_examples(fenley):
    f, path = fenley
    table = trace_flips(f, path)
    for k, m in enumerate(path.moves):
        rec = table[(k, m.curve)]
        assert rec.forward == FlipEvent(k, 0, (k, m.curve))
    # the window boundary curve next to the attracting end escapes forward
    assert isinstance(table[(0, "s3")].forward, EscapeEvent)
    assert table[(0, "s3")].forward.side == "S+"


def test_pure_shift_is_reducible():
    rho = ladder_shift(1, 3)
    path = MovePath(ladder_base(rho), ())
    with pytest.raises(NonTerminatingOrbit):
        build_blocks(rho, path)


class _IdentityDynamics:
    """Identity on a window: nothing escapes and nothing moves."""

    period = 1

    def image(self, cid):
        return cid

    def preimage(self, cid):
        return cid

    def escape_class(self, cid, forward):
        return None


def test_identity_revisits_state():
    with pytest.raises(NonTerminatingOrbit) as info:
        trace_orbits(_IdentityDynamics(), ["c"], ["c", "d"], bound=100)
    assert info.value.witness[1] == "d"


def test_endpoint_checked(fenley):
    f, path = fenley
    with pytest.raises(PathEndpointMismatch):
        build_blocks(f, MovePath(path.base, path.moves[:-1]))


def test_boundary_invariant_under_backtracks(fenley):
    f, path = fenley
    ref = build_blocks(f, path).boundary_pants
    for i in range(len(path.moves) + 1):
        for c in ("m1", "a1", "s2"):
            other = insert_backtrack(path, i, c)
            bc = build_blocks(f, other)
            assert bc.boundary_pants == ref
            assert link_components(bc) == len(other.moves) + 3


def test_boundary_invariant_under_commuting_swaps(instances):
    for f, path in instances[:8]:
        ref = build_blocks(f, path).boundary_pants
        for i in commuting_swaps(path):
            swapped = swap_commuting(path, i)
            assert build_blocks(f, swapped).boundary_pants == ref


def test_boundary_invariant_under_run_order():
    import itertools

    f = fenley_example()
    ref = build_blocks(f, path_to_preimage(f)).boundary_pants
    for order in itertools.permutations(twisted_slots(f)):
        assert build_blocks(f, path_to_preimage(f, order=list(order))).boundary_pants == ref


@pytest.mark.parametrize("n", [2, 3])
def test_power_is_cyclic_cover(fenley, n):
    f, path = fenley
    small = build_blocks(f, path)
    fn, pn = concatenated_path(f, path, n)
    big = build_blocks(fn, pn)
    assert len(big.blocks) == n * len(small.blocks)
    assert sum(a.block_attached_ends for a in big.annuli) == n * sum(a.block_attached_ends for a in small.annuli)
    assert boundary_covers(big, small)


def test_empty_export_is_header_only():
    assert export_gluing(BlockComplex()) == GLUING_HEADER + "\n"
