from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

from conftest import phi_of
from panto.end_periodic import concatenated_path, fenley_example, path_to_preimage
from panto.errors import ConventionViolation, PathEndpointMismatch
from panto.pants_graph import MovePath
from panto.volume_bounds import (
    evaluate_bounds,
    hyperbolic_constants,
    lobachevsky,
    lobachevsky_quadrature,
    lobachevsky_series,
    sharpness_family,
)

FENLEY_SIGMA = ("s1", "a1", "a2", "s3")


def test_lobachevsky_basics():
    assert lobachevsky(0) == 0
    for t in (0.3, 1.1, 2.0):
        assert abs(lobachevsky(-t) + lobachevsky(t)) < 1e-14
        # period pi
        assert abs(lobachevsky(t + mpmath.pi) - lobachevsky(t)) < 1e-14


def test_series_matches_quadrature():
    for theta in (mpmath.pi / 12, mpmath.pi / 6, mpmath.pi / 4, mpmath.pi / 3):
        assert abs(lobachevsky(theta, 20) - lobachevsky_quadrature(theta, 20)) < 1e-15


def test_series_tail_bound():
    value, tail = lobachevsky_series(mpmath.pi / 4, 15)
    assert tail <= mpmath.mpf(10) ** -15


def test_constant_pins():
    c = hyperbolic_constants(15)
    assert abs(c.v_oct - mpmath.mpf("3.663862376708876")) < 1e-12
    assert abs(c.v_tet - mpmath.mpf("1.014941606409653")) < 1e-12
    # three copies of the pi/3 value give the tetrahedron too
    assert abs(3 * lobachevsky(mpmath.pi / 3) - c.v_tet) < 1e-14


def test_ratio_stable_across_precisions():
    ratios = [hyperbolic_constants(p).ratio for p in (10, 15, 20, 30)]
    for r in ratios:
        assert abs(r - mpmath.mpf("3.609924")) < 1e-6


def test_weight_four_example():
    # w = (1, -1) and a weight-four path at power one
    c = hyperbolic_constants(15)
    assert abs(4 * c.v_oct - mpmath.mpf("14.6554495068")) < 1e-9
    lower = 3 * c.v_tet * 2 / (2 * c.v_oct)
    assert abs(lower - mpmath.mpf("0.831042355")) < 1e-9
    assert 4 > lower


def test_fenley_report(fenley):
    f, path = fenley
    report = evaluate_bounds(f, [(path, 1)])
    assert report.upper_total == 9
    assert report.phi_star == 2
    assert abs(report.lower_tau_boundary - report.lower_tau_intrinsic) < 1e-20
    assert report.consistent
    data = report.to_dict()
    for key in ("upper_voct_coeff", "lower_tau", "constants", "provenance"):
        assert key in data
    assert data["upper_voct_coeff"] == "9"


def test_empty_path_list_gives_lower_bounds_only(fenley):
    f, _ = fenley
    report = evaluate_bounds(f, [])
    assert report.upper_total is None
    assert report.lower_tau_intrinsic > 0
    assert report.consistent


def test_min_over_paths_and_powers(fenley):
    f, path = fenley
    fn, pn = concatenated_path(f, path, 2)
    report = evaluate_bounds(f, [(path, 1), (pn, 2)])
    assert report.upper_total == Fraction(9)


def test_path_errors_propagate(fenley):
    f, path = fenley
    with pytest.raises(PathEndpointMismatch):
        evaluate_bounds(f, [(MovePath(path.base, path.moves[:2]), 1)])


def test_lower_bound_below_every_estimate(instances):
    for f, path in instances:
        report = evaluate_bounds(f, [(path, 1)])
        assert report.lower_tau_intrinsic <= mpmath.mpf(report.upper_total.numerator) / report.upper_total.denominator
        assert report.phi_star == phi_of(f)


def test_sharpness_family_weights(fenley):
    f, path = fenley
    assert sharpness_family(f, FENLEY_SIGMA, 0) == (f, path)
    for k in range(1, 11):
        fk, pk = sharpness_family(f, FENLEY_SIGMA, k)
        assert pk.weight == path.weight + 4 * k
        assert pk.n_S == path.n_S + 2 * k
        assert evaluate_bounds(fk, [(pk, 1)]).upper_total == path.weight + 4 * k


def test_sharpness_family_rejects_bad_pieces(fenley):
    f, _ = fenley
    with pytest.raises(ConventionViolation):
        sharpness_family(f, ("s1", "a1", "a2", "s9"), 2)
    with pytest.raises(ConventionViolation):
        sharpness_family(f, ("s1", "s1", "a2", "s3"), 2)
    # the piece around s1 is already twisted by f
    with pytest.raises(ConventionViolation):
        sharpness_family(f, ("s0", "a0", "a1", "s2"), 2)


def test_sharpness_path_ends_at_preimage(fenley):
    from panto.block_decomposition import build_blocks, link_components

    f, path = fenley
    fk, pk = sharpness_family(f, FENLEY_SIGMA, 3)
    bc = build_blocks(fk, pk)
    assert link_components(bc) == len(pk.moves) + 3
    assert bc.boundary_pants == build_blocks(f, path).boundary_pants
