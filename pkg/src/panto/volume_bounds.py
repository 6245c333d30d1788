"""Hyperbolic constants, the volume/translation-length bounds, and the
sharpness family.

Only bounds are reported.  Volumes of the mapping tori themselves would need
geometrization and are never computed here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .end_periodic import (
    EndPeriodicMap,
    boundary_complexity,
    compose_with_twists,
    end_behavior,
    ladder_model,
    parse_ladder_id,
    path_to_preimage,
    phi_star_norm,
    twisted_slots,
)
from .errors import ConventionViolation, SupportMismatch
from .pants_graph import MovePath, geodesic_moves, upper_translation_estimate
from .surface_model import BASE_SLOPE, PieceKind, Slope, complexity_one_piece, piece_cuffs

DEFAULT_PRECISION = 15


# ---------------------------------------------------------------------------
# Lobachevsky function
# ---------------------------------------------------------------------------


def lobachevsky_series(theta, digits: int = DEFAULT_PRECISION) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Value of the Lobachevsky function and a bound on the truncation error.

    Uses the zeta-value expansion around 0 after reducing theta to
    [-pi/2, pi/2] (the function is pi-periodic and odd), where the ratio
    (theta/pi)^2 is at most 1/4.
    """
    with mpmath.workdps(digits + 10):
        t = mpmath.mpf(theta)
        pi = mpmath.pi
        t = t - pi * mpmath.floor(t / pi + mpmath.mpf(1) / 2)
        sign = -1 if t < 0 else 1
        t = abs(t)
        if t == 0:
            return mpmath.mpf(0), mpmath.mpf(0)
        tol = mpmath.mpf(10) ** (-(digits + 2))
        r = (t / pi) ** 2
        total = t - t * mpmath.log(2 * t)
        power_r = mpmath.mpf(1)
        k = 0
        while True:
            k += 1
            power_r *= r
            total += t * mpmath.zeta(2 * k) * power_r / (k * (2 * k + 1))
            # zeta(2j) <= zeta(2) bounds every later term by a geometric series
            tail = t * mpmath.zeta(2) * power_r * r / ((k + 1) * (2 * k + 3) * (1 - r))
            if tail < tol:
                break
        return +(sign * total), +tail


def lobachevsky(theta, digits: int = DEFAULT_PRECISION) -> mpmath.mpf:
    return lobachevsky_series(theta, digits)[0]


def lobachevsky_quadrature(theta, digits: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Independent check: minus the integral of log|2 sin t| from 0 to theta."""
    with mpmath.workdps(digits + 10):
        t = mpmath.mpf(theta)
        return +(-mpmath.quad(lambda x: mpmath.log(abs(2 * mpmath.sin(x))), [0, t]))


@dataclass(frozen=True)
class HyperbolicConstants:
    v_oct: mpmath.mpf
    v_tet: mpmath.mpf
    precision: int
    error_bound: mpmath.mpf

    @property
    def ratio(self) -> mpmath.mpf:
        return self.v_oct / self.v_tet


def hyperbolic_constants(precision: int = DEFAULT_PRECISION) -> HyperbolicConstants:
    with mpmath.workdps(precision + 10):
        lo, elo = lobachevsky_series(mpmath.pi / 4, precision)
        lt, elt = lobachevsky_series(mpmath.pi / 6, precision)
        return HyperbolicConstants(8 * lo, 2 * lt, precision, 8 * elo + 2 * elt)


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

UPPER_TOTAL = "volume upper bound via path weight"
UPPER_COMPONENT = "drilled volume upper bound for the component of the base"
LOWER_BOUNDARY = "translation lower bound via boundary complexity"
LOWER_INTRINSIC = "translation lower bound via end behaviour"


@dataclass(frozen=True)
class BoundsReport:
    upper_total: Fraction | None
    upper_component: tuple[tuple[str, Fraction], ...]
    lower_tau_boundary: mpmath.mpf
    lower_tau_intrinsic: mpmath.mpf
    constants: HyperbolicConstants
    phi_star: int
    provenance: tuple[str, ...] = field(default=())

    @property
    def consistent(self) -> bool:
        if self.upper_total is None:
            return True
        upper = mpmath.mpf(self.upper_total.numerator) / self.upper_total.denominator
        return all(upper >= b for b in (self.lower_tau_boundary, self.lower_tau_intrinsic))

    def to_dict(self) -> dict:
        digits = self.constants.precision
        return {
            "upper_voct_coeff": None if self.upper_total is None else str(self.upper_total),
            "upper_volume": None
            if self.upper_total is None
            else mpmath.nstr(self.constants.v_oct * self.upper_total.numerator / self.upper_total.denominator, digits),
            "upper_component": [{"base": b, "voct_coeff": str(c)} for b, c in self.upper_component],
            "lower_tau": mpmath.nstr(self.lower_tau_intrinsic, digits),
            "lower_tau_boundary": mpmath.nstr(self.lower_tau_boundary, digits),
            "phi_star": self.phi_star,
            "consistent": self.consistent,
            "constants": {
                "V_oct": mpmath.nstr(self.constants.v_oct, digits),
                "V_tet": mpmath.nstr(self.constants.v_tet, digits),
                "precision": digits,
            },
            "provenance": list(self.provenance),
        }


def _base_label(path: MovePath) -> str:
    nonbase = [f"{c}={s}" for c, s in path.base.slopes if s != BASE_SLOPE]
    ids = sorted(path.base.internal_ids)
    return f"{len(ids)} curves" + (f" [{', '.join(nonbase)}]" if nonbase else "")


def evaluate_bounds(
    f: EndPeriodicMap,
    paths: Sequence[tuple[MovePath, int]] = (),
    precision: int = DEFAULT_PRECISION,
) -> BoundsReport:
    consts = hyperbolic_constants(precision)
    b = end_behavior(f)
    phi = phi_star_norm(b)
    xi = boundary_complexity(b)
    provenance = [
        f"shift vector {list(b.w)}, |phi*| = {phi}",
        f"boundary complexity {xi}",
        f"V_oct = 8 L(pi/4), V_tet = 2 L(pi/6), series error <= {mpmath.nstr(consts.error_bound, 3)}",
    ]
    estimates: list[tuple[str, Fraction]] = []
    for i, (path, pw) in enumerate(paths):
        est = upper_translation_estimate(f, path, pw)
        estimates.append((_base_label(path), est))
        provenance.append(f"path {i}: weight {path.weight} (n_T={path.n_T}, n_S={path.n_S}) over power {pw}")
    upper = min((e for _, e in estimates), default=None)
    per_component: dict[str, Fraction] = {}
    for label, e in estimates:
        per_component[label] = min(e, per_component.get(label, e))
    with mpmath.workdps(precision + 10):
        lower_boundary = consts.v_tet * xi / (2 * consts.v_oct)
        lower_intrinsic = 3 * consts.v_tet * phi / (2 * consts.v_oct)
    return BoundsReport(
        upper,
        tuple(sorted(per_component.items())),
        lower_boundary,
        lower_intrinsic,
        consts,
        phi,
        tuple(provenance),
    )


def drilled_volume_value(coefficient: int, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    return coefficient * hyperbolic_constants(precision).v_oct


# ---------------------------------------------------------------------------
# Sharpness family
# ---------------------------------------------------------------------------


def sharpness_family(
    f: EndPeriodicMap,
    sigma_piece: Sequence[str],
    k: int,
    path: MovePath | None = None,
) -> tuple[EndPeriodicMap, MovePath]:
    """Compose f with the k-th power of a twist supported in a four-holed
    sphere whose curve is otherwise untouched, and lengthen the path by the
    2k S-moves that undo it.  Path weight grows by exactly 4k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if path is None:
        path = path_to_preimage(f)
    if k == 0:
        return f, path
    try:
        model = ladder_model(f)
    except SupportMismatch as exc:
        raise ConventionViolation(f"sharpness family needs a ladder map: {exc}") from exc
    quad = sorted(sigma_piece)
    if len(quad) != 4 or len(set(quad)) != 4:
        raise ConventionViolation("the piece must have four distinct boundary curves")
    base = path.base
    slot = None
    for cid in base.internal_ids:
        if complexity_one_piece(base, cid) is PieceKind.S and sorted(piece_cuffs(base, cid)) == quad:
            slot = cid
    if slot is None:
        raise ConventionViolation(f"no four-holed sphere with boundary {quad}")
    pos = parse_ladder_id(slot)[1]
    if pos < model.lo + model.strips or slot == f"s{model.lo + model.strips}":
        raise ConventionViolation(f"{slot} does not lie in C and rho(C) away from rho(eta)")
    if slot in twisted_slots(f):
        raise ConventionViolation(f"{slot} is already twisted by f")
    if base.slope(slot) != BASE_SLOPE:
        raise ConventionViolation(f"{slot} is not at its base slope")
    fk = compose_with_twists(f, [(slot + "*", k)])
    chain = [Slope.of(-j, 1) for j in range(2 * k + 1)]
    extra = []
    for a, b_ in zip(chain, chain[1:]):
        extra.extend(geodesic_moves(slot, PieceKind.S, a, b_))
    return fk, MovePath(base, path.moves + tuple(extra))
