"""Algebraic certificates: critical exponents, the reduced discriminant, the
improvement coefficient alpha and the pointwise quantity

    h = |f''|^2 + (p-1) d/(d+2) |f'|^4/f^2 - 2 (p-1) (d-1)/(d+2) |f'|^2 f''/f

with its sum-of-squares split.

Every scalar formula runs in exact rational arithmetic when all of its
inputs are ``int`` or ``fractions.Fraction``; otherwise in floating point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Union

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError
from .measure import NodalFn, require_positive
from .schemas import FigureRow
from .spectral import Basis, basis_for, to_spectral

if TYPE_CHECKING:
    from .functionals import Exponent

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]


def _exact(*values: Number) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def _coerce(*values: Number) -> tuple:
    """Fractions when every input is rational, floats otherwise."""
    if _exact(*values):
        return tuple(Fraction(v) for v in values)
    return tuple(float(v) for v in values)


# =============================================================================
# Critical exponents
# =============================================================================


def critical_exponents(d: Number) -> tuple[Number, Number]:
    """Return (2*, 2#) = (2d/(d-2), (2d^2+1)/(d-1)^2), infinite when undefined.

    Example:
        >>> critical_exponents(3)
        (Fraction(6, 1), Fraction(19, 4))
    """
    (d,) = _coerce(d)
    if not d >= 1:
        raise DomainError(f"dimension d must be >= 1, got {d}")
    two_star = 2 * d / (d - 2) if d > 2 else math.inf
    two_sharp = (2 * d**2 + 1) / (d - 1) ** 2 if d > 1 else math.inf
    return two_star, two_sharp


# =============================================================================
# Discriminant
# =============================================================================


@dataclass(frozen=True)
class DiscriminantReport:
    """Reduced discriminant of the quadratic form in (u'', |u'|^2/u) after f = u^beta."""

    p: Number
    d: Number
    beta: Number
    lam: Number
    a: Number
    b: Number
    c: Number
    A: Number
    B: Number
    delta: Number
    delta_quadratic: Number
    feasible: bool

    @property
    def exact(self) -> bool:
        return isinstance(self.delta, Fraction)

    def as_dict(self) -> dict[str, float | bool]:
        """Float view for JSON and key=value output."""
        return {k: (v if isinstance(v, bool) else float(v)) for k, v in asdict(self).items()}


def discriminant_coefficients(p: Number, d: Number) -> tuple[Number, Number]:
    """Return (A, B) with delta(beta) = A beta^2 + B beta + 1."""
    p, d = _coerce(p, d)
    A = (p - 1) ** 2 * (d - 1) ** 2 / (d + 2) ** 2 - p + 2
    B = p - 3 - d * (p - 1) / (d + 2)
    return A, B


def discriminant(p: Number, d: Number, beta: Number) -> DiscriminantReport:
    """Evaluate a, b, c, delta = b^2 - ac and A beta^2 + B beta + 1 at one beta.

    Raises:
        DomainError: p = 2 or beta = 0.
    """
    p, d, beta = _coerce(p, d, beta)
    if p == 2:
        raise DomainError("the discriminant is defined for p != 2")
    if beta == 0:
        raise DomainError("beta must be nonzero")
    d_over_lam = (p - 2) * beta
    a = _coerce(1, p)[0]
    b = -(beta + d_over_lam) * (d - 1) / (d + 2)
    c = (beta + d_over_lam) * d / (d + 2) + (beta - 1) * (1 + d_over_lam)
    A, B = discriminant_coefficients(p, d)
    delta = b**2 - a * c
    delta_quadratic = A * beta**2 + B * beta + 1
    return DiscriminantReport(
        p=p,
        d=d,
        beta=beta,
        lam=d / d_over_lam,
        a=a,
        b=b,
        c=c,
        A=A,
        B=B,
        delta=delta,
        delta_quadratic=delta_quadratic,
        feasible=bool(delta < 0),
    )


def find_beta(p: Number, d: Number) -> Number | None:
    """Return some beta with delta(beta) < 0, or None when delta >= 0 for every beta.

    A > 0: the vertex -B/(2A), minimizing delta. A < 0: the first integer
    beyond the larger root, which is positive since delta(0) = 1. A = 0: -2/B,
    where delta = -1.
    """
    p, d = _coerce(p, d)
    if p == 2:
        raise DomainError("find_beta is defined for p != 2")
    A, B = discriminant_coefficients(p, d)
    if A > 0:
        if B**2 > 4 * A:
            return -B / (2 * A)
        return None
    if A < 0:
        root = (-B - math.sqrt(float(B**2 - 4 * A))) / (2 * float(A))
        return math.floor(root) + 1
    if B != 0:
        return -2 / B
    return None


def feasibility_boundary(d: float, tol: float = 1e-10) -> float:
    """Bisection for the largest p > 2 up to which find_beta succeeds."""
    d = float(d)
    lo = 2.0 + 1e-3
    if find_beta(lo, d) is None:
        raise DomainError(f"no feasible beta just above p = 2 for d={d}")
    hi = 4.0
    while find_beta(hi, d) is not None:
        hi *= 2
        if hi > 1e8:
            raise DomainError(f"find_beta succeeds for every p when d={d}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if find_beta(mid, d) is None:
            hi = mid
        else:
            lo = mid
    logger.debug("[CERTIFY] feasibility boundary d=%s p=%.12g", d, lo)
    return 0.5 * (lo + hi)


# =============================================================================
# Improvement coefficient and sum of squares
# =============================================================================


def alpha_improved(p: Number, d: Number) -> Number:
    """alpha = 1 - (p-1)(d-1)^2 / (d(d+2)); zero exactly at p = 2#."""
    p, d = _coerce(p, d)
    return 1 - (p - 1) * (d - 1) ** 2 / (d * (d + 2))


def improved_constant(p: Number, d: Number) -> Number:
    """d + alpha (d+2) for p <= 2#."""
    p, d = _coerce(p, d)
    if p > critical_exponents(d)[1]:
        raise DomainError(f"p={p} exceeds 2# for d={d}; the improvement is void")
    return d + alpha_improved(p, d) * (d + 2)


@dataclass(frozen=True)
class SosSplit:
    """h = alpha |f''|^2 + w |((d-1)/sqrt(d)) f'' - sqrt(d) |f'|^2/f|^2."""

    alpha: Number
    residual_weight: Number


def sos_split(p: Number, d: Number) -> SosSplit:
    p, d = _coerce(p, d)
    return SosSplit(alpha=alpha_improved(p, d), residual_weight=(p - 1) / (d + 2))


def quadratic_form_determinant(p: Number, d: Number) -> Number:
    """Determinant of h as a quadratic form in (f'', |f'|^2/f); negative iff p > 2#."""
    p, d = _coerce(p, d)
    return (p - 1) * d / (d + 2) - (p - 1) ** 2 * (d - 1) ** 2 / (d + 2) ** 2


def h_density(
    f: NDArray[np.float64],
    df: NDArray[np.float64],
    d2f: NDArray[np.float64],
    p: float,
    d: float,
) -> NDArray[np.float64]:
    """h from explicit arrays of f, f', f''."""
    p, d = float(p), float(d)
    y = df**2 / f
    return d2f**2 + (p - 1) * d / (d + 2) * y**2 - 2 * (p - 1) * (d - 1) / (d + 2) * y * d2f


def _derivatives(f: NodalFn, basis: Basis | None):
    basis = basis_for(f.rule) if basis is None else basis
    basis.check(f)
    coeffs = to_spectral(f, basis).coeffs
    return basis.d1 @ coeffs, basis.d2 @ coeffs


def pointwise_h(f: NodalFn, p: Exponent, basis: Basis | None = None) -> NodalFn:
    """Nodal values of h for a positive f."""
    require_positive(f, "f")
    df, d2f = _derivatives(f, basis)
    return f.with_values(h_density(f.values, df, d2f, p.p, p.d))


def sos_check(f: NodalFn, p: Exponent, basis: Basis | None = None) -> NodalFn:
    """h rebuilt from its sum-of-squares split."""
    require_positive(f, "f")
    df, d2f = _derivatives(f, basis)
    split = sos_split(p.p, p.d)
    d = p.d
    y = df**2 / f.values
    square = ((d - 1) / math.sqrt(d) * d2f - math.sqrt(d) * y) ** 2
    return f.with_values(float(split.alpha) * d2f**2 + float(split.residual_weight) * square)


# =============================================================================
# Figure data
# =============================================================================


def figure_curves(d_min: float, d_max: float, steps: int) -> list[FigureRow]:
    """Rows (d, 2#(d), 2*(d)) on a uniform grid; 2* is None for d <= 2."""
    if steps < 2:
        raise DomainError(f"steps must be >= 2, got {steps}")
    if not (1 < d_min < d_max):
        raise DomainError(f"need 1 < d_min < d_max, got [{d_min}, {d_max}]")
    rows = []
    for d in np.linspace(d_min, d_max, steps):
        two_star, two_sharp = critical_exponents(float(d))
        rows.append(
            FigureRow(
                d=float(d),
                two_sharp=float(two_sharp),
                two_star=float(two_star) if math.isfinite(two_star) else None,
            )
        )
    return rows
