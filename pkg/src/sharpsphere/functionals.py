"""Scalar functionals of the ultraspherical interpolation inequalities.

    Q_p[f] = ((p-2)/d) int |f'|^2 nu dnu_d / (||f||_p^2 - ||f||_2^2)      (p != 2)

with the logarithmic Sobolev ratio at p = 2, the Onofri deficit for d <= 2,
the entropy F and Fisher information I of g = f^p, the Euler-Lagrange
residual and the strengthened Fisher form.

Near constants ||f||_p^2 - ||f||_2^2 and the entropy are differences of
nearly equal numbers. For positive f they are evaluated after writing
f = m (1 + h) with m the mean of f, using log1p/expm1, so the relative
accuracy does not degrade as f approaches a constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from scipy.special import xlogy

from .certificates import critical_exponents
from .errors import ConstantInputError, DimensionMismatchError, DomainError
from .measure import NodalFn, integrate, norm, require_positive
from .spectral import Basis, apply_L, basis_for, dirichlet_form, oversampled, to_spectral

# Largest p scanned when 2* is infinite (d <= 2)
SCAN_CAP = 20.0

# Relative size of ||f||_p^2 - ||f||_2^2 below which f counts as constant
CONSTANT_TOLERANCE = 1e-13


@dataclass(frozen=True)
class Exponent:
    """An exponent p >= 1 attached to a dimension d."""

    p: float
    d: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "d", float(self.d))
        if not self.d >= 1:
            raise DomainError(f"dimension d must be >= 1, got {self.d}")
        if not self.p >= 1:
            raise DomainError(f"exponent p must be >= 1, got {self.p}")

    @property
    def two_star(self) -> float:
        return float(critical_exponents(self.d)[0])

    @property
    def two_sharp(self) -> float:
        return float(critical_exponents(self.d)[1])

    @property
    def regime(self) -> Literal["subcritical", "critical", "beyond"]:
        if self.p < self.two_star:
            return "subcritical"
        if self.p == self.two_star:
            return "critical"
        return "beyond"

    @property
    def flow_admissible(self) -> bool:
        """Whether p <= 2#, the range covered by the flow argument."""
        return self.p <= self.two_sharp

    @property
    def scan_cap(self) -> float:
        """Upper end of p-scans: 2* when finite, else 20."""
        return self.two_star if math.isfinite(self.two_star) else SCAN_CAP

    @property
    def in_theorem_range(self) -> bool:
        return self.p <= self.scan_cap


# =============================================================================
# Helpers
# =============================================================================


def _basis(f: NodalFn, basis: Basis | None) -> Basis:
    if basis is None:
        return basis_for(f.rule)
    basis.check(f)
    return basis


def _check_exponent(f: NodalFn, p: Exponent) -> None:
    if p.d != f.rule.d:
        raise DimensionMismatchError(f"exponent dimension {p.d} differs from rule dimension {f.rule.d}")


def _relative_profile(values: NDArray[np.float64], weights: NDArray[np.float64]):
    """Write a one-signed f as m (1 + h); return (m, h, int h^2)."""
    m = float(np.dot(weights, values))
    h = values / m - 1.0
    return m, h, float(np.dot(weights, h**2))


def _one_signed(values: NDArray[np.float64]) -> NDArray[np.float64] | None:
    if np.all(values > 0):
        return values
    if np.all(values < 0):
        return -values
    return None


def norm_gap(f: NodalFn, p: float) -> float:
    """Return ||f||_p^2 - ||f||_2^2, stable for f close to a nonzero constant."""
    w = f.rule.weights
    v = _one_signed(f.values)
    if v is None:
        return norm(f, p) ** 2 - float(np.dot(w, f.values**2))
    m, h, sigma2 = _relative_profile(v, w)
    s = float(np.dot(w, np.expm1(p * np.log1p(h)) - p * h))
    return m**2 * (math.expm1((2.0 / p) * math.log1p(s)) - sigma2)


def entropy(f: NodalFn) -> float:
    """Return int f^2 log(f^2 / ||f||_2^2) dnu_d."""
    w = f.rule.weights
    v = _one_signed(f.values)
    if v is None:
        sq = f.values**2
        total = float(np.dot(w, sq))
        if total == 0.0:
            return 0.0
        return float(np.dot(w, xlogy(sq, sq / total)))
    m, h, sigma2 = _relative_profile(v, w)
    head = float(np.dot(w, (1 + h) ** 2 * 2 * np.log1p(h)))
    return m**2 * (head - (1 + sigma2) * math.log1p(sigma2))


# =============================================================================
# Quotients and deficits
# =============================================================================


def quotient_Qp(f: NodalFn, p: Exponent, basis: Basis | None = None) -> float:
    """Interpolation quotient Q_p[f]; invariant under f -> c f.

    Raises:
        DomainError: p = 2 (use logsob_ratio).
        ConstantInputError: ||f||_p^2 - ||f||_2^2 vanishes to working precision.
    """
    _check_exponent(f, p)
    if p.p == 2:
        raise DomainError("quotient_Qp is undefined at p = 2; use logsob_ratio")
    basis = _basis(f, basis)
    n2 = float(np.dot(f.rule.weights, f.values**2))
    gap = norm_gap(f, p.p)
    if n2 == 0.0 or abs(gap) < CONSTANT_TOLERANCE * n2:
        raise ConstantInputError("quotient is undefined on constant functions")
    return (p.p - 2) / p.d * dirichlet_form(f, basis) / gap


def logsob_ratio(f: NodalFn, d: float, basis: Basis | None = None) -> float:
    """(2/d) int |f'|^2 nu dnu_d / int f^2 log(f^2/||f||_2^2) dnu_d, the p -> 2 limit of Q_p."""
    if float(d) != f.rule.d:
        raise DimensionMismatchError(f"dimension {d} differs from rule dimension {f.rule.d}")
    basis = _basis(f, basis)
    n2 = float(np.dot(f.rule.weights, f.values**2))
    ent = entropy(f)
    if n2 == 0.0 or ent < CONSTANT_TOLERANCE * n2:
        raise ConstantInputError("log-Sobolev ratio is undefined on constant functions")
    return 2.0 / f.rule.d * dirichlet_form(f, basis) / ent


def onofri_deficit(v: NodalFn, d: float, basis: Basis | None = None) -> float:
    """(1/(2d)) int |v'|^2 nu dnu_d - log int e^{v - mean v} dnu_d, for d <= 2."""
    d = float(d)
    if d > 2:
        raise DomainError(f"the Onofri inequality is stated for d <= 2, got d={d}")
    if d != v.rule.d:
        raise DimensionMismatchError(f"dimension {d} differs from rule dimension {v.rule.d}")
    basis = _basis(v, basis)
    centered = v.values - integrate(v)
    tail = float(np.dot(v.rule.weights, np.expm1(centered)))
    return dirichlet_form(v, basis) / (2 * d) - math.log1p(tail)


def poincare_ratio(v: NodalFn, basis: Basis | None = None) -> float:
    """int |v'|^2 nu dnu_d / (d Var(v)); the p = 1 quotient, invariant under v -> v + c."""
    basis = _basis(v, basis)
    centered = v.values - integrate(v)
    variance = float(np.dot(v.rule.weights, centered**2))
    if variance < CONSTANT_TOLERANCE * max(float(np.dot(v.rule.weights, v.values**2)), 1e-300):
        raise ConstantInputError("Poincare ratio is undefined on constant functions")
    return dirichlet_form(v, basis) / (v.rule.d * variance)


# =============================================================================
# Entropy and Fisher information
# =============================================================================


def entropy_F(g: NodalFn, p: Exponent) -> float:
    """F[g] = d (||g||_1^{2/p} - ||g^{2/p}||_1) / (p - 2).

    At p = 2 the limit (d/2) int g log(g / int g) dnu_d is returned.
    """
    _check_exponent(g, p)
    require_positive(g, "g")
    f = g.power(1.0 / p.p)
    if p.p == 2:
        return p.d / 2 * entropy(f)
    return p.d * norm_gap(f, p.p) / (p.p - 2)


def fisher_I(g: NodalFn, p: Exponent, basis: Basis | None = None) -> float:
    """I[g] = int |(g^{1/p})'|^2 nu dnu_d."""
    _check_exponent(g, p)
    require_positive(g, "g")
    return dirichlet_form(g.power(1.0 / p.p), _basis(g, basis))


def el_residual(f: NodalFn, p: Exponent, basis: Basis | None = None) -> NodalFn:
    """-((p-2)/d) L f + f - f^{p-1}, evaluated after normalizing ||f||_p = 1."""
    _check_exponent(f, p)
    if p.p == 2:
        raise DomainError("el_residual is defined for p != 2")
    require_positive(f, "f")
    basis = _basis(f, basis)
    f = f.scaled(1.0 / norm(f, p.p))
    Lf = apply_L(f, basis).values
    return f.with_values(-(p.p - 2) / p.d * Lf + f.values - f.values ** (p.p - 1))


def fisher_form(f: NodalFn, p: Exponent, basis: Basis | None = None) -> float:
    """<Lf, Lf> + (p-1) <(|f'|^2/f) nu, Lf> + d <f, Lf>; nonnegative when p <= 2#.

    The middle term is rational in f, so all three are summed on an oversampled rule.
    """
    _check_exponent(f, p)
    require_positive(f, "f")
    basis = _basis(f, basis)
    fine = oversampled(to_spectral(f, basis).coeffs, basis)
    fine.require_positive("fisher_form")
    nu = 1.0 - fine.rule.nodes**2
    return (
        fine.integrate(fine.Lu**2)
        + (p.p - 1) * fine.integrate(fine.du**2 / fine.u * nu * fine.Lu)
        + p.d * fine.integrate(fine.u * fine.Lu)
    )


# =============================================================================
# Test corpus
# =============================================================================


def polynomial_corpus(
    basis: Basis,
    count: int,
    seed: int,
    degree: int = 6,
    amplitude: float = 0.3,
    floor: float = 0.5,
) -> list[NodalFn]:
    """Random polynomials 1 + amplitude * sum_k xi_k c_k (k <= degree), shifted so min >= floor."""
    if degree > basis.K:
        raise DomainError(f"corpus degree {degree} exceeds basis degree {basis.K}")
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(count):
        coeffs = np.zeros(basis.K + 1)
        coeffs[0] = 1.0
        coeffs[1 : degree + 1] = amplitude * rng.standard_normal(degree)
        values = basis.values @ coeffs
        lowest = float(values.min())
        if lowest < floor:
            values = values + (floor - lowest)
        corpus.append(NodalFn(basis.rule, values))
    return corpus
