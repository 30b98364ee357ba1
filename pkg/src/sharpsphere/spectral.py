"""Orthonormal Gegenbauer eigenbasis of the ultraspherical operator.

    L f = (1 - x^2) f'' - d x f',     L c_k = -lambda_k c_k,  lambda_k = k (d + k - 1).

The basis c_0..c_K is orthonormal in L^2(nu_d) and is generated by the
three-term recurrence x c_k = s_{k+1} c_{k+1} + s_k c_{k-1} with s_k^2 the
recurrence coefficients of the measure; differentiating the recurrence gives
c_k' and c_k'' exactly. L is applied diagonally in this basis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DegreeOverflowError, DimensionMismatchError, DomainError, PositivityError
from .measure import NodalFn, QuadratureRule, quadrature_rule, recurrence_coefficients
from .schemas import SpectralRecord

logger = logging.getLogger(__name__)

# Share of top coefficients watched by the resolution guard
TAIL_FRACTION = 0.1

# Tail energy above this share of the total flags a function as under-resolved
TAIL_TOLERANCE = 1e-8

# Node multiplier for integrands rational in u, which no Gauss rule integrates exactly
OVERSAMPLING = 4


def eigenvalue(k: int, d: float) -> float:
    """Return lambda_k = k (d + k - 1)."""
    if k < 0:
        raise DomainError(f"eigenvalue index must be >= 0, got {k}")
    return float(k * (d + k - 1))


def _recurrence_table(
    x: NDArray[np.float64], s: NDArray[np.float64], K: int
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Values, first and second derivatives of c_0..c_K at points x, shape (len(x), K+1)."""
    m = x.shape[0]
    P = np.zeros((m, K + 1))
    D1 = np.zeros((m, K + 1))
    D2 = np.zeros((m, K + 1))
    P[:, 0] = 1.0
    for k in range(K):
        prev = P[:, k - 1] if k > 0 else 0.0
        prev1 = D1[:, k - 1] if k > 0 else 0.0
        prev2 = D2[:, k - 1] if k > 0 else 0.0
        sk = s[k - 1] if k > 0 else 0.0
        P[:, k + 1] = (x * P[:, k] - sk * prev) / s[k]
        D1[:, k + 1] = (P[:, k] + x * D1[:, k] - sk * prev1) / s[k]
        D2[:, k + 1] = (2 * D1[:, k] + x * D2[:, k] - sk * prev2) / s[k]
    return P, D1, D2


# =============================================================================
# Spectral functions and bases
# =============================================================================


@dataclass(frozen=True, eq=False)
class SpectralFn:
    """Coefficients a_0..a_K in the L^2(nu_d)-orthonormal eigenbasis."""

    d: float
    coeffs: NDArray[np.float64]

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.float64)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def K(self) -> int:
        return self.coeffs.shape[0] - 1

    def norm2_squared(self) -> float:
        """||f||_2^2 by Parseval."""
        return float(np.dot(self.coeffs, self.coeffs))

    def as_record(self) -> SpectralRecord:
        return SpectralRecord(d=self.d, coeffs=self.coeffs.tolist())


@dataclass(frozen=True, eq=False)
class Basis:
    """Node values of c_0..c_K (and derivatives) on a quadrature rule."""

    d: float
    K: int
    rule: QuadratureRule
    values: NDArray[np.float64]
    d1: NDArray[np.float64]
    d2: NDArray[np.float64]
    eigenvalues: NDArray[np.float64]
    steps: NDArray[np.float64]

    # ------------------------------------------------------------------
    # Compatibility and resolution
    # ------------------------------------------------------------------

    def check(self, f: NodalFn) -> None:
        if not self.rule.same_as(f.rule):
            raise DimensionMismatchError(
                f"function on rule (d={f.rule.d}, n={f.rule.n}) but basis on "
                f"(d={self.rule.d}, n={self.rule.n})"
            )

    def tail_ratio(self, coeffs: NDArray[np.float64]) -> float:
        """Energy share carried by the top 10% of coefficients."""
        total = float(np.dot(coeffs, coeffs))
        if total == 0.0:
            return 0.0
        top = max(1, math.ceil(TAIL_FRACTION * (self.K + 1)))
        tail = coeffs[-top:]
        return float(np.dot(tail, tail)) / total

    def is_resolved(self, coeffs: NDArray[np.float64]) -> bool:
        return self.tail_ratio(coeffs) <= TAIL_TOLERANCE

    def _guard(self, coeffs: NDArray[np.float64], where: str) -> bool:
        resolved = self.is_resolved(coeffs)
        if not resolved:
            logger.warning(
                "[SPECTRAL] %s: under-resolved input (tail ratio %.3e, K=%d)",
                where,
                self.tail_ratio(coeffs),
                self.K,
            )
        return resolved

    # ------------------------------------------------------------------
    # Evaluation off the nodes
    # ------------------------------------------------------------------

    def evaluate(self, coeffs: ArrayLike, x: ArrayLike, order: int = 0) -> NDArray[np.float64]:
        """Evaluate sum_k a_k c_k^{(order)}(x) at arbitrary points, order in {0, 1, 2}."""
        if order not in (0, 1, 2):
            raise DomainError(f"derivative order must be 0, 1 or 2, got {order}")
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        tables = _recurrence_table(x, self.steps, self.K)
        return tables[order] @ np.asarray(coeffs, dtype=np.float64)


def build_basis(d: float, K: int, rule: QuadratureRule) -> Basis:
    """Build the orthonormal basis c_0..c_K on ``rule``.

    Raises:
        DegreeOverflowError: if K > n/2 (aliasing guard).
    """
    if K < 0:
        raise DomainError(f"basis degree must be >= 0, got {K}")
    if K > rule.n // 2:
        raise DegreeOverflowError(f"K={K} exceeds n/2={rule.n // 2} for n={rule.n}")
    if float(d) != rule.d:
        raise DimensionMismatchError(f"basis dimension {d} differs from rule dimension {rule.d}")

    steps = np.sqrt(recurrence_coefficients(rule.d, K + 1))
    values, d1, d2 = _recurrence_table(rule.nodes, steps, K)
    eigenvalues = np.array([eigenvalue(k, rule.d) for k in range(K + 1)])
    for array in (values, d1, d2, eigenvalues, steps):
        array.setflags(write=False)
    return Basis(
        d=rule.d,
        K=K,
        rule=rule,
        values=values,
        d1=d1,
        d2=d2,
        eigenvalues=eigenvalues,
        steps=steps,
    )


@lru_cache(maxsize=64)
def _cached_basis(d: float, n: int, K: int) -> Basis:
    return build_basis(d, K, quadrature_rule(d, n))


def basis_for(rule: QuadratureRule, K: int | None = None) -> Basis:
    """Cached basis on ``rule``; K defaults to the largest alias-free degree n/2."""
    return _cached_basis(rule.d, rule.n, rule.n // 2 if K is None else K)


@dataclass(frozen=True, eq=False)
class FineSamples:
    """u, u', u'' and Lu of a resolved function at the nodes of an oversampled rule."""

    rule: QuadratureRule
    u: NDArray[np.float64]
    du: NDArray[np.float64]
    d2u: NDArray[np.float64]
    Lu: NDArray[np.float64]

    def integrate(self, values: NDArray[np.float64]) -> float:
        return float(np.dot(self.rule.weights, values))

    def require_positive(self, what: str) -> None:
        if float(np.min(self.u)) <= 0:
            raise PositivityError(f"{what} requires u > 0 between the nodes as well")


@lru_cache(maxsize=32)
def _fine_tables(d: float, n: int, K: int, factor: int):
    rule = quadrature_rule(d, factor * n)
    steps = np.sqrt(recurrence_coefficients(d, K + 1))
    tables = _recurrence_table(rule.nodes, steps, K)
    for array in tables:
        array.setflags(write=False)
    return rule, tables


def oversampled(coeffs: NDArray[np.float64], basis: Basis, factor: int = OVERSAMPLING) -> FineSamples:
    """Evaluate sum_k a_k c_k on the Gauss rule with factor * n nodes."""
    if factor < 1:
        raise DomainError(f"oversampling factor must be >= 1, got {factor}")
    rule, (P, D1, D2) = _fine_tables(basis.d, basis.rule.n, basis.K, factor)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return FineSamples(
        rule=rule,
        u=P @ coeffs,
        du=D1 @ coeffs,
        d2u=D2 @ coeffs,
        Lu=P @ (-basis.eigenvalues * coeffs),
    )


# =============================================================================
# Transforms and operators
# =============================================================================


def to_spectral(f: NodalFn, basis: Basis) -> SpectralFn:
    """Project nodal values onto c_0..c_K: a_k = sum_i w_i f_i c_k(x_i)."""
    basis.check(f)
    coeffs = basis.values.T @ (basis.rule.weights * f.values)
    return SpectralFn(basis.d, coeffs)


def to_nodal(f: SpectralFn, basis: Basis) -> NodalFn:
    """Evaluate sum_k a_k c_k at the nodes."""
    if f.K != basis.K or f.d != basis.d:
        raise DimensionMismatchError(
            f"coefficients (d={f.d}, K={f.K}) do not match basis (d={basis.d}, K={basis.K})"
        )
    return NodalFn(basis.rule, basis.values @ f.coeffs)


def derivative(f: NodalFn, basis: Basis) -> NodalFn:
    """Spectral first derivative; exact for polynomials of degree <= K."""
    coeffs = to_spectral(f, basis).coeffs
    resolved = basis._guard(coeffs, "derivative")
    return NodalFn(basis.rule, basis.d1 @ coeffs, resolved)


def second_derivative(f: NodalFn, basis: Basis) -> NodalFn:
    """Spectral second derivative; exact for polynomials of degree <= K."""
    coeffs = to_spectral(f, basis).coeffs
    resolved = basis._guard(coeffs, "second_derivative")
    return NodalFn(basis.rule, basis.d2 @ coeffs, resolved)


def apply_L(f: NodalFn, basis: Basis) -> NodalFn:
    """Apply L diagonally: sum_k (-lambda_k) a_k c_k."""
    coeffs = to_spectral(f, basis).coeffs
    resolved = basis._guard(coeffs, "apply_L")
    return NodalFn(basis.rule, basis.values @ (-basis.eigenvalues * coeffs), resolved)


def heat_semigroup(f: SpectralFn, t: float, basis: Basis | None = None) -> SpectralFn:
    """Exact heat semigroup e^{tL}: a_k -> a_k e^{-lambda_k t}."""
    if not t >= 0:
        raise DomainError(f"heat semigroup time must be >= 0, got {t}")
    k = np.arange(f.K + 1)
    lam = basis.eigenvalues if basis is not None else k * (f.d + k - 1.0)
    return SpectralFn(f.d, f.coeffs * np.exp(-lam * t))


def dirichlet_form(f: NodalFn, basis: Basis) -> float:
    """int |f'|^2 nu dnu_d computed by quadrature of the spectral derivative."""
    df = derivative(f, basis).values
    nu = 1.0 - f.rule.nodes**2
    return float(np.dot(f.rule.weights, df**2 * nu))


# =============================================================================
# Carre du champ identities
# =============================================================================


def commutator_defect(u: NodalFn, basis: Basis) -> NodalFn:
    """Nodal residual of (Lu)' - L u' + 2 x u'' + d u' (vanishes identically)."""
    coeffs = to_spectral(u, basis).coeffs
    x = basis.rule.nodes
    du = basis.d1 @ coeffs
    d2u = basis.d2 @ coeffs
    # (Lu)' from the spectral L, L u' from the nodal formula with the exact u'''
    Lu_prime = basis.d1 @ (-basis.eigenvalues * coeffs)
    d3u = _third_derivative(coeffs, basis)
    L_of_du = (1 - x**2) * d3u - basis.d * x * d2u
    return NodalFn(basis.rule, Lu_prime - L_of_du + 2 * x * d2u + basis.d * du)


def _third_derivative(coeffs: NDArray[np.float64], basis: Basis) -> NDArray[np.float64]:
    """u''' at the nodes from the differentiated recurrence."""
    x = basis.rule.nodes
    s = basis.steps
    m = x.shape[0]
    D3 = np.zeros((m, basis.K + 1))
    for k in range(basis.K):
        prev3 = D3[:, k - 1] if k > 0 else 0.0
        sk = s[k - 1] if k > 0 else 0.0
        D3[:, k + 1] = (3 * basis.d2[:, k] + x * D3[:, k] - sk * prev3) / s[k]
    return D3 @ coeffs


def gamma2_sides(u: NodalFn, basis: Basis) -> tuple[float, float]:
    """Both sides of  int (Lu)^2 = int |u''|^2 nu^2 + d int |u'|^2 nu."""
    coeffs = to_spectral(u, basis).coeffs
    nu = 1.0 - basis.rule.nodes**2
    w = basis.rule.weights
    Lu = basis.values @ (-basis.eigenvalues * coeffs)
    du = basis.d1 @ coeffs
    d2u = basis.d2 @ coeffs
    lhs = float(np.dot(w, Lu**2))
    rhs = float(np.dot(w, d2u**2 * nu**2) + basis.d * np.dot(w, du**2 * nu))
    return lhs, rhs


def l_gamma_sides(u: NodalFn, basis: Basis) -> tuple[float, float]:
    """Both sides of

        <(|u'|^2/u) nu, Lu> = d/(d+2) int |u'|^4/u^2 nu^2 - 2 (d-1)/(d+2) int |u'|^2 u''/u nu^2

    for a positive u.
    """
    if float(np.min(u.values)) <= 0:
        raise PositivityError("l_gamma_sides requires u > 0 at every node")
    fine = oversampled(to_spectral(u, basis).coeffs, basis)
    fine.require_positive("l_gamma_sides")
    d = basis.d
    nu = 1.0 - fine.rule.nodes**2
    y = fine.du**2 / fine.u
    lhs = fine.integrate(y * nu * fine.Lu)
    rhs = d / (d + 2) * fine.integrate(y**2 * nu**2) - 2 * (d - 1) / (d + 2) * fine.integrate(
        y * fine.d2u * nu**2
    )
    return lhs, rhs
