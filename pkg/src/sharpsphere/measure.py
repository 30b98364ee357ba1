"""The ultraspherical probability measure and its Gauss quadrature.

The measure is

    dnu_d(x) = Z_d^{-1} (1 - x^2)^{d/2 - 1} dx   on (-1, 1),

the image of the uniform measure on S^d under x = cos(theta). Nodes and
weights come from the Golub-Welsch algorithm: the symmetric tridiagonal
Jacobi matrix of the orthonormal Gegenbauer recurrence is diagonalized, the
eigenvalues are the nodes and the squared first eigenvector components are
the weights (the zeroth moment of a probability measure is 1).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .errors import DimensionMismatchError, DomainError, PositivityError
from .schemas import QuadratureRuleRecord

logger = logging.getLogger(__name__)

# Default node count for every rule built without an explicit size
DEFAULT_NODES = 64


# =============================================================================
# Normalization and recurrence
# =============================================================================


def _check_dim(d: float) -> float:
    d = float(d)
    if not d >= 1:
        raise DomainError(f"dimension d must be >= 1, got {d}")
    return d


def normalization_Zd(d: float) -> float:
    """Return Z_d = sqrt(pi) Gamma(d/2) / Gamma((d+1)/2).

    Z_d normalizes (1 - x^2)^{d/2-1} dx to a probability measure on (-1, 1).

    Example:
        >>> normalization_Zd(2)
        2.0
    """
    d = _check_dim(d)
    return math.sqrt(math.pi) * math.exp(gammaln(d / 2) - gammaln((d + 1) / 2))


def recurrence_coefficients(d: float, n: int) -> NDArray[np.float64]:
    """Return beta_1..beta_{n-1} of the monic recurrence x p_k = p_{k+1} + beta_k p_{k-1}.

    The diagonal of the Jacobi matrix vanishes because nu_d is even. The closed
    form j (j+d-2) / ((2j+d-1)(2j+d-3)) is 0/0 at j = 1, d = 1; beta_1 is the
    second moment 1/(d+1) for every d.
    """
    beta = np.empty(max(n - 1, 0), dtype=np.float64)
    if n > 1:
        beta[0] = 1.0 / (d + 1)
        j = np.arange(2, n, dtype=np.float64)
        beta[1:] = j * (j + d - 2) / ((2 * j + d - 1) * (2 * j + d - 3))
    return beta


def moment(d: float, j: int) -> float:
    """Return the even moment  int x^{2j} dnu_d = prod_{i=1}^{j} (2i-1)/(d+2i-1)."""
    d = _check_dim(d)
    value = 1.0
    for i in range(1, j + 1):
        value *= (2 * i - 1) / (d + 2 * i - 1)
    return value


# =============================================================================
# Quadrature rule
# =============================================================================


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss rule for nu_d: n strictly increasing nodes with positive weights summing to 1."""

    d: float
    n: int
    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]

    def as_record(self) -> QuadratureRuleRecord:
        """JSON-ready view {d, n, nodes[], weights[]}."""
        return QuadratureRuleRecord(
            d=self.d,
            n=self.n,
            nodes=self.nodes.tolist(),
            weights=self.weights.tolist(),
        )

    def same_as(self, other: QuadratureRule) -> bool:
        """Whether two rules share dimension and node count (hence nodes)."""
        return self is other or (self.d == other.d and self.n == other.n)


@lru_cache(maxsize=64)
def quadrature_rule(d: float, n: int = DEFAULT_NODES) -> QuadratureRule:
    """Build the n-point Gauss rule for nu_d via Golub-Welsch.

    Args:
        d: Dimension, any real d >= 1.
        n: Number of nodes, n >= 2.

    Returns:
        QuadratureRule exact for polynomials of degree <= 2n-1 against nu_d.
        Nodes and weights are symmetrized under x -> -x and the weights are
        renormalized to sum to one.
    """
    d = _check_dim(d)
    if n < 2:
        raise DomainError(f"node count n must be >= 2, got {n}")

    off_diag = np.sqrt(recurrence_coefficients(d, n))
    nodes, vecs = eigh_tridiagonal(np.zeros(n), off_diag)
    weights = vecs[0, :] ** 2

    # Enforce the x -> -x symmetry the exact rule has
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    weights = weights / weights.sum()

    nodes.setflags(write=False)
    weights.setflags(write=False)
    logger.debug("[MEASURE] built Gauss rule d=%s n=%d", d, n)
    return QuadratureRule(d=d, n=n, nodes=nodes, weights=weights)


# =============================================================================
# Nodal functions
# =============================================================================


@dataclass(frozen=True, eq=False)
class NodalFn:
    """A function sampled at the nodes of a quadrature rule.

    ``resolved`` is False when a spectral operator produced it from an
    under-resolved input.
    """

    rule: QuadratureRule
    values: NDArray[np.float64]
    resolved: bool = True

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.rule.n,):
            raise DimensionMismatchError(
                f"expected {self.rule.n} nodal values, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(
        cls, rule: QuadratureRule, func: Callable[[NDArray[np.float64]], NDArray[np.float64]]
    ) -> NodalFn:
        """Sample ``func`` at the nodes of ``rule``."""
        values = np.broadcast_to(np.asarray(func(rule.nodes), dtype=np.float64), rule.nodes.shape)
        return cls(rule, np.array(values))

    @classmethod
    def constant(cls, rule: QuadratureRule, value: float) -> NodalFn:
        return cls(rule, np.full(rule.n, float(value)))

    @property
    def x(self) -> NDArray[np.float64]:
        return self.rule.nodes

    def with_values(self, values: NDArray[np.float64]) -> NodalFn:
        """Same rule, new values."""
        return NodalFn(self.rule, values)

    def scaled(self, c: float) -> NodalFn:
        return NodalFn(self.rule, c * self.values)

    def power(self, q: float) -> NodalFn:
        """|f|^q nodally."""
        return NodalFn(self.rule, np.abs(self.values) ** q)

    def is_even(self, tol: float = 1e-12) -> bool:
        """max |f(x) - f(-x)| < tol on the symmetric node set."""
        return float(np.max(np.abs(self.values - self.values[::-1]))) < tol


def integrate(f: NodalFn) -> float:
    """Return sum_i w_i f_i, the nu_d-integral of f (exact up to degree 2n-1)."""
    return float(np.dot(f.rule.weights, f.values))


def norm(f: NodalFn, p: float) -> float:
    """Return ||f||_p = (int |f|^p dnu_d)^{1/p} for p >= 1."""
    if not p >= 1:
        raise DomainError(f"norm exponent must be >= 1, got {p}")
    if p == 1:
        return float(np.dot(f.rule.weights, np.abs(f.values)))
    if p == 2:
        return math.sqrt(float(np.dot(f.rule.weights, f.values**2)))
    return float(np.dot(f.rule.weights, np.abs(f.values) ** p)) ** (1.0 / p)


# Strict positivity: min value must exceed this share of the max value
POSITIVITY_THRESHOLD = 1e-12


def require_positive(f: NodalFn, what: str = "function") -> NodalFn:
    """Raise PositivityError unless min f > 1e-12 max f at the nodes."""
    lo = float(np.min(f.values))
    hi = float(np.max(f.values))
    if not (hi > 0 and lo > POSITIVITY_THRESHOLD * hi):
        raise PositivityError(f"{what} must be uniformly positive (min={lo:.3e}, max={hi:.3e})")
    return f
