"""Direct minimization of the interpolation quotient.

Iterates are written f = a_0 (1 + sum_{k>=1} b_k c_k). The quotient does not
depend on a_0, so descent acts on b alone. Q and its gradient are evaluated
through h = sum b_k c_k with log1p/expm1 and stay accurate for |b| well below
the square root of machine precision.

The infimum is not attained: minimizing sequences drift toward constants
along c_1. Near constants Q is homogeneous of degree 0 in b to leading
order, with a Hessian across directions of size 1/|b|^2. Each iteration takes a
preconditioned step scaled by |b|^2, which adjusts the shape of h, and then
tries to contract b toward constants. A start ends when the quotient
stagnates, when |b| falls below CONSTANT_AMPLITUDE, or at the iteration cap.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from .config import get_config
from .errors import DomainError
from .functionals import Exponent, logsob_ratio, quotient_Qp
from .measure import NodalFn, norm, quadrature_rule
from .schemas import SharpnessRow, SharpnessTable
from .spectral import Basis, basis_for, to_spectral

logger = logging.getLogger(__name__)

# Stagnation: |Q(it - STALL_WINDOW) - Q(it)| below STALL_TOLERANCE ends a start
STALL_WINDOW = 50
STALL_TOLERANCE = 1e-10

# |b| at which an iterate counts as constant
CONSTANT_AMPLITUDE = 1e-7

INITIAL_STEP = 0.5
MAX_BACKTRACKS = 40

# Moves toward constants scale b by 1 - 2^-j, j = 1..MAX_CONTRACTIONS, first decrease wins
MAX_CONTRACTIONS = 6

# Random starts: 1 + START_AMPLITUDE * sum_{k<=START_MODES} xi_k c_k, min >= START_FLOOR
START_MODES = 6
START_AMPLITUDE = 0.3
START_FLOOR = 0.1

DEFAULT_EPS = (0.2, 0.1, 0.05, 0.025, 0.0125)


class MinimizeResult(BaseModel):
    """Best quotient found over all starts."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: float = Field(..., description="Exponent (2 for the log-Sobolev ratio)")
    d: float = Field(..., description="Dimension")
    best_value: float = Field(..., description="Minimum over starts of the final quotient")
    argmin: NodalFn = Field(..., exclude=True, description="Best iterate, ||f||_p = 1")
    argmin_values: list[float] = Field(..., description="Nodal values of the best iterate")
    starts: int = Field(..., description="Number of random starts")
    converged: bool = Field(..., description="False if some start hit the iteration cap")
    gradient_norm: float = Field(
        ...,
        description="|b| |grad_b Q| at the best iterate f = a_0 (1 + sum b_k c_k), the gradient along ||f||_p = 1 "
        "measured relative to the distance from constants",
    )
    amplitude: float = Field(..., description="|b|, the relative non-constant amplitude of the best iterate")
    restarts: int = Field(0, description="Restarts triggered by approach to constants")
    iterations: int = Field(0, description="Iterations summed over starts")


@dataclass
class _StartOutcome:
    value: float
    b: NDArray[np.float64]
    converged: bool
    gradient_norm: float
    amplitude: float
    restarts: int
    iterations: int


# =============================================================================
# Objective
# =============================================================================


class _Objective:
    """Quotient and gradient in the coordinates b of f = a_0 (1 + sum_{k>=1} b_k c_k)."""

    def __init__(self, basis: Basis, p: float) -> None:
        self.basis = basis
        self.p = p
        self.d = basis.d
        self.modes = basis.values[:, 1:]
        self.weighted = basis.rule.weights[:, None] * self.modes
        self.lam = basis.eigenvalues[1:]
        self.precond = basis.d / (1.0 + self.lam)
        self.scale = 2.0 / self.d if p == 2 else (p - 2) / self.d

    def nodal(self, b: NDArray[np.float64]) -> NodalFn:
        """f = 1 + h at the nodes, normalized to ||f||_p = 1."""
        f = NodalFn(self.basis.rule, 1.0 + self.modes @ b)
        return f.scaled(1.0 / norm(f, self.p))

    def _parts(self, b: NDArray[np.float64]) -> tuple[float, float, NDArray[np.float64]] | None:
        """(energy, denominator, gradient of the denominator), None unless 1 + h > 0."""
        h = self.modes @ b
        if np.any(h <= -1.0):
            return None
        w = self.basis.rule.weights
        log1p_h = np.log1p(h)
        projection = self.weighted.T @ h
        sigma2 = float(np.dot(w, h**2))
        if self.p == 2:
            # Ent(f^2) / a_0^2
            denom = float(np.dot(w, (1 + h) ** 2 * 2 * log1p_h)) - (1 + sigma2) * math.log1p(sigma2)
            grad = 4 * (self.weighted.T @ ((1 + h) * log1p_h)) - 2 * math.log1p(sigma2) * projection
        else:
            # (||f||_p^2 - ||f||_2^2) / a_0^2
            p = self.p
            s = float(np.dot(w, np.expm1(p * log1p_h) - p * h))
            denom = math.expm1((2.0 / p) * math.log1p(s)) - sigma2
            inner = self.weighted.T @ np.expm1((p - 1) * log1p_h)
            grad = 2 * (1 + s) ** (2.0 / p - 1) * inner - 2 * projection
        return float(np.dot(self.lam, b**2)), denom, grad

    def value(self, b: NDArray[np.float64]) -> float:
        parts = self._parts(b)
        if parts is None:
            return math.inf
        energy, denom, _ = parts
        if self.scale * denom <= 0:
            return math.inf
        return self.scale * energy / denom

    def gradient(self, b: NDArray[np.float64]) -> NDArray[np.float64]:
        energy, denom, d_denom = self._parts(b)
        return self.scale * (2 * self.lam * b * denom - energy * d_denom) / denom**2

    def gradient_norm(self, b: NDArray[np.float64]) -> float:
        return self.amplitude(b) * float(np.linalg.norm(self.gradient(b)))

    @staticmethod
    def amplitude(b: NDArray[np.float64]) -> float:
        return float(np.linalg.norm(b))


def _random_start(basis: Basis, rng: np.random.Generator) -> NDArray[np.float64]:
    modes = min(START_MODES, basis.K)
    b = np.zeros(basis.K)
    b[:modes] = START_AMPLITUDE * rng.standard_normal(modes)
    perturbation = basis.values[:, 1 : modes + 1] @ b[:modes]
    lowest = float(perturbation.min())
    if 1.0 + lowest < START_FLOOR:
        b *= (1.0 - START_FLOOR) / -lowest
    return b


def _descend(
    objective: _Objective,
    b: NDArray[np.float64],
    max_iterations: int,
) -> tuple[NDArray[np.float64], float, str, int]:
    """Run one descent; return (b, Q, reason, iterations) with reason in {stall, constant, cap}."""
    value = objective.value(b)
    history = [value]
    step = INITIAL_STEP
    for iteration in range(1, max_iterations + 1):
        g = objective.gradient(b)
        direction = -objective.precond * g * float(np.dot(b, b))
        slope = float(np.dot(g, direction))

        trial, trial_value = b, value
        if slope < 0:
            step = min(INITIAL_STEP, 4 * step)
            for _ in range(MAX_BACKTRACKS):
                candidate = b + step * direction
                candidate_value = objective.value(candidate)
                if candidate_value <= value + 1e-4 * step * slope:
                    trial, trial_value = candidate, candidate_value
                    break
                step *= 0.5

        if objective.amplitude(trial) < CONSTANT_AMPLITUDE:
            return trial, trial_value, "constant", iteration

        for j in range(1, MAX_CONTRACTIONS + 1):
            contracted = (1.0 - 0.5**j) * trial
            contracted_value = objective.value(contracted)
            if contracted_value < trial_value:
                trial, trial_value = contracted, contracted_value
                break

        if trial is b:
            return b, value, "stall", iteration
        b, value = trial, trial_value
        history.append(value)
        if len(history) > STALL_WINDOW and abs(history[-STALL_WINDOW - 1] - value) < STALL_TOLERANCE:
            return b, value, "stall", iteration
    return b, value, "cap", max_iterations


def _run_start(
    objective: _Objective,
    seed: int,
    index: int,
    max_iterations: int,
    max_restarts: int,
    initial: NDArray[np.float64] | None,
) -> _StartOutcome:
    rng = np.random.default_rng([seed, index])
    b = initial if initial is not None else _random_start(objective.basis, rng)
    best: tuple[float, NDArray[np.float64]] | None = None
    restarts = 0
    total = 0
    converged = True
    while True:
        b, value, reason, iterations = _descend(objective, b, max_iterations)
        total += iterations
        converged = converged and reason != "cap"
        if best is None or value < best[0]:
            best = (value, b)
        if reason != "constant" or restarts >= max_restarts:
            break
        restarts += 1
        logger.info("[MINIMIZE] start %d reached constants (Q=%.10g); restarting", index, value)
        b = _random_start(objective.basis, rng)

    value, b = best
    logger.debug("[MINIMIZE] start %d: Q=%.12g reason=%s iterations=%d", index, value, reason, total)
    return _StartOutcome(
        value=value,
        b=b,
        converged=converged,
        gradient_norm=objective.gradient_norm(b),
        amplitude=objective.amplitude(b),
        restarts=restarts,
        iterations=total,
    )


def _initial_profile(initial: NodalFn, basis: Basis) -> NDArray[np.float64]:
    """b of a positive initial guess."""
    coeffs = to_spectral(initial, basis).coeffs
    if not coeffs[0] > 0:
        raise DomainError("initial guess must have positive mean")
    return coeffs[1:] / coeffs[0]


def _minimize(
    p_value: float,
    d: float,
    starts: int,
    seed: int,
    nodes: int | None,
    kmax: int | None,
    max_iterations: int | None,
    workers: int | None,
    max_restarts: int,
    initial: NodalFn | None,
) -> MinimizeResult:
    if starts < 1:
        raise DomainError(f"starts must be >= 1, got {starts}")
    cfg = get_config()
    nodes = cfg.nodes if nodes is None else nodes
    kmax = cfg.kmax if kmax is None else kmax
    max_iterations = cfg.max_iterations if max_iterations is None else max_iterations
    workers = cfg.workers if workers is None else workers

    basis = basis_for(quadrature_rule(d, nodes), kmax)
    objective = _Objective(basis, p_value)
    initial_profile = None if initial is None else _initial_profile(initial, basis)

    def run(index: int) -> _StartOutcome:
        first = initial_profile if index == 0 else None
        return _run_start(objective, seed, index, max_iterations, max_restarts, first)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, range(starts)))
    else:
        outcomes = [run(i) for i in range(starts)]

    best_index = min(range(starts), key=lambda i: (outcomes[i].value, i))
    best = outcomes[best_index]
    argmin = objective.nodal(best.b)
    logger.info(
        "[MINIMIZE] p=%s d=%s: best Q=%.12g over %d starts (start %d)",
        p_value,
        d,
        best.value,
        starts,
        best_index,
    )
    return MinimizeResult(
        p=p_value,
        d=d,
        best_value=best.value,
        argmin=argmin,
        argmin_values=argmin.values.tolist(),
        starts=starts,
        converged=all(o.converged for o in outcomes),
        gradient_norm=best.gradient_norm,
        amplitude=best.amplitude,
        restarts=sum(o.restarts for o in outcomes),
        iterations=sum(o.iterations for o in outcomes),
    )


def minimize_quotient(
    p: Exponent,
    starts: int = 8,
    seed: int = 0,
    *,
    nodes: int | None = None,
    kmax: int | None = None,
    max_iterations: int | None = None,
    workers: int | None = None,
    max_restarts: int = 1,
    initial: NodalFn | None = None,
) -> MinimizeResult:
    """Minimize Q_p over non-constant functions from ``starts`` random starts.

    Runs beyond the theorem range (p > 2*, or p > 20 when 2* is infinite) are
    allowed but logged.
    """
    if p.p == 2:
        raise DomainError("p = 2 selects the log-Sobolev ratio; use minimize_logsob")
    if not p.in_theorem_range:
        logger.warning("[MINIMIZE] p=%s is outside theorem range for d=%s", p.p, p.d)
    return _minimize(p.p, p.d, starts, seed, nodes, kmax, max_iterations, workers, max_restarts, initial)


def minimize_logsob(
    d: float,
    starts: int = 8,
    seed: int = 0,
    *,
    nodes: int | None = None,
    kmax: int | None = None,
    max_iterations: int | None = None,
    workers: int | None = None,
    max_restarts: int = 1,
    initial: NodalFn | None = None,
) -> MinimizeResult:
    """Minimize the log-Sobolev ratio (2/d) int |f'|^2 nu / Ent(f^2)."""
    d = float(d)
    if not d >= 1:
        raise DomainError(f"dimension d must be >= 1, got {d}")
    return _minimize(2.0, d, starts, seed, nodes, kmax, max_iterations, workers, max_restarts, initial)


# =============================================================================
# Perturbation family
# =============================================================================


def perturbation_sharpness(
    p: Exponent,
    eps_list: list[float] | tuple[float, ...] = DEFAULT_EPS,
    nodes: int | None = None,
) -> SharpnessTable:
    """Q_p[1 + eps x] along ``eps_list`` and its eps -> 0 extrapolation."""
    if len(eps_list) < 1:
        raise DomainError("eps list must not be empty")
    for eps in eps_list:
        if not 0 < eps <= 0.5:
            raise DomainError(f"eps must lie in (0, 0.5], got {eps}")
    rule = quadrature_rule(p.d, get_config().nodes if nodes is None else nodes)
    basis = basis_for(rule)
    rows = []
    for eps in eps_list:
        f = NodalFn.from_callable(rule, lambda x, e=eps: 1.0 + e * x)
        q = logsob_ratio(f, p.d, basis) if p.p == 2 else quotient_Qp(f, p, basis)
        rows.append(SharpnessRow(eps=float(eps), Q=q))

    ordered = sorted(rows, key=lambda r: r.eps)
    if len(ordered) >= 2:
        small, next_ = ordered[0], ordered[1]
        e1, e2 = small.eps**2, next_.eps**2
        limit = (e2 * small.Q - e1 * next_.Q) / (e2 - e1)
    else:
        limit = ordered[0].Q
    return SharpnessTable(p=p.p, d=p.d, rows=rows, limit=limit)
