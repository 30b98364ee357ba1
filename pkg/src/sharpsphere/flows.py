"""Entropy flows and hypercontractivity experiments.

Two formulations of the same flow are provided:

    heat flow       dg/dt = L g,                              g = f^p
    nonlinear flow  df/dt = L f + (p-1) (|f'|^2 / f) nu

The heat flow is integrated exactly by the spectral semigroup and is the
reference; the nonlinear flow is stepped in coefficient space by an
integrating-factor Runge-Kutta scheme and serves as a cross-check.
"""

from __future__ import annotations

import logging
import math
from typing import Iterator, Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .certificates import alpha_improved
from .errors import DomainError, EmptyWindowError, StepSizeError, SymmetryError
from .functionals import Exponent, entropy, entropy_F, fisher_I, norm_gap
from .measure import (
    POSITIVITY_THRESHOLD,
    NodalFn,
    integrate,
    norm,
    quadrature_rule,
    require_positive,
)
from .schemas import BecknerChainReport, DecayReport, FlowTrace, GrossReport, HyperReport
from .spectral import (
    Basis,
    basis_for,
    dirichlet_form,
    heat_semigroup,
    to_nodal,
    to_spectral,
)

logger = logging.getLogger(__name__)

# Default number of samples on a flow time grid
DEFAULT_SAMPLES = 40

# Default step of the nonlinear integrator
DEFAULT_DT = 1e-3

# Step halvings allowed before the nonlinear integrator gives up
MAX_HALVINGS = 12

# Absolute slack on the hypercontractivity and comparison links
CHAIN_SLACK = 1e-10


def default_time_grid(d: float, samples: int = DEFAULT_SAMPLES, tmax: float | None = None) -> NDArray[np.float64]:
    """0 followed by geometric samples up to tmax (default 5/(2d))."""
    if samples < 2:
        raise DomainError(f"samples must be >= 2, got {samples}")
    tmax = 5.0 / (2.0 * d) if tmax is None else float(tmax)
    if not tmax > 0:
        raise DomainError(f"tmax must be positive, got {tmax}")
    return np.concatenate([[0.0], np.geomspace(tmax * 1e-3, tmax, samples - 1)])


def _check_grid(t_grid: ArrayLike) -> NDArray[np.float64]:
    times = np.asarray(t_grid, dtype=np.float64)
    if times.ndim != 1 or times.size < 1 or times[0] != 0.0:
        raise DomainError("time grid must be a 1-D array starting at 0")
    if np.any(np.diff(times) <= 0):
        raise DomainError("time grid must be strictly increasing")
    return times


# =============================================================================
# Heat flow
# =============================================================================


def _heat_states(
    f0: NodalFn, p: Exponent, times: NDArray[np.float64], basis: Basis
) -> Iterator[tuple[float, NodalFn]]:
    """Yield (t, g(t)) with g(0) = f0^p evolved by the exact semigroup."""
    g0 = to_spectral(f0.power(p.p), basis)
    if not basis.is_resolved(g0.coeffs):
        logger.warning("[FLOW] initial datum f0^p is under-resolved at K=%d", basis.K)
    for t in times:
        yield float(t), to_nodal(heat_semigroup(g0, float(t), basis), basis)


def _trace(
    p: Exponent,
    method: Literal["heat", "nonlinear"],
    times: NDArray[np.float64],
    states: Sequence[NodalFn],
    basis: Basis,
) -> FlowTrace:
    F, I, mass, min_g = [], [], [], []
    resolved = True
    for g in states:
        require_positive(g, "g along the flow")
        F.append(entropy_F(g, p))
        I.append(fisher_I(g, p, basis))
        mass.append(integrate(g))
        min_g.append(float(np.min(g.values)))
        resolved &= basis.is_resolved(to_spectral(g.power(1.0 / p.p), basis).coeffs)
    return FlowTrace(
        p=p.p,
        d=p.d,
        method=method,
        times=times.tolist(),
        F=F,
        I=I,
        mass=mass,
        min_g=min_g,
        resolved=resolved,
    )


def run_heat_flow(
    f0: NodalFn, p: Exponent, t_grid: ArrayLike | None = None, basis: Basis | None = None
) -> FlowTrace:
    """Evolve g = f0^p exactly and record F, I, mass and min g at each sample.

    Raises:
        PositivityError: f0 or some g(t) is not uniformly positive.
    """
    require_positive(f0, "f0")
    basis = basis_for(f0.rule) if basis is None else basis
    times = _check_grid(default_time_grid(p.d) if t_grid is None else t_grid)
    states = [g for _, g in _heat_states(f0, p, times, basis)]
    trace = _trace(p, "heat", times, states, basis)
    logger.info("[FLOW] heat flow p=%s d=%s: %d samples, F(0)=%.6g", p.p, p.d, len(times), trace.F[0])
    return trace


# =============================================================================
# Nonlinear flow
# =============================================================================


class _NonlinearStepper:
    """Integrating-factor RK4 for a' = -lambda a + N(a) in coefficient space."""

    def __init__(self, p: Exponent, basis: Basis) -> None:
        self.p = p
        self.basis = basis
        self.nu = 1.0 - basis.rule.nodes**2

    def nonlinear(self, a: NDArray[np.float64]) -> NDArray[np.float64] | None:
        b = self.basis
        f = b.values @ a
        if not float(f.min()) > POSITIVITY_THRESHOLD * float(f.max()):
            return None
        df = b.d1 @ a
        term = (self.p.p - 1) * df**2 * self.nu / f
        return b.values.T @ (b.rule.weights * term)

    def step(self, a: NDArray[np.float64], h: float) -> NDArray[np.float64] | None:
        lam = self.basis.eigenvalues
        E = np.exp(-lam * h)
        E2 = np.exp(-lam * h / 2)
        k1 = self.nonlinear(a)
        if k1 is None:
            return None
        k2 = self.nonlinear(E2 * (a + h / 2 * k1))
        if k2 is None:
            return None
        k3 = self.nonlinear(E2 * a + h / 2 * k2)
        if k3 is None:
            return None
        k4 = self.nonlinear(E * a + h * E2 * k3)
        if k4 is None:
            return None
        new = E * a + h / 6 * (E * k1 + 2 * E2 * (k2 + k3) + k4)
        f = self.basis.values @ new
        if not float(f.min()) > POSITIVITY_THRESHOLD * float(f.max()):
            return None
        if not self.basis.is_resolved(new):
            return None
        return new


def run_nonlinear_flow(
    f0: NodalFn,
    p: Exponent,
    t_grid: ArrayLike | None = None,
    dt: float = DEFAULT_DT,
    basis: Basis | None = None,
) -> FlowTrace:
    """Step df/dt = Lf + (p-1)(|f'|^2/f) nu and record the same trace as the heat flow.

    Substeps are shortened to land on every sample time. A failed step
    (positivity or resolution lost) is retried with half the step.

    Raises:
        StepSizeError: more than MAX_HALVINGS consecutive failures.
    """
    require_positive(f0, "f0")
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    basis = basis_for(f0.rule) if basis is None else basis
    times = _check_grid(default_time_grid(p.d) if t_grid is None else t_grid)
    stepper = _NonlinearStepper(p, basis)

    a = to_spectral(f0, basis).coeffs.copy()
    states = [NodalFn(basis.rule, basis.values @ a).power(p.p)]
    t = 0.0
    h = float(dt)
    for target in times[1:]:
        failures = 0
        while t < target:
            remaining = target - t
            step = min(h, remaining)
            new = stepper.step(a, step)
            if new is None:
                failures += 1
                if failures > MAX_HALVINGS:
                    raise StepSizeError(f"nonlinear flow failed to advance past t={t:.6g}")
                h = step / 2
                logger.info("[FLOW] step rejected at t=%.6g, retrying with dt=%.3e", t, h)
                continue
            failures = 0
            a = new
            t = float(target) if step == remaining else t + step
        states.append(NodalFn(basis.rule, basis.values @ a).power(p.p))

    trace = _trace(p, "nonlinear", times, states, basis)
    logger.info("[FLOW] nonlinear flow p=%s d=%s: final dt=%.3e", p.p, p.d, h)
    return trace


# =============================================================================
# Decay diagnostics
# =============================================================================


def decay_rate(
    trace: FlowTrace,
    which: Literal["F", "I"] = "I",
    window: tuple[float, float] | None = None,
) -> float:
    """Least-squares slope of log(value) over the last half of ``window``."""
    times = np.asarray(trace.times)
    values = np.asarray(trace.F if which == "F" else trace.I)
    t0, t1 = (times[0], times[-1]) if window is None else window
    start = t0 + 0.5 * (t1 - t0)
    mask = (times >= start) & (times <= t1)
    if mask.sum() < 2:
        raise EmptyWindowError(f"fewer than two samples of {which} in [{start:.6g}, {t1:.6g}]")
    if np.any(values[mask] <= 0):
        raise EmptyWindowError(f"{which} is not positive on the fitting window")
    slope, _ = np.polyfit(times[mask], np.log(values[mask]), 1)
    return float(slope)


def entropy_production_gap(trace: FlowTrace) -> NDArray[np.float64]:
    """|dF/dt + 2 d I| / I at interior samples, dF/dt by centered differences."""
    times = np.asarray(trace.times)
    if times.size < 3:
        raise EmptyWindowError("need at least three samples for centered differences")
    F = np.asarray(trace.F)
    I = np.asarray(trace.I)  # noqa: E741
    dF = np.gradient(F, times)
    return np.abs(dF[1:-1] + 2 * trace.d * I[1:-1]) / I[1:-1]


def mean_derivative(coeffs: NDArray[np.float64], basis: Basis) -> tuple[float, float]:
    """Return (int f' dnu_{d+2}, (d+1) int x f dnu_d); the two agree by parts."""
    shifted = quadrature_rule(basis.d + 2, basis.rule.n)
    direct = float(np.dot(shifted.weights, basis.evaluate(coeffs, shifted.nodes, order=1)))
    f = basis.values @ coeffs
    moment = (basis.d + 1) * float(np.dot(basis.rule.weights, basis.rule.nodes * f))
    return direct, moment


def auxiliary_poincare(coeffs: NDArray[np.float64], basis: Basis) -> float:
    """int |f''|^2 dnu_{d+4} - (d+2) int |f' - mean f'|^2 dnu_{d+2}; nonnegative."""
    n = basis.rule.n
    rule2 = quadrature_rule(basis.d + 2, n)
    rule4 = quadrature_rule(basis.d + 4, n)
    d1 = basis.evaluate(coeffs, rule2.nodes, order=1)
    d2 = basis.evaluate(coeffs, rule4.nodes, order=2)
    mean = float(np.dot(rule2.weights, d1))
    lhs = float(np.dot(rule4.weights, d2**2))
    rhs = (basis.d + 2) * float(np.dot(rule2.weights, (d1 - mean) ** 2))
    return lhs - rhs


def improved_decay_check(
    f0: NodalFn,
    p: Exponent,
    t_grid: ArrayLike | None = None,
    basis: Basis | None = None,
    tolerance: float = 0.05,
) -> DecayReport:
    """Faster decay of I for even data: slope <= -2(d + alpha(d+2)) + tolerance.

    Raises:
        SymmetryError: f0 is not even.
        DomainError: p > 2#.
    """
    if not f0.is_even():
        raise SymmetryError("improved decay requires f0(x) = f0(-x)")
    if not p.flow_admissible:
        raise DomainError(f"p={p.p} exceeds 2#={p.two_sharp} for d={p.d}")
    require_positive(f0, "f0")
    basis = basis_for(f0.rule) if basis is None else basis
    times = _check_grid(default_time_grid(p.d) if t_grid is None else t_grid)

    states = []
    mean_max = moment_max = 0.0
    margin_min = math.inf
    for _, g in _heat_states(f0, p, times, basis):
        states.append(g)
        coeffs = to_spectral(g.power(1.0 / p.p), basis).coeffs
        direct, moment = mean_derivative(coeffs, basis)
        mean_max = max(mean_max, abs(direct))
        moment_max = max(moment_max, abs(moment))
        margin_min = min(margin_min, auxiliary_poincare(coeffs, basis))
    trace = _trace(p, "heat", times, states, basis)

    alpha = float(alpha_improved(p.p, p.d))
    improved = p.d + alpha * (p.d + 2)
    bound = -2 * improved
    slope = decay_rate(trace, "I")
    slope_holds = slope <= bound + tolerance
    holds = slope_holds and max(mean_max, moment_max) < 1e-10 and margin_min >= -1e-10
    logger.info("[FLOW] improved decay: slope=%.6g bound=%.6g holds=%s", slope, bound, holds)
    return DecayReport(
        p=p.p,
        d=p.d,
        alpha=alpha,
        improved_constant=improved,
        slope=slope,
        bound=bound,
        slope_holds=slope_holds,
        mean_derivative_max=mean_max,
        mean_moment_max=moment_max,
        poincare_margin_min=margin_min,
        holds=holds,
    )


# =============================================================================
# Hypercontractivity
# =============================================================================


def _check_hyper(u: NodalFn, p: float, d: float) -> None:
    if not 1 < p < 2:
        raise DomainError(f"hypercontractivity runs need p in (1, 2), got {p}")
    if float(d) != u.rule.d:
        raise DomainError(f"dimension {d} differs from rule dimension {u.rule.d}")
    if not np.any(u.values):
        raise DomainError("initial datum must not vanish identically")


def hypercontractive_time(p: float, d: float) -> float:
    """t* with e^{2 d t*} = 1/(p-1)."""
    return math.log(1.0 / (p - 1)) / (2.0 * d)


def nelson_exponent(t: ArrayLike, p: float, d: float) -> NDArray[np.float64] | float:
    """p(t) = 1 + (p-1) e^{2dt}."""
    value = 1.0 + (p - 1) * np.exp(2.0 * d * np.asarray(t, dtype=np.float64))
    return float(value) if np.ndim(value) == 0 else value


def hypercontractivity_run(
    u: NodalFn, p: float, d: float, basis: Basis | None = None
) -> HyperReport:
    """Compare ||e^{t* L} u||_2 with ||u||_p and ||u||_{2/p}."""
    _check_hyper(u, p, d)
    basis = basis_for(u.rule) if basis is None else basis
    t_star = hypercontractive_time(p, d)
    a = to_spectral(u, basis)
    evolved = heat_semigroup(a, t_star, basis)
    lhs = math.sqrt(evolved.norm2_squared())
    lhs_quadrature = norm(to_nodal(evolved, basis), 2)
    rhs_p = norm(u, p)
    return HyperReport(
        p=p,
        d=d,
        t_star=t_star,
        lhs=lhs,
        lhs_quadrature=lhs_quadrature,
        rhs_p=rhs_p,
        rhs_2overp=norm(u, 2.0 / p),
        spectral_identity_error=abs(lhs - lhs_quadrature),
        holds=lhs <= rhs_p + CHAIN_SLACK,
    )


def beckner_chain_check(
    u: NodalFn, p: float, d: float, basis: Basis | None = None
) -> BecknerChainReport:
    """Check (||u||_p^2 - ||u||_2^2)/(p-2) <= (||u||_2^2 - ||f(t*)||_2^2)/(2-p) <= (1/d) int |u'|^2 nu."""
    _check_hyper(u, p, d)
    basis = basis_for(u.rule) if basis is None else basis
    t_star = hypercontractive_time(p, d)
    a = to_spectral(u, basis).coeffs
    lam = basis.eigenvalues
    left = norm_gap(u, p) / (p - 2)
    middle = float(np.sum(a[1:] ** 2 * -np.expm1(-2 * lam[1:] * t_star))) / (2 - p)
    right = float(np.sum(lam * a**2)) / d
    first = left <= middle + CHAIN_SLACK
    second = middle <= right + CHAIN_SLACK
    return BecknerChainReport(
        p=p,
        d=d,
        t_star=t_star,
        left=left,
        middle=middle,
        right=right,
        first_link=first,
        second_link=second,
        holds=first and second,
    )


def gross_monotonicity_check(
    u: NodalFn,
    p: float,
    d: float,
    t_grid: ArrayLike | None = None,
    basis: Basis | None = None,
) -> GrossReport:
    """Check t -> ||e^{tL} u||_{p(t)} is nonincreasing on [0, t*].

    At each sample the log-Sobolev bracket Ent(v) - (2/d) int |v'|^2 nu with
    v = |f|^{p(t)/2} is also recorded; it must be <= 0.
    """
    _check_hyper(u, p, d)
    require_positive(u, "u")
    basis = basis_for(u.rule) if basis is None else basis
    t_star = hypercontractive_time(p, d)
    if t_grid is None:
        times = np.linspace(0.0, t_star, 21)
    else:
        grid = _check_grid(t_grid)
        times = np.append(grid[grid < t_star], t_star)

    a = to_spectral(u, basis)
    exponents = nelson_exponent(times, p, d)
    norms, brackets = [], []
    for t, q in zip(times, exponents):
        f = to_nodal(heat_semigroup(a, float(t), basis), basis)
        norms.append(norm(f, float(q)))
        v = f.power(q / 2)
        brackets.append(entropy(v) - 2.0 / d * dirichlet_form(v, basis))

    monotone = all(b <= a_ + CHAIN_SLACK for a_, b in zip(norms, norms[1:]))
    bracket_max = max(brackets)
    return GrossReport(
        p=p,
        d=d,
        t_star=t_star,
        times=times.tolist(),
        exponents=np.asarray(exponents).tolist(),
        norms=norms,
        brackets=brackets,
        monotone=monotone,
        bracket_max=bracket_max,
        holds=monotone and bracket_max <= CHAIN_SLACK,
    )

