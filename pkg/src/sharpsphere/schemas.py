"""Pydantic records for reports, traces and tables.

These are the serializable outputs of the library. The CLI dumps them as JSON
(flat objects) or CSV rows; numerical types such as QuadratureRule and NodalFn
stay plain dataclasses holding numpy arrays.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


# =============================================================================
# Measure / Spectral Records
# =============================================================================


class QuadratureRuleRecord(BaseModel):
    """JSON view of a Gauss rule for nu_d."""

    d: float = Field(..., description="Dimension")
    n: int = Field(..., description="Number of nodes")
    nodes: list[float] = Field(..., description="Increasing nodes in (-1, 1)")
    weights: list[float] = Field(..., description="Positive weights summing to 1")


class SpectralRecord(BaseModel):
    """JSON view of a function in the orthonormal Gegenbauer basis."""

    d: float = Field(..., description="Dimension")
    coeffs: list[float] = Field(..., description="Coefficients a_0..a_K")


# =============================================================================
# Flow Records
# =============================================================================


class FlowTrace(BaseModel):
    """Time series of entropy, Fisher information and monitors along a flow."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(..., description="Exponent")
    d: float = Field(..., description="Dimension")
    method: Literal["heat", "nonlinear"] = Field(..., description="Integrator used")
    times: list[float] = Field(..., description="Sample times")
    F: list[float] = Field(..., description="Entropy F[g(t)]")
    I: list[float] = Field(..., description="Fisher information I[g(t)]")  # noqa: E741
    mass: list[float] = Field(..., description="Mass int g dnu_d")
    min_g: list[float] = Field(..., description="Nodal minimum of g (positivity monitor)")
    resolved: bool = Field(True, description="Whether every sample passed the tail-energy guard")

    def csv_rows(self) -> list[list[float]]:
        """Rows for the CSV header t,F,I,mass,min_g."""
        return [
            [t, f, i, m, g]
            for t, f, i, m, g in zip(self.times, self.F, self.I, self.mass, self.min_g)
        ]


class DecayReport(BaseModel):
    """Improved decay check for antipodally symmetric data."""

    p: float = Field(..., description="Exponent")
    d: float = Field(..., description="Dimension")
    alpha: float = Field(..., description="Improvement coefficient alpha(p, d)")
    improved_constant: float = Field(..., description="d + alpha (d + 2)")
    slope: float = Field(..., description="Fitted slope of log I on the last half of the trace")
    bound: float = Field(..., description="-2 (d + alpha (d + 2))")
    slope_holds: bool = Field(..., description="slope <= bound + tolerance")
    mean_derivative_max: float = Field(
        ..., description="max over samples of |int f' dnu_{d+2}|"
    )
    mean_moment_max: float = Field(
        ..., description="max over samples of |(d+1) int x f dnu_d|"
    )
    poincare_margin_min: float = Field(
        ...,
        description="min over samples of int|f''|^2 dnu_{d+4} - (d+2) int|f'-mean|^2 dnu_{d+2}",
    )
    holds: bool = Field(..., description="All checks passed")


class HyperReport(BaseModel):
    """Hypercontractivity experiment at the time t* where p(t*) = 2."""

    p: float = Field(..., description="Initial exponent in (1, 2)")
    d: float = Field(..., description="Dimension")
    t_star: float = Field(..., description="log(1/(p-1)) / (2d)")
    lhs: float = Field(..., description="||e^{t* L} u||_2 from the spectral identity")
    lhs_quadrature: float = Field(..., description="Same norm by quadrature")
    rhs_p: float = Field(..., description="||u||_p")
    rhs_2overp: float = Field(..., description="||u||_{2/p}")
    spectral_identity_error: float = Field(..., description="|lhs - lhs_quadrature|")
    holds: bool = Field(..., description="lhs <= rhs_p")


class BecknerChainReport(BaseModel):
    """The two links of the spectral comparison chain at t*."""

    p: float = Field(..., description="Exponent in (1, 2)")
    d: float = Field(..., description="Dimension")
    t_star: float = Field(..., description="Hypercontractive time")
    left: float = Field(..., description="(||u||_p^2 - ||u||_2^2) / (p - 2)")
    middle: float = Field(..., description="(||u||_2^2 - ||f(t*)||_2^2) / (2 - p)")
    right: float = Field(..., description="(1/d) int |u'|^2 nu dnu_d")
    first_link: bool = Field(..., description="left <= middle (with slack)")
    second_link: bool = Field(..., description="middle <= right (with slack)")
    holds: bool = Field(..., description="Both links hold")


class GrossReport(BaseModel):
    """Monotonicity of t -> ||f(t)||_{p(t)} with p(t) = 1 + (p-1) e^{2dt}."""

    p: float = Field(..., description="Initial exponent in (1, 2)")
    d: float = Field(..., description="Dimension")
    t_star: float = Field(..., description="Time where p(t*) = 2")
    times: list[float] = Field(..., description="Sample times in [0, t*]")
    exponents: list[float] = Field(..., description="p(t) at the samples")
    norms: list[float] = Field(..., description="||f(t)||_{p(t)}")
    brackets: list[float] = Field(
        ..., description="Ent(v) - (2/d) int |v'|^2 nu dnu_d with v = |f|^{p(t)/2}"
    )
    monotone: bool = Field(..., description="Norms nonincreasing within tolerance")
    bracket_max: float = Field(..., description="Largest bracket value")
    holds: bool = Field(..., description="Monotone and every bracket <= tolerance")


# =============================================================================
# Certificate / Table Records
# =============================================================================


class FigureRow(BaseModel):
    """One row of the critical exponent curves."""

    d: float = Field(..., description="Dimension")
    two_sharp: float = Field(..., description="(2d^2 + 1) / (d - 1)^2")
    two_star: float | None = Field(None, description="2d / (d - 2), omitted when d <= 2")


class SharpnessRow(BaseModel):
    """Quotient along the perturbation family 1 + eps x."""

    eps: float = Field(..., description="Perturbation amplitude")
    Q: float = Field(..., description="Quotient value")


class SharpnessTable(BaseModel):
    """Perturbation table with its extrapolated eps -> 0 limit."""

    p: float = Field(..., description="Exponent (2 selects the log-Sobolev ratio)")
    d: float = Field(..., description="Dimension")
    rows: list[SharpnessRow] = Field(..., description="Rows in the order of the eps list")
    limit: float = Field(..., description="Richardson limit from the two smallest eps, assuming Q = 1 + C eps^2")


class ConstantsReport(BaseModel):
    """Constants attached to a dimension."""

    d: float = Field(..., description="Dimension")
    Z_d: float = Field(..., description="Normalization of nu_d")
    two_star: float = Field(..., description="Sobolev exponent (inf when d <= 2, null in JSON)")
    two_sharp: float = Field(..., description="Flow threshold exponent (inf when d = 1, null in JSON)")
    eigenvalues: list[float] = Field(..., description="lambda_1..lambda_5")
    alpha_table: dict[str, float] = Field(
        default_factory=dict, description="alpha(p, d) keyed by p"
    )


class CertifyReport(BaseModel):
    """Discriminant certificate plus pointwise h / SOS summary."""

    p: float = Field(..., description="Exponent")
    d: float = Field(..., description="Dimension")
    beta: float = Field(..., description="Exponent of the change of unknown f = u^beta")
    lam: float = Field(..., description="d / ((p-2) beta)")
    a: float = Field(..., description="Coefficient of int |u''|^2 nu^2")
    b: float = Field(..., description="Half coefficient of the mixed term")
    c: float = Field(..., description="Coefficient of int |u'|^4/u^2 nu^2")
    A: float = Field(..., description="Quadratic coefficient of delta(beta)")
    B: float = Field(..., description="Linear coefficient of delta(beta)")
    delta: float = Field(..., description="Reduced discriminant b^2 - ac")
    feasible: bool = Field(..., description="delta < 0")
    best_beta: float | None = Field(None, description="A beta with delta < 0, if any")
    alpha: float = Field(..., description="alpha(p, d)")
    improved_constant: float | None = Field(None, description="d + alpha(d+2) when p <= 2#")
    determinant: float = Field(..., description="Determinant of the pointwise quadratic form")
    h_min: float = Field(..., description="Min of pointwise h over the random corpus")
    h_min_relative: float = Field(..., description="Min over the corpus of min h / max(1, max |h|)")
    sos_error_max: float = Field(..., description="Max of |sos - h| / max(1, |h|) on the corpus")
