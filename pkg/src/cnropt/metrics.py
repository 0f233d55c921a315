"""Approximation-quality measures, probability bounds, and scalability lines.

The ground-level neighborhood of width beta is the first beta + 1 levels;
A_beta counts the basis states inside it. The cumulative probability after p
stages has the closed form 1 - (1 - A_beta / 2^n)^(2^p) with the lower bound
1 - exp(-2^p A_beta / 2^n). Level-indexed energy curves are certified by two
affine upper bounds: the critical line through the steepest secant from
(1, E_1), and the admissible line whose endpoint pins the worst relative
error to a chosen eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cost import EnergySpectrum
from .errors import ValidationError
from .recursion import distribution_at

LINE_TOL = 1e-9  # relative slack for upper-bound line assertions


@dataclass(frozen=True)
class AffineLine:
    """Level-indexed line a -> value_at_1 + slope * (a - 1)."""

    value_at_1: float
    slope: float

    def __call__(self, a):
        return self.value_at_1 + self.slope * (np.asarray(a, dtype=np.float64) - 1.0)


@dataclass(frozen=True)
class BoundLines:
    """Critical and (optional) admissible upper-bound lines over the energy curve."""

    a_tilde: int
    critical_slope: float
    e_critical: AffineLine
    e_bound: AffineLine | None = None
    beta_max: int | None = None


@dataclass(frozen=True)
class NeighborhoodReport:
    """Summary of the ground-level neighborhood after p stages."""

    beta: int
    a_beta: int
    cum_prob: float
    lower_bound: float
    avg_rel_error: float
    worst_case_cond: float
    p: int


def relative_error(spec: EnergySpectrum, a: int) -> float:
    """Scale-free optimality gap (E_a - E_1) / (E_G - E_1) of level a."""
    if spec.num_levels < 2 or spec.c_max <= spec.c_min:
        raise ValidationError("relative error undefined for a constant cost function")
    if not (1 <= a <= spec.num_levels):
        raise ValidationError(f"level {a} outside 1 .. {spec.num_levels}")
    return (float(spec.energies[a - 1]) - spec.c_min) / (spec.c_max - spec.c_min)


def relative_errors(spec: EnergySpectrum) -> np.ndarray:
    if spec.num_levels < 2 or spec.c_max <= spec.c_min:
        raise ValidationError("relative error undefined for a constant cost function")
    return (spec.energies - spec.c_min) / (spec.c_max - spec.c_min)


def a_beta_of(spec: EnergySpectrum, beta: int) -> int:
    if not (0 <= beta <= spec.num_levels - 1):
        raise ValidationError(f"beta {beta} outside 0 .. {spec.num_levels - 1}")
    return int(spec.prefix_counts[beta])


def cumulative_prob_counts(n: int, a_beta: int, p: int) -> float:
    """Closed form 1 - (1 - A_beta / 2^n)^(2^p)."""
    return 1.0 - cumulative_complement_counts(n, a_beta, p)


def cumulative_complement_counts(n: int, a_beta: int, p: int) -> float:
    """The complement (1 - A_beta / 2^n)^(2^p), evaluated stably."""
    if a_beta < 0 or a_beta > 2**n:
        raise ValidationError(f"A_beta {a_beta} outside 0 .. 2^{n}")
    if p < 0:
        raise ValidationError(f"need p >= 0, got {p}")
    frac = a_beta / float(2**n)
    if frac >= 1.0:
        return 0.0
    return math.exp(float(2**p) * math.log1p(-frac))


def cumulative_prob(spec: EnergySpectrum, beta: int, p: int) -> float:
    return cumulative_prob_counts(spec.n, a_beta_of(spec, beta), p)


def cumulative_lower_bound(n: int, a_beta: int, p: int) -> float:
    """1 - exp(-2^p A_beta / 2^n); never exceeds the closed form."""
    if a_beta < 1:
        raise ValidationError(f"need A_beta >= 1, got {a_beta}")
    return 1.0 - math.exp(-float(2**p) * a_beta / float(2**n))


def min_p_for(eta: float, n: int, a_beta: int) -> int:
    """Smallest p with 1 - exp(-2^p A_beta / 2^n) >= eta, floored at 0."""
    if not (0.0 < eta < 1.0):
        raise ValidationError(f"acceptance probability must lie in (0, 1), got {eta}")
    if a_beta < 1:
        raise ValidationError(f"need A_beta >= 1, got {a_beta}")
    value = (2**n / float(a_beta)) * math.log(1.0 / (1.0 - eta))
    return max(0, math.ceil(math.log2(value)))


def avg_relative_error(spec: EnergySpectrum, beta: int, p: int) -> float:
    """Probability-weighted relative error over the neighborhood, renormalized."""
    a_beta_of(spec, beta)  # range check
    probs = distribution_at(spec, p).probs[: beta + 1]
    mass = float(probs.sum())
    if mass <= 0.0:
        raise ValidationError("neighborhood carries zero probability")
    if beta == 0:
        return 0.0
    alphas = relative_errors(spec)[: beta + 1]
    return float((probs * alphas).sum()) / mass


def worst_case_conditional(spec: EnergySpectrum, beta: int, p: int) -> float:
    """Share of the neighborhood mass sitting on its worst level beta + 1."""
    a_beta_of(spec, beta)
    probs = distribution_at(spec, p).probs[: beta + 1]
    mass = float(probs.sum())
    if mass <= 0.0:
        raise ValidationError("neighborhood carries zero probability")
    return float(probs[beta]) / mass


def critical_line(spec: EnergySpectrum) -> BoundLines:
    """Steepest secant from (1, E_1): the lowest affine upper bound through it."""
    if spec.num_levels < 2:
        raise ValidationError("critical line undefined for a single-level spectrum")
    gaps = spec.energies[1:] - spec.energies[0]
    slopes = gaps / np.arange(1, spec.num_levels, dtype=np.float64)
    idx = int(np.argmax(slopes))  # ties resolve toward the smallest level
    a_tilde = idx + 2
    line = AffineLine(spec.c_min, float(slopes[idx]))
    margin = LINE_TOL * max(1.0, spec.c_max - spec.c_min)
    if np.any(line(np.arange(1, spec.num_levels + 1)) < spec.energies - margin):
        raise ValidationError("critical line fell below the energy curve")
    return BoundLines(a_tilde=a_tilde, critical_slope=float(slopes[idx]), e_critical=line)


def beta_upper_bound(spec: EnergySpectrum, eps_r: float) -> int:
    """Widest admissible neighborhood certified by an affine bound at worst error eps_r."""
    if not (0.0 < eps_r <= 1.0):
        raise ValidationError(f"worst relative error bound must lie in (0, 1], got {eps_r}")
    lines = critical_line(spec)
    value = eps_r * (spec.c_max - spec.c_min) / lines.critical_slope
    return max(0, math.floor(value))


def bound_line(spec: EnergySpectrum, eps_r: float, beta: int) -> AffineLine:
    """Admissible line hitting worst relative error exactly eps_r at level beta + 1."""
    limit = beta_upper_bound(spec, eps_r)
    if not (1 <= beta <= limit):
        raise ValidationError(
            f"beta {beta} outside 1 .. {limit}; a wider line would cross below the critical line"
        )
    return AffineLine(spec.c_min, eps_r * (spec.c_max - spec.c_min) / beta)


def bound_lines(spec: EnergySpectrum, eps_r: float) -> BoundLines:
    """Critical line plus the admissible line at the maximal certified width."""
    lines = critical_line(spec)
    beta_max = beta_upper_bound(spec, eps_r)
    e_bound = bound_line(spec, eps_r, beta_max) if beta_max >= 1 else None
    return BoundLines(
        a_tilde=lines.a_tilde,
        critical_slope=lines.critical_slope,
        e_critical=lines.e_critical,
        e_bound=e_bound,
        beta_max=beta_max,
    )


def neighborhood_report(spec: EnergySpectrum, beta: int, p: int) -> NeighborhoodReport:
    a_beta = a_beta_of(spec, beta)
    return NeighborhoodReport(
        beta=beta,
        a_beta=a_beta,
        cum_prob=cumulative_prob(spec, beta, p),
        lower_bound=cumulative_lower_bound(spec.n, a_beta, p),
        avg_rel_error=avg_relative_error(spec, beta, p),
        worst_case_cond=worst_case_conditional(spec, beta, p),
        p=p,
    )
