"""Exact level-probability calculus under ideal sign readout.

One compare-and-replace between registers with level distributions P and P'
leaves the target holding level a with probability

    P(a) + P'(a) - P(a) S'(a) - P'(a) S(a) + P(a) P'(a)

where S, S' are inclusive prefix sums; equivalently the output prefix sum is
1 - (1 - S)(1 - S'). Feeding every stage its own output gives, after p
doubling stages started from the uniform superposition,
S(a, p) = 1 - (1 - S(a, 0))^(2^p).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import EnergySpectrum
from .errors import ValidationError

MAX_DEPTH = 62  # 2^p exponent guard; values saturate long before

SUM_TOL = 1e-12


@dataclass(frozen=True)
class LevelDistribution:
    """Probability vector over energy levels; m counts applied stages (0 = uniform input)."""

    probs: np.ndarray
    m: int = 0

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise ValidationError("level distribution must be a nonempty vector")
        if np.any(arr < -SUM_TOL):
            raise ValidationError("negative probability entry")
        if abs(float(arr.sum()) - 1.0) > max(SUM_TOL, 4e-16 * arr.shape[0]):
            raise ValidationError(f"probabilities sum to {arr.sum()!r}, not 1")
        arr = np.clip(arr, 0.0, None)
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)

    @property
    def num_levels(self) -> int:
        return int(self.probs.shape[0])

    def prefix(self) -> np.ndarray:
        """Inclusive prefix sums S(a)."""
        return np.cumsum(self.probs)


def initial_distribution(spec: EnergySpectrum) -> LevelDistribution:
    """Level distribution of the uniform superposition: degeneracy / 2^n."""
    return LevelDistribution(spec.degeneracies / float(spec.total_states), m=0)


def cnr_combine(target: LevelDistribution, support: LevelDistribution) -> LevelDistribution:
    """Target-register level distribution after one ideal compare-and-replace."""
    if target.num_levels != support.num_levels:
        raise ValidationError("distributions cover different level counts")
    s_out = 1.0 - (1.0 - target.prefix()) * (1.0 - support.prefix())
    probs = np.diff(s_out, prepend=0.0)
    return LevelDistribution(probs, m=max(target.m, support.m) + 1)


def step(dist: LevelDistribution) -> LevelDistribution:
    """One stage with identical target and support inputs."""
    return cnr_combine(dist, dist)


def distribution_at(spec: EnergySpectrum, p: int) -> LevelDistribution:
    """Closed-form distribution after p stages from the uniform superposition."""
    if p < 0:
        raise ValidationError(f"need p >= 0, got {p}")
    if p > MAX_DEPTH:
        raise ValidationError(f"p={p} exceeds the exponent guard {MAX_DEPTH}")
    s_p = 1.0 - tail_at(spec, p)
    probs = np.diff(s_p, prepend=0.0)
    return LevelDistribution(probs, m=p)


def tail_at(spec: EnergySpectrum, p: int) -> np.ndarray:
    """Complements 1 - S(a, p), evaluated stably as exp(2^p log1p(-S(a, 0)))."""
    if p < 0 or p > MAX_DEPTH:
        raise ValidationError(f"p={p} outside 0 .. {MAX_DEPTH}")
    s_0 = np.cumsum(spec.degeneracies / float(spec.total_states))
    with np.errstate(divide="ignore"):
        log_tail = np.log1p(-np.minimum(s_0, 1.0))
    return np.exp(float(2**p) * log_tail)
