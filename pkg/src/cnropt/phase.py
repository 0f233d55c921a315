"""Closed-form model of the phase-estimation comparison readout.

A cost difference is encoded as the phase fraction
delta = (C(z_s) - C(z_t)) / (2 pi M), read out into t ancilla bits
x = x_1 x_2 ... x_t with x_1 most significant and D(x) its integer value.
The readout amplitude is

    phi(x; delta) = (1/2^t) (1 - e^{i 2 pi (2^t delta - D)}) / (1 - e^{i 2 pi (delta - D/2^t)})

with the removable singularity phi = 1 at the exactly representable bin.
The first ancilla bit reports the sign: bins D >= 2^(t-1) mean the support
register held the better (lower-cost) string.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

EXACT_BIN_TOL = 1e-12  # integer-detection tolerance on 2^t delta - D


@dataclass(frozen=True)
class CnrConfig:
    """Ancilla width t, scale divisor M, and accuracy threshold b on |delta|."""

    t: int
    scale: float
    accuracy: float

    def __post_init__(self):
        if self.t < 2:
            raise ValidationError(f"ancilla width must be >= 2, got t={self.t}")
        if not self.scale > 0:
            raise ValidationError("scale factor must be positive")
        if not self.accuracy > 0:
            raise ValidationError("accuracy must be positive")

    def min_scale(self, c_min: float, c_max: float) -> float:
        return (c_max - c_min) / (2.0 * math.pi)

    def require_valid_for(self, c_min: float, c_max: float) -> None:
        """Enforce the lower bound M >= (C_max - C_min) / (2 pi)."""
        bound = self.min_scale(c_min, c_max)
        if self.scale < bound * (1.0 - 1e-12):
            raise ValidationError(
                f"scale factor {self.scale:.6g} below the admissible bound {bound:.6g}"
            )


@dataclass(frozen=True)
class PhaseFraction:
    """A scaled cost difference, constrained to [-1/2, 1/2)."""

    value: float

    def __post_init__(self):
        if not (-0.5 <= self.value < 0.5):
            raise ValidationError(f"phase fraction {self.value} outside [-1/2, 1/2)")


def delta_of(config: CnrConfig, c_t: float, c_s: float) -> PhaseFraction:
    """Phase fraction of a cost pair; positive means the target is at least as good."""
    raw = (c_s - c_t) / (2.0 * math.pi * config.scale)
    if not (-0.5 <= raw < 0.5):
        raise ValidationError(
            f"cost difference {c_s - c_t:.6g} maps to phase fraction {raw:.6g}; scale factor too small"
        )
    return PhaseFraction(raw)


def wrap_fraction(raw: float | np.ndarray) -> float | np.ndarray:
    """Reduce a raw phase fraction mod 1 into [-1/2, 1/2).

    This is the aliasing the physical phase actually undergoes; use it when
    modelling configurations whose extreme cost pairs overflow the range.
    """
    wrapped = raw - np.round(raw)
    return np.where(wrapped >= 0.5, wrapped - 1.0, wrapped) if isinstance(wrapped, np.ndarray) else (
        wrapped - 1.0 if wrapped >= 0.5 else wrapped
    )


def _as_value(delta: PhaseFraction | float) -> float:
    if isinstance(delta, PhaseFraction):
        return delta.value
    return PhaseFraction(float(delta)).value


def _sin_pi(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """sin(pi y) evaluated stably near integers; returns (value, wrapped distance)."""
    nearest = np.round(y)
    frac = y - nearest
    sign = np.where((nearest.astype(np.int64) & 1) == 0, 1.0, -1.0)
    return sign * np.sin(np.pi * frac), frac


def amplitudes(delta: PhaseFraction | float, t: int) -> np.ndarray:
    """Readout amplitude phi(x; delta) for every bin D(x) = 0 .. 2^t - 1."""
    dv = _as_value(delta)
    size = 1 << t
    d = np.arange(size, dtype=np.float64)
    num_arg = (size * dv) - d
    den_arg = dv - d / size
    sin_num, _ = _sin_pi(num_arg)
    sin_den, den_frac = _sin_pi(den_arg)
    exact = np.abs(den_frac) * size <= EXACT_BIN_TOL  # 2^t delta - D integer multiple of 2^t
    out = np.empty(size, dtype=np.complex128)
    if np.any(exact):
        out[:] = 0.0
        out[exact] = 1.0
        return out
    ratio = sin_num / (size * sin_den)
    out[:] = ratio * np.exp(1j * np.pi * (num_arg - den_arg))
    return out


def probabilities(delta: PhaseFraction | float, t: int) -> np.ndarray:
    """Readout probability of every bin, via the closed cosine form."""
    dv = _as_value(delta)
    size = 1 << t
    d = np.arange(size, dtype=np.float64)
    sin_num, _ = _sin_pi(size * dv - d)
    sin_den, den_frac = _sin_pi(dv - d / size)
    exact = np.abs(den_frac) * size <= EXACT_BIN_TOL
    if np.any(exact):
        out = np.zeros(size)
        out[exact] = 1.0
        return out
    ratio = sin_num / (size * sin_den)
    return ratio * ratio


def _bin_index(x: str | int, t: int) -> int:
    if isinstance(x, str):
        if len(x) != t or any(c not in "01" for c in x):
            raise ValidationError(f"expected a {t}-bit string, got {x!r}")
        return int(x, 2)
    if not (0 <= x < (1 << t)):
        raise ValidationError(f"bin {x} outside 0 .. 2^{t} - 1")
    return int(x)


def ancilla_amplitude(x: str | int, delta: PhaseFraction | float, t: int) -> complex:
    """Amplitude of one readout bin; x may be a t-bit string or its value D(x)."""
    return complex(amplitudes(delta, t)[_bin_index(x, t)])


def ancilla_probability(x: str | int, delta: PhaseFraction | float, t: int) -> float:
    return float(probabilities(delta, t)[_bin_index(x, t)])


def peak_bin(delta: PhaseFraction | float, t: int) -> int:
    """Bin carrying the readout peak: round(2^t delta) taken mod 2^t."""
    return int(round((1 << t) * _as_value(delta))) % (1 << t)


def sign_error_prob(delta: PhaseFraction | float, t: int) -> float:
    """Probability that the first ancilla bit misreports the sign of delta."""
    dv = _as_value(delta)
    pr = probabilities(dv, t)
    half = 1 << (t - 1)
    return float(pr[half:].sum()) if dv >= 0 else float(pr[:half].sum())


def choose_t(b: float, guard: int = 2) -> int:
    """Smallest ancilla width resolving |delta| = b, plus guard bits."""
    if not (0.0 < b < 0.5):
        raise ValidationError(f"accuracy must lie in (0, 1/2), got {b}")
    return math.ceil(math.log2(1.0 / b)) + guard
