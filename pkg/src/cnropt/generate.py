"""Seeded random instance families: Gaussian couplings and MAX-2-XOR.

Randomness is pinned to numpy's PCG64 bit generator; Gaussian weights use
``Generator.standard_normal`` (ziggurat). Pairs are always visited in
lexicographic order, so the seed alone determines the instance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .cost import ProblemInstance
from .errors import ValidationError


class Family(enum.Enum):
    GAUSSIAN_2EDGE = "gaussian"
    MAX_2_XOR = "max2xor"


@dataclass(frozen=True)
class GeneratorSpec:
    family: Family
    n: int
    seed: int
    density: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"need n >= 2, got n={self.n}")
        if self.family is Family.MAX_2_XOR:
            if self.density is None or not (0.0 <= self.density <= 1.0):
                raise ValidationError("MAX-2-XOR requires a density in [0, 1]")
        elif self.density is not None:
            raise ValidationError("density only applies to MAX-2-XOR")


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]


def gen_gaussian(n: int, seed: int) -> ProblemInstance:
    """One standard-normal coefficient per pair {i, j}, i < j."""
    spec = GeneratorSpec(Family.GAUSSIAN_2EDGE, n, seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = _pairs(n)
    weights = rng.standard_normal(len(pairs))
    terms = tuple((i, j, float(w)) for (i, j), w in zip(pairs, weights))
    return ProblemInstance(n=n, terms=terms, label=_label(spec), seed=seed)


def gen_max2xor(n: int, density: float, seed: int) -> ProblemInstance:
    """Each pair carries weight 1 with the given probability, else no term."""
    spec = GeneratorSpec(Family.MAX_2_XOR, n, seed, density)
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = _pairs(n)
    u = rng.random(len(pairs))
    terms = tuple((i, j, 1.0) for (i, j), keep in zip(pairs, u < density) if keep)
    return ProblemInstance(n=n, terms=terms, label=_label(spec), seed=seed)


def generate(spec: GeneratorSpec) -> ProblemInstance:
    if spec.family is Family.GAUSSIAN_2EDGE:
        return gen_gaussian(spec.n, spec.seed)
    return gen_max2xor(spec.n, spec.density, spec.seed)


def _label(spec: GeneratorSpec) -> str:
    if spec.family is Family.MAX_2_XOR:
        return f"max2xor n={spec.n} density={spec.density} seed={spec.seed}"
    return f"gaussian-2edge n={spec.n} seed={spec.seed}"
