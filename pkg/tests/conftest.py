import itertools

import numpy as np
import pytest

from cnropt import ProblemInstance, enumerate_spectrum


@pytest.fixture
def triangle():
    return ProblemInstance(n=3, terms=((1, 2, 1.0), (2, 3, 1.0), (1, 3, 1.0)))


@pytest.fixture
def single_pair():
    """Smallest nontrivial instance: two levels {-1, +1}, each doubly degenerate."""
    return ProblemInstance(n=2, terms=((1, 2, 1.0),))


def brute_force_levels(inst, decimals=9):
    """Independent spectrum oracle: re-evaluate every string from scratch."""
    groups = {}
    for bits in itertools.product((0, 1), repeat=inst.n):
        spins = [1 - 2 * b for b in bits]
        value = sum(w * spins[i - 1] * spins[j - 1] for i, j, w in inst.terms)
        key = round(value, decimals)
        groups[key] = groups.get(key, 0) + 1
    return sorted(groups.items())


def dft_readout_amplitudes(delta, t):
    """Independent readout oracle: explicit phase ramp through the inverse DFT."""
    size = 1 << t
    x = np.arange(size)
    ramp = np.exp(2j * np.pi * x * delta) / np.sqrt(size)
    inverse_dft = np.exp(-2j * np.pi * np.outer(x, x) / size) / np.sqrt(size)
    return inverse_dft @ ramp


def random_integer_instance(rng, n, max_weight):
    """All pairs present, nonzero integer weights in [-max_weight, max_weight]."""
    terms = []
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            w = 0
            while w == 0:
                w = int(rng.integers(-max_weight, max_weight + 1))
            terms.append((i, j, float(w)))
    return ProblemInstance(n=n, terms=tuple(terms))


def spectrum_of(inst):
    return enumerate_spectrum(inst)
