import numpy as np
import pytest

from cnropt import (
    LevelDistribution,
    cnr_combine,
    distribution_at,
    enumerate_spectrum,
    gen_gaussian,
    initial_distribution,
    step,
)
from cnropt.cost import EnergySpectrum
from cnropt.errors import ValidationError
from cnropt.recursion import tail_at


def synthetic_spectrum(degeneracies, n):
    deg = np.asarray(degeneracies, dtype=np.int64)
    assert deg.sum() == 2**n
    return EnergySpectrum(
        energies=np.arange(len(deg), dtype=np.float64),
        degeneracies=deg,
        n=n,
        group_tol=1e-9,
    )


def random_distribution(rng, size):
    raw = rng.random(size)
    return LevelDistribution(raw / raw.sum())


def test_initial_distribution():
    two = synthetic_spectrum([1, 1], 1)
    assert initial_distribution(two).probs.tolist() == [0.5, 0.5]


def test_initial_distribution_triangle(triangle):
    spec = enumerate_spectrum(triangle)
    dist = initial_distribution(spec)
    assert dist.probs.tolist() == [0.75, 0.25]
    assert dist.m == 0 and abs(dist.probs.sum() - 1.0) < 1e-15


def test_combine_point_masses():
    better_target = cnr_combine(LevelDistribution([1.0, 0.0]), LevelDistribution([0.0, 1.0]))
    assert better_target.probs.tolist() == [1.0, 0.0]
    replaced = cnr_combine(LevelDistribution([0.0, 1.0]), LevelDistribution([1.0, 0.0]))
    assert replaced.probs.tolist() == [1.0, 0.0]


def test_combine_uniform_pair():
    out = cnr_combine(LevelDistribution([0.5, 0.5]), LevelDistribution([0.5, 0.5]))
    assert out.probs.tolist() == [0.75, 0.25]


def test_combine_matches_explicit_formula():
    # direct transcription of the five-term rule, as an independent check
    rng = np.random.default_rng(10)
    for _ in range(50):
        size = int(rng.integers(2, 9))
        t, s = random_distribution(rng, size), random_distribution(rng, size)
        expected = (
            t.probs
            + s.probs
            - t.probs * np.cumsum(s.probs)
            - s.probs * np.cumsum(t.probs)
            + t.probs * s.probs
        )
        assert np.max(np.abs(cnr_combine(t, s).probs - expected)) < 1e-14


def test_combine_is_symmetric_and_valid():
    rng = np.random.default_rng(11)
    for _ in range(50):
        size = int(rng.integers(2, 12))
        t, s = random_distribution(rng, size), random_distribution(rng, size)
        a, b = cnr_combine(t, s), cnr_combine(s, t)
        assert np.array_equal(a.probs, b.probs)
        assert np.all(a.probs >= 0)
        assert abs(a.probs.sum() - 1.0) < 1e-12


def test_combine_with_ground_point_support():
    rng = np.random.default_rng(12)
    t = random_distribution(rng, 6)
    ground = np.zeros(6)
    ground[0] = 1.0
    out = cnr_combine(t, LevelDistribution(ground))
    assert np.allclose(out.probs, ground, atol=1e-15)


def test_step_prefix_identity_and_fixed_point():
    rng = np.random.default_rng(13)
    for _ in range(30):
        d = random_distribution(rng, int(rng.integers(2, 10)))
        s_in = d.prefix()
        expected = 1.0 - (1.0 - s_in) * (1.0 - s_in)
        assert np.array_equal(step(d).prefix(), expected)
    point = LevelDistribution([1.0, 0.0, 0.0])
    assert step(point).probs.tolist() == [1.0, 0.0, 0.0]
    assert step(point).m == 1


def test_step_monotone_dominance():
    rng = np.random.default_rng(14)
    for _ in range(30):
        d = random_distribution(rng, int(rng.integers(2, 10)))
        s_in, s_out = d.prefix(), step(d).prefix()
        assert np.all(s_out >= s_in - 1e-15)
        interior = (s_in > 1e-12) & (s_in < 1.0 - 1e-12)
        assert np.all(s_out[interior] > s_in[interior])


def test_closed_form_matches_iteration():
    rng = np.random.default_rng(15)
    for n in (4, 5, 6):
        spec = enumerate_spectrum(gen_gaussian(n, int(rng.integers(0, 2**32))))
        for p in (0, 1, 3, 7, 20):
            closed = distribution_at(spec, p)
            iterated = initial_distribution(spec)
            for _ in range(p):
                iterated = step(iterated)
            assert np.max(np.abs(closed.probs - iterated.probs)) < 1e-12
            assert closed.m == p


def test_closed_form_table_values():
    gauss_like = synthetic_spectrum([58, 1024 - 58], 10)
    assert round(float(distribution_at(gauss_like, 4).prefix()[0]), 4) == 0.6066
    xor_like = synthetic_spectrum([144, 1024 - 144], 10)
    assert round(float(distribution_at(xor_like, 5).prefix()[0]), 4) == 0.9922


def test_tail_complement_is_stable():
    spec = synthetic_spectrum([58, 1024 - 58], 10)
    tail = tail_at(spec, 7)
    assert abs(tail[0] - 5.736905964621252e-04) < 1e-12
    # saturation regime: complement underflows gracefully, never negative
    deep = tail_at(spec, 40)
    assert deep[0] == 0.0


def test_distribution_at_guards():
    spec = synthetic_spectrum([1, 1], 1)
    with pytest.raises(ValidationError):
        distribution_at(spec, -1)
    with pytest.raises(ValidationError):
        distribution_at(spec, 63)
    assert distribution_at(spec, 0).probs.tolist() == [0.5, 0.5]


def test_level_distribution_validation():
    with pytest.raises(ValidationError):
        LevelDistribution([0.5, 0.4])
    with pytest.raises(ValidationError):
        LevelDistribution([1.2, -0.2])
    with pytest.raises(ValidationError):
        cnr_combine(LevelDistribution([1.0]), LevelDistribution([0.5, 0.5]))
