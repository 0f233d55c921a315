import numpy as np
import pytest

from cnropt import Family, GeneratorSpec, gen_gaussian, gen_max2xor, generate
from cnropt.cost import all_energies, save_instance
from cnropt.errors import ValidationError


def test_gaussian_term_count_and_order():
    inst = gen_gaussian(4, 0)
    assert len(inst.terms) == 6
    pairs = [(i, j) for i, j, _ in inst.terms]
    assert pairs == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def test_gaussian_determinism(tmp_path):
    a = gen_gaussian(6, 42)
    b = gen_gaussian(6, 42)
    assert a == b
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    save_instance(a, pa)
    save_instance(b, pb)
    assert pa.read_bytes() == pb.read_bytes()
    assert gen_gaussian(6, 43) != a


def test_gaussian_mean_within_sampling_error():
    weights = []
    for seed in range(10):
        weights.extend(w for _, _, w in gen_gaussian(10, seed).terms)
    assert len(weights) == 450
    assert abs(np.mean(weights)) <= 3.0 / np.sqrt(450)


def test_max2xor_density_extremes():
    full = gen_max2xor(3, 1.0, 7)
    assert len(full.terms) == 3
    assert all(w == 1.0 for _, _, w in full.terms)
    assert gen_max2xor(3, 0.0, 7).terms == ()


def test_max2xor_determinism():
    assert gen_max2xor(8, 0.6, 5) == gen_max2xor(8, 0.6, 5)


def test_max2xor_energy_gap_at_least_two():
    inst = gen_max2xor(10, 0.6, 3)
    energies = np.unique(all_energies(inst))
    assert np.allclose(energies, np.round(energies))
    parities = set(int(e) % 2 for e in energies)
    assert len(parities) == 1
    assert np.min(np.diff(energies)) >= 2.0


def test_generate_dispatch():
    spec = GeneratorSpec(Family.MAX_2_XOR, 5, seed=9, density=0.5)
    assert generate(spec) == gen_max2xor(5, 0.5, 9)
    spec = GeneratorSpec(Family.GAUSSIAN_2EDGE, 5, seed=9)
    assert generate(spec) == gen_gaussian(5, 9)


def test_labels_record_parameters():
    assert "seed=11" in gen_gaussian(4, 11).label
    inst = gen_max2xor(4, 0.25, 2)
    assert "density=0.25" in inst.label and "seed=2" in inst.label


def test_generator_spec_validation():
    with pytest.raises(ValidationError):
        GeneratorSpec(Family.MAX_2_XOR, 4, seed=1)  # density required
    with pytest.raises(ValidationError):
        GeneratorSpec(Family.MAX_2_XOR, 4, seed=1, density=1.5)
    with pytest.raises(ValidationError):
        GeneratorSpec(Family.GAUSSIAN_2EDGE, 4, seed=1, density=0.5)
    with pytest.raises(ValidationError):
        GeneratorSpec(Family.GAUSSIAN_2EDGE, 1, seed=1)
