"""2-local cost functions on bit strings and their exact energy spectra.

Conventions: bit strings are written z_1 z_2 ... z_n with z_1 first; the
integer code of a string has z_1 as its most significant bit. Spins follow
the usual Z-eigenbasis map s = 1 - 2z (z = 0 means spin +1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backend as _backend
from .errors import ConsistencyError, ResourceError, ValidationError

ENUMERATION_LIMIT = 26  # hard guard: 2^n energies held in memory
MEMBER_LIMIT = 20  # above this, per-level member lists are dropped
DEFAULT_GROUP_TOL = 1e-9  # relative tolerance when grouping energies into levels


@dataclass(frozen=True)
class ProblemInstance:
    """A cost function C(z) = sum_k w_k s_i s_j over 1-based index pairs i < j."""

    n: int
    terms: tuple[tuple[int, int, float], ...]
    label: str = ""
    seed: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"need n >= 2, got n={self.n}")
        norm = tuple((int(i), int(j), float(w)) for i, j, w in self.terms)
        object.__setattr__(self, "terms", norm)
        seen = set()
        for i, j, _ in norm:
            if not (1 <= i < j <= self.n):
                raise ValidationError(f"term ({i},{j}) out of range for n={self.n}")
            if (i, j) in seen:
                raise ValidationError(f"duplicate term ({i},{j})")
            seen.add((i, j))

    def term_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Kernel-ready arrays: bit positions (z_1 = MSB) and weights."""
        bit_i = np.array([self.n - i for i, _, _ in self.terms], dtype=np.int64)
        bit_j = np.array([self.n - j for _, j, _ in self.terms], dtype=np.int64)
        weights = np.array([w for _, _, w in self.terms], dtype=np.float64)
        return bit_i, bit_j, weights


def code_of(z: str, n: int) -> int:
    """Integer code of a bit string, z_1 as most significant bit."""
    if len(z) != n or any(c not in "01" for c in z):
        raise ValidationError(f"expected a {n}-character bit string, got {z!r}")
    return int(z, 2) if z else 0


def string_of(code: int, n: int) -> str:
    return format(code, f"0{n}b")


def evaluate(inst: ProblemInstance, z: str) -> float:
    """Cost of one bit string; adds terms in declaration order."""
    return evaluate_code(inst, code_of(z, inst.n))


def evaluate_code(inst: ProblemInstance, code: int) -> float:
    acc = 0.0
    n = inst.n
    for i, j, w in inst.terms:
        anti = ((code >> (n - i)) ^ (code >> (n - j))) & 1
        acc += -w if anti else w
    return acc


def all_energies(inst: ProblemInstance) -> np.ndarray:
    """Energy of every code 0 .. 2^n - 1; guarded at n <= ENUMERATION_LIMIT."""
    if inst.n > ENUMERATION_LIMIT:
        raise ResourceError(f"enumeration over 2^{inst.n} states exceeds the n <= {ENUMERATION_LIMIT} guard")
    bit_i, bit_j, weights = inst.term_arrays()
    return _backend.kernels.all_energies(inst.n, bit_i, bit_j, weights)


@dataclass
class EnergySpectrum:
    """Distinct energies in ascending order with their degeneracies.

    ``members[a]`` (0-based level index) holds the codes attaining level a+1
    and ``code_levels[code]`` the 0-based level of each code; both are kept
    only up to MEMBER_LIMIT qubits. Treat instances as immutable.
    """

    energies: np.ndarray
    degeneracies: np.ndarray
    n: int
    group_tol: float
    members: list[np.ndarray] | None = None
    code_levels: np.ndarray | None = field(default=None, repr=False)

    @property
    def num_levels(self) -> int:
        return int(self.energies.shape[0])

    @property
    def total_states(self) -> int:
        return 1 << self.n

    @property
    def c_min(self) -> float:
        return float(self.energies[0])

    @property
    def c_max(self) -> float:
        return float(self.energies[-1])

    @property
    def prefix_counts(self) -> np.ndarray:
        """Cumulative state counts; entry beta is the size of the first beta+1 levels."""
        return np.cumsum(self.degeneracies)

    def validate(self) -> None:
        if np.any(np.diff(self.energies) <= 0):
            raise ConsistencyError("level energies not strictly increasing")
        if int(self.degeneracies.sum()) != self.total_states:
            raise ConsistencyError("degeneracies do not partition the basis")

    def level_of_energy(self, value: float) -> int:
        """1-based level whose energy matches within the grouping tolerance."""
        pos = int(np.searchsorted(self.energies, value))
        for cand in (pos - 1, pos):
            if 0 <= cand < self.num_levels and abs(self.energies[cand] - value) <= self.group_tol:
                return cand + 1
        raise ConsistencyError(f"energy {value} matches no level")


def enumerate_spectrum(inst: ProblemInstance, tol: float = DEFAULT_GROUP_TOL) -> EnergySpectrum:
    """Exhaustive spectrum of a small instance, grouping near-equal energies.

    Values are merged when adjacent sorted energies differ by at most
    tol * max(1, C_max - C_min).
    """
    raw = all_energies(inst)
    c_min, c_max = float(raw.min()), float(raw.max())
    threshold = tol * max(1.0, c_max - c_min)
    order = np.argsort(raw, kind="stable")
    sorted_e = raw[order]
    split = np.nonzero(np.diff(sorted_e) > threshold)[0] + 1
    starts = np.r_[0, split]
    stops = np.r_[split, sorted_e.shape[0]]

    energies = np.array([sorted_e[a:b].mean() for a, b in zip(starts, stops)])
    degeneracies = (stops - starts).astype(np.int64)

    members = None
    code_levels = None
    if inst.n <= MEMBER_LIMIT:
        members = [np.sort(order[a:b]) for a, b in zip(starts, stops)]
        code_levels = np.empty(raw.shape[0], dtype=np.int32)
        for lvl, (a, b) in enumerate(zip(starts, stops)):
            code_levels[order[a:b]] = lvl

    spec = EnergySpectrum(
        energies=energies,
        degeneracies=degeneracies,
        n=inst.n,
        group_tol=threshold,
        members=members,
        code_levels=code_levels,
    )
    spec.validate()
    return spec


def level_of(spec: EnergySpectrum, z: str, inst: ProblemInstance | None = None) -> int:
    """1-based level of a bit string; recomputes the energy when members were dropped."""
    code = code_of(z, spec.n)
    if spec.code_levels is not None:
        return int(spec.code_levels[code]) + 1
    if inst is None:
        raise ValidationError("spectrum has no member index; pass the instance to recompute the energy")
    return spec.level_of_energy(evaluate_code(inst, code))


def save_instance(inst: ProblemInstance, path: str | Path) -> None:
    payload = {
        "n": inst.n,
        "terms": [[i, j, w] for i, j, w in inst.terms],
        "label": inst.label,
        "seed": inst.seed,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_instance(path: str | Path) -> ProblemInstance:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return ProblemInstance(
            n=int(payload["n"]),
            terms=tuple((int(i), int(j), float(w)) for i, j, w in payload["terms"]),
            label=str(payload.get("label", "")),
            seed=payload.get("seed"),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed instance file {path}: {exc}") from exc
