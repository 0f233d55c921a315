"""Scale-exact Monte Carlo emulation of the full tournament.

Because compare-and-replace branches with distinct register contents stay
orthogonal, the target-register statistics follow a classical stochastic
process: draw 2^p uniform strings per sample, pair them left-to-right, and
per match either keep the lower-cost string (ideal sign readout) or draw the
full t-bit readout from the phase-estimation law and replace exactly when
its first bit is 1.

Randomness layout (fixed; part of reproducibility): leaf strings come from
PCG64 seeded with SeedSequence([seed, 0]) and readout draws from
SeedSequence([seed, 1]), consumed chunk by chunk with CHUNK_TARGET codes per
chunk. Identical seeds therefore share identical leaves across modes and
ancilla widths, which couples mode comparisons sample-by-sample.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import backend as _backend
from . import metrics, phase
from .cost import EnergySpectrum, ProblemInstance, all_energies
from .errors import ConsistencyError, ResourceError, ValidationError
from .phase import CnrConfig
from .recursion import LevelDistribution, distribution_at

EMULATION_LIMIT = 30  # bit-count guard for drawing leaf strings
CHUNK_TARGET = 1 << 21  # leaf codes processed per chunk
MAX_CDF_CACHE = 1 << 16  # distinct readout tables kept alive per run


class Mode(enum.Enum):
    IDEAL_SIGN = "ideal"
    QPE_SAMPLED = "qpe"


@dataclass(frozen=True)
class EmulatorRun:
    """One emulation request; spectrum omitted means results are keyed by energy."""

    inst: ProblemInstance
    p: int
    samples: int
    seed: int
    mode: Mode = Mode.IDEAL_SIGN
    config: CnrConfig | None = None
    spectrum: EnergySpectrum | None = None
    collect_ancilla: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ValidationError(f"need samples >= 1, got {self.samples}")
        if self.p < 0:
            raise ValidationError(f"need p >= 0, got {self.p}")
        if self.inst.n > EMULATION_LIMIT:
            raise ResourceError(f"n={self.inst.n} over the n <= {EMULATION_LIMIT} emulation guard")
        if self.mode is Mode.QPE_SAMPLED and self.config is None:
            raise ValidationError("sampled-readout mode requires a CnrConfig")


@dataclass
class EmulatorResult:
    """Empirical survivor distribution with binomial standard errors."""

    energies: np.ndarray
    counts: np.ndarray
    probs: np.ndarray
    std_err: np.ndarray
    samples: int
    p: int
    mode: Mode
    seed: int
    levels: np.ndarray | None = None
    ancilla_counts: np.ndarray | None = None

    def level_distribution(self) -> LevelDistribution:
        if self.levels is None:
            raise ValidationError("run had no spectrum; results are keyed by energy only")
        return LevelDistribution(self.probs, m=self.p)

    def cumulative(self, beta: int) -> float:
        return float(self.probs[: beta + 1].sum())


class _CdfCache:
    """Readout CDFs per distinct phase fraction, keyed by its value rounded to 1e-12."""

    def __init__(self, t: int):
        self.t = t
        self.table: dict[float, np.ndarray] = {}

    def rows_for(self, deltas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        keys = np.round(deltas, 12)
        uniq, inverse = np.unique(keys, return_inverse=True)
        rows = np.empty((uniq.shape[0], 1 << self.t))
        for k, key in enumerate(uniq.tolist()):
            cdf = self.table.get(key)
            if cdf is None:
                cdf = np.cumsum(phase.probabilities(key, self.t))
                cdf[-1] = 1.0
                if len(self.table) < MAX_CDF_CACHE:
                    self.table[key] = cdf
            rows[k] = cdf
        return rows, inverse.astype(np.int64)


def _code_levels(spec: EnergySpectrum, inst: ProblemInstance) -> np.ndarray:
    if spec.code_levels is not None:
        return spec.code_levels
    raw = all_energies(inst)
    pos = np.clip(np.searchsorted(spec.energies, raw), 0, spec.num_levels - 1)
    left = np.clip(pos - 1, 0, spec.num_levels - 1)
    use_left = np.abs(spec.energies[left] - raw) < np.abs(spec.energies[pos] - raw)
    lvl = np.where(use_left, left, pos)
    if np.any(np.abs(spec.energies[lvl] - raw) > spec.group_tol):
        raise ConsistencyError("an enumerated energy matched no spectrum level")
    return lvl.astype(np.int32)


def emulate(run: EmulatorRun) -> EmulatorResult:
    """Empirical distribution of the final survivor over levels (or energies)."""
    inst, p = run.inst, run.p
    leaves = 1 << p
    rng_leaves = np.random.Generator(np.random.PCG64(np.random.SeedSequence([run.seed & (2**64 - 1), 0])))
    rng_readout = np.random.Generator(np.random.PCG64(np.random.SeedSequence([run.seed & (2**64 - 1), 1])))

    spec = run.spectrum
    if spec is not None:
        code_levels = _code_levels(spec, inst)
        level_energies = spec.energies
        spec.validate()
        counts = np.zeros(spec.num_levels, dtype=np.int64)
    else:
        code_levels = None
        level_energies = None
        energy_counts: dict[float, int] = {}

    sampled = run.mode is Mode.QPE_SAMPLED
    if sampled:
        config = run.config
        if spec is not None:
            config.require_valid_for(spec.c_min, spec.c_max)
        cache = _CdfCache(config.t)
        inv_two_pi_m = 1.0 / (2.0 * np.pi * config.scale)
        half = 1 << (config.t - 1)
        anc_counts = np.zeros(1 << config.t, dtype=np.int64) if run.collect_ancilla else None
    else:
        anc_counts = None

    if code_levels is None:
        bit_i, bit_j, weights = inst.term_arrays()

    chunk_samples = max(1, CHUNK_TARGET >> p)
    done = 0
    while done < run.samples:
        batch = min(chunk_samples, run.samples - done)
        codes = rng_leaves.integers(0, 1 << inst.n, size=(batch, leaves), dtype=np.int64)
        if code_levels is not None:
            values = code_levels[codes].astype(np.int64)
        else:
            values = _backend.kernels.energies_of(codes.ravel(), bit_i, bit_j, weights).reshape(codes.shape)

        for _ in range(p):
            target = values[:, 0::2]
            support = values[:, 1::2]
            if not sampled:
                values = np.minimum(target, support)
                continue
            e_t = level_energies[target] if level_energies is not None else target
            e_s = level_energies[support] if level_energies is not None else support
            delta = phase.wrap_fraction((e_s - e_t) * inv_two_pi_m)
            rows, row_idx = cache.rows_for(delta.ravel())
            u = rng_readout.random(row_idx.shape[0])
            bins = _backend.kernels.sample_bins(row_idx, rows, u)
            if anc_counts is not None:
                anc_counts += np.bincount(bins, minlength=anc_counts.shape[0])
            replace = (bins >= half).reshape(target.shape)
            values = np.where(replace, support, target)

        winners = values[:, 0]
        if code_levels is not None:
            counts += np.bincount(winners, minlength=counts.shape[0])
        else:
            uniq, cnt = np.unique(winners, return_counts=True)
            for e, c in zip(uniq.tolist(), cnt.tolist()):
                energy_counts[e] = energy_counts.get(e, 0) + int(c)
        done += batch

    if code_levels is not None:
        energies = spec.energies.copy()
        levels = np.arange(1, spec.num_levels + 1)
        final_counts = counts
    else:
        energies = np.array(sorted(energy_counts))
        levels = None
        final_counts = np.array([energy_counts[e] for e in energies.tolist()], dtype=np.int64)

    probs = final_counts / float(run.samples)
    std_err = np.sqrt(probs * (1.0 - probs) / run.samples)
    return EmulatorResult(
        energies=energies,
        counts=final_counts,
        probs=probs,
        std_err=std_err,
        samples=run.samples,
        p=p,
        mode=run.mode,
        seed=run.seed,
        levels=levels,
        ancilla_counts=anc_counts,
    )


def neighborhood_estimates(
    result: EmulatorResult, spec: EnergySpectrum, beta: int
) -> dict[str, float]:
    """Empirical neighborhood statistics with delta-method standard errors.

    Variances come from the multinomial covariance of the level counts; the
    two ratio statistics use the first-order (delta-method) expansion.
    """
    if result.levels is None:
        raise ValidationError("estimates need a spectrum-keyed result")
    n_samp = result.samples
    sel = result.probs[: beta + 1]
    mass = float(sel.sum())
    if mass <= 0.0:
        raise ValidationError("no mass observed in the neighborhood")
    alphas = metrics.relative_errors(spec)[: beta + 1]
    weighted = float((sel * alphas).sum())
    avg = weighted / mass
    worst = float(sel[beta]) / mass

    var_mass = mass * (1.0 - mass) / n_samp
    var_weighted = (float((sel * alphas**2).sum()) - weighted**2) / n_samp
    cov_weighted_mass = weighted * (1.0 - mass) / n_samp
    var_avg = (var_weighted - 2.0 * avg * cov_weighted_mass + avg**2 * var_mass) / mass**2

    p_b = float(sel[beta])
    var_pb = p_b * (1.0 - p_b) / n_samp
    cov_pb_mass = p_b * (1.0 - mass) / n_samp
    var_worst = (var_pb - 2.0 * worst * cov_pb_mass + worst**2 * var_mass) / mass**2

    return {
        "cum_prob": mass,
        "cum_se": float(np.sqrt(max(var_mass, 0.0))),
        "avg_rel_error": avg,
        "avg_se": float(np.sqrt(max(var_avg, 0.0))),
        "worst_cond": worst,
        "worst_se": float(np.sqrt(max(var_worst, 0.0))),
    }


@dataclass(frozen=True)
class TableRow:
    """One table row: empirical neighborhood statistics beside the exact recursion."""

    p: int
    beta: int
    a_beta: int
    cum_prob: float
    cum_se: float
    avg_rel_error: float
    avg_se: float
    worst_cond: float
    worst_se: float
    exact_cum: float
    exact_avg: float
    exact_worst: float
    samples: int
    mode: str


def table_report(
    inst: ProblemInstance,
    spec: EnergySpectrum,
    p_values: list[int],
    beta: int,
    samples: int,
    seed: int,
    mode: Mode = Mode.IDEAL_SIGN,
    config: CnrConfig | None = None,
) -> list[TableRow]:
    """Empirical rows for each p beside the exact recursion values."""
    a_beta = metrics.a_beta_of(spec, beta)
    rows = []
    for p in p_values:
        run = EmulatorRun(
            inst=inst, p=p, samples=samples, seed=seed, mode=mode, config=config, spectrum=spec
        )
        est = neighborhood_estimates(emulate(run), spec, beta)
        rows.append(
            TableRow(
                p=p,
                beta=beta,
                a_beta=a_beta,
                cum_prob=est["cum_prob"],
                cum_se=est["cum_se"],
                avg_rel_error=est["avg_rel_error"],
                avg_se=est["avg_se"],
                worst_cond=est["worst_cond"],
                worst_se=est["worst_se"],
                exact_cum=metrics.cumulative_prob(spec, beta, p),
                exact_avg=metrics.avg_relative_error(spec, beta, p),
                exact_worst=metrics.worst_case_conditional(spec, beta, p),
                samples=samples,
                mode=mode.value,
            )
        )
    return rows


def ideal_distribution_check(spec: EnergySpectrum, p: int) -> LevelDistribution:
    """The exact distribution the ideal-sign emulation converges to."""
    return distribution_at(spec, p)
