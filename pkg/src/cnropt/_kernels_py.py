"""Pure-numpy fallback for the compiled hot-loop kernels.

Mirrors ``cnropt._kernels`` exactly: same signatures, same floating-point
accumulation order (term-by-term adds), and the same bin-search semantics,
so both backends produce identical results for identical inputs.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 22  # index-decode block size for statevector kernels


def all_energies(n: int, bit_i: np.ndarray, bit_j: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Cost value of every n-bit code, code 0 .. 2^n - 1."""
    codes = np.arange(1 << n, dtype=np.int64)
    return energies_of(codes, bit_i, bit_j, weights)


def energies_of(codes: np.ndarray, bit_i: np.ndarray, bit_j: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Cost values of the given codes; adds terms in declaration order."""
    codes = np.asarray(codes, dtype=np.int64)
    acc = np.zeros(codes.shape, dtype=np.float64)
    for bi, bj, w in zip(bit_i, bit_j, weights):
        anti = (((codes >> int(bi)) ^ (codes >> int(bj))) & 1).astype(bool)
        acc += np.where(anti, -w, w)
    return acc


def pair_phase_inplace(
    amps: np.ndarray,
    energy_table: np.ndarray,
    t_shift: int,
    s_shift: int,
    anc_shift: int,
    n_bits: int,
    t_bits: int,
    inv_m: float,
) -> None:
    """Multiply each amplitude by exp(i * D(x) * (E_s - E_t) / M).

    Register contents are decoded from the flat basis index via the given
    LSB shifts; D(x) is the integer value of the ancilla field.
    """
    mask_n = (1 << n_bits) - 1
    mask_t = (1 << t_bits) - 1
    size = amps.shape[0]
    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, size), dtype=np.int64)
        e_t = energy_table[(idx >> t_shift) & mask_n]
        e_s = energy_table[(idx >> s_shift) & mask_n]
        d = ((idx >> anc_shift) & mask_t).astype(np.float64)
        phase = (d * (e_s - e_t)) * inv_m
        amps[start : start + idx.shape[0]] *= np.exp(1j * phase)


def overwrite(
    amps: np.ndarray,
    t_shift: int,
    s_shift: int,
    n_bits: int,
    ctrl_shift: int,
) -> np.ndarray:
    """Controlled register overwrite: on ctrl=1, (z_t, z_s) -> (z_s, z_s ^ z_t)."""
    out = np.empty_like(amps)
    mask_n = (1 << n_bits) - 1
    size = amps.shape[0]
    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, size), dtype=np.int64)
        ctrl = ((idx >> ctrl_shift) & 1).astype(bool)
        z_t = (idx >> t_shift) & mask_n
        z_s = (idx >> s_shift) & mask_n
        dst = idx - (z_t << t_shift) - (z_s << s_shift) + (z_s << t_shift) + ((z_s ^ z_t) << s_shift)
        out[np.where(ctrl, dst, idx)] = amps[start : start + idx.shape[0]]
    return out


def sample_bins(row_idx: np.ndarray, cdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw: bin k = number of CDF entries <= u, per match.

    ``row_idx[k]`` selects the CDF row for match k. Semantics match the
    compiled binary search bit for bit.
    """
    out = np.empty(row_idx.shape[0], dtype=np.int64)
    order = np.argsort(row_idx, kind="stable")
    sorted_rows = row_idx[order]
    starts = np.nonzero(np.r_[True, np.diff(sorted_rows) != 0])[0]
    bounds = np.r_[starts, sorted_rows.shape[0]]
    for k in range(starts.shape[0]):
        sel = order[bounds[k] : bounds[k + 1]]
        row = cdf_rows[sorted_rows[bounds[k]]]
        out[sel] = np.searchsorted(row, u[sel], side="right")
    return out
