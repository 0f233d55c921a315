# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels: energy tables, statevector updates, bin sampling.

The pure-numpy twin lives in ``cnropt._kernels_py``; keep signatures and
floating-point evaluation order in sync between the two.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def all_energies(int n, cnp.int64_t[::1] bit_i, cnp.int64_t[::1] bit_j, double[::1] weights):
    """Cost value of every n-bit code, code 0 .. 2^n - 1."""
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << n
    out = np.empty(size, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t code, k, nterms = bit_i.shape[0]
    cdef double e
    for code in range(size):
        e = 0.0
        for k in range(nterms):
            if ((code >> bit_i[k]) ^ (code >> bit_j[k])) & 1:
                e += -weights[k]
            else:
                e += weights[k]
        ov[code] = e
    return out


def energies_of(cnp.int64_t[::1] codes, cnp.int64_t[::1] bit_i, cnp.int64_t[::1] bit_j, double[::1] weights):
    """Cost values of the given codes; adds terms in declaration order."""
    cdef Py_ssize_t size = codes.shape[0]
    out = np.empty(size, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t k, m, nterms = bit_i.shape[0]
    cdef cnp.int64_t code
    cdef double e
    for m in range(size):
        code = codes[m]
        e = 0.0
        for k in range(nterms):
            if ((code >> bit_i[k]) ^ (code >> bit_j[k])) & 1:
                e += -weights[k]
            else:
                e += weights[k]
        ov[m] = e
    return out


def pair_phase_inplace(
    double complex[::1] amps,
    double[::1] energy_table,
    int t_shift,
    int s_shift,
    int anc_shift,
    int n_bits,
    int t_bits,
    double inv_m,
):
    """Multiply each amplitude by exp(i * D(x) * (E_s - E_t) / M)."""
    cdef Py_ssize_t idx, size = amps.shape[0]
    cdef cnp.int64_t mask_n = ((<cnp.int64_t> 1) << n_bits) - 1
    cdef cnp.int64_t mask_t = ((<cnp.int64_t> 1) << t_bits) - 1
    cdef double phase, e_t, e_s, d
    for idx in range(size):
        d = <double> ((idx >> anc_shift) & mask_t)
        e_t = energy_table[(idx >> t_shift) & mask_n]
        e_s = energy_table[(idx >> s_shift) & mask_n]
        phase = (d * (e_s - e_t)) * inv_m
        amps[idx] = amps[idx] * (cos(phase) + 1j * sin(phase))


def overwrite(
    double complex[::1] amps,
    int t_shift,
    int s_shift,
    int n_bits,
    int ctrl_shift,
):
    """Controlled register overwrite: on ctrl=1, (z_t, z_s) -> (z_s, z_s ^ z_t)."""
    cdef Py_ssize_t idx, size = amps.shape[0]
    out = np.empty(size, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef cnp.int64_t mask_n = ((<cnp.int64_t> 1) << n_bits) - 1
    cdef cnp.int64_t z_t, z_s, dst
    for idx in range(size):
        if (idx >> ctrl_shift) & 1:
            z_t = (idx >> t_shift) & mask_n
            z_s = (idx >> s_shift) & mask_n
            dst = idx - (z_t << t_shift) - (z_s << s_shift) + (z_s << t_shift) + ((z_s ^ z_t) << s_shift)
            ov[dst] = amps[idx]
        else:
            ov[idx] = amps[idx]
    return out


def sample_bins(cnp.int64_t[::1] row_idx, double[:, ::1] cdf_rows, double[::1] u):
    """Inverse-CDF draw: bin k = number of CDF entries <= u, per match."""
    cdef Py_ssize_t k, size = row_idx.shape[0]
    cdef Py_ssize_t nbins = cdf_rows.shape[1]
    out = np.empty(size, dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    cdef Py_ssize_t lo, hi, mid
    cdef cnp.int64_t row
    cdef double uu
    for k in range(size):
        row = row_idx[k]
        uu = u[k]
        lo = 0
        hi = nbins
        while lo < hi:
            mid = (lo + hi) >> 1
            if cdf_rows[row, mid] <= uu:
                lo = mid + 1
            else:
                hi = mid
        ov[k] = lo
    return out
