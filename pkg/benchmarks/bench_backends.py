#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Covers the hot loops: energy-table enumeration, per-string evaluation,
statevector phase/overwrite sweeps, readout bin sampling, and two
end-to-end paths (one full-width simulation, one emulation round).

    python3 benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

import numpy as np

from cnropt import CnrConfig, EmulatorRun, Mode, backend, emulate, enumerate_spectrum, run_algorithm
from cnropt.backend import available_backends
from cnropt.generate import gen_gaussian, gen_max2xor

TWO_PI = 2.0 * np.pi


def timeit(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def kernel_cases(quick):
    n_enum = 18 if quick else 22
    amp_bits = 18 if quick else 22
    matches = 10**5 if quick else 2 * 10**6

    inst = gen_gaussian(n_enum, 1)
    bit_i, bit_j, weights = inst.term_arrays()
    rng = np.random.default_rng(0)
    codes = rng.integers(0, 1 << n_enum, size=matches, dtype=np.int64)

    amps = rng.standard_normal(1 << amp_bits) + 1j * rng.standard_normal(1 << amp_bits)
    amps /= np.linalg.norm(amps)
    table = rng.standard_normal(1 << 6)

    rows = np.sort(rng.random((512, 128)), axis=1)
    rows /= rows[:, -1:].copy()
    rows[:, -1] = 1.0
    row_idx = rng.integers(0, 512, size=matches, dtype=np.int64)
    u = rng.random(matches)

    shift_t = amp_bits - 6
    shift_s = amp_bits - 12
    return [
        (f"all_energies n={n_enum}", lambda k: k.all_energies(n_enum, bit_i, bit_j, weights)),
        (f"energies_of {matches:.0e} codes", lambda k: k.energies_of(codes, bit_i, bit_j, weights)),
        (
            f"pair_phase 2^{amp_bits} amps",
            lambda k: k.pair_phase_inplace(amps.copy(), table, shift_t, shift_s, 0, 6, 6, 0.37),
        ),
        (f"overwrite 2^{amp_bits} amps", lambda k: k.overwrite(amps, shift_t, shift_s, 6, amp_bits - 13)),
        (f"sample_bins {matches:.0e} draws", lambda k: k.sample_bins(row_idx, rows, u)),
    ]


def end_to_end_cases(quick):
    sim_inst = gen_gaussian(2, 3)
    sim_config = CnrConfig(t=4, scale=16 / TWO_PI, accuracy=0.1)
    sim_p = 1 if quick else 2  # width 8 or 20 qubits

    emu_inst = gen_max2xor(10, 0.6, 3)
    emu_spec = enumerate_spectrum(emu_inst)
    emu_config = CnrConfig(t=7, scale=45 / TWO_PI, accuracy=2 / 45)
    emu_samples = 10**4 if quick else 10**5

    def emu():
        emulate(
            EmulatorRun(
                inst=emu_inst,
                p=5,
                samples=emu_samples,
                seed=9,
                mode=Mode.QPE_SAMPLED,
                config=emu_config,
                spectrum=emu_spec,
            )
        )

    return [
        (f"run_algorithm n=2 p={sim_p}", lambda: run_algorithm(sim_inst, sim_config, sim_p)),
        (f"emulate qpe p=5 {emu_samples:.0e} samples", emu),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller sizes for a fast sanity run")
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; nothing to compare")
        return

    print(f"{'case':<34} {'compiled':>10} {'pure':>10} {'speedup':>9}")
    for name, fn in kernel_cases(args.quick):
        t_compiled = timeit(lambda: fn(backends["compiled"]))
        t_pure = timeit(lambda: fn(backends["pure-python"]))
        print(f"{name:<34} {t_compiled * 1e3:>8.1f}ms {t_pure * 1e3:>8.1f}ms {t_pure / t_compiled:>8.1f}x")

    for name, fn in end_to_end_cases(args.quick):
        times = {}
        for label in ("compiled", "pure-python"):
            backend.set_backend(label)
            try:
                times[label] = timeit(fn, repeats=2)
            finally:
                backend.set_backend("compiled")
        print(
            f"{name:<34} {times['compiled'] * 1e3:>8.1f}ms {times['pure-python'] * 1e3:>8.1f}ms"
            f" {times['pure-python'] / times['compiled']:>8.1f}x"
        )


if __name__ == "__main__":
    main()
