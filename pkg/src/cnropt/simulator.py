"""Bit-exact statevector simulation of the compare-and-replace circuit.

Basis index convention: the qubit at layout offset 0 is the most significant
bit of the amplitude index, and bit 1 of a register (z_1) is the register's
most significant bit. A register of width w at offset o therefore occupies
the index bit field with LSB shift q - o - w.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend as _backend
from .cost import EnergySpectrum, ProblemInstance, all_energies
from .errors import ResourceError, ValidationError
from .phase import CnrConfig
from .recursion import LevelDistribution

WIDTH_LIMIT = 26  # memory guard, ~2^26 amplitudes


@dataclass(frozen=True)
class Register:
    name: str
    width: int
    offset: int


class RegisterLayout:
    """Contiguous, non-overlapping named registers covering q qubits."""

    def __init__(self, registers: list[tuple[str, int]]):
        offset = 0
        regs: list[Register] = []
        by_name: dict[str, Register] = {}
        for name, width in registers:
            if width < 1:
                raise ValidationError(f"register {name!r} must have positive width")
            if name in by_name:
                raise ValidationError(f"duplicate register name {name!r}")
            reg = Register(name, width, offset)
            regs.append(reg)
            by_name[name] = reg
            offset += width
        if offset > WIDTH_LIMIT:
            raise ResourceError(f"layout needs {offset} qubits, over the {WIDTH_LIMIT}-qubit guard")
        self.registers = tuple(regs)
        self._by_name = by_name
        self.total_qubits = offset

    def __getitem__(self, name: str) -> Register:
        try:
            return self._by_name[name]
        except KeyError:
            raise ValidationError(f"unknown register {name!r}") from None

    def shift(self, name: str) -> int:
        reg = self[name]
        return self.total_qubits - reg.offset - reg.width

    def extract(self, index, name: str):
        """Register contents of flat basis indices (scalar or array)."""
        reg = self[name]
        return (index >> self.shift(name)) & ((1 << reg.width) - 1)


@dataclass
class StateVector:
    amps: np.ndarray
    layout: RegisterLayout

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def validate(self, tol: float = 1e-10) -> None:
        if abs(self.norm() - 1.0) > tol:
            raise ValidationError(f"state norm {self.norm()} drifted beyond {tol}")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def register_marginal(self, name: str) -> np.ndarray:
        """Measurement distribution of one register, all others traced out."""
        reg = self.layout[name]
        below = self.layout.total_qubits - reg.offset - reg.width
        probs = self.probabilities().reshape(1 << reg.offset, 1 << reg.width, 1 << below)
        return probs.sum(axis=(0, 2))


def uniform_init(layout: RegisterLayout, registers: list[str]) -> StateVector:
    """Uniform superposition over the named registers, |0> elsewhere."""
    wanted = set(registers)
    for name in wanted:
        layout[name]  # existence check
    vec = np.ones(1, dtype=np.complex128)
    for reg in layout.registers:
        size = 1 << reg.width
        if reg.name in wanted:
            block = np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128)
        else:
            block = np.zeros(size, dtype=np.complex128)
            block[0] = 1.0
        vec = np.kron(vec, block)
    return StateVector(vec, layout)


def _iqft_matrix(t: int) -> np.ndarray:
    size = 1 << t
    k = np.arange(size)
    return np.exp(-2j * np.pi * np.outer(k, k) / size) / np.sqrt(size)


def _apply_iqft(amps: np.ndarray, layout: RegisterLayout, anc_reg: str) -> np.ndarray:
    reg = layout[anc_reg]
    below = layout.total_qubits - reg.offset - reg.width
    cube = amps.reshape(1 << reg.offset, 1 << reg.width, 1 << below)
    # the inverse-QFT matrix is the unitary DFT: fft along the register axis
    return (np.fft.fft(cube, axis=1) / np.sqrt(1 << reg.width)).reshape(-1)


def apply_comparison(
    state: StateVector,
    inst: ProblemInstance,
    config: CnrConfig,
    t_reg: str,
    s_reg: str,
    anc_reg: str,
    energy_table: np.ndarray | None = None,
) -> StateVector:
    """Ancilla-controlled cost-difference phases followed by the inverse QFT.

    On each component |z_t>|z_s>|x> the phase D(x) (C(z_s) - C(z_t)) / M is
    applied, so the ancilla ends holding the phase-fraction readout.
    """
    layout = state.layout
    if layout[t_reg].width != inst.n or layout[s_reg].width != inst.n:
        raise ValidationError("target/support register widths must equal the instance size")
    if layout[anc_reg].width != config.t:
        raise ValidationError("ancilla register width must equal the configured t")
    table = all_energies(inst) if energy_table is None else energy_table
    amps = state.amps.copy()
    _backend.kernels.pair_phase_inplace(
        amps,
        table,
        layout.shift(t_reg),
        layout.shift(s_reg),
        layout.shift(anc_reg),
        inst.n,
        config.t,
        1.0 / config.scale,
    )
    return StateVector(_apply_iqft(amps, layout, anc_reg), layout)


def apply_replacement(state: StateVector, t_reg: str, s_reg: str, control_qubit: int) -> StateVector:
    """Bitwise controlled overwrite: on control 1, (z_t, z_s) -> (z_s, z_s XOR z_t).

    Realized as CNOT(t_i -> s_i) then CNOT(s_i -> t_i) per bit pair, both
    controlled on the given qubit (layout offset).
    """
    layout = state.layout
    if layout[t_reg].width != layout[s_reg].width:
        raise ValidationError("target and support registers must have equal width")
    if not (0 <= control_qubit < layout.total_qubits):
        raise ValidationError(f"control qubit {control_qubit} outside the layout")
    out = _backend.kernels.overwrite(
        state.amps,
        layout.shift(t_reg),
        layout.shift(s_reg),
        layout[t_reg].width,
        layout.total_qubits - control_qubit - 1,
    )
    return StateVector(out, layout)


def apply_cnr(
    state: StateVector,
    inst: ProblemInstance,
    config: CnrConfig,
    t_reg: str,
    s_reg: str,
    anc_reg: str,
    energy_table: np.ndarray | None = None,
) -> StateVector:
    """Comparison then replacement, controlled by the first (MSB) ancilla qubit."""
    after = apply_comparison(state, inst, config, t_reg, s_reg, anc_reg, energy_table)
    return apply_replacement(after, t_reg, s_reg, state.layout[anc_reg].offset)


def algorithm_layout(n: int, t: int, p: int) -> RegisterLayout:
    """2^p data registers followed by one fresh ancilla block per compare-and-replace."""
    regs = [(f"d{k}", n) for k in range(1 << p)]
    regs += [(f"a{k}", t) for k in range((1 << p) - 1)]
    return RegisterLayout(regs)


def run_algorithm(inst: ProblemInstance, config: CnrConfig, p: int) -> np.ndarray:
    """Exact basis-state distribution of the surviving target register.

    Runs the full p-stage bracket: 2^p uniform data registers, paired
    left-to-right, each pair combined by a compare-and-replace with its own
    fresh ancilla block. Total width 2^p n + (2^p - 1) t must stay within
    the qubit guard.
    """
    if p < 0:
        raise ValidationError(f"need p >= 0, got {p}")
    width = (1 << p) * inst.n + ((1 << p) - 1) * config.t
    if width > WIDTH_LIMIT:
        raise ResourceError(f"p={p} needs {width} qubits, over the {WIDTH_LIMIT}-qubit guard")
    table = all_energies(inst)
    config.require_valid_for(float(table.min()), float(table.max()))

    layout = algorithm_layout(inst.n, config.t, p)
    state = uniform_init(layout, [r.name for r in layout.registers])
    cnr = 0
    for stage in range(1, p + 1):
        stride = 1 << stage
        for base in range(0, 1 << p, stride):
            state = apply_cnr(
                state, inst, config, f"d{base}", f"d{base + stride // 2}", f"a{cnr}", table
            )
            cnr += 1
    return state.register_marginal("d0")


def t_marginal_levels(dist: np.ndarray, spec: EnergySpectrum, m: int = 0) -> LevelDistribution:
    """Fold a basis-state distribution into level probabilities."""
    dist = np.asarray(dist, dtype=np.float64)
    if dist.shape[0] != spec.total_states:
        raise ValidationError("distribution length does not match the spectrum size")
    if spec.code_levels is None:
        raise ValidationError("spectrum has no member index; re-enumerate with members retained")
    probs = np.bincount(spec.code_levels, weights=dist, minlength=spec.num_levels)
    return LevelDistribution(probs, m=m)
