"""Compare-and-replace tournament optimization toolkit.

Builds 2-local cost instances, enumerates their exact energy spectra,
models the phase-estimation comparison readout in closed form, simulates
the full circuit bit-exactly at small widths, emulates it stochastically at
full problem scale, and reports the level-recursion analytics and scalability
bounds that tie them together.
"""

from .backend import available_backends, backend_name, set_backend
from .cost import (
    EnergySpectrum,
    ProblemInstance,
    enumerate_spectrum,
    evaluate,
    level_of,
    load_instance,
    save_instance,
)
from .emulator import EmulatorResult, EmulatorRun, Mode, emulate, table_report
from .errors import ConsistencyError, ResourceError, ValidationError
from .generate import Family, GeneratorSpec, gen_gaussian, gen_max2xor, generate
from .metrics import (
    BoundLines,
    NeighborhoodReport,
    avg_relative_error,
    beta_upper_bound,
    bound_line,
    bound_lines,
    critical_line,
    cumulative_lower_bound,
    cumulative_prob,
    cumulative_prob_counts,
    min_p_for,
    neighborhood_report,
    relative_error,
    worst_case_conditional,
)
from .phase import (
    CnrConfig,
    PhaseFraction,
    ancilla_amplitude,
    ancilla_probability,
    choose_t,
    delta_of,
    sign_error_prob,
)
from .recursion import LevelDistribution, cnr_combine, distribution_at, initial_distribution, step
from .simulator import (
    RegisterLayout,
    StateVector,
    apply_cnr,
    apply_comparison,
    apply_replacement,
    run_algorithm,
    t_marginal_levels,
    uniform_init,
)

__version__ = "0.1.0"
