"""Pulse-schedule compiler and simulator for a two-mode trapped-ion register.

Compiles an arbitrary matrix on a truncated boson mode into a four-channel
laser pulse schedule (spread stage, superpose stage, projection on one
internal level) and simulates it against the effective Hamiltonians, both
with exact resonant blocks and with the full off-resonant dynamics.
"""

from .errors import (
    ContractError,
    DegenerateInputError,
    DegenerateTargetError,
    DimensionError,
    InternalError,
    IonSynthError,
    MatrixFormatError,
)
from .fockspace import (
    Level,
    StateVector,
    basis_state,
    fidelity,
    from_grid,
    guard_occupancy,
    inner_product,
    mode_swap,
    project_internal,
    zero_state,
)
from .harness import (
    RunResult,
    SweepRow,
    load_schedule_json,
    render_sweep_csv,
    run,
    sweep_chi,
    write_outputs,
    write_run_result_json,
    write_schedule_json,
    write_sweep_csv,
)
from .iontools import (
    Channel,
    ChannelKind,
    TrapParams,
    build_hamiltonian,
    laguerre,
    sideband_coupling,
    sideband_coupling_series,
    stark_shift,
)
from .propagator import (
    Mode,
    PulseOp,
    apply_pulse,
    apply_schedule_pulses,
    channel1_offres_phase,
    channel1_offres_phase_formula,
    expm_reference,
)
from .synthesis import (
    LedgerRow,
    PhaseLedger,
    Schedule,
    SynthesisRecord,
    phase_compensation,
    plan_row_spread,
    plan_spread_stage,
    plan_superpose_stage,
    synthesize,
    wrap_angle,
    zeroing_pulse,
)
from .targets import (
    TargetOperator,
    cyclic_rotation,
    from_matrix,
    identity,
    load_matrix,
    qft,
    random_unitary,
)

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "DegenerateInputError",
    "DegenerateTargetError",
    "DimensionError",
    "InternalError",
    "IonSynthError",
    "MatrixFormatError",
    "Level",
    "StateVector",
    "basis_state",
    "fidelity",
    "from_grid",
    "guard_occupancy",
    "inner_product",
    "mode_swap",
    "project_internal",
    "zero_state",
    "RunResult",
    "SweepRow",
    "load_schedule_json",
    "render_sweep_csv",
    "run",
    "sweep_chi",
    "write_outputs",
    "write_run_result_json",
    "write_schedule_json",
    "write_sweep_csv",
    "Channel",
    "ChannelKind",
    "TrapParams",
    "build_hamiltonian",
    "laguerre",
    "sideband_coupling",
    "sideband_coupling_series",
    "stark_shift",
    "Mode",
    "PulseOp",
    "apply_pulse",
    "apply_schedule_pulses",
    "channel1_offres_phase",
    "channel1_offres_phase_formula",
    "expm_reference",
    "LedgerRow",
    "PhaseLedger",
    "Schedule",
    "SynthesisRecord",
    "phase_compensation",
    "plan_row_spread",
    "plan_spread_stage",
    "plan_superpose_stage",
    "synthesize",
    "wrap_angle",
    "zeroing_pulse",
    "TargetOperator",
    "cyclic_rotation",
    "from_matrix",
    "identity",
    "load_matrix",
    "qft",
    "random_unitary",
    "__version__",
]
