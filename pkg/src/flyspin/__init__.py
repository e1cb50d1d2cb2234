"""Few-qubit density-matrix simulator and protocol engine for spin-mediated
entanglement operations between static qubits."""

from .channels import NoiseParams, dephasing, imperfect_init, relaxation
from .metrics import BellLabel, bell_fidelity, bell_state, concurrence, success_stats
from .protocol import (
    ChainConfig,
    ChainReport,
    EOResource,
    ParityOutcome,
    PumpState,
    PumpTrajectory,
    chain_report,
    chain_selective_eo,
    fresh_pair_fidelity,
    generate_resource,
    parity_projection_branches,
    parity_success_output,
    parity_success_probability,
    pump_probabilities,
    pump_step,
    pump_until,
    two_round_parity_projection,
)
from .qcore import (
    DensityMatrix,
    KrausChannel,
    MeasurementBranch,
    Projector,
    PureState,
    apply_channel,
    apply_unitary,
    embed_operator,
    embed_unitary,
    ket,
    measure,
    partial_trace,
    tensor_dm,
)
from .rng import make_rng, trial_rng
from .scattering import (
    BELL_GATE,
    SWAP_GATE,
    ForwardScatterParams,
    FullScatterParams,
    GatePreset,
    forward_unitary,
    full_scatter,
    herald_transmission,
)

__version__ = "0.1.0"
