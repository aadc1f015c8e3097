"""Dual-engine simulator for quantum teleportation of multipartite entangled
coherent states: an exact coherent-label algebra runs the protocol in closed
form, and a truncated photon-number-basis engine verifies it numerically.
"""

from .algebra import (
    CoherentLabel,
    CoherentOperator,
    CoherentSuperposition,
    DimensionMismatchError,
    UnsupportedStructureError,
    beam_splitter,
    dedupe,
    inner_product,
    norm,
    normalized,
    operator_fidelity,
    overlap,
    phase_shift_pi,
    project_photon_number,
    pure_fidelity,
    superposition,
    tensor,
    trace_out,
)
from .channels import (
    ChannelSpec,
    SchmidtPair,
    build_channel,
    build_input,
    channel_amplitudes,
    concurrence_closed_form,
    input_amplitudes,
    schmidt_coefficients,
)
from .fock import (
    FockVector,
    bs_unitary,
    default_cutoff,
    encode,
    measure_number,
    reduce_to_qubits,
    wootters_concurrence,
)
from .noise import (
    LossModel,
    adjudicate_teleported_fidelity,
    apply_loss,
    channel_fidelity,
    teleport_through_noise,
    teleported_fidelity_closed_form,
    teleported_fidelity_exact,
)
from .teleport import (
    ProtocolOutcome,
    ProtocolReport,
    bob_correction,
    enumerate_outcomes,
    fold_network,
    run_protocol,
    success_probability_closed_form,
)

__version__ = "0.1.0"
