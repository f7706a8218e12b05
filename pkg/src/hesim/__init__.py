"""Exact hybrid polarization/coherent-state protocol simulator."""

from .states import (
    CS_MINUS,
    CS_PLUS,
    CS_ZERO,
    CoherentLabel,
    HybridState,
    LogicalQubit,
    Mode,
    ModeKind,
    PolLabel,
    Term,
    coherent_overlap,
    logical_basis_state,
    logical_coefficients,
    logical_state,
    reduced_density_logical,
)
from .optics import (
    FidelityMode,
    MeasurementRecord,
    apply_beamsplitter,
    apply_logical_pauli,
    measure_photon_parity_discard,
    postselect_vacuum,
)
from .ecp import (
    AngleParams,
    ECPParams,
    ECPResult,
    build_nonmax_omega,
    build_single_mode_ancilla,
    build_target_mes,
    build_two_mode_ancilla,
    run_ecp,
    success_probability_closed_form,
    sweep,
    sweep_to_csv,
)
from .hqis import (
    HQISTranscript,
    InputSecret,
    alice_bell_measurement,
    build_channel,
    derive_case1_table,
    derive_case2_table,
    run_protocol,
    verify_bell_decomposition,
)

__version__ = "0.1.0"
