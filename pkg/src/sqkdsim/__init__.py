"""Simulator and analysis toolkit for a single-state semi-quantum key
distribution protocol, its entangling-probe eavesdropper, and the
leak-free sifting variant that defeats it."""

from .adversary import AdversaryKind, EveRoundGuess, MissingProbeError, tap_backward, tap_forward
from .analysis import (
    BranchDistribution,
    MetricStats,
    ProtocolConfig,
    RoundTranscript,
    RunDetail,
    RunReport,
    RunSummary,
    aggregate,
    enumerate_distribution,
    run,
    run_detailed,
    simulate_rounds,
    standard_error,
)
from .protocol import (
    BobRoundRecord,
    DetectionResult,
    InsufficientKeyError,
    KeyBit,
    KeyMaterial,
    ProtocolVariant,
    RoundRegister,
    SiftResult,
    Verdict,
    alice_measure_round,
    alice_prepare_round,
    bob_round_action,
    detect_and_finalize,
    sift,
)
from .qubits import (
    MAX_QUBITS,
    Basis,
    Eigenstate,
    MeasurementOutcome,
    RegisterOverflowError,
    StateVector,
    apply_cnot,
    approx_equal,
    make_state,
    measure,
    measurement_probabilities,
    state_from_amplitudes,
    tensor,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryKind",
    "Basis",
    "BobRoundRecord",
    "BranchDistribution",
    "DetectionResult",
    "Eigenstate",
    "EveRoundGuess",
    "InsufficientKeyError",
    "KeyBit",
    "KeyMaterial",
    "MAX_QUBITS",
    "MeasurementOutcome",
    "MetricStats",
    "MissingProbeError",
    "ProtocolConfig",
    "ProtocolVariant",
    "RegisterOverflowError",
    "RoundRegister",
    "RoundTranscript",
    "RunDetail",
    "RunReport",
    "RunSummary",
    "SiftResult",
    "StateVector",
    "Verdict",
    "aggregate",
    "alice_measure_round",
    "alice_prepare_round",
    "apply_cnot",
    "approx_equal",
    "bob_round_action",
    "detect_and_finalize",
    "enumerate_distribution",
    "make_state",
    "measure",
    "measurement_probabilities",
    "run",
    "run_detailed",
    "sift",
    "simulate_rounds",
    "standard_error",
    "state_from_amplitudes",
    "tap_backward",
    "tap_forward",
    "tensor",
]
