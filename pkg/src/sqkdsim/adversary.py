"""Eavesdropper strategies tapping the forward and backward channel.

The entangling-probe attack (DOUBLE_CNOT) attaches a zero-state probe
with a C-NOT on the way in, undoes the entanglement with a second C-NOT
on the way out, and Z-measures the probe. A probe outcome of one proves
Bob measured and saw one, while every state returned to Alice equals the
no-attack state, so the check bits never show an error.

MEASURE_RESEND is the contrasting non-stealthy baseline: it Z-measures
the qubit in flight to Bob and forwards the eigenstate, which the check
bits catch.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .protocol import RoundRegister
from .qubits import (
    Eigenstate,
    StateVector,
    _measure_z,
    apply_cnot,
    make_state,
    tensor,
)


class AdversaryKind(Enum):
    NONE = "none"
    DOUBLE_CNOT = "double-cnot"
    MEASURE_RESEND = "measure-resend"


class MissingProbeError(ValueError):
    """Backward tap of an entangling probe that was never attached."""


@dataclass(slots=True, frozen=True)
class EveRoundGuess:
    """Eve's per-round inference; `guessed_value` is set iff `knows_bit`."""

    knows_bit: bool
    guessed_value: int | None


NO_KNOWLEDGE = EveRoundGuess(False, None)
_KNOWS_ONE = EveRoundGuess(True, 1)

_ZERO = make_state(Eigenstate.ZERO)


def tap_forward(reg: RoundRegister, kind: AdversaryKind, rng) -> RoundRegister:
    """Act on the qubit travelling from Alice to Bob."""
    if kind is AdversaryKind.NONE:
        return reg
    if kind is AdversaryKind.DOUBLE_CNOT:
        probe = reg.state.num_qubits
        reg.state = apply_cnot(tensor(reg.state, _ZERO), reg.channel_qubit, probe)
        reg.probe_qubits = reg.probe_qubits + (probe,)
        return reg
    state = reg.state
    _, amps = _measure_z(state.num_qubits, state.amplitudes, reg.channel_qubit, rng)
    reg.state = StateVector(state.num_qubits, amps)
    return reg


def tap_backward(
    reg: RoundRegister, kind: AdversaryKind, rng
) -> tuple[RoundRegister, EveRoundGuess]:
    """Act on the qubit travelling back to Alice and infer Bob's bit.

    DOUBLE_CNOT applies the second C-NOT and measures the probe: outcome
    one certifies that Bob measured and saw one this round. The other
    strategies leave the register alone and learn nothing.
    """
    if kind is not AdversaryKind.DOUBLE_CNOT:
        return reg, NO_KNOWLEDGE
    if not reg.probe_qubits:
        raise MissingProbeError("backward tap requires a probe from the forward tap")
    probe = reg.probe_qubits[-1]
    state = apply_cnot(reg.state, reg.channel_qubit, probe)
    bit, amps = _measure_z(state.num_qubits, state.amplitudes, probe, rng)
    reg.state = StateVector(state.num_qubits, amps)
    return reg, (_KNOWS_ONE if bit else NO_KNOWLEDGE)
