"""Round state machines and classical post-processing for the key protocol.

One round: the quantum party (Alice) sends a plus-state qubit; the
classical party (Bob) either reflects it or Z-measures it and returns a
fresh zero-state qubit; Alice measures the returned qubit in a random
basis and maps the outcome to a key value. Sifting and eavesdropping
detection then run over the whole transcript.

The improved sifting variant additionally discards every position where
Bob's measurement outcome was one, which is exactly the set of rounds an
entangling-probe eavesdropper can learn.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Sequence

from .qubits import (
    Basis,
    Eigenstate,
    StateVector,
    _measure_x,
    _measure_z,
    make_state,
    qubit_mask,
)


class ProtocolVariant(Enum):
    ORIGINAL = "original"
    IMPROVED = "improved"


class KeyBit(IntEnum):
    """Key value for one position; DISCARDED marks dropped rounds."""

    BIT0 = 0
    BIT1 = 1
    DISCARDED = -1


class Verdict(Enum):
    ACCEPT = "accept"
    ABORT = "abort"


class InsufficientKeyError(ValueError):
    """Sifted keys are too short to run eavesdropping detection."""


@dataclass(slots=True)
class RoundRegister:
    """Joint quantum state in flight during one round.

    `channel_qubit` indexes the travelling qubit inside `state`;
    `probe_qubits` lists any qubits an eavesdropper has attached.
    """

    state: StateVector
    channel_qubit: int = 0
    probe_qubits: tuple[int, ...] = ()


@dataclass(slots=True)
class BobRoundRecord:
    """Bob's ground truth for one round."""

    bit: int
    measured: bool
    outcome: int | None


@dataclass(slots=True)
class SiftResult:
    """Positionally aligned sifted keys plus the publicly dropped positions."""

    alice_bits: list[int]
    bob_bits: list[int]
    announced_positions: list[int]
    kept_positions: list[int]


@dataclass(slots=True)
class DetectionResult:
    """Outcome of the check-bit comparison and the surviving final keys."""

    verdict: Verdict
    error_rate: float
    check_positions: list[int]
    alice_key: list[int]
    bob_key: list[int]


@dataclass(slots=True)
class KeyMaterial:
    """All key strings produced by one protocol execution."""

    alice_values: list[int]
    bob_bits: list[int]
    alice_sifted: list[int]
    bob_sifted: list[int]
    alice_final: list[int]
    bob_final: list[int]


_PLUS = make_state(Eigenstate.PLUS)


def _shift_to_zero(amplitudes: tuple[complex, ...], mask: int) -> tuple[complex, ...]:
    """Move a product qubit's amplitude block from bit=1 to bit=0.

    Precondition: the register's support lies entirely on bit=1 of the
    masked qubit (it was just Z-measured with outcome one).
    """
    new = [0j] * len(amplitudes)
    for i, amp in enumerate(amplitudes):
        if amp != 0j:
            new[i & ~mask] = amp
    return tuple(new)


def alice_prepare_round() -> RoundRegister:
    """Start a round: one channel qubit in the plus state."""
    return RoundRegister(state=_PLUS, channel_qubit=0, probe_qubits=())


def bob_round_action(
    reg: RoundRegister, bit: int, rng
) -> tuple[RoundRegister, BobRoundRecord]:
    """Apply Bob's per-round choice for key bit `bit`.

    Bit 0: reflect the channel qubit untouched. Bit 1: Z-measure it
    (collapsing the whole register, probes included), record the
    outcome, and send a fresh zero state back in its place.
    """
    if bit == 0:
        return reg, BobRoundRecord(0, False, None)
    if bit != 1:
        raise ValueError(f"Bob's key bit must be 0 or 1, got {bit!r}")
    state = reg.state
    k = state.num_qubits
    outcome, amps = _measure_z(k, state.amplitudes, reg.channel_qubit, rng)
    if outcome:
        # collapsed channel reads one; the fresh zero replaces it
        amps = _shift_to_zero(amps, qubit_mask(k, reg.channel_qubit))
    reg.state = StateVector(k, amps)
    return reg, BobRoundRecord(1, True, outcome)


def alice_measure_round(reg: RoundRegister, rng) -> tuple[Basis, int]:
    """Measure the returned qubit in a uniformly random basis.

    Outcome one maps to key value 0, outcome minus to 1; anything else
    discards the round (value -1). One bit is drawn for the basis
    (1 = Z), then `measure` consumes one uniform draw.
    """
    state = reg.state
    k = state.num_qubits
    if rng.getrandbits(1):
        basis = Basis.Z
        bit, amps = _measure_z(k, state.amplitudes, reg.channel_qubit, rng)
        value = 0 if bit else -1  # outcome one => 0, zero => discard
    else:
        basis = Basis.X
        bit, amps = _measure_x(k, state.amplitudes, reg.channel_qubit, rng)
        value = 1 if bit else -1  # outcome minus => 1, plus => discard
    reg.state = StateVector(k, amps)
    return basis, value


def sift(
    alice_values: Sequence[int],
    bob_bits: Sequence[int],
    records: Sequence[BobRoundRecord],
    variant: ProtocolVariant,
) -> SiftResult:
    """Drop publicly announced positions and align both parties' keys.

    Original: drop where Alice's value is -1. Improved: additionally
    drop where Bob's recorded measurement outcome was one.
    """
    n = len(alice_values)
    if len(bob_bits) != n or len(records) != n:
        raise ValueError(
            f"transcript lengths differ: {n} values, {len(bob_bits)} bits, "
            f"{len(records)} records"
        )
    improved = variant is ProtocolVariant.IMPROVED
    alice = []
    bob = []
    announced = []
    kept = []
    for i in range(n):
        if alice_values[i] == -1 or (improved and records[i].outcome == 1):
            announced.append(i)
        else:
            kept.append(i)
            alice.append(alice_values[i])
            bob.append(bob_bits[i])
    return SiftResult(alice, bob, announced, kept)


def detect_and_finalize(
    alice_sifted: Sequence[int],
    bob_sifted: Sequence[int],
    threshold: float,
    rng,
) -> DetectionResult:
    """Compare a random half of the sifted keys and drop it.

    Bob announces floor(L/2) positions chosen uniformly without
    replacement; the run aborts iff the mismatch fraction on those
    positions exceeds `threshold`. On accept, both parties keep the
    unannounced remainder as their final key.
    """
    length = len(alice_sifted)
    if len(bob_sifted) != length:
        raise ValueError(
            f"sifted keys differ in length: {length} vs {len(bob_sifted)}"
        )
    if length < 2:
        raise InsufficientKeyError(
            f"need at least 2 sifted bits for detection, have {length}"
        )
    check = sorted(rng.sample(range(length), length // 2))
    mismatches = sum(1 for j in check if alice_sifted[j] != bob_sifted[j])
    error_rate = mismatches / len(check)
    if error_rate > threshold:
        return DetectionResult(Verdict.ABORT, error_rate, check, [], [])
    check_set = set(check)
    alice_key = [alice_sifted[j] for j in range(length) if j not in check_set]
    bob_key = [bob_sifted[j] for j in range(length) if j not in check_set]
    return DetectionResult(Verdict.ACCEPT, error_rate, check, alice_key, bob_key)
