"""Exact statevector simulation for registers of one to three qubits.

Amplitudes are plain Python complex numbers held in a tuple, ordered by
computational basis index with qubit 0 as the most significant bit.
Registers never exceed three qubits, so tuples beat numpy arrays here:
per-call array overhead dominates at this size, and the Monte Carlo
driver in `analysis` pushes millions of operations through this module.

All randomness is injected: sampling operations take an ``rng`` argument
compatible with ``random.Random`` (only ``random()`` is used here).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from operator import itemgetter
from typing import Mapping, Sequence

MAX_QUBITS = 3

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class Basis(Enum):
    """Measurement basis: computational (Z) or Hadamard (X)."""

    Z = "Z"
    X = "X"


class Eigenstate(Enum):
    """Labels for the four single-qubit states the protocol uses."""

    ZERO = "zero"
    ONE = "one"
    PLUS = "plus"
    MINUS = "minus"


class RegisterOverflowError(ValueError):
    """An operation would grow a register beyond MAX_QUBITS qubits."""


@dataclass(slots=True, eq=False)
class StateVector:
    """Pure state of a small register.

    Instances are treated as immutable: every operation returns a new
    vector and shared constants (see `make_state`) are never modified.
    """

    num_qubits: int
    amplitudes: tuple[complex, ...]


@dataclass(slots=True)
class MeasurementOutcome:
    """Result of a projective measurement: label plus collapsed register."""

    label: Eigenstate
    collapsed: StateVector


def qubit_mask(num_qubits: int, qubit: int) -> int:
    """Bit mask selecting `qubit` in a basis index (qubit 0 = MSB)."""
    return 1 << (num_qubits - 1 - qubit)


def _build_tables():
    # Indexed [k][qubit] (and [k][control][target] for CNOT); k=0 rows pad.
    ones = [None]
    zeros = [None]
    pairs = [None]
    cnot = [None]
    for k in range(1, MAX_QUBITS + 1):
        dim = 1 << k
        ones.append([])
        zeros.append([])
        pairs.append([])
        for q in range(k):
            mask = qubit_mask(k, q)
            ones[k].append(tuple(i for i in range(dim) if i & mask))
            zeros[k].append(tuple(i for i in range(dim) if not i & mask))
            pairs[k].append(tuple((i, i | mask) for i in range(dim) if not i & mask))
        row = []
        for c in range(k):
            row.append([])
            for t in range(k):
                if c == t:
                    row[c].append(None)
                    continue
                cm, tm = qubit_mask(k, c), qubit_mask(k, t)
                # CNOT permutes basis states; it is its own inverse.
                perm = tuple(i ^ tm if i & cm else i for i in range(dim))
                row[c].append(itemgetter(*perm))
        cnot.append(row)
    return ones, zeros, pairs, cnot


_ONES, _ZEROS, _PAIRS, _CNOT = _build_tables()

_SINGLE = {
    Eigenstate.ZERO: StateVector(1, (1.0 + 0j, 0j)),
    Eigenstate.ONE: StateVector(1, (0j, 1.0 + 0j)),
    Eigenstate.PLUS: StateVector(1, (_INV_SQRT2 + 0j, _INV_SQRT2 + 0j)),
    Eigenstate.MINUS: StateVector(1, (_INV_SQRT2 + 0j, -_INV_SQRT2 + 0j)),
}


def make_state(label: Eigenstate) -> StateVector:
    """Return the single-qubit state for `label` (a shared constant)."""
    return _SINGLE[label]


def state_from_amplitudes(amplitudes: Sequence[complex]) -> StateVector:
    """Build a StateVector from raw amplitudes, validating shape and norm."""
    dim = len(amplitudes)
    k = dim.bit_length() - 1
    if dim != 1 << k or not 1 <= k <= MAX_QUBITS:
        raise ValueError(f"amplitude count {dim} is not 2**k for k in 1..{MAX_QUBITS}")
    amps = tuple(complex(a) for a in amplitudes)
    norm_sq = sum(a.real * a.real + a.imag * a.imag for a in amps)
    if abs(norm_sq - 1.0) > 1e-9:
        raise ValueError(f"state is not normalized: |amplitudes|^2 = {norm_sq!r}")
    return StateVector(k, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; qubit indices of `a` precede those of `b`."""
    k = a.num_qubits + b.num_qubits
    if k > MAX_QUBITS:
        raise RegisterOverflowError(
            f"combined register of {k} qubits exceeds the {MAX_QUBITS}-qubit capacity"
        )
    x = a.amplitudes
    y = b.amplitudes
    if k == 2:
        x0, x1 = x
        y0, y1 = y
        return StateVector(2, (x0 * y0, x0 * y1, x1 * y0, x1 * y1))
    return StateVector(k, tuple(u * v for u in x for v in y))


def apply_cnot(s: StateVector, control: int, target: int) -> StateVector:
    """Flip `target` wherever `control` is 1. Exact basis permutation."""
    k = s.num_qubits
    if not 0 <= control < k:
        raise IndexError(f"control qubit {control} out of range for {k}-qubit register")
    if not 0 <= target < k:
        raise IndexError(f"target qubit {target} out of range for {k}-qubit register")
    if control == target:
        raise ValueError("control and target qubits must differ")
    return StateVector(k, _CNOT[k][control][target](s.amplitudes))


def measurement_probabilities(
    s: StateVector, qubit: int, basis: Basis
) -> Mapping[Eigenstate, float]:
    """Born-rule outcome probabilities for measuring `qubit` in `basis`."""
    k = s.num_qubits
    if not 0 <= qubit < k:
        raise IndexError(f"qubit {qubit} out of range for {k}-qubit register")
    a = s.amplitudes
    if basis is Basis.Z:
        p_one = 0.0
        for i in _ONES[k][qubit]:
            z = a[i]
            p_one += z.real * z.real + z.imag * z.imag
        p_zero = 0.0
        for i in _ZEROS[k][qubit]:
            z = a[i]
            p_zero += z.real * z.real + z.imag * z.imag
        return {Eigenstate.ZERO: p_zero, Eigenstate.ONE: p_one}
    p_plus = 0.0
    p_minus = 0.0
    for i0, i1 in _PAIRS[k][qubit]:
        z = a[i0] + a[i1]
        p_plus += z.real * z.real + z.imag * z.imag
        z = a[i0] - a[i1]
        p_minus += z.real * z.real + z.imag * z.imag
    return {Eigenstate.PLUS: 0.5 * p_plus, Eigenstate.MINUS: 0.5 * p_minus}


def _measure_z(k: int, a: tuple[complex, ...], qubit: int, rng) -> tuple[int, tuple]:
    """Z-measure sampling and collapse on raw amplitudes; returns (bit, amps).

    Exactly one uniform draw is consumed, even for certain outcomes, so
    seeded streams stay aligned across branches.
    """
    ones = _ONES[k][qubit]
    p_one = 0.0
    for i in ones:
        z = a[i]
        p_one += z.real * z.real + z.imag * z.imag
    if rng.random() < p_one:
        keep = ones
        p = p_one
    else:
        keep = _ZEROS[k][qubit]
        p = 0.0
        for i in keep:
            z = a[i]
            p += z.real * z.real + z.imag * z.imag
        if p <= 0.0:
            # float roundoff made an impossible branch win the draw
            keep = ones
            p = p_one
    scale = 1.0 / math.sqrt(p)
    new = [0j] * len(a)
    for i in keep:
        new[i] = a[i] * scale
    return (1 if keep is ones else 0), tuple(new)


def _measure_x(k: int, a: tuple[complex, ...], qubit: int, rng) -> tuple[int, tuple]:
    """X-measure sampling and collapse; returns (bit, amps), bit 1 = minus.

    Projects directly onto the plus/minus pair for the qubit (no basis
    rotation). One uniform draw, as in `_measure_z`.
    """
    pairs = _PAIRS[k][qubit]
    p_plus = 0.0
    for i0, i1 in pairs:
        z = a[i0] + a[i1]
        p_plus += z.real * z.real + z.imag * z.imag
    p_plus *= 0.5
    minus = not rng.random() < p_plus
    if minus:
        p = 0.0
        for i0, i1 in pairs:
            z = a[i0] - a[i1]
            p += z.real * z.real + z.imag * z.imag
        p *= 0.5
        if p <= 0.0:
            minus = False
            p = p_plus
    else:
        p = p_plus
    scale = 0.5 / math.sqrt(p)
    new = [0j] * len(a)
    if minus:
        for i0, i1 in pairs:
            d = (a[i0] - a[i1]) * scale
            new[i0] = d
            new[i1] = -d
    else:
        for i0, i1 in pairs:
            c = (a[i0] + a[i1]) * scale
            new[i0] = c
            new[i1] = c
    return (1 if minus else 0), tuple(new)


_Z_LABELS = (Eigenstate.ZERO, Eigenstate.ONE)
_X_LABELS = (Eigenstate.PLUS, Eigenstate.MINUS)


def measure(s: StateVector, qubit: int, basis: Basis, rng) -> MeasurementOutcome:
    """Measure `qubit` in `basis`, collapsing the whole register.

    The outcome is sampled from the Born distribution; the state is
    projected onto the outcome eigenstate and renormalized. The measured
    qubit stays in the register, left in the reported eigenstate.
    """
    k = s.num_qubits
    if not 0 <= qubit < k:
        raise IndexError(f"qubit {qubit} out of range for {k}-qubit register")
    if basis is Basis.Z:
        bit, amps = _measure_z(k, s.amplitudes, qubit, rng)
        label = _Z_LABELS[bit]
    else:
        bit, amps = _measure_x(k, s.amplitudes, qubit, rng)
        label = _X_LABELS[bit]
    return MeasurementOutcome(label, StateVector(k, amps))


def approx_equal(a: StateVector, b: StateVector, tol: float = 1e-9) -> bool:
    """True iff the vectors match up to a global phase, componentwise.

    Physical states are rays: `b` is compared against `e^{i theta} a`
    with the phase estimated from the largest component of `a`.
    """
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"cannot compare a {a.num_qubits}-qubit state with a {b.num_qubits}-qubit state"
        )
    aa, bb = a.amplitudes, b.amplitudes
    best = max(range(len(aa)), key=lambda i: aa[i].real ** 2 + aa[i].imag ** 2)
    ref = aa[best]
    if abs(ref) == 0.0:
        phase = 1.0 + 0j
    else:
        phase = bb[best] / ref
        mag = abs(phase)
        phase = phase / mag if mag > 0.0 else 1.0 + 0j
    return all(abs(x * phase - y) <= tol for x, y in zip(aa, bb))
