"""Run orchestration: Monte Carlo executions, the exact branch-enumeration
oracle, and metric aggregation.

`run` drives the full quantum pipeline round by round and reduces the
transcript to a RunReport. `enumerate_distribution` is the independent
cross-check: it never touches the statevector engine, walking the
discrete branch tree with hand-derived conditional probability tables in
exact rational arithmetic. Tests compare Monte Carlo frequencies against
the oracle's closed-form values.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Iterable, Sequence

from .adversary import AdversaryKind, tap_backward, tap_forward
from .protocol import (
    BobRoundRecord,
    DetectionResult,
    InsufficientKeyError,
    KeyMaterial,
    ProtocolVariant,
    SiftResult,
    Verdict,
    alice_measure_round,
    alice_prepare_round,
    bob_round_action,
    detect_and_finalize,
    sift,
)
from .qubits import Basis, Eigenstate


@dataclass(frozen=True, slots=True)
class ProtocolConfig:
    """Parameters of one protocol execution."""

    n: int
    variant: ProtocolVariant = ProtocolVariant.ORIGINAL
    adversary: AdversaryKind = AdversaryKind.NONE
    threshold: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"round count must be >= 1, got {self.n}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")


@dataclass(frozen=True, slots=True)
class RunReport:
    """Aggregated metrics of one protocol execution."""

    n: int
    sifted_length: int
    check_error_rate: float
    verdict: Verdict
    final_key_length: int
    keys_agree: bool
    eve_known_final_bits: int
    leakage_fraction: float


@dataclass(slots=True)
class RoundTranscript:
    """Per-round ground truth of one execution, as parallel lists."""

    bob_bits: list[int]
    bob_records: list[BobRoundRecord]
    alice_values: list[int]
    eve_knows: list[bool]
    eve_guesses: list[int | None]


@dataclass(slots=True)
class RunDetail:
    """A RunReport together with the intermediate data it was reduced from."""

    report: RunReport
    transcript: RoundTranscript
    keys: KeyMaterial
    sifted: SiftResult
    detection: DetectionResult | None


def simulate_rounds(config: ProtocolConfig, rng: Random) -> RoundTranscript:
    """Execute n rounds of the quantum pipeline sequentially.

    Per-round draw order: adversary forward tap (if it measures), Bob's
    key bit, Bob's measurement (if bit 1), adversary backward tap (if it
    measures), Alice's basis bit, Alice's measurement.
    """
    kind = config.adversary
    bob_bits: list[int] = []
    bob_records: list[BobRoundRecord] = []
    alice_values: list[int] = []
    eve_knows: list[bool] = []
    eve_guesses: list[int | None] = []
    getbit = rng.getrandbits
    prepare, forward = alice_prepare_round, tap_forward
    bob, backward, alice = bob_round_action, tap_backward, alice_measure_round
    for _ in range(config.n):
        reg = prepare()
        reg = forward(reg, kind, rng)
        bit = getbit(1)
        reg, record = bob(reg, bit, rng)
        reg, guess = backward(reg, kind, rng)
        _, value = alice(reg, rng)
        bob_bits.append(bit)
        bob_records.append(record)
        alice_values.append(value)
        eve_knows.append(guess.knows_bit)
        eve_guesses.append(guess.guessed_value)
    return RoundTranscript(bob_bits, bob_records, alice_values, eve_knows, eve_guesses)


def run_detailed(config: ProtocolConfig) -> RunDetail:
    """Run the protocol end to end, keeping intermediate data."""
    rng = Random(config.seed)
    transcript = simulate_rounds(config, rng)
    sifted = sift(
        transcript.alice_values,
        transcript.bob_bits,
        transcript.bob_records,
        config.variant,
    )
    sifted_length = len(sifted.alice_bits)
    try:
        detection = detect_and_finalize(
            sifted.alice_bits, sifted.bob_bits, config.threshold, rng
        )
    except InsufficientKeyError:
        # Degenerate run: too little key to even test, reported as an abort.
        report = RunReport(
            n=config.n,
            sifted_length=sifted_length,
            check_error_rate=0.0,
            verdict=Verdict.ABORT,
            final_key_length=0,
            keys_agree=True,
            eve_known_final_bits=0,
            leakage_fraction=0.0,
        )
        keys = KeyMaterial(
            transcript.alice_values,
            transcript.bob_bits,
            sifted.alice_bits,
            sifted.bob_bits,
            [],
            [],
        )
        return RunDetail(report, transcript, keys, sifted, None)

    final_key_length = len(detection.alice_key)
    eve_known = 0
    if detection.verdict is Verdict.ACCEPT:
        check_set = set(detection.check_positions)
        for j, position in enumerate(sifted.kept_positions):
            if j not in check_set and transcript.eve_knows[position]:
                eve_known += 1
    leakage = eve_known / final_key_length if final_key_length else 0.0
    report = RunReport(
        n=config.n,
        sifted_length=sifted_length,
        check_error_rate=detection.error_rate,
        verdict=detection.verdict,
        final_key_length=final_key_length,
        keys_agree=detection.alice_key == detection.bob_key,
        eve_known_final_bits=eve_known,
        leakage_fraction=leakage,
    )
    keys = KeyMaterial(
        transcript.alice_values,
        transcript.bob_bits,
        sifted.alice_bits,
        sifted.bob_bits,
        detection.alice_key,
        detection.bob_key,
    )
    return RunDetail(report, transcript, keys, sifted, detection)


def run(config: ProtocolConfig) -> RunReport:
    """Run the protocol and return its report. Deterministic per seed."""
    return run_detailed(config).report


# --- Exact branch enumeration -------------------------------------------

_HALF = Fraction(1, 2)
_ONE = Fraction(1)

# Born-rule tables for the only states that ever return to Alice,
# derived by hand from the eigenstate decompositions:
#   plus = (zero + one)/sqrt2,  zero = (plus + minus)/sqrt2,
#   one  = (plus - minus)/sqrt2.
_BORN: dict[tuple[str, Basis], dict[Eigenstate, Fraction]] = {
    ("plus", Basis.Z): {Eigenstate.ZERO: _HALF, Eigenstate.ONE: _HALF},
    ("plus", Basis.X): {Eigenstate.PLUS: _ONE},
    ("zero", Basis.Z): {Eigenstate.ZERO: _ONE},
    ("zero", Basis.X): {Eigenstate.PLUS: _HALF, Eigenstate.MINUS: _HALF},
    ("one", Basis.Z): {Eigenstate.ONE: _ONE},
    ("one", Basis.X): {Eigenstate.PLUS: _HALF, Eigenstate.MINUS: _HALF},
}

BranchKey = tuple[int, int | None, Basis, Eigenstate, bool]


@dataclass(slots=True)
class BranchDistribution:
    """Exact per-round branch probabilities and the metrics they imply.

    `branches` maps (bob_bit, bob_outcome, alice_basis, alice_outcome,
    eve_knows) to its exact probability; the map is identical for both
    sifting variants, while the derived metrics depend on the variant.
    """

    variant: ProtocolVariant
    adversary: AdversaryKind
    branches: dict[BranchKey, Fraction] = field(repr=False)
    keep_probability: Fraction = Fraction(0)
    error_rate: Fraction = Fraction(0)
    knows_bit_probability: Fraction = Fraction(0)
    leakage_fraction: Fraction = Fraction(0)


def _bob_contexts(
    adversary: AdversaryKind, bob_bit: int
) -> Iterable[tuple[Fraction, int | None, str, bool]]:
    """Enumerate (probability, bob_outcome, state returned to Alice, eve_knows).

    Hand-derived branch structure, kept deliberately independent of the
    statevector engine:

    - No adversary: Bob receives plus. Reflection returns plus;
      measuring gives zero/one with probability 1/2 each and returns a
      fresh zero either way.
    - Entangling probe: the first C-NOT turns plus (x) zero into the Bell
      pair (zero zero + one one)/sqrt2. If Bob reflects, the second
      C-NOT restores plus (x) zero, so the probe reads zero and Eve
      learns nothing. If Bob measures, channel and probe collapse
      together (1/2 each way); the fresh zero Bob returns is untouched by
      the second C-NOT, and the probe retains Bob's outcome, so outcome
      one is known to Eve with certainty.
    - Measure-resend: Eve's forward Z measurement turns plus into
      zero/one with probability 1/2 each. Reflection returns Eve's
      eigenstate; if Bob measures he sees that eigenstate's bit with
      certainty and returns a fresh zero.
    """
    if adversary is AdversaryKind.NONE:
        if bob_bit == 0:
            yield _ONE, None, "plus", False
        else:
            yield _HALF, 0, "zero", False
            yield _HALF, 1, "zero", False
    elif adversary is AdversaryKind.DOUBLE_CNOT:
        if bob_bit == 0:
            yield _ONE, None, "plus", False
        else:
            yield _HALF, 0, "zero", False
            yield _HALF, 1, "zero", True
    elif adversary is AdversaryKind.MEASURE_RESEND:
        if bob_bit == 0:
            yield _HALF, None, "zero", False
            yield _HALF, None, "one", False
        else:
            yield _HALF, 0, "zero", False
            yield _HALF, 1, "zero", False
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown adversary {adversary!r}")


def _alice_value(outcome: Eigenstate) -> int:
    if outcome is Eigenstate.ONE:
        return 0
    if outcome is Eigenstate.MINUS:
        return 1
    return -1


def enumerate_distribution(
    variant: ProtocolVariant, adversary: AdversaryKind
) -> BranchDistribution:
    """Walk every discrete branch of one round with exact rationals.

    Returns the full branch map plus the derived per-round metrics:
    probability a position survives sifting, conditional error rate
    among surviving positions, probability Eve learns the bit, and the
    expected fraction of the final key Eve knows (check positions are a
    uniform subset of the survivors, so the conditional probability
    carries over to the final key unchanged).
    """
    branches: dict[BranchKey, Fraction] = {}
    for bob_bit in (0, 1):
        for p_ctx, bob_outcome, returned, knows in _bob_contexts(adversary, bob_bit):
            for basis in (Basis.Z, Basis.X):
                for outcome, p_out in _BORN[returned, basis].items():
                    key = (bob_bit, bob_outcome, basis, outcome, knows)
                    p = _HALF * p_ctx * _HALF * p_out
                    branches[key] = branches.get(key, Fraction(0)) + p
    total = sum(branches.values())
    if total != 1:  # pragma: no cover - structural sanity check
        raise AssertionError(f"branch probabilities sum to {total}, not 1")

    improved = variant is ProtocolVariant.IMPROVED
    keep = Fraction(0)
    mismatch = Fraction(0)
    knows_p = Fraction(0)
    known_kept = Fraction(0)
    for (bob_bit, bob_outcome, _basis, outcome, knows), p in branches.items():
        if knows:
            knows_p += p
        kept = _alice_value(outcome) != -1 and not (improved and bob_outcome == 1)
        if not kept:
            continue
        keep += p
        if _alice_value(outcome) != bob_bit:
            mismatch += p
        if knows:
            known_kept += p
    error = mismatch / keep if keep else Fraction(0)
    leakage = known_kept / keep if keep else Fraction(0)
    return BranchDistribution(
        variant=variant,
        adversary=adversary,
        branches=branches,
        keep_probability=keep,
        error_rate=error,
        knows_bit_probability=knows_p,
        leakage_fraction=leakage,
    )


# --- Aggregation ---------------------------------------------------------


@dataclass(slots=True)
class MetricStats:
    """Mean/min/max of one metric; stderr only for frequency metrics."""

    mean: float
    min: float
    max: float
    stderr: float | None = None


@dataclass(slots=True)
class RunSummary:
    trials: int
    abort_count: int
    metrics: dict[str, MetricStats]


_FREQUENCY_METRICS = frozenset({"keep_rate", "check_error_rate", "leakage_fraction"})


def aggregate(reports: Sequence[RunReport]) -> RunSummary:
    """Summarize several reports: per-metric stats plus the abort count."""
    if not reports:
        raise ValueError("cannot aggregate an empty report sequence")
    columns: dict[str, list[float]] = {
        "sifted_length": [float(r.sifted_length) for r in reports],
        "keep_rate": [r.sifted_length / r.n for r in reports],
        "check_error_rate": [r.check_error_rate for r in reports],
        "final_key_length": [float(r.final_key_length) for r in reports],
        "eve_known_final_bits": [float(r.eve_known_final_bits) for r in reports],
        "leakage_fraction": [r.leakage_fraction for r in reports],
    }
    metrics = {}
    for name, values in columns.items():
        stderr = None
        if name in _FREQUENCY_METRICS and len(values) > 1:
            stderr = statistics.stdev(values) / math.sqrt(len(values))
        metrics[name] = MetricStats(
            mean=statistics.fmean(values),
            min=min(values),
            max=max(values),
            stderr=stderr,
        )
    abort_count = sum(1 for r in reports if r.verdict is Verdict.ABORT)
    return RunSummary(trials=len(reports), abort_count=abort_count, metrics=metrics)


def standard_error(p: float, samples: int) -> float:
    """Binomial standard error of a frequency estimated from `samples` draws."""
    if samples < 1:
        raise ValueError("sample count must be >= 1")
    return math.sqrt(p * (1.0 - p) / samples)
