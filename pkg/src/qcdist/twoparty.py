"""Alice/Bob protocol wrapper around quantum counting, with a communication ledger.

Per oracle call Alice sends the index register plus o1 ((n+1) qubits) to Bob
after applying U_x, and Bob returns the same (n+1) qubits after
U_y C U_y.  Alice closes the oracle with U_x and applies the diffusion
reflection locally.  One counting run with register width t therefore moves
2(n+1)(2^t - 1) qubits.  Classical side messages (local means, measured
outcomes) are logged in ``classical_bits`` and kept out of the qubit total.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import counting
from .counting import CountingConfig, CountingOutcome, Engine, OracleKind
from .errors import DegenerateDenominatorError, LocalityError, UsageError
from .qsim import Register

FLOAT_BITS = 64


class Role(enum.Enum):
    ALICE = "alice"
    BOB = "bob"
    # the simulated quantum channel; the fast engine needs the marked count
    SIMULATOR = "simulator"


class Direction(enum.Enum):
    A2B = "alice->bob"
    B2A = "bob->alice"


@dataclass(frozen=True)
class LedgerEntry:
    round: int
    direction: Direction
    qubits: int
    classical_bits: int
    repeat: int = 1
    note: str = ""

    @property
    def total_qubits(self) -> int:
        return self.qubits * self.repeat

    @property
    def total_classical_bits(self) -> int:
        return self.classical_bits * self.repeat


@dataclass
class CommLedger:
    """Ordered message log.

    An entry with ``repeat = k`` stands for the same message sent k times, once
    per Grover iteration; :meth:`messages` expands it.  ``counting_calls``
    keeps the (n, t) of every counting run so totals can be re-derived.
    """

    entries: list[LedgerEntry] = field(default_factory=list)
    counting_calls: list[tuple[int, int]] = field(default_factory=list)
    _round: int = 0

    def log(self, direction: Direction, qubits: int = 0, classical_bits: int = 0,
            repeat: int = 1, note: str = "") -> LedgerEntry:
        entry = LedgerEntry(self._round, direction, qubits, classical_bits, repeat, note)
        self.entries.append(entry)
        self._round += 1
        return entry

    def log_counting(self, n: int, t: int, note: str = "") -> None:
        grover_calls = 2**t - 1
        self.log(Direction.A2B, n + 1, 0, grover_calls, f"{note}index+o1 after U_x".strip())
        self.log(Direction.B2A, n + 1, 0, grover_calls, f"{note}index+o1 after U_y C U_y".strip())
        self.counting_calls.append((n, t))

    def extend(self, other: "CommLedger") -> None:
        for e in other.entries:
            self.entries.append(
                LedgerEntry(self._round, e.direction, e.qubits, e.classical_bits, e.repeat, e.note)
            )
            self._round += 1
        self.counting_calls.extend(other.counting_calls)

    @property
    def total_qubits(self) -> int:
        return sum(e.total_qubits for e in self.entries)

    @property
    def total_classical_bits(self) -> int:
        return sum(e.total_classical_bits for e in self.entries)

    def expected_qubits(self) -> int:
        return sum(counting_cost(n, t) for n, t in self.counting_calls)

    def messages(self) -> Iterator[tuple[Direction, int, int]]:
        """Message stream with repeats expanded, Grover round trips interleaved."""
        i = 0
        while i < len(self.entries):
            e = self.entries[i]
            nxt = self.entries[i + 1] if i + 1 < len(self.entries) else None
            paired = (
                nxt is not None and e.direction is Direction.A2B
                and nxt.direction is Direction.B2A and e.repeat == nxt.repeat > 1
            )
            if paired:
                for _ in range(e.repeat):
                    yield e.direction, e.qubits, e.classical_bits
                    yield nxt.direction, nxt.qubits, nxt.classical_bits
                i += 2
            else:
                for _ in range(e.repeat):
                    yield e.direction, e.qubits, e.classical_bits
                i += 1

    def to_records(self) -> list[dict]:
        return [
            {
                "round": e.round,
                "direction": e.direction.value,
                "qubits": e.qubits,
                "classical_bits": e.classical_bits,
                "repeat": e.repeat,
                "note": e.note,
            }
            for e in self.entries
        ]

    def to_lines(self) -> list[str]:
        return [
            f"{e.round} {e.direction.value} {e.qubits} {e.classical_bits} x{e.repeat}"
            for e in self.entries
        ]


def counting_cost(n: int, t: int) -> int:
    """Qubits exchanged by one counting run: 2(n+1)(2^t - 1)."""
    return 2 * (n + 1) * (2**t - 1)


# ---------------------------------------------------------------------------
# parties
# ---------------------------------------------------------------------------


@dataclass
class AccessAudit:
    reads: list[tuple[Role, Role]] = field(default_factory=list)

    def cross_party_reads(self) -> list[tuple[Role, Role]]:
        return [
            (reader, owner) for reader, owner in self.reads
            if reader is not Role.SIMULATOR and reader is not owner
        ]


class PartyData:
    """Bit vector held by one party; reads are checked and recorded."""

    def __init__(self, role: Role, bits, audit: AccessAudit | None = None):
        if role is Role.SIMULATOR:
            raise UsageError("a party is either Alice or Bob")
        self.role = role
        self._bits = counting.as_bits(bits)
        self.audit = audit if audit is not None else AccessAudit()
        self._mean: float | None = None

    def __len__(self) -> int:
        return self._bits.size

    def read(self, reader: Role) -> np.ndarray:
        self.audit.reads.append((reader, self.role))
        if reader is not self.role and reader is not Role.SIMULATOR:
            raise LocalityError(f"{reader.value} may not read {self.role.value}'s data")
        return self._bits

    def local_mean(self) -> float:
        if self._mean is None:
            self._mean = float(self.read(self.role).mean())
        return self._mean

    def loader(self, n: int):
        target = Register.O1 if self.role is Role.ALICE else Register.O2
        return counting.make_loader(self.read(self.role), target, n)


def parties(x, y) -> tuple[PartyData, PartyData]:
    """Alice holding ``x`` and Bob holding ``y`` with a shared audit log."""
    audit = AccessAudit()
    return PartyData(Role.ALICE, x, audit), PartyData(Role.BOB, y, audit)


@dataclass
class EstimateReport:
    value: float
    std_error: float
    outcomes: list[CountingOutcome]
    ledger: CommLedger
    details: dict = field(default_factory=dict)


def _check_pair(alice: PartyData, bob: PartyData) -> int:
    if alice.role is not Role.ALICE or bob.role is not Role.BOB:
        raise UsageError("expected (Alice, Bob) party data")
    if len(alice) != len(bob):
        raise UsageError(f"data lengths differ: Alice {len(alice)}, Bob {len(bob)}")
    if len(alice) < 1:
        raise UsageError("empty data")
    return len(alice)


def _count_fraction(
    alice: PartyData, bob: PartyData, kind: OracleKind, cfg: CountingConfig,
    rng: np.random.Generator, ledger: CommLedger, note: str = "",
) -> tuple[float, float, CountingOutcome | None]:
    """Estimate the marked fraction over the N real entries.

    Returns (estimate, claimed standard error, outcome).  Counting runs over
    the zero-padded 2**n index range, so the raw estimate is rescaled by
    2**n / N and clipped to [0, 1].
    """
    size = len(alice)
    n = counting.index_width(size)
    scale = 2**n / size
    if cfg.engine is Engine.ORACLE:
        marked = kind.marks(alice.read(Role.SIMULATOR), bob.read(Role.SIMULATOR))
        return float(marked.sum()) / size, 0.0, None
    if cfg.engine is Engine.EXACT:
        # Alice's and Bob's segments each use only their own data loader
        oracle = counting.PhaseOracle(alice.loader(n), bob.loader(n), kind)
        outcome = counting.run_oracle_exact(oracle, n, cfg.t, rng)
    else:
        marked = kind.marks(alice.read(Role.SIMULATOR), bob.read(Role.SIMULATOR))
        outcome = counting.run_counting_fast(float(marked.sum()) / 2**n, cfg, rng)
    ledger.log_counting(n, cfg.t, note)
    # Alice holds and measures the t-register; nothing classical has to flow here
    estimate = min(1.0, outcome.p_hat * scale)
    return estimate, counting.std_error_claim(outcome.p_hat, cfg.t) * scale, outcome


def _rng(cfg: CountingConfig, rng: np.random.Generator | None) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(cfg.seed)


def estimate_product_mean(
    alice: PartyData, bob: PartyData, cfg: CountingConfig,
    rng: np.random.Generator | None = None, note: str = "",
) -> EstimateReport:
    """Estimate (1/N) sum_i x_i y_i with the correlation oracle."""
    _check_pair(alice, bob)
    ledger = CommLedger()
    value, err, outcome = _count_fraction(
        alice, bob, OracleKind.CORRELATION, cfg, _rng(cfg, rng), ledger, note
    )
    return EstimateReport(value, err, [outcome] if outcome else [], ledger)


def estimate_correlation(
    alice: PartyData, bob: PartyData, cfg: CountingConfig,
    rng: np.random.Generator | None = None,
) -> EstimateReport:
    size = _check_pair(alice, bob)
    x_mean = alice.local_mean()
    y_mean = bob.local_mean()
    for who, mean in (("Alice", x_mean), ("Bob", y_mean)):
        if mean in (0.0, 1.0):
            raise DegenerateDenominatorError(f"{who}'s bits are constant; correlation undefined")
    report = estimate_product_mean(alice, bob, cfg, rng)
    ledger = report.ledger
    ledger.log(Direction.A2B, classical_bits=FLOAT_BITS, note="Alice's local mean")
    ledger.log(Direction.B2A, classical_bits=FLOAT_BITS, note="Bob's local mean")
    denom = math.sqrt(x_mean * (1 - x_mean) * y_mean * (1 - y_mean))
    rho = (report.value - x_mean * y_mean) / denom
    return EstimateReport(
        rho, report.std_error / denom, report.outcomes, ledger,
        {"product_mean": report.value, "x_mean": x_mean, "y_mean": y_mean, "n_items": size},
    )


def estimate_hamming(
    alice: PartyData, bob: PartyData, cfg: CountingConfig,
    rng: np.random.Generator | None = None, note: str = "",
) -> EstimateReport:
    """Estimate the Hamming distance d = N * (fraction of x_i != y_i)."""
    size = _check_pair(alice, bob)
    ledger = CommLedger()
    frac, err, outcome = _count_fraction(
        alice, bob, OracleKind.HAMMING, cfg, _rng(cfg, rng), ledger, note
    )
    return EstimateReport(
        frac * size, err * size, [outcome] if outcome else [], ledger,
        {"fraction": frac, "n_items": size},
    )
