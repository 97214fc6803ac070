"""Phase oracles, the Grover operator, and quantum counting.

Two engines produce the measured t-register value ``j``:

* ``Engine.EXACT`` simulates the whole circuit on a statevector
  (H layers, controlled Grover powers, inverse QFT, measurement);
* ``Engine.FAST`` samples ``j`` from the closed-form outcome distribution of
  phase estimation with the two Grover eigenphases +theta and -theta.

``Engine.ORACLE`` is not a quantum engine: callers use it to substitute the
exact classical value for the counted fraction (verification workflows).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import qsim
from .errors import ConfigurationError, UsageError
from .qsim import Gate, Register

Block = np.ndarray
Loader = Callable[[Block], Block]


class OracleKind(enum.Enum):
    CORRELATION = "correlation"
    HAMMING = "hamming"

    def marks(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Boolean vector of marked indices (phase -1)."""
        x = np.asarray(x, dtype=bool)
        y = np.asarray(y, dtype=bool)
        return x & y if self is OracleKind.CORRELATION else x ^ y


class Engine(enum.Enum):
    EXACT = "exact"
    FAST = "fast"
    ORACLE = "oracle"


@dataclass(frozen=True)
class CountingConfig:
    t: int
    engine: Engine = Engine.FAST
    seed: int = 0

    def __post_init__(self):
        if self.t < 1:
            raise ConfigurationError(f"register width t must be >= 1, got {self.t}")


@dataclass(frozen=True)
class CountingOutcome:
    j: int
    t: int
    theta_hat: float
    p_hat: float
    grover_calls: int

    @classmethod
    def from_j(cls, j: int, t: int, grover_calls: int | None = None) -> "CountingOutcome":
        if grover_calls is None:
            grover_calls = 2**t - 1
        return cls(j, t, 2 * math.pi * j / 2**t, estimate_fraction(j, t), grover_calls)


def as_bits(values) -> np.ndarray:
    """Validate a 0/1 sequence and return it as a uint8 array."""
    bits = np.asarray(values)
    if bits.ndim != 1:
        raise UsageError("bit vector must be one-dimensional")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise UsageError("bit vector must contain only 0 and 1")
    return bits.astype(np.uint8)


def index_width(num_items: int) -> int:
    """Index qubits for ``num_items`` entries, ceil(log2 N), but at least 1."""
    if num_items < 1:
        raise UsageError("need at least one data entry")
    return max(1, (num_items - 1).bit_length())


def make_loader(bits, target: Register, n: int) -> Loader:
    """Block-level U_data: XOR the (zero-padded) bits into ``target``."""
    mask = qsim.data_mask(bits, n)
    return lambda block: qsim.block_data_load(block, mask, target)


@dataclass
class PhaseOracle:
    """U_x U_y C U_y U_x with C = CZ (correlation) or CNOT Z CNOT (Hamming).

    ``load_x`` writes Alice's bit into o1, ``load_y`` writes Bob's bit into o2.
    Every call increments ``calls``; ``loads`` counts data-load applications
    (four per call).
    """

    load_x: Loader
    load_y: Loader
    kind: OracleKind
    calls: int = 0
    loads: int = 0

    def alice_open(self, block: Block) -> Block:
        self.loads += 1
        return self.load_x(block)

    def bob_segment(self, block: Block) -> Block:
        block = self.load_y(block)
        if self.kind is OracleKind.CORRELATION:
            block = qsim.block_two_qubit(block, Gate.CZ, Register.O1, Register.O2)
        else:
            block = qsim.block_two_qubit(block, Gate.CNOT, Register.O1, Register.O2)
            block = qsim.block_z(block, Register.O2)
            block = qsim.block_two_qubit(block, Gate.CNOT, Register.O1, Register.O2)
        self.loads += 2
        return self.load_y(block)

    def alice_close(self, block: Block) -> Block:
        self.loads += 1
        return self.load_x(block)

    def __call__(self, block: Block) -> Block:
        self.calls += 1
        return self.alice_close(self.bob_segment(self.alice_open(block)))


def build_phase_oracle(x, y, kind: OracleKind, n: int | None = None) -> PhaseOracle:
    x, y = as_bits(x), as_bits(y)
    if x.size != y.size:
        raise UsageError(f"bit vectors differ in length: {x.size} != {y.size}")
    if n is None:
        n = index_width(x.size)
    return PhaseOracle(make_loader(x, Register.O1, n), make_loader(y, Register.O2, n), kind)


@dataclass
class GroverOperator:
    """H^n (2|0><0| - I) H^n O acting on blocks of shape (B, 2**n, 2, 2)."""

    oracle: PhaseOracle
    n: int
    calls: int = field(default=0)

    def __call__(self, block: Block) -> Block:
        self.calls += 1
        block = self.oracle(block)
        block = qsim.block_hadamard_index(block)
        block = qsim.block_reflect_zero(block)
        return qsim.block_hadamard_index(block)


def simulate_counting(oracle: PhaseOracle, n: int, t: int) -> tuple[qsim.StateVector, int]:
    """Run |psi_0> -> |psi_3> and return the final state and Grover call count."""
    grover = GroverOperator(oracle, n)
    s = qsim.init_zero(t, n)
    s = qsim.apply_hadamard_layer(s, Register.T)
    s = qsim.apply_hadamard_layer(s, Register.INDEX)
    s, calls = qsim.apply_controlled_powers(s, grover)
    s = qsim.inverse_qft(s)
    expected = 2**t - 1
    if calls != expected or grover.calls != expected or oracle.calls != expected:
        raise RuntimeError(f"Grover iteration count {grover.calls} != {expected}")
    return s, calls


def exact_outcome_distribution(x, y, kind: OracleKind, t: int) -> np.ndarray:
    """t-register marginal of the simulated final state."""
    oracle = build_phase_oracle(x, y, kind)
    s, _ = simulate_counting(oracle, index_width(len(x)), t)
    return qsim.register_marginal(s, Register.T)


def run_oracle_exact(
    oracle: PhaseOracle, n: int, t: int, rng: np.random.Generator
) -> CountingOutcome:
    s, calls = simulate_counting(oracle, n, t)
    j, _ = qsim.measure_register(s, Register.T, rng)
    return CountingOutcome.from_j(j, t, calls)


def run_counting_exact(
    x, y, kind: OracleKind, cfg: CountingConfig, rng: np.random.Generator | None = None
) -> CountingOutcome:
    """Full statevector quantum counting over the zero-padded 2**n index range."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    x, y = as_bits(x), as_bits(y)
    n = index_width(x.size)
    oracle = build_phase_oracle(x, y, kind, n)
    return run_oracle_exact(oracle, n, cfg.t, rng)


def _dirichlet_weight(delta: np.ndarray, size: int) -> np.ndarray:
    """|sum_{tau<size} exp(i delta tau)|^2 / size^2."""
    delta = np.remainder(delta + math.pi, 2 * math.pi) - math.pi
    out = np.ones_like(delta)
    live = np.abs(delta) > 1e-12
    d = delta[live]
    out[live] = (np.sin(size * d / 2) / (size * np.sin(d / 2))) ** 2
    return out


def outcome_distribution(p_true: float, t: int) -> np.ndarray:
    """P(j) for j = 0..2**t-1 when a fraction ``p_true`` of indices is marked.

    The uniform index state has weight 1/2 on each Grover eigenvector, with
    eigenphases +theta and -theta, theta = 2 arcsin(sqrt(p)).  At theta = 0 or
    pi the two branches coincide and the formula reduces to one kernel.
    """
    if not (0.0 <= p_true <= 1.0):
        raise UsageError(f"fraction {p_true} outside [0, 1]")
    size = 2**t
    theta = 2.0 * math.asin(math.sqrt(p_true))
    grid = 2.0 * math.pi * np.arange(size) / size
    return 0.5 * _dirichlet_weight(theta - grid, size) + 0.5 * _dirichlet_weight(
        -theta - grid, size
    )


def sample_outcomes(
    p_true: float, t: int, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Inverse-CDF draws of ``j`` from :func:`outcome_distribution`."""
    cdf = np.cumsum(outcome_distribution(p_true, t))
    draws = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
    return np.minimum(draws, 2**t - 1)


def run_counting_fast(
    p_true: float, cfg: CountingConfig, rng: np.random.Generator | None = None
) -> CountingOutcome:
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    j = int(sample_outcomes(p_true, cfg.t, 1, rng)[0])
    return CountingOutcome.from_j(j, cfg.t)


def estimate_fraction(j, t: int):
    """sin^2(pi j / 2^t); accepts scalars or arrays."""
    value = np.sin(np.pi * np.asarray(j) / 2**t) ** 2
    return float(value) if np.ndim(value) == 0 else value


def std_error_claim(p: float, t: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0)) * 2.0 ** (-t + 1)


def register_width_for_error(eps: float, p_guess: float | None = None) -> int:
    """Smallest t >= 1 with sqrt(p(1-p)) 2^{-t+1} <= eps (p = 1/2 if not given)."""
    if not eps > 0:
        raise ConfigurationError(f"target error must be positive, got {eps}")
    p = 0.5 if p_guess is None else p_guess
    spread = math.sqrt(max(p * (1.0 - p), 0.0))
    if spread == 0.0:
        return 1
    # 2^{-t+1} <= eps / spread  <=>  t >= 1 + log2(spread / eps)
    t = max(1, math.ceil(1.0 + math.log2(spread / eps)))
    while t > 1 and spread * 2.0 ** (-(t - 1) + 1) <= eps:
        t -= 1
    while spread * 2.0 ** (-t + 1) > eps:
        t += 1
    return t
