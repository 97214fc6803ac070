"""Classical baselines, cost formulas and the N-eps-M region classifier.

Classical cost formulas carry unit constants (only their asymptotic form is
known), the quantum-counting formula carries its explicit constant 11.026.
Swap-test and HHL rows are unit-constant formulas and are never executed.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularDesignError, UsageError
from .lsf import predicted_complexity


class Method(enum.Enum):
    CLASSICAL_DETERMINISTIC = "classical_deterministic"
    CLASSICAL_STOCHASTIC = "classical_stochastic"
    QUANTUM_COUNTING = "quantum_counting"
    SWAP_TEST = "swap_test"
    HHL = "hhl"


class Fidelity(enum.Enum):
    EXPLICIT_CONSTANT = "explicit_constant"
    UNIT_CONSTANT = "unit_constant"  # qualitative only


FIDELITY = {
    Method.CLASSICAL_DETERMINISTIC: Fidelity.UNIT_CONSTANT,
    Method.CLASSICAL_STOCHASTIC: Fidelity.UNIT_CONSTANT,
    Method.QUANTUM_COUNTING: Fidelity.EXPLICIT_CONSTANT,
    Method.SWAP_TEST: Fidelity.UNIT_CONSTANT,
    Method.HHL: Fidelity.UNIT_CONSTANT,
}


@dataclass(frozen=True)
class CostModel:
    method: Method
    value: float
    params: tuple

    @property
    def fidelity(self) -> Fidelity:
        return FIDELITY[self.method]

    @property
    def qualitative(self) -> bool:
        return self.fidelity is Fidelity.UNIT_CONSTANT


def _log_ratio(kappa: float, eps: float) -> float:
    ratio = kappa**2 / eps
    if ratio <= 1.0:
        raise DomainError(f"kappa^2/eps = {ratio:g} <= 1: classical cost undefined")
    return math.log2(ratio)


def cost(method: Method, *, N: float, eps: float, M: int = 1, kappa: float = 1.0,
         u: int = 0, v: int = 0) -> float:
    """Communication cost in bits (classical) or qubits (quantum)."""
    if N <= 1 or eps <= 0 or M < 1 or kappa <= 0:
        raise UsageError("need N > 1, eps > 0, M >= 1, kappa > 0")
    if method is Method.CLASSICAL_DETERMINISTIC:
        return N * _log_ratio(kappa, eps)
    if method is Method.CLASSICAL_STOCHASTIC:
        return (math.log2(N) + _log_ratio(kappa, eps)) * (kappa**2 / eps) ** 2
    if method is Method.QUANTUM_COUNTING:
        return predicted_complexity(N, M, eps, u, v)
    if method is Method.SWAP_TEST:
        return math.log2(N) / eps**2
    return M**2 * kappa**5 * math.log2(N) / eps**2


def cost_model(method: Method, **params) -> CostModel:
    return CostModel(method, cost(method, **params), tuple(sorted(params.items())))


def value_width(kappa: float, eps: float) -> int:
    return max(1, math.ceil(_log_ratio(kappa, eps)))


@dataclass
class StochasticResult:
    lam: np.ndarray
    bits: int
    samples: int
    full_transfer: bool


def run_stochastic_baseline(X, y, eps: float, rng: np.random.Generator,
                            kappa: float = 1.0) -> StochasticResult:
    """Bob sends ceil(1/eps^2) random (index, value) pairs; Alice fits on them.

    Bit widths are accounting only: values travel at full precision in the
    simulation.  If more samples than rows are requested, Bob sends all of y
    without indices (the deterministic baseline).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    size, m = X.shape
    width = value_width(kappa, eps)
    samples = math.ceil(1.0 / eps**2)
    if samples > size:
        idx = np.arange(size)
        bits = size * width
        full = True
    else:
        idx = rng.choice(size, samples, replace=False)
        bits = samples * (max(1, math.ceil(math.log2(size))) + width)
        full = False
    sub = X[idx]
    if np.linalg.matrix_rank(sub) < m:
        raise SingularDesignError(f"{len(idx)} sampled rows do not determine {m} parameters")
    lam, *_ = np.linalg.lstsq(sub, y[idx], rcond=None)
    return StochasticResult(lam, bits, len(idx), full)


# ---------------------------------------------------------------------------
# region classification
# ---------------------------------------------------------------------------

REGIONS = ("ClassicalD", "ClassicalS", "Quantum")


@dataclass(frozen=True)
class PhasePoint:
    N: float
    eps: float
    M: int
    cost_det: float
    cost_sto: float
    cost_q: float
    winner: str


def pick_winner(costs) -> str:
    """Region of the smallest cost; ties go to ClassicalD, then ClassicalS."""
    best = min(costs)
    return REGIONS[list(costs).index(best)]


def classify_region(N: float, eps: float, M: int, kappa: float = 1.0,
                    u: int = 0, v: int = 0) -> PhasePoint:
    try:
        costs = (
            cost(Method.CLASSICAL_DETERMINISTIC, N=N, eps=eps, kappa=kappa),
            cost(Method.CLASSICAL_STOCHASTIC, N=N, eps=eps, kappa=kappa),
            cost(Method.QUANTUM_COUNTING, N=N, eps=eps, M=M, u=u, v=v),
        )
    except DomainError:
        nan = float("nan")
        return PhasePoint(N, eps, M, nan, nan, nan, "n/a")
    return PhasePoint(N, eps, M, *costs, pick_winner(costs))


@dataclass(frozen=True)
class GridSpec:
    n_min: float = 1e2
    n_max: float = 1e8
    n_points: int = 25
    eps_min: float = 1e-4
    eps_max: float = 10**-0.5
    eps_points: int = 25
    ms: tuple = (1, 10, 100)

    def n_values(self) -> np.ndarray:
        return np.geomspace(self.n_min, self.n_max, self.n_points)

    def eps_values(self) -> np.ndarray:
        return np.geomspace(self.eps_min, self.eps_max, self.eps_points)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """``N=1e2:1e8:25;eps=1e-4:0.316:25;M=1,10,100`` (any part optional)."""
        fields = {}
        for part in filter(None, (p.strip() for p in text.split(";"))):
            key, _, value = part.partition("=")
            key = key.strip()
            try:
                if key == "N":
                    lo, hi, cnt = value.split(":")
                    fields.update(n_min=float(lo), n_max=float(hi), n_points=int(cnt))
                elif key == "eps":
                    lo, hi, cnt = value.split(":")
                    fields.update(eps_min=float(lo), eps_max=float(hi), eps_points=int(cnt))
                elif key == "M":
                    fields["ms"] = tuple(int(x) for x in value.split(","))
                else:
                    raise UsageError(f"unknown grid key {key!r}")
            except ValueError as exc:
                raise UsageError(f"bad grid part {part!r}: {exc}") from None
        grid = cls(**fields)
        if grid.n_points < 1 or grid.eps_points < 1 or not grid.ms:
            raise UsageError("grid needs at least one point per axis")
        return grid


def sweep(grid: GridSpec, kappa: float = 1.0) -> list[PhasePoint]:
    return [
        classify_region(float(N), float(eps), int(M), kappa)
        for M in grid.ms
        for eps in grid.eps_values()
        for N in grid.n_values()
    ]


def sweep_csv(points: list[PhasePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "eps", "M", "cost_det", "cost_sto", "cost_q", "winner"])
    for p in points:
        writer.writerow([repr(p.N), repr(p.eps), p.M, repr(p.cost_det), repr(p.cost_sto),
                         repr(p.cost_q), p.winner])
    return buf.getvalue()


def region_counts(points: list[PhasePoint]) -> dict[str, int]:
    counts = {name: 0 for name in (*REGIONS, "n/a")}
    for p in points:
        counts[p.winner] += 1
    return counts


def quantum_boundary(eps: float, M: int, kappa: float = 1.0,
                     n_lo: float = 10.0, n_hi: float = 1e12) -> float:
    """Smallest N (bisection in log N) at which quantum counting beats ClassicalD."""
    def q_wins(N):
        return (cost(Method.QUANTUM_COUNTING, N=N, eps=eps, M=M)
                < cost(Method.CLASSICAL_DETERMINISTIC, N=N, eps=eps, kappa=kappa))

    if q_wins(n_lo) or not q_wins(n_hi):
        raise DomainError("no single crossing inside the search interval")
    lo, hi = math.log(n_lo), math.log(n_hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if q_wins(math.exp(mid)):
            hi = mid
        else:
            lo = mid
    return math.exp(hi)
