"""Distributed least-squares fitting on top of the counting protocol.

Alice owns the design matrix X (N x M), Bob the targets y.  Alice forms
N X^+ locally; every component lambda_j = (1/N) sum_i (N X^+)_{ji} y_i is an
inner product of Alice's row with Bob's vector.  Both are expanded into
digit planes (:mod:`qcdist.binexp`) and the sum over digit order r,

    lambda_j = 2^(u+v) sum_r 2^-r (r+1) f_jr,

is estimated term by term, each f_jr as four sign-part product means over an
extended index of N(r+1) entries.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import binexp, counting, twoparty
from .counting import CountingConfig, Engine
from .errors import EmptyBudgetError, NumericError, SingularDesignError, UsageError
from .twoparty import CommLedger, Direction, EstimateReport

BUDGET_CONSTANT = 0.449
COMPLEXITY_CONSTANT = 11.026
ORACLE_DIGITS = 40

# stream tags for derived RNG seeds
TAG_LAMBDA = 1
TAG_MSE = 2
TAG_SOFTMAX = 3


@dataclass(frozen=True)
class FitConfig:
    """``eps`` is the target standard error per fitted component.

    ``digits`` caps the expansion depth K; with the oracle engine it sets K
    (default 40) and every order r < K is summed.
    """

    eps: float | None = None
    engine: Engine = Engine.FAST
    seed: int = 0
    digits: int | None = None


@dataclass(frozen=True)
class BudgetRow:
    j: int
    r: int
    eps_jr: float
    t_jr: int
    dropped: bool


@dataclass
class BudgetTable:
    rows: list[BudgetRow]
    r_max: int

    def width(self, r: int) -> int:
        return next(row.t_jr for row in self.rows if row.r == r and not row.dropped)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "r", "eps_jr", "t_jr", "dropped"])
        for row in self.rows:
            writer.writerow([row.j, row.r, repr(row.eps_jr), row.t_jr, int(row.dropped)])
        return buf.getvalue()


@dataclass
class FitReport:
    lam: np.ndarray
    budget: BudgetTable | None
    ledger: CommLedger
    engine: Engine
    seed: int
    lam_exact: np.ndarray | None = None
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# local linear algebra (Alice)
# ---------------------------------------------------------------------------


def with_intercept(attributes) -> np.ndarray:
    attrs = np.asarray(attributes, dtype=np.float64)
    if attrs.ndim == 1:
        attrs = attrs[:, None]
    return np.hstack([np.ones((attrs.shape[0], 1)), attrs])


def pseudoinverse_rows(X) -> np.ndarray:
    """N X^+ (M x N) from a thin QR factorization; rejects rank deficiency."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or not np.isfinite(X).all():
        raise UsageError("design matrix must be a finite 2-D array")
    size, m = X.shape
    if size < m:
        raise SingularDesignError(f"need N >= M, got N={size}, M={m}")
    q, r = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * max(diag.max(), 1e-300):
        raise SingularDesignError("design matrix is rank deficient")
    pinv = scipy.linalg.solve_triangular(r, q.T)
    residual = np.abs(pinv @ X - np.eye(m)).max()
    if residual >= 1e-10:
        raise NumericError(f"pseudoinverse residual {residual:.2e} too large")
    return size * pinv


def condition_number(X) -> float:
    """Infinity-norm condition number of A = X^T X / N."""
    X = np.asarray(X, dtype=np.float64)
    a = X.T @ X / X.shape[0]
    return float(np.linalg.norm(a, np.inf) * np.linalg.norm(np.linalg.inv(a), np.inf))


# ---------------------------------------------------------------------------
# error budget
# ---------------------------------------------------------------------------


def term_error(eps: float, u: int, v: int, r: int) -> float:
    """Allotted standard error of f_jr."""
    return eps * BUDGET_CONSTANT / (2.0 ** (u + v) * (r + 1) ** (2 / 3)) * 2.0 ** (2 * r / 3)


def error_budget(eps: float, u: int, v: int, rows=(0,), size: int | None = None) -> BudgetTable:
    """Per-(j, r) allocation; orders with eps_jr >= 1 are dropped.

    Each of the four sign-part estimates gets eps_jr / 2.  When ``size`` (N)
    is given, the target is also tightened by N(r+1) / 2^n' because counting
    runs over the zero-padded extended index of length 2^n'.  The first
    dropped order is kept in the table for reference.
    """
    if not eps > 0:
        raise UsageError(f"eps must be positive, got {eps}")
    if term_error(eps, u, v, 0) >= 1.0:
        raise EmptyBudgetError(
            f"eps={eps} with u+v={u + v} drops every term; lower eps"
        )
    table: list[BudgetRow] = []
    r = 0
    while True:
        e = term_error(eps, u, v, r)
        dropped = e >= 1.0
        t = 0
        if not dropped:
            target = e / 2
            if size is not None:
                ext = binexp.ExtendedIndexMap(size, r)
                target *= ext.length / ext.padded_length
            t = counting.register_width_for_error(target)
        for j in rows:
            table.append(BudgetRow(j, r, e, t, dropped))
        if dropped:
            return BudgetTable(table, r - 1)
        r += 1


def predicted_complexity(size: int, m: int, eps: float, u: int, v: int) -> float:
    """Closed-form qubit count 11.026 * 2^(v+1) 2^u M log2(N) / eps."""
    if min(size, m, eps) <= 0:
        raise UsageError("N, M and eps must be positive")
    return COMPLEXITY_CONSTANT * 2.0 ** (v + 1) * 2.0**u * m * math.log2(size) / eps


def predicted_complexity_kappa(size: int, m: int, eps: float, kappa: float,
                               y_inf: float, x_inf: float) -> float:
    """Order-of-magnitude form with 2^(u+v) replaced by kappa |y|_inf / ||X||_inf."""
    return COMPLEXITY_CONSTANT * 2.0 * kappa * y_inf / x_inf * m * math.log2(size) / eps


# ---------------------------------------------------------------------------
# distributed inner products
# ---------------------------------------------------------------------------


@dataclass
class RowEstimate:
    values: np.ndarray
    budget: BudgetTable | None
    ledger: CommLedger
    u: int
    v: int
    digits: int
    terms: np.ndarray  # (rows, r) estimated f_jr


def estimate_rows(alice_rows, bob_vector, cfg: FitConfig, tag: int = TAG_LAMBDA) -> RowEstimate:
    """Estimate (1/N) A y for Alice's rows A (R x N) and Bob's vector y (N)."""
    a = np.atleast_2d(np.asarray(alice_rows, dtype=np.float64))
    y = np.asarray(bob_vector, dtype=np.float64)
    if a.shape[1] != y.shape[0]:
        raise UsageError(f"Alice has {a.shape[1]} entries per row, Bob has {y.shape[0]}")
    size = y.shape[0]
    ledger = CommLedger()
    u = binexp.top_exponent(a)
    v = binexp.top_exponent(y)
    # exponents are exchanged so both sides agree on the digit grid
    ledger.log(Direction.A2B, classical_bits=8, note="Alice's top exponent u")
    ledger.log(Direction.B2A, classical_bits=8, note="Bob's top exponent v")

    if cfg.engine is Engine.ORACLE:
        budget = None
        digits = cfg.digits or ORACLE_DIGITS
        r_max = digits - 1
    else:
        if cfg.eps is None:
            raise UsageError("a target eps is required for quantum estimation")
        budget = error_budget(cfg.eps, u, v, range(a.shape[0]), size)
        r_max = budget.r_max
        digits = min(r_max + 1, cfg.digits) if cfg.digits else r_max + 1

    xexp = binexp.expand(a, digits, u)
    yexp = binexp.expand(y, digits, v)
    terms = np.zeros((a.shape[0], r_max + 1))
    for j in range(a.shape[0]):
        xrow = xexp.row(j)
        for r in range(r_max + 1):
            t = budget.width(r) if budget else 1
            f = 0.0
            for p, pair in enumerate(binexp.SIGN_PAIRS):
                xa, yb = binexp.build_convolution_vectors(xrow, yexp, r, pair)
                alice, bob = twoparty.parties(xa, yb)
                rng = np.random.default_rng([cfg.seed, tag, j, r, p])
                rep = twoparty.estimate_product_mean(
                    alice, bob, CountingConfig(t, cfg.engine, cfg.seed), rng,
                    note=f"j={j} r={r} pair={pair}: ",
                )
                ledger.extend(rep.ledger)
                f += binexp.sign_weight(pair) * rep.value
            terms[j, r] = f
    weights = 2.0 ** -np.arange(r_max + 1) * (np.arange(r_max + 1) + 1)
    values = 2.0 ** (u + v) * terms @ weights
    return RowEstimate(values, budget, ledger, u, v, digits, terms)


def fit_least_squares(X, y, cfg: FitConfig) -> FitReport:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] != y.shape[0]:
        raise UsageError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    scaled_pinv = pseudoinverse_rows(X)
    est = estimate_rows(scaled_pinv, y, cfg, TAG_LAMBDA)
    size, m = X.shape
    details = {
        "u": est.u,
        "v": est.v,
        "digits": est.digits,
        "kappa": condition_number(X),
        "terms": est.terms,
    }
    if cfg.eps is not None:
        details["predicted_qubits"] = predicted_complexity(max(size, 2), m, cfg.eps, est.u, est.v)
    return FitReport(
        est.values, est.budget, est.ledger, cfg.engine, cfg.seed,
        lam_exact=scaled_pinv @ y / size, details=details,
    )


def evaluate_mse(X, lam, y, cfg: FitConfig) -> EstimateReport:
    """E = mean(y^2) + mean(yhat^2) - 2 mean(y * yhat) with the cross term estimated."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    yhat = X @ np.asarray(lam, dtype=np.float64)
    ledger = CommLedger()
    y2 = float(np.mean(y**2))  # at Bob
    ledger.log(Direction.B2A, classical_bits=twoparty.FLOAT_BITS, note="Bob's mean(y^2)")
    yhat2 = float(np.mean(yhat**2))  # at Alice
    cross = estimate_rows(yhat, y, cfg, TAG_MSE)
    ledger.extend(cross.ledger)
    value = y2 + yhat2 - 2.0 * float(cross.values[0])
    std = 0.0 if cfg.engine is Engine.ORACLE else 2.0 * cfg.eps
    return EstimateReport(
        value, std, [], ledger,
        {"mean_y2": y2, "mean_yhat2": yhat2, "cross": float(cross.values[0])},
    )

