"""Distributed softmax regression.

Bob's labels only enter through the class moments g_j = sum_i 1[y_i = c_j] x_i,
which are estimated with the counting pipeline.  Alice then solves the
stationarity conditions

    sum_i x_i softmax(Lambda^T x_i)_j = g_j,   j = 1..q,

locally by minimizing the convex surrogate
sum_i logsumexp(Lambda^T x_i) - sum_j lambda_j . g_j, with the last column of
Lambda pinned to zero to remove the shift redundancy of the softmax.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, softmax

from . import twoparty
from .counting import CountingConfig, Engine
from .errors import ConfigurationError, UsageError
from .lsf import TAG_SOFTMAX, FitConfig, estimate_rows
from .twoparty import CommLedger, EstimateReport


@dataclass(frozen=True)
class LabelSet:
    classes: tuple

    def __post_init__(self):
        if len(self.classes) < 2:
            raise ConfigurationError("need at least two classes")
        if len(set(self.classes)) != len(self.classes):
            raise ConfigurationError("class identifiers must be distinct")

    @classmethod
    def infer(cls, labels) -> "LabelSet":
        return cls(tuple(sorted(set(labels), key=str)))

    @property
    def q(self) -> int:
        return len(self.classes)

    def encode(self, labels) -> np.ndarray:
        lookup = {c: k for k, c in enumerate(self.classes)}
        try:
            return np.array([lookup[y] for y in labels], dtype=np.int64)
        except KeyError as exc:
            raise UsageError(f"unknown label {exc.args[0]!r}") from None


def one_hot_bits(codes, q: int) -> np.ndarray:
    """Row-major N*q bit string: bit (i, j) is set iff codes[i] == j."""
    codes = np.asarray(codes, dtype=np.int64)
    if codes.size and (codes.min() < 0 or codes.max() >= q):
        raise UsageError(f"class codes must lie in [0, {q})")
    bits = np.zeros((codes.size, q), dtype=np.uint8)
    bits[np.arange(codes.size), codes] = 1
    return bits.reshape(-1)


@dataclass
class ClassMoments:
    g: np.ndarray  # (q, M)
    std_error: np.ndarray  # (q, M)
    ledger: CommLedger


@dataclass
class CoefficientMatrix:
    """M x q coefficients; column ``gauge`` is identically zero."""

    values: np.ndarray
    gauge: int
    converged: bool = True
    iterations: int = 0
    grad_norm: float = 0.0
    status: str = "converged"
    history: list = field(default_factory=list)

    def scores(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.values

    def predict(self, X) -> np.ndarray:
        # np.argmax returns the lowest index among ties
        return np.argmax(self.scores(X), axis=1)


def estimate_class_moments(X, codes, q: int, cfg: FitConfig) -> ClassMoments:
    """g_j = sum_i 1[y_i = c_j] x_i via per-class digit-expanded inner products.

    ``cfg.eps`` is the standard error of each normalized entry g_jm / N.
    """
    X = np.asarray(X, dtype=np.float64)
    codes = np.asarray(codes, dtype=np.int64)
    if X.shape[0] != codes.shape[0]:
        raise UsageError(f"X has {X.shape[0]} rows but there are {codes.shape[0]} labels")
    size, m = X.shape
    indicators = one_hot_bits(codes, q).reshape(size, q)
    ledger = CommLedger()
    g = np.zeros((q, m))
    for j in range(q):
        est = estimate_rows(X.T, indicators[:, j], _tagged(cfg, j), TAG_SOFTMAX)
        g[j] = size * est.values
        ledger.extend(est.ledger)
    err = 0.0 if cfg.engine is Engine.ORACLE else size * cfg.eps
    return ClassMoments(g, np.full((q, m), err), ledger)


def _tagged(cfg: FitConfig, j: int) -> FitConfig:
    # one independent stream per class
    return FitConfig(cfg.eps, cfg.engine, cfg.seed * 1_000_003 + j, cfg.digits)


def surrogate(X, free: np.ndarray, g: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Objective, gradient (M x (q-1)) and class probabilities for the free columns."""
    size, m = X.shape
    lam = np.hstack([free, np.zeros((m, 1))])
    z = X @ lam
    probs = softmax(z, axis=1)
    value = float(logsumexp(z, axis=1).sum() - np.sum(lam * g.T))
    grad = X.T @ probs - g.T
    return value, grad[:, :-1], probs


def moment_residual(X, lam: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Model moments minus target moments, (q, M); zero at an exact solution."""
    probs = softmax(np.asarray(X) @ lam, axis=1)
    return (np.asarray(X).T @ probs).T - g


def _hessian(X, probs: np.ndarray) -> np.ndarray:
    """Hessian over the free columns, flattened column-major by class."""
    size, m = X.shape
    k = probs.shape[1] - 1
    p = probs[:, :k]
    hess = np.zeros((k * m, k * m))
    for a in range(k):
        for b in range(a, k):
            w = p[:, a] * ((a == b) - p[:, b])
            block = (X * w[:, None]).T @ X
            hess[a * m:(a + 1) * m, b * m:(b + 1) * m] = block
            hess[b * m:(b + 1) * m, a * m:(a + 1) * m] = block.T
    return hess


def solve_softmax(
    X, moments, tol: float = 1e-8, max_iter: int = 500, norm_bound: float = 1e6
) -> CoefficientMatrix:
    """Damped Newton on the convex surrogate; gradient descent when the Hessian is singular.

    ``moments`` is a :class:`ClassMoments` or a (q, M) array.  Stops when the
    max-norm of the free-column gradient is at most ``tol``.
    """
    X = np.asarray(X, dtype=np.float64)
    g = np.asarray(moments.g if isinstance(moments, ClassMoments) else moments, dtype=np.float64)
    q, m = g.shape
    if X.shape[1] != m:
        raise UsageError(f"moments have {m} attributes, X has {X.shape[1]}")
    free = np.zeros((m, q - 1))
    value, grad, probs = surrogate(X, free, g)
    history = []
    for it in range(max_iter):
        gnorm = float(np.abs(grad).max())
        history.append(gnorm)
        if gnorm <= tol:
            if _saturated(X, probs):
                # the gradient vanished because the norm ran off, not at a finite optimum
                warnings.warn("coefficients diverge; data look separable", RuntimeWarning)
                return _result(free, it, gnorm, False, "separable", history)
            return _result(free, it, gnorm, True, "converged", history)
        if np.abs(free).max(initial=0.0) > norm_bound:
            warnings.warn("coefficients diverge; data look separable", RuntimeWarning)
            return _result(free, it, gnorm, False, "separable", history)
        flat_grad = grad.T.reshape(-1)
        try:
            hess = _hessian(X, probs)
            chol = np.linalg.cholesky(hess + 1e-12 * np.eye(hess.shape[0]))
            step = np.linalg.solve(chol.T, np.linalg.solve(chol, flat_grad))
            direction = -step.reshape(q - 1, m).T
        except np.linalg.LinAlgError:
            direction = -grad
        slope = float(np.sum(direction * grad))
        if slope >= 0:
            direction, slope = -grad, -float(np.sum(grad * grad))
        size = 1.0
        while True:
            cand = free + size * direction
            cand_value, cand_grad, cand_probs = surrogate(X, cand, g)
            if cand_value <= value + 1e-4 * size * slope or size < 1e-12:
                break
            size *= 0.5
        if cand_value > value and np.abs(cand_grad).max() >= gnorm:
            # no progress possible at machine precision
            return _result(free, it, gnorm, gnorm <= tol, "stalled", history)
        free, value, grad, probs = cand, cand_value, cand_grad, cand_probs
    gnorm = float(np.abs(grad).max())
    return _result(free, max_iter, gnorm, gnorm <= tol, "iteration cap", history)


def _saturated(X, probs: np.ndarray, ratio: float = 1e-7) -> bool:
    """Hessian curvature collapsed relative to X^T X: probabilities pinned at 0 or 1."""
    scale = float(np.linalg.eigvalsh(X.T @ X)[-1])
    smallest = float(np.linalg.eigvalsh(_hessian(X, probs))[0])
    return smallest < ratio * scale


def _result(free, iterations, gnorm, converged, status, history) -> CoefficientMatrix:
    m = free.shape[0]
    values = np.hstack([free, np.zeros((m, 1))])
    return CoefficientMatrix(values, values.shape[1] - 1, converged, iterations, gnorm, status, history)


def evaluate_accuracy(
    X, coef: CoefficientMatrix, codes, counting_cfg: CountingConfig,
    rng: np.random.Generator | None = None,
) -> EstimateReport:
    """Accuracy 1 - d/(2N) from the Hamming distance of the one-hot strings."""
    codes = np.asarray(codes, dtype=np.int64)
    q = coef.values.shape[1]
    predicted = coef.predict(X)
    alice, bob = twoparty.parties(one_hot_bits(predicted, q), one_hot_bits(codes, q))
    rep = twoparty.estimate_hamming(alice, bob, counting_cfg, rng)
    size = codes.size
    accuracy = 1.0 - rep.value / (2 * size)
    return EstimateReport(
        accuracy, rep.std_error / (2 * size), rep.outcomes, rep.ledger,
        {"hamming": rep.value, "n_items": size, "classes": q},
    )
