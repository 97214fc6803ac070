"""Exact and empirical error statistics of the quantum least-squares fit.

Every counting run inside a fit is independent, so the bias and variance of
each fitted component follow exactly from the per-run outcome distributions.
This script prints both the exact figures and a Monte Carlo check, with and
without the tail of the phase-estimation error.

    python scripts/lsf_statistics.py --eps 0.05 --seeds 100
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from qcdist import binexp, counting, lsf
from qcdist.counting import Engine
from qcdist.lsf import FitConfig


@dataclass
class Instance:
    X: np.ndarray
    y: np.ndarray

    @classmethod
    def default(cls, size: int = 256, seed: int = 256, noise: float = 0.0) -> "Instance":
        """Intercept plus two standard-normal attributes, lambda = (1, -0.5, 0.25)."""
        rng = np.random.default_rng(seed)
        X = lsf.with_intercept(rng.standard_normal(size=(size, 2)))
        y = X @ np.array([1.0, -0.5, 0.25]) + noise * rng.normal(size=size)
        return cls(X, y)


def estimate_moments(p_true: float, t: int, scale: float) -> tuple[float, float]:
    """Mean and variance of min(1, scale * sin^2(pi j / 2^t)) under the outcome law."""
    probs = counting.outcome_distribution(p_true, t)
    values = np.minimum(1.0, scale * counting.estimate_fraction(np.arange(2**t), t))
    mean = float(probs @ values)
    return mean, float(probs @ (values - mean) ** 2)


def exact_statistics(inst: Instance, eps: float) -> dict[str, np.ndarray]:
    size = inst.X.shape[0]
    a = lsf.pseudoinverse_rows(inst.X)
    u, v = binexp.top_exponent(a), binexp.top_exponent(inst.y)
    budget = lsf.error_budget(eps, u, v, range(a.shape[0]), size)
    digits = budget.r_max + 1
    xexp, yexp = binexp.expand(a, digits, u), binexp.expand(inst.y, digits, v)
    m = a.shape[0]
    mean, var = np.zeros(m), np.zeros(m)
    for j in range(m):
        row = xexp.row(j)
        for r in range(digits):
            ext = binexp.ExtendedIndexMap(size, r)
            scale = ext.padded_length / ext.length
            weight = 2.0 ** (u + v - r) * (r + 1)
            for pair in binexp.SIGN_PAIRS:
                xa, yb = binexp.build_convolution_vectors(row, yexp, r, pair)
                p = float(xa.astype(int) @ yb.astype(int)) / ext.padded_length
                mu, s2 = estimate_moments(p, budget.width(r), scale)
                mean[j] += weight * binexp.sign_weight(pair) * mu
                var[j] += weight**2 * s2
    ref = np.linalg.pinv(inst.X) @ inst.y
    bias = mean - ref
    return {"bias": bias, "std": np.sqrt(var), "rmse": np.sqrt(bias**2 + var),
            "u": np.array([u]), "v": np.array([v]), "r_max": np.array([budget.r_max])}


def empirical_rmse(inst: Instance, eps: float, seeds: int) -> np.ndarray:
    ref = np.linalg.pinv(inst.X) @ inst.y
    fits = np.array([
        lsf.fit_least_squares(inst.X, inst.y, FitConfig(eps, Engine.FAST, s)).lam
        for s in range(seeds)
    ])
    return np.sqrt(np.mean((fits - ref) ** 2, axis=0))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, default=0.05)
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--noise", type=float, default=0.0)
    args = ap.parse_args(argv)

    inst = Instance.default(args.size, noise=args.noise)
    stats = exact_statistics(inst, args.eps)
    np.set_printoptions(precision=4, suppress=True)
    print(f"N={args.size} eps={args.eps} u={stats['u'][0]} v={stats['v'][0]} r_max={stats['r_max'][0]}")
    print("exact bias      ", stats["bias"])
    print("exact std       ", stats["std"])
    print("exact rmse      ", stats["rmse"])
    print("exact rmse / eps", stats["rmse"] / args.eps)
    if args.seeds:
        print(f"empirical rmse ({args.seeds} seeds)", empirical_rmse(inst, args.eps, args.seeds))


if __name__ == "__main__":
    main()
