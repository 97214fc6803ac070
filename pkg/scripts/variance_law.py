"""Spread of the counting estimate p_hat against the linearized claim.

For each (p, t) prints the exact standard deviation of p_hat under the
outcome law, a Monte Carlo estimate, the claimed sqrt(p(1-p)) 2^(1-t), and
the standard deviation restricted to the two main peaks (|j - j*| <= 1),
which isolates the effect of the heavy tail.

    python scripts/variance_law.py --draws 100000
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from qcdist import counting


def exact_std(p: float, t: int, window: int | None = None) -> float:
    probs = counting.outcome_distribution(p, t)
    j = np.arange(2**t)
    if window is not None:
        peak = 2**t * math.asin(math.sqrt(p)) / math.pi
        dist = np.minimum(np.abs(j - peak), np.abs(j - (2**t - peak)))
        probs = np.where(dist <= window + 0.5, probs, 0.0)
        probs /= probs.sum()
    est = counting.estimate_fraction(j, t)
    mean = probs @ est
    return float(np.sqrt(probs @ (est - mean) ** 2))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=4)
    ap.add_argument("--p", type=float, nargs="+", default=[0.1, 0.25, 0.5])
    ap.add_argument("--t", type=int, nargs="+", default=[5, 6, 7, 8, 10])
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print("p,t,claimed,exact,monte_carlo,peak_only,exact_over_claimed")
    for p in args.p:
        for t in args.t:
            claimed = counting.std_error_claim(p, t)
            draws = counting.sample_outcomes(p, t, args.draws, rng)
            mc = float(np.std(counting.estimate_fraction(draws, t)))
            ex = exact_std(p, t)
            ratio = ex / claimed if claimed else float("nan")
            print(f"{p},{t},{claimed:.3e},{ex:.3e},{mc:.3e},{exact_std(p, t, 1):.3e},{ratio:.2f}")


if __name__ == "__main__":
    main()
