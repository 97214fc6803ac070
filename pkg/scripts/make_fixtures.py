"""Regenerate the CSV fixtures under tests/fixtures.

The least-squares solution file is computed with numpy.linalg.lstsq, an
independent classical solver, and committed so tests compare against a frozen
value.  The golden exact-engine report is written by running the CLI.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from qcdist import cli


def write_column(path: Path, header: str, values) -> None:
    path.write_text(header + "\n" + "".join(f"{v}\n" for v in values), encoding="utf-8")


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dir", default=Path(__file__).resolve().parents[1] / "tests" / "fixtures",
                    type=Path)
    args = ap.parse_args(argv)
    out = args.dir
    out.mkdir(parents=True, exist_ok=True)

    write_column(out / "alice4.csv", "x", [1, 0, 1, 0])
    write_column(out / "bob4.csv", "y", [1, 1, 0, 0])
    write_column(out / "bad.csv", "x", [1, 2, 0])

    rng = np.random.default_rng(2024)
    size = 32
    attrs = rng.uniform(-1, 1, size=(size, 2))
    X = np.hstack([np.ones((size, 1)), attrs])
    y = X @ np.array([0.25, -0.5, 0.75]) + 0.05 * rng.normal(size=size)
    (out / "lsq_alice.csv").write_text(
        "a1,a2\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in attrs), encoding="utf-8"
    )
    write_column(out / "lsq_bob.csv", "y", [repr(float(v)) for v in y])
    lam, *_ = np.linalg.lstsq(X, y, rcond=None)
    (out / "lsq_solution.txt").write_text(
        "# numpy.linalg.lstsq solution, intercept first\n"
        + "".join(f"{float(v)!r}\n" for v in lam), encoding="utf-8"
    )

    weights = np.array([[0.2, -0.3, 0.0], [1.5, -1.0, 0.0], [-0.5, 1.2, 0.0]])
    z = X @ weights
    probs = np.exp(z - z.max(axis=1, keepdims=True))
    probs /= probs.sum(axis=1, keepdims=True)
    labels = [("cat", "dog", "fox")[rng.choice(3, p=p)] for p in probs]
    write_column(out / "softmax_labels.csv", "label", labels)

    golden = out / "golden_correlation_exact.txt"
    cli.main(["correlation", "--alice", "tests/fixtures/alice4.csv",
              "--bob", "tests/fixtures/bob4.csv", "--t", "4", "--engine", "exact",
              "--seed", "0", "--out", str(golden)])
    golden = out / "golden_hamming_exact.txt"
    cli.main(["hamming", "--alice", "tests/fixtures/alice4.csv",
              "--bob", "tests/fixtures/bob4.csv", "--t", "4", "--engine", "exact",
              "--seed", "0", "--out", str(golden)])


if __name__ == "__main__":
    main()
