"""Write the N-eps-M cost sweep and report region boundaries.

    python scripts/phase_diagram.py --out sweep.csv
"""

from __future__ import annotations

import argparse
from pathlib import Path

from qcdist import baselines
from qcdist.errors import DomainError


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", help="grid spec, e.g. 'N=1e2:1e8:25;eps=1e-4:0.316:25;M=1,10,100'")
    ap.add_argument("--out", type=Path, default=Path("phase_diagram.csv"))
    args = ap.parse_args(argv)

    grid = baselines.GridSpec.parse(args.grid) if args.grid else baselines.GridSpec()
    points = baselines.sweep(grid)
    args.out.write_text(baselines.sweep_csv(points), encoding="utf-8")
    print(f"wrote {len(points)} points to {args.out}")
    print("region counts:", baselines.region_counts(points))
    for m in grid.ms:
        for eps in (1e-3, 1e-2, 1e-1):
            try:
                n = baselines.quantum_boundary(eps, m)
                print(f"M={m:<4d} eps={eps:<6g} Quantum beats ClassicalD from N ~ {n:.3g}")
            except DomainError as exc:
                print(f"M={m:<4d} eps={eps:<6g} no crossing: {exc}")


if __name__ == "__main__":
    main()
