"""Command-line interface.

    qcdist correlation  --alice a.csv --bob b.csv (--eps E | --t T)
    qcdist hamming      --alice a.csv --bob b.csv (--eps E | --t T)
    qcdist fit-lsq      --alice X.csv --bob y.csv --eps E
    qcdist fit-softmax  --alice X.csv --bob labels.csv --eps E [--classes Q]
    qcdist phase-diagram [--grid SPEC] [--out sweep.csv]
    qcdist selftest

Reports are ``key=value`` lines followed by optional ``[section]`` tables.
Exit codes: 0 ok, 2 usage, 3 parse, 4 numeric/rank, 5 budget.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import baselines, counting, lsf, softmax, twoparty
from .counting import CountingConfig, Engine
from .errors import ParseError, QcdistError, UsageError


@dataclass(frozen=True)
class RunConfig:
    command: str
    alice: str | None = None
    bob: str | None = None
    eps: float | None = None
    t: int | None = None
    engine: Engine = Engine.FAST
    seed: int = 0
    digits: int | None = None
    classes: int | None = None
    out: str | None = None
    grid: str | None = None

    def echo(self) -> list[tuple[str, object]]:
        return [
            (f"config.{k}", getattr(self, k).value if k == "engine" else getattr(self, k))
            for k in ("alice", "bob", "eps", "t", "engine", "seed", "digits", "classes", "grid")
        ]


# ---------------------------------------------------------------------------
# CSV input
# ---------------------------------------------------------------------------


def _read_rows(path: str | None, role: str) -> tuple[list[str], list[tuple[int, list[str]]]]:
    if not path:
        raise UsageError(f"--{role} is required")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{role} file not found: {path}")
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, header row required") from None
        rows = [(reader.line_num, [c.strip() for c in row]) for row in reader if row]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return header, rows


def read_bits(path: str | None, role: str) -> np.ndarray:
    header, rows = _read_rows(path, role)
    bits = []
    for line, row in rows:
        if len(row) != 1 or row[0] not in ("0", "1"):
            raise ParseError(f"{path}:{line}: expected a single 0/1 cell, got {','.join(row)!r}")
        bits.append(int(row[0]))
    return np.array(bits, dtype=np.uint8)


def read_matrix(path: str | None, role: str, columns: int | None = None) -> np.ndarray:
    header, rows = _read_rows(path, role)
    width = len(header) if columns is None else columns
    data = []
    for line, row in rows:
        if len(row) != width:
            raise ParseError(f"{path}:{line}: expected {width} columns, got {len(row)}")
        try:
            values = [float(c) for c in row]
        except ValueError:
            raise ParseError(f"{path}:{line}: non-numeric cell in {','.join(row)!r}") from None
        if not np.isfinite(values).all():
            raise ParseError(f"{path}:{line}: non-finite value")
        data.append(values)
    return np.array(data, dtype=np.float64)


def read_labels(path: str | None, role: str) -> list[str]:
    header, rows = _read_rows(path, role)
    labels = []
    for line, row in rows:
        if len(row) != 1 or not row[0]:
            raise ParseError(f"{path}:{line}: expected a single label cell")
        labels.append(row[0])
    return labels


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return "" if value is None else str(value)


class Report:
    def __init__(self, cfg: RunConfig):
        self.lines: list[str] = [f"command={cfg.command}"]
        self.add_many(cfg.echo())
        self.sections: list[tuple[str, list[str]]] = []

    def add(self, key: str, value) -> None:
        self.lines.append(f"{key}={_fmt(value)}")

    def add_many(self, items) -> None:
        for key, value in items:
            self.add(key, value)

    def section(self, name: str, lines: list[str]) -> None:
        self.sections.append((name, lines))

    def ledger(self, ledger: twoparty.CommLedger) -> None:
        expected = ledger.expected_qubits()
        if ledger.total_qubits != expected:
            raise RuntimeError(f"ledger self-check failed: {ledger.total_qubits} != {expected}")
        self.add("ledger.total_qubits", ledger.total_qubits)
        self.add("ledger.total_classical_bits", ledger.total_classical_bits)
        self.add("ledger.counting_calls", len(ledger.counting_calls))
        self.add("ledger.check", "ok")
        if len(ledger.entries) <= 64:
            self.section("ledger", ["round direction qubits classical_bits repeat"] + ledger.to_lines())

    def render(self) -> str:
        out = list(self.lines)
        for name, lines in self.sections:
            out.append(f"[{name}]")
            out.extend(lines)
        return "\n".join(out) + "\n"


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _counting_cfg(cfg: RunConfig) -> CountingConfig:
    if cfg.engine is Engine.ORACLE:
        return CountingConfig(cfg.t or 1, Engine.ORACLE, cfg.seed)
    if (cfg.eps is None) == (cfg.t is None):
        raise UsageError("give exactly one of --eps or --t")
    t = cfg.t if cfg.t is not None else counting.register_width_for_error(cfg.eps)
    return CountingConfig(t, cfg.engine, cfg.seed)


def _estimator(cfg: RunConfig, kind: str) -> str:
    x = read_bits(cfg.alice, "alice")
    y = read_bits(cfg.bob, "bob")
    if x.size != y.size:
        raise UsageError(f"Alice has {x.size} rows, Bob has {y.size}")
    ccfg = _counting_cfg(cfg)
    alice, bob = twoparty.parties(x, y)
    if kind == "hamming":
        rep = twoparty.estimate_hamming(alice, bob, ccfg)
    else:
        rep = twoparty.estimate_correlation(alice, bob, ccfg)
    report = Report(cfg)
    report.add("estimate.t", ccfg.t if ccfg.engine is not Engine.ORACLE else None)
    report.add("estimate.n_items", x.size)
    report.add("estimate.index_qubits", counting.index_width(x.size))
    report.add("estimate.value", rep.value)
    report.add("estimate.std_error", rep.std_error)
    for key, value in rep.details.items():
        if key != "n_items":
            report.add(f"estimate.{key}", value)
    for k, o in enumerate(rep.outcomes):
        report.add(f"outcome.{k}.j", o.j)
        report.add(f"outcome.{k}.theta_hat", o.theta_hat)
        report.add(f"outcome.{k}.p_hat", o.p_hat)
    report.ledger(rep.ledger)
    return report.render()


def cmd_correlation(cfg: RunConfig) -> str:
    return _estimator(cfg, "correlation")


def cmd_hamming(cfg: RunConfig) -> str:
    return _estimator(cfg, "hamming")


def _fit_cfg(cfg: RunConfig) -> lsf.FitConfig:
    if cfg.t is not None:
        raise UsageError("fit commands take --eps, not --t")
    if cfg.engine is not Engine.ORACLE and cfg.eps is None:
        raise UsageError("--eps is required unless --engine oracle")
    return lsf.FitConfig(cfg.eps, cfg.engine, cfg.seed, cfg.digits)


def _budget_section(report: Report, budget: lsf.BudgetTable | None) -> None:
    if budget is not None:
        report.add("budget.r_max", budget.r_max)
        report.section("budget", budget.to_csv().splitlines())


def cmd_fit_lsq(cfg: RunConfig) -> str:
    fcfg = _fit_cfg(cfg)
    X = lsf.with_intercept(read_matrix(cfg.alice, "alice"))
    y = read_matrix(cfg.bob, "bob", columns=1)[:, 0]
    if X.shape[0] != y.size:
        raise UsageError(f"Alice has {X.shape[0]} rows, Bob has {y.size}")
    fit = lsf.fit_least_squares(X, y, fcfg)
    report = Report(cfg)
    report.add("fit.n_items", X.shape[0])
    report.add("fit.parameters", X.shape[1])
    for key in ("u", "v", "digits", "kappa", "predicted_qubits"):
        if key in fit.details:
            report.add(f"fit.{key}", fit.details[key])
    for j, value in enumerate(fit.lam):
        report.add(f"lambda.{j}", value)
    for j, value in enumerate(fit.lam_exact):
        report.add(f"lambda_classical.{j}", value)
    report.ledger(fit.ledger)
    _budget_section(report, fit.budget)
    return report.render()


def _label_set(labels: list[str], classes: int | None) -> softmax.LabelSet:
    if classes is None:
        return softmax.LabelSet.infer(labels)
    names = tuple(str(k) for k in range(classes))
    if set(labels) <= set(names):
        return softmax.LabelSet(names)
    inferred = softmax.LabelSet.infer(labels)
    if inferred.q != classes:
        raise UsageError(f"--classes {classes} but labels contain {inferred.q} distinct values")
    return inferred


def cmd_fit_softmax(cfg: RunConfig) -> str:
    fcfg = _fit_cfg(cfg)
    X = lsf.with_intercept(read_matrix(cfg.alice, "alice"))
    labels = read_labels(cfg.bob, "bob")
    if X.shape[0] != len(labels):
        raise UsageError(f"Alice has {X.shape[0]} rows, Bob has {len(labels)}")
    label_set = _label_set(labels, cfg.classes)
    codes = label_set.encode(labels)
    moments = softmax.estimate_class_moments(X, codes, label_set.q, fcfg)
    coef = softmax.solve_softmax(X, moments)
    if cfg.engine is Engine.ORACLE:
        ccfg = CountingConfig(1, Engine.ORACLE, cfg.seed)
    else:
        ccfg = CountingConfig(counting.register_width_for_error(cfg.eps), cfg.engine, cfg.seed)
    acc = softmax.evaluate_accuracy(X, coef, codes, ccfg)
    ledger = twoparty.CommLedger()
    ledger.extend(moments.ledger)
    ledger.extend(acc.ledger)

    report = Report(cfg)
    report.add("fit.n_items", X.shape[0])
    report.add("fit.parameters", X.shape[1])
    report.add("fit.classes", ",".join(label_set.classes))
    report.add("solver.status", coef.status)
    report.add("solver.iterations", coef.iterations)
    report.add("solver.grad_norm", coef.grad_norm)
    for j, name in enumerate(label_set.classes):
        for m in range(X.shape[1]):
            report.add(f"moment.{name}.{m}", moments.g[j, m])
        for m in range(X.shape[1]):
            report.add(f"coef.{name}.{m}", coef.values[m, j])
    report.add("accuracy.value", acc.value)
    report.add("accuracy.hamming", acc.details["hamming"])
    report.add("accuracy.std_error", acc.std_error)
    report.ledger(ledger)
    return report.render()


def cmd_phase_diagram(cfg: RunConfig) -> tuple[str, str]:
    grid = baselines.GridSpec.parse(cfg.grid) if cfg.grid else baselines.GridSpec()
    points = baselines.sweep(grid)
    counts = baselines.region_counts(points)
    summary = "regions " + " ".join(f"{k}={v}" for k, v in counts.items())
    summary += "\nconstants " + " ".join(
        f"{col}={baselines.FIDELITY[m].value}"
        for col, m in (("cost_det", baselines.Method.CLASSICAL_DETERMINISTIC),
                       ("cost_sto", baselines.Method.CLASSICAL_STOCHASTIC),
                       ("cost_q", baselines.Method.QUANTUM_COUNTING))
    )
    return baselines.sweep_csv(points), summary


def cmd_selftest(cfg: RunConfig) -> tuple[str, bool]:
    from . import selftest

    results = selftest.run_all()
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {msg}" for name, ok, msg in results]
    return "\n".join(lines) + "\n", all(ok for _, ok, _ in results)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("correlation", "hamming", "fit-lsq", "fit-softmax", "phase-diagram", "selftest"):
        p = sub.add_parser(name)
        p.add_argument("--alice")
        p.add_argument("--bob")
        p.add_argument("--eps", type=float)
        p.add_argument("--t", type=int)
        p.add_argument("--engine", choices=[e.value for e in Engine], default="fast")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--digits", type=int)
        p.add_argument("--classes", type=int)
        p.add_argument("--out")
        p.add_argument("--grid")
        p.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    return parser


def parse_config(argv=None) -> tuple[RunConfig, bool]:
    args = build_parser().parse_args(argv)
    if args.eps is not None and not args.eps > 0:
        raise UsageError("--eps must be positive")
    cfg = RunConfig(
        command=args.command, alice=args.alice, bob=args.bob, eps=args.eps, t=args.t,
        engine=Engine(args.engine), seed=args.seed, digits=args.digits,
        classes=args.classes, out=args.out, grid=args.grid,
    )
    return cfg, args.timing


COMMANDS = {
    "correlation": cmd_correlation,
    "hamming": cmd_hamming,
    "fit-lsq": cmd_fit_lsq,
    "fit-softmax": cmd_fit_softmax,
}


def main(argv=None) -> int:
    start = time.perf_counter()
    try:
        cfg, timing = parse_config(argv)
        if cfg.command == "phase-diagram":
            text, summary = cmd_phase_diagram(cfg)
            _emit(text, cfg)
            print(summary, file=sys.stdout if cfg.out else sys.stderr)
        elif cfg.command == "selftest":
            text, ok = cmd_selftest(cfg)
            _emit(text, cfg)
            if not ok:
                return 1
        else:
            _emit(COMMANDS[cfg.command](cfg), cfg)
    except QcdistError as exc:
        print(f"qcdist: error: {exc}", file=sys.stderr)
        return exc.exit_code
    if timing:
        print(f"elapsed_s={time.perf_counter() - start:.3f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
