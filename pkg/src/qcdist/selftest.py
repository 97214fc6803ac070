"""Fast internal consistency checks behind ``qcdist selftest``."""

from __future__ import annotations

import numpy as np

from . import baselines, counting, lsf, qsim, twoparty
from .counting import CountingConfig, Engine, OracleKind


def _check_oracle_phases():
    x = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=np.uint8)
    y = np.array([1, 1, 0, 1, 0, 1, 1, 0], dtype=np.uint8)
    worst = 0.0
    for kind in OracleKind:
        oracle = counting.build_phase_oracle(x, y, kind)
        state = qsim.apply_hadamard_layer(qsim.init_zero(1, 3), qsim.Register.INDEX)
        out = oracle(state.tensor)
        ideal = state.tensor * np.where(kind.marks(x, y), -1.0, 1.0)[None, :, None, None]
        worst = max(worst, float(np.abs(out - ideal).max()))
    return worst < 1e-12, f"max deviation {worst:.1e}"


def _check_engines():
    x = np.array([1, 0, 1, 0, 1, 1, 0], dtype=np.uint8)
    y = np.array([1, 1, 0, 0, 1, 0, 1], dtype=np.uint8)
    exact = counting.exact_outcome_distribution(x, y, OracleKind.CORRELATION, 5)
    analytic = counting.outcome_distribution(2 / 8, 5)
    tv = 0.5 * float(np.abs(exact - analytic).sum())
    return tv < 1e-9, f"total variation {tv:.1e}"


def _check_ledger():
    alice, bob = twoparty.parties(np.ones(1024, np.uint8), np.ones(1024, np.uint8))
    rep = twoparty.estimate_hamming(alice, bob, CountingConfig(5, Engine.FAST))
    q = rep.ledger.total_qubits
    return q == 682 == rep.ledger.expected_qubits(), f"{q} qubits"


def _check_lsf_oracle():
    rng = np.random.default_rng(7)
    X = lsf.with_intercept(rng.normal(size=(40, 2)))
    y = X @ np.array([0.5, -1.0, 2.0]) + 0.1 * rng.normal(size=40)
    fit = lsf.fit_least_squares(X, y, lsf.FitConfig(engine=Engine.ORACLE))
    ref, *_ = np.linalg.lstsq(X, y, rcond=None)
    err = float(np.abs(fit.lam - ref).max())
    return err < 1e-8, f"max error {err:.1e}"


def _check_phase_boundary():
    n = baselines.quantum_boundary(0.01, 1)
    return 1e3 <= n <= 1e5, f"boundary N={n:.0f}"


CHECKS = {
    "oracle_phases": _check_oracle_phases,
    "engine_agreement": _check_engines,
    "ledger_law": _check_ledger,
    "lsf_oracle": _check_lsf_oracle,
    "phase_boundary": _check_phase_boundary,
}


def run_all() -> list[tuple[str, bool, str]]:
    results = []
    for name, check in CHECKS.items():
        try:
            ok, msg = check()
        except Exception as exc:  # report, don't abort the remaining checks
            ok, msg = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, msg))
    return results
