import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcdist import lsf
from qcdist.counting import Engine
from qcdist.errors import EmptyBudgetError, SingularDesignError, UsageError
from qcdist.lsf import FitConfig


def design(size, m, seed):
    rng = np.random.default_rng(seed)
    return lsf.with_intercept(rng.normal(size=(size, m - 1)))


def test_pseudoinverse_rows_match_numpy():
    X = design(50, 4, 0)
    np.testing.assert_allclose(lsf.pseudoinverse_rows(X), 50 * np.linalg.pinv(X), atol=1e-10)


def test_rank_deficiency_rejected():
    X = design(20, 3, 1)
    X[:, 2] = 2 * X[:, 1]
    with pytest.raises(SingularDesignError):
        lsf.pseudoinverse_rows(X)
    with pytest.raises(SingularDesignError):
        lsf.pseudoinverse_rows(np.ones((2, 3)))


def test_condition_number_identity_design():
    X = np.vstack([np.eye(3)] * 4)
    assert lsf.condition_number(X) == pytest.approx(1.0)


def test_term_error_formula():
    assert lsf.term_error(0.01, 0, 0, 0) == pytest.approx(0.00449)
    e3 = 0.01 * 0.449 * 4.0 / 4 ** (2 / 3)
    assert lsf.term_error(0.01, 0, 0, 3) == pytest.approx(e3)
    assert lsf.term_error(0.01, 1, 1, 0) == pytest.approx(0.00449 / 4)


def test_budget_series_sums_near_one():
    total = sum(
        (2.0**-r * (r + 1) * lsf.term_error(1.0, 0, 0, r)) ** 2 for r in range(200)
    )
    assert total == pytest.approx(0.99873, abs=1e-4)


def test_error_budget_drops_large_orders():
    table = lsf.error_budget(0.01, 0, 0)
    assert table.r_max == 15
    kept = [row for row in table.rows if not row.dropped]
    assert all(row.eps_jr < 1 for row in kept)
    assert table.rows[-1].dropped and table.rows[-1].eps_jr >= 1
    # widths never grow with r because the allotted error grows
    widths = [row.t_jr for row in kept]
    assert widths == sorted(widths, reverse=True)


def test_error_budget_csv_columns():
    csv_text = lsf.error_budget(0.1, 0, 0, rows=(0, 1)).to_csv()
    assert csv_text.splitlines()[0] == "j,r,eps_jr,t_jr,dropped"


def test_empty_budget():
    with pytest.raises(EmptyBudgetError):
        lsf.error_budget(10.0, 0, 0)


def test_predicted_complexity_closed_form():
    # 11.026 * 2^(0+1) * 2^0 * 1 * log2(1024) / 0.01
    assert lsf.predicted_complexity(2**10, 1, 0.01, 0, 0) == pytest.approx(22052.0, rel=1e-12)
    assert lsf.predicted_complexity(2**10, 3, 0.01, 1, 2) == pytest.approx(22052.0 * 3 * 8)


@given(st.integers(8, 200), st.integers(1, 5), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_oracle_fit_matches_pseudoinverse(size, m, seed):
    X = design(size, m, seed)
    y = np.random.default_rng(seed + 1).normal(size=size) * 3
    fit = lsf.fit_least_squares(X, y, FitConfig(engine=Engine.ORACLE))
    np.testing.assert_allclose(fit.lam, np.linalg.pinv(X) @ y, atol=1e-8)
    assert fit.ledger.total_qubits == 0


def test_fast_fit_is_seed_reproducible_and_logs_ledger():
    X = design(32, 2, 3)
    y = X @ np.array([0.3, -0.2])
    cfg = FitConfig(eps=0.1, engine=Engine.FAST, seed=7)
    a = lsf.fit_least_squares(X, y, cfg)
    b = lsf.fit_least_squares(X, y, cfg)
    np.testing.assert_array_equal(a.lam, b.lam)
    assert a.ledger.total_qubits == a.ledger.expected_qubits() > 0
    # four sign pairs per (j, r)
    assert len(a.ledger.counting_calls) == 4 * 2 * (a.budget.r_max + 1)


def test_fast_fit_tracks_solution_loosely():
    X = design(64, 2, 5)
    y = X @ np.array([0.5, 0.25]) + 0.01
    fits = [lsf.fit_least_squares(X, y, FitConfig(0.05, Engine.FAST, s)).lam for s in range(8)]
    ref = np.linalg.pinv(X) @ y
    assert np.abs(np.mean(fits, axis=0) - ref).max() < 0.15


def test_exact_engine_agrees_with_fast_in_law():
    # tiny instance: both engines run, estimate stays in a sane range
    X = lsf.with_intercept(np.array([0.0, 1.0, 2.0, 3.0]))
    y = np.array([0.1, 0.9, 2.1, 2.9])
    fit = lsf.fit_least_squares(X, y, FitConfig(0.5, Engine.EXACT, 0))
    assert fit.ledger.total_qubits == fit.ledger.expected_qubits()
    assert np.isfinite(fit.lam).all()


def test_missing_eps():
    X = design(8, 2, 0)
    with pytest.raises(UsageError):
        lsf.fit_least_squares(X, np.ones(8), FitConfig(engine=Engine.FAST))


def test_evaluate_mse_oracle():
    X = design(40, 3, 2)
    y = np.random.default_rng(4).normal(size=40)
    lam = np.linalg.pinv(X) @ y
    rep = lsf.evaluate_mse(X, lam, y, FitConfig(engine=Engine.ORACLE))
    assert rep.value == pytest.approx(np.mean((y - X @ lam) ** 2), abs=1e-9)


def test_kappa_form_is_positive():
    assert lsf.predicted_complexity_kappa(1024, 2, 0.01, 3.0, 2.0, 1.0) > 0
    assert math.isfinite(lsf.predicted_complexity(2, 1, 1.0, 0, 0))
