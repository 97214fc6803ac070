import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcdist import counting, qsim
from qcdist.counting import CountingConfig, Engine, OracleKind
from qcdist.errors import ConfigurationError, UsageError
from qcdist.qsim import Register

bitvec = st.lists(st.integers(0, 1), min_size=1, max_size=12)


def uniform_block(n):
    s = qsim.apply_hadamard_layer(qsim.init_zero(1, n), Register.INDEX)
    return s.tensor[:1].copy()


@given(bitvec, st.data())
@settings(max_examples=60, deadline=None)
def test_oracle_imprints_ideal_phase(x, data):
    y = data.draw(st.lists(st.integers(0, 1), min_size=len(x), max_size=len(x)))
    n = counting.index_width(len(x))
    for kind in OracleKind:
        oracle = counting.build_phase_oracle(x, y, kind)
        block = uniform_block(n)
        marks = np.zeros(2**n, dtype=bool)
        marks[: len(x)] = kind.marks(np.array(x), np.array(y))
        expected = block * np.where(marks, -1.0, 1.0)[None, :, None, None]
        np.testing.assert_allclose(oracle(block), expected, atol=1e-12)
        assert oracle.loads == 4


def test_oracle_restores_workspace_for_any_ancilla_state():
    x, y = [1, 0, 1, 1], [1, 1, 0, 1]
    oracle = counting.build_phase_oracle(x, y, OracleKind.CORRELATION)
    rng = np.random.default_rng(0)
    block = rng.normal(size=(1, 4, 2, 2)) + 0j
    out = oracle(block)
    # CZ after loading gives phase (-1)^{(a xor x_i)(b xor y_i)}
    for i in range(4):
        for a in range(2):
            for b in range(2):
                sign = (-1) ** ((a ^ x[i]) & (b ^ y[i]))
                assert out[0, i, a, b] == pytest.approx(sign * block[0, i, a, b])


def test_index_width():
    assert [counting.index_width(k) for k in (1, 2, 3, 4, 5, 1024, 1025)] == [1, 1, 2, 2, 3, 10, 11]


def test_grover_call_count_is_exact():
    oracle = counting.build_phase_oracle([1, 0, 1], [1, 1, 1], OracleKind.CORRELATION)
    _, calls = counting.simulate_counting(oracle, 2, 4)
    assert calls == 15 and oracle.calls == 15


@pytest.mark.parametrize("t", [1, 3, 6, 9])
@pytest.mark.parametrize("p", [0.0, 0.03, 0.25, 0.5, 0.77, 1.0])
def test_outcome_distribution_is_normalized_and_symmetric(p, t):
    probs = counting.outcome_distribution(p, t)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert (probs >= 0).all()
    # j and 2^t - j give the same estimate and the same weight
    np.testing.assert_allclose(probs[1:], probs[1:][::-1], atol=1e-13)


def test_fast_engine_matches_exact_engine():
    x = [1, 1, 0, 1, 0, 0, 1]
    y = [1, 0, 0, 1, 1, 0, 1]
    exact = counting.exact_outcome_distribution(x, y, OracleKind.CORRELATION, 5)
    analytic = counting.outcome_distribution(3 / 8, 5)
    assert 0.5 * np.abs(exact - analytic).sum() < 1e-9


def test_grid_exact_half():
    probs = counting.outcome_distribution(0.5, 4)
    assert probs[4] == pytest.approx(0.5, abs=1e-10)
    assert probs[12] == pytest.approx(0.5, abs=1e-10)


def test_estimate_fraction_inverts_grid_points():
    assert counting.estimate_fraction(0, 5) == 0.0
    assert counting.estimate_fraction(16, 5) == pytest.approx(1.0)
    assert counting.estimate_fraction(8, 5) == pytest.approx(0.5)


def test_outcome_from_j_fields():
    o = counting.CountingOutcome.from_j(3, 4)
    assert o.theta_hat == pytest.approx(2 * math.pi * 3 / 16)
    assert o.p_hat == pytest.approx(math.sin(math.pi * 3 / 16) ** 2)


def test_fast_engine_is_seed_deterministic():
    cfg = CountingConfig(6, Engine.FAST, seed=42)
    a = counting.run_counting_fast(0.3, cfg)
    b = counting.run_counting_fast(0.3, cfg)
    assert a == b


def test_sampler_reproduces_distribution(rng):
    p, t = 0.2, 4
    draws = counting.sample_outcomes(p, t, 200_000, rng)
    freq = np.bincount(draws, minlength=16) / draws.size
    np.testing.assert_allclose(freq, counting.outcome_distribution(p, t), atol=5e-3)


def test_register_width_for_error():
    # smallest t with sqrt(p(1-p)) 2^{-t+1} <= eps at p = 1/2
    assert counting.register_width_for_error(0.25) == 2
    assert counting.register_width_for_error(2.0**-9) == 9
    assert counting.register_width_for_error(1.0) == 1
    assert counting.register_width_for_error(0.1, p_guess=0.0) == 1
    with pytest.raises(ConfigurationError):
        counting.register_width_for_error(0.0)


@given(st.floats(1e-6, 1.0), st.floats(0.0, 1.0))
def test_register_width_is_minimal(eps, p):
    t = counting.register_width_for_error(eps, p)
    assert counting.std_error_claim(p, t) <= eps
    if t > 1:
        assert counting.std_error_claim(p, t - 1) > eps


def test_exact_engine_rejects_length_mismatch():
    with pytest.raises(UsageError):
        counting.build_phase_oracle([1, 0], [1], OracleKind.HAMMING)


def test_exact_run_on_grid_exact_instance():
    # p = 1/4 over a 4-entry index: theta = pi/3 is not on a t=4 grid, but
    # p = 1/2 (two of four marked) is
    outcome = counting.run_counting_exact(
        [1, 0, 1, 0], [1, 1, 0, 0], OracleKind.HAMMING, CountingConfig(4, Engine.EXACT, 1)
    )
    assert outcome.j in (4, 12)
    assert outcome.p_hat == pytest.approx(0.5)
