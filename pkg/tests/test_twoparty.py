import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcdist import counting, twoparty
from qcdist.counting import CountingConfig, Engine
from qcdist.errors import DegenerateDenominatorError, LocalityError, UsageError
from qcdist.twoparty import CommLedger, Direction, Role


def test_counting_cost_examples():
    assert twoparty.counting_cost(10, 5) == 682
    assert twoparty.counting_cost(1, 1) == 4


@given(st.integers(1, 4096), st.integers(1, 8))
@settings(max_examples=50, deadline=None)
def test_ledger_matches_cost_law(size, t):
    x = np.zeros(size, dtype=np.uint8)
    alice, bob = twoparty.parties(x, x)
    rep = twoparty.estimate_hamming(alice, bob, CountingConfig(t, Engine.FAST))
    n = max(1, int(np.ceil(np.log2(size))))
    assert rep.ledger.total_qubits == 2 * (n + 1) * (2**t - 1)
    assert rep.ledger.total_qubits == rep.ledger.expected_qubits()


def test_message_stream_alternates_during_grover_iterations():
    ledger = CommLedger()
    ledger.log_counting(3, 2)
    msgs = list(ledger.messages())
    assert len(msgs) == 6
    assert [m[0] for m in msgs] == [Direction.A2B, Direction.B2A] * 3
    assert sum(m[1] for m in msgs) == ledger.total_qubits == 24


def test_extend_renumbers_rounds():
    a, b = CommLedger(), CommLedger()
    a.log(Direction.A2B, classical_bits=8)
    b.log_counting(1, 1)
    a.extend(b)
    assert [e.round for e in a.entries] == [0, 1, 2]
    assert a.counting_calls == [(1, 1)]
    assert a.to_records()[1]["repeat"] == 1


def test_parties_cannot_read_each_other():
    alice, bob = twoparty.parties([1, 0], [0, 1])
    with pytest.raises(LocalityError):
        alice.read(Role.BOB)
    bob.read(Role.BOB)
    # the refused attempt is still on record
    assert alice.audit.cross_party_reads() == [(Role.BOB, Role.ALICE)]


def test_exact_engine_keeps_data_local():
    alice, bob = twoparty.parties([1, 0, 1, 1], [1, 1, 0, 1])
    twoparty.estimate_product_mean(alice, bob, CountingConfig(3, Engine.EXACT))
    assert alice.audit.cross_party_reads() == []
    assert all(reader is owner for reader, owner in alice.audit.reads)


def test_hamming_identical_strings_is_zero():
    x = np.random.default_rng(0).integers(0, 2, 50)
    alice, bob = twoparty.parties(x, x)
    for engine in Engine:
        rep = twoparty.estimate_hamming(alice, bob, CountingConfig(5, engine))
        assert rep.value == 0.0


def test_hamming_grid_exact_fixture_every_seed():
    for seed in range(20):
        alice, bob = twoparty.parties([1, 0, 1, 0], [1, 1, 0, 0])
        rep = twoparty.estimate_hamming(alice, bob, CountingConfig(4, Engine.EXACT, seed))
        assert rep.value == pytest.approx(2.0, abs=1e-12)


def test_padding_rescales_to_real_entries():
    # 3 entries, all marked: padded fraction 3/4, real fraction 1
    alice, bob = twoparty.parties([1, 1, 1], [1, 1, 1])
    rep = twoparty.estimate_product_mean(alice, bob, CountingConfig(6, Engine.ORACLE))
    assert rep.value == 1.0
    rep = twoparty.estimate_product_mean(alice, bob, CountingConfig(6, Engine.FAST, 0))
    assert 0.8 < rep.value <= 1.0


def test_correlation_oracle_engine_is_pearson():
    rng = np.random.default_rng(3)
    x = rng.integers(0, 2, 200)
    y = (x ^ (rng.random(200) < 0.2)).astype(int)
    alice, bob = twoparty.parties(x, y)
    rep = twoparty.estimate_correlation(alice, bob, CountingConfig(1, Engine.ORACLE))
    assert rep.value == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)
    assert rep.ledger.total_classical_bits == 2 * twoparty.FLOAT_BITS


def test_correlation_rejects_constant_bits():
    alice, bob = twoparty.parties([1, 1, 1], [0, 1, 0])
    with pytest.raises(DegenerateDenominatorError):
        twoparty.estimate_correlation(alice, bob, CountingConfig(3))


def test_length_mismatch():
    alice, bob = twoparty.parties([1, 1, 1], [0, 1])
    with pytest.raises(UsageError):
        twoparty.estimate_hamming(alice, bob, CountingConfig(3))


def test_exact_and_fast_engines_share_the_outcome_law():
    x, y = [1, 0, 1, 1, 0], [1, 1, 1, 0, 0]
    n = counting.index_width(5)
    p = 2 / 2**n
    ref = counting.outcome_distribution(p, 3)
    seen = np.zeros(8)
    for seed in range(400):
        alice, bob = twoparty.parties(x, y)
        rep = twoparty.estimate_product_mean(
            alice, bob, CountingConfig(3, Engine.EXACT), np.random.default_rng(seed)
        )
        seen[rep.outcomes[0].j] += 1
    # chi-square style sanity bound, generous for 400 draws
    assert 0.5 * np.abs(seen / 400 - ref).sum() < 0.1


def test_product_mean_fixture_mode_is_grid_neighbour_of_quarter():
    probs = counting.outcome_distribution(0.25, 4)
    assert set(np.argsort(probs)[-2:]) == {3, 13}
    js = []
    for seed in range(1000):
        alice, bob = twoparty.parties([1, 0, 1, 0], [1, 1, 0, 0])
        rep = twoparty.estimate_product_mean(
            alice, bob, CountingConfig(4, Engine.EXACT), np.random.default_rng(seed)
        )
        js.append(rep.outcomes[0].j)
    counts = np.bincount(js, minlength=16)
    assert set(np.argsort(counts)[-2:]) == {3, 13}


def test_correlation_fixture_oracle_is_zero():
    alice, bob = twoparty.parties([1, 0, 1, 0], [1, 1, 0, 0])
    rep = twoparty.estimate_correlation(alice, bob, CountingConfig(1, Engine.ORACLE))
    assert rep.value == 0.0
