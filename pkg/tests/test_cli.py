import numpy as np
import pytest

from qcdist import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse(report):
    return dict(line.split("=", 1) for line in report.splitlines() if "=" in line and not line.startswith("["))


def test_hamming_identical_files(capsys, fixtures):
    a = str(fixtures / "alice4.csv")
    code, out, _ = run(capsys, "hamming", "--alice", a, "--bob", a, "--t", "4")
    assert code == 0
    assert float(parse(out)["estimate.value"]) == 0.0
    assert "config.seed=0" in out


@pytest.mark.parametrize("command", ["correlation", "hamming"])
def test_golden_exact_reports(capsys, fixtures, monkeypatch, command):
    monkeypatch.chdir(fixtures.parent.parent)
    code, out, _ = run(
        capsys, command, "--alice", "tests/fixtures/alice4.csv", "--bob",
        "tests/fixtures/bob4.csv", "--t", "4", "--engine", "exact", "--seed", "0",
    )
    assert code == 0
    assert out == (fixtures / f"golden_{command}_exact.txt").read_text()


def test_report_is_byte_identical_across_runs(capsys, fixtures):
    args = ["fit-lsq", "--alice", str(fixtures / "lsq_alice.csv"),
            "--bob", str(fixtures / "lsq_bob.csv"), "--eps", "0.1", "--seed", "3"]
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second


def test_parse_error_names_row(capsys, fixtures):
    code, _, err = run(capsys, "hamming", "--alice", str(fixtures / "bad.csv"),
                       "--bob", str(fixtures / "alice4.csv"), "--t", "3")
    assert code == 3
    assert "bad.csv:3" in err


def test_length_mismatch_is_usage_error(capsys, fixtures):
    code, _, _ = run(capsys, "hamming", "--alice", str(fixtures / "alice4.csv"),
                     "--bob", str(fixtures / "lsq_bob.csv"), "--t", "3")
    assert code in (2, 3)  # lsq_bob is not binary, so parsing fails first


def test_length_mismatch(capsys, fixtures, tmp_path):
    short = tmp_path / "short.csv"
    short.write_text("y\n1\n0\n")
    code, _, _ = run(capsys, "hamming", "--alice", str(fixtures / "alice4.csv"),
                     "--bob", str(short), "--t", "3")
    assert code == 2


def test_missing_bob_file(capsys, fixtures):
    code, _, err = run(capsys, "fit-lsq", "--alice", str(fixtures / "lsq_alice.csv"),
                       "--bob", "missing.csv", "--eps", "0.1")
    assert code == 2 and "missing.csv" in err


def test_eps_and_t_are_exclusive(capsys, fixtures):
    a = str(fixtures / "alice4.csv")
    assert run(capsys, "hamming", "--alice", a, "--bob", a, "--t", "3", "--eps", "0.1")[0] == 2
    assert run(capsys, "hamming", "--alice", a, "--bob", a)[0] == 2


def test_unknown_flag_is_usage_error(capsys):
    assert run(capsys, "hamming", "--nope")[0] == 2


def test_fit_lsq_oracle_matches_committed_solution(capsys, fixtures):
    code, out, _ = run(capsys, "fit-lsq", "--alice", str(fixtures / "lsq_alice.csv"),
                       "--bob", str(fixtures / "lsq_bob.csv"), "--engine", "oracle")
    assert code == 0
    fields = parse(out)
    lam = [float(fields[f"lambda.{j}"]) for j in range(3)]
    ref = np.loadtxt(fixtures / "lsq_solution.txt")
    np.testing.assert_allclose(lam, ref, atol=1e-8)


def test_fit_lsq_reports_budget_and_ledger(capsys, fixtures):
    code, out, _ = run(capsys, "fit-lsq", "--alice", str(fixtures / "lsq_alice.csv"),
                       "--bob", str(fixtures / "lsq_bob.csv"), "--eps", "0.1")
    assert code == 0
    assert "ledger.check=ok" in out
    assert "[budget]" in out and "j,r,eps_jr,t_jr,dropped" in out


def test_exit_codes_rank_and_budget(capsys, tmp_path, fixtures):
    alice = tmp_path / "a.csv"
    alice.write_text("a,b\n" + "".join(f"{i},{2 * i}\n" for i in range(6)))
    bob = tmp_path / "b.csv"
    bob.write_text("y\n" + "1\n" * 6)
    assert run(capsys, "fit-lsq", "--alice", str(alice), "--bob", str(bob), "--eps", "0.1")[0] == 4
    code = run(capsys, "fit-lsq", "--alice", str(fixtures / "lsq_alice.csv"),
               "--bob", str(fixtures / "lsq_bob.csv"), "--eps", "100")[0]
    assert code == 5


def test_fit_softmax_infers_classes(capsys, fixtures):
    code, out, _ = run(capsys, "fit-softmax", "--alice", str(fixtures / "lsq_alice.csv"),
                       "--bob", str(fixtures / "softmax_labels.csv"), "--engine", "oracle")
    assert code == 0
    assert parse(out)["fit.classes"] == "cat,dog,fox"
    assert parse(out)["solver.status"] == "converged"


def test_fit_softmax_wrong_class_count(capsys, fixtures):
    code, _, _ = run(capsys, "fit-softmax", "--alice", str(fixtures / "lsq_alice.csv"),
                     "--bob", str(fixtures / "softmax_labels.csv"), "--eps", "0.1",
                     "--classes", "2")
    assert code == 2


def test_phase_diagram_single_point(capsys):
    code, out, err = run(capsys, "phase-diagram", "--grid", "N=1e3:1e3:1;eps=0.01:0.01:1;M=1")
    assert code == 0
    assert len(out.strip().splitlines()) == 2
    assert "regions" in err


def test_phase_diagram_file_output_is_atomic_and_stable(capsys, tmp_path):
    target = tmp_path / "sweep.csv"
    assert run(capsys, "phase-diagram", "--out", str(target))[0] == 0
    first = target.read_bytes()
    out = capsys.readouterr().out
    assert run(capsys, "phase-diagram", "--out", str(target))[0] == 0
    assert target.read_bytes() == first
    assert list(tmp_path.iterdir()) == [target]


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    assert out.count("PASS") == len(out.strip().splitlines())
