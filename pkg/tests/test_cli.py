import json

import euler_spectra.cli as cli
from euler_spectra.cli import main
from euler_spectra.verification import CheckResult


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_band_command(capsys):
    code, out, _ = run_cli(capsys, "band", "--p", "1,1", "--khat", "1,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["a"] == -0.5
    assert doc["width"] == 1
    assert sorted(e["im"] for e in doc["endpoints"]) == [-0.5, 0.5]


def test_eigs_cf_contains_benchmark_representative(capsys):
    code, out, _ = run_cli(
        capsys, "eigs-cf", "--p", "1,1", "--khat", "1,0",
        "--box", "0.05,1,0.05,1", "--grid", "8",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["method"] == "continued-fraction"
    assert len(doc["quadruples"]) == 1
    q = doc["quadruples"][0]
    # agrees with the published 14-digit value to its actual precision
    assert abs(q["re"] - 0.24822302478255) < 1e-7
    assert abs(q["im"] - 0.35172076526520) < 1e-7


def test_eigs_cf_deterministic_bytes(capsys):
    args = ("eigs-cf", "--p", "1,1", "--khat", "1,0", "--box", "0.05,1,0.05,1", "--grid", "6")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_classes_command_matches_narrative(capsys):
    code, out, _ = run_cli(capsys, "classes", "--p", "1,1")
    assert code == 0
    doc = json.loads(out)
    undetermined = [
        c["khat"] for c in doc["classes"] if c["verdict"]["kind"] == "Undetermined"
    ]
    assert sorted(map(tuple, undetermined)) == [(0, 1), (1, 0)]
    parallel = [c for c in doc["classes"] if c["parallel"]]
    assert len(parallel) == 1 and parallel[0]["meets_disk"]
    other_kinds = {
        c["verdict"]["kind"]
        for c in doc["classes"]
        if tuple(c["khat"]) not in {(0, 1), (1, 0)}
    }
    assert other_kinds <= {"ParallelTrivial", "StableUDT", "StableHalfClassBoth"}


def test_eigs_matrix_csv(capsys):
    code, out, _ = run_cli(
        capsys, "eigs-matrix", "--p", "1,1", "--khat", "1,0",
        "--n-matrix", "200", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "re,im,kind"
    assert sum(1 for line in lines[1:] if line.endswith(",isolated")) == 4


def test_simulate_summary(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--p", "1,1", "--khat", "3,0",
        "--n-window", "10", "--dt", "0.01", "--steps", "50",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"]["H_drift"] < 1e-10
    assert doc["summary"]["I_drift"] < 1e-10


def test_simulate_csv(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--p", "1,1", "--khat", "3,0",
        "--n-window", "5", "--dt", "0.01", "--steps", "10", "--format", "csv",
    )
    assert code == 0
    assert out.splitlines()[0] == "t,n,re,im"


def test_euler_sim(capsys):
    code, out, _ = run_cli(
        capsys, "euler-sim", "--p", "1,1", "--k-cutoff", "4",
        "--dt", "0.01", "--steps", "20",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["E_drift"] < 1e-10
    assert doc["J_drift"] < 1e-10


def test_euler_sim_with_perturbation(capsys):
    code, out, _ = run_cli(
        capsys, "euler-sim", "--p", "1,1", "--khat", "1,0", "--eps", "1e-6",
        "--k-cutoff", "4", "--dt", "0.01", "--steps", "20", "--format", "csv",
    )
    assert code == 0
    assert out.splitlines()[0] == "k1,k2,re,im"
    # perturbation mode outside the cutoff is a usage error
    code, _, err = run_cli(
        capsys, "euler-sim", "--p", "1,1", "--khat", "9,0", "--eps", "1e-6",
        "--k-cutoff", "4", "--dt", "0.01", "--steps", "5",
    )
    assert code == 1 and "outside cutoff" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# benchmark class\n"
        "p=1,1\n"
        "khat=1,0\n"
        "sizes.grid=5\n"
        "search.box=0.05,1,0.05,1\n"
        "tolerances.root_tol=1e-12\n"
    )
    code, out, _ = run_cli(capsys, "eigs-cf", "--config", str(cfg))
    assert code == 0
    assert len(json.loads(out)["quadruples"]) == 1

    out_path = tmp_path / "result.json"
    code, stdout, _ = run_cli(
        capsys, "eigs-cf", "--config", str(cfg), "--output", str(out_path)
    )
    assert code == 0 and stdout == ""
    assert len(json.loads(out_path.read_text())["quadruples"]) == 1


def test_usage_errors_exit_1(capsys):
    assert run_cli(capsys, "nonsense")[0] == 1
    assert run_cli(capsys, "band", "--p", "1,1")[0] == 1  # missing khat
    assert run_cli(capsys, "band", "--p", "1,1", "--khat", "2,2")[0] == 1  # parallel
    assert run_cli(capsys, "band", "--p", "oops", "--khat", "1,0")[0] == 1
    code, _, err = run_cli(capsys, "eigs-cf", "--p", "1,1", "--khat", "1,0", "--n-matrix", "9999")
    assert code == 1 and "N_matrix" in err


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sizes.bogus=1\n")
    code, _, err = run_cli(capsys, "classes", "--config", str(cfg), "--p", "1,1")
    assert code == 1
    assert "bogus" in err


def test_verify_exit_codes(monkeypatch, capsys):
    good = [CheckResult(1, "stub", True, "ok", 0.0)]
    monkeypatch.setattr(cli, "run_checks", lambda workers=1: good)
    assert run_cli(capsys, "verify")[0] == 0

    bad = [CheckResult(1, "stub", True, "ok", 0.0), CheckResult(2, "stub2", False, "no", 0.0)]
    monkeypatch.setattr(cli, "run_checks", lambda workers=1: bad)
    code, out, _ = run_cli(capsys, "verify")
    assert code == 3
    assert "[FAIL] 2." in out


def test_verify_thread_env(monkeypatch, capsys):
    seen = {}

    def fake(workers=1):
        seen["workers"] = workers
        return [CheckResult(1, "stub", True, "ok", 0.0)]

    monkeypatch.setattr(cli, "run_checks", fake)
    monkeypatch.setenv("EULER_SPECTRA_THREADS", "4")
    assert run_cli(capsys, "verify")[0] == 0
    assert seen["workers"] == 4
    monkeypatch.setenv("EULER_SPECTRA_THREADS", "notanumber")
    assert run_cli(capsys, "verify")[0] == 1
