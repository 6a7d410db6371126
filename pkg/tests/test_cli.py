import json

import pytest

from lipoplus.cli import main
from lipoplus.domain import RunTrace


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_csv(capsys):
    code, out, err = run_cli(capsys, "bound", "--dims", "2,5,10,50", "--ratio", "1", "--cube")
    assert code == 0 and err == ""
    lines = out.splitlines()
    assert lines[0] == "d,C_d"
    values = {int(d): float(c) for d, c in (l.split(",") for l in lines[1:])}
    assert values[2] == pytest.approx(0.785, abs=1e-3)
    assert values[5] == pytest.approx(0.1645, abs=1e-4)
    assert values[10] == pytest.approx(0.00249, abs=1e-5)
    assert values[50] == pytest.approx(1.5e-28, rel=0.1)


def test_bound_range_and_volume(capsys):
    code, out, _ = run_cli(capsys, "bound", "--dims", "2-4", "--volume", "1", "--clamp")
    assert code == 0
    assert [l.split(",")[0] for l in out.splitlines()[1:]] == ["2", "3", "4"]
    assert all(float(l.split(",")[1]) <= 1 for l in out.splitlines()[1:])


def test_run_json(capsys):
    code, out, _ = run_cli(capsys, "run", "--optimizer", "prs", "--benchmark", "sphere",
                           "--budget", "25", "--seed", "7")
    assert code == 0
    summary = json.loads(out)
    assert summary["n_evals"] == 25 and summary["n_samples"] == 25
    assert summary["stop_reason"] == "budget"


def test_run_with_theta(capsys):
    code, out, _ = run_cli(capsys, "run", "--optimizer", "adalipo+ns", "--benchmark", "sphere",
                           "--theta", "0.99", "--seed", "1")
    assert code == 0
    assert json.loads(out)["stop_reason"] == "target"


def test_trace_file(tmp_path, capsys):
    path = tmp_path / "trace.csv"
    code, out, _ = run_cli(capsys, "trace", "--optimizer", "lipo", "--benchmark", "rastrigin",
                           "--budget", "1000", "--seed", "1", "--out", str(path))
    assert code == 0 and out == ""
    trace = RunTrace.from_csv(path.read_text())
    assert len(trace) == 1000
    trace.check()


def test_seed_from_environment(monkeypatch, capsys):
    argv = ["run", "--optimizer", "adalipo", "--benchmark", "himmelblau", "--budget", "30"]
    monkeypatch.setenv("LIPO_SEED", "5")
    _, from_env, _ = run_cli(capsys, *argv)
    _, explicit, _ = run_cli(capsys, *argv, "--seed", "5")
    _, other, _ = run_cli(capsys, *argv, "--seed", "6")
    assert from_env == explicit != other


def test_bench_with_config(tmp_path, capsys):
    cfg = tmp_path / "campaign.json"
    cfg.write_text(json.dumps({"benchmarks": ["sphere"], "optimizers": ["lipo", "adalipo+"],
                               "repetitions": 3}))
    out_csv = tmp_path / "stats.csv"
    code, out, _ = run_cli(capsys, "bench", "--config", str(cfg), "--out", str(out_csv))
    assert code == 0
    rows = out_csv.read_text().splitlines()
    assert rows[0].startswith("benchmark,optimizer,mean_evals")
    assert rows[1].startswith("sphere,lipo,25,0,")
    assert "adalipo+" in out


def test_bench_flags_to_stdout(capsys):
    code, out, _ = run_cli(capsys, "bench", "--benchmark", "rosenbrock", "--optimizer", "lipo",
                           "--mode", "table2", "--reps", "3", "--jobs", "1")
    assert code == 0
    assert out.splitlines()[1].startswith("rosenbrock,lipo,")


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["run", "--optimizer", "prs", "--benchmark", "sphere", "--budget", "3", "--bogus"],
    ["run", "--optimizer", "simplex", "--benchmark", "sphere", "--budget", "3"],
    ["run", "--optimizer", "prs", "--benchmark", "sphere"],
    ["run", "--optimizer", "prs", "--benchmark", "sphere", "--theta", "2"],
    ["bench", "--optimizer", "prs"],
    ["bound", "--dims", "0,2"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.strip()


def test_usage_error_diagnostic_is_one_line(capsys):
    code, _, err = run_cli(capsys, "run", "--optimizer", "simplex", "--benchmark", "sphere",
                           "--budget", "3")
    assert code == 2 and len(err.strip().splitlines()) == 1


def test_runtime_failure_exit_1(tmp_path, capsys):
    bad = tmp_path / "missing.json"
    code, _, err = run_cli(capsys, "--constants", str(bad), "run", "--optimizer", "prs",
                           "--benchmark", "sphere", "--budget", "3")
    assert code == 1
    assert len(err.strip().splitlines()) == 1


def test_repeated_invocations_identical(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"t{i}.csv"
        main(["trace", "--optimizer", "adalipo+", "--benchmark", "holder", "--budget", "300",
              "--seed", "3", "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
