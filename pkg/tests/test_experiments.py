import json

import pytest

from lipoplus.experiments import (CSV_COLUMNS, CampaignSpec, Mode, RunOutcome, run_campaign,
                                  summarize)
from lipoplus.objective import make_benchmark
from lipoplus.optimizers import Kind, StopReason


def outcome(i, evals, best=0.0, reason=StopReason.BUDGET, samples=None):
    return RunOutcome(i, evals, samples or evals, best, reason)


def test_summarize_single_result():
    row = summarize([outcome(0, 12, best=-1.0)], make_benchmark("sphere"), "prs")
    assert row.std_evals == 0.0 and row.std_dmax == 0.0
    assert row.mean_dmax == 1.0


def test_summarize_two_results_uses_sample_std():
    row = summarize([outcome(0, 10), outcome(1, 20)], make_benchmark("sphere"))
    assert row.mean_evals == 15.0
    assert row.std_evals == pytest.approx(7.0710678, abs=1e-7)


def test_summarize_exact_optimum_gives_zero_gap():
    bench = make_benchmark("square")
    assert summarize([outcome(0, 5, best=bench.max_value)], bench).mean_dmax == 0.0


def test_summarize_empty():
    with pytest.raises(ValueError):
        summarize([], make_benchmark("sphere"))


def test_summarize_excludes_capped_runs():
    bench = make_benchmark("sphere")
    rows = [outcome(0, 10, reason=StopReason.TARGET), outcome(1, 999, reason=StopReason.SAMPLE_CAP)]
    row = summarize(rows, bench, exclude_capped=True)
    assert row.mean_evals == 10 and row.n_capped == 1 and row.n_runs == 1
    assert row.stop_reasons == {"target": 1, "sample_cap": 1}


def small_table1(**kw):
    base = dict(benchmarks=["sphere", "rastrigin"], optimizers=["lipo", "adalipo", "lipo+", "prs"],
                repetitions=6, base_seed=3, budgets={"rastrigin": 120})
    base.update(kw)
    return CampaignSpec(**base)


def test_table1_vanilla_exhausts_budget():
    stats = run_campaign(small_table1())
    for name, budget in (("sphere", 25), ("rastrigin", 120)):
        for kind in ("lipo", "adalipo", "prs"):
            row = stats.row(name, kind)
            assert row.mean_evals == budget and row.std_evals == 0


def test_dmax_non_negative():
    stats = run_campaign(small_table1())
    for r in stats.rows:
        for o in stats.outcomes[(r.benchmark, r.optimizer)]:
            assert make_benchmark(r.benchmark).max_value - o.best_value >= -1e-9


def test_campaign_reproducible_and_worker_independent():
    spec = small_table1(repetitions=4)
    a = run_campaign(spec).to_csv()
    b = run_campaign(spec).to_csv()
    c = run_campaign(spec, jobs=2).to_csv()
    assert a == b == c
    assert a.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(a.splitlines()) == 1 + 2 * 4


def test_table2_reaches_target():
    spec = CampaignSpec(benchmarks=["sphere"], optimizers=["adalipo+ns", "lipo"], mode="table2",
                        repetitions=5)
    stats = run_campaign(spec)
    for kind in ("adalipo+ns", "lipo"):
        row = stats.row("sphere", kind)
        assert row.stop_reasons == {"target": 5}
        assert row.mean_dmax <= make_benchmark("sphere").max_value - (-0.174763) + 1e-6


def test_table2_flags_capped_runs():
    spec = CampaignSpec(benchmarks=["square"], optimizers=["lipo"], mode="table2", repetitions=3,
                        sample_cap=50)
    row = run_campaign(spec).row("square", "lipo")
    assert row.n_capped == 3 and row.n_runs == 0


def test_spec_from_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"benchmarks": ["sphere"], "optimizers": ["AdaLIPO+|ns"],
                                "mode": "table2", "repetitions": 2, "base_seed": 9}))
    spec = CampaignSpec.from_json(path)
    assert spec.mode is Mode.TABLE2 and spec.optimizers == [Kind.ADALIPO_PLUS_NS]
    path.write_text(json.dumps({"benchmarks": ["sphere"], "optimizers": ["prs"], "colour": 1}))
    with pytest.raises(ValueError):
        CampaignSpec.from_json(path)


def test_spec_validation():
    with pytest.raises(ValueError):
        CampaignSpec(benchmarks=["nope"], optimizers=["prs"])
    with pytest.raises(ValueError):
        CampaignSpec(benchmarks=["sphere"], optimizers=["prs"], repetitions=0)
    with pytest.raises(ValueError):
        CampaignSpec(benchmarks=["sphere"], optimizers=["prs"], budgets={"sphere": 0})


def test_default_budgets():
    spec = CampaignSpec(benchmarks=["sphere"], optimizers=["prs"])
    assert [spec.budget_for(n) for n in ("holder", "rastrigin", "sphere", "square")] == \
        [2000, 1000, 25, 1000]


def test_pretty_table_lists_every_row():
    stats = run_campaign(small_table1(repetitions=2))
    text = stats.pretty()
    assert text.count("\n") == 1 + len(stats.rows)
