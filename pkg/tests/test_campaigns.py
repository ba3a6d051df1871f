import json

import numpy as np
import pytest

from grounded_chi import campaigns
from grounded_chi.campaigns import (
    DEFAULT_TRIALS,
    TRIALS,
    VerifyReport,
    run_campaign,
    run_trial,
    summarize,
    update_metrics,
)
from grounded_chi.errors import AuditFailure, PreconditionFailed


def test_every_trial_has_a_default_count():
    assert set(TRIALS) == set(DEFAULT_TRIALS)


def test_solver_trial_passes():
    record = run_trial("solver", 3, campaign="unit")
    assert record["status"] == "passed"
    assert record["campaign"] == "unit"
    assert record["instance"].startswith("random_graph(")
    assert isinstance(record["chi"], int)
    assert record["runtime"] >= 0


@pytest.mark.parametrize("exc, status", [
    (AuditFailure("broken postcondition"), "failed"),
    (PreconditionFailed(1, 2), "skipped"),
    (RuntimeError("boom"), "failed"),
])
def test_trial_status_mapping(monkeypatch, exc, status):
    def trial(seed, params):
        raise exc
    monkeypatch.setitem(TRIALS, "solver", trial)
    record = run_trial("solver", 0)
    assert record["status"] == status
    assert record["detail"]


def test_trial_may_skip_itself(monkeypatch):
    monkeypatch.setitem(TRIALS, "solver", lambda seed, params: {"status": "skipped", "why": "small"})
    record = run_trial("solver", 0)
    assert record["status"] == "skipped"
    assert json.loads(record["detail"]) == {"why": "small"}


def test_campaign_writes_sorted_report(tmp_path):
    out = tmp_path / "reports" / "solver.jsonl"
    report = run_campaign("solver", 6, seed=10, workers=1, out=out)
    assert report.campaign == "solver-s10-n6"
    assert [r["seed"] for r in report.records] == list(range(10, 16))
    assert report.ok
    assert report.counts == {"passed": 6, "failed": 0, "skipped": 0}
    lines = out.read_text(encoding="utf-8").splitlines()
    assert [json.loads(line)["seed"] for line in lines] == list(range(10, 16))


def test_campaign_unknown_lemma():
    with pytest.raises(KeyError):
        run_campaign("nope", 1)


def test_reduction_campaign():
    report = run_campaign("reduction", 4, workers=1)
    assert report.ok


def test_summarize_counts():
    records = [
        {"lemma": "solver", "seed": 0, "status": "passed", "runtime": 0.5, "chi": 3},
        {"lemma": "solver", "seed": 1, "status": "failed", "runtime": 1.5, "chi": None},
        {"lemma": "ladder", "seed": 0, "status": "skipped", "runtime": 0.1, "chi": 2},
    ]
    summary = summarize(records).set_index("lemma")
    assert summary.loc["solver", "trials"] == 2
    assert summary.loc["solver", "passed"] == 1
    assert summary.loc["solver", "failed"] == 1
    assert summary.loc["solver", "mean_runtime"] == pytest.approx(1.0)
    assert summary.loc["solver", "max_chi"] == 3
    assert summary.loc["ladder", "skipped"] == 1


def test_summarize_empty():
    assert summarize([]).empty


def test_update_metrics_merges(tmp_path):
    path = tmp_path / "metrics.json"
    path.write_text(json.dumps({"campaigns": {"ladder": {"trials": 9}}, "note": "kept"}), encoding="utf-8")
    summary = summarize([{"lemma": "solver", "seed": 0, "status": "passed", "runtime": 0.25, "chi": 2}])
    metrics = update_metrics(summary, path)
    assert metrics["note"] == "kept"
    assert metrics["campaigns"]["ladder"] == {"trials": 9}
    assert metrics["campaigns"]["solver"]["passed"] == 1
    assert json.loads(path.read_text(encoding="utf-8")) == metrics


def test_update_metrics_recovers_from_bad_file(tmp_path):
    path = tmp_path / "metrics.json"
    path.write_text("not json", encoding="utf-8")
    metrics = update_metrics(summarize([]), path)
    assert metrics == {"campaigns": {}}


def test_report_failures():
    report = VerifyReport("c", "solver", [{"status": "failed", "seed": 1}, {"status": "passed", "seed": 2}])
    assert not report.ok
    assert report.failures() == [{"status": "failed", "seed": 1}]


def test_brute_force_oracles_agree_on_small_graphs():
    rng = np.random.default_rng(5)
    for _ in range(10):
        g = campaigns.random_graph(rng, max_n=6)
        assert campaigns.brute_omega(g) <= campaigns.brute_chi(g)
