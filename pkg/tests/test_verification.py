import pytest

import verification
from verification import SUITES, SuiteRunner, SuiteSummary, TrialRecord, trial_seeds


def test_trial_seeds_are_stable_and_distinct():
    seeds = trial_seeds(7, "lemma2", 5)
    assert seeds == trial_seeds(7, "lemma2", 5)
    assert len(set(seeds)) == 5
    assert seeds != trial_seeds(8, "lemma2", 5)
    assert seeds != trial_seeds(7, "vertex-count", 5)


def test_trial_counts():
    assert SuiteRunner.trial_count("moment-theorem", 4) == 4
    assert SuiteRunner.trial_count("lemma2", 4) == 40
    assert SuiteRunner.trial_count("omega-convexity", 4) == 12


def test_vertex_count_suite():
    records, summary = SuiteRunner(seed=1).run_suite("vertex-count", 10)
    assert [r.trial for r in records] == list(range(10))
    assert summary.ok
    assert summary.message == "Passed 10 of 10"
    for record in records:
        assert record.rhs == 6 * len(record.inputs["sites"])
        assert record.margin == record.rhs - record.lhs


@pytest.mark.parametrize("suite", ["moment-theorem", "moment-lemma"])
def test_moment_suites_pass(suite):
    records, summary = SuiteRunner(seed=3).run_suite(suite, 3)
    assert summary.ok, [r.to_dict() for r in records]
    assert all(r.inputs["profile"] == "exp:1.0" for r in records)


def test_lemma2_suite_runs_ten_pairs_per_trial():
    records, summary = SuiteRunner(seed=5).run_suite("lemma2", 2)
    assert len(records) == 20
    assert summary.ok
    assert {r.inputs["radius"] for r in records} == {0.5, 1.0, 2.0}


def test_omega_convexity_suite():
    records, summary = SuiteRunner(seed=5).run_suite("omega-convexity", 1)
    assert len(records) == 12
    assert summary.ok
    assert {r.inputs["profile"] for r in records} == {"constant", "exp:1.0", "gaussian:1.0", "linear:2.0"}


def test_execute_runs_suites_in_order():
    records, summaries = SuiteRunner(seed=11).execute(2, suites=("vertex-count", "moment-lemma"))
    assert list(summaries) == ["vertex-count", "moment-lemma"]
    assert [r.suite for r in records] == ["vertex-count"] * 2 + ["moment-lemma"] * 2
    assert summaries["moment-lemma"].to_dict()["message"] == "Passed 2 of 2"


def test_unknown_suite():
    with pytest.raises(ValueError):
        SuiteRunner(seed=0).run_suite("nonsense", 1)
    assert set(SUITES) == set(verification._TRIALS)


def test_a_raising_trial_is_recorded_as_a_failure(monkeypatch):
    def broken(trial, rng, cfg):
        raise RuntimeError("boom")

    monkeypatch.setitem(verification._TRIALS, "vertex-count", broken)
    records, summary = SuiteRunner(seed=2).run_suite("vertex-count", 3)
    assert not summary.ok
    assert summary.failures == [0, 1, 2]
    assert records[0].inputs == {"error": "RuntimeError: boom"}
    assert records[0].lhs is None


def test_records_do_not_depend_on_the_worker_count(monkeypatch):
    serial, _ = SuiteRunner(seed=9).run_suite("vertex-count", 6)
    monkeypatch.setenv("TORUS_SPECTRA_THREADS", "2")
    parallel, _ = SuiteRunner(seed=9, workers=2).run_suite("vertex-count", 6)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


def test_summary_and_record_serialization():
    summary = SuiteSummary("lemma2", 4, 3, [2])
    assert summary.to_dict() == {"suite": "lemma2", "total": 4, "passed": 3, "failures": [2], "ok": False,
                                 "message": "Passed 3 of 4"}
    record = TrialRecord("lemma2", 0, 12, {"radius": 1.0}, 1.0, 0.5, 0.5, True)
    assert record.to_dict()["seed"] == 12
