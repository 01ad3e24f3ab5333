import numpy as np
import pytest

from gromovkit.generators import random_graph_metric, random_pseudometric, trial_rngs
from gromovkit.metric import quotient, validate
from gromovkit.suites import SUITES, run_suite, run_trial


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_small(name):
    rep = run_suite(name, 20, seed=123)
    assert rep.ok, rep.failures
    assert rep.trials == 20 and rep.to_dict()["seed"] == 123


def test_suites_are_deterministic():
    a = run_suite("lemma41", 15, seed=9).to_dict()
    b = run_suite("lemma41", 15, seed=9).to_dict()
    a.pop("elapsed"), b.pop("elapsed")
    assert a == b


def test_trial_replay_matches_suite():
    rngs = trial_rngs(4, 3)
    direct = [SUITES["gh-axioms"](r) for r in rngs]
    replay = [run_trial("gh-axioms", 4, i) for i in range(3)]
    assert direct == replay


def test_parallel_matches_serial():
    serial = run_suite("case2", 12, seed=1)
    parallel = run_suite("case2", 12, seed=1, jobs=2)
    assert serial.stats == parallel.stats and serial.failures == parallel.failures


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", 1)


def test_crash_is_reported(monkeypatch):
    def boom(rng):
        raise RuntimeError("kaput")

    monkeypatch.setitem(SUITES, "boom", boom)
    rep = run_suite("boom", 2, seed=0)
    assert not rep.ok and "kaput" in rep.failures[0]["detail"]
    assert "FAIL" in rep.summary()


def test_generators_give_valid_spaces():
    for rng in trial_rngs(0, 40):
        n = int(rng.integers(1, 8))
        assert validate(random_graph_metric(n, rng), require_metric=True)
        P = random_pseudometric(n, rng)
        assert validate(P, tol=1e-12)
        assert len(quotient(P)[0]) <= n


def test_graph_metric_has_ties():
    rng = np.random.default_rng(0)
    d = random_graph_metric(6, rng).dist
    assert len(np.unique(d[np.triu_indices(6, 1)])) < 15
