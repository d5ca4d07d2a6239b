import numpy as np
import pytest

from hyperboot import experiments as X
from hyperboot import mild_process
from hyperboot.hypergraph import Hypergraph
from hyperboot.theory import RegimeParams, a_crit, a_star

SMALL = RegimeParams(2000, 2, 2, 2000 ** -0.8)


def test_derive_seed():
    assert X.derive_seed(7, 3) == X.derive_seed(7, 3)
    masters = np.random.default_rng(1).integers(0, 1 << 63, size=10_000)
    assert all(X.derive_seed(int(m), 0) != X.derive_seed(int(m), 1) for m in masters)
    seeds = {X.derive_seed(int(m), i) for m in masters for i in (0, 1)}
    assert len(seeds) == 20_000


def test_classify():
    assert X.classify(10, 1000, 10.0) == "small"
    assert X.classify(900, 1000, 10.0) == "large"
    assert X.classify(500, 1000, 10.0) == "other"


@pytest.mark.parametrize("process", ["bootstrap", "query", "mild", "all"])
def test_trial_extremes(process):
    zero = X.run_trial(X.TrialConfig(SMALL, 0, process, 5, 0))
    assert zero.final_size == 0 and zero.outcome == "small"
    full = X.run_trial(X.TrialConfig(SMALL, SMALL.n, process, 5, 0))
    assert full.final_size == SMALL.n and full.outcome == "large"


def test_trial_record_fields():
    rec = X.run_trial(X.TrialConfig(SMALL, 50, "all", 9, 2, verbose_trace=True))
    assert rec.sizes["mild"] <= rec.sizes["bootstrap"] <= rec.sizes["query"]
    assert rec.final_size == rec.sizes["bootstrap"]
    assert rec.seed == X.derive_seed(9, 4)
    assert rec.a_over_ac == pytest.approx(50 / a_crit(SMALL))
    assert rec.a_star == pytest.approx(a_star(SMALL))
    assert rec.trace["process"] == "query"
    again = X.run_trial(X.TrialConfig(SMALL, 50, "all", 9, 2))
    assert again.sizes == rec.sizes and "trace" not in again.as_dict()


def test_trial_config_validation():
    with pytest.raises(ValueError):
        X.TrialConfig(SMALL, SMALL.n + 1)
    with pytest.raises(ValueError):
        X.TrialConfig(SMALL, 1, process="sir")


def test_off_regime_flag():
    prm = RegimeParams(500, 2, 2, 0.5)
    rec = X.run_trial(X.TrialConfig(prm, 3, "bootstrap", 1, 0))
    assert not rec.regime_ok


def test_parse_ratios():
    assert X.parse_ratios("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert X.parse_ratios("0.8,1.2") == [0.8, 1.2]
    assert X.parse_ratios("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    with pytest.raises(ValueError):
        X.parse_ratios("0:1:0")


def test_phase_scan_monotone_and_deterministic():
    ratios = [0.0, 0.5, 1.0, 2.0, 4.0]
    rows = X.phase_scan(SMALL, ratios, 6, master_seed=42)
    assert rows[0]["frac_large"] == 0.0 and rows[0]["mean_final"] == 0.0
    finals = np.array([row["finals"] for row in rows])
    assert (np.diff(finals, axis=0) >= 0).all()
    fr = [row["frac_large"] for row in rows]
    assert fr == sorted(fr)
    text = X.scan_csv(rows)
    assert text.splitlines()[0] == ",".join(X.SCAN_COLUMNS)
    assert text == X.scan_csv(X.phase_scan(SMALL, ratios, 6, master_seed=42))
    assert text == X.scan_csv(X.phase_scan(SMALL, ratios, 6, master_seed=42, n_jobs=3))
    assert text != X.scan_csv(X.phase_scan(SMALL, ratios, 6, master_seed=43))


def test_phase_scan_rejects_negative():
    with pytest.raises(ValueError):
        X.phase_scan(SMALL, [-1.0], 1, 0)


def test_sandwich_fixture():
    triple, bad = X.sandwich_instance(Hypergraph(3, 3, [(0, 1, 2)]), 2, [0, 1])
    assert triple == (2, 3, 3) and bad == []


def test_sandwich_check_clean():
    prm = RegimeParams(200, 3, 2, 4e-4)
    report = X.sandwich_check(prm, 12, 15, master_seed=3, shuffles=3, shuffle_trials=5)
    assert report.violations == 0
    assert report.shuffled_orders == 15
    assert all(c <= a <= b for c, a, b in report.triples)


def test_mild_schedule_fallback():
    # eps too small for the supercritical side: eps is widened to 2 delta / (1 - delta)
    sched = X.mild_schedule(RegimeParams(1000, 2, 2, 0.01, eps=0.25, delta=0.2), 5)
    assert np.isfinite(sched.t_low)
    # widened eps would reach 1: activate everything at once
    sched = X.mild_schedule(RegimeParams(1000, 2, 2, 0.01, eps=0.5, delta=0.5), 5)
    assert sched.t_low == np.inf
