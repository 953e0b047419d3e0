import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clairvoyant.errors import DegenerateFit, DomainError
from clairvoyant.experiments import (
    EstimateResult,
    TrialConfig,
    estimate_event_probs,
    estimate_reach,
    estimate_reach_and_tail,
    estimate_tail,
    event_chain_probe,
    fit_power_law,
    plant_E,
    plant_F,
    run_trials,
    sample_sequence,
    tail_sweep,
    trial_sequences,
    wilson_interval,
)
from clairvoyant.model import ColorSequence
from clairvoyant.patterns import find_occurrences, holds_E, holds_F, prob_E_exact, prob_F_lower


def test_sample_sequence_basics():
    assert sample_sequence(1, 50, 3).values == (0,) * 50
    assert sample_sequence(4, 100, 17) == sample_sequence(4, 100, 17)
    assert sample_sequence(4, 100, 17) != sample_sequence(4, 100, 18)
    assert len(sample_sequence(3, 0, 1)) == 0


def test_sample_sequence_frequencies():
    seq = sample_sequence(4, 10 ** 5, 2024)
    counts = np.bincount(seq.values, minlength=4)
    sigma = math.sqrt(10 ** 5 * 0.25 * 0.75)
    assert np.all(np.abs(counts - 25000) < 4 * sigma)


def test_trial_streams_are_prefix_consistent():
    for t in range(20):
        short = trial_sequences(99, t, 3, 17, 9)
        long = trial_sequences(99, t, 3, 333, 129)
        assert long[0].values[:17] == short[0].values
        assert long[1].values[:9] == short[1].values


def test_plant_E_examples():
    Y = ColorSequence(2, (0, 0, 0, 1))
    assert plant_E(Y, 1, 2).values == (1, 0, 1, 0)
    assert plant_E(Y, 1, 0) == Y
    Z = sample_sequence(3, 40, 5)
    once = plant_E(Z, 4, 3)
    assert plant_E(once, 4, 3) == once
    assert holds_E(once, 4, 3)
    assert once.values[:3] == Z.values[:3]
    assert once.values[4 + 9 - 1:] == Z.values[4 + 9 - 1:]


def test_plant_F_examples():
    X = ColorSequence(2, (1,) * 10)
    planted = plant_F(X, 1, 1, 0)
    assert planted.values[:4] == (0, 1, 0, 1)
    assert planted.values[4:] == X.values[4:]
    short = plant_F(ColorSequence(3, ()), 2, 4, 1)
    assert find_occurrences(short).tau(1) == 0
    assert holds_F(short, 2, 4)


def test_plant_F_always_satisfies_F():
    for seed in range(10 ** 4):
        m = 2 + seed % 3
        n = 1 + seed % 4
        k = 1 + seed % 7
        X = sample_sequence(m, 30, seed)
        planted = plant_F(X, n, k, seed + 1)
        assert find_occurrences(planted).tau(1) == 0
        assert holds_F(planted, n, k)


def test_wilson_interval_properties():
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0
    lo, hi = wilson_interval(37, 100)
    assert lo < 0.37 < hi


def test_wilson_matches_statsmodels():
    proportion_confint = pytest.importorskip("statsmodels.stats.proportion").proportion_confint
    for successes, trials in [(37, 100), (0, 50), (1, 7), (9999, 10000), (625, 10000)]:
        ref = proportion_confint(successes, trials, alpha=0.05, method="wilson")
        assert wilson_interval(successes, trials) == pytest.approx(ref, abs=1e-12)


@given(st.integers(1, 500), st.data())
def test_estimate_result_invariants(trials, data):
    successes = data.draw(st.integers(0, trials))
    res = EstimateResult(successes, trials, 1)
    lo, hi = res.ci
    assert 0 <= lo <= res.p_hat <= hi <= 1
    assert res.p_hat == successes / trials


def test_estimate_result_rejects_bad_counts():
    with pytest.raises(DomainError):
        EstimateResult(5, 4, 0)


def test_run_trials_independent_of_threads():
    def trial(t):
        X, Y = trial_sequences(7, t, 3, 10, 10)
        return sum(X.values), sum(Y.values), 1

    base = run_trials(trial, 257, threads=1)
    for threads in (2, 3, 8):
        assert run_trials(trial, 257, threads=threads) == base
    assert base[2] == 257


def test_event_probs_match_exact_E():
    cfg = TrialConfig(m=2, n=3, k=2, trials=20000, master_seed=41)
    res_e, _ = estimate_event_probs(cfg)
    p = prob_E_exact(2, 2)
    sigma = math.sqrt(p * (1 - p) / cfg.trials)
    assert abs(res_e.p_hat - p) <= 3 * sigma


def test_event_probs_k_zero():
    res_e, res_f = estimate_event_probs(TrialConfig(m=3, n=2, k=0, trials=200, master_seed=1))
    assert res_e.p_hat == 1.0
    assert res_f.p_hat == 0.0


def test_event_probs_F_above_lower_bound():
    cfg = TrialConfig(m=2, n=2, k=23, trials=5000, master_seed=8)
    _, res_f = estimate_event_probs(cfg)
    assert res_f.excluded == 0
    assert res_f.p_hat >= prob_F_lower(2, 2, 23) - 3 * res_f.sigma


def test_event_probs_thread_invariant():
    a = estimate_event_probs(TrialConfig(m=2, n=2, k=3, trials=3000, master_seed=4))
    b = estimate_event_probs(TrialConfig(m=2, n=2, k=3, trials=3000, master_seed=4, threads=6))
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


def test_reach_degenerate_alphabet():
    assert estimate_reach(TrialConfig(m=1, n=3, trials=100, master_seed=2)).p_hat == 0


def test_reach_origin_probability():
    for m in (2, 3, 4):
        res = estimate_reach(TrialConfig(m=m, n=0, trials=4000, master_seed=m))
        p = 1 - 1 / m
        assert abs(res.p_hat - p) <= 3 * math.sqrt(p * (1 - p) / res.trials)


def test_reach_non_increasing_in_n():
    counts = [estimate_reach(TrialConfig(m=3, n=n, trials=800, master_seed=12)).successes
              for n in range(0, 20, 2)]
    assert counts == sorted(counts, reverse=True)


def test_tail_examples():
    assert estimate_tail(TrialConfig(m=1, n=0, N=3, trials=50, master_seed=1)).p_hat == 0
    with pytest.raises(DomainError):
        estimate_tail(TrialConfig(m=2, n=4, N=4, trials=5, master_seed=1))
    reach, tail = estimate_reach_and_tail(TrialConfig(m=4, n=8, trials=2000, master_seed=21))
    assert 0 < tail.successes <= reach.successes
    assert tail.caveats
    assert estimate_tail(TrialConfig(m=4, n=8, trials=2000, master_seed=21)) == tail
    assert estimate_reach(TrialConfig(m=4, n=8, N=32, trials=2000, master_seed=21)).successes == reach.successes


def test_event_chain_planted_E():
    cfg = TrialConfig(m=2, n=2, k=2, trials=4000, master_seed=6, planted_E=True)
    rep = event_chain_probe(cfg)
    assert rep.count_E == rep.valid
    assert rep.count_EFG == rep.count_FG
    assert rep.joint == rep.freq(rep.count_FG)


def test_event_chain_report_consistency():
    rep = event_chain_probe(TrialConfig(m=2, n=2, k=2, trials=20000, master_seed=3))
    assert rep.count_EFG <= min(rep.count_E, rep.count_FG)
    assert rep.count_FG <= min(rep.count_F, rep.count_G)
    assert rep.count_G <= rep.count_G_top + rep.count_G_right
    assert rep.valid + rep.excluded == rep.trials
    assert rep.flagged == (abs(rep.z_score) > 4)
    doc = rep.to_dict()
    assert doc["p_EFG"] == rep.joint
    assert doc["flagged"] == rep.flagged


def test_fit_exact_power_law():
    fit = fit_power_law([(n, n ** -2.0) for n in (2, 4, 8)])
    assert fit.alpha == pytest.approx(2, abs=1e-9)
    assert fit.residual < 1e-9
    assert fit.power_law


def test_fit_constant():
    fit = fit_power_law([(n, 0.3) for n in (2, 5, 9, 30)])
    assert fit.alpha == pytest.approx(0, abs=1e-12)


def test_fit_flags_exponential():
    exp_fit = fit_power_law([(n, 2.0 ** -n) for n in (2, 4, 8)])
    pow_fit = fit_power_law([(n, 3 * n ** -1.5) for n in (2, 4, 8)])
    assert exp_fit.residual > exp_fit.threshold > pow_fit.residual
    assert not exp_fit.power_law


def test_fit_degenerate():
    with pytest.raises(DegenerateFit):
        fit_power_law([(2, 0.5), (4, 0.0)])
    with pytest.raises(DegenerateFit):
        fit_power_law([(4, 0.5), (4, 0.2)])


def test_tail_sweep_rows():
    rows, fit = tail_sweep(4, [4, 8], 4, 300, 5)
    assert [r.n for r in rows] == [4, 8]
    assert all(r.tail.successes <= r.reach.successes for r in rows)
    assert fit is None or math.isfinite(fit.alpha)
