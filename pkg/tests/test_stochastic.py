import math
from dataclasses import replace

import numpy as np
import pytest

from revshare import DemandProcess, DomainError, MarketState, integrate, mix_seed, simulate_ensemble, simulate_once
from revshare._kernels import DONE_L, XL
from revshare.demand import BassParams, bass_adopters, peak_time
from revshare.presets import free_legal, pure_bass
from revshare.scenario import scale_scenario
from revshare.stochastic import EVENT_LOG_COLUMNS, event_log, write_event_log

SEED = 42


def test_mix_seed_is_64_bit_and_spread():
    seeds = {mix_seed(SEED, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert all(0 <= s < 2**64 for s in seeds)
    assert mix_seed(SEED, 0) != mix_seed(SEED + 1, 0)


def test_no_market_is_all_zero(default_scn):
    scn = replace(default_scn, demand=DemandProcess.constant(0.0, 0.0), initial_state=MarketState())
    traj, final = simulate_once(scn, SEED)
    assert not np.any(traj.data)
    assert final.net_revenue == 0.0


def test_same_seed_same_run(default_scn):
    a, fa = simulate_once(default_scn, 7)
    b, fb = simulate_once(default_scn, 7)
    assert np.array_equal(a.data, b.data) and fa == fb
    assert np.array_equal(event_log(default_scn, 7), event_log(default_scn, 7))
    _, fc = simulate_once(default_scn, 8)
    assert fc != fa


def test_single_replication_matches_simulate_once(default_scn):
    run = simulate_ensemble(default_scn, SEED, 1)
    _, final = simulate_once(default_scn, mix_seed(SEED, 0))
    assert run.final_states[0] == final
    assert run.std_net == 0.0


def test_order_and_workers_do_not_matter(default_scn):
    scn = scale_scenario(default_scn, 200)
    ref = simulate_ensemble(scn, SEED, 12)
    perm = list(np.random.default_rng(3).permutation(12))
    for run in (simulate_ensemble(scn, SEED, 12, order=perm), simulate_ensemble(scn, SEED, 12, workers=3)):
        assert run.final_states == ref.final_states
        assert np.array_equal(run.mean_path, ref.mean_path)
        assert list(run.summary_rows()) == list(ref.summary_rows())


def test_integer_conservation_and_ledger(default_scn):
    run = simulate_ensemble(scale_scenario(default_scn, 300), SEED, 20, keep_trajectories=True)
    delta = default_scn.econ.share_fraction
    for traj in run.trajectories:
        c = traj.column
        for name in ("x_L", "y_L", "x_I", "y_I", "A", "completed_L", "completed_I"):
            assert np.array_equal(c(name), np.round(c(name)))
            assert np.all(c(name) >= 0)
        assert np.array_equal(c("A"), c("x_L") + c("x_I") + c("completed_L") + c("completed_I"))
        assert np.all(np.diff(c("A")) >= 0) and c("A")[-1] <= 300
        gap = np.abs(c("shared_revenue") - delta * c("gross_revenue"))
        assert np.all(gap <= np.spacing(c("shared_revenue")))


def test_event_log_consistent_with_run(default_scn):
    scn = scale_scenario(default_scn, 100)
    log = event_log(scn, SEED)
    _, final = simulate_once(scn, SEED)
    assert np.all(np.diff(log[:, 0]) >= 0)
    last = log[-1]
    assert tuple(last[3:8]) == (final.x_L, final.y_L, final.x_I, final.y_I, final.A)
    assert np.sum(log[:, 1] == 0) == final.A


def test_event_log_file(default_scn, tmp_path):
    path = tmp_path / "ev.csv"
    write_event_log(scale_scenario(default_scn, 100), SEED, 2, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(EVENT_LOG_COLUMNS)
    assert {ln.split(",")[0] for ln in lines[1:]} == {"0", "1"}


def test_rejects_fractional_market(default_scn):
    with pytest.raises(DomainError, match="integral"):
        simulate_once(scale_scenario(default_scn, 100.5), SEED)
    with pytest.raises(DomainError):
        simulate_ensemble(default_scn, SEED, 0)


def test_bad_order_rejected(default_scn):
    with pytest.raises(ValueError):
        simulate_ensemble(scale_scenario(default_scn, 100), SEED, 3, order=[0, 0, 1])


def test_free_legal_matches_fluid_at_twice_peak(default_scn):
    scn = free_legal(default_scn)
    t2 = 2 * peak_time(default_scn.demand.params)
    k = int(round(t2 / scn.recording_interval))
    run = simulate_ensemble(scn, SEED, 200)
    fl = integrate(scn.initial_state, scn)
    m = run.mean_path
    var = run.var_path
    # joint variance of the sum is not tracked; bound it by (sd1 + sd2)^2
    se = (math.sqrt(var[k, XL]) + math.sqrt(var[k, DONE_L])) / math.sqrt(200)
    stoch = m[k, XL] + m[k, DONE_L]
    fluid = fl.column("x_L")[k] + fl.column("completed_L")[k]
    assert abs(stoch - fluid) <= 3 * se


@pytest.mark.parametrize("m", [500, 1000])
def test_ensemble_net_within_clt_band(default_scn, m):
    scn = scale_scenario(default_scn, m)
    run = simulate_ensemble(scn, SEED, 200)
    fluid = integrate(scn.initial_state, scn).final.net_revenue
    assert abs(run.mean_net - fluid) <= 3 * run.stderr_net


@pytest.mark.slow
def test_thinning_reproduces_bass_curve():
    p, q, m = 0.03, 0.38, 5000
    scn = pure_bass(p, q, m, 2 * peak_time(BassParams(p, q, m)), recording_interval=0.5, dt=0.01)
    run = simulate_ensemble(scn, SEED, 500)
    a = run.mean_trajectory().column("A")
    se = run.column_stderr("A")
    exact = np.array([bass_adopters(BassParams(p, q, m), t) for t in run.times])
    z = np.abs(a[1:] - exact[1:]) / se[1:]
    assert np.max(z) <= 3


@pytest.mark.slow
def test_fluid_limit_deviation_per_capita_shrinks(default_scn):
    devs = []
    for m in (100, 1000, 10000):
        scn = scale_scenario(default_scn, m)
        fluid = integrate(scn.initial_state, scn).final.net_revenue
        run = simulate_ensemble(scn, SEED, 1000)
        devs.append(abs(run.mean_net - fluid) / m)
    assert devs[0] > devs[1] > devs[2], devs
