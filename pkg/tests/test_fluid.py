import math
from dataclasses import replace

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from revshare import (
    DemandProcess,
    DomainError,
    MarketState,
    SimulationError,
    SwarmParams,
    delay_estimate,
    fluid_rhs,
    integrate,
    service_rate,
)
from revshare.fluid import TRAJECTORY_COLUMNS, perceived_delay, recording_grid
from revshare.presets import monopoly, single_swarm_fixed_point

POP = ("x_L", "y_L", "x_I", "y_I", "A", "completed_L", "completed_I")
counts = st.floats(0.0, 1e4)


def test_service_rate_examples():
    eff = SwarmParams(peer_upload=0.5, seed_departure_rate=1.0)
    ineff = SwarmParams(0.5, 1.0, "inefficient", download_cap=1.0, server_capacity=2.0)
    assert service_rate(0, 7, eff) == 0.0
    assert service_rate(1, 1, eff) == pytest.approx(1.0)
    assert service_rate(10, 4, ineff) == pytest.approx(4.0)


def test_delay_examples():
    sw = SwarmParams(0.5, 1.0, download_cap=math.inf)
    assert delay_estimate(0, 3, sw) == 0.0
    assert delay_estimate(4, 0, sw) == pytest.approx(2.0)  # service 0.5 * 4 = 2
    dead = SwarmParams(1.0, 1.0, "inefficient")
    assert delay_estimate(3, 0, dead) == math.inf


def test_perceived_delay_of_empty_swarm():
    sw = SwarmParams(0.5, 1.0, download_cap=2.0, server_capacity=1.0)
    # one newcomer alone is served at min(c_d, mu*eta + ... ) -> limit is 1/c_d here
    assert perceived_delay(0, 10, sw) == pytest.approx(0.5)
    assert perceived_delay(0, 0, SwarmParams(1.0, 1.0, "inefficient")) == math.inf
    assert perceived_delay(4, 0, SwarmParams(0.5, 1.0)) == delay_estimate(4, 0, SwarmParams(0.5, 1.0))


@given(counts, counts, st.floats(0, 5), st.sampled_from(["efficient", "inefficient"]),
       st.floats(0.1, 10), st.floats(0, 100))
def test_service_rate_bounds(x, y, mu, mode, cap, s):
    sw = SwarmParams(mu, 1.0, mode, download_cap=cap, server_capacity=s)
    r = service_rate(x, y, sw)
    assert 0.0 <= r <= cap * x + 1e-9
    assert service_rate(x, y + 1, sw) >= r


def test_empty_market_receives_only_arrivals(default_scn):
    d = fluid_rhs(MarketState(), 0.0, default_scn)
    p, m = default_scn.demand.params.p_innov, default_scn.market_size
    assert d.x_L + d.x_I == pytest.approx(p * m)
    assert d.A == pytest.approx(p * m)
    assert d.y_L == d.y_I == d.completed_L == d.completed_I == 0.0


def _pop(d):
    return np.array([getattr(d, f) for f in POP])


@pytest.mark.parametrize("make", [monopoly, lambda s: s.with_econ(price=5.0, choice_temperature=0.0)])
def test_sharing_without_response_only_moves_money(default_scn, make):
    base = make(default_scn)
    state = MarketState(x_L=40, y_L=12, x_I=30, y_I=50, A=300, gross_revenue=80,
                        shared_revenue=0, completed_L=150, completed_I=80)
    a = fluid_rhs(state, 0.0, base.with_share(0.0))
    b = fluid_rhs(state, 0.0, base.with_share(0.5))
    assert np.array_equal(_pop(a), _pop(b))
    assert a.gross_revenue == b.gross_revenue
    assert a.shared_revenue == 0.0
    assert b.shared_revenue == pytest.approx(0.5 * b.gross_revenue)


def test_rhs_vanishes_at_hand_fixed_point():
    scn = single_swarm_fixed_point()
    d = fluid_rhs(MarketState(x_L=1.0, y_L=1.0), 0.0, scn)
    assert abs(d.x_L) < 1e-12 and abs(d.y_L) < 1e-12


def test_integrator_reaches_fixed_point():
    scn = single_swarm_fixed_point()
    s = integrate(scn.initial_state, scn).final
    assert s.x_L == pytest.approx(1.0, rel=1e-3)
    assert s.y_L == pytest.approx(1.0, rel=1e-3)


def test_zero_demand_stays_zero(default_scn):
    scn = replace(default_scn, demand=DemandProcess.constant(0.0), initial_state=MarketState())
    traj = integrate(scn.initial_state, scn)
    assert not np.any(traj.data)


def test_conservation_and_ledger(default_scn):
    traj = integrate(default_scn.initial_state, default_scn)
    c = traj.column
    drift = c("A") - c("x_L") - c("x_I") - c("completed_L") - c("completed_I")
    assert np.max(np.abs(drift)) <= 1e-6 * default_scn.market_size
    delta = default_scn.econ.share_fraction
    assert np.allclose(c("shared_revenue"), delta * c("gross_revenue"), rtol=1e-9, atol=0)
    assert np.all(traj.data >= 0)
    assert np.all(c("A") <= default_scn.market_size)


def test_dt_halving_changes_little(default_scn):
    coarse = integrate(default_scn.initial_state, default_scn, dt=0.02).final.net_revenue
    fine = integrate(default_scn.initial_state, default_scn, dt=0.01).final.net_revenue
    assert abs(coarse - fine) / fine < 1e-3


def test_recording_grid_and_shape(default_scn):
    traj = integrate(default_scn.initial_state, default_scn, horizon=1.05)
    assert traj.times[-1] == pytest.approx(1.1)
    assert np.allclose(np.diff(traj.times), default_scn.recording_interval)
    assert len(recording_grid(1.0, 0.1)) == 11


def test_recording_interval_must_be_multiple_of_dt(default_scn):
    with pytest.raises(DomainError):
        integrate(default_scn.initial_state, default_scn, dt=0.03)


def test_non_finite_state_reported(default_scn):
    for bad in (math.inf, math.nan):
        with pytest.raises(SimulationError):
            integrate(MarketState(x_L=bad), default_scn)


def test_csv_header(default_scn, tmp_path):
    traj = integrate(default_scn.initial_state, default_scn, horizon=1.0)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(TRAJECTORY_COLUMNS)
    assert len(lines) == len(traj) + 1
    row = [float(v) for v in lines[-1].split(",")]
    assert row[TRAJECTORY_COLUMNS.index("net")] == pytest.approx(traj.final.net_revenue)


@pytest.mark.parametrize("kw", [dict(peer_upload=-1), dict(seed_departure_rate=0),
                                dict(efficiency_mode="turbo"), dict(download_cap=0)])
def test_swarm_validation(kw):
    base = dict(peer_upload=1.0, seed_departure_rate=1.0)
    base.update(kw)
    with pytest.raises(ValueError):
        SwarmParams(**base)


def test_capped_constant_demand_conserves_mass(default_scn):
    # 7 arrivals per unit time, 100 available: runs out mid-step at t = 14.2857...
    scn = replace(default_scn, demand=DemandProcess.constant(7.0, 100.0), initial_state=MarketState(),
                  horizon=20.0)
    traj = integrate(scn.initial_state, scn)
    c = traj.column
    assert c("A")[-1] == 100.0
    i = np.searchsorted(traj.times, 10.0)
    assert c("A")[i] == pytest.approx(70.0)
    drift = c("A") - c("x_L") - c("x_I") - c("completed_L") - c("completed_I")
    assert np.max(np.abs(drift)) < 1e-10
