"""Fast invariant suite behind ``revshare validate``.

Each check returns ``(name, passed, detail)``.  These are reduced-size
versions of the acceptance tests, sized to finish in a few seconds.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .demand import BassParams, peak_time
from .economics import delta_grid, sweep_delta
from .fluid import integrate
from .presets import monopoly, pure_bass, single_swarm_fixed_point
from .scenario import default_scenario, scale_scenario
from .stochastic import simulate_ensemble


def bass_draws(rng, n):
    """Typical empirical Bass ranges; these keep q/p >= 4, which 99% market
    exhaustion by five peak times requires."""
    for _ in range(n):
        yield rng.uniform(0.01, 0.05), rng.uniform(0.2, 0.6), rng.uniform(100, 10000)


def check_bass_normalization(rng, draws=5):
    worst = 0.0
    for p, q, m in bass_draws(rng, draws):
        scn = pure_bass(p, q, m, 5 * peak_time(BassParams(p, q, m)))
        a = integrate(scn.initial_state, scn).final.A
        worst = max(worst, abs(a - m) / m)
    return "bass normalization", worst < 0.01, f"worst |A(T)-M|/M = {worst:.2e}"


def check_peak(rng, draws=5):
    worst = 0.0
    for p, q, m in bass_draws(rng, draws):
        t_star = peak_time(BassParams(p, q, m))
        scn = pure_bass(p, q, m, 2 * t_star + 1, recording_interval=0.1)
        traj = integrate(scn.initial_state, scn)
        a = traj.column("A")
        rate = (p + q * a / m) * (m - a)
        worst = max(worst, abs(traj.times[int(np.argmax(rate))] - t_star))
    ok = worst <= 0.1
    return "bass peak time", ok, f"worst offset {worst:.3f}"


def check_fixed_point():
    scn = single_swarm_fixed_point()
    s = integrate(scn.initial_state, scn).final
    err = max(abs(s.x_L - 1.0), abs(s.y_L - 1.0))
    return "single-swarm fixed point", err < 1e-3, f"(x, y) = ({s.x_L:.6f}, {s.y_L:.6f})"


def check_conservation_and_ledger():
    scn = default_scenario()
    d = integrate(scn.initial_state, scn).data
    drift = np.max(np.abs(d[:, K.ADOPTERS] - d[:, K.XL] - d[:, K.XI] - d[:, K.DONE_L] - d[:, K.DONE_I]))
    led = np.max(np.abs(d[:, K.SHARED] - scn.econ.share_fraction * d[:, K.GROSS]))
    ok = drift <= 1e-6 * scn.market_size and led <= 1e-9 * max(1.0, d[-1, K.GROSS])
    return "fluid conservation + ledger", ok, f"drift {drift:.2e}, ledger gap {led:.2e}"


def check_fluid_vs_stochastic(seed, m=500, reps=100):
    scn = scale_scenario(default_scenario(), m)
    fluid = integrate(scn.initial_state, scn).final.net_revenue
    run = simulate_ensemble(scn, seed, reps)
    z = (run.mean_net - fluid) / max(run.stderr_net, 1e-12)
    return (
        f"fluid vs stochastic (M={m}, {reps} reps)",
        abs(z) <= 3,
        f"fluid {fluid:.2f}, stochastic {run.mean_net:.2f} +- {run.stderr_net:.2f} (z = {z:+.2f})",
    )


def check_sanity_pole():
    scn = monopoly(default_scenario())
    res = sweep_delta(scn, delta_grid(0.1))
    ok = res.best_delta == 0.0 and bool(np.all(np.diff(res.net_revenues) < 0))
    return "no-competition sanity pole", ok, f"best delta {res.best_delta:g}"


def run_checks(seed: int = 20240601):
    rng = np.random.default_rng(seed)
    return [
        check_bass_normalization(rng),
        check_peak(rng),
        check_fixed_point(),
        check_conservation_and_ledger(),
        check_fluid_vs_stochastic(seed),
        check_sanity_pole(),
    ]

