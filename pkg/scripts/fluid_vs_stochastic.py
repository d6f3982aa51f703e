"""How closely the fluid model tracks the finite market as M grows."""

import argparse
import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from revshare import integrate, simulate_ensemble  # noqa: E402
from revshare.scenario import default_scenario, scale_scenario  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="100,300,1000,3000,10000")
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    base = default_scenario()
    print(f"{'M':>7} {'fluid':>10} {'stoch mean':>11} {'stderr':>8} {'rel err':>8} {'z':>6} {'secs':>6}")
    rows = []
    for m in (int(s) for s in args.sizes.split(",")):
        scn = scale_scenario(base, m)
        t0 = time.perf_counter()
        fluid = integrate(scn.initial_state, scn)
        run = simulate_ensemble(scn, args.seed, args.reps)
        f = fluid.final.net_revenue
        rel = abs(run.mean_net - f) / f
        z = (run.mean_net - f) / run.stderr_net
        print(f"{m:>7} {f:>10.2f} {run.mean_net:>11.2f} {run.stderr_net:>8.2f} {rel:>8.4f} {z:>+6.2f} "
              f"{time.perf_counter() - t0:>6.2f}")
        rows.append((m, fluid, run))

    fig, axes = plt.subplots(1, len(rows), figsize=(3.2 * len(rows), 3), sharey=True)
    for ax, (m, fluid, run) in zip(axes, rows):
        mean = run.mean_trajectory()
        for name, color in (("x_L", "tab:blue"), ("x_I", "tab:red")):
            ax.plot(fluid.times, fluid.column(name) / m, color=color, label=f"{name} fluid")
            se = run.column_stderr(name)
            ax.fill_between(run.times, (mean.column(name) - 2 * se) / m, (mean.column(name) + 2 * se) / m,
                            color=color, alpha=0.3, lw=0)
        ax.set_title(f"M = {m}")
        ax.set_xlabel("time")
    axes[0].set_ylabel("downloaders / M")
    axes[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out / "fluid_vs_stochastic.svg")


if __name__ == "__main__":
    main()
