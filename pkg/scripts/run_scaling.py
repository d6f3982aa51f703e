"""Optimal revenue share across market sizes for all four regimes.

Writes results/scaling.csv and prints the table.  Pass --stochastic SEED to
add ensemble rows next to the fluid ones.
"""

import argparse
from pathlib import Path

from revshare.economics import delta_grid, scaling_experiment
from revshare.scenario import REGIMES, default_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="500,2000,8000")
    ap.add_argument("--step", type=float, default=0.025)
    ap.add_argument("--stochastic", type=int, metavar="SEED")
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    sizes = [float(s) for s in args.sizes.split(",")]
    engines = ("fluid",) if args.stochastic is None else ("fluid", "stochastic")
    rep = scaling_experiment(default_scenario(), sizes, REGIMES, engines,
                             deltas=delta_grid(args.step), reps=args.reps, seed=args.stochastic)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    rep.to_csv(out / "scaling.csv")
    print(rep.text_table())


if __name__ == "__main__":
    main()
