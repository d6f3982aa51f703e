"""Mean adoption curve of the finite market against the Bass solution.

Small markets show a visible O(1) lag behind the deterministic curve; it
washes out as M grows.
"""

import sys

import numpy as np

from revshare import simulate_ensemble
from revshare.demand import BassParams, bass_adopters, peak_time
from revshare.presets import pure_bass

P, Q = 0.03, 0.38


def main(seed=42, reps=500):
    for m in (200, 1000, 5000):
        bp = BassParams(P, Q, m)
        scn = pure_bass(P, Q, m, 2 * peak_time(bp), recording_interval=0.5)
        run = simulate_ensemble(scn, seed, reps)
        exact = np.array([bass_adopters(bp, t) for t in run.times])
        z = (run.mean_trajectory().column("A") - exact)[1:] / run.column_stderr("A")[1:]
        print(f"M={m:>5}: max |z| {np.abs(z).max():.2f}, mean z {z.mean():+.2f}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:]))
