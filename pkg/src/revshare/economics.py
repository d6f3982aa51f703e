"""Revenue accounting, share-fraction optimization and market-size scaling runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._io import csv_text, write_csv
from .fluid import MarketState, Trajectory, integrate
from .market import EconParams
from .scenario import Scenario, parse_regime, regime_scenario
from .stochastic import simulate_ensemble

FLUID = "fluid"
STOCHASTIC = "stochastic"

SWEEP_COLUMNS = ("delta", "net_revenue", "gross_revenue", "shared_revenue", "legal_completion_share")
REPORT_COLUMNS = (
    "regime",
    "demand_kind",
    "M",
    "engine",
    "delta_star",
    "net_no_share",
    "net_with_share",
    "gain_ratio",
    "legal_completion_share",
    "fluid_stoch_rel_err",
)


@dataclass(frozen=True)
class RevenueReport:
    gross: float
    shared: float
    net: float
    completed_legal: float
    completed_illicit: float
    legal_share_of_completions: float


def report_from_state(final: MarketState) -> RevenueReport:
    done = final.completed_L + final.completed_I
    return RevenueReport(
        gross=final.gross_revenue,
        shared=final.shared_revenue,
        net=final.gross_revenue - final.shared_revenue,
        completed_legal=final.completed_L,
        completed_illicit=final.completed_I,
        legal_share_of_completions=final.completed_L / max(done, 1.0),
    )


def revenue_report(traj: Trajectory, econ: EconParams | None = None) -> RevenueReport:
    """Final ledgers of a trajectory.  ``econ`` is accepted for symmetry with
    the sweep API; the ledgers already carry the share split."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    return report_from_state(traj.final)


def delta_grid(step: float = 0.025, upper: float = 1.0) -> np.ndarray:
    n = int(round(upper / step))
    return np.round(np.arange(n + 1) * step, 12)


@dataclass
class SweepResult:
    deltas: np.ndarray
    net_revenues: np.ndarray
    best_delta: float
    best_net: float
    baseline_net: float
    gain_ratio: float
    capped: bool = False
    reports: list[RevenueReport] = field(default_factory=list, repr=False)

    def rows(self):
        for d, r in zip(self.deltas, self.reports):
            yield float(d), r.net, r.gross, r.shared, r.legal_share_of_completions

    def to_csv(self, path) -> None:
        write_csv(path, SWEEP_COLUMNS, self.rows())


def evaluate(scenario: Scenario, engine: str = FLUID, *, reps: int = 200, seed: int | None = None,
             workers: int = 1) -> RevenueReport:
    """Revenue of one scenario: the fluid final ledger, or the ensemble mean."""
    if engine == FLUID:
        return revenue_report(integrate(scenario.initial_state, scenario))
    if engine == STOCHASTIC:
        if seed is None:
            raise ValueError("stochastic engine requires a seed")
        run = simulate_ensemble(scenario, seed, reps, workers=workers)
        mean = MarketState(*np.mean([s.to_array() for s in run.final_states], axis=0))
        return report_from_state(mean)
    raise ValueError(f"unknown engine {engine!r}")


def sweep_delta(
    scenario: Scenario,
    deltas=None,
    engine: str = FLUID,
    *,
    reps: int = 200,
    seed: int | None = None,
    workers: int = 1,
) -> SweepResult:
    """Net revenue over a share-fraction grid; argmax with smallest-delta ties."""
    deltas = delta_grid() if deltas is None else np.asarray(deltas, dtype=float)
    if deltas.size == 0:
        raise ValueError("empty delta grid")
    if np.any((deltas < 0) | (deltas > 1)):
        raise ValueError("every delta must lie in [0, 1]")
    if not np.any(deltas == 0):
        raise ValueError("delta grid must contain 0")
    reports = []
    for d in deltas:
        try:
            reports.append(
                evaluate(scenario.with_share(float(d)), engine, reps=reps, seed=seed, workers=workers)
            )
        except Exception as exc:
            raise type(exc)(f"delta={d:g}: {exc}") from exc
    nets = np.array([r.net for r in reports])
    top = np.flatnonzero(nets == nets.max())
    best = int(top[np.argmin(deltas[top])])
    baseline = float(nets[int(np.flatnonzero(deltas == 0)[0])])
    eps = 1e-9 * scenario.econ.price
    capped = baseline < eps
    gain = 1.0 if nets[best] <= baseline else float(nets[best]) / max(baseline, eps)
    return SweepResult(
        deltas=deltas,
        net_revenues=nets,
        best_delta=float(deltas[best]),
        best_net=float(nets[best]),
        baseline_net=baseline,
        gain_ratio=gain,
        capped=capped,
        reports=reports,
    )


@dataclass
class ExperimentRow:
    regime: str
    demand_kind: str
    M: float
    engine: str
    delta_star: float
    net_no_share: float
    net_with_share: float
    gain_ratio: float
    legal_completion_share: float
    fluid_stoch_rel_err: float

    def values(self):
        return tuple(getattr(self, c) for c in REPORT_COLUMNS)


@dataclass
class ExperimentReport:
    rows: list[ExperimentRow]

    def csv(self) -> str:
        return csv_text(REPORT_COLUMNS, (r.values() for r in self.rows))

    def to_csv(self, path) -> None:
        write_csv(path, REPORT_COLUMNS, (r.values() for r in self.rows))

    def text_table(self) -> str:
        head = list(REPORT_COLUMNS)
        body = []
        for r in self.rows:
            cells = []
            for v in r.values():
                if isinstance(v, float):
                    cells.append("-" if math.isnan(v) else f"{v:.6g}")
                else:
                    cells.append(str(v))
            body.append(cells)
        widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(head)]
        line = lambda cells: "  ".join(c.rjust(w) for c, w in zip(cells, widths))  # noqa: E731
        return "\n".join([line(head), line(["-" * w for w in widths])] + [line(b) for b in body])


def scaling_experiment(
    template: Scenario,
    sizes,
    regimes,
    engines=(FLUID,),
    *,
    deltas=None,
    reps: int = 200,
    seed: int | None = None,
    workers: int = 1,
) -> ExperimentReport:
    """Optimal-share revenue across market sizes for each regime and engine.

    Rows come in (regime, M, engine) order.  ``fluid_stoch_rel_err`` compares
    the stochastic ensemble mean with the fluid value at the stochastic
    optimum; it is NaN when only the fluid engine runs.
    """
    sizes = list(sizes)
    if len(sizes) < 2 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("market sizes must be strictly increasing with at least two entries")
    engines = list(engines)
    if FLUID not in engines:
        engines.insert(0, FLUID)
    for e in engines:
        if e not in (FLUID, STOCHASTIC):
            raise ValueError(f"unknown engine {e!r}")
    for r in regimes:
        parse_regime(r)
    rows = []
    for regime in regimes:
        _, kind = parse_regime(regime)
        for m in sizes:
            scn = regime_scenario(template, regime, m)
            sweeps = {
                e: sweep_delta(scn, deltas, e, reps=reps, seed=seed, workers=workers)
                for e in engines
            }
            rel = math.nan
            if STOCHASTIC in sweeps:
                st, fl = sweeps[STOCHASTIC], sweeps[FLUID]
                i = int(np.flatnonzero(fl.deltas == st.best_delta)[0])
                ref = fl.net_revenues[i]
                rel = abs(st.best_net - ref) / max(abs(ref), 1e-9 * scn.econ.price)
            for e in engines:
                sw = sweeps[e]
                i = int(np.flatnonzero(sw.deltas == sw.best_delta)[0])
                rows.append(
                    ExperimentRow(
                        regime=regime,
                        demand_kind=kind,
                        M=float(m),
                        engine=e,
                        delta_star=sw.best_delta,
                        net_no_share=sw.baseline_net,
                        net_with_share=sw.best_net,
                        gain_ratio=sw.gain_ratio,
                        legal_completion_share=sw.reports[i].legal_share_of_completions,
                        fluid_stoch_rel_err=rel,
                    )
                )
    return ExperimentReport(rows)
