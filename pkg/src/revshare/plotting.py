"""Static SVG line charts from trajectory and sweep CSV files."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ._io import atomic_write_text  # noqa: E402


def _read(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def _save(fig, out):
    from io import StringIO

    buf = StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write_text(out, buf.getvalue())


def plot_trajectory(csv_path, out) -> None:
    cols = _read(csv_path)
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for name, style in (("x_L", "-"), ("y_L", "-"), ("x_I", "--"), ("y_I", "--")):
        top.plot(cols["time"], cols[name], style, label=name)
    top.set_ylabel("peers")
    top.legend(loc="upper right")
    for name in ("gross", "shared", "net"):
        bottom.plot(cols["time"], cols[name], label=name)
    bottom.set_xlabel("time")
    bottom.set_ylabel("revenue")
    bottom.legend(loc="upper left")
    _save(fig, out)


def plot_sweep(csv_path, out) -> None:
    cols = _read(csv_path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(cols["delta"], cols["net_revenue"], marker="o", ms=3)
    ax.set_xlabel("share fraction")
    ax.set_ylabel("net revenue")
    _save(fig, out)


def plot_csv(csv_path, out) -> str:
    """Pick the chart type from the CSV header; returns the kind drawn."""
    with open(csv_path, newline="") as fh:
        header = next(csv.reader(fh), [])
    if "time" in header and "x_L" in header:
        plot_trajectory(csv_path, out)
        return "trajectory"
    if "delta" in header and "net_revenue" in header:
        plot_sweep(csv_path, out)
        return "sweep"
    raise ValueError(f"{Path(csv_path).name}: not a trajectory or sweep CSV")
