"""Matplotlib figures saved next to the delimited output.

Import stays local to the CLI paths that need it; the Agg backend keeps this
usable on headless machines.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .curves import YieldCurve
from .dynamics import BalanceTrajectory
from .solver import EquilibriumResult


def _curve_window(curves: Sequence[YieldCurve], pad: float = 2.0) -> tuple[float, float]:
    xs = [x for curve in curves for x in curve.xs]
    lo = min(xs) if xs else 0.0
    hi = max(xs) if xs else 0.0
    if hi - lo < 1.0:
        lo, hi = lo - 2.0, hi + 2.0
    return lo - pad, hi + pad


def save_run_figure(path: Path, title: str, p_curve: YieldCurve,
                    q_curve: YieldCurve, trajectory: BalanceTrajectory,
                    result: EquilibriumResult) -> None:
    fig, (ax_curves, ax_path) = plt.subplots(1, 2, figsize=(10, 4))

    lo, hi = _curve_window([p_curve, q_curve])
    grid = np.linspace(lo, hi, 400)
    ax_curves.plot(grid, p_curve.values(grid), label="giving yield")
    ax_curves.plot(grid, q_curve.values(-grid), label="answering yield")
    if result.converged:
        for level in sorted(set(result.u)):
            ax_curves.axvline(level, color="gray", linestyle=":", linewidth=0.8)
    ax_curves.set_xlabel("balance")
    ax_curves.set_ylabel("yield")
    ax_curves.legend()
    ax_curves.set_title("yield curves")

    steps = np.arange(1, len(trajectory.balances) + 1)
    ax_path.plot(steps, trajectory.balances, marker=".", linewidth=0.8)
    if result.converged:
        for level in sorted(set(result.u)):
            ax_path.axhline(level, color="gray", linestyle=":", linewidth=0.8)
    ax_path.set_xlabel("step")
    ax_path.set_ylabel("balance")
    ax_path.set_title("balance path")

    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sweep_figure(path: Path, title: str, starts: Sequence[float],
                      results: Sequence[EquilibriumResult]) -> None:
    fig, (ax_u, ax_iter) = plt.subplots(1, 2, figsize=(10, 4))

    order = max((len(r.u) for r in results if r.converged), default=0)
    for j in range(order):
        xs = [s for s, r in zip(starts, results) if r.converged]
        ys = [r.u[j] for r in results if r.converged]
        ax_u.plot(xs, ys, marker="o", label=f"phase {j + 1}")
    ax_u.set_xlabel("starting balance")
    ax_u.set_ylabel("equilibrium balance")
    if order:
        ax_u.legend()
    ax_u.set_title("equilibria by start")

    ax_iter.bar([f"{s:g}" for s in starts],
                [r.iterations for r in results], color="steelblue")
    ax_iter.set_xlabel("starting balance")
    ax_iter.set_ylabel("iterations")
    ax_iter.tick_params(axis="x", rotation=60, labelsize=7)
    ax_iter.set_title("iterations to finish")

    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
