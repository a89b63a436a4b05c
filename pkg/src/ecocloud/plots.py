"""Matplotlib renderers for the trade-off scatter, fitness trajectory, and
Pareto front.  Figures are written to files next to the delimited output;
nothing here is needed by the numerical pipeline."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import SweepPoint
from .sustainability import INDICATORS

AXIS_LABELS = {
    "real_profit": "real profit (USD/h)",
    "virtual_profit": "virtual profit (USD/h)",
    **{ind: f"{ind} rate (g/h)" for ind in INDICATORS},
}


def _axis_value(p: SweepPoint, axis: str) -> float:
    if axis == "real_profit":
        return p.real_profit
    if axis == "virtual_profit":
        return p.virtual_profit
    return p.rates.as_dict()[axis]


def render_sweep(
    points: list[SweepPoint],
    path,
    x_axis: str = "virtual_profit",
    y_axis: str = "co2",
) -> None:
    """Scatter of blade states: utilization as a cold-to-hot color ramp,
    frequency as border darkness, the live state as a red plus marker."""
    fig, ax = plt.subplots(figsize=(7, 5))
    freqs = sorted({p.f_ghz for p in points})
    f_lo, f_hi = freqs[0], freqs[-1]
    span = (f_hi - f_lo) or 1.0
    xs = [_axis_value(p, x_axis) for p in points]
    ys = [_axis_value(p, y_axis) for p in points]
    edge_gray = [0.75 * (1 - (p.f_ghz - f_lo) / span) for p in points]
    sc = ax.scatter(
        xs,
        ys,
        c=[p.u for p in points],
        cmap="coolwarm",
        vmin=0.0,
        vmax=1.0,
        s=60,
        edgecolors=[(g, g, g) for g in edge_gray],
        linewidths=1.2,
    )
    for p, xv, yv in zip(points, xs, ys):
        if p.is_current:
            ax.plot(xv, yv, marker="+", color="red", markersize=16, markeredgewidth=2.5)
    fig.colorbar(sc, ax=ax, label="utilization")
    ax.set_xlabel(AXIS_LABELS.get(x_axis, x_axis))
    ax.set_ylabel(AXIS_LABELS.get(y_axis, y_axis))
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_trajectory(trajectory: list[float], path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(range(1, len(trajectory) + 1), trajectory, marker=".", lw=1)
    ax.set_xlabel("generation")
    ax.set_ylabel("best fitness (virtual profit, USD/h)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_pareto(vectors: list[tuple[float, ...]], path, indicator: str = "co2") -> None:
    """Front projection: real profit against one indicator rate."""
    idx = 1 + INDICATORS.index(indicator)
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter([-v[0] for v in vectors], [v[idx] for v in vectors], s=40)
    ax.set_xlabel("real profit (USD/h)")
    ax.set_ylabel(AXIS_LABELS[indicator])
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
