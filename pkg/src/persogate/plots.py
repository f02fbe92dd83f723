"""Report figures rendered next to the CSV outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
import matplotlib.pyplot as plt

from .correlation import CorrelationTable
from .decision import GainReport
from .evaluation import TripletCounts


def correlation_heatmap(table: CorrelationTable, path) -> None:
    """Predictor x profile heatmap; undefined cells hatched grey."""
    data = np.full((len(table.predictors), len(table.profiles)), np.nan)
    for i, name in enumerate(table.predictors):
        for j, pid in enumerate(table.profiles):
            cell = table.cells[(name, pid)]
            if cell is not None:
                data[i, j] = cell
    fig, ax = plt.subplots(
        figsize=(2.0 + 0.6 * len(table.profiles),
                 1.5 + 0.22 * len(table.predictors)))
    cmap = plt.get_cmap("RdBu_r").copy()
    cmap.set_bad(color="0.85")
    im = ax.imshow(data, cmap=cmap, vmin=-1.0, vmax=1.0, aspect="auto")
    ax.set_xticks(range(len(table.profiles)), table.profiles,
                  rotation=45, ha="right")
    ax.set_yticks(range(len(table.predictors)), table.predictors, fontsize=7)
    ax.set_title("predictor / gain correlation by profile")
    fig.colorbar(im, ax=ax, shrink=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def gain_bars(report: GainReport, path, title: str = "percent gain over "
              "always-personalize") -> None:
    """Grouped bars of ideal / classification / regression percent gain."""
    profiles = [r.profile_id for r in report.rows]
    x = np.arange(len(profiles))
    series = [("ideal", [r.ideal_gain for r in report.rows]),
              ("classification", [r.cls_gain for r in report.rows]),
              ("regression", [r.reg_gain for r in report.rows])]
    series = [(label, vals) for label, vals in series
              if not any(v is None for v in vals)]
    width = 0.8 / max(1, len(series))
    fig, ax = plt.subplots(figsize=(1.8 + 0.9 * len(profiles), 4.0))
    for s, (label, vals) in enumerate(series):
        ax.bar(x + (s - (len(series) - 1) / 2) * width, vals, width,
               label=label)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(x, profiles, rotation=45, ha="right")
    ax.set_ylabel("% gain")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def count_bars(counts: list[TripletCounts], path) -> None:
    """Stacked bars of gained / harmed / unchanged triplets per profile."""
    profiles = [c.profile_id for c in counts]
    pos = np.array([c.positive for c in counts])
    neg = np.array([c.negative for c in counts])
    zeros = np.array([c.zeros for c in counts])
    x = np.arange(len(profiles))
    fig, ax = plt.subplots(figsize=(1.8 + 0.9 * len(profiles), 4.0))
    ax.bar(x, pos, label="gain > 0", color="tab:green")
    ax.bar(x, neg, bottom=pos, label="gain < 0", color="tab:red")
    ax.bar(x, zeros, bottom=pos + neg, label="gain = 0", color="0.7")
    ax.set_xticks(x, profiles, rotation=45, ha="right")
    ax.set_ylabel("triplets")
    ax.set_title("personalization outcome by profile")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
