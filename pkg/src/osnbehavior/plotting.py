"""Raster/PDF versions of the figures via matplotlib (``--plot fig.png``)."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .binning import Histogram
from .errors import DomainError
from .gmm import GmmFit, gmm_density
from .loggrowth import LogGrowthFit, log_growth_value
from .records import RetweetObservation
from .render import BAR_FILL, MODEL_COLOR, OBSERVED_COLOR

DASHES = (6, 4)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_histogram(hist: Histogram, path, fit: Optional[GmmFit] = None, title: str = "") -> Path:
    if fit is not None and hist.pattern.kind != "daily":
        raise DomainError("a mixture curve can only be drawn over a daily histogram")
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.bar(hist.edges[:-1], hist.counts, width=hist.bin_width, align="edge",
           color=BAR_FILL, edgecolor=OBSERVED_COLOR, label="observed")
    if fit is not None:
        x = np.linspace(hist.edges[0], hist.edges[-1], 241)
        ax.plot(x, fit.n_events * hist.bin_width * gmm_density(fit, x), color=MODEL_COLOR,
                dashes=DASHES, label="mixture fit")
        ax.legend(frameon=False)
    ax.set_xlim(hist.edges[0], hist.edges[-1])
    ax.set_ylim(bottom=0)
    ax.set_xlabel("hour of day" if hist.pattern.kind == "daily" else "day")
    ax.set_ylabel("message count")
    ax.set_title(title or f"{hist.pattern.kind.capitalize()} activity")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def plot_growth(series: Sequence[RetweetObservation], fit: LogGrowthFit, path,
                title: str = "Retweet growth") -> Path:
    if not series:
        raise DomainError("cannot draw an empty observation series")
    plt = _pyplot()
    ordered = sorted(series, key=lambda o: o.age_hours)
    ages = [o.age_hours for o in ordered]
    counts = [o.count for o in ordered]
    x_max = ages[-1] if ages[-1] > 0 else 1.0
    grid = np.linspace(0.0, x_max, 200)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(ages, counts, "-o", color=OBSERVED_COLOR, markersize=3, label="observed")
    ax.plot(grid, np.maximum(0.0, log_growth_value(fit, grid)), color=MODEL_COLOR,
            dashes=DASHES, label="log fit")
    ax.set_xlim(0, x_max)
    ax.set_ylim(bottom=0)
    ax.set_xlabel("hours since posting")
    ax.set_ylabel("retweet count")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)
