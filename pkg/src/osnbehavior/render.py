"""Standalone SVG figures: observed data as solid marks, model curves dashed.

Output is a pure function of the inputs.  Coordinates are written with two
decimals so golden files stay byte-stable across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .binning import Histogram
from .errors import DomainError
from .gmm import GmmFit, gmm_density
from .loggrowth import LogGrowthFit, log_growth_value
from .records import RetweetObservation

DASH = "6,4"
OBSERVED_COLOR = "#1f4e79"
MODEL_COLOR = "#c0392b"
BAR_FILL = "#9dc3e6"
USER_CURVE_POINTS = 241
GROWTH_CURVE_POINTS = 200

_MARGIN_LEFT, _MARGIN_RIGHT, _MARGIN_TOP, _MARGIN_BOTTOM = 64, 20, 36, 52


@dataclass(frozen=True)
class FigureSpec:
    width: int = 640
    height: int = 480
    title: str = ""
    x_label: str = ""
    y_label: str = ""

    def __post_init__(self):
        if self.width < 100 or self.height < 100:
            raise DomainError("figure width and height must be at least 100 px")


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _label(v: float) -> str:
    return f"{v:g}"


def nice_step(span: float, target_ticks: int = 5) -> float:
    raw = span / target_ticks
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


class _Canvas:
    def __init__(self, spec: FigureSpec, x_range, y_range):
        self.spec = spec
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.left = _MARGIN_LEFT
        self.right = spec.width - _MARGIN_RIGHT
        self.top = _MARGIN_TOP
        self.bottom = spec.height - _MARGIN_BOTTOM
        self.parts: list[str] = []

    def px(self, x: float) -> float:
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y: float) -> float:
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def add(self, element: str) -> None:
        self.parts.append("  " + element)

    def text(self, x, y, s, anchor="middle", extra=""):
        self.add(f'<text x="{_num(x)}" y="{_num(y)}" text-anchor="{anchor}"{extra}>'
                 f"{escape(s)}</text>")

    def polyline(self, xs, ys, cls, color, dashed=False):
        pts = " ".join(f"{_num(self.px(x))},{_num(self.py(y))}" for x, y in zip(xs, ys))
        dash = f' stroke-dasharray="{DASH}"' if dashed else ""
        self.add(f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{color}" '
                 f'stroke-width="2"{dash}/>')

    def axes(self, x_ticks: Sequence[float], y_step: float):
        s = self.spec
        self.add(f'<line class="axis" x1="{_num(self.left)}" y1="{_num(self.bottom)}" '
                 f'x2="{_num(self.right)}" y2="{_num(self.bottom)}" stroke="#000"/>')
        self.add(f'<line class="axis" x1="{_num(self.left)}" y1="{_num(self.top)}" '
                 f'x2="{_num(self.left)}" y2="{_num(self.bottom)}" stroke="#000"/>')
        for x in x_ticks:
            px = self.px(x)
            self.add(f'<line class="tick" x1="{_num(px)}" y1="{_num(self.bottom)}" '
                     f'x2="{_num(px)}" y2="{_num(self.bottom + 5)}" stroke="#000"/>')
            self.text(px, self.bottom + 18, _label(x))
        n = int(math.floor(self.y1 / y_step + 1e-9))
        for i in range(n + 1):
            y = round(i * y_step, 10)
            py = self.py(y)
            self.add(f'<line class="tick" x1="{_num(self.left - 5)}" y1="{_num(py)}" '
                     f'x2="{_num(self.left)}" y2="{_num(py)}" stroke="#000"/>')
            self.text(self.left - 8, py + 4, _label(y), anchor="end")
        if s.title:
            self.text(s.width / 2, 22, s.title, extra=' font-size="15"')
        if s.x_label:
            self.text((self.left + self.right) / 2, s.height - 12, s.x_label)
        if s.y_label:
            cy = (self.top + self.bottom) / 2
            self.text(18, cy, s.y_label,
                      extra=f' transform="rotate(-90 18 {_num(cy)})"')

    def document(self) -> str:
        s = self.spec
        head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{s.width}" height="{s.height}" viewBox="0 0 {s.width} {s.height}" '
                f'font-family="sans-serif" font-size="12">\n'
                f"  <title>{escape(s.title)}</title>\n")
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _y_range(peak: float) -> tuple[float, float]:
    top = 1.05 * peak
    return 0.0, top if top > 0 else 1.0


def _bars(canvas: _Canvas, hist: Histogram) -> None:
    for lo, hi, count in zip(hist.edges, hist.edges[1:], hist.counts):
        x, x_end = canvas.px(lo), canvas.px(hi)
        y = canvas.py(count)
        canvas.add(f'<rect class="bar" x="{_num(x)}" y="{_num(y)}" width="{_num(x_end - x)}" '
                   f'height="{_num(canvas.bottom - y)}" fill="{BAR_FILL}" '
                   f'stroke="{OBSERVED_COLOR}" stroke-width="1"/>')


def _hist_ticks(hist: Histogram) -> list[float]:
    if hist.pattern.kind == "daily":
        return [float(h) for h in range(0, 25, 4)]
    return list(hist.edges)


def render_histogram(hist: Histogram, fit: Optional[GmmFit] = None,
                     spec: Optional[FigureSpec] = None) -> str:
    """Bar chart of a histogram, with the scaled mixture dashed when ``fit`` is given."""
    if fit is not None and hist.pattern.kind != "daily":
        raise DomainError("a mixture curve can only be drawn over a daily histogram")
    if spec is None:
        spec = FigureSpec(title=f"{hist.pattern.kind.capitalize()} activity",
                          x_label="hour of day" if hist.pattern.kind == "daily" else "day",
                          y_label="message count")
    curve_x = curve_y = None
    peak = max(hist.counts, default=0)
    if fit is not None:
        curve_x = np.linspace(hist.edges[0], hist.edges[-1], USER_CURVE_POINTS)
        curve_y = fit.n_events * hist.bin_width * gmm_density(fit, curve_x)
        peak = max(peak, float(curve_y.max()))
    y_range = _y_range(peak)
    canvas = _Canvas(spec, (hist.edges[0], hist.edges[-1]), y_range)
    canvas.axes(_hist_ticks(hist), nice_step(y_range[1]))
    _bars(canvas, hist)
    if fit is not None:
        canvas.polyline(curve_x, curve_y, "model", MODEL_COLOR, dashed=True)
    return canvas.document()


def render_user_figure(hist: Histogram, fit: GmmFit, spec: Optional[FigureSpec] = None) -> str:
    """24 hourly bars with the fitted mixture, scaled to expected counts, dashed."""
    if hist.pattern.kind != "daily" or len(hist.counts) != 24:
        raise DomainError("user figure needs a 24-bin daily histogram")
    if spec is None:
        spec = FigureSpec(title="Daily posting pattern", x_label="hour of day",
                          y_label="message count")
    return render_histogram(hist, fit, spec)


def render_growth_figure(series: Sequence[RetweetObservation], fit: LogGrowthFit,
                         spec: Optional[FigureSpec] = None) -> str:
    """Observed cumulative retweets (solid) against the clamped fitted curve (dashed)."""
    if not series:
        raise DomainError("cannot draw an empty observation series")
    if spec is None:
        spec = FigureSpec(title="Retweet growth", x_label="hours since posting",
                          y_label="retweet count")
    ordered = sorted(series, key=lambda o: (o.age_hours, o.count))
    ages = [o.age_hours for o in ordered]
    counts = [float(o.count) for o in ordered]
    # a single observation at age 0 has no extent; draw over one hour instead
    x_max = ages[-1] if ages[-1] > 0 else 1.0
    grid = np.linspace(0.0, x_max, GROWTH_CURVE_POINTS)
    predicted = np.maximum(0.0, log_growth_value(fit, grid))
    y_range = _y_range(max(max(counts), float(predicted.max())))
    canvas = _Canvas(spec, (0.0, x_max), y_range)
    x_step = nice_step(x_max)
    n_x = int(math.floor(x_max / x_step + 1e-9))
    canvas.axes([round(i * x_step, 10) for i in range(n_x + 1)], nice_step(y_range[1]))
    if len(ordered) > 1:
        canvas.polyline(ages, counts, "observed", OBSERVED_COLOR)
    for x, y in zip(ages, counts):
        canvas.add(f'<circle class="observed-point" cx="{_num(canvas.px(x))}" '
                   f'cy="{_num(canvas.py(y))}" r="3" fill="{OBSERVED_COLOR}"/>')
    canvas.polyline(grid, predicted, "model", MODEL_COLOR, dashed=True)
    return canvas.document()
