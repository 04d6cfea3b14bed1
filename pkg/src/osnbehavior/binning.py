"""Daily, weekly and monthly activity histograms."""

from __future__ import annotations

import calendar
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Optional

from .errors import DomainError
from .records import EventRecord

KINDS = ("daily", "weekly", "monthly")


@dataclass(frozen=True)
class Pattern:
    kind: str
    year: Optional[int] = None
    month: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown pattern {self.kind!r}; expected one of {KINDS}")
        monthly = self.kind == "monthly"
        if monthly != (self.year is not None and self.month is not None):
            raise DomainError("year and month are required for monthly patterns only")
        if monthly and not (1 <= self.month <= 12):
            raise DomainError(f"invalid month {self.month}")

    @classmethod
    def daily(cls):
        return cls("daily")

    @classmethod
    def weekly(cls):
        return cls("weekly")

    @classmethod
    def monthly(cls, year: int, month: int):
        return cls("monthly", year, month)

    @property
    def n_bins(self) -> int:
        if self.kind == "daily":
            return 24
        if self.kind == "weekly":
            return 7
        return calendar.monthrange(self.year, self.month)[1]

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "monthly":
            d.update(year=self.year, month=self.month)
        return d


@dataclass(frozen=True)
class Histogram:
    pattern: Pattern
    edges: tuple[float, ...]
    counts: tuple[int, ...]
    total: int

    @property
    def bin_width(self) -> float:
        return self.edges[1] - self.edges[0]

    def centers(self) -> list[float]:
        return [(lo + hi) / 2 for lo, hi in zip(self.edges, self.edges[1:])]

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.to_dict(),
            "edges": list(self.edges),
            "counts": list(self.counts),
            "total": self.total,
        }


def _shift(ts: datetime, tz_offset: float) -> datetime:
    return ts + timedelta(hours=tz_offset) if tz_offset else ts


def time_of_day(timestamp: datetime, tz_offset: float = 0.0) -> float:
    """Fractional hours since midnight, in [0, 24)."""
    ts = _shift(timestamp, tz_offset)
    return ts.hour + ts.minute / 60 + ts.second / 3600


def bin_events(
    events: Iterable[EventRecord], pattern: Pattern, tz_offset: float = 0.0
) -> Histogram:
    """Count events per hour of day, ISO weekday (Monday=0) or day of month.

    Monthly patterns keep only the events that fall inside the selected month.
    """
    counts = [0] * pattern.n_bins
    for event in events:
        ts = _shift(event.timestamp, tz_offset)
        if pattern.kind == "daily":
            counts[ts.hour] += 1
        elif pattern.kind == "weekly":
            counts[ts.weekday()] += 1
        elif ts.year == pattern.year and ts.month == pattern.month:
            counts[ts.day - 1] += 1
    edges = tuple(float(i) for i in range(pattern.n_bins + 1))
    return Histogram(pattern, edges, tuple(counts), sum(counts))


def histogram_samples(hist: Histogram) -> list[float]:
    """Expand a histogram into bin-center pseudo-samples."""
    out: list[float] = []
    for center, count in zip(hist.centers(), hist.counts):
        out.extend([center] * count)
    return out
