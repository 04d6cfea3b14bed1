"""Predictions derived from fitted mixture and growth models."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnreachableTargetError
from .gmm import GmmFit
from .loggrowth import LogGrowthFit, log_growth_value


@dataclass(frozen=True)
class HourInterval:
    start: float
    end: float

    def __post_init__(self):
        if not (0 <= self.start < self.end <= 24):
            raise DomainError(f"need 0 <= start < end <= 24, got [{self.start}, {self.end}]")

    @property
    def width(self) -> float:
        return self.end - self.start

    @classmethod
    def parse(cls, text: str) -> "HourInterval":
        try:
            start, end = (float(v) for v in text.split(","))
        except ValueError:
            raise DomainError(f"interval must look like START,END; got {text!r}") from None
        return cls(start, end)


FULL_DAY = HourInterval(0.0, 24.0)


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2))


def mixture_cdf(fit: GmmFit, x: float) -> float:
    """P(X <= x) for the untruncated mixture."""
    return (fit.w1 * normal_cdf((x - fit.mu1) / fit.sigma1)
            + fit.w2 * normal_cdf((x - fit.mu2) / fit.sigma2))


def _component_mass(mu: float, sigma: float, start: float, end: float) -> float:
    lo, hi = (start - mu) / sigma, (end - mu) / sigma
    # difference of upper tails keeps precision when both bounds sit above the mean
    if lo > 0:
        return normal_cdf(-lo) - normal_cdf(-hi)
    return normal_cdf(hi) - normal_cdf(lo)


def expected_count(fit: GmmFit, interval: HourInterval) -> float:
    """Expected number of a user's events inside ``interval`` (same day)."""
    return fit.n_events * (
        fit.w1 * _component_mass(fit.mu1, fit.sigma1, interval.start, interval.end)
        + fit.w2 * _component_mass(fit.mu2, fit.sigma2, interval.start, interval.end)
    )


def peak_times(fit: GmmFit) -> tuple[float, float]:
    """Component means as proxies for the two activity peaks, ascending."""
    return tuple(sorted((fit.mu1, fit.mu2)))


def predict_retweets(fit: LogGrowthFit, t: float) -> tuple[float, float]:
    """(raw curve value, value clamped at zero) at age ``t`` hours."""
    raw = log_growth_value(fit, t)
    return raw, max(0.0, raw)


def time_to_reach(fit: LogGrowthFit, target: float) -> float:
    """Smallest age >= 0 at which the curve reaches ``target``."""
    if not fit.a > 0:
        raise UnreachableTargetError(
            f"curve with a={fit.a:g} never grows; target {target:g} is unreachable"
        )
    return max(0.0, math.exp((target - fit.d) / fit.a) - fit.c)
