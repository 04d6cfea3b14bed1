"""Crawl scheduling driven by the fitted models, with a simulation harness.

Poll budgets are shared across users in proportion to each user's expected
activity inside a daily window, and each user's polls are placed at
equal-expected-mass points of their fitted mixture.  ``simulate`` replays a
policy against ground-truth events so that it can be compared with evenly
spaced polling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DomainError
from .gmm import GmmFit, gmm_density
from .loggrowth import LogGrowthFit
from .predictor import FULL_DAY, HourInterval, _component_mass, expected_count, time_to_reach
from .synth import SynthSpec

_BISECT_TOL = 1e-7
POLICIES = ("model", "uniform")


@dataclass(frozen=True)
class PollPlan:
    window: HourInterval
    allocations: dict[str, int]
    budget: int

    def __post_init__(self):
        if self.budget < 1:
            raise DomainError("budget must be >= 1")
        if any(n < 0 for n in self.allocations.values()):
            raise DomainError("allocations must be non-negative")
        if sum(self.allocations.values()) != self.budget:
            raise DomainError("allocations must sum to the budget")

    def to_dict(self) -> dict:
        return {
            "window": [self.window.start, self.window.end],
            "budget": self.budget,
            "allocations": dict(sorted(self.allocations.items())),
        }


@dataclass(frozen=True)
class SimResult:
    events_captured: int
    events_total: int
    mean_staleness_hours: float
    policy_name: str

    def to_dict(self) -> dict:
        return {
            "policy_name": self.policy_name,
            "events_captured": self.events_captured,
            "events_total": self.events_total,
            "mean_staleness_hours": self.mean_staleness_hours,
        }


def apportion(rates: Mapping[str, float], budget: int) -> dict[str, int]:
    """Largest-remainder split of ``budget`` proportional to ``rates``.

    Leftover units go to the largest fractional parts, ties to the smaller id.
    All-zero rates split evenly.
    """
    if not rates:
        raise DomainError("no users to allocate polls to")
    if budget < 0:
        raise DomainError("budget must be non-negative")
    ids = sorted(rates)
    total = math.fsum(rates[u] for u in ids)
    if total > 0:
        shares = {u: budget * rates[u] / total for u in ids}
    else:
        shares = {u: budget / len(ids) for u in ids}
    alloc = {u: int(math.floor(shares[u])) for u in ids}
    leftover = budget - sum(alloc.values())
    by_remainder = sorted(ids, key=lambda u: (-(shares[u] - alloc[u]), u))
    for u in by_remainder[:leftover]:
        alloc[u] += 1
    return alloc


def allocate_polls(fits: Mapping[str, GmmFit], window: HourInterval, budget: int) -> PollPlan:
    if not fits:
        raise DomainError("empty fits map")
    rates = {user: expected_count(fit, window) for user, fit in fits.items()}
    return PollPlan(window, apportion(rates, budget), budget)


def _window_mass(fit: GmmFit, start: float, end: float) -> float:
    return (fit.w1 * _component_mass(fit.mu1, fit.sigma1, start, end)
            + fit.w2 * _component_mass(fit.mu2, fit.sigma2, start, end))


def poll_times(allocation: int, fit: GmmFit, window: HourInterval = FULL_DAY) -> list[float]:
    """Hours splitting the window's expected activity into allocation+1 equal parts."""
    if allocation < 0:
        raise DomainError("allocation must be >= 0")
    n = allocation
    total = _window_mass(fit, window.start, window.end)
    if not total > 0:
        step = window.width / (n + 1)
        return [window.start + k * step for k in range(1, n + 1)]
    out = []
    lo_bound = window.start
    for k in range(1, n + 1):
        goal = total * k / (n + 1)
        lo, hi = lo_bound, window.end
        while hi - lo > _BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if _window_mass(fit, window.start, mid) < goal:
                lo = mid
            else:
                hi = mid
        t = 0.5 * (lo + hi)
        out.append(t)
        lo_bound = t
    return out


def model_poll_hours(fit: GmmFit, budget: int, window: HourInterval = FULL_DAY) -> list[float]:
    """Equal-mass polls plus one closing poll at the end of the window."""
    if budget <= 0:
        return []
    return poll_times(budget - 1, fit, window) + [window.end]


def uniform_poll_hours(budget: int, window: HourInterval = FULL_DAY) -> list[float]:
    """Evenly spaced polls, the last one at the end of the window."""
    return [window.start + k * window.width / budget for k in range(1, budget + 1)]


def next_poll_time(fit: LogGrowthFit, last_count: float, delta: float) -> Optional[float]:
    """Age at which the curve first gains ``delta`` over ``last_count``; None if never."""
    if not delta > 0:
        raise DomainError("delta must be > 0")
    if not fit.a > 0:
        return None
    return time_to_reach(fit, last_count + delta)


def simulate_event_times(truth: SynthSpec, horizon_days: int) -> np.ndarray:
    """Event times in hours since the start, by thinning a homogeneous process.

    Intensity is ``truth.n_events`` events per day shaped by the truth mixture
    over the time of day.
    """
    rng = np.random.default_rng([truth.seed, 1])
    g = truth.gmm_truth
    horizon = 24.0 * horizon_days
    peak = g.w1 / (math.sqrt(2 * math.pi) * g.sigma1) + g.w2 / (math.sqrt(2 * math.pi) * g.sigma2)
    rate_max = truth.n_events * peak
    n = rng.poisson(rate_max * horizon)
    times = np.sort(rng.uniform(0.0, horizon, n))
    intensity = truth.n_events * gmm_density(g, np.mod(times, 24.0))
    keep = rng.uniform(0.0, rate_max, n) < intensity
    return times[keep]


def simulate(truth: SynthSpec, poll_hours: Sequence[float], horizon_days: int,
             policy_name: str = "custom") -> SimResult:
    """Replay daily polls at ``poll_hours`` against simulated ground-truth events.

    A poll captures every event that has happened and is not yet captured.
    Events still pending at the horizon count as missed, with staleness
    measured up to the horizon.
    """
    if horizon_days < 1:
        raise DomainError("horizon_days must be >= 1")
    events = simulate_event_times(truth, horizon_days)
    horizon = 24.0 * horizon_days
    hours = np.sort(np.asarray(poll_hours, dtype=float))
    polls = (np.arange(horizon_days)[:, None] * 24.0 + hours[None, :]).ravel()
    polls = polls[polls <= horizon]
    if events.size == 0:
        return SimResult(0, 0, 0.0, policy_name)
    idx = np.searchsorted(polls, events, side="left")
    captured = idx < polls.size
    if polls.size:
        capture_at = np.where(captured, polls[np.minimum(idx, polls.size - 1)], horizon)
    else:
        capture_at = np.full(events.size, horizon)
    staleness = capture_at - events
    return SimResult(int(captured.sum()), int(events.size),
                     float(staleness.mean()), policy_name)


def policy_poll_hours(truth: SynthSpec, budget: int, policy: str,
                      window: HourInterval = FULL_DAY,
                      fit: Optional[GmmFit] = None) -> list[float]:
    """Daily poll hours for a named policy.

    ``model`` places polls with :func:`model_poll_hours` using ``fit``, or the
    truth mixture itself when no fit is given; ``uniform`` spaces them evenly.
    """
    if policy == "uniform":
        return uniform_poll_hours(budget, window) if budget > 0 else []
    if policy == "model":
        return model_poll_hours(fit if fit is not None else truth.gmm_truth, budget, window)
    raise DomainError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def simulate_policy(truth: SynthSpec, budget: int, horizon_days: int, policy: str,
                    window: HourInterval = FULL_DAY,
                    fit: Optional[GmmFit] = None) -> SimResult:
    return simulate(truth, policy_poll_hours(truth, budget, policy, window, fit),
                    horizon_days, policy)
