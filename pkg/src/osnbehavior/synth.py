"""Seeded synthetic events and growth series with known ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .gmm import GmmFit
from .records import EventRecord, RetweetObservation

# Synthetic events fall on 28 consecutive days starting on a Monday.
SYNTH_START = datetime(2013, 5, 6, tzinfo=timezone.utc)
SYNTH_SPAN_DAYS = 28


@dataclass(frozen=True)
class SynthSpec:
    gmm_truth: GmmFit
    n_events: int = 1000
    growth_truth: tuple[float, float, float] = (2.0, 1.0, 3.0)
    noise_sd: float = 0.0
    seed: int = 0
    n_users: int = 1
    ages: Optional[tuple[float, ...]] = field(default=None)
    message_id: str = "synth-m1"

    def __post_init__(self):
        if self.n_events < 0:
            raise DomainError("n_events must be >= 0")
        if self.noise_sd < 0:
            raise DomainError("noise_sd must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.n_users < 1:
            raise DomainError("n_users must be >= 1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        g = d["gmm_truth"]
        truth = GmmFit(float(g["w1"]), float(g["mu1"]), float(g["sigma1"]),
                       float(g["w2"]), float(g["mu2"]), float(g["sigma2"]))
        growth = d.get("growth_truth", {"a": 2.0, "c": 1.0, "d": 3.0})
        if isinstance(growth, dict):
            growth = (growth["a"], growth["c"], growth["d"])
        ages = d.get("ages")
        return cls(
            gmm_truth=truth,
            n_events=int(d.get("n_events", 1000)),
            growth_truth=tuple(float(v) for v in growth),
            noise_sd=float(d.get("noise_sd", 0.0)),
            seed=int(d.get("seed", 0)),
            n_users=int(d.get("n_users", 1)),
            ages=None if ages is None else tuple(float(a) for a in ages),
            message_id=str(d.get("message_id", "synth-m1")),
        )

    def to_dict(self) -> dict:
        g = self.gmm_truth
        a, c, dd = self.growth_truth
        out = {
            "gmm_truth": {"w1": g.w1, "mu1": g.mu1, "sigma1": g.sigma1,
                          "w2": g.w2, "mu2": g.mu2, "sigma2": g.sigma2},
            "n_events": self.n_events,
            "growth_truth": {"a": a, "c": c, "d": dd},
            "noise_sd": self.noise_sd,
            "seed": self.seed,
            "n_users": self.n_users,
            "message_id": self.message_id,
        }
        if self.ages is not None:
            out["ages"] = list(self.ages)
        return out


def sample_time_of_day(truth: GmmFit, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n hours from the mixture truncated to [0, 24) by redrawing misses."""
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        comp = rng.random(need) >= truth.w1
        draws = rng.normal(np.where(comp, truth.mu2, truth.mu1),
                           np.where(comp, truth.sigma2, truth.sigma1))
        draws = draws[(draws >= 0) & (draws < 24)]
        out[filled:filled + draws.size] = draws
        filled += draws.size
    return out


def generate_synthetic_events(spec: SynthSpec) -> list[EventRecord]:
    """Events with mixture-distributed times of day, sorted by timestamp."""
    if spec.n_events == 0:
        return []
    rng = spec.rng()
    hours = sample_time_of_day(spec.gmm_truth, spec.n_events, rng)
    days = rng.integers(0, SYNTH_SPAN_DAYS, spec.n_events)
    seconds = np.minimum(np.floor(hours * 3600), 86399).astype(np.int64)
    offsets = days.astype(np.int64) * 86400 + seconds
    order = np.argsort(offsets, kind="stable")
    width = max(6, len(str(spec.n_events)))
    events = []
    for rank, i in enumerate(order):
        events.append(EventRecord(
            user_id=f"u{i % spec.n_users + 1}",
            message_id=f"m{rank:0{width}d}",
            timestamp=SYNTH_START + timedelta(seconds=int(offsets[i])),
        ))
    return events


def default_ages() -> list[float]:
    return [float(h) for h in range(49)]


def generate_synthetic_growth(spec: SynthSpec, ages: Optional[Sequence[float]] = None,
                              rounded: bool = True) -> list[RetweetObservation]:
    """counts = round(max(0, a*ln(age + c) + d + noise)), noise ~ N(0, noise_sd).

    With ``rounded=False`` the clamped real values are kept, which gives an
    exact noiseless curve for recovery tests.
    """
    a, c, d = spec.growth_truth
    if not c > 0:
        raise DomainError(f"growth_truth c must be > 0, got {c}")
    if ages is None:
        ages = spec.ages if spec.ages is not None else default_ages()
    t = np.asarray(ages, dtype=float)
    if np.any(t < 0) or np.any(np.diff(t) < 0):
        raise DomainError("ages must be non-negative and sorted")
    noise = spec.rng().normal(0.0, spec.noise_sd, t.size) if spec.noise_sd > 0 else 0.0
    values = np.maximum(0.0, a * np.log(t + c) + d + noise)
    if rounded:
        counts = [int(v) for v in np.round(values)]
    else:
        counts = [float(v) for v in values]
    return [RetweetObservation(spec.message_id, float(age), n) for age, n in zip(t, counts)]
