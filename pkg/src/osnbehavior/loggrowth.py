"""Logarithmic retweet-growth curve a*ln(t + c) + d and its least-squares fit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InsufficientDataError, NumericalFailure
from .records import RetweetObservation

# Damping beyond this means no descent direction is left at machine precision.
_MAX_DAMPING = 1e16


@dataclass(frozen=True)
class LsConfig:
    max_iterations: int = 200
    cost_tolerance: float = 1e-10
    damping_init: float = 1e-3
    damping_factor: float = 10.0
    c_min: float = 1e-6

    def __post_init__(self):
        for name in ("max_iterations", "cost_tolerance", "damping_init",
                     "damping_factor", "c_min"):
            if not getattr(self, name) > 0:
                raise DomainError(f"LsConfig.{name} must be positive")


@dataclass(frozen=True)
class LogGrowthFit:
    """Cumulative retweets at age t hours: ``a * ln(t + c) + d``."""

    a: float
    c: float
    d: float
    sse: float = 0.0
    iterations: int = 0
    converged: bool = False
    # accepted-step SSE trace; not persisted
    history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"age shift c must be > 0, got {self.c}")
        if not self.sse >= 0:
            raise DomainError(f"sse must be >= 0, got {self.sse}")

    def to_dict(self) -> dict:
        base, k0, k1, k2, k3 = to_paper_params(self)
        return {
            "a": float(self.a), "c": float(self.c), "d": float(self.d), "sse": float(self.sse),
            "iterations": int(self.iterations), "converged": bool(self.converged),
            "paper_params": {"base": base, "k0": k0, "k1": float(k1), "k2": float(k2),
                             "k3": float(k3)},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogGrowthFit":
        return cls(a=float(d["a"]), c=float(d["c"]), d=float(d["d"]),
                   sse=float(d.get("sse", 0.0)), iterations=int(d.get("iterations", 0)),
                   converged=bool(d.get("converged", False)))


def log_growth_value(fit: LogGrowthFit, t):
    """Evaluate the curve at age ``t`` (scalar or array, hours, t >= 0)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise DomainError(f"age must be finite and >= 0, got {t!r}")
    out = fit.a * np.log(t_arr + fit.c) + fit.d
    return float(out) if out.ndim == 0 else out


def to_paper_params(fit: LogGrowthFit) -> tuple[float, float, float, float, float]:
    """Express the fit as (base, k0, k1, k2, k3) of k1*log_base(k0*t + k2) + k3.

    The five-parameter form is redundant: base folds into k1 and k0 into the
    shifts, so the embedding fixes base = e and k0 = 1.
    """
    return (math.e, 1.0, fit.a, fit.c, fit.d)


def five_param_value(params, t):
    base, k0, k1, k2, k3 = params
    t = np.asarray(t, dtype=float)
    out = k1 * np.log(k0 * t + k2) / math.log(base) + k3
    return float(out) if out.ndim == 0 else out


def _arrays(series: Sequence[RetweetObservation]):
    ordered = sorted(series, key=lambda o: (o.age_hours, o.count))
    t = np.array([o.age_hours for o in ordered], dtype=float)
    y = np.array([o.count for o in ordered], dtype=float)
    return t, y


def _residuals_jacobian(a, c, d, t, y):
    shifted = t + c
    if np.any(shifted <= 0):
        raise DomainError("t + c must be positive for every observation")
    log_s = np.log(shifted)
    r = y - (a * log_s + d)
    jac = np.column_stack([-log_s, -a / shifted, -np.ones_like(t)])
    return r, jac


def residuals_and_jacobian(fit: LogGrowthFit, series: Sequence[RetweetObservation]):
    """Residuals count - model and their Jacobian wrt (a, c, d), in input order."""
    if not series:
        raise InsufficientDataError("empty observation series")
    t = np.array([o.age_hours for o in series], dtype=float)
    y = np.array([o.count for o in series], dtype=float)
    return _residuals_jacobian(fit.a, fit.c, fit.d, t, y)


def initial_params(t: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """d from the earliest count, c = 1, a from an OLS slope on ln(age + 1)."""
    u = np.log(t + 1.0)
    du = u - u.mean()
    denom = float(du @ du)
    slope = float(du @ (y - y.mean())) / denom if denom > 0 else 0.0
    return max(slope, 1e-3), 1.0, float(y[np.argmin(t)])


def fit_log_growth(series: Sequence[RetweetObservation], config: LsConfig = LsConfig()
                   ) -> LogGrowthFit:
    """Levenberg-Marquardt fit of a*ln(t + c) + d to one message's counts.

    Each iteration solves (J'J + lam*diag(J'J)) step = -J'r.  A step is kept
    only if it lowers the SSE (then lam shrinks by ``damping_factor``);
    otherwise lam grows and the step is retried.
    """
    if len(series) < 4:
        raise InsufficientDataError(f"need at least 4 observations, got {len(series)}")
    t, y = _arrays(series)
    if np.unique(t).size < 3:
        raise InsufficientDataError("need at least 3 distinct ages")

    p = np.array(initial_params(t, y))
    r, jac = _residuals_jacobian(*p, t, y)
    sse = float(r @ r)
    trace = [sse]
    lam = config.damping_init
    converged = False
    iteration = 0

    while iteration < config.max_iterations and not converged:
        iteration += 1
        if sse == 0.0:
            converged = True
            break
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(jac))):
            raise NumericalFailure("non-finite residuals or Jacobian", iteration)
        jtj = jac.T @ jac
        grad = jac.T @ r
        while True:
            lhs = jtj + lam * np.diag(np.diag(jtj))
            try:
                step = np.linalg.solve(lhs, -grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(lhs, -grad, rcond=None)[0]
            if not np.all(np.isfinite(step)):
                raise NumericalFailure("non-finite step", iteration)
            trial = p + step
            trial[1] = max(trial[1], config.c_min)
            r_new, jac_new = _residuals_jacobian(*trial, t, y)
            sse_new = float(r_new @ r_new)
            if math.isfinite(sse_new) and sse_new < sse:
                rel = (sse - sse_new) / sse
                p, r, jac, sse = trial, r_new, jac_new, sse_new
                trace.append(sse)
                lam /= config.damping_factor
                converged = rel < config.cost_tolerance
                break
            lam *= config.damping_factor
            if lam > _MAX_DAMPING:
                converged = True
                break

    a, c, d = (float(v) for v in p)
    return LogGrowthFit(a, c, d, sse=sse, iterations=iteration, converged=converged,
                        history=tuple(trace))
