"""Two-component Gaussian mixture over time of day, fit by EM."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DegenerateDataError, DomainError

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)
MIN_SAMPLES = 10


@dataclass(frozen=True)
class EmConfig:
    max_iterations: int = 500
    tolerance: float = 1e-8
    sigma_floor: float = 0.05

    def __post_init__(self):
        if self.max_iterations <= 0 or self.tolerance <= 0 or self.sigma_floor <= 0:
            raise DomainError("EmConfig values must all be positive")


@dataclass(frozen=True)
class GmmFit:
    w1: float
    mu1: float
    sigma1: float
    w2: float
    mu2: float
    sigma2: float
    n_events: int = 0
    log_likelihood: float = 0.0
    iterations: int = 0
    converged: bool = False
    # per-iteration log-likelihood trace; not persisted
    history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not (0 < self.w1 < 1 and 0 < self.w2 < 1) or abs(self.w1 + self.w2 - 1) > 1e-12:
            raise DomainError(f"invalid mixture weights ({self.w1}, {self.w2})")
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise DomainError(f"invalid stddevs ({self.sigma1}, {self.sigma2})")

    @classmethod
    def from_components(cls, weights, means, sigmas, **kw) -> "GmmFit":
        w1 = float(weights[0]) / (float(weights[0]) + float(weights[1]))
        return cls(w1, float(means[0]), float(sigmas[0]), 1.0 - w1,
                   float(means[1]), float(sigmas[1]), **kw)

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.w1, self.w2])

    @property
    def means(self) -> np.ndarray:
        return np.array([self.mu1, self.mu2])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([self.sigma1, self.sigma2])

    def swapped(self) -> "GmmFit":
        return replace(self, w1=self.w2, mu1=self.mu2, sigma1=self.sigma2,
                       w2=self.w1, mu2=self.mu1, sigma2=self.sigma1)

    def sorted(self) -> "GmmFit":
        return self.swapped() if self.mu1 > self.mu2 else self

    def to_dict(self) -> dict:
        return {
            "w1": float(self.w1), "mu1": float(self.mu1), "sigma1": float(self.sigma1),
            "w2": float(self.w2), "mu2": float(self.mu2), "sigma2": float(self.sigma2),
            "n_events": int(self.n_events), "log_likelihood": float(self.log_likelihood),
            "iterations": int(self.iterations), "converged": bool(self.converged),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GmmFit":
        return cls(
            w1=float(d["w1"]), mu1=float(d["mu1"]), sigma1=float(d["sigma1"]),
            w2=float(d["w2"]), mu2=float(d["mu2"]), sigma2=float(d["sigma2"]),
            n_events=int(d.get("n_events", 0)),
            log_likelihood=float(d.get("log_likelihood", 0.0)),
            iterations=int(d.get("iterations", 0)),
            converged=bool(d.get("converged", False)),
        )


def _component_log_pdf(fit: GmmFit, x: np.ndarray) -> np.ndarray:
    """log(w_k * N(x; mu_k, sigma_k)) with shape (n, 2)."""
    x = np.asarray(x, dtype=float)[..., None]
    z = (x - fit.means) / fit.sigmas
    return np.log(fit.weights) - np.log(fit.sigmas) - _LOG_SQRT_2PI - 0.5 * z * z


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    m = a.max(axis=-1, keepdims=True)
    return (m + np.log(np.exp(a - m).sum(axis=-1, keepdims=True)))[..., 0]


def gmm_density(fit: GmmFit, x):
    """Mixture density w1*N(x; mu1, sigma1) + w2*N(x; mu2, sigma2).

    Accepts a scalar or an array of hours; returns the same shape.
    """
    out = np.exp(_logsumexp_rows(_component_log_pdf(fit, x)))
    return float(out) if np.ndim(x) == 0 else out


def log_likelihood(fit: GmmFit, samples) -> float:
    return float(_logsumexp_rows(_component_log_pdf(fit, np.asarray(samples, float))).sum())


def responsibilities(fit: GmmFit, samples) -> np.ndarray:
    """Posterior component probabilities, shape (n, 2); rows sum to one."""
    lp = _component_log_pdf(fit, np.asarray(samples, float))
    return np.exp(lp - _logsumexp_rows(lp)[:, None])


def _check_samples(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise DegenerateDataError("samples contain non-finite values")
    if np.unique(x).size < 2:
        raise DegenerateDataError("need at least 2 distinct sample values")
    return x


def _em_step(fit: GmmFit, x: np.ndarray, sigma_floor: float):
    lp = _component_log_pdf(fit, x)
    row_lse = _logsumexp_rows(lp)
    resp = np.exp(lp - row_lse[:, None])
    nk = resp.sum(axis=0)
    # a component with no support at all keeps its location and gets a vanishing weight
    alive = nk > 0
    safe_nk = np.where(alive, nk, 1.0)
    means = np.where(alive, (resp * x[:, None]).sum(axis=0) / safe_nk, fit.means)
    var = (resp * (x[:, None] - means) ** 2).sum(axis=0) / safe_nk
    sigmas = np.where(alive, np.maximum(np.sqrt(var), sigma_floor), fit.sigmas)
    eps = np.finfo(float).eps
    w1 = float(np.clip(nk[0] / x.size, eps, 1 - eps))
    new = replace(fit, w1=w1, w2=1.0 - w1, mu1=float(means[0]), mu2=float(means[1]),
                  sigma1=float(sigmas[0]), sigma2=float(sigmas[1]))
    return new, float(row_lse.sum())


def em_step(fit: GmmFit, samples: Sequence[float],
            sigma_floor: float = EmConfig.sigma_floor) -> tuple[GmmFit, float]:
    """One E-step and M-step.

    Returns the updated parameters and the log-likelihood of the *input*
    parameters on ``samples``.
    """
    return _em_step(fit, _check_samples(samples), sigma_floor)


def initial_fit(samples, config: EmConfig = EmConfig()) -> GmmFit:
    """Quartile means, half the sample stddev for both widths, equal weights."""
    x = _check_samples(samples)
    q1, q3 = np.percentile(x, [25, 75])
    sigma = max(float(x.std()) / 2, config.sigma_floor)
    return GmmFit(0.5, float(q1), sigma, 0.5, float(q3), sigma, n_events=int(x.size))


def em_iterations(samples, init: GmmFit, config: EmConfig = EmConfig()
                  ) -> Iterator[tuple[GmmFit, float]]:
    """Yield (params after step, log-likelihood before step) for every EM step."""
    x = _check_samples(samples)
    fit = init
    for _ in range(config.max_iterations):
        fit, ll = _em_step(fit, x, config.sigma_floor)
        yield fit, ll


def fit_gmm(samples: Sequence[float], config: EmConfig = EmConfig(),
            init: Optional[GmmFit] = None) -> GmmFit:
    """Fit the two-component mixture to time-of-day samples.

    Iterates until the mean log-likelihood per sample changes by less than
    ``config.tolerance`` or ``config.max_iterations`` steps have run.  The
    result is relabeled so that ``mu1 <= mu2``.
    """
    x = _check_samples(samples)
    if x.size < MIN_SAMPLES:
        raise DegenerateDataError(f"need at least {MIN_SAMPLES} samples, got {x.size}")
    fit = init if init is not None else initial_fit(x, config)
    trace: list[float] = []
    converged = False
    iterations = 0
    for fit, ll in em_iterations(x, fit, config):
        iterations += 1
        trace.append(ll)
        if len(trace) > 1 and abs(trace[-1] - trace[-2]) / x.size < config.tolerance:
            converged = True
            break
    final_ll = log_likelihood(fit, x)
    trace.append(final_ll)
    fit = replace(fit, n_events=int(x.size), log_likelihood=final_ll,
                  iterations=iterations, converged=converged, history=tuple(trace))
    return fit.sorted()
