"""Monte Carlo oracle: exact-transition log-price simulation and estimators.

Paths use the exact Gaussian transition of the mean-reverting log price, so
there is no discretization bias: any disagreement with the analytic pricers
is pure sampling noise.  Draws come from counter-based Philox generators
keyed per stream, making runs a pure function of (seed, n_streams) and
bitwise reproducible; the ``VOLSWAP_THREADS`` environment variable caps how
many streams run concurrently.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import Schedule, SchwartzParams

__all__ = [
    "McConfig",
    "McEstimate",
    "simulate_rv",
    "estimate_swap",
    "estimate_call",
    "histogram",
]


@dataclass(frozen=True)
class McConfig:
    n_paths: int
    seed: int
    n_streams: int = 1

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise DomainError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.n_streams < 1:
            raise DomainError(f"n_streams must be >= 1, got {self.n_streams}")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int


def _max_workers(n_streams: int) -> int:
    cap = os.environ.get("VOLSWAP_THREADS")
    if cap is not None:
        try:
            cap_val = int(cap)
        except ValueError as exc:
            raise DomainError(f"VOLSWAP_THREADS must be an integer, got {cap!r}") from exc
        if cap_val >= 1:
            return min(n_streams, cap_val)
    return n_streams


def _stream_rv(
    params: SchwartzParams, schedule: Schedule, n_paths: int, seed: int, stream: int
) -> np.ndarray:
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(stream,)))
    )
    kappa = params.kappa
    dt = schedule.dt
    decay = math.exp(-kappa * dt)
    drift = params.alpha * (1.0 - decay)
    step_sd = math.sqrt(params.sigma**2 / (2.0 * kappa) * -math.expm1(-2.0 * kappa * dt))

    x = np.full(n_paths, params.x0)
    sumsq = np.zeros(n_paths)
    for _ in range(schedule.n_obs - 1):
        x_next = x * decay + drift + step_sd * rng.standard_normal(n_paths)
        sumsq += (x_next - x) ** 2
        x = x_next
    return (100.0**2 / schedule.horizon) * sumsq


def simulate_rv(params: SchwartzParams, schedule: Schedule, mc: McConfig) -> np.ndarray:
    """Sample realized-variance values over n_paths exact-transition paths.

    Paths are partitioned across streams (extra paths go to the earliest
    streams); the concatenation order is fixed, so output is bitwise
    reproducible for a given (seed, n_streams).
    """
    base, extra = divmod(mc.n_paths, mc.n_streams)
    counts = [base + (1 if s < extra else 0) for s in range(mc.n_streams)]
    tasks = [(s, c) for s, c in enumerate(counts) if c > 0]
    if len(tasks) == 1:
        s, c = tasks[0]
        return _stream_rv(params, schedule, c, mc.seed, s)
    with ThreadPoolExecutor(max_workers=_max_workers(len(tasks))) as pool:
        chunks = list(
            pool.map(lambda t: _stream_rv(params, schedule, t[1], mc.seed, t[0]), tasks)
        )
    return np.concatenate(chunks)


def estimate_swap(samples: np.ndarray, rho: float) -> McEstimate:
    """Mean and standard error of RV^rho over the sample set."""
    vals = np.asarray(samples, dtype=float) ** rho
    n = vals.size
    se = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(mean=float(np.mean(vals)), std_error=se, n=n)


def estimate_call(
    samples: np.ndarray, rho: float, strike: float, discount: float = 1.0
) -> McEstimate:
    """Discounted mean and standard error of the payoff (RV^rho - K)^+."""
    payoff = discount * np.maximum(np.asarray(samples, dtype=float) ** rho - strike, 0.0)
    n = payoff.size
    se = float(np.std(payoff, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(mean=float(np.mean(payoff)), std_error=se, n=n)


def histogram(
    samples: np.ndarray, n_bins: int, value_range: tuple[float, float] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Density-normalized histogram (area 1): (densities, bin_edges)."""
    if n_bins < 1:
        raise DomainError(f"n_bins must be >= 1, got {n_bins}")
    dens, edges = np.histogram(samples, bins=n_bins, range=value_range, density=True)
    return dens, edges
