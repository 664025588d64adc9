"""Shared instance builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from volswap.model import (
    Schedule,
    SchwartzParams,
    iid_return_moments,
    return_moments,
)


def make_instance(
    sigma=0.1,
    kappa=0.5,
    n_obs=52,
    mu=0.6,
    s0=2.0,
    horizon=1.0,
    t1=0.0,
    independent_increments=False,
):
    """A model/schedule/moments triple with the reference defaults."""
    params = SchwartzParams(s0=s0, mu=mu, sigma=sigma, kappa=kappa)
    schedule = Schedule(t1=t1, horizon=horizon, n_obs=n_obs)
    rm = return_moments(params, schedule, independent_increments=independent_increments)
    return params, schedule, rm


def constant_instance(eta=5, lambda_bar=0.8, sigma_n=0.05, horizon=1.0):
    """An equal-variance instance with prescribed constant-regime reduction.

    Per-interval means are chosen so sum(mu_bar^2)/sigma_n^2 == lambda_bar.
    """
    mu_bar = np.full(eta, sigma_n * np.sqrt(lambda_bar / eta))
    sigma_bar = np.full(eta, sigma_n)
    return iid_return_moments(mu_bar, sigma_bar, horizon)


def random_iid_instance(rng, n_max=8):
    """A random heterogeneous instance for property tests."""
    n = int(rng.integers(2, n_max + 1))
    sigma_bar = rng.uniform(0.01, 0.1, size=n)
    mu_bar = rng.normal(0.0, 0.02, size=n)
    return iid_return_moments(mu_bar, sigma_bar, horizon=float(rng.uniform(0.5, 2.0)))


@pytest.fixture(scope="session")
def example_instance():
    """The sigma=0.1, kappa=0.5, N=52 reference instance."""
    return make_instance()
