"""Fair-strike pricing of volatility and variance swaps.

Two regimes are supported:

* time-varying per-interval volatility — strikes come from fractional
  moments of the realized-variance Laguerre expansion (``*_tv``);
* constant per-interval volatility — realized variance reduces to a single
  scaled noncentral chi-square, giving closed forms (``*_ncchi`` when the
  noncentrality is positive, ``*_central`` when it vanishes), plus analytic
  vegas.

Volatility strikes are quoted in volatility points (x100), variance strikes
in variance points (x100^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import rvdist
from .errors import DomainError, InvalidConfig, PreconditionError, RegimeError
from .model import ReturnMoments, SchwartzParams
from .specfun import gamma_ratio, laguerre_frac

__all__ = [
    "Method",
    "SwapQuote",
    "vol_swap_tv",
    "var_swap_tv",
    "vol_swap_const_c",
    "var_swap_const_c",
    "vol_swap_ncchi",
    "vol_swap_central",
    "var_swap_ncchi",
    "var_swap_central",
    "vega_vol_swap",
    "vega_var_swap",
]


class Method(str, Enum):
    LAGUERRE_SERIES = "laguerre_series"
    CONSTANT_C = "constant_c"
    NCCHI_CLOSED_FORM = "ncchi_closed_form"
    CENTRAL_CLOSED_FORM = "central_closed_form"


@dataclass(frozen=True)
class SwapQuote:
    """A fair strike with provenance: pricing method, series length and
    (when certified) a rigorous truncation-error bound."""

    strike: float
    method: Method
    terms_used: int
    error_bound: Optional[float] = None


def _tv_quote(rm: ReturnMoments, cfg: Optional[rvdist.ExpansionConfig], ell: float) -> SwapQuote:
    if cfg is None:
        cfg = rvdist.ExpansionConfig.defaults(rm)
    p = rm.nu / 2.0
    if not math.isclose(cfg.mu0_bar, p, rel_tol=1e-12):
        raise InvalidConfig(
            f"time-varying swap pricing requires mu0_bar = nu/2 = {p}, got {cfg.mu0_bar}"
        )
    if not cfg.beta_bar > 0.5 * float(np.max(rm.alpha_bar)):
        raise InvalidConfig("requires beta_bar > max(alpha_bar)/2")
    co = rvdist.coeffs(rm, cfg)
    mom = rvdist.raw_moment(rm, cfg, co, ell)
    try:
        bound = rvdist.truncation_bound(rm, cfg, ell, cfg.k_max)
    except PreconditionError:
        bound = None
    return SwapQuote(
        strike=mom.value,
        method=Method.LAGUERRE_SERIES,
        terms_used=mom.terms_used,
        error_bound=bound,
    )


def vol_swap_tv(rm: ReturnMoments, cfg: Optional[rvdist.ExpansionConfig] = None) -> SwapQuote:
    """Volatility-swap fair strike E[sqrt(RV)] via the Laguerre moment series."""
    return _tv_quote(rm, cfg, 0.5)


def var_swap_tv(rm: ReturnMoments, cfg: Optional[rvdist.ExpansionConfig] = None) -> SwapQuote:
    """Variance-swap fair strike E[RV] via the Laguerre moment series."""
    return _tv_quote(rm, cfg, 1.0)


def vol_swap_const_c(c: float, nu: float, T: float) -> SwapQuote:
    """Volatility-swap strike when every interval has common variance c:
    ``sqrt(2 c / T) * Gamma((nu+1)/2)/Gamma(nu/2) * 100``.

    ``c`` enters as a variance (per-interval log-return variance).
    """
    if not (c > 0 and nu > 0 and T > 0):
        raise DomainError("vol_swap_const_c requires c, nu, T > 0")
    strike = math.sqrt(2.0 * c / T) * gamma_ratio((nu + 1.0) / 2.0, nu / 2.0) * 100.0
    return SwapQuote(strike, Method.CONSTANT_C, terms_used=1)


def var_swap_const_c(c: float, nu: float, T: float) -> SwapQuote:
    """Variance-swap strike for common per-interval volatility c:
    ``(2 c^2 / T) * Gamma(nu/2+1)/Gamma(nu/2) * 100^2 = (nu c^2 / T) * 100^2``.

    Note the convention difference from :func:`vol_swap_const_c`, whose ``c``
    is a variance; here ``c`` plays the role of sigma_N and enters squared.
    """
    if not (c > 0 and nu > 0 and T > 0):
        raise DomainError("var_swap_const_c requires c, nu, T > 0")
    strike = (2.0 * c**2 / T) * gamma_ratio(nu / 2.0 + 1.0, nu / 2.0) * 100.0**2
    return SwapQuote(strike, Method.CONSTANT_C, terms_used=1)


def vol_swap_ncchi(eta: float, lambda_bar: float, sigma_N: float, T: float) -> SwapQuote:
    """Constant-regime volatility-swap strike with drift:
    ``sigma_N sqrt(pi/(2T)) L_{1/2}^{(eta/2-1)}(-lambda_bar/2) * 100``.
    """
    if not lambda_bar > 0:
        raise DomainError("vol_swap_ncchi requires lambda_bar > 0 (use vol_swap_central)")
    lag = laguerre_frac(eta / 2.0 - 1.0, 0.5, -lambda_bar / 2.0)
    strike = sigma_N * math.sqrt(math.pi / (2.0 * T)) * lag.value * 100.0
    return SwapQuote(strike, Method.NCCHI_CLOSED_FORM, terms_used=lag.terms_used)


def vol_swap_central(eta: float, sigma_N: float, T: float) -> SwapQuote:
    """Constant-regime, zero-drift volatility-swap strike:
    ``sigma_N sqrt(2/T) Gamma((eta+1)/2)/Gamma(eta/2) * 100``.
    """
    strike = sigma_N * math.sqrt(2.0 / T) * gamma_ratio((eta + 1.0) / 2.0, eta / 2.0) * 100.0
    return SwapQuote(strike, Method.CENTRAL_CLOSED_FORM, terms_used=1)


def var_swap_ncchi(eta: float, lambda_bar: float, sigma_N: float, T: float) -> SwapQuote:
    """Constant-regime variance-swap strike: ``sigma_N^2/T (eta+lambda_bar) 100^2``."""
    strike = sigma_N**2 / T * (eta + lambda_bar) * 100.0**2
    return SwapQuote(strike, Method.NCCHI_CLOSED_FORM, terms_used=1)


def var_swap_central(eta: float, sigma_N: float, T: float) -> SwapQuote:
    """Constant-regime, zero-drift variance-swap strike: ``sigma_N^2/T eta 100^2``."""
    strike = sigma_N**2 / T * eta * 100.0**2
    return SwapQuote(strike, Method.CENTRAL_CLOSED_FORM, terms_used=1)


def _require_constant_regime(rm: ReturnMoments) -> None:
    if not rm.is_constant_regime():
        raise RegimeError(
            "analytic vega requires the constant per-interval volatility regime "
            "(heterogeneous vega is not available)"
        )


def vega_vol_swap(rm: ReturnMoments, params: SchwartzParams) -> float:
    """d(strike)/d(sigma) of the constant-regime volatility swap.

    Uses sigma_N proportional to sigma and lambda_bar proportional to
    1/sigma^2 (interval means held fixed).
    """
    _require_constant_regime(rm)
    sigma, T = params.sigma, rm.horizon
    if rm.lambda_bar > 0:
        k2 = vol_swap_ncchi(rm.eta, rm.lambda_bar, rm.sigma_N, T).strike
        # d/dx L_{1/2}^{(a)}(x) = -L_{-1/2}^{(a+1)}(x), and the argument
        # -lambda_bar/2 moves by +lambda_bar/sigma per unit sigma, so the
        # drift term reduces the vega.
        lag = laguerre_frac(rm.eta / 2.0, -0.5, -rm.lambda_bar / 2.0)
        return (
            k2
            - rm.lambda_bar * rm.sigma_N * math.sqrt(math.pi / (2.0 * T)) * lag.value * 100.0
        ) / sigma
    return vol_swap_central(rm.eta, rm.sigma_N, T).strike / sigma


def vega_var_swap(rm: ReturnMoments, params: SchwartzParams) -> float:
    """d(strike)/d(sigma) of the constant-regime variance swap.

    The noncentrality contribution cancels exactly, leaving
    ``2 sigma_N^2 eta 100^2 / (sigma T)`` for both drift branches.
    """
    _require_constant_regime(rm)
    return 2.0 * rm.sigma_N**2 * rm.eta * 100.0**2 / (params.sigma * rm.horizon)
