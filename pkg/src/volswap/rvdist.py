"""Distribution of realized variance RV = sum_i alpha_bar_i * Y_i with
Y_i ~ noncentral chi-square(1, delta_bar_i).

The density is expanded in generalized Laguerre polynomials around a
Gamma(nu/2, 2*beta_bar) envelope with a free shape center mu0_bar.  The
expansion coefficients c_k satisfy a linear recurrence driven by power sums
of the weight ratios; raw moments of any positive (possibly fractional)
order reduce to a finite hypergeometric combination of the c_k, and a
rigorous tail bound is available when the contraction factor zeta < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidConfig, NoConvergence, PreconditionError
from .model import ReturnMoments
from .specfun import SeriesResult, gauss_2f1_terminating, laguerre_int, log_gamma

__all__ = [
    "ExpansionConfig",
    "ExpansionCoeffs",
    "coeffs",
    "pdf",
    "raw_moment",
    "coeff_bound",
    "coeffs_hp",
    "raw_moment_hp",
    "truncation_bound",
    "DEFAULT_K_PRICING",
    "DEFAULT_K_PDF",
]

DEFAULT_K_PRICING = 3
DEFAULT_K_PDF = 25

_BOUND_TAIL_CAP = 100_000


@dataclass(frozen=True)
class ExpansionConfig:
    """Laguerre expansion parameters.

    beta_bar is the Gamma-envelope scale, mu0_bar the shape center, k_max the
    truncation order K (the series keeps terms 0..K).
    """

    beta_bar: float
    mu0_bar: float
    k_max: int

    def __post_init__(self) -> None:
        if not self.beta_bar > 0:
            raise InvalidConfig(f"beta_bar must be > 0, got {self.beta_bar}")
        if not self.mu0_bar > 0:
            raise InvalidConfig(f"mu0_bar must be > 0, got {self.mu0_bar}")
        if self.k_max < 0:
            raise InvalidConfig(f"k_max must be >= 0, got {self.k_max}")

    @classmethod
    def defaults(cls, rm: ReturnMoments, k_max: int = DEFAULT_K_PRICING) -> "ExpansionConfig":
        """Default choice: beta_bar = max alpha_bar_i, mu0_bar = nu/2."""
        return cls(
            beta_bar=float(np.max(rm.alpha_bar)),
            mu0_bar=rm.nu / 2.0,
            k_max=k_max,
        )


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Computed expansion coefficients and bound ingredients.

    ``c[k]`` for k = 0..K; ``d[j]`` for j = 1..K (``d[0]`` is unused and 0);
    ``zeta`` is the contraction factor, ``b0_bound`` the leading constant of
    the coefficient bound (may be astronomically large; see coeff_bound).
    """

    c: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    zeta: float
    b0_bound: float


def _ratios(rm: ReturnMoments, cfg: ExpansionConfig) -> tuple[np.ndarray, np.ndarray, float]:
    """Common ingredients: h_i = 1 + r_i (nu/(2 mu0) - 1), xi_i = (1-r_i)/h_i."""
    r = rm.alpha_bar / cfg.beta_bar
    p = rm.nu / 2.0
    h = 1.0 + r * (p / cfg.mu0_bar - 1.0)
    if np.any(h <= 0.0):
        raise InvalidConfig(
            "nonpositive factor 1 + (alpha_bar_i/beta_bar)(nu/(2 mu0_bar) - 1); "
            "increase beta_bar or mu0_bar"
        )
    xi = (1.0 - r) / h
    return r, h, float(np.max(np.abs(xi)))


def coeffs(rm: ReturnMoments, cfg: ExpansionConfig) -> ExpansionCoeffs:
    """Build the expansion coefficients c_0..c_K.

    c_0 has a closed form; for k >= 1 the recurrence
    ``k c_k = sum_{j=1..k} d_j c_{k-j}`` applies, where the d_j are power
    sums of the ratios xi_i weighted by the noncentralities.
    """
    if np.any(rm.alpha_bar <= 0.0):
        raise InvalidConfig("all alpha_bar_i must be > 0 for the expansion")
    p = rm.nu / 2.0
    mu0 = cfg.mu0_bar
    beta = cfg.beta_bar
    K = cfg.k_max
    r, h, zeta = _ratios(rm, cfg)
    xi = (1.0 - r) / h

    # c_0 = (p/mu0)^p prod(h_i)^{-1/2} exp(-s sum_i delta_i alpha_bar_i / h_i),
    # s = (p - mu0)/(2 beta mu0).
    s = (p - mu0) / (2.0 * beta * mu0)
    log_c0 = p * math.log(p / mu0) - 0.5 * float(np.sum(np.log(h)))
    if s != 0.0:
        log_c0 -= s * float(np.sum(rm.delta_bar * rm.alpha_bar / h))
    c = np.zeros(K + 1)
    c[0] = math.exp(log_c0)

    # d_j = 1/2 sum xi^j - (j/2) sum w_i [ (p-mu0) xi^j + mu0 xi^{j-1} ],
    # w_i = delta_i alpha_bar_i / (beta mu0 h_i).
    d = np.zeros(K + 1)
    if mu0 == p and K >= 1:
        # Centered shape (h = 1): the noncentral sums reduce to
        # (j / (2 beta)) U_{j-1}, which spectral instances evaluate as
        # quadratic forms -- no eigenvectors required.
        u = rm.mean_forms(K, beta)
        xi_pow = xi.copy()
        for j in range(1, K + 1):
            d[j] = 0.5 * float(np.sum(xi_pow)) - (j / (2.0 * beta)) * u[j - 1]
            xi_pow = xi_pow * xi
    else:
        w = rm.delta_bar * rm.alpha_bar / (beta * mu0 * h)
        xi_pow = np.ones_like(xi)  # xi^{j-1}
        for j in range(1, K + 1):
            xij = xi_pow * xi
            d[j] = 0.5 * float(np.sum(xij)) - (j / 2.0) * float(
                np.sum(w * ((p - mu0) * xij + mu0 * xi_pow))
            )
            xi_pow = xij

    for k in range(1, K + 1):
        c[k] = float(np.dot(c[:k][::-1], d[1 : k + 1])) / k

    return ExpansionCoeffs(c=c, d=d, zeta=zeta, b0_bound=_b0_bound(rm, cfg, zeta))


def _b0_bound(rm: ReturnMoments, cfg: ExpansionConfig, zeta: float) -> float:
    """Leading constant b0 of the coefficient bound (log-safe evaluation).

    Returns inf when the exponential overflows; the bound stays valid, just
    uninformative.
    """
    if zeta <= 0.0:
        return _b0_envelope(rm, cfg)
    mu0 = cfg.mu0_bar
    log_b0 = math.log(_b0_envelope(rm, cfg)) + mu0 * rm.sum_delta() / (rm.nu * zeta)
    if rm.nu != 2.0 * mu0:
        den = cfg.beta_bar + rm.alpha_bar * (rm.nu - 2.0 * mu0)
        log_b0 -= 0.25 * float(
            np.sum(rm.delta_bar * rm.alpha_bar * (rm.nu - 2.0 * mu0) / den)
        )
    try:
        return math.exp(log_b0)
    except OverflowError:
        return math.inf


def _b0_envelope(rm: ReturnMoments, cfg: ExpansionConfig) -> float:
    p = rm.nu / 2.0
    _, h, _ = _ratios(rm, cfg)
    return math.exp(p * math.log(p / cfg.mu0_bar) - 0.5 * float(np.sum(np.log(h))))


def certified_zeta(rm: ReturnMoments, cfg: ExpansionConfig) -> float:
    """Public precondition check; returns zeta < 1 or raises PreconditionError."""
    return _check_bound_preconditions(rm, cfg)


def _check_bound_preconditions(rm: ReturnMoments, cfg: ExpansionConfig) -> float:
    """Certify zeta < 1; returns zeta or raises PreconditionError."""
    p = rm.nu / 2.0
    if cfg.mu0_bar < p / 2.0:
        raise PreconditionError(
            f"bound requires mu0_bar >= nu/4 = {p / 2.0}, got {cfg.mu0_bar}"
        )
    amax = float(np.max(rm.alpha_bar))
    thresh = 0.5 * (2.0 - p / cfg.mu0_bar) * amax
    if not cfg.beta_bar > thresh:
        raise PreconditionError(
            f"bound requires beta_bar > {thresh} (half of (2 - nu/(2 mu0)) "
            f"times max alpha_bar), got {cfg.beta_bar}"
        )
    _, _, zeta = _ratios(rm, cfg)
    if zeta >= 1.0:
        raise PreconditionError(f"zeta >= 1 (zeta = {zeta}); tail bound not certified")
    return zeta


def pdf(rm: ReturnMoments, cfg: ExpansionConfig, co: ExpansionCoeffs, y):
    """Truncated series density of realized variance at y > 0.

    Accepts a scalar or ndarray.  Truncation can produce tiny negative
    values in extreme tails; they are returned as-is so that quadrature and
    moment identities remain honest (clamp only for display).
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0.0):
        raise DomainError("pdf requires y > 0")
    p = rm.nu / 2.0
    beta = cfg.beta_bar
    x = rm.nu * y_arr / (4.0 * beta * cfg.mu0_bar)

    # sum_k [k!/Gamma(p+k)] c_k L_k^{(p-1)}(x), L by recurrence over k.
    acc = np.zeros_like(y_arr)
    prev = np.ones_like(y_arr)
    cur = p - x  # L_1^{(p-1)}
    a = p - 1.0
    for k in range(co.c.shape[0]):
        if k == 0:
            lag = prev
        elif k == 1:
            lag = cur
        else:
            prev, cur = cur, ((2 * (k - 1) + 1 + a - x) * cur - (k - 1 + a) * prev) / k
            lag = cur
        weight = math.exp(log_gamma(k + 1.0) - log_gamma(p + k))
        acc = acc + weight * co.c[k] * lag

    log_env = -y_arr / (2.0 * beta) + (p - 1.0) * np.log(y_arr) - p * math.log(2.0 * beta)
    out = np.exp(log_env) * acc
    return out if out.ndim else float(out)


def raw_moment(
    rm: ReturnMoments,
    cfg: ExpansionConfig,
    co: ExpansionCoeffs,
    ell: float,
    rel_tol: float = 1e-8,
) -> SeriesResult:
    """Raw moment E[RV^ell] for any ell > 0 from the truncated expansion.

    The k-th term is
    ``(2 beta)^ell Gamma(p+ell)/Gamma(p) c_k 2F1(-k, p+ell; p; p/mu0)``
    with p = nu/2; the hypergeometric factor terminates after k+1 terms.
    """
    if not ell > 0:
        raise DomainError(f"raw_moment requires ell > 0, got {ell}")
    p = rm.nu / 2.0
    front = math.exp(
        ell * math.log(2.0 * cfg.beta_bar) + log_gamma(p + ell) - log_gamma(p)
    )
    z = p / cfg.mu0_bar
    total = 0.0
    last = 0.0
    # At z = 1 the hypergeometric factor collapses to (-ell)_k / (p)_k
    # (Chu-Vandermonde); the direct finite sum would cancel catastrophically
    # for large k, so use the closed form via an O(1) ratio recurrence.
    at_unit = z == 1.0
    hyp = 1.0
    for k in range(cfg.k_max + 1):
        if at_unit:
            if k > 0:
                hyp *= (k - 1.0 - ell) / (p + k - 1.0)
            factor = hyp
        else:
            factor = gauss_2f1_terminating(k, p + ell, p, z)
        last = front * co.c[k] * factor
        total += last

    converged = abs(last) <= rel_tol * abs(total)
    if not converged:
        # Without a certified tail bound an inconclusive last term is an error.
        try:
            _check_bound_preconditions(rm, cfg)
        except PreconditionError as exc:
            raise NoConvergence(
                f"raw_moment(ell={ell}): last term {last:.3e} above tolerance and "
                f"no certified tail bound available ({exc})"
            ) from exc
    return SeriesResult(
        value=total, terms_used=cfg.k_max + 1, last_term=abs(last), converged=converged
    )


def coeff_bound(rm: ReturnMoments, cfg: ExpansionConfig, k: int) -> float:
    """Rigorous bound on |c_k|:
    ``zeta^k ((2k+nu)/(2k))^k ((2k+nu)/nu)^{nu/2} b0`` (k = 0 factor -> 1).
    """
    if k < 0:
        raise DomainError(f"coeff_bound requires k >= 0, got {k}")
    zeta = _check_bound_preconditions(rm, cfg)
    b0 = _b0_bound(rm, cfg, zeta)
    if k == 0:
        return b0
    nu = rm.nu
    log_fac = k * math.log((2.0 * k + nu) / (2.0 * k)) + (nu / 2.0) * math.log(
        (2.0 * k + nu) / nu
    )
    if zeta == 0.0:
        return 0.0
    return b0 * math.exp(k * math.log(zeta) + log_fac)


def _abs_2f1_tail(p: float, ell: float, z: float, k: int) -> float:
    """|2F1(-k, 1-k-p; 1-k-p-ell; z)| appearing in the tail-bound summand.

    At z = 1 (the default shape center mu0_bar = nu/2) the terminating sum
    collapses by the Chu-Vandermonde identity to |(-ell)_k| Gamma(p+ell) /
    Gamma(k+p+ell), evaluated in log space; elsewhere the series is summed
    directly.
    """
    if z == 1.0:
        if ell == int(ell):
            if k > ell:
                return 0.0
            log_poch = sum(math.log(abs(m - ell)) for m in range(k))
        elif k > ell:
            # |(-ell)_k| = |Gamma(k-ell)/Gamma(-ell)|; lgamma gives ln|Gamma|.
            log_poch = math.lgamma(k - ell) - math.lgamma(-ell)
        else:
            log_poch = sum(math.log(abs(m - ell)) for m in range(k))
        return math.exp(log_poch + log_gamma(p + ell) - log_gamma(k + p + ell))
    return abs(gauss_2f1_terminating(k, 1.0 - k - p, 1.0 - k - p - ell, z))


def _p_k(nu: float, mu0: float, zeta: float, ell: float, k: int) -> float:
    """Tail-bound summand p_k (k >= 1)."""
    p = nu / 2.0
    f21 = _abs_2f1_tail(p, ell, 2.0 * mu0 / nu, k)
    if f21 == 0.0:
        return 0.0
    log_term = (
        k * math.log(nu / (2.0 * mu0))
        + log_gamma(ell + k + p)
        - log_gamma(k + p)
        + k * math.log((2.0 * k + nu) / (2.0 * k))
        + p * math.log((2.0 * k + nu) / nu)
        + k * math.log(zeta)
    )
    return f21 * math.exp(log_term)


def coeffs_hp(rm: ReturnMoments, cfg: ExpansionConfig, k_max: int, dps: int) -> list:
    """Expansion coefficients c_0..c_{k_max} in arbitrary-precision arithmetic.

    The option pricer's coefficient sums cancel across tens of orders of
    magnitude, so its moment inputs must carry far more than double
    precision end to end; this mirrors :func:`coeffs` with mpmath reals at
    ``dps`` decimal digits.
    """
    import mpmath as mpm

    if np.any(rm.alpha_bar <= 0.0):
        raise InvalidConfig("all alpha_bar_i must be > 0 for the expansion")
    if k_max < 0:
        raise DomainError(f"k_max must be >= 0, got {k_max}")
    with mpm.workdps(dps):
        p = mpm.mpf(rm.nu) / 2
        mu0 = mpm.mpf(cfg.mu0_bar)
        beta = mpm.mpf(cfg.beta_bar)
        shape = p / mu0 - 1
        r = [mpm.mpf(a) / beta for a in rm.alpha_bar]
        h = [1 + ri * shape for ri in r]
        if any(hi <= 0 for hi in h):
            raise InvalidConfig(
                "nonpositive factor 1 + (alpha_bar_i/beta_bar)(nu/(2 mu0_bar) - 1); "
                "increase beta_bar or mu0_bar"
            )
        xi = [(1 - ri) / hi for ri, hi in zip(r, h)]
        da = [mpm.mpf(d) * mpm.mpf(a) for d, a in zip(rm.delta_bar, rm.alpha_bar)]
        s = (p - mu0) / (2 * beta * mu0)
        log_c0 = (
            p * mpm.log(p / mu0)
            - mpm.fsum(mpm.log(hi) for hi in h) / 2
            - s * mpm.fsum(x / hi for x, hi in zip(da, h))
        )
        c = [mpm.exp(log_c0)]
        w = [x / (beta * mu0 * hi) for x, hi in zip(da, h)]
        d = [mpm.mpf(0)] * (k_max + 1)
        xi_pow = [mpm.mpf(1)] * len(xi)
        for j in range(1, k_max + 1):
            xij = [xp * x for xp, x in zip(xi_pow, xi)]
            d[j] = mpm.fsum(xij) / 2 - mpm.mpf(j) / 2 * mpm.fsum(
                wi * ((p - mu0) * cur + mu0 * prev)
                for wi, cur, prev in zip(w, xij, xi_pow)
            )
            xi_pow = xij
        for k in range(1, k_max + 1):
            c.append(mpm.fsum(c[k - j] * d[j] for j in range(1, k + 1)) / k)
    return c


def raw_moment_hp(
    rm: ReturnMoments, cfg: ExpansionConfig, c_hp: list, ell: float, dps: int
):
    """Raw moment E[RV^ell] using the arbitrary-precision coefficients.

    Returns ``(value, converged)`` where ``converged`` reports whether the
    series stagnated (three consecutive negligible terms at working
    precision) before the supplied coefficients ran out; callers can extend
    the coefficient list and retry when it did not.

    At the default shape center (mu0_bar = nu/2) the hypergeometric factor
    reduces to the ratio (-ell)_k/(p)_k, so each extra order costs O(1);
    otherwise the terminating series is summed.  For integer ell the series
    is exact once k reaches ell; for fractional ell the terms decay like
    k^{-(p+ell)} on top of the coefficient decay.
    """
    import mpmath as mpm

    if not ell > 0:
        raise DomainError(f"raw_moment_hp requires ell > 0, got {ell}")
    with mpm.workdps(dps):
        p = mpm.mpf(rm.nu) / 2
        le = mpm.mpf(ell)
        front = (2 * mpm.mpf(cfg.beta_bar)) ** le * mpm.gamma(p + le) / mpm.gamma(p)
        z = p / mpm.mpf(cfg.mu0_bar)
        at_one = z == 1
        total = mpm.mpf(0)
        hyp = mpm.mpf(1)
        tiny_streak = 0
        eps = mpm.mpf(10) ** (-(dps - 5))
        converged = False
        for k, ck in enumerate(c_hp):
            if at_one:
                if k > 0:
                    hyp *= (k - 1 - le) / (p + k - 1)
                f = hyp
            else:
                term = mpm.mpf(1)
                f = mpm.mpf(1)
                for m in range(k):
                    term *= mpm.mpf(-k + m) * (p + le + m) / (p + m) * z / (m + 1)
                    f += term
            contrib = ck * f
            total += contrib
            if total != 0 and abs(contrib) <= eps * abs(total):
                tiny_streak += 1
                if tiny_streak >= 3:
                    converged = True
                    break
            else:
                tiny_streak = 0
        return front * total, converged


def truncation_bound(rm: ReturnMoments, cfg: ExpansionConfig, ell: float, K: int) -> float:
    """Rigorous bound on the tail |sum_{k>K} term_k| of the moment series.

    ``B = (2 beta)^ell b0 sum_{k>K} p_k``; requires a certified zeta < 1.
    The tail is summed until the running term falls below 1e-16 of the
    accumulated sum (hard cap 1e5 terms).
    """
    if K < 0:
        raise DomainError(f"truncation_bound requires K >= 0, got {K}")
    zeta = _check_bound_preconditions(rm, cfg)
    if zeta == 0.0:
        return 0.0
    b0 = _b0_bound(rm, cfg, zeta)
    tail = 0.0
    for k in range(K + 1, _BOUND_TAIL_CAP + 1):
        term = _p_k(rm.nu, cfg.mu0_bar, zeta, ell, k)
        tail += term
        # Integer ell truncates the tail exactly (all later summands vanish).
        if term == 0.0 or term < 1e-16 * tail:
            break
    else:
        raise NoConvergence("truncation_bound tail sum hit the term cap")
    return math.exp(ell * math.log(2.0 * cfg.beta_bar)) * b0 * tail
