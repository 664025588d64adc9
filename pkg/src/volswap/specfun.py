"""Special-function kernel: log-gamma, Pochhammer, hypergeometric series,
and generalized Laguerre functions of integer and fractional order.

Everything here is pure and stateless.  Series evaluations return a
:class:`SeriesResult` recording how many terms were used and how small the
final term was, so callers can propagate convergence diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoConvergence, PoleError

__all__ = [
    "SeriesResult",
    "log_gamma",
    "pochhammer",
    "gauss_2f1_terminating",
    "kummer_1f1",
    "laguerre_int",
    "laguerre_frac",
]

_MAX_TERMS = 10_000


@dataclass(frozen=True)
class SeriesResult:
    """A computed series value with convergence diagnostics."""

    value: float
    terms_used: int
    last_term: float
    converged: bool

    def __float__(self) -> float:
        return self.value


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gamma_ratio(num: float, den: float) -> float:
    """Gamma(num)/Gamma(den) for positive arguments, via log space."""
    return math.exp(log_gamma(num) - log_gamma(den))


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1); (a)_0 = 1.

    Returns an exact 0.0 when ``a`` is a nonpositive integer hit by the
    product.
    """
    if k < 0:
        raise DomainError(f"pochhammer requires k >= 0, got {k}")
    out = 1.0
    for m in range(k):
        f = a + m
        if f == 0.0:
            return 0.0
        out *= f
    return out


def _kahan_add(total: float, comp: float, term: float) -> tuple[float, float]:
    # Compensated (Kahan) accumulation step.
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def gauss_2f1_terminating(k: int, b: float, c: float, z: float) -> float:
    """Terminating Gauss hypergeometric 2F1(-k, b; c; z).

    The first parameter is the negative integer ``-k`` so the series stops
    after ``k+1`` terms; summed with compensated addition.
    """
    if k < 0:
        raise DomainError(f"terminating 2F1 requires k >= 0, got {k}")
    total, comp = 1.0, 0.0
    term = 1.0
    for m in range(k):
        num = (-k + m) * (b + m)
        den = c + m
        if den == 0.0:
            if num == 0.0:
                break  # series terminated before the pole
            raise PoleError(f"2F1 denominator parameter hits a pole at m={m + 1}")
        term *= num / den * z / (m + 1)
        total, comp = _kahan_add(total, comp, term)
    return total


def kummer_1f1(
    a: float, b: float, z: float, rel_tol: float = 1e-12, max_terms: int = _MAX_TERMS
) -> SeriesResult:
    """Confluent hypergeometric 1F1(a; b; z).

    For ``z < 0`` the Kummer transform ``1F1(a;b;z) = e^z 1F1(b-a;b;-z)``
    is applied so the series has positive terms whenever ``b > a`` there,
    avoiding catastrophic cancellation.
    """
    if b <= 0 and b == int(b):
        raise DomainError(f"1F1 undefined for nonpositive integer b = {b}")
    if z < 0:
        inner = kummer_1f1(b - a, b, -z, rel_tol=rel_tol, max_terms=max_terms)
        scale = math.exp(z)
        return SeriesResult(
            value=scale * inner.value,
            terms_used=inner.terms_used,
            last_term=scale * inner.last_term,
            converged=inner.converged,
        )
    total, comp = 1.0, 0.0
    term = 1.0
    for m in range(max_terms):
        term *= (a + m) / (b + m) * z / (m + 1)
        total, comp = _kahan_add(total, comp, term)
        if abs(term) <= rel_tol * abs(total):
            return SeriesResult(total, m + 2, abs(term), True)
        # negative-integer a terminates the series exactly
        if term == 0.0:
            return SeriesResult(total, m + 2, 0.0, True)
    raise NoConvergence(f"1F1({a};{b};{z}) did not converge in {max_terms} terms")


def laguerre_int(a: float, n: int, x: float) -> float:
    """Generalized Laguerre polynomial L_n^{(a)}(x), a > -1, integer n >= 0.

    Uses the stable three-term recurrence in n.
    """
    if n < 0:
        raise DomainError(f"laguerre_int requires n >= 0, got {n}")
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + a - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 1 + a - x) * cur - (m + a) * prev) / (m + 1)
    return cur


def laguerre_frac(a: float, b: float, x: float) -> SeriesResult:
    """Generalized Laguerre function of fractional degree b.

    Evaluated through the confluent representation
    ``L_b^{(a)}(x) = Gamma(a+b+1) / (Gamma(b+1) Gamma(a+1)) 1F1(-b; a+1; x)``,
    which converges for any real x (the direct factorial series does not
    terminate at fractional degree).
    """
    if a <= -1:
        raise DomainError(f"laguerre_frac requires a > -1, got {a}")
    if a + b + 1 <= 0 or b + 1 <= 0:
        raise DomainError(f"laguerre_frac normalization needs a+b+1 > 0 and b+1 > 0")
    front = math.exp(log_gamma(a + b + 1.0) - log_gamma(b + 1.0) - log_gamma(a + 1.0))
    series = kummer_1f1(-b, a + 1.0, x)
    return SeriesResult(
        value=front * series.value,
        terms_used=series.terms_used,
        last_term=front * series.last_term,
        converged=series.converged,
    )
