"""Kummer's confluent hypergeometric function M(b, c; s) and the profiles phi_beta.

Everything the weights need is expressed through the exponentially scaled
value ``e^{-s} M(b, c; s)``, which stays bounded where M itself overflows.

Evaluation: Taylor series for s <= SERIES_MAX, otherwise the large-s
expansion

    e^{-s} M(b, c; s) ~ Gamma(c)/Gamma(b) s^{b-c} sum_k (c-b)_k (1-b)_k / (k! s^k)

summed up to its smallest term.  The recessive companion of that expansion is
of relative size s^{c-2b} e^{-s} and is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError

SERIES_MAX = 50.0
# log of the largest finite double
_LOG_MAX = math.log(np.finfo(float).max)


def _check_c(c):
    if c <= 0 and float(c).is_integer():
        raise PoleError(f"M(b, c; s) has a pole at c = {c}")


def _is_nonpositive_integer(b) -> bool:
    return b <= 0 and float(b).is_integer()


def kummer_series(b, c, s):
    """Plain Taylor sum of M(b, c; s), vectorised over ``s``.

    Stops once |term| < 1e-16 |partial sum| for three consecutive terms past
    the peak of the terms (or when the series terminates).
    """
    _check_c(c)
    s = np.asarray(s, dtype=float)
    term = np.ones_like(s)
    total = np.ones_like(s)
    quiet = np.zeros(s.shape, dtype=int)
    k = 0
    while True:
        ratio = (b + k) / (c + k) * s / (k + 1)
        term = term * ratio
        total = total + term
        k += 1
        small = (np.abs(term) <= 1e-16 * np.abs(total)) & (np.abs(ratio) < 1)
        quiet = np.where(small, quiet + 1, 0)
        if np.all((quiet >= 3) | (term == 0)):
            break
        if k > 10_000:  # pragma: no cover - unreachable for s <= SERIES_MAX
            raise RuntimeError("Kummer series failed to converge")
    return total


def _asymptotic_scaled(b, c, s):
    """e^{-s} M(b, c; s) for large s (s > SERIES_MAX)."""
    s = np.asarray(s, dtype=float)
    term = np.ones_like(s)
    total = np.ones_like(s)
    active = np.ones(s.shape, dtype=bool)
    k = 0
    while np.any(active) and k < 500:
        nxt = term * (c - b + k) * (1 - b + k) / ((k + 1) * s)
        # optimal truncation: stop before terms start to grow
        grow = np.abs(nxt) >= np.abs(term)
        active &= ~grow
        term = np.where(active, nxt, term)
        total = total + np.where(active, nxt, 0.0)
        active &= np.abs(nxt) > 1e-17 * np.abs(total)
        k += 1
    return total * (math.gamma(c) / math.gamma(b)) * s ** (b - c)


def kummer_scaled(b, c, s):
    """e^{-s} M(b, c; s) for s >= 0; scalar in, scalar out."""
    _check_c(c)
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("Kummer's function is only evaluated for s >= 0")
    if b == c:
        out = np.ones_like(s_arr)
    elif _is_nonpositive_integer(b):
        # terminating series: a polynomial of degree -b
        out = kummer_series(b, c, s_arr) * np.exp(-s_arr)
    else:
        out = np.empty_like(s_arr)
        lo = s_arr <= SERIES_MAX
        if np.any(lo):
            out[lo] = kummer_series(b, c, s_arr[lo]) * np.exp(-s_arr[lo])
        if np.any(~lo):
            out[~lo] = _asymptotic_scaled(b, c, s_arr[~lo])
    return out if out.ndim else float(out)


def kummer_m(b, c, s):
    """M(b, c; s) = sum (b)_k/(c)_k s^k/k!.

    Raises PoleError for non-positive integer c and OverflowError once the
    value leaves the double range (s beyond roughly 700).
    """
    _check_c(c)
    s_arr = np.asarray(s, dtype=float)
    if b == c:
        if np.any(s_arr > _LOG_MAX):
            raise OverflowError(f"M(b, b; s) = e^s overflows for s = {s_arr.max()}")
        out = np.exp(s_arr)
        return out if out.ndim else float(out)
    scaled = np.asarray(kummer_scaled(b, c, s_arr))
    with np.errstate(divide="ignore"):
        log_mag = s_arr + np.log(np.abs(scaled))
    if np.any(log_mag > _LOG_MAX):
        raise OverflowError(f"M({b}, {c}; s) overflows for s up to {s_arr.max()}")
    out = scaled * np.exp(s_arr)
    return out if out.ndim else float(out)


# -- weight profiles ------------------------------------------------------------


def gamma_pair(n, alpha, epsilon):
    """(gamma_tilde, gamma) = (((2-alpha)/(n-alpha) + 2 eps)^-1, (1 - 2 eps) gamma_tilde)."""
    if not 0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2) (got {epsilon})")
    if not 0 <= alpha < min(2, n):
        raise DomainError(f"alpha must lie in [0, min(2, n)) (got {alpha})")
    gamma_tilde = 1.0 / ((2 - alpha) / (n - alpha) + 2 * epsilon)
    return gamma_tilde, (1 - 2 * epsilon) * gamma_tilde


@dataclass(frozen=True)
class PhiParams:
    beta: float
    gamma_tilde: float
    gamma: float
    epsilon: float

    @classmethod
    def for_model(cls, beta, n, alpha, epsilon):
        gt, g = gamma_pair(n, alpha, epsilon)
        return cls(beta, gt, g, epsilon)

    def shifted(self, dbeta: float) -> "PhiParams":
        return PhiParams(self.beta + dbeta, self.gamma_tilde, self.gamma, self.epsilon)


def phi(params: PhiParams, s):
    """phi_beta(s) = e^{-s} M(gamma - beta, gamma; s); identically 1 for beta = 0."""
    return kummer_scaled(params.gamma - params.beta, params.gamma, s)


def _shaped(values, s):
    out = np.asarray(values, dtype=float)
    return out if np.ndim(s) else float(out)


def phi_prime(params: PhiParams, s):
    g, beta = params.gamma, params.beta
    if beta == 0:
        return _shaped(np.zeros_like(np.asarray(s, dtype=float)), s)
    return _shaped(-(beta / g) * np.asarray(kummer_scaled(g - beta, g + 1, s)), s)


def phi_second(params: PhiParams, s):
    g, beta = params.gamma, params.beta
    if beta == 0:
        return _shaped(np.zeros_like(np.asarray(s, dtype=float)), s)
    coef = beta * (beta + 1) / (g * (g + 1))
    return _shaped(coef * np.asarray(kummer_scaled(g - beta, g + 2, s)), s)
