"""Closed-form decay classification and the remainder-integral growth table.

With

    mu1 = 4/(2-alpha) (1/(p-1) - (n-alpha)/4),   mu2 = 2/(p-1),
    p_subc = 1 + 2 alpha/(n-alpha)

the case-II energy bound is (1+t)^{-mu} (log(2+t))^ell with (mu, ell) chosen by
six branches on (lambda, p).  p > p_subc exactly when mu1 < mu2, and the two
coincide at p = p_subc.

Inputs may be ``fractions.Fraction`` (or int); ties are then decided exactly.
Float inputs compare with a relative tolerance of 1e-12.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate as sp_integrate

from .errors import CaseIRangeError, DomainError
from .model import ModelParams, RadialGrid, damping_at, japanese, quadrature_weights, sphere_area

TIE_RTOL = 1e-12


class Region(str, enum.Enum):
    CASE_I = "CaseI_Rate"
    II_BRANCH1 = "II_Branch1"  # (lambda, 0)
    II_BRANCH2 = "II_Branch2"  # (lambda, 1)
    II_BRANCH3 = "II_Branch3"  # (lambda, 2)
    II_BRANCH4 = "II_Branch4"  # (mu1, 0)
    II_BRANCH5 = "II_Branch5"  # (mu2, 1)
    II_BRANCH6 = "II_Branch6"  # (mu2, 0)
    SATURATED = "Saturated"  # ((n-alpha)/(2-alpha) - delta, 0)


def _exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in xs)


def _eq(x, y) -> bool:
    if _exact(x, y):
        return x == y
    x, y = float(x), float(y)
    return abs(x - y) <= TIE_RTOL * max(1.0, abs(x), abs(y))


def _lt(x, y) -> bool:
    return x < y and not _eq(x, y)


def p_subc(n, alpha):
    if not 0 <= alpha < min(2, n):
        raise DomainError(f"alpha must lie in [0, min(2, n)) (got {alpha})")
    return 1 + 2 * alpha / (n - alpha) if _exact(n, alpha) else 1.0 + 2.0 * alpha / (n - alpha)


def p_fujita(d):
    if not d > 0:
        raise DomainError(f"p_F(d) needs d > 0 (got {d})")
    return 1 + Fraction(2) / d if _exact(d) else 1.0 + 2.0 / d


def _rational(x):
    return Fraction(x) if _exact(x) else x


def mu_pair(n, alpha, p):
    """(mu1, mu2); exact when the inputs are rational."""
    n, alpha, p = _rational(n), _rational(alpha), _rational(p)
    q = 1 / (p - 1)
    return 4 / (2 - alpha) * (q - (n - alpha) / 4), 2 * q


def case_i_limit(n, alpha):
    """(n-alpha)/(2-alpha); case I needs lambda strictly below it."""
    n, alpha = _rational(n), _rational(alpha)
    return (n - alpha) / (2 - alpha)


@dataclass(frozen=True)
class DecayPrediction:
    region: Region
    mu: float
    log_power: int
    # exponent of the unweighted L^2 companion bound (same log power)
    l2_mu: float
    # branch exponent before clamping at 0 (mu1 can be negative)
    raw_mu: float
    # rate lost to an arbitrarily small delta (Saturated only)
    delta_loss: bool = False

    def describe(self) -> str:
        rate = f"(1+t)^-{float(self.mu):.12g}"
        if self.delta_loss:
            rate = f"(1+t)^(-{float(self.mu):.12g}+delta)"
        if self.log_power == 1:
            rate += " log(2+t)"
        elif self.log_power == 2:
            rate += " log(2+t)^2"
        return rate


def _prediction(region, mu, log_power, alpha, delta_loss=False) -> DecayPrediction:
    alpha = _rational(alpha)
    raw = mu
    mu = mu if mu > 0 else 0 * mu
    return DecayPrediction(region, mu, log_power, mu - alpha / (2 - alpha), raw, delta_loss)


def _case_ii_branch(n, alpha, p, lam):
    """(region, exponent, log power) straight from the six-branch table."""
    m1, m2 = mu_pair(n, alpha, p)
    ps = p_subc(n, alpha)
    if _eq(p, ps):
        if _lt(lam, m2):
            return Region.II_BRANCH1, lam, 0
        if _eq(lam, m2):
            return Region.II_BRANCH3, lam, 2
        return Region.II_BRANCH5, m2, 1
    m = min(m1, m2)
    if _lt(lam, m):
        return Region.II_BRANCH1, lam, 0
    if _eq(lam, m):
        return Region.II_BRANCH2, lam, 1
    if p > ps:
        return Region.II_BRANCH4, m1, 0
    return Region.II_BRANCH6, m2, 0


def _model_tuple(params):
    if isinstance(params, ModelParams):
        return params.n, params.alpha, params.p, params.lam
    return tuple(params)


def predict_decay(params, case: str = "II") -> DecayPrediction:
    """Decay bound for (1+t)E + int a u^2 under case I or case II hypotheses.

    ``params`` is a ModelParams or an (n, alpha, p, lam) tuple.
    """
    n, alpha, p, lam = _model_tuple(params)
    case = str(case).upper()
    if case == "I":
        limit = case_i_limit(n, alpha)
        if not _lt(lam, limit):
            raise CaseIRangeError(f"case I needs lambda < (n-alpha)/(2-alpha) = {float(limit):g} (got {lam})")
        return _prediction(Region.CASE_I, _rational(lam), 0, alpha)
    if case != "II":
        raise DomainError(f"case must be 'I' or 'II' (got {case!r})")
    region, mu, ell = _case_ii_branch(n, alpha, p, _rational(lam))
    return _prediction(region, mu, ell, alpha)


def _beats(c: DecayPrediction, b: DecayPrediction) -> bool:
    # larger exponent wins; at equal exponent a delta loss is worse than any log power
    if not _eq(c.mu, b.mu):
        return c.mu > b.mu
    return (not c.delta_loss, -c.log_power) > (not b.delta_loss, -b.log_power)


def classify(params) -> DecayPrediction:
    """Best available rate combining both cases, as drawn in the p-lambda phase diagram.

    Case I applies for lambda below (n-alpha)/(2-alpha); above it, data with
    finite I_0 at lambda also has finite I_0 at any smaller weight, so case I
    yields (n-alpha)/(2-alpha) up to an arbitrarily small loss.  Ties go to
    the case-II branch.
    """
    n, alpha, p, lam = _model_tuple(params)
    best = predict_decay((n, alpha, p, lam), "II")
    limit = case_i_limit(n, alpha)
    if _lt(lam, limit):
        cand = predict_decay((n, alpha, p, lam), "I")
    else:
        cand = _prediction(Region.SATURATED, limit, 0, alpha, delta_loss=True)
    if _beats(cand, best):
        best = cand
    return best


REGION_LABELS = {
    Region.II_BRANCH1: "(1+t)^-lambda",
    Region.CASE_I: "(1+t)^-lambda",
    Region.II_BRANCH2: "(1+t)^-lambda log",
    Region.II_BRANCH3: "(1+t)^-lambda log^2",
    Region.II_BRANCH4: "(1+t)^-mu1",
    Region.II_BRANCH5: "(1+t)^-mu2 log",
    Region.II_BRANCH6: "(1+t)^-mu2",
    Region.SATURATED: "(1+t)^-((n-alpha)/(2-alpha))+delta",
}


def region_label(params) -> str:
    return REGION_LABELS[classify(params).region]


# -- remainder integral ---------------------------------------------------------


def badterm_growth(params) -> tuple[float, int]:
    """(exponent, log power) of the growth of int_0^t int a^q Theta^{lambda-q}, q = (p+1)/(p-1)."""
    n, alpha, p, lam = _model_tuple(params)
    region, mu, ell = _case_ii_branch(n, alpha, p, _rational(lam))
    lam = _rational(lam)
    if region is Region.II_BRANCH1:
        return 0 * lam, 0
    if region in (Region.II_BRANCH2,):
        return 0 * lam, 1
    if region is Region.II_BRANCH3:
        return 0 * lam, 2
    if region is Region.II_BRANCH5:
        return lam - mu, 1
    return lam - mu, 0


def badterm_spatial_limit(params):
    """Largest lambda (exclusive) for which the spatial integral is finite: mu1 + 1."""
    n, alpha, p, _ = _model_tuple(params)
    return mu_pair(n, alpha, p)[0] + 1


def _spatial_integral(params: ModelParams, t0, s, grid: RadialGrid | None):
    q = (params.p + 1) / (params.p - 1)
    al = params.alpha
    lam = params.lam
    n = params.n

    def f(r):
        return damping_at(params, r) ** q * (t0 + s + japanese(r) ** (2 - al)) ** (lam - q)

    if grid is not None:
        w = quadrature_weights(grid, n)
        return math.fsum((f(grid.r) * w).tolist())
    kern = lambda r: float(f(r)) * r ** (n - 1)  # noqa: E731
    split = math.sqrt(max((t0 + s) ** (2 / (2 - al)) - 1.0, 0.0)) + params.r_min
    a, _ = sp_integrate.quad(kern, params.r_min, split, limit=200, epsabs=0, epsrel=1e-11)
    b, _ = sp_integrate.quad(kern, split, np.inf, limit=200, epsabs=0, epsrel=1e-11)
    return sphere_area(n) * (a + b)


def badterm_quadrature(params: ModelParams, t0: float, t: float, grid: RadialGrid | None = None) -> float:
    """int_0^t int a^q Theta^{lambda-q} dmu ds.

    Adaptive quadrature on [r_min, inf) by default; trapezoid on ``grid`` when
    one is given.  Returns inf when the spatial integral diverges
    (lambda >= mu1 + 1).
    """
    if grid is None and not _lt(params.lam, badterm_spatial_limit(params)):
        return math.inf
    g = lambda s: _spatial_integral(params, t0, s, grid)  # noqa: E731
    # log-spaced breakpoints keep the adaptive rule accurate over many decades
    edges = [0.0] + [x for x in np.geomspace(1.0, max(t, 1.0), 16).tolist() if x < t] + [t]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total += sp_integrate.quad(g, lo, hi, limit=200, epsabs=0, epsrel=1e-10)[0]
    return total
