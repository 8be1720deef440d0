"""Problem instances, radial grids, initial data and the damping coefficient.

All spatial integrals reduce, under radial symmetry, to one-dimensional
quadratures against ``omega_n * r**(n-1) dr`` where ``omega_n`` is the area of
the unit sphere in R^n (``omega_1 = 2`` counts both half-lines).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from .errors import ProfileUnsupported, ValidationError

DAMPING_PROFILES = ("power", "constant", "none")


@dataclass(frozen=True)
class WholeSpace:
    kind = "whole"


@dataclass(frozen=True)
class ExteriorBall:
    r0: float = 1.0
    kind = "exterior"


Domain = Union[WholeSpace, ExteriorBall]


def japanese(r):
    """<r> = sqrt(1 + r^2)."""
    return np.sqrt(1.0 + np.square(r))


@dataclass(frozen=True)
class ModelParams:
    """One instance of u_tt - Lap u + a(x) u_t + |u|^{p-1} u = 0.

    ``damping='none'`` (a = 0) and ``nonlinear=False`` exist for oracle runs
    (d'Alembert, conservative limit); they are outside the decay theory.
    """

    n: int
    alpha: float
    a0: float
    p: float
    lam: float = 0.0
    a1: float | None = None
    domain: Domain = field(default_factory=WholeSpace)
    damping: str = "power"
    nonlinear: bool = True

    def __post_init__(self):
        if self.a1 is None:
            object.__setattr__(self, "a1", self.a0)
        problems = self.violations()
        if problems:
            raise ValidationError(problems)

    def violations(self) -> list[str]:
        out = []
        n, alpha, p = self.n, self.alpha, self.p
        if not isinstance(n, (int, np.integer)) or n < 1:
            out.append(f"n must be a positive integer (got {n!r})")
            return out
        if not 0 <= alpha < 1:
            out.append(f"alpha must lie in [0, 1) (got {alpha})")
        if not self.a0 > 0:
            out.append(f"a0 must be > 0 (got {self.a0})")
        if not self.a1 >= self.a0:
            out.append(f"a1 must be >= a0 (got a1={self.a1}, a0={self.a0})")
        if not self.lam >= 0:
            out.append(f"lambda must be >= 0 (got {self.lam})")
        if not p > 1:
            out.append(f"condition (p): p must exceed 1 (got {p})")
        elif n >= 3 and p > n / (n - 2):
            out.append(
                f"condition (p): 1 < p <= n/(n-2) = {n / (n - 2):g} for n={n} (got p={p})"
            )
        if self.damping not in DAMPING_PROFILES:
            out.append(f"damping must be one of {DAMPING_PROFILES} (got {self.damping!r})")
        elif self.damping == "constant" and alpha != 0:
            out.append("constant damping forces alpha = 0")
        if isinstance(self.domain, ExteriorBall):
            if n < 2:
                out.append("exterior domains require n >= 2")
            if not self.domain.r0 > 0:
                out.append(f"exterior radius r0 must be > 0 (got {self.domain.r0})")
        return out

    @property
    def r_min(self) -> float:
        return self.domain.r0 if isinstance(self.domain, ExteriorBall) else 0.0


def damping_at(params: ModelParams, r):
    """a(r) for the radial profile; vectorised over ``r``."""
    r = np.asarray(r, dtype=float)
    if params.damping == "none":
        out = np.zeros_like(r)
    elif params.damping == "constant" or params.alpha == 0:
        out = np.full_like(r, float(params.a0))
    else:
        out = params.a0 * (1.0 + r * r) ** (-0.5 * params.alpha)
    return out if out.ndim else float(out)


def sphere_area(n: int) -> float:
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    cells: int

    def __post_init__(self):
        problems = []
        if not self.r_max > self.r_min >= 0:
            problems.append(f"need r_max > r_min >= 0 (got {self.r_min}, {self.r_max})")
        if self.cells < 16:
            problems.append(f"grid needs at least 16 nodes (got {self.cells})")
        if problems:
            raise ValidationError(problems)

    @classmethod
    def for_params(cls, params: ModelParams, r_max: float, cells: int) -> "RadialGrid":
        return cls(params.r_min, r_max, cells)

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.cells - 1)

    @cached_property
    def r(self) -> np.ndarray:
        r = self.r_min + self.h * np.arange(self.cells)
        r.flags.writeable = False
        return r

    @property
    def has_origin(self) -> bool:
        return self.r_min == 0.0


# -- initial data ------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    def __call__(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    support_radius = 0.0


@dataclass(frozen=True)
class CompactBump:
    """amplitude * (1 - ((r - center)/width)^2)^3 on |r - center| < width."""

    center: float
    width: float
    amplitude: float = 1.0

    def __call__(self, r):
        x = (np.asarray(r, dtype=float) - self.center) / self.width
        return self.amplitude * np.clip(1.0 - x * x, 0.0, None) ** 3

    @property
    def support_radius(self) -> float:
        return self.center + self.width


@dataclass(frozen=True)
class PolyDecay:
    q: float
    amplitude: float = 1.0

    def __call__(self, r):
        return self.amplitude * japanese(np.asarray(r, dtype=float)) ** (-self.q)

    support_radius = math.inf


Profile = Union[Zero, CompactBump, PolyDecay]


@dataclass(frozen=True)
class InitialData:
    u0: Profile = field(default_factory=Zero)
    u1: Profile = field(default_factory=Zero)

    @property
    def support_radius(self) -> float:
        return max(self.u0.support_radius, self.u1.support_radius)


def poly_decay_threshold(params: ModelParams, role: str) -> float:
    """Smallest q (exclusive) for which a PolyDecay profile keeps I_0 finite.

    ``role`` is ``'u0'`` or ``'u1'``; the tail of the I_0 integrand behaves like
    r^(-2q + ...) and must be integrable against r^(n-1).
    """
    n, alpha, lam, p = params.n, params.alpha, params.lam, params.p
    growth = lam * (2 - alpha)
    if role == "u1":
        return (n + alpha + growth) / 2
    return max(
        (n + alpha + growth) / 2 - 1,  # |grad u0|^2 <x>^alpha
        (n + alpha + growth) / (p + 1),  # |u0|^{p+1} <x>^alpha
        (n - alpha + growth) / 2,  # |u0|^2 <x>^-alpha
    )


def sample_initial_data(data: InitialData, grid: RadialGrid, params: ModelParams | None = None):
    """Node samples (u0, u1); the exterior Dirichlet trace is forced to 0."""
    if params is not None:
        for role in ("u0", "u1"):
            prof = getattr(data, role)
            if isinstance(prof, PolyDecay):
                q_min = poly_decay_threshold(params, role)
                if prof.q <= q_min:
                    raise ProfileUnsupported(
                        f"{role}: PolyDecay q={prof.q} makes I_0 diverge for lambda={params.lam}"
                        f" (need q > {q_min:g})"
                    )
    u0 = np.array(data.u0(grid.r), dtype=float)
    u1 = np.array(data.u1(grid.r), dtype=float)
    if not grid.has_origin:
        u0[0] = u1[0] = 0.0
    return u0, u1


# -- discrete calculus on the radial grid -------------------------------------


def radial_laplacian(u, grid: RadialGrid, n: int, lo: float | None = None, hi: float | None = None):
    """Central-difference u'' + (n-1)/r u'.

    At r = 0 the regularity limit ``2 n (u_1 - u_0) / h^2`` is used.  ``lo``/``hi``
    are ghost values beyond the first/last node; without them the boundary
    entries are 0 (they sit on Dirichlet nodes in the solver).
    """
    u = np.asarray(u, dtype=float)
    h = grid.h
    r = grid.r
    out = np.zeros_like(u)
    up, um = u[2:], u[:-2]
    out[1:-1] = (up - 2 * u[1:-1] + um) / h**2 + (n - 1) / r[1:-1] * (up - um) / (2 * h)
    if grid.has_origin:
        out[0] = 2 * n * (u[1] - u[0]) / h**2
    elif lo is not None:
        out[0] = (u[1] - 2 * u[0] + lo) / h**2 + (n - 1) / r[0] * (u[1] - lo) / (2 * h)
    if hi is not None:
        out[-1] = (hi - 2 * u[-1] + u[-2]) / h**2 + (n - 1) / r[-1] * (hi - u[-2]) / (2 * h)
    return out


def radial_gradient(u, grid: RadialGrid):
    """du/dr, second order everywhere; exactly 0 at the symmetry node r = 0."""
    g = np.gradient(np.asarray(u, dtype=float), grid.h, edge_order=2)
    if grid.has_origin:
        g[0] = 0.0
    return g


def quadrature_weights(grid: RadialGrid, n: int) -> np.ndarray:
    """Trapezoid weights for the integral of f against omega_n r^(n-1) dr."""
    w = np.full(grid.cells, grid.h)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w * sphere_area(n) * grid.r ** (n - 1)


def integrate(values, weights) -> float:
    """Deterministic compensated sum of ``values * weights`` in node order."""
    return math.fsum((np.asarray(values, dtype=float) * weights).tolist())
