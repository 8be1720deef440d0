"""Energy functionals of the damped wave equation on a radial grid.

The base energy is

    E[u](t) = 1/2 int (|u_t|^2 + |grad u|^2) + 1/(p+1) int |u|^{p+1}

and the weighted families follow the Psi-based (case i) and Theta-based
(case ii) constructions.  Integrals are trapezoid quadratures against
omega_n r^{n-1} dr summed with ``math.fsum`` in node order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DivergenceWarning, DomainError
from .model import (
    InitialData,
    ModelParams,
    RadialGrid,
    damping_at,
    integrate,
    japanese,
    quadrature_weights,
    radial_gradient,
    sample_initial_data,
)
from .weights import WeightTable, phi_nodes, psi_nodes, theta_eval

FAMILIES = ("theta", "psi")
CSV_COLUMNS = ("t", "E", "aL2", "L2", "E1", "E0", "Estar", "Etilde", "scaled_E", "scaled_aL2")


@dataclass(frozen=True)
class EnergyRecord:
    t: float
    E: float
    aL2: float
    L2: float
    E1: float
    E0: float
    Estar: float
    Etilde: float
    scaled_E: float
    scaled_aL2: float
    # int a |u_t|^2, the instantaneous dissipation rate
    D: float = 0.0
    # Estar - E1/2 - nu/2 int a u^2 W^lambda; the positivity bound asks for >= 0
    estar_slack: float = 0.0

    def as_row(self) -> list[float]:
        d = asdict(self)
        return [d[c] for c in CSV_COLUMNS]


def energy_density(u, v, params: ModelParams, grid: RadialGrid, grad=None):
    """Pointwise 1/2 (v^2 + u_r^2) + |u|^{p+1}/(p+1)."""
    if grad is None:
        grad = radial_gradient(u, grid)
    dens = 0.5 * (v * v + grad * grad)
    if params.nonlinear:
        dens = dens + np.abs(u) ** (params.p + 1) / (params.p + 1)
    return dens


def energy_E(u, v, params: ModelParams, grid: RadialGrid) -> float:
    """E[u] from displacement ``u`` and velocity ``v`` samples."""
    return integrate(energy_density(u, v, params, grid), quadrature_weights(grid, params.n))


def i0_norm(data: InitialData, params: ModelParams, grid: RadialGrid) -> float:
    """Weighted initial-data norm I_0[u0, u1] by trapezoid quadrature."""
    u0, u1 = sample_initial_data(data, grid)
    r = grid.r
    al = params.alpha
    jr = japanese(r)
    g0 = radial_gradient(u0, grid)
    integrand = (
        (u1**2 + g0**2 + np.abs(u0) ** (params.p + 1)) * jr**al + u0**2 * jr ** (-al)
    ) * jr ** (params.lam * (2 - al))
    tail = integrand[-4:] * r[-4:] ** (params.n - 1)
    if tail[-1] > 0 and np.all(np.diff(tail) >= 0):
        warnings.warn(
            f"I_0 integrand is non-decreasing at r_max = {grid.r_max}; the norm probably diverges",
            DivergenceWarning,
            stacklevel=2,
        )
    return integrate(integrand, quadrature_weights(grid, params.n))


class EnergyMonitor:
    """Evaluates every tracked functional for one (params, grid, weight family).

    Weights that do not depend on time are computed once.
    """

    def __init__(
        self,
        params: ModelParams,
        grid: RadialGrid,
        family: str | None = "theta",
        table: WeightTable | None = None,
        t0: float = 10.0,
        nu: float | None = None,
    ):
        if family is not None and family not in FAMILIES:
            raise DomainError(f"unknown energy family {family!r}")
        if family == "psi":
            if table is None:
                raise DomainError("the Psi family needs a weight table")
            if not table.psi_admissible:
                raise DomainError(
                    f"Psi family needs lambda < (1-2 delta) gamma_eps = "
                    f"{(1 - 2 * table.delta) * table.phi_params.gamma:g}"
                )
        if table is not None:
            t0 = table.t0
            nu = table.nu if nu is None else nu
        if nu is None:
            al = params.alpha
            nu = 0.01 * float(np.min(damping_at(params, grid.r))) * min(1.0, t0 ** (-al / (2 - al)))
        self.params = params
        self.grid = grid
        self.family = family
        self.table = table
        self.t0 = t0
        self.nu = nu
        self.w = quadrature_weights(grid, params.n)
        self.a = damping_at(params, grid.r)

    def _sum(self, values) -> float:
        return integrate(values, self.w)

    def family_values(self, u, v, t, dens=None):
        """(E1, E0, Estar, Etilde, slack) for the active family; zeros without one."""
        if self.family is None:
            return 0.0, 0.0, 0.0, 0.0, 0.0
        params = self.params
        if dens is None:
            dens = energy_density(u, v, params, self.grid)
        lam, al = params.lam, params.alpha
        if self.family == "theta":
            W = theta_eval(params, self.t0, self.grid.r, t)
            w0 = W**lam
        else:
            W = psi_nodes(self.table, t)
            w0 = phi_nodes(self.table, t) ** (-1 + 2 * self.table.delta)
        E1 = self._sum(dens * W ** (lam + al / (2 - al)))
        E0 = self._sum((2 * u * v + self.a * u * u) * w0)
        Estar = E1 + self.nu * E0
        Etilde = (self.t0 + t) * self._sum(dens * W**lam)
        slack = Estar - 0.5 * E1 - 0.5 * self.nu * self._sum(self.a * u * u * W**lam)
        return E1, E0, Estar, Etilde, slack

    def record(self, u, v, t) -> EnergyRecord:
        params = self.params
        dens = energy_density(u, v, params, self.grid)
        E = self._sum(dens)
        aL2 = self._sum(self.a * u * u)
        L2 = self._sum(u * u)
        D = self._sum(self.a * v * v)
        E1, E0, Estar, Etilde, slack = self.family_values(u, v, t, dens)
        tau = self.t0 + t
        return EnergyRecord(
            t=t,
            E=E,
            aL2=aL2,
            L2=L2,
            E1=E1,
            E0=E0,
            Estar=Estar,
            Etilde=Etilde,
            scaled_E=tau ** (1 + params.lam) * E,
            scaled_aL2=tau**params.lam * aL2,
            D=D,
            estar_slack=slack,
        )


def energy_family(u, v, t, params: ModelParams, grid: RadialGrid, family: str, table: WeightTable | None = None, t0=10.0, nu=None):
    """(E1, E0, Estar, Etilde) of the Psi or Theta family at time ``t``."""
    mon = EnergyMonitor(params, grid, family, table, t0, nu)
    return mon.family_values(np.asarray(u, dtype=float), np.asarray(v, dtype=float), t)[:4]


def energy_identity_residual(records, t_a: float | None = None, t_b: float | None = None) -> float:
    """|E(t_b) - E(t_a) + int_{t_a}^{t_b} int a u_t^2|, time integral by trapezoid over the records."""
    recs = [r for r in records if (t_a is None or r.t >= t_a) and (t_b is None or r.t <= t_b)]
    if len(recs) < 2:
        return 0.0
    t = np.array([r.t for r in recs])
    D = np.array([r.D for r in recs])
    dissipated = math.fsum((0.5 * (D[1:] + D[:-1]) * np.diff(t)).tolist())
    return abs(recs[-1].E - recs[0].E + dissipated)
