"""Weight functions for the weighted energy method.

``build_A_eps`` constructs an approximate solution A of Lap A = a(x) with the
three node-wise properties

    (A1)  (1 - eps) a <= Lap A <= (1 + eps) a
    (A2)  c <r>^{2-alpha} <= A <= C <r>^{2-alpha}
    (A3)  |A'|^2 / (a A) <= (2 - alpha)/(n - alpha) + eps

as A = A0 + K <r>^{2-alpha} + w with K = a0/((n-alpha)(2-alpha)) and w the
radial solution of Lap w = eta * b2, where b2 = a - Lap(K <r>^{2-alpha}) and
eta is a smooth cut-off equal to 1 on [0, R_eps].  Around these sit Psi, Theta
and Phi_beta = (t0+t)^{-beta} phi_beta(gamma_tilde A / (t0+t)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionFailure, DomainError, SupportError
from .kummer import PhiParams, phi, phi_prime, phi_second
from .model import (
    ModelParams,
    RadialGrid,
    damping_at,
    integrate,
    japanese,
    quadrature_weights,
    radial_gradient,
    radial_laplacian,
)

A0_CAP = 2.0**40
_PANELS = 512
_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _gauss(g, a, b):
    """12-point Gauss-Legendre integral of g over [a_i, b_i], vectorised over i."""
    a = np.asarray(a, dtype=float)[:, None]
    b = np.asarray(b, dtype=float)[:, None]
    s = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
    return (0.5 * (b - a) * (g(s) * _GL_W)).sum(axis=1)


def smooth_cutoff(r, radius):
    """C-infinity radial cut-off: 1 on [0, radius], 0 on [2 radius, inf)."""
    r = np.asarray(r, dtype=float)
    if radius <= 0:
        return np.zeros_like(r)
    x = np.clip(r / radius - 1.0, 0.0, 1.0)

    def bump(y):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)

    return bump(1.0 - x) / (bump(1.0 - x) + bump(x))


@dataclass(frozen=True, eq=False)
class APotential:
    """Closed-form-plus-quadrature evaluator of A_eps at arbitrary radii."""

    params: ModelParams
    epsilon: float
    R_eps: float
    A0: float
    Q_total: float = field(default=0.0)

    @property
    def K(self) -> float:
        n, al = self.params.n, self.params.alpha
        return self.params.a0 / ((n - al) * (2 - al))

    def b1(self, r):
        n, al, a0 = self.params.n, self.params.alpha, self.params.a0
        jr = japanese(r)
        return a0 * jr**-al + a0 * al / (n - al) * jr ** (-al - 2)

    def b2(self, r):
        return damping_at(self.params, r) - self.b1(r)

    def source(self, r):
        """eta_eps * b2, compactly supported in [0, 2 R_eps]."""
        return smooth_cutoff(r, self.R_eps) * self.b2(r)

    def _integral(self, g, lo, r):
        """int_lo^r g(s) ds for each r (vectorised composite Gauss-Legendre).

        The integration range is [lo, 2 R_eps]; r is clipped to it.
        """
        R2 = 2 * self.R_eps
        r = np.clip(np.atleast_1d(np.asarray(r, dtype=float)), lo, R2)
        width = (R2 - lo) / _PANELS
        edges = lo + width * np.arange(_PANELS + 1)
        panel_vals = _gauss(g, edges[:-1], edges[1:])
        cum = np.concatenate([[0.0], np.cumsum(panel_vals)])
        k = np.minimum(((r - lo) // width).astype(int), _PANELS - 1)
        return cum[k] + _gauss(g, edges[k], r)

    def charge(self, r):
        """Q(r) = int_0^r s^{n-1} eta b2 ds."""
        n = self.params.n
        return self._integral(lambda s: s ** (n - 1) * self.source(s), 0.0, r)

    def correction(self, r):
        """w(r) with Lap w = eta b2: decaying for n >= 3, w(0) = 0 for n <= 2."""
        n = self.params.n
        R2 = 2 * self.R_eps
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.R_eps <= 0:
            return np.zeros_like(r)
        rc = np.minimum(r, R2)
        Q = self.charge(rc)
        first_moment = lambda s: s * self.source(s)  # noqa: E731
        # integration by parts turns the nested integral into single ones
        if n >= 3:
            tail = self._integral(first_moment, 0.0, R2)[0] - self._integral(first_moment, 0.0, rc)
            with np.errstate(divide="ignore", invalid="ignore"):
                g = np.where(rc > 0, np.where(rc > 0, rc, 1.0) ** (2.0 - n) / (2 - n), 0.0)
            out = Q * g + tail / (2 - n)
            far = r >= R2
            out[far] = -self.Q_total * r[far] ** (2.0 - n) / (n - 2)
            return out
        if n == 1:
            out = rc * Q - self._integral(first_moment, 0.0, rc)
            return out + self.Q_total * np.maximum(r - R2, 0.0)
        logs = np.log(np.where(rc > 0, rc, 1.0))
        out = Q * logs - self._integral(lambda s: np.log(np.where(s > 0, s, 1.0)) * first_moment(s), 0.0, rc)
        return out + self.Q_total * np.log(np.maximum(r, R2) / R2)

    def correction_grad(self, r):
        n = self.params.n
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.R_eps <= 0:
            return np.zeros_like(r)
        Q = self.charge(r)
        return np.where(r > 0, Q * np.where(r > 0, r, 1.0) ** (1.0 - n), 0.0)

    def smooth_part(self, r):
        return self.K * japanese(r) ** (2 - self.params.alpha)

    def smooth_grad(self, r):
        al = self.params.alpha
        return self.K * (2 - al) * np.asarray(r) * japanese(r) ** (-al)

    def value(self, r, correction=None):
        w = self.correction(r) if correction is None else correction
        return self.A0 + self.smooth_part(r) + w

    def laplacian_exact(self, r):
        """b1 + eta b2, the Laplacian of A by construction."""
        return self.b1(r) + self.source(r)


def _find_R_eps(params: ModelParams, grid: RadialGrid, epsilon: float) -> float:
    probe = APotential(params, epsilon, 0.0, 1.0)
    dense = np.linspace(0.0, grid.r_max, 20 * grid.cells + 1)
    bad = np.abs(probe.b2(dense)) > epsilon * damping_at(params, dense)
    if not np.any(bad):
        return 0.0
    last_bad = dense[np.nonzero(bad)[0][-1]]
    nodes = grid.r[grid.r > last_bad]
    if nodes.size == 0 or 2 * nodes[0] > grid.r_max:
        raise ConstructionFailure(
            f"|b2| <= eps a first holds beyond r = {last_bad:g}; the grid (r_max={grid.r_max}) is too short"
        )
    return float(nodes[0])


@dataclass(frozen=True, eq=False)
class AField:
    potential: APotential
    A0: float
    A_vals: np.ndarray
    A_grad: np.ndarray
    A_lap: np.ndarray
    A_ghost: tuple  # A at r_min - h (or None at the origin) and r_max + h

    @property
    def R_eps(self) -> float:
        return self.potential.R_eps


def build_A_eps(params: ModelParams, grid: RadialGrid, epsilon: float) -> AField:
    """Construct A_eps on ``grid``; A0 starts at 1 and doubles until (A3) holds."""
    if params.damping == "none":
        raise DomainError("A_eps needs a positive damping coefficient")
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1) (got {epsilon})")
    n, al = params.n, params.alpha
    if not al < min(2, n):
        raise DomainError("need alpha < min(2, n)")

    R_eps = _find_R_eps(params, grid, epsilon)
    pot = APotential(params, epsilon, R_eps, 1.0)
    if R_eps > 0:
        pot = APotential(params, epsilon, R_eps, 1.0, float(pot.charge(2 * R_eps)[0]))

    r = grid.r
    h = grid.h
    lo = None if grid.has_origin or r[0] - h < 0 else r[0] - h
    ghost_r = np.array([x for x in (lo, r[-1] + h) if x is not None])
    w_nodes = pot.correction(r)
    w_ghost = pot.correction(ghost_r)
    grad = pot.smooth_grad(r) + pot.correction_grad(r)
    a = damping_at(params, r)
    bound = (2 - al) / (n - al) + epsilon

    A0 = 1.0
    while True:
        vals = A0 + pot.smooth_part(r) + w_nodes
        if np.all(vals > 0) and np.all(grad**2 / (a * vals) <= bound):
            break
        A0 *= 2.0
        if A0 > A0_CAP:
            raise ConstructionFailure("(A3) still fails with A0 = 2^40; refine the grid or raise epsilon")

    pot = APotential(params, epsilon, R_eps, A0, pot.Q_total)
    ghost_vals = A0 + pot.smooth_part(ghost_r) + w_ghost
    g_lo = ghost_vals[0] if lo is not None else None
    g_hi = ghost_vals[-1]
    lap = radial_laplacian(vals, grid, n, lo=g_lo, hi=g_hi)
    if not grid.has_origin and lo is None:
        lap[0] = pot.laplacian_exact(r[0])
    return AField(pot, A0, vals, grad, lap, (g_lo, g_hi))


def check_A_invariants(field_: AField, grid: RadialGrid) -> dict:
    """Node-wise (A1)-(A3) report."""
    params = field_.potential.params
    eps = field_.potential.epsilon
    n, al = params.n, params.alpha
    r = grid.r
    a = damping_at(params, r)
    ratio1 = field_.A_lap / a
    ratio2 = field_.A_vals / japanese(r) ** (2 - al)
    ratio3 = field_.A_grad**2 / (a * field_.A_vals)
    bound3 = (2 - al) / (n - al) + eps
    return {
        "A1": bool(np.all((ratio1 >= 1 - eps) & (ratio1 <= 1 + eps))),
        "A1_range": (float(ratio1.min()), float(ratio1.max())),
        "A2": bool(np.all(np.isfinite(ratio2)) and ratio2.min() > 0),
        "A2_c": float(ratio2.min()),
        "A2_C": float(ratio2.max()),
        "A3": bool(np.all(ratio3 <= bound3)),
        "A3_max": float(ratio3.max()),
        "A3_bound": bound3,
    }


# -- weight table ---------------------------------------------------------------


def default_nu(params: ModelParams, grid: RadialGrid, t0: float) -> float:
    a_min = float(np.min(damping_at(params, grid.r)))
    al = params.alpha
    return 0.01 * a_min * min(1.0, t0 ** (-al / (2 - al)))


@dataclass(frozen=True, eq=False)
class WeightTable:
    params: ModelParams
    grid: RadialGrid
    epsilon: float
    delta: float
    t0: float
    beta: float
    phi_params: PhiParams
    A: AField
    nu: float

    @property
    def A0(self) -> float:
        return self.A.A0

    @property
    def A_vals(self) -> np.ndarray:
        return self.A.A_vals

    @property
    def A_grad(self) -> np.ndarray:
        return self.A.A_grad

    @property
    def A_lap(self) -> np.ndarray:
        return self.A.A_lap

    @property
    def psi_admissible(self) -> bool:
        """lambda < (1 - 2 delta) gamma_eps, needed by the Psi energy family."""
        return self.params.lam < (1 - 2 * self.delta) * self.phi_params.gamma


def build_weight_table(
    params: ModelParams,
    grid: RadialGrid,
    epsilon: float = 0.1,
    delta: float = 0.2,
    t0: float = 10.0,
    nu: float | None = None,
    beta: float | None = None,
) -> WeightTable:
    if not 0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2) (got {epsilon})")
    if not 0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 1/2) (got {delta})")
    if t0 < 1:
        raise DomainError(f"t0 must be >= 1 (got {t0})")
    if beta is None:
        beta = params.lam / (1 - 2 * delta)
    field_ = build_A_eps(params, grid, epsilon)
    pp = PhiParams.for_model(beta, params.n, params.alpha, epsilon)
    if nu is None:
        nu = default_nu(params, grid, t0)
    return WeightTable(params, grid, epsilon, delta, t0, beta, pp, field_, nu)


def _A_at(table: WeightTable, r):
    return np.interp(r, table.grid.r, table.A_vals)


def psi_eval(table: WeightTable, r, t):
    """Psi = t0 + t + A_eps(r), A linearly interpolated between nodes."""
    return table.t0 + t + _A_at(table, r)


def psi_nodes(table: WeightTable, t) -> np.ndarray:
    return table.t0 + t + table.A_vals


def theta_eval(params: ModelParams, t0, r, t):
    """Theta = t0 + t + <r>^{2-alpha}."""
    return t0 + t + japanese(r) ** (2 - params.alpha)


def _phi_of_A(table: WeightTable, A, t, beta):
    pp = PhiParams(beta, table.phi_params.gamma_tilde, table.phi_params.gamma, table.epsilon)
    tau = table.t0 + t
    z = pp.gamma_tilde * np.asarray(A) / tau
    return tau ** (-beta) * np.asarray(phi(pp, z))


def phi_weight_eval(table: WeightTable, r, t, beta: float | None = None):
    """Phi_beta(r, t) = (t0+t)^{-beta} phi_beta(gamma_tilde A(r) / (t0+t))."""
    beta = table.beta if beta is None else beta
    out = _phi_of_A(table, _A_at(table, r), t, beta)
    return out if out.ndim else float(out)


def phi_nodes(table: WeightTable, t, beta: float | None = None) -> np.ndarray:
    beta = table.beta if beta is None else beta
    return _phi_of_A(table, table.A_vals, t, beta)


def phi_dt(table: WeightTable, t, beta: float | None = None) -> np.ndarray:
    """Closed-form time derivative d/dt Phi_beta at the nodes (chain rule via phi')."""
    beta = table.beta if beta is None else beta
    pp = PhiParams(beta, table.phi_params.gamma_tilde, table.phi_params.gamma, table.epsilon)
    tau = table.t0 + t
    z = pp.gamma_tilde * table.A_vals / tau
    return -(tau ** (-beta - 1)) * (beta * np.asarray(phi(pp, z)) + z * np.asarray(phi_prime(pp, z)))


def _phi_laplacian(table: WeightTable, t, beta):
    grid = table.grid
    vals = phi_nodes(table, t, beta)
    g_lo, g_hi = table.A.A_ghost
    lo = None if g_lo is None else float(_phi_of_A(table, g_lo, t, beta))
    hi = float(_phi_of_A(table, g_hi, t, beta))
    lap = radial_laplacian(vals, grid, table.params.n, lo=lo, hi=hi)
    return vals, lap


def supersolution_residual(table: WeightTable, grid: RadialGrid, t) -> np.ndarray:
    """[a dPhi/dt - Lap_h Phi] / [a Psi^{-beta-1}] at every node."""
    beta = table.beta
    if not beta > 0:
        raise DomainError("the supersolution estimate needs beta > 0")
    a = damping_at(table.params, grid.r)
    _, lap = _phi_laplacian(table, t, beta)
    dt_phi = -beta * phi_nodes(table, t, beta + 1)
    return (a * dt_phi - lap) / (a * psi_nodes(table, t) ** (-beta - 1))


def supersolution_analytic(table: WeightTable, t) -> np.ndarray:
    """Chain-rule value of a dPhi/dt - Lap Phi, normalised like the residual."""
    beta = table.beta
    pp = table.phi_params
    gt = pp.gamma_tilde
    tau = table.t0 + t
    A = table.A_vals
    z = gt * A / tau
    a = damping_at(table.params, table.grid.r)
    lapA = table.A.potential.laplacian_exact(table.grid.r)
    grad2 = table.A_grad**2
    f, f1, f2 = (np.asarray(g(pp, z)) for g in (phi, phi_prime, phi_second))
    val = -a * tau ** (-beta - 1) * (
        beta * f + z * f1 + gt * (lapA / a) * f1 + gt * (grad2 / (a * A)) * z * f2
    )
    return val / (a * psi_nodes(table, t) ** (-beta - 1))


def delta_phi_inequality_check(table: WeightTable, grid: RadialGrid, u, t, delta: float | None = None):
    """Both sides of  int u Lap u Phi^{-1+2d}
                      <= -d/(1-d) int |u'|^2 Phi^{-1+2d} + (1-2d)/2 int u^2 (Lap Phi) Phi^{-2+2d}."""
    delta = table.delta if delta is None else delta
    u = np.asarray(u, dtype=float)
    edge = 2
    if np.any(u[-edge - 1 :] != 0) or (not grid.has_origin and np.any(u[: edge + 1] != 0)):
        raise SupportError("u must vanish within 2 nodes of the boundary")
    n = table.params.n
    w = quadrature_weights(grid, n)
    Phi, lapPhi = _phi_laplacian(table, t, table.beta)
    lap_u = radial_laplacian(u, grid, n)
    grad_u = radial_gradient(u, grid)
    lhs = integrate(u * lap_u * Phi ** (-1 + 2 * delta), w)
    rhs = -delta / (1 - delta) * integrate(grad_u**2 * Phi ** (-1 + 2 * delta), w) + (1 - 2 * delta) / 2 * integrate(
        u**2 * lapPhi * Phi ** (-2 + 2 * delta), w
    )
    return lhs, rhs


def psi_theta_constants(table: WeightTable, t=0.0):
    """Node-wise (min, max) of Psi/Theta."""
    ratio = psi_nodes(table, t) / theta_eval(table.params, table.t0, table.grid.r, t)
    return float(ratio.min()), float(ratio.max())


def write_weights_csv(table: WeightTable, path) -> None:
    params = table.params
    a = damping_at(params, table.grid.r)
    ratio3 = table.A_grad**2 / (a * table.A_vals)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["r", "A", "lap_A", "A3_ratio"])
        for row in zip(table.grid.r, table.A_vals, table.A_lap, ratio3):
            out.writerow([f"{x:.17g}" for x in row])
