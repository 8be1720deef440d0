"""Leapfrog integration of u_tt - Lap u + a u_t + |u|^{p-1} u = 0 on a radial grid.

Update (damping averaged over k-1 and k+1, everything else explicit):

    u^{k+1} = [2 u^k - (1 - a dt/2) u^{k-1} + dt^2 (Lap_h u^k - |u^k|^{p-1} u^k)] / (1 + a dt/2)

The run starts from a Taylor ghost level u^{-1} = u0 - dt u1 + dt^2/2 (Lap u0 - a u1 - f(u0)),
which makes the first leapfrog step equal to the second-order Taylor start-up
and the centred velocity at t = 0 equal to u1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .energetics import EnergyMonitor, EnergyRecord
from .errors import BlowupError, ConfigError
from .model import InitialData, ModelParams, RadialGrid, damping_at, integrate, quadrature_weights, radial_laplacian, sample_initial_data

BLOWUP_LIMIT = 1e12


@dataclass(frozen=True)
class RunConfig:
    T_final: float
    cfl: float = 0.5
    record_every: int = 1
    cone_margin: float = 0.5
    check_cone: bool = True
    keep_snapshots: bool = False

    def __post_init__(self):
        if not 0 < self.cfl <= 0.9:
            raise ConfigError(f"cfl must lie in (0, 0.9] (got {self.cfl})")
        if self.T_final < 0:
            raise ConfigError("T_final must be >= 0")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1")

    def steps(self, grid: RadialGrid) -> tuple[int, float]:
        """(number of steps, dt) with dt <= cfl h landing exactly on T_final."""
        if self.T_final == 0:
            return 0, self.cfl * grid.h
        n = max(1, math.ceil(self.T_final / (self.cfl * grid.h) - 1e-9))
        return n, self.T_final / n


@dataclass(frozen=True, eq=False)
class WaveState:
    u: np.ndarray
    u_prev: np.ndarray
    t: float
    k: int
    dt: float


def nonlinearity(u, params: ModelParams):
    if not params.nonlinear:
        return np.zeros_like(u)
    return np.abs(u) ** (params.p - 1) * u


def _impose_bc(u, grid: RadialGrid):
    u[-1] = 0.0
    if not grid.has_origin:
        u[0] = 0.0
    return u


def initial_state(params: ModelParams, grid: RadialGrid, u0, u1, dt: float) -> WaveState:
    u0 = _impose_bc(np.array(u0, dtype=float), grid)
    u1 = _impose_bc(np.array(u1, dtype=float), grid)
    a = damping_at(params, grid.r)
    accel = radial_laplacian(u0, grid, params.n) - a * u1 - nonlinearity(u0, params)
    ghost = _impose_bc(u0 - dt * u1 + 0.5 * dt * dt * accel, grid)
    return WaveState(u0, ghost, 0.0, 0, dt)


def step(state: WaveState, params: ModelParams, grid: RadialGrid, a=None) -> WaveState:
    """One leapfrog step; raises BlowupError when max |u| exceeds 1e12."""
    dt = state.dt
    if a is None:
        a = damping_at(params, grid.r)
    u, um = state.u, state.u_prev
    half = 0.5 * a * dt
    rhs = radial_laplacian(u, grid, params.n) - nonlinearity(u, params)
    nxt = (2 * u - (1 - half) * um + dt * dt * rhs) / (1 + half)
    _impose_bc(nxt, grid)
    peak = np.max(np.abs(nxt))
    if not np.isfinite(peak) or peak > BLOWUP_LIMIT:
        raise BlowupError(f"max|u| = {peak:g} at step {state.k + 1}; the scheme went unstable")
    return WaveState(nxt, u, state.t + dt, state.k + 1, dt)


@dataclass
class RunResult:
    records: list[EnergyRecord]
    dt: float
    steps: int
    snapshots: list[tuple[float, np.ndarray, np.ndarray]] = field(default_factory=list)


def run(
    params: ModelParams,
    grid: RadialGrid,
    data: InitialData,
    config: RunConfig,
    monitor: EnergyMonitor | None = None,
) -> RunResult:
    """Advance to T_final, recording every ``record_every`` steps (step 0 included)."""
    R0 = data.support_radius
    if config.check_cone and math.isfinite(R0) and grid.r_max < R0 + config.T_final + config.cone_margin:
        raise ConfigError(
            f"r_max = {grid.r_max} is inside the light cone: need >= {R0 + config.T_final + config.cone_margin}"
        )
    if monitor is None:
        monitor = EnergyMonitor(params, grid, family=None)
    n_steps, dt = config.steps(grid)
    u0, u1 = sample_initial_data(data, grid)
    a = damping_at(params, grid.r)
    state = initial_state(params, grid, u0, u1, dt)
    result = RunResult([], dt, n_steps)
    for k in range(n_steps + 1):
        nxt = step(state, params, grid, a)
        if k % config.record_every == 0:
            t = k * dt
            v = (nxt.u - state.u_prev) / (2 * dt)
            result.records.append(monitor.record(state.u, v, t))
            if config.keep_snapshots:
                result.snapshots.append((t, state.u.copy(), v))
        state = nxt
    return result


def finite_propagation_check(snapshots, params: ModelParams, grid: RadialGrid, support_radius: float, cone_margin: float = 0.5) -> float:
    """max over snapshots of int_{r > R0 + t + margin} u^2 dmu."""
    w = quadrature_weights(grid, params.n)
    worst = 0.0
    for t, u, _ in snapshots:
        outside = grid.r > support_radius + t + cone_margin
        worst = max(worst, integrate(np.where(outside, u * u, 0.0), w))
    return worst


def with_params(params: ModelParams, **changes) -> ModelParams:
    return replace(params, **changes)


def write_snapshots_csv(snapshots, grid: RadialGrid, path, times=None) -> None:
    """Rows (t, r, u, v) for the requested snapshot times (all when ``times`` is None)."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["t", "r", "u", "v"])
        for t, u, v in snapshots:
            if times is not None and not any(abs(t - s) < 1e-12 for s in times):
                continue
            for row in zip(grid.r, u, v):
                out.writerow([f"{t:.17g}"] + [f"{x:.17g}" for x in row])
