"""Invariant batteries behind the ``verify-weights`` and ``selftest`` commands.

Each battery returns a list of CheckResult; nothing here raises on a failed
inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energetics import EnergyMonitor
from .kummer import PhiParams, kummer_m, kummer_scaled, phi, phi_prime, phi_second
from .model import CompactBump, InitialData, ModelParams, RadialGrid
from .solver import RunConfig, run
from .weights import (
    build_A_eps,
    build_weight_table,
    check_A_invariants,
    delta_phi_inequality_check,
    phi_dt,
    phi_nodes,
    supersolution_residual,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def kummer_suite() -> list[CheckResult]:
    out = []
    s = np.concatenate([[0.0], np.geomspace(1e-3, 30.0, 49)])
    worst = 0.0
    for b in (0.5, 1.0, 2.0):
        worst = max(worst, float(np.max(np.abs(kummer_m(b, b, s) - np.exp(s)) / np.exp(s))))
    out.append(CheckResult("M(b,b;s) = e^s", worst <= 1e-10, f"max rel err {worst:.3g}"))

    pp = PhiParams.for_model(0.4, 3, 0.5, 0.1)
    sg = np.linspace(0.0, 80.0, 801)
    f, f1, f2 = (np.asarray(g(pp, sg)) for g in (phi, phi_prime, phi_second))
    ode = np.max(np.abs(sg * f2 + (pp.gamma + sg) * f1 + pp.beta * f))
    out.append(CheckResult("phi ODE s phi'' + (gamma+s) phi' + beta phi = 0", ode <= 1e-9, f"max residual {ode:.3g}"))

    rec = np.max(np.abs(pp.beta * f + sg * f1 - pp.beta * np.asarray(phi(pp.shifted(1.0), sg))))
    out.append(CheckResult("recurrence beta phi_b + s phi_b' = beta phi_{b+1}", rec <= 1e-9, f"max residual {rec:.3g}"))

    errs = []
    for hstep in (1e-2, 5e-3):
        fd1 = (np.asarray(phi(pp, sg[1:] + hstep)) - np.asarray(phi(pp, sg[1:] - hstep))) / (2 * hstep)
        errs.append(float(np.max(np.abs(fd1 - f1[1:]))))
    order = np.log2(errs[0] / errs[1])
    out.append(CheckResult("phi' closed form vs central difference", order > 1.8, f"errors {errs[0]:.3g}, {errs[1]:.3g}"))

    ratio = kummer_scaled(1.0, 2.0, 200.0) * 200.0
    out.append(CheckResult("M(1,2;200) 200 e^-200 = 1", abs(ratio - 1) <= 0.02, f"value {ratio:.12g}"))
    return out


def weights_suite(
    params: ModelParams,
    grid: RadialGrid,
    epsilon: float = 0.1,
    delta: float = 0.2,
    t0: float = 10.0,
    seed: int = 42,
    betas=(0.3, None),
    times=(0.0, 1.0, 10.0, 100.0),
    bumps: int = 100,
) -> list[CheckResult]:
    """(A1)-(A3), the supersolution sign and the weighted Laplacian inequality.

    ``None`` in ``betas`` stands for 0.6 gamma_eps.
    """
    out = []
    field = build_A_eps(params, grid, epsilon)
    inv = check_A_invariants(field, grid)
    out.append(CheckResult("(A1) 1-eps <= Lap A / a <= 1+eps", inv["A1"], f"range [{inv['A1_range'][0]:.6g}, {inv['A1_range'][1]:.6g}]"))
    out.append(CheckResult("(A2) c <= A / <r>^(2-alpha) <= C", inv["A2"], f"c = {inv['A2_c']:.6g}, C = {inv['A2_C']:.6g}"))
    out.append(CheckResult("(A3) |grad A|^2 / (a A) <= bound", inv["A3"], f"max {inv['A3_max']:.6g} vs {inv['A3_bound']:.6g}"))

    gamma = PhiParams.for_model(0.0, params.n, params.alpha, epsilon).gamma
    for beta in betas:
        beta = 0.6 * gamma if beta is None else beta
        table = build_weight_table(params, grid, epsilon=epsilon, delta=delta, t0=t0, beta=beta)
        worst = min(float(supersolution_residual(table, grid, t)[1:-1].min()) for t in times)
        out.append(CheckResult(f"supersolution ratio > 0 (beta={beta:.6g})", worst > 0, f"min {worst:.6g}"))
        ident = max(float(np.max(np.abs(phi_dt(table, t) + beta * phi_nodes(table, t, beta + 1)))) for t in times)
        out.append(CheckResult(f"dPhi/dt = -beta Phi_(beta+1) (beta={beta:.6g})", ident <= 1e-8, f"max residual {ident:.3g}"))

    if bumps:
        rng = np.random.default_rng(seed)
        tol = 1e-6 + 10 * grid.h
        lo = params.r_min + 3 * grid.h
        hi = grid.r_max - 3 * grid.h
        for beta in (0.0, 0.3):
            table = build_weight_table(params, grid, epsilon=epsilon, delta=delta, t0=t0, beta=beta)
            worst = -np.inf
            for _ in range(bumps):
                u = random_bump(rng, grid, lo, hi)
                lhs, rhs = delta_phi_inequality_check(table, grid, u, rng.uniform(0.0, 50.0))
                worst = max(worst, lhs - rhs)
            out.append(CheckResult(f"weighted Laplacian inequality (beta={beta:g})", worst <= tol, f"max lhs-rhs {worst:.3g} vs tol {tol:.3g}"))
    return out


def random_bump(rng, grid: RadialGrid, lo: float, hi: float) -> np.ndarray:
    """CompactBump samples with random centre, width and signed amplitude, supported in (lo, hi)."""
    width = rng.uniform(0.5, max(0.6, (hi - lo) / 4))
    center = rng.uniform(lo + width, max(lo + width, hi - width))
    amp = rng.uniform(-2.0, 2.0)
    u = CompactBump(center, width, amp)(grid.r)
    u[(grid.r <= lo) | (grid.r >= hi)] = 0.0
    return u


def energetics_suite() -> list[CheckResult]:
    out = []
    params = ModelParams(1, 0.5, 1.0, 2.0)
    grid = RadialGrid(0.0, 20.0, 1025)
    data = InitialData(CompactBump(3.0, 1.0, 1.0), CompactBump(3.0, 1.0, 0.5))
    mon = EnergyMonitor(params, grid, "theta")
    res = run(params, grid, data, RunConfig(10.0, record_every=2), mon)
    E = np.array([r.E for r in res.records])
    tol = 1e-10 * E[0] + 5 * res.dt**2
    out.append(CheckResult("E >= 0", bool(np.all(E >= 0)), f"min {E.min():.3g}"))
    out.append(CheckResult("E non-increasing", bool(np.all(np.diff(E) <= tol)), f"max increment {np.diff(E).max():.3g}"))
    gap = max(abs(r.Estar - (r.E1 + mon.nu * r.E0)) for r in res.records)
    out.append(CheckResult("Estar = E1 + nu E0", gap <= 1e-12 * max(1.0, max(abs(r.Estar) for r in res.records)), f"max gap {gap:.3g}"))
    slack = min(r.estar_slack + 1e-10 * (abs(r.E1) + 1) for r in res.records)
    out.append(CheckResult("Estar >= E1/2 + nu/2 int a u^2 W^lambda", slack >= 0, f"min slack {slack:.3g}"))
    zero = run(params, grid, InitialData(), RunConfig(1.0), mon)
    out.append(CheckResult("zero data gives zero energy", all(r.E == 0 and r.Estar == 0 for r in zero.records), ""))
    return out
