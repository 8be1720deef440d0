"""Decay-exponent fits and bound verdicts for recorded energy series.

The decay bounds are one-sided: q(t) <= C (t0+t)^-mu (log(2+t))^ell.  A verdict
therefore looks at the scaled series q (t0+t)^mu / (log(2+t))^ell over the
dyadic windows [T/2^{k+1}, T/2^k] and asks whether it stays bounded.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import WindowError

MIN_WINDOW_RECORDS = 20
GROWTH_FACTOR = 3.0


class Verdict(str, enum.Enum):
    HOLDS = "BoundHolds"
    VIOLATED = "BoundViolated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    window: tuple[float, float]
    sup_scaled: float
    verdict: Verdict
    # sup of the scaled series on [T/2,T], [T/4,T/2], ... (latest first)
    dyadic_sups: tuple[float, ...] = ()

    def report(self, name: str = "q") -> str:
        lines = [
            f"quantity: {name}",
            f"window: [{self.window[0]:.6g}, {self.window[1]:.6g}]",
            f"slope: {self.slope:.6g}",
            f"sup_scaled: {self.sup_scaled:.6g}",
            "dyadic_sups: " + " ".join(f"{s:.6g}" for s in self.dyadic_sups),
            f"verdict: {self.verdict.value}",
        ]
        return "\n".join(lines) + "\n"


def _values(records, quantity):
    if callable(quantity):
        return np.array([float(quantity(r)) for r in records])
    return np.array([float(getattr(r, quantity)) for r in records])


def scaled_series(t, q, t0: float, mu: float, log_power: int = 0):
    """q (t0+t)^mu / (log(2+t))^ell."""
    t = np.asarray(t, dtype=float)
    return np.asarray(q, dtype=float) * (t0 + t) ** float(mu) / np.log(2.0 + t) ** log_power


def dyadic_sups(t, scaled, T: float, max_windows: int = 40) -> list[float]:
    """Sup of ``scaled`` on [T/2^{k+1}, T/2^k], k = 0, 1, ... while a window holds >= 2 samples."""
    out = []
    for k in range(max_windows):
        hi, lo = T / 2**k, T / 2 ** (k + 1)
        mask = (t >= lo) & (t <= hi)
        if np.count_nonzero(mask) < 2:
            break
        out.append(float(np.max(scaled[mask])))
    return out


def verdict_from_sups(sups) -> Verdict:
    """Violated if the sups grow monotonically over every window by > GROWTH_FACTOR overall.

    Otherwise Holds when the last window exceeds the one before by less than
    GROWTH_FACTOR, else Inconclusive.
    """
    if len(sups) < 2:
        return Verdict.INCONCLUSIVE
    growing = all(a > b for a, b in zip(sups[:-1], sups[1:]))
    if growing and sups[0] > GROWTH_FACTOR * sups[-1]:
        return Verdict.VIOLATED
    if sups[0] < GROWTH_FACTOR * sups[1]:
        return Verdict.HOLDS
    return Verdict.INCONCLUSIVE


def fit_decay(records, quantity, t0: float, prediction=None, mu=None, log_power=None, window=None) -> FitResult:
    """Fit log q against log(t0+t) and judge the predicted bound.

    ``quantity`` names an EnergyRecord field or is a callable on records.
    The exponent comes from ``prediction`` (a DecayPrediction) unless ``mu``
    and ``log_power`` are given explicitly.
    """
    records = list(records)
    if not records:
        raise WindowError("no records to fit")
    if mu is None:
        mu = 0.0 if prediction is None else float(prediction.mu)
    if log_power is None:
        log_power = 0 if prediction is None else int(prediction.log_power)
    t = np.array([r.t for r in records], dtype=float)
    q = _values(records, quantity)
    T = float(t[-1])
    lo, hi = window if window is not None else (T / 2, T)
    mask = (t >= lo) & (t <= hi)
    if not np.any(mask):
        raise WindowError(f"fit window [{lo}, {hi}] holds no records")
    scaled = scaled_series(t, q, t0, mu, log_power)
    sup = float(np.max(scaled[mask]))
    sups = dyadic_sups(t, scaled, T)
    slope = intercept = math.nan
    if np.count_nonzero(mask) < MIN_WINDOW_RECORDS or np.any(q[mask] <= 0):
        return FitResult(slope, intercept, (lo, hi), sup, Verdict.INCONCLUSIVE, tuple(sups))
    slope, intercept = np.polyfit(np.log(t0 + t[mask]), np.log(q[mask]), 1)
    return FitResult(float(slope), float(intercept), (lo, hi), sup, verdict_from_sups(sups), tuple(sups))


def write_scaled_csv(records, quantity, t0: float, mu: float, log_power: int, path) -> None:
    t = np.array([r.t for r in records], dtype=float)
    q = _values(records, quantity)
    s = scaled_series(t, q, t0, mu, log_power)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["t", "q", "scaled_q"])
        for row in zip(t, q, s):
            out.writerow([f"{x:.17g}" for x in row])
