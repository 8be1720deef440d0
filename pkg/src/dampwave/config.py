"""Experiment configuration: ``key = value`` lines grouped in sections.

Sections are [model] [grid] [run] [weights] [output] [sweep].  ``#`` starts
a comment.  Initial data profiles are written as

    u0 = bump <center> <width> <amplitude>
    u1 = poly <q> <amplitude>
    u1 = zero

The model exponents alpha, p and lambda are kept as exact fractions so that
boundary cases (p = p_subc, lambda = mu) are decided exactly by the
classifier; ``7/5`` and ``1.4`` both parse to 7/5.  ``dump_config`` writes
the canonical form, which parses back to an equal config and dumps to the
same bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from decimal import Decimal
from fractions import Fraction

from .errors import ConfigError, ParseError, ProfileUnsupported, ValidationError
from .model import (
    CompactBump,
    ExteriorBall,
    InitialData,
    ModelParams,
    PolyDecay,
    RadialGrid,
    WholeSpace,
    Zero,
    poly_decay_threshold,
)
from .solver import RunConfig

SECTIONS = ("model", "grid", "run", "weights", "output", "sweep")


# -- value codecs ----------------------------------------------------------------


def _parse_exact(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc


def format_exact(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    for prime in (2, 5):
        while d % prime == 0:
            d //= prime
    if d == 1:
        # terminating decimal, printed exactly
        return format(Decimal(x.numerator) / Decimal(x.denominator), "f")
    return f"{x.numerator}/{x.denominator}"


def _parse_real(text: str) -> float:
    value = float(Fraction(text.strip())) if "/" in text else float(text)
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def _format_real(x: float) -> str:
    return repr(float(x))


def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _format_bool(x: bool) -> str:
    return "true" if x else "false"


def _parse_optional_real(text: str):
    return None if text.strip().lower() == "auto" else _parse_real(text)


def _format_optional_real(x) -> str:
    return "auto" if x is None else _format_real(x)


def _parse_list(text: str) -> tuple[Fraction, ...]:
    items = [s for s in (part.strip() for part in text.split(",")) if s]
    return tuple(_parse_exact(s) for s in items)


def _format_list(xs) -> str:
    return ", ".join(format_exact(x) for x in xs)


def parse_profile(text: str):
    parts = text.split()
    if not parts:
        raise ValueError("empty profile")
    kind, args = parts[0].lower(), [float(x) for x in parts[1:]]
    if kind == "zero" and not args:
        return Zero()
    if kind == "bump" and len(args) in (2, 3):
        return CompactBump(*args)
    if kind == "poly" and len(args) in (1, 2):
        return PolyDecay(*args)
    raise ValueError(f"bad profile {text!r}; expected 'zero', 'bump c w [amp]' or 'poly q [amp]'")


def format_profile(prof) -> str:
    if isinstance(prof, Zero):
        return "zero"
    if isinstance(prof, CompactBump):
        return f"bump {prof.center!r} {prof.width!r} {prof.amplitude!r}"
    return f"poly {prof.q!r} {prof.amplitude!r}"


def _parse_str(text: str) -> str:
    return text.strip()


_CODECS = {
    "exact": (_parse_exact, format_exact),
    "real": (_parse_real, _format_real),
    "opt_real": (_parse_optional_real, _format_optional_real),
    "int": (_parse_int, str),
    "bool": (_parse_bool, _format_bool),
    "str": (_parse_str, str),
    "profile": (parse_profile, format_profile),
    "list": (_parse_list, _format_list),
}


@dataclass(frozen=True)
class ExperimentConfig:
    # [model]
    n: int = 1
    alpha: Fraction = Fraction(0)
    a0: float = 1.0
    a1: float | None = None
    p: Fraction = Fraction(3)
    lam: Fraction = Fraction(0)
    domain: str = "whole"
    r0: float = 1.0
    damping: str = "power"
    nonlinear: bool = True
    u0: object = field(default_factory=lambda: CompactBump(2.0, 1.0, 1.0))
    u1: object = field(default_factory=Zero)
    # [grid]
    r_max: float | None = None
    cells: int = 2049
    # [run]
    T_final: float = 20.0
    cfl: float = 0.5
    record_every: int = 10
    cone_margin: float = 0.5
    check_cone: bool = True
    family: str = "theta"
    # [weights]
    epsilon: float = 0.1
    delta: float = 0.2
    t0: float = 10.0
    nu: float | None = None
    seed: int = 42
    # [output]
    out_dir: str = "out"
    # [sweep]
    sweep_p: tuple = ()
    sweep_lambda: tuple = ()
    sweep_simulate: bool = False

    # -- derived objects --------------------------------------------------------

    def model_params(self, lam=None) -> ModelParams:
        """Float-valued ModelParams for simulation (``lam`` overrides lambda)."""
        domain = WholeSpace() if self.domain == "whole" else ExteriorBall(self.r0)
        return ModelParams(
            n=self.n,
            alpha=float(self.alpha),
            a0=self.a0,
            p=float(self.p),
            lam=float(self.lam if lam is None else lam),
            a1=self.a1,
            domain=domain,
            damping=self.damping,
            nonlinear=self.nonlinear,
        )

    def theory_tuple(self, p=None, lam=None):
        """(n, alpha, p, lambda) with exact rational entries for the classifier."""
        return (self.n, self.alpha, self.p if p is None else p, self.lam if lam is None else lam)

    def data(self) -> InitialData:
        return InitialData(self.u0, self.u1)

    def resolved_r_max(self) -> float:
        if self.r_max is not None:
            return self.r_max
        support = self.data().support_radius
        base = support if math.isfinite(support) else 10.0
        r_min = 0.0 if self.domain == "whole" else self.r0
        return math.ceil(max(base, r_min) + self.T_final + self.cone_margin + 1.0)

    def grid(self) -> RadialGrid:
        r_min = 0.0 if self.domain == "whole" else self.r0
        return RadialGrid(r_min, self.resolved_r_max(), self.cells)

    def run_config(self) -> RunConfig:
        return RunConfig(self.T_final, self.cfl, self.record_every, self.cone_margin, self.check_cone)

    def with_point(self, p, lam) -> "ExperimentConfig":
        return replace(self, p=Fraction(p), lam=Fraction(lam))


# (section, key) -> (field name, codec)
SCHEMA = {
    ("model", "n"): ("n", "int"),
    ("model", "alpha"): ("alpha", "exact"),
    ("model", "a0"): ("a0", "real"),
    ("model", "a1"): ("a1", "opt_real"),
    ("model", "p"): ("p", "exact"),
    ("model", "lambda"): ("lam", "exact"),
    ("model", "domain"): ("domain", "str"),
    ("model", "r0"): ("r0", "real"),
    ("model", "damping"): ("damping", "str"),
    ("model", "nonlinear"): ("nonlinear", "bool"),
    ("model", "u0"): ("u0", "profile"),
    ("model", "u1"): ("u1", "profile"),
    ("grid", "r_max"): ("r_max", "opt_real"),
    ("grid", "cells"): ("cells", "int"),
    ("run", "T_final"): ("T_final", "real"),
    ("run", "cfl"): ("cfl", "real"),
    ("run", "record_every"): ("record_every", "int"),
    ("run", "cone_margin"): ("cone_margin", "real"),
    ("run", "check_cone"): ("check_cone", "bool"),
    ("run", "family"): ("family", "str"),
    ("weights", "epsilon"): ("epsilon", "real"),
    ("weights", "delta"): ("delta", "real"),
    ("weights", "t0"): ("t0", "real"),
    ("weights", "nu"): ("nu", "opt_real"),
    ("weights", "seed"): ("seed", "int"),
    ("output", "dir"): ("out_dir", "str"),
    ("sweep", "p"): ("sweep_p", "list"),
    ("sweep", "lambda"): ("sweep_lambda", "list"),
    ("sweep", "simulate"): ("sweep_simulate", "bool"),
}


def parse_config(text: str, validate_config: bool = True) -> ExperimentConfig:
    """Parse ``text``; syntax errors raise ParseError, invariant failures ValidationError."""
    section = None
    seen = {}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        if section is None:
            raise ParseError("key outside of any section", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if (section, key) not in SCHEMA:
            raise ParseError(f"unknown key {key!r} in [{section}]", lineno)
        if (section, key) in seen:
            raise ParseError(f"duplicate key {key!r} in [{section}] (first on line {seen[section, key]})", lineno)
        seen[section, key] = lineno
        name, codec = SCHEMA[section, key]
        try:
            values[name] = _CODECS[codec][0](value)
        except (ValueError, TypeError) as exc:
            raise ParseError(f"{key}: {exc}", lineno) from None
    cfg = ExperimentConfig(**values)
    if validate_config:
        validate(cfg)
    return cfg


def dump_config(cfg: ExperimentConfig) -> str:
    """Canonical text: every key, schema order, one blank line between sections."""
    by_section = {s: [] for s in SECTIONS}
    for (section, key), (name, codec) in SCHEMA.items():
        by_section[section].append(f"{key} = {_CODECS[codec][1](getattr(cfg, name))}".rstrip())
    blocks = [f"[{s}]\n" + "\n".join(lines) + "\n" for s, lines in by_section.items()]
    return "\n".join(blocks)


def violations(cfg: ExperimentConfig) -> list[str]:
    out = []
    if cfg.domain not in ("whole", "exterior"):
        out.append(f"domain must be 'whole' or 'exterior' (got {cfg.domain!r})")
    if cfg.family not in ("theta", "psi"):
        out.append(f"family must be 'theta' or 'psi' (got {cfg.family!r})")
    params = None
    try:
        params = cfg.model_params()
    except ValidationError as exc:
        out.extend(exc.violations)
    except (TypeError, ValueError) as exc:
        out.append(str(exc))
    try:
        grid = cfg.grid()
    except ValidationError as exc:
        out.extend(exc.violations)
        grid = None
    try:
        cfg.run_config()
    except ConfigError as exc:
        out.append(str(exc))
    if not 0 < cfg.epsilon < 0.5:
        out.append(f"epsilon must lie in (0, 1/2) (got {cfg.epsilon})")
    if not 0 < cfg.delta < 0.5:
        out.append(f"delta must lie in (0, 1/2) (got {cfg.delta})")
    if not cfg.t0 >= 1:
        out.append(f"t0 must be >= 1 (got {cfg.t0})")
    if cfg.nu is not None and not cfg.nu > 0:
        out.append(f"nu must be > 0 (got {cfg.nu})")
    if params is not None:
        for role in ("u0", "u1"):
            prof = getattr(cfg, role)
            if isinstance(prof, PolyDecay) and prof.q <= poly_decay_threshold(params, role):
                out.append(str(ProfileUnsupported(
                    f"{role}: PolyDecay q={prof.q} makes I_0 diverge (need q > {poly_decay_threshold(params, role):g})"
                )))
            if isinstance(prof, CompactBump) and prof.width <= 0:
                out.append(f"{role}: bump width must be > 0")
    support = cfg.data().support_radius
    if grid is not None and cfg.check_cone and math.isfinite(support):
        need = support + cfg.T_final + cfg.cone_margin
        if grid.r_max < need:
            out.append(f"cone requirement: r_max = {grid.r_max} < support + T_final + cone_margin = {need}")
    if bool(cfg.sweep_p) != bool(cfg.sweep_lambda):
        out.append("sweep axes p and lambda must both be given or both be empty")
    for lam in cfg.sweep_lambda:
        if lam < 0:
            out.append(f"sweep lambda values must be >= 0 (got {format_exact(lam)})")
    for p in cfg.sweep_p:
        try:
            cfg.with_point(p, 0).model_params()
        except ValidationError as exc:
            out.extend(f"sweep p = {format_exact(p)}: {v}" for v in exc.violations)
    return out


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    problems = violations(cfg)
    if problems:
        raise ValidationError(problems)
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())

