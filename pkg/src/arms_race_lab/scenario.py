"""Flat dotted ``key = value`` scenario documents.

    # comment
    model.q0 = 0.3
    model.h.alpha = 1.0
    surfaces.N = 10
    targeting.0.B = 10

Every key is validated against a fixed schema.  Range errors name the key
and its admissible interval; unknown keys suggest the nearest known one.
"""
from __future__ import annotations

import difflib
import hashlib
import math
import re
from dataclasses import dataclass, field

from .contest import AmplificationFamily, AmplificationSpec, ErosionFamily, ErosionSpec, ModelParams
from .errors import DomainError, ValidationError
from .multisurface import SurfaceConfig
from .strategic import BEST_RESPONSE_PER_TARGET, DefenderMode, DefenderProfile, DeterrenceScenario, FixedA

SUBCOMMANDS = ("ratio", "equilibrium", "dynamics", "scaling", "deterrence", "targeting", "figures")
REQUIRED_SECTIONS = {
    "ratio": ("model",),
    "equilibrium": ("model",),
    "dynamics": ("model", "dynamics"),
    "scaling": ("model", "surfaces"),
    "deterrence": ("model", "deterrence"),
    "targeting": ("model", "targeting"),
    "figures": ("model",),
}
DEFAULT_BETAS = (0.2, 1.5, 8.0)
U64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def contains(self, x) -> bool:
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return above and below

    def __str__(self):
        def fmt(v):
            return "inf" if v == math.inf else format(v, "g")
        return f"{'(' if self.lo_open else '['}{fmt(self.lo)}, {fmt(self.hi)}{')' if self.hi_open else ']'}"


POSITIVE = Interval(0, math.inf, True, True)
NONNEGATIVE = Interval(0, math.inf, False, True)
UNIT_OPEN = Interval(0, 1, True, True)
UNIT = Interval(0, 1)
AT_LEAST_ONE = Interval(1, math.inf, False, True)


@dataclass(frozen=True)
class Field:
    kind: str  # real, int, bool, choice, reals, starts
    interval: Interval | None = None
    choices: tuple[str, ...] = ()


def _amp_fields(prefix):
    return {
        f"{prefix}.family": Field("choice", choices=tuple(f.value for f in AmplificationFamily)),
        f"{prefix}.alpha": Field("real", POSITIVE),
        f"{prefix}.saturation": Field("real", POSITIVE),
    }


SCHEMA: dict[str, Field] = {
    "seed": Field("int", Interval(0, U64_MAX)),
    "model.q0": Field("real", UNIT_OPEN),
    **_amp_fields("model.h"),
    "model.delta.family": Field("choice", choices=tuple(f.value for f in ErosionFamily)),
    "model.delta.delta0": Field("real", Interval(0, 1, True, False)),
    "model.delta.beta": Field("real", POSITIVE),
    "model.delta.k": Field("real", POSITIVE),
    "model.delta.allow_k_above_one": Field("bool"),
    "model.s": Field("real", NONNEGATIVE),
    "model.V": Field("real", NONNEGATIVE),
    "model.B": Field("real", NONNEGATIVE),
    "model.c_d": Field("real", POSITIVE),
    "model.c_a": Field("real", POSITIVE),
    "model.F": Field("real", NONNEGATIVE),
    "point.a": Field("real", NONNEGATIVE),
    "point.d": Field("real", NONNEGATIVE),
    "surfaces.N": Field("real", AT_LEAST_ONE),
    "surfaces.rho": Field("real", UNIT),
    "surfaces.gamma": Field("real", UNIT),
    "surfaces.s": Field("real", NONNEGATIVE),
    "surfaces.N_grid": Field("reals", AT_LEAST_ONE),
    "surfaces.a": Field("real", NONNEGATIVE),
    "surfaces.d": Field("real", NONNEGATIVE),
    "dynamics.eta": Field("real", POSITIVE),
    "dynamics.max_steps": Field("int", Interval(1, math.inf, False, True)),
    "dynamics.tol": Field("real", POSITIVE),
    "dynamics.starts": Field("starts", NONNEGATIVE),
    "dynamics.random_starts": Field("int", NONNEGATIVE),
    "dynamics.t_end": Field("real", POSITIVE),
    "dynamics.dt": Field("real", POSITIVE),
    "deterrence.d_fixed": Field("real", NONNEGATIVE),
    **_amp_fields("deterrence.h_simple"),
    **_amp_fields("deterrence.h_complex"),
    "deterrence.N_a": Field("int", Interval(2, math.inf, False, True)),
    "deterrence.gamma_a": Field("real", Interval(0, 1, True, False)),
    "deterrence.rho": Field("real", UNIT),
    "deterrence.simple_attack_diluted": Field("bool"),
    "deterrence.defender_mode": Field("choice", choices=tuple(m.value for m in DefenderMode)),
    "deterrence.grid_points": Field("int", Interval(2, math.inf, False, True)),
    "targeting.mode": Field("choice", choices=("best_response", "fixed")),
    "targeting.a": Field("real", NONNEGATIVE),
    "targeting.rho": Field("real", UNIT),
    "targeting.<k>.d": Field("real", NONNEGATIVE),
    "targeting.<k>.s": Field("real", NONNEGATIVE),
    "targeting.<k>.gamma": Field("real", UNIT),
    "targeting.<k>.N": Field("int", AT_LEAST_ONE),
    "targeting.<k>.B": Field("real", POSITIVE),
    "targeting.<k>.V": Field("real", POSITIVE),
    "figures.betas": Field("reals", POSITIVE),
    "figures.points": Field("int", Interval(3, math.inf, False, True)),
    "figures.a": Field("real", NONNEGATIVE),
    "figures.d": Field("real", NONNEGATIVE),
}

_PROFILE_KEY = re.compile(r"^targeting\.(\d+)\.(\w+)$")


@dataclass(frozen=True)
class DynamicsConfig:
    eta: float = 0.15
    max_steps: int = 50_000
    tol: float = 1e-8
    starts: tuple[tuple[float, float], ...] = ()
    random_starts: int = 0
    t_end: float | None = None
    dt: float | None = None


@dataclass(frozen=True)
class TargetingConfig:
    profiles: tuple[DefenderProfile, ...]
    mode: object = BEST_RESPONSE_PER_TARGET
    rho: float = 1.0


@dataclass(frozen=True)
class FigureConfig:
    betas: tuple[float, ...] = DEFAULT_BETAS
    points: int = 101
    a: float = 1.0
    d: float = 1.0


@dataclass(frozen=True)
class Scenario:
    model: ModelParams
    surfaces: SurfaceConfig | None = None
    surfaces_grid: tuple[float, ...] | None = None
    surfaces_point: tuple[float, float] = (0.0, 0.0)
    point: tuple[float, float] = (0.0, 0.0)
    dynamics: DynamicsConfig | None = None
    deterrence: DeterrenceScenario | None = None
    deterrence_grid_points: int = 64
    targeting: TargetingConfig | None = None
    figures: FigureConfig = FigureConfig()
    seed: int = 0
    sections: frozenset = frozenset()
    text: str = field(default="", repr=False)

    @property
    def sha256(self) -> str:
        return scenario_hash(self.text)


def scenario_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _schema_key(key: str) -> str:
    m = _PROFILE_KEY.match(key)
    return f"targeting.<k>.{m.group(2)}" if m else key


def _convert(key: str, raw: str, spec: Field, line: int):
    def bad(msg):
        return ValidationError(f"line {line}: {key}: {msg}")

    def real(text):
        try:
            x = float(text)
        except ValueError:
            raise bad(f"expected a real number, got {text!r}") from None
        if not math.isfinite(x):
            raise bad(f"expected a finite real, got {text!r}")
        return x

    def check(x):
        if spec.interval is not None and not spec.interval.contains(x):
            raise bad(f"value {x!r} outside admissible range {spec.interval}")
        return x

    if spec.kind == "real":
        return check(real(raw))
    if spec.kind == "int":
        if not re.fullmatch(r"[+-]?\d+", raw):
            raise bad(f"expected an integer, got {raw!r}")
        return check(int(raw))
    if spec.kind == "bool":
        if raw.lower() not in ("true", "false"):
            raise bad(f"expected true or false, got {raw!r}")
        return raw.lower() == "true"
    if spec.kind == "choice":
        if raw not in spec.choices:
            raise bad(f"expected one of {', '.join(spec.choices)}, got {raw!r}")
        return raw
    if spec.kind == "reals":
        items = [t.strip() for t in raw.split(",") if t.strip()]
        if not items:
            raise bad("expected a comma-separated list of reals")
        return tuple(check(real(t)) for t in items)
    # starts: "d a; d a"
    starts = []
    for chunk in (c.strip() for c in raw.split(";")):
        parts = chunk.replace(",", " ").split()
        if len(parts) != 2:
            raise bad(f"expected 'd a' pairs separated by ';', got {chunk!r}")
        starts.append((check(real(parts[0])), check(real(parts[1]))))
    return tuple(starts)


def _read_pairs(text: str) -> dict[str, tuple[object, int]]:
    values: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ValidationError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        spec = SCHEMA.get(_schema_key(key))
        if spec is None:
            near = difflib.get_close_matches(key, list(SCHEMA), n=1, cutoff=0.0)
            hint = f"; nearest known key is {near[0]!r}" if near else ""
            raise ValidationError(f"line {lineno}: unknown key {key!r}{hint}")
        if key in values:
            raise ValidationError(f"duplicate key {key!r} on lines {values[key][1]} and {lineno}")
        values[key] = (_convert(key, raw, spec, lineno), lineno)
    return values


def _amp(values, prefix, default: AmplificationSpec | None = None):
    base = default or AmplificationSpec()
    return AmplificationSpec(
        family=values.get(f"{prefix}.family", base.family),
        alpha=values.get(f"{prefix}.alpha", base.alpha),
        saturation=values.get(f"{prefix}.saturation", base.saturation),
    )


def _model(v) -> ModelParams:
    delta = ErosionSpec(
        family=v.get("model.delta.family", ErosionFamily.HYPERBOLIC),
        delta0=v.get("model.delta.delta0", 1.0),
        beta=v.get("model.delta.beta", 1.0),
        k=v.get("model.delta.k", 1.0),
        allow_k_above_one=v.get("model.delta.allow_k_above_one", False),
    )
    fields = {name: v[f"model.{name}"] for name in ("q0", "s", "V", "B", "c_d", "c_a", "F") if f"model.{name}" in v}
    return ModelParams(h=_amp(v, "model.h"), delta=delta, **fields)


def _profiles(v) -> tuple[DefenderProfile, ...]:
    grouped: dict[int, dict[str, object]] = {}
    for key, value in v.items():
        m = _PROFILE_KEY.match(key)
        if m:
            grouped.setdefault(int(m.group(1)), {})[m.group(2)] = value
    if not grouped:
        raise ValidationError("section 'targeting' needs at least one profile (targeting.0.B = ...)")
    indices = sorted(grouped)
    if indices != list(range(len(indices))):
        raise ValidationError(f"targeting profile indices must be 0..{len(indices) - 1} without gaps, got {indices}")
    profiles = []
    for i in indices:
        g = grouped[i]
        missing = [f for f in ("d", "B") if f not in g]
        if missing:
            raise ValidationError(f"targeting.{i}: missing {', '.join(f'targeting.{i}.{f}' for f in missing)}")
        profiles.append(DefenderProfile(
            d_k=g["d"], s_k=g.get("s", 1.0), gamma_k=g.get("gamma", 0.0),
            N_k=g.get("N", 1), B_k=g["B"], V_k=g.get("V", 1.0),
        ))
    return tuple(profiles)


def parse_scenario(text: str, subcommand: str | None = None) -> Scenario:
    """Parse and validate a scenario; with ``subcommand``, check required sections."""
    pairs = _read_pairs(text)
    v = {k: val for k, (val, _) in pairs.items()}
    sections = frozenset(k.split(".", 1)[0] for k in v if "." in k)
    if subcommand is not None:
        if subcommand not in SUBCOMMANDS:
            raise ValidationError(f"unknown subcommand {subcommand!r}; expected one of {', '.join(SUBCOMMANDS)}")
        for section in REQUIRED_SECTIONS[subcommand]:
            if section not in sections:
                raise ValidationError(f"subcommand {subcommand!r} requires section {section!r}")
    try:
        model = _model(v)
        surfaces = grid = None
        if "surfaces" in sections:
            surfaces = SurfaceConfig(
                N=v.get("surfaces.N", 1.0), rho=v.get("surfaces.rho", 1.0),
                gamma=v.get("surfaces.gamma", 0.0), s=v.get("surfaces.s", model.s),
            )
            grid = v.get("surfaces.N_grid")
            if grid is not None and any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValidationError("surfaces.N_grid must be strictly ascending")
        dynamics = None
        if "dynamics" in sections:
            dynamics = DynamicsConfig(
                eta=v.get("dynamics.eta", 0.15), max_steps=v.get("dynamics.max_steps", 50_000),
                tol=v.get("dynamics.tol", 1e-8), starts=v.get("dynamics.starts", ()),
                random_starts=v.get("dynamics.random_starts", 0),
                t_end=v.get("dynamics.t_end"), dt=v.get("dynamics.dt"),
            )
            if (dynamics.t_end is None) != (dynamics.dt is None):
                raise ValidationError("dynamics.t_end and dynamics.dt must be given together")
            if not dynamics.starts and dynamics.random_starts == 0:
                raise ValidationError("section 'dynamics' needs dynamics.starts or dynamics.random_starts > 0")
        deterrence = None
        if "deterrence" in sections:
            if "deterrence.d_fixed" not in v:
                raise ValidationError("section 'deterrence' requires deterrence.d_fixed")
            deterrence = DeterrenceScenario(
                base=model, d_fixed=v["deterrence.d_fixed"],
                h_simple=_amp(v, "deterrence.h_simple", model.h),
                h_complex=_amp(v, "deterrence.h_complex", model.h),
                N_a=v.get("deterrence.N_a", 4), gamma_a=v.get("deterrence.gamma_a", 1.0),
                rho=v.get("deterrence.rho", 1.0),
                simple_attack_diluted=v.get("deterrence.simple_attack_diluted", False),
                defender_mode=v.get("deterrence.defender_mode", DefenderMode.FIXED),
            )
        targeting = None
        if "targeting" in sections:
            mode_name = v.get("targeting.mode", "best_response")
            if mode_name == "fixed":
                if "targeting.a" not in v:
                    raise ValidationError("targeting.mode = fixed requires targeting.a")
                mode = FixedA(v["targeting.a"])
            else:
                mode = BEST_RESPONSE_PER_TARGET
            targeting = TargetingConfig(_profiles(v), mode, v.get("targeting.rho", 1.0))
        figures = FigureConfig(
            betas=v.get("figures.betas", DEFAULT_BETAS), points=v.get("figures.points", 101),
            a=v.get("figures.a", 1.0), d=v.get("figures.d", 1.0),
        )
        if len(figures.betas) != 3:
            raise ValidationError("figures.betas must list exactly three values (low, mid, high)")
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc
    return Scenario(
        model=model, surfaces=surfaces, surfaces_grid=grid,
        surfaces_point=(v.get("surfaces.a", 0.0), v.get("surfaces.d", 0.0)),
        point=(v.get("point.a", 0.0), v.get("point.d", 0.0)),
        dynamics=dynamics, deterrence=deterrence,
        deterrence_grid_points=v.get("deterrence.grid_points", 64),
        targeting=targeting, figures=figures, seed=v.get("seed", 0),
        sections=sections, text=text,
    )
