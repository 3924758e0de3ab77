"""Contest-form breach function, payoffs and the two attacker channels.

Breach probability on one surface::

    q(a, d, s) = q0 h(a) / Phi,    Phi = q0 h(a) + (1 - q0)(1 + delta(a) d s)

``h`` amplifies the attack unconditionally; ``delta`` is the defender's
effectiveness, eroded by attacker investment ``a``.  Both families carry
analytic first and second derivatives.

Family evaluators accept floats or numpy arrays (arrays are used for grid
scans).  Everything else in this module is scalar.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ComputationError, DomainError

PHI_FLOOR = 1e-300


def _xp(a):
    return np if isinstance(a, np.ndarray) else math


def _check_nonnegative(name, value):
    if isinstance(value, np.ndarray):
        if np.any(value < 0) or np.any(np.isnan(value)):
            raise DomainError(f"{name} must be >= 0")
    elif not value >= 0:
        raise DomainError(f"{name} must be >= 0, got {value!r}")


class AmplificationFamily(str, Enum):
    LOGARITHMIC = "logarithmic"
    SATURATING = "saturating"


class ErosionFamily(str, Enum):
    HYPERBOLIC = "hyperbolic"
    POWER_LAW = "powerlaw"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class AmplificationSpec:
    """Attack amplification ``h`` with ``h(0) = 1`` and ``h'(0) = alpha``."""

    family: AmplificationFamily = AmplificationFamily.LOGARITHMIC
    alpha: float = 0.5
    saturation: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", AmplificationFamily(self.family))
        if not self.alpha > 0 or not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be a positive finite real, got {self.alpha!r}")
        if not self.saturation > 0 or not math.isfinite(self.saturation):
            raise DomainError(f"saturation must be a positive finite real, got {self.saturation!r}")

    def value(self, a):
        if self.family is AmplificationFamily.LOGARITHMIC:
            return 1.0 + self.alpha * _xp(a).log1p(a)
        return 1.0 + self.alpha * a / (1.0 + self.saturation * a)

    def slope(self, a):
        if self.family is AmplificationFamily.LOGARITHMIC:
            return self.alpha / (1.0 + a)
        return self.alpha / (1.0 + self.saturation * a) ** 2

    def curvature(self, a):
        if self.family is AmplificationFamily.LOGARITHMIC:
            return -self.alpha / (1.0 + a) ** 2
        return -2.0 * self.alpha * self.saturation / (1.0 + self.saturation * a) ** 3


@dataclass(frozen=True)
class ErosionSpec:
    """Defender effectiveness ``delta`` with ``delta(0) = delta0``.

    PowerLaw exponents above 1 violate the non-accelerating erosion condition
    and are rejected unless ``allow_k_above_one`` is set.
    """

    family: ErosionFamily = ErosionFamily.HYPERBOLIC
    delta0: float = 1.0
    beta: float = 1.0
    k: float = 1.0
    allow_k_above_one: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", ErosionFamily(self.family))
        if not 0 < self.delta0 <= 1:
            raise DomainError(f"delta0 must lie in (0, 1], got {self.delta0!r}")
        if not self.beta > 0 or not math.isfinite(self.beta):
            raise DomainError(f"beta must be a positive finite real, got {self.beta!r}")
        if not self.k > 0 or not math.isfinite(self.k):
            raise DomainError(f"k must be positive, got {self.k!r}")
        if self.k > 1 and not self.allow_k_above_one:
            raise DomainError(f"k must lie in (0, 1] (set allow_k_above_one to override), got {self.k!r}")

    @property
    def uniqueness_guarantee(self) -> bool:
        """Whether delta * delta'' >= 2 delta'^2 holds for the whole family."""
        if self.family is ErosionFamily.HYPERBOLIC:
            return True
        if self.family is ErosionFamily.POWER_LAW:
            return self.k <= 1
        return False

    def value(self, a):
        if self.family is ErosionFamily.HYPERBOLIC:
            return self.delta0 / (1.0 + self.beta * a)
        if self.family is ErosionFamily.POWER_LAW:
            return self.delta0 * (1.0 + self.beta * a) ** (-self.k)
        return self.delta0 * _xp(a).exp(-self.beta * a)

    def slope(self, a):
        if self.family is ErosionFamily.HYPERBOLIC:
            return -self.beta * self.delta0 / (1.0 + self.beta * a) ** 2
        if self.family is ErosionFamily.POWER_LAW:
            return -self.k * self.beta * self.delta0 * (1.0 + self.beta * a) ** (-self.k - 1.0)
        return -self.beta * self.delta0 * _xp(a).exp(-self.beta * a)

    def curvature(self, a):
        if self.family is ErosionFamily.HYPERBOLIC:
            return 2.0 * self.beta**2 * self.delta0 / (1.0 + self.beta * a) ** 3
        if self.family is ErosionFamily.POWER_LAW:
            return (self.k * (self.k + 1.0) * self.beta**2 * self.delta0
                    * (1.0 + self.beta * a) ** (-self.k - 2.0))
        return self.beta**2 * self.delta0 * _xp(a).exp(-self.beta * a)


@dataclass(frozen=True)
class ModelParams:
    q0: float = 0.3
    h: AmplificationSpec = AmplificationSpec()
    delta: ErosionSpec = ErosionSpec()
    s: float = 1.0
    V: float = 10.0
    B: float = 10.0
    c_d: float = 1.0
    c_a: float = 1.0
    F: float = 0.0

    def __post_init__(self):
        if not 0 < self.q0 < 1:
            raise DomainError(f"q0 must lie in (0, 1), got {self.q0!r}")
        for name in ("s", "V", "B", "F"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be a nonnegative finite real, got {value!r}")
        for name in ("c_d", "c_a"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be a positive finite real, got {value!r}")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    @property
    def alpha(self) -> float:
        return self.h.alpha

    @property
    def delta0(self) -> float:
        return self.delta.delta0

    @property
    def d_max(self) -> float:
        """Upper bound on any defender best response, V / c_d."""
        return self.V / self.c_d

    @property
    def a_max(self) -> float:
        """Upper bound on any attacker best response, B / c_a."""
        return self.B / self.c_a


@dataclass(frozen=True)
class ChannelBreakdown:
    amplification_term: float
    erosion_term: float
    total: float


def eval_h(h: AmplificationSpec, a):
    _check_nonnegative("a", a)
    return h.value(a)


def eval_delta(delta: ErosionSpec, a):
    _check_nonnegative("a", a)
    return delta.value(a)


def contest_denominator(p: ModelParams, a, d, s_eff):
    _check_nonnegative("a", a)
    _check_nonnegative("d", d)
    _check_nonnegative("s_eff", s_eff)
    phi = p.q0 * p.h.value(a) + (1.0 - p.q0) * (1.0 + p.delta.value(a) * d * s_eff)
    if np.any(phi < PHI_FLOOR):
        raise ComputationError("contest denominator underflow; inputs are corrupted")
    return phi


def breach_probability(p: ModelParams, a, d, s_eff):
    """Per-surface breach probability; exactly ``q0`` at the status quo."""
    phi = contest_denominator(p, a, d, s_eff)
    if not isinstance(phi, np.ndarray) and a == 0 and d * s_eff == 0:
        return p.q0
    return p.q0 * p.h.value(a) / phi


def adversarial_discount(delta: ErosionSpec, a) -> float:
    """Fraction of defender effectiveness retained, ``delta(a)/delta0``.

    The discount itself is one minus this value.
    """
    _check_nonnegative("a", a)
    return delta.value(a) / delta.delta0


def adversarial_leverage(p: ModelParams, a) -> float:
    _check_nonnegative("a", a)
    return p.h.value(a) / p.delta.value(a)


def payoff_defender(p: ModelParams, a, d, s_eff) -> float:
    return -p.V * breach_probability(p, a, d, s_eff) - p.c_d * d


def payoff_attacker(p: ModelParams, a, d, s_eff) -> float:
    fixed = p.F if a > 0 else 0.0
    return p.B * breach_probability(p, a, d, s_eff) - p.c_a * a - fixed


def attacker_marginal_breakdown(p: ModelParams, a, d, s_eff) -> ChannelBreakdown:
    """Split dq/da into amplification and erosion channels."""
    phi = contest_denominator(p, a, d, s_eff)
    scale = p.q0 * (1.0 - p.q0) / phi**2
    dds = p.delta.value(a) * d * s_eff
    amplification = scale * p.h.slope(a) * (1.0 + dds)
    erosion = scale * p.h.value(a) * abs(p.delta.slope(a)) * d * s_eff
    return ChannelBreakdown(amplification, erosion, amplification + erosion)


def attacker_marginal(p: ModelParams, a, d, s_eff):
    """dq/da, array-friendly."""
    phi = contest_denominator(p, a, d, s_eff)
    h = p.h.value(a)
    dl = p.delta.value(a)
    bracket = p.h.slope(a) * (1.0 + dl * d * s_eff) - h * p.delta.slope(a) * d * s_eff
    return p.q0 * (1.0 - p.q0) * bracket / phi**2


def defender_marginal(p: ModelParams, a, d, s_eff):
    """-dq/dd, the defender's marginal reduction in breach probability."""
    phi = contest_denominator(p, a, d, s_eff)
    return p.q0 * (1.0 - p.q0) * p.h.value(a) * p.delta.value(a) * s_eff / phi**2
