"""Control-parameter ramps l(t), their derivatives, and the advanced-time map.

The same ramp shapes drive both confinement models: the wall position L(t) of
the box and the oscillator length scale R(t) = sqrt(1/omega(t)).  Both smooth
ramps start and end at rest (l_dot = 0 at t = 0 and t = t_ff), which is what
kills the boundary term when the drive part of the energy cost is integrated
by parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

POLYNOMIAL = "polynomial"
TRIGONOMETRIC = "trigonometric"
ADIABATIC_LINEAR = "linear"

_KINDS = (POLYNOMIAL, TRIGONOMETRIC, ADIABATIC_LINEAR)

# dense positivity scan at construction; l(t) <= 0 is unphysical for both models
_POSITIVITY_SAMPLES = 10_000


@dataclass(frozen=True)
class ControlTrajectory:
    """A ramp l(t) on [0, t_ff] with exact analytic derivatives.

    kind:
      polynomial     l = l0 + vbar*(t^2/2T - t^3/3T^2)
      trigonometric  l = l0 + vbar*(t - (T/2pi) sin(2 pi t/T))
      linear         l = l0 + epsilon*t   (quasi-static reference ramp)
    """

    kind: str
    l0: float
    t_ff: float
    vbar: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        if self.l0 <= 0:
            raise ValueError(f"l0 must be positive, got {self.l0}")
        if self.t_ff <= 0:
            raise ValueError(f"t_ff must be positive, got {self.t_ff}")
        ts = np.linspace(0.0, self.t_ff, _POSITIVITY_SAMPLES)
        if np.min(self._value(ts)) <= 0.0:
            raise ValueError("trajectory reaches l <= 0 inside [0, t_ff]")

    @classmethod
    def polynomial(cls, l0: float, vbar: float, t_ff: float) -> "ControlTrajectory":
        return cls(POLYNOMIAL, l0, t_ff, vbar=vbar)

    @classmethod
    def trigonometric(cls, l0: float, vbar: float, t_ff: float) -> "ControlTrajectory":
        return cls(TRIGONOMETRIC, l0, t_ff, vbar=vbar)

    @classmethod
    def adiabatic_linear(cls, l0: float, epsilon: float, t_ff: float) -> "ControlTrajectory":
        return cls(ADIABATIC_LINEAR, l0, t_ff, epsilon=epsilon)

    def _check_domain(self, t):
        t = np.asarray(t, dtype=float)
        slack = 1e-9 * self.t_ff
        if np.any(t < -slack) or np.any(t > self.t_ff + slack):
            raise ValueError(f"t outside [0, {self.t_ff}]")
        return np.clip(t, 0.0, self.t_ff)

    def _value(self, t):
        if self.kind == POLYNOMIAL:
            return self.l0 + self.vbar * (t * t / (2.0 * self.t_ff) - t**3 / (3.0 * self.t_ff**2))
        if self.kind == TRIGONOMETRIC:
            return self.l0 + self.vbar * (
                t - (self.t_ff / (2.0 * np.pi)) * np.sin(2.0 * np.pi * t / self.t_ff)
            )
        return self.l0 + self.epsilon * t

    def value(self, t):
        """l(t); accepts scalars or arrays, errors outside [0, t_ff]."""
        out = self._value(self._check_domain(t))
        return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out

    def velocity(self, t):
        """Exact analytic dl/dt."""
        tt = self._check_domain(t)
        if self.kind == POLYNOMIAL:
            out = self.vbar * (tt / self.t_ff - tt * tt / self.t_ff**2)
        elif self.kind == TRIGONOMETRIC:
            out = self.vbar * (1.0 - np.cos(2.0 * np.pi * tt / self.t_ff))
        else:
            out = np.full_like(tt, self.epsilon)
        return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out

    def acceleration(self, t):
        """Exact analytic d^2 l/dt^2."""
        tt = self._check_domain(t)
        if self.kind == POLYNOMIAL:
            out = self.vbar * (1.0 / self.t_ff - 2.0 * tt / self.t_ff**2)
        elif self.kind == TRIGONOMETRIC:
            out = self.vbar * (2.0 * np.pi / self.t_ff) * np.sin(2.0 * np.pi * tt / self.t_ff)
        else:
            out = np.zeros_like(tt)
        return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def vbar_for_target(kind: str, l0: float, l_final: float, t_ff: float) -> float:
    """Velocity scale that makes the ramp reach l_final at t_ff exactly.

    polynomial:     l(T) = l0 + vbar*T/6  ->  vbar = 6 (l_final - l0)/T
    trigonometric:  l(T) = l0 + vbar*T    ->  vbar = (l_final - l0)/T
    """
    if l_final <= 0:
        raise ValueError("l_final must be positive")
    if kind == POLYNOMIAL:
        return 6.0 * (l_final - l0) / t_ff
    if kind == TRIGONOMETRIC:
        return (l_final - l0) / t_ff
    if kind == ADIABATIC_LINEAR:
        raise ValueError("linear ramps are parameterized by epsilon, not vbar")
    raise ValueError(f"unknown trajectory kind {kind!r}")


def advanced_time(alpha: Callable[[float], float], t: float, quadrature_tol: float = 1e-10) -> float:
    """Lambda(t) = integral of the magnification factor alpha from 0 to t.

    alpha must be non-negative on [0, t] (checked on a dense sample); the map
    then satisfies Lambda(0) = 0 and is monotone non-decreasing.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0.0:
        return 0.0
    sample = np.array([alpha(ts) for ts in np.linspace(0.0, t, 257)])
    if np.any(sample < 0.0):
        raise ValueError("alpha must be non-negative on [0, t]")
    val, abserr = quad(alpha, 0.0, t, epsabs=quadrature_tol, epsrel=quadrature_tol, limit=200)
    return float(val)


@dataclass(frozen=True)
class AdvancedTime:
    """Magnification alpha(t) with its cumulative map Lambda and velocity eps*alpha."""

    alpha: Callable[[float], float]
    epsilon: float = 1.0
    quadrature_tol: float = 1e-10

    def lam(self, t: float) -> float:
        return advanced_time(self.alpha, t, self.quadrature_tol)

    def v(self, t: float) -> float:
        return self.epsilon * float(self.alpha(t))
