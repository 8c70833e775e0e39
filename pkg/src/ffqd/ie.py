"""Inverse-engineering comparison protocol for the oscillator.

A scaling function b(t) is prescribed as the unique quintic with
b(0) = 1, b(T) = sqrt(omega0/omegaF) and vanishing first and second
derivatives at both ends; the frequency ramp is then read off the auxiliary
(Ermakov) equation, omega^2(t) = omega0^2/b^4 - b_ddot/b, which makes the
Ermakov residual zero by construction and pins omega(0) = omega0,
omega(T) = omegaF exactly.  omega^2 may dip negative for aggressive ramps
(transiently inverted oscillator); only b > 0 is enforced.

Note the auxiliary equation is implemented with the dimensionally consistent
right-hand side omega0^2/b^3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

_POSITIVITY_SAMPLES = 10_000


@dataclass(frozen=True)
class ErmakovSolution:
    """Scaling function b(t) on [0, t_ff] with its derivatives and frequency ramp."""

    omega0: float
    omegaF: float
    t_ff: float

    def __post_init__(self):
        if self.omega0 <= 0 or self.omegaF <= 0:
            raise ValueError("frequencies must be positive")
        if self.t_ff <= 0:
            raise ValueError("t_ff must be positive")
        ts = np.linspace(0.0, self.t_ff, _POSITIVITY_SAMPLES)
        if np.min(self.b(ts)) <= 0.0:
            raise ValueError(
                "scaling function crosses zero; reduce the ramp ratio or increase t_ff"
            )

    @property
    def b_final(self) -> float:
        return float(np.sqrt(self.omega0 / self.omegaF))

    def _s(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-9 * self.t_ff) or np.any(t > self.t_ff * (1.0 + 1e-9)):
            raise ValueError(f"t outside [0, {self.t_ff}]")
        return np.clip(t / self.t_ff, 0.0, 1.0)

    def b(self, t):
        s = self._s(t)
        w = s**3 * (10.0 - 15.0 * s + 6.0 * s * s)
        out = 1.0 + (self.b_final - 1.0) * w
        return float(out) if np.ndim(t) == 0 else out

    def b_dot(self, t):
        s = self._s(t)
        wd = 30.0 * s * s * (1.0 - s) ** 2
        out = (self.b_final - 1.0) * wd / self.t_ff
        return float(out) if np.ndim(t) == 0 else out

    def b_ddot(self, t):
        s = self._s(t)
        wdd = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
        out = (self.b_final - 1.0) * wdd / self.t_ff**2
        return float(out) if np.ndim(t) == 0 else out

    def omega_sq(self, t):
        """Engineered ramp omega^2(t) = omega0^2/b^4 - b_ddot/b."""
        b = self.b(t)
        out = self.omega0**2 / np.asarray(b) ** 4 - np.asarray(self.b_ddot(t)) / np.asarray(b)
        return float(out) if np.ndim(t) == 0 else out


def design_b(omega0: float, omegaF: float, t_ff: float) -> ErmakovSolution:
    """Build the quintic scaling function for an omega0 -> omegaF ramp."""
    return ErmakovSolution(omega0=omega0, omegaF=omegaF, t_ff=t_ff)


def ermakov_residual(sol: ErmakovSolution, t) -> float:
    """b_ddot + omega^2 b - omega0^2/b^3; zero by construction for design_b output."""
    b = np.asarray(sol.b(t), dtype=float)
    out = np.asarray(sol.b_ddot(t)) + np.asarray(sol.omega_sq(t)) * b - sol.omega0**2 / b**3
    return float(out) if np.ndim(t) == 0 else out


def h_ie_expectation(sol: ErmakovSolution, t, beta: float) -> float:
    """Thermal average of the inverse-engineering Hamiltonian.

    (1/2) [b_dot^2/(2 omega0) + omega^2 b^2/(2 omega0) + omega0/(2 b^2)]
    * coth(beta omega0 / 2), evaluated as printed in natural units.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    b = np.asarray(sol.b(t), dtype=float)
    bd = np.asarray(sol.b_dot(t), dtype=float)
    w2 = np.asarray(sol.omega_sq(t), dtype=float)
    w0 = sol.omega0
    bracket = bd * bd / (2.0 * w0) + w2 * b * b / (2.0 * w0) + w0 / (2.0 * b * b)
    out = 0.5 * bracket / np.tanh(0.5 * beta * w0)
    return float(out) if np.ndim(t) == 0 else out


def cost_ie(sol: ErmakovSolution, beta: float, rel_tol: float = 1e-10) -> float:
    """Time-averaged <H_IE> over the ramp, by adaptive quadrature."""
    res = quad(
        lambda s: h_ie_expectation(sol, s, beta),
        0.0,
        sol.t_ff,
        epsabs=1e-300,
        epsrel=rel_tol,
        limit=200,
        full_output=1,
    )
    if len(res) > 3:
        raise RuntimeError(f"IE cost quadrature did not converge: {res[3]}")
    return float(res[0]) / sol.t_ff


def write_profile_csv(sol: ErmakovSolution, beta: float, path, n_samples: int = 201) -> None:
    """Dump (t, b, b_dot, omega^2, <H_IE>) rows for plotting or inspection."""
    ts = np.linspace(0.0, sol.t_ff, n_samples)
    with open(path, "w", newline="") as fh:
        fh.write(f"# omega0={sol.omega0:.14e}\n# omegaF={sol.omegaF:.14e}\n")
        fh.write(f"# t_ff={sol.t_ff:.14e}\n# beta={beta:.14e}\n")
        fh.write("t,b,b_dot,omega_sq,h_ie\n")
        for t in ts:
            fh.write(
                f"{t:.14e},{sol.b(float(t)):.14e},{sol.b_dot(float(t)):.14e},"
                f"{sol.omega_sq(float(t)):.14e},{h_ie_expectation(sol, float(t), beta):.14e}\n"
            )
