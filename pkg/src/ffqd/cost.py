"""Energy cost of acceleration: thermal traces, closed forms, Frobenius norm.

Three independent routes to the drive part of the time-averaged cost are kept
side by side and must agree:

  (a) direct time quadrature of the drive term of the internal energy,
  (b) the integration-by-parts identity
          (1/T) int -K (L L_dd - L_dot^2) dt = (2K/T) int L_dot^2 dt,
      valid because both smooth ramps have L_dot = 0 at the endpoints,
  (c) the resulting constants: int L_dot^2 dt = vbar^2 T/30 (polynomial) and
      (3/2) vbar^2 T (trigonometric).

The literature's printed closed-form coefficients are treated as claims under
test: CostReport carries both the quadrature value (primary) and the printed
form, and records their ratio instead of hiding a disagreement.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import expit

from .core import NATURAL, Grid, UnitSystem
from .fastforward import v_ff_box, v_ff_ho
from .spectra import BoxModel, HarmonicModel
from .trajectory import POLYNOMIAL, TRIGONOMETRIC, ControlTrajectory

_F_TOL = 1e-12  # occupation below which a level is outside the truncated trace


@dataclass(frozen=True)
class ThermalEnsemble:
    """Fermi-Dirac ensemble with fixed particle number.

    beta may be math.inf for the zero-temperature limit.  mu is optional: the
    thermal-trace routines re-solve it from n_particles at each evaluation
    time, so only direct fermi_occupation calls need it set.
    """

    beta: float
    n_particles: int
    mu: float | None = None
    units: UnitSystem = NATURAL

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive (use math.inf for T = 0)")
        if self.n_particles < 0:
            raise ValueError("n_particles must be >= 0")

    @property
    def temperature(self) -> float:
        return 0.0 if math.isinf(self.beta) else 1.0 / (self.units.kB * self.beta)

    @classmethod
    def from_temperature(cls, temperature: float, n_particles: int, units: UnitSystem = NATURAL):
        beta = math.inf if temperature == 0.0 else 1.0 / (units.kB * temperature)
        return cls(beta=beta, n_particles=n_particles, units=units)


def _fermi(e, beta: float, mu: float):
    e = np.asarray(e, dtype=float)
    if math.isinf(beta):
        out = np.where(e < mu, 1.0, np.where(e > mu, 0.0, 0.5))
    else:
        out = expit(-beta * (e - mu))
    return float(out) if out.ndim == 0 else out


def fermi_occupation(e_n, ens: ThermalEnsemble):
    """Fermi-Dirac factor 1/(exp(beta (E - mu)) + 1), stable for large |beta (E - mu)|."""
    if ens.mu is None:
        raise ValueError("ensemble has no chemical potential set; use solve_mu first")
    return _fermi(e_n, ens.beta, ens.mu)


def solve_mu(energies, beta: float, n_particles: int) -> float:
    """Chemical potential with sum_n f_n = n_particles, by bisection.

    The occupation sum is monotone increasing in mu, so the root is unique at
    finite beta; at beta = inf any point of the zero-temperature plateau is
    returned.  Residual tolerance 1e-10.
    """
    e = np.sort(np.asarray(energies, dtype=float))
    if not 0 < n_particles < e.size:
        raise ValueError(f"need 0 < n_particles < {e.size}, got {n_particles}")
    if math.isinf(beta):
        return 0.5 * (e[n_particles - 1] + e[n_particles])

    pad = 50.0 / beta + 1.0
    lo, hi = e[0] - pad, e[-1] + pad
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = float(np.sum(_fermi(e, beta, mid))) - n_particles
        if abs(g) < 1e-10:
            return mid
        if g > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15 * (1.0 + abs(mid)):
            break
    g = float(np.sum(_fermi(e, beta, 0.5 * (lo + hi)))) - n_particles
    if abs(g) > 1e-10:
        raise RuntimeError(f"mu bisection stalled with residual {g:.3e}")
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# closed-form internal energies and their printed constants

def internal_energy_ho(traj: ControlTrajectory, t: float, a_coeff: float, units: UnitSystem = NATURAL) -> float:
    """Oscillator internal energy A (hbar^2/4mL^2 - (m/8) L L_dd + (m/8) L_dot^2)."""
    L = traj.value(t)
    Ld = traj.velocity(t)
    Ldd = traj.acceleration(t)
    m, hbar = units.mass, units.hbar
    return a_coeff * (hbar**2 / (4.0 * m * L * L) - (m / 8.0) * L * Ldd + (m / 8.0) * Ld * Ld)


def coefficient_A(ens: ThermalEnsemble, l0: float) -> float:
    """Printed thermal constant N^2 [1 + (4 pi^2/3) l0^2 (m k T/hbar^2)^2 (l0/N)^2].

    Truncated exactly at the printed term; a low-temperature expansion whose
    validity requires k T well below the level spacing times N.
    """
    u = ens.units
    N = ens.n_particles
    kT = u.kB * ens.temperature
    corr = (4.0 * np.pi**2 / 3.0) * l0**2 * (u.mass * kT / u.hbar**2) ** 2 * (l0 / N) ** 2
    return N * N * (1.0 + corr)


def _thermal_l4(ens: ThermalEnsemble, L: float) -> float:
    u = ens.units
    kT = u.kB * ens.temperature
    return (u.mass * kT / u.hbar**2) ** 2 * (L / ens.n_particles) ** 4


def coefficients_B(ens: ThermalEnsemble, L: float) -> tuple[float, float]:
    """Printed box constants (B1, B2), each truncated at its printed term."""
    u = ens.units
    N = ens.n_particles
    b1 = (np.pi**2 * u.hbar**2 * N**3 / (24.0 * u.mass)) * (1.0 + (24.0 / np.pi**2) * _thermal_l4(ens, L))
    b2 = (u.mass * N / 6.0) * (1.0 + (16.0 / (3.0 * np.pi**2)) * _thermal_l4(ens, L))
    return float(b1), float(b2)


def box_drive_prefactor(ens: ThermalEnsemble, L: float) -> float:
    """Drive prefactor of the box internal energy, with its full two-layer bracket.

    This differs from the printed B2 (whose bracket drops the 6/(pi N)^2
    layer); the internal energy is evaluated with the bracket as printed in
    its own equation, and this constant is what the cost oracle identities
    use.
    """
    u = ens.units
    N = ens.n_particles
    inner = 1.0 + (16.0 / (3.0 * np.pi**2)) * _thermal_l4(ens, L)
    return float((u.mass * N / 6.0) * (1.0 + (6.0 / (np.pi**2 * N * N)) * inner))


def internal_energy_box_parts(traj: ControlTrajectory, t: float, ens: ThermalEnsemble) -> tuple[float, float]:
    """(confinement, drive) parts of the printed box internal energy."""
    L = traj.value(t)
    Ld = traj.velocity(t)
    Ldd = traj.acceleration(t)
    b1, _ = coefficients_B(ens, L)
    conf = b1 / (L * L)
    drive = -box_drive_prefactor(ens, L) * (L * Ldd - Ld * Ld)
    return float(conf), float(drive)


def internal_energy_box(traj: ControlTrajectory, t: float, ens: ThermalEnsemble) -> float:
    """Printed large-N expansion of the box internal energy, both brackets as printed."""
    conf, drive = internal_energy_box_parts(traj, t, ens)
    return conf + drive


# ---------------------------------------------------------------------------
# numeric thermal trace (the oracle the closed forms are judged against)

Model = Union[HarmonicModel, BoxModel]


def _lap2_rows(arr: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(arr)
    inv = 1.0 / (dx * dx)
    out[:, 1:-1] = (arr[:, 2:] - 2.0 * arr[:, 1:-1] + arr[:, :-2]) * inv
    out[:, 0] = (2.0 * arr[:, 0] - 5.0 * arr[:, 1] + 4.0 * arr[:, 2] - arr[:, 3]) * inv
    out[:, -1] = (2.0 * arr[:, -1] - 5.0 * arr[:, -2] + 4.0 * arr[:, -3] - arr[:, -4]) * inv
    return out


def _grid_for(model: Model, traj: ControlTrajectory, l: float, n_max: int, n_points: int) -> Grid:
    if isinstance(model, BoxModel):
        return model.default_grid(l, n_points)
    r_max = float(np.max(traj.value(np.linspace(0.0, traj.t_ff, 257))))
    return model.default_grid(r_max, n_points, n_max=n_max)


def _occupied_levels(model: Model, ens: ThermalEnsemble, l: float, cutoff: int | None, max_levels: int):
    """Quantum numbers, energies, occupations, and the trace cutoff at frozen l."""
    if cutoff is not None:
        n_max = cutoff
        ns = model.level_numbers(n_max)
        e = np.array([model.energy(int(n), l) for n in ns])
        mu = solve_mu(e, ens.beta, ens.n_particles)
        f = _fermi(e, ens.beta, mu)
        if f[-1] >= _F_TOL:
            raise ValueError(
                f"cutoff {cutoff} too small: top occupation {f[-1]:.3e} >= {_F_TOL:g}"
            )
        return ns, e, f
    n_max = max(4 * ens.n_particles + 16, 64)
    while True:
        ns = model.level_numbers(n_max)
        e = np.array([model.energy(int(n), l) for n in ns])
        mu = solve_mu(e, ens.beta, ens.n_particles)
        f = _fermi(e, ens.beta, mu)
        if f[-1] < _F_TOL:
            keep = max(int(np.max(np.nonzero(f >= _F_TOL)[0], initial=0)) + 2, ens.n_particles + 1)
            keep = min(keep, f.size)
            return ns[:keep], e[:keep], f[:keep]
        if n_max >= max_levels:
            raise ValueError(f"no cutoff below {max_levels} reaches occupation < {_F_TOL:g}")
        n_max *= 2


def internal_energy_numeric(
    model: Model,
    traj: ControlTrajectory,
    t: float,
    ens: ThermalEnsemble,
    cutoff: int | None = None,
    n_points: int = 2048,
    max_levels: int = 4096,
) -> float:
    """Truncated thermal trace sum_n f_n <psi_n| H_FF |psi_n> on a grid.

    The chemical potential is re-solved from the fixed particle number at the
    instantaneous spectrum; each accelerated state carries the gauge phase
    exp(i m l_dot x^2 / 2 hbar l), and the matrix element is taken with the
    second-order finite-difference kinetic operator plus V0 + V_FF.
    """
    if ens.n_particles == 0:
        return 0.0
    u = model.units
    l = traj.value(t)
    ldot = traj.velocity(t)
    ns, energies, f = _occupied_levels(model, ens, l, cutoff, max_levels)
    n_top = int(ns[-1])
    grid = _grid_for(model, traj, l, n_top, n_points)
    x = grid.points
    amps = model.amplitudes(n_top, l, grid)[: ns.size]

    a = u.mass * ldot / (2.0 * u.hbar * l)
    psi = amps * np.exp(1j * a * x * x)[None, :]
    kinetic = -(u.hbar**2 / (2.0 * u.mass)) * _lap2_rows(psi, grid.dx)
    if isinstance(model, BoxModel):
        v = model.v0(x, l) + v_ff_box(x, t, traj, u)
    else:
        v = model.v0(x, l) + v_ff_ho(x, t, traj, u)
    integrand = (np.conjugate(psi) * kinetic).real + v[None, :] * (amps * amps)
    h_diag = np.trapezoid(integrand, dx=grid.dx, axis=1)
    return float(np.dot(f, h_diag))


# ---------------------------------------------------------------------------
# time-averaged costs

def cost_ff(u_of_t: Callable[[float], float], t_ff: float, rel_tol: float = 1e-10) -> float:
    """Time average (1/T) int_0^T u(t) dt by adaptive quadrature."""
    res = quad(u_of_t, 0.0, t_ff, epsabs=1e-300, epsrel=rel_tol, limit=200, full_output=1)
    if len(res) > 3:
        raise RuntimeError(f"time quadrature did not converge: {res[3]}")
    return float(res[0]) / t_ff


_DRIVE_SHAPE = {POLYNOMIAL: 1.0 / 15.0, TRIGONOMETRIC: 3.0}
_PUBLISHED_DRIVE_SHAPE = {POLYNOMIAL: 1.0 / 90.0, TRIGONOMETRIC: 0.5}


FrobeniusCost = namedtuple("FrobeniusCost", ["value", "cutoff"])


@dataclass(frozen=True)
class CostReport:
    """Cost of one ramp: quadrature value (primary), closed forms, constants.

    quadrature_value is the artifact's own number.  closed_form_value uses the
    integration-by-parts drive constant and must agree with the quadrature at
    the declared tolerance (exact at zero temperature).  published_value is the
    printed closed form evaluated verbatim; published_ratio compares the
    quadrature against it, recording any disagreement rather than hiding it.
    """

    c_ff: float
    quadrature_value: float
    closed_form_value: float
    published_value: float
    published_ratio: float
    constants: dict
    u_samples: tuple
    c_frobenius: float | None = None
    frobenius_cutoff: int | None = None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            for key in ("c_ff", "quadrature_value", "closed_form_value", "published_value", "published_ratio"):
                fh.write(f"# {key}={getattr(self, key):.14e}\n")
            for key, val in sorted(self.constants.items()):
                fh.write(f"# constant_{key}={val:.14e}\n")
            if self.c_frobenius is not None:
                fh.write(f"# c_frobenius={self.c_frobenius:.14e}\n")
                fh.write(f"# frobenius_cutoff={self.frobenius_cutoff}\n")
            fh.write("t,u_bar\n")
            for t, ub in self.u_samples:
                fh.write(f"{t:.14e},{ub:.14e}\n")
            fh.write(f"summary,{self.c_ff:.14e}\n")


def _require_smooth_ramp(traj: ControlTrajectory) -> None:
    if traj.kind not in _DRIVE_SHAPE:
        raise ValueError("cost closed forms need a polynomial or trigonometric ramp")


def _mean_inverse_l2(traj: ControlTrajectory, rel_tol: float = 1e-12) -> float:
    val, _ = quad(lambda s: 1.0 / traj.value(s) ** 2, 0.0, traj.t_ff, epsabs=1e-300, epsrel=rel_tol, limit=200)
    return val / traj.t_ff


def cost_ff_box_closed(traj: ControlTrajectory, ens: ThermalEnsemble, n_samples: int = 33) -> CostReport:
    """Box cost: quadrature of the printed internal energy vs closed forms.

    At zero temperature the closed form (confinement average plus the
    integration-by-parts drive constant) reproduces the quadrature to
    quadrature accuracy; at finite temperature the drive prefactor picks up a
    wall-position dependence and the closed form freezes it at L(0).  The
    printed cost line, with its extra 1/24 on the confinement term and its
    factor-6-low drive coefficients, is evaluated verbatim into published_value.
    """
    _require_smooth_ramp(traj)
    T = traj.t_ff
    quadrature = cost_ff(lambda s: internal_energy_box(traj, s, ens), T)
    conf_avg = cost_ff(lambda s: internal_energy_box_parts(traj, s, ens)[0], T)
    l0 = traj.value(0.0)
    k_drive = box_drive_prefactor(ens, l0)
    closed = conf_avg + k_drive * traj.vbar**2 * _DRIVE_SHAPE[traj.kind]

    b1, b2 = coefficients_B(ens, l0)
    published = b1 * _mean_inverse_l2(traj) / 24.0 + b2 * traj.vbar**2 * _PUBLISHED_DRIVE_SHAPE[traj.kind]
    ts = np.linspace(0.0, T, n_samples)
    samples = tuple((float(t), internal_energy_box(traj, float(t), ens)) for t in ts)
    return CostReport(
        c_ff=quadrature,
        quadrature_value=quadrature,
        closed_form_value=closed,
        published_value=published,
        published_ratio=quadrature / published,
        constants={"B1": b1, "B2": b2, "B2_drive": k_drive},
        u_samples=samples,
    )


def cost_ff_ho_closed(
    traj: ControlTrajectory,
    a_coeff: float,
    units: UnitSystem = NATURAL,
    n_samples: int = 33,
) -> CostReport:
    """Oscillator cost: here the printed drive constants survive the oracle, so
    closed_form_value and published_value coincide."""
    _require_smooth_ramp(traj)
    T = traj.t_ff
    m, hbar = units.mass, units.hbar
    quadrature = cost_ff(lambda s: internal_energy_ho(traj, s, a_coeff, units), T)
    conf = a_coeff * hbar**2 / (4.0 * m) * _mean_inverse_l2(traj)
    drive_shape = 1.0 / 120.0 if traj.kind == POLYNOMIAL else 3.0 / 8.0
    closed = conf + m * a_coeff * traj.vbar**2 * drive_shape
    ts = np.linspace(0.0, T, n_samples)
    samples = tuple((float(t), internal_energy_ho(traj, float(t), a_coeff, units)) for t in ts)
    return CostReport(
        c_ff=quadrature,
        quadrature_value=quadrature,
        closed_form_value=closed,
        published_value=closed,
        published_ratio=quadrature / closed,
        constants={"A": a_coeff},
        u_samples=samples,
    )


def cost_ff_numeric(
    model: Model,
    traj: ControlTrajectory,
    ens: ThermalEnsemble,
    n_nodes: int = 64,
    n_points: int = 1024,
) -> float:
    """Time average of the numeric thermal trace: the protocol's primary cost.

    Fixed-order Gauss-Legendre in time rather than adaptive quadrature: the
    trace integrand is smooth but carries a ~1e-9 grid-quadrature noise floor
    that adaptive refinement would chase forever.
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    ts = 0.5 * traj.t_ff * (nodes + 1.0)
    vals = np.array(
        [internal_energy_numeric(model, traj, float(t), ens, n_points=n_points) for t in ts]
    )
    return float(np.dot(weights, vals) * 0.5)


def frobenius_cost(
    model: Model,
    traj: ControlTrajectory,
    ens_or_cutoff: Union[ThermalEnsemble, int],
    t_ff: float,
    n_points: int = 1024,
    rel_tol: float = 1e-8,
) -> FrobeniusCost:
    """Time-averaged Frobenius norm of H0 + V_FF in the instantaneous eigenbasis.

    The untruncated norm diverges for quadratic drives, so a basis cutoff is
    mandatory (>= 2) and is reported with the value.  Passing an ensemble
    derives the cutoff from its occupation tail at the widest wall position.
    """
    u = model.units
    if isinstance(ens_or_cutoff, ThermalEnsemble):
        ls = traj.value(np.linspace(0.0, t_ff, 17))
        l_widest = float(np.max(ls))
        ns, _, _ = _occupied_levels(model, ens_or_cutoff, l_widest, None, 4096)
        m_cut = max(int(ns[-1]), 2)
    else:
        m_cut = int(ens_or_cutoff)
    if m_cut < 2:
        raise ValueError("Frobenius cutoff must be >= 2")

    def h_norm(t: float) -> float:
        l = traj.value(t)
        grid = _grid_for(model, traj, l, m_cut, n_points)
        x = grid.points
        amps = model.amplitudes(m_cut, l, grid)
        ns = model.level_numbers(m_cut)
        e = np.array([model.energy(int(n), l) for n in ns])
        if isinstance(model, BoxModel):
            vff = v_ff_box(x, t, traj, u)
        else:
            vff = v_ff_ho(x, t, traj, u)
        w = np.full(x.size, grid.dx)
        w[0] = w[-1] = 0.5 * grid.dx
        mat = (amps * w[None, :]) @ (vff[None, :] * amps).T
        mat[np.diag_indices_from(mat)] += e
        return float(np.sqrt(np.sum(mat * mat)))

    res = quad(h_norm, 0.0, t_ff, epsabs=1e-300, epsrel=rel_tol, limit=200, full_output=1)
    if len(res) > 3:
        raise RuntimeError(f"Frobenius time quadrature did not converge: {res[3]}")
    return FrobeniusCost(value=float(res[0]) / t_ff, cutoff=m_cut)
