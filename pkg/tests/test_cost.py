import math

import numpy as np
import pytest
from scipy.integrate import quad

from ffqd.cost import (
    ThermalEnsemble,
    box_drive_prefactor,
    coefficient_A,
    coefficients_B,
    cost_ff,
    cost_ff_box_closed,
    cost_ff_ho_closed,
    cost_ff_numeric,
    fermi_occupation,
    frobenius_cost,
    internal_energy_box,
    internal_energy_box_parts,
    internal_energy_ho,
    internal_energy_numeric,
    solve_mu,
)
from ffqd.core import Grid
from ffqd.spectra import BoxModel, HarmonicModel, box_energy
from ffqd.trajectory import POLYNOMIAL, TRIGONOMETRIC, ControlTrajectory

from helpers import box_ramp, ho_ramp

ZERO_T = ThermalEnsemble(beta=math.inf, n_particles=1)


def static_trajectory(l0=1.0, t_ff=1.0):
    return ControlTrajectory.polynomial(l0, 0.0, t_ff)


# ---------------------------------------------------------------------------
# occupations


def test_fermi_occupation_values():
    ens = ThermalEnsemble(beta=2.0, n_particles=1, mu=1.0)
    assert fermi_occupation(1.0, ens) == pytest.approx(0.5)
    # beta (E - mu) = ln 3  ->  f = 1/4
    ens2 = ThermalEnsemble(beta=1.0, n_particles=1, mu=0.0)
    assert fermi_occupation(math.log(3.0), ens2) == pytest.approx(0.25, rel=1e-12)
    ens3 = ThermalEnsemble(beta=1e4, n_particles=1, mu=0.0)
    assert fermi_occupation(-1.0, ens3) == pytest.approx(1.0, abs=1e-12)


def test_fermi_occupation_needs_mu():
    with pytest.raises(ValueError):
        fermi_occupation(1.0, ThermalEnsemble(beta=1.0, n_particles=1))


def test_solve_mu_zero_t_filling():
    e = [box_energy(n, 1.0) for n in range(1, 13)]
    mu = solve_mu(e, 1e3, 3)
    assert e[2] < mu < e[3]
    mu0 = solve_mu(e, math.inf, 3)
    assert e[2] < mu0 < e[3]


def test_solve_mu_symmetric_levels():
    assert solve_mu([-0.7, 0.7], 2.5, 1) == pytest.approx(0.0, abs=1e-9)


def test_solve_mu_residual_tolerance():
    rng = np.random.default_rng(3)
    e = np.sort(rng.uniform(0.0, 10.0, size=40))
    for beta in (0.3, 2.0, 50.0):
        mu = solve_mu(e, beta, 7)
        f = 1.0 / (np.exp(np.clip(beta * (e - mu), -700, 700)) + 1.0)
        assert abs(f.sum() - 7.0) < 1e-10


def test_solve_mu_range_check():
    with pytest.raises(ValueError):
        solve_mu([1.0, 2.0], 1.0, 2)


def test_ensemble_validation_and_temperature():
    with pytest.raises(ValueError):
        ThermalEnsemble(beta=0.0, n_particles=1)
    assert ThermalEnsemble.from_temperature(0.0, 1).beta == math.inf
    assert ThermalEnsemble.from_temperature(2.0, 1).beta == pytest.approx(0.5)
    assert ZERO_T.temperature == 0.0


# ---------------------------------------------------------------------------
# printed constants and internal energies


def test_coefficient_a_printed_truncation():
    assert coefficient_A(ZERO_T, 1.0) == pytest.approx(1.0)
    ens = ThermalEnsemble(beta=math.inf, n_particles=5)
    assert coefficient_A(ens, 1.0) == pytest.approx(25.0)
    # the printed correction is positive, so A grows with temperature
    a_cold = coefficient_A(ThermalEnsemble.from_temperature(0.1, 2), 1.0)
    a_warm = coefficient_A(ThermalEnsemble.from_temperature(0.2, 2), 1.0)
    assert a_warm > a_cold > 4.0


def test_coefficients_b_zero_temperature():
    ens = ThermalEnsemble(beta=math.inf, n_particles=3)
    b1, b2 = coefficients_B(ens, 1.0)
    assert b1 == pytest.approx(np.pi**2 * 27.0 / 24.0, rel=1e-12)
    assert b2 == pytest.approx(0.5, rel=1e-12)


def test_internal_energy_ho_static():
    assert internal_energy_ho(static_trajectory(), 0.5, 1.0) == pytest.approx(0.25)


def test_internal_energy_ho_endpoint_kinetic_term_vanishes():
    traj = ho_ramp(POLYNOMIAL)
    a = 2.0
    # at t = 0: L_dot = 0, so only confinement + L_ddot survive
    L0, Ldd = traj.value(0.0), traj.acceleration(0.0)
    expected = a * (1.0 / (4.0 * L0 * L0) - Ldd * L0 / 8.0)
    assert internal_energy_ho(traj, 0.0, a) == pytest.approx(expected, rel=1e-12)


def test_internal_energy_box_static_printed_value():
    # N = 1, T = 0, L = 1, static wall: the printed expansion gives pi^2/24,
    # a large-N density-of-states form (the exact n=1 level is pi^2/2)
    u = internal_energy_box(static_trajectory(), 0.3, ZERO_T)
    assert u == pytest.approx(np.pi**2 / 24.0, rel=1e-12)


def test_internal_energy_box_endpoint_reduction():
    traj = box_ramp(POLYNOMIAL)
    ens = ThermalEnsemble(beta=math.inf, n_particles=2)
    conf, drive = internal_energy_box_parts(traj, 0.0, ens)
    k = box_drive_prefactor(ens, traj.value(0.0))
    assert drive == pytest.approx(-k * traj.value(0.0) * traj.acceleration(0.0), rel=1e-12)


# ---------------------------------------------------------------------------
# numeric thermal trace


def test_trace_zero_temperature_single_level_at_rest():
    # trigonometric ramp has l_dot(0) = l_ddot(0) = 0, so the t = 0 trace is
    # the static ground level; 4096 points keep the FD error under 1e-6
    traj = box_ramp(TRIGONOMETRIC)
    u0 = internal_energy_numeric(BoxModel(), traj, 0.0, ZERO_T, n_points=4096)
    assert u0 == pytest.approx(np.pi**2 / 2.0, abs=1e-6)


def test_trace_empty_ensemble():
    ens = ThermalEnsemble(beta=1.0, n_particles=0)
    assert internal_energy_numeric(BoxModel(), box_ramp(), 0.5, ens) == 0.0


def test_trace_cutoff_too_small():
    ens = ThermalEnsemble(beta=1.0, n_particles=1)
    with pytest.raises(ValueError):
        internal_energy_numeric(BoxModel(), box_ramp(), 0.0, ens, cutoff=2)


def test_trace_endpoints_match_static_thermal_energy():
    # trig ramp endpoints are at rest: the trace equals the static thermal
    # energy of the instantaneous wall position
    traj = box_ramp(TRIGONOMETRIC)
    ens = ThermalEnsemble(beta=2.0, n_particles=2)
    for t, L in ((0.0, 1.0), (1.0, 10.0)):
        u = internal_energy_numeric(BoxModel(), traj, t, ens, n_points=4096)
        static = internal_energy_numeric(
            BoxModel(), ControlTrajectory.polynomial(L, 0.0, 1.0), 0.5, ens, n_points=4096
        )
        assert u == pytest.approx(static, abs=1e-6)


def test_trace_vs_printed_ho_form_is_factor_two_at_n1():
    # spinless trace of a single zero-temperature fermion against the printed
    # A-form with A(N=1, T=0) = 1: the printed constants correspond to doubly
    # occupied levels, so the ratio is exactly 2 (see also the box ratios in
    # the acceptance module)
    traj = ho_ramp(POLYNOMIAL)
    for t in (0.0, 0.3, 0.7):
        numeric = internal_energy_numeric(HarmonicModel(), traj, t, ZERO_T, n_points=2048)
        closed = internal_energy_ho(traj, t, 1.0)
        assert numeric / closed == pytest.approx(2.0, abs=2e-4)


# ---------------------------------------------------------------------------
# time-averaged costs


def test_cost_ff_constant():
    assert cost_ff(lambda t: 3.25, 2.0) == pytest.approx(3.25, rel=1e-12)


def test_cost_ff_ho_closed_form_identity():
    # quadrature of the full internal energy equals the confinement average
    # plus the drive constants vbar^2/120 and 3 vbar^2/8
    a = 1.7
    for kind, shape in ((POLYNOMIAL, 1.0 / 120.0), (TRIGONOMETRIC, 3.0 / 8.0)):
        traj = ho_ramp(kind)
        total = cost_ff(lambda s: internal_energy_ho(traj, s, a), traj.t_ff)
        conf = cost_ff(lambda s: a / (4.0 * traj.value(s) ** 2), traj.t_ff)
        assert total == pytest.approx(conf + a * traj.vbar**2 * shape, rel=1e-8)


@pytest.mark.parametrize("kind,shape", [(POLYNOMIAL, 1.0 / 15.0), (TRIGONOMETRIC, 3.0)])
def test_box_drive_three_way_agreement(kind, shape):
    # (a) quadrature of the drive term, (b) integration-by-parts identity,
    # (c) closed-form coefficient -- all with the same prefactor K
    ens = ThermalEnsemble(beta=math.inf, n_particles=3)
    traj = box_ramp(kind)
    T = traj.t_ff
    k = box_drive_prefactor(ens, traj.value(0.0))
    a_quad = cost_ff(lambda s: internal_energy_box_parts(traj, s, ens)[1], T)
    b_ibp = 2.0 * k / T * quad(lambda s: traj.velocity(s) ** 2, 0.0, T, epsabs=1e-14, epsrel=1e-12)[0]
    c_closed = k * traj.vbar**2 * shape
    assert a_quad == pytest.approx(b_ibp, rel=1e-8)
    assert a_quad == pytest.approx(c_closed, rel=1e-8)


def test_drive_term_scales_as_vbar_squared():
    ens = ThermalEnsemble(beta=math.inf, n_particles=2)
    T = 1.0
    vals = []
    for vbar in (9.0, 18.0):
        traj = ControlTrajectory.trigonometric(1.0, vbar, T)
        vals.append(cost_ff(lambda s: internal_energy_box_parts(traj, s, ens)[1], T))
    assert vals[1] / vals[0] == pytest.approx(4.0, abs=1e-10)


def test_box_report_records_published_form_disagreement():
    ens = ThermalEnsemble(beta=math.inf, n_particles=3)
    traj = box_ramp(POLYNOMIAL)
    rep = cost_ff_box_closed(traj, ens)
    # quadrature and the artifact closed form agree exactly at T = 0
    assert rep.quadrature_value == pytest.approx(rep.closed_form_value, rel=1e-10)
    assert rep.c_ff == rep.quadrature_value
    # the printed drive coefficient is 6x low (B2/90 vs K/15); on top the
    # printed cost line divides the confinement term by an extra 24
    k = rep.constants["B2_drive"]
    b2 = rep.constants["B2"]
    assert 6.0 * k / b2 == pytest.approx(6.0 * box_drive_prefactor(ens, 1.0) / b2, rel=1e-12)
    assert rep.published_ratio > 1.0


def test_box_report_static_confinement():
    ens = ThermalEnsemble(beta=math.inf, n_particles=2)
    traj = ControlTrajectory.polynomial(1.0, 0.0, 1.0)  # static wall
    rep = cost_ff_box_closed(traj, ens)
    b1, _ = coefficients_B(ens, 1.0)
    assert rep.quadrature_value == pytest.approx(b1, rel=1e-10)  # B1/L0^2 with L0 = 1


def test_box_report_rejects_linear_ramp():
    with pytest.raises(ValueError):
        cost_ff_box_closed(ControlTrajectory.adiabatic_linear(1.0, 0.1, 1.0), ZERO_T)


def test_cost_monotone_decreasing_in_t_ff():
    ens = ThermalEnsemble(beta=math.inf, n_particles=1)
    values = [
        cost_ff_box_closed(box_ramp(POLYNOMIAL, t_ff=T), ens).quadrature_value
        for T in (0.5, 1.0, 2.0, 5.0)
    ]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_cost_report_csv(tmp_path):
    rep = cost_ff_ho_closed(ho_ramp(POLYNOMIAL), 1.0)
    path = tmp_path / "report.csv"
    rep.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[-1].startswith("summary,")
    assert any(line.startswith("# c_ff=") for line in lines)
    assert sum(not line.startswith("#") for line in lines) == 2 + len(rep.u_samples)


def test_cost_ff_numeric_matches_quadrature_of_trace():
    # Gauss-Legendre average against a dense Simpson reference
    traj = ho_ramp(POLYNOMIAL)
    ens = ThermalEnsemble(beta=1.0, n_particles=1)
    model = HarmonicModel()
    fast = cost_ff_numeric(model, traj, ens, n_nodes=48, n_points=512)
    ts = np.linspace(0.0, traj.t_ff, 129)
    vals = [internal_energy_numeric(model, traj, float(t), ens, n_points=512) for t in ts]
    from scipy.integrate import simpson

    ref = simpson(vals, x=ts) / traj.t_ff
    assert fast == pytest.approx(ref, rel=1e-6)


# ---------------------------------------------------------------------------
# Frobenius cost


def test_frobenius_requires_cutoff_of_two():
    with pytest.raises(ValueError):
        frobenius_cost(BoxModel(), box_ramp(), 1, 1.0)


def test_frobenius_static_diagonal():
    # static wall: H is diagonal in its own eigenbasis, norm = sqrt(sum E_n^2)
    traj = ControlTrajectory.polynomial(1.0, 0.0, 1.0)
    got = frobenius_cost(BoxModel(), traj, 4, 1.0, rel_tol=1e-10)
    expected = np.sqrt(sum(box_energy(n, 1.0) ** 2 for n in range(1, 5)))
    assert got.value == pytest.approx(expected, rel=1e-8)
    assert got.cutoff == 4


def test_frobenius_box_x2_matrix_elements_match_analytic():
    # grid quadrature of <m|x^2|n> against the closed-form sine integrals
    L = 4.6
    grid = Grid(0.0, L, 2048)
    amps = BoxModel().amplitudes(10, L, grid)
    w = np.full(grid.n_points, grid.dx)
    w[0] = w[-1] = 0.5 * grid.dx
    numeric = (amps * w) @ (grid.points**2 * amps).T

    def analytic(m, n):
        if m == n:
            return L * L * (1.0 / 3.0 - 1.0 / (2.0 * np.pi**2 * n * n))
        sign = (-1.0) ** (m + n)
        return (2.0 * L * L / np.pi**2) * sign * (1.0 / (m - n) ** 2 - 1.0 / (m + n) ** 2)

    exact = np.array([[analytic(m, n) for n in range(1, 11)] for m in range(1, 11)])
    np.testing.assert_allclose(numeric, exact, atol=1e-8)


def test_frobenius_cutoff_from_ensemble():
    ens = ThermalEnsemble(beta=math.inf, n_particles=3)
    got = frobenius_cost(BoxModel(), box_ramp(POLYNOMIAL), ens, 1.0, n_points=512, rel_tol=1e-6)
    assert got.cutoff >= 4
    assert got.value > 0.0
