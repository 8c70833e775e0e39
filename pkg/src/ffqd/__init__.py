"""Fast-forward driving of dynamical quantum confinement.

Library layout:

  core         units, grids, complex fields, inner products
  trajectory   control ramps l(t) and the advanced-time map
  spectra      frozen-parameter eigenproblem for oscillator and box
  fastforward  regularization phase, driving potential, accelerated states
  propagator   Crank-Nicolson oracle for the driven Schroedinger equation
  cost         thermal traces, closed-form energy costs, Frobenius cost
  ie           inverse-engineering comparison protocol (Ermakov machinery)
  cli          scenario runner (`ffqd run|verify|preset`)
"""

from .core import NATURAL, ComplexField, Grid, UnitSystem, inner_product, norm, normalize
from .trajectory import (
    ADIABATIC_LINEAR,
    POLYNOMIAL,
    TRIGONOMETRIC,
    AdvancedTime,
    ControlTrajectory,
    advanced_time,
    vbar_for_target,
)
from .spectra import (
    BoxModel,
    EigenPair,
    HarmonicModel,
    box_eigenpair,
    box_eigenstate,
    box_energy,
    ho_eigenpair,
    ho_eigenstate,
    ho_energy,
)
from .fastforward import (
    FastForwardFields,
    PhaseFunctions,
    RegularizationSingularity,
    box_fast_forward_fields,
    box_psi_ff_values,
    continuity_residual,
    dtheta_dx_numeric,
    ho_fast_forward_fields,
    ho_psi_ff_values,
    psi_ff_box,
    psi_ff_ho,
    scaling_phase_functions,
    theta_numeric,
    v_ff_box,
    v_ff_generic,
    v_ff_ho,
    v_tilde,
)
from .propagator import (
    DirichletFixed,
    DirichletMovingWall,
    PropagationError,
    PropagationSpec,
    fidelity,
    propagate,
    tdse_residual,
)
from .cost import (
    CostReport,
    FrobeniusCost,
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
from .ie import ErmakovSolution, cost_ie, design_b, ermakov_residual, h_ie_expectation

__version__ = "0.1.0"
