"""Shared builders for the standard test scenarios: 1 -> 10 ramps over T = 1."""

import numpy as np

from ffqd.trajectory import POLYNOMIAL, TRIGONOMETRIC, ControlTrajectory, vbar_for_target

R_FINAL = 1.0 / np.sqrt(10.0)  # oscillator length scale for omega 1 -> 10


def box_ramp(kind=POLYNOMIAL, l0=1.0, l_final=10.0, t_ff=1.0) -> ControlTrajectory:
    return ControlTrajectory(kind, l0, t_ff, vbar=vbar_for_target(kind, l0, l_final, t_ff))


def ho_ramp(kind=POLYNOMIAL, r0=1.0, r_final=R_FINAL, t_ff=1.0) -> ControlTrajectory:
    return ControlTrajectory(kind, r0, t_ff, vbar=vbar_for_target(kind, r0, r_final, t_ff))


BOTH_RAMPS = (POLYNOMIAL, TRIGONOMETRIC)
