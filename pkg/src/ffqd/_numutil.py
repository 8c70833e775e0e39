"""Finite-difference and cumulative-quadrature helpers on uniform grids."""

from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_simpson


def grad4(f: np.ndarray, dx: float) -> np.ndarray:
    """First derivative, 4th-order centered stencil with one-sided ends."""
    f = np.asarray(f)
    g = np.empty_like(f, dtype=np.result_type(f.dtype, float))
    g[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dx)
    # 4th-order one-sided stencils for the two points at each end
    c = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * dx)
    g[0] = c @ f[:5]
    g[1] = (np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12.0 * dx)) @ f[:5]
    g[-1] = -(c @ f[-1:-6:-1])
    g[-2] = -(np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12.0 * dx)) @ f[-1:-6:-1]
    return g


def lap2(f: np.ndarray, dx: float) -> np.ndarray:
    """Second derivative, 2nd-order centered stencil with one-sided ends."""
    f = np.asarray(f)
    out = np.empty_like(f, dtype=np.result_type(f.dtype, float))
    inv = 1.0 / (dx * dx)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) * inv
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) * inv
    return out


def cumint(f: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral from the first grid point, Simpson-accurate (O(dx^4))."""
    return cumulative_simpson(np.asarray(f, dtype=float), dx=dx, initial=0.0)
