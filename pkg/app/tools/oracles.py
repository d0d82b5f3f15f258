"""
Independent numerical references for the closed-form design.

The closed-form Gram entries are integrals over the pass band and its mirror;
the helpers here evaluate the same integrals by quadrature and solve the same
least-squares problem on a dense frequency grid.
"""
import logging

import numpy as np
from scipy import integrate, linalg

from ..core_model import require_valid_band

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 2**14 + 1


def band_grid(lo, hi, points=DEFAULT_POINTS):
    """Equispaced grid over [lo, hi]; Simpson needs an odd point count."""
    if points % 2 == 0:
        points += 1
    return np.linspace(lo, hi, points)


def integrate_samples(values, theta, rule="simpson"):
    """Integrates sampled values along the last axis."""
    if rule == "simpson":
        return integrate.simpson(values, x=theta, axis=-1)
    if rule == "trapezoid":
        return integrate.trapezoid(values, x=theta, axis=-1)
    raise ValueError(f"Unknown quadrature rule '{rule}'")


def quadrature_weights(theta, rule="simpson"):
    """Weights w with sum(w * f(theta)) equal to the composite rule."""
    step = theta[1] - theta[0]
    w = np.ones(theta.size)
    if rule == "simpson":
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * step / 3.0
    if rule == "trapezoid":
        w[0] = w[-1] = 0.5
        return w * step
    raise ValueError(f"Unknown quadrature rule '{rule}'")


def branch_offsets(pattern, n, N):
    """x_k = k - d_{n-k} for k = -N/2..N/2."""
    k = np.arange(-(N // 2), N // 2 + 1)
    return k - pattern.skew_array(n - k)


def quadrature_c(problem, n, points=DEFAULT_POINTS, rule="simpson"):
    """(1/2pi) * integral of exp(j*theta*x_k) over the pass band, per k."""
    require_valid_band(problem.band)
    x = branch_offsets(problem.pattern, n, problem.N)
    theta = band_grid(problem.band.omega1_T1, problem.band.omega2_T1, points)
    c = np.empty(x.size, dtype=np.complex128)
    for i, xk in enumerate(x):
        c[i] = integrate_samples(np.exp(1j * theta * xk), theta, rule) / (2 * np.pi)
    return c


def quadrature_S(problem, n, points=DEFAULT_POINTS, rule="simpson"):
    """(1/pi) * integral of cos(theta*y_kp) over the pass band, per (k, p)."""
    require_valid_band(problem.band)
    x = branch_offsets(problem.pattern, n, problem.N)
    theta = band_grid(problem.band.omega1_T1, problem.band.omega2_T1, points)
    S = np.empty((x.size, x.size))
    for i, xk in enumerate(x):
        y = xk - x
        S[i] = integrate_samples(np.cos(np.outer(y, theta)), theta, rule) / np.pi
    return S


def dense_grid_design(problem, n, points=DEFAULT_POINTS, rule="simpson"):
    """
    Discrete least-squares fit of A_n to 1 on the pass band and 0 on its mirror,
    sampled on equispaced grids and solved through the normal equations.
    """
    require_valid_band(problem.band)
    x = branch_offsets(problem.pattern, n, problem.N)
    passband = band_grid(problem.band.omega1_T1, problem.band.omega2_T1, points)
    stopband = -passband[::-1]
    w = quadrature_weights(passband, rule) / (2 * np.pi)

    E_pass = np.exp(-1j * np.outer(passband, x))
    E_stop = np.exp(-1j * np.outer(stopband, x))
    gram = (E_pass.conj().T * w) @ E_pass + (E_stop.conj().T * w[::-1]) @ E_stop
    rhs = (E_pass.conj().T * w) @ np.ones(passband.size)

    h = linalg.solve(gram, rhs, assume_a="her")
    logger.debug(f"Dense-grid oracle for branch {n}: {passband.size} points per band, N={problem.N}")
    return h
