"""
Least-squares design of the M-periodic time-varying reconstruction filter.

Each branch n minimizes
    P_n = 1/(2pi) int_{w1}^{w2} |A_n - 1|^2 + 1/(2pi) int_{-w2}^{-w1} |A_n|^2
with A_n(wT1) = sum_k h_n(k) exp(-j wT1 (k - d_{n-k})). The minimizer solves
S_n h_n = c_n, where S_n is real symmetric and c_n complex.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .core_model import (ZERO_OFFSET_TOL, BandSpec, ConfigurationError, FilterBank,
                         SamplingPattern, SingularSystemError, require_valid_band)
from .tools.oracles import DEFAULT_POINTS, band_grid, branch_offsets, integrate_samples

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DesignProblem:
    pattern: SamplingPattern
    band: BandSpec
    N: int
    ridge: float = 0.0

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 2 or self.N % 2:
            raise ConfigurationError(f"Filter order N must be an even positive integer, got {self.N!r}")
        if not math.isfinite(self.ridge) or self.ridge < 0:
            raise ConfigurationError(f"Ridge must be a finite nonnegative number, got {self.ridge}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "ridge", float(self.ridge))

    @property
    def M(self):
        return self.pattern.M

    def with_order(self, N):
        return DesignProblem(self.pattern, self.band, N, self.ridge)


@dataclass(frozen=True, eq=False)
class GramSystem:
    n: int
    S: np.ndarray
    c: np.ndarray
    const_term: float


@dataclass(frozen=True, eq=False)
class BranchDesign:
    """Solution of one branch plus its diagnostics."""
    n: int
    h: np.ndarray
    residual: float
    condition: float
    error_P: float


def _check_branch(problem, n):
    require_valid_band(problem.band)
    if not 0 <= n < problem.M:
        raise ConfigurationError(f"Branch index {n} outside 0..{problem.M - 1}")


def build_c(problem: DesignProblem, n: int) -> np.ndarray:
    """c_{n,k} = (1/2pi) int_{w1}^{w2} exp(j theta x_k) dtheta, x_k = k - d_{n-k}."""
    _check_branch(problem, n)
    w1, w2 = problem.band.omega1_T1, problem.band.omega2_T1
    x = branch_offsets(problem.pattern, n, problem.N)

    zero = np.abs(x) < ZERO_OFFSET_TOL
    safe_x = np.where(zero, 1.0, x)
    c = (np.exp(1j * w2 * safe_x) - np.exp(1j * w1 * safe_x)) / (2j * np.pi * safe_x)
    c[zero] = problem.band.width / (2 * np.pi)
    return c


def build_S(problem: DesignProblem, n: int) -> np.ndarray:
    """s_{n,kp} = (1/pi) int_{w1}^{w2} cos(theta y) dtheta, y = x_k - x_p."""
    _check_branch(problem, n)
    w1, w2 = problem.band.omega1_T1, problem.band.omega2_T1
    x = branch_offsets(problem.pattern, n, problem.N)
    y = x[:, None] - x[None, :]

    # y can vanish off the diagonal for special skew sets, not only at k == p
    zero = np.abs(y) < ZERO_OFFSET_TOL
    safe_y = np.where(zero, 1.0, y)
    S = (np.sin(w2 * safe_y) - np.sin(w1 * safe_y)) / (np.pi * safe_y)
    S[zero] = problem.band.width / np.pi
    return S


def gram_system(problem: DesignProblem, n: int) -> GramSystem:
    return GramSystem(n, build_S(problem, n), build_c(problem, n), problem.band.width / (2 * np.pi))


def design_filter(problem: DesignProblem, n: int) -> BranchDesign:
    """Solves (S_n + ridge*I) h_n = c_n with a Cholesky factorization."""
    system = gram_system(problem, n)
    S = system.S
    lhs = S + problem.ridge * np.eye(S.shape[0]) if problem.ridge else S
    try:
        factor = linalg.cho_factor(lhs, lower=True, check_finite=True)
        h = linalg.cho_solve(factor, system.c)
    except (linalg.LinAlgError, ValueError) as e:
        raise SingularSystemError(n, f"Gram matrix is not positive definite (N={problem.N}, ridge={problem.ridge}): {e}") from e
    if not np.all(np.isfinite(h)):
        raise SingularSystemError(n, "solution contains non-finite coefficients")

    residual = float(np.max(np.abs(S @ h - system.c)))
    condition = float(np.linalg.cond(S))
    P = _quadratic_P(h, system)
    logger.debug(f"Designed branch {n}: N={problem.N}, cond={condition:.3g}, residual={residual:.3g}, P={P:.3e}")
    return BranchDesign(n, h, residual, condition, P)


def required_branches(M, all_branches=False):
    """Rows the reconstructor consumes: only even rows for even M."""
    if M % 2 == 0 and not all_branches:
        return list(range(0, M, 2))
    return list(range(M))


def design_bank(problem: DesignProblem, all_branches=False, diagnostics=None) -> FilterBank:
    """
    Designs every branch the reconstructor needs. For even M only the even rows
    are designed unless all_branches is set. Per-branch BranchDesign records are
    appended to `diagnostics` when a list is given.
    """
    rows = {}
    for n in required_branches(problem.M, all_branches):
        try:
            result = design_filter(problem, n)
        except SingularSystemError:
            logger.error(f"Design failed for branch {n} of M={problem.M}")
            raise
        rows[n] = result.h
        if diagnostics is not None:
            diagnostics.append(result)

    subset = problem.M % 2 == 0 and not all_branches
    logger.info(f"Designed {len(rows)} of {problem.M} branch filters of order {problem.N}")
    return FilterBank(M=problem.M, N=problem.N, rows=rows, band=problem.band,
                      pattern=problem.pattern, designed_subset=subset)


def freq_response(h, pattern: SamplingPattern, n: int, omega_T1_grid) -> np.ndarray:
    """A_n(wT1) = sum_k h_n(k) exp(-j wT1 (k - d_{n-k})) on the given grid."""
    h = np.asarray(h, dtype=np.complex128)
    x = branch_offsets(pattern, n, h.size - 1)
    grid = np.atleast_1d(np.asarray(omega_T1_grid, dtype=np.float64))
    return np.exp(-1j * np.outer(grid, x)) @ h


def _quadratic_P(h, system):
    quad = np.real(np.vdot(h, system.S @ h))
    cross = np.real(np.vdot(system.c, h))
    return float(quad - 2 * cross + system.const_term)


def error_P(h, problem: DesignProblem, n: int, method="quadratic", points=DEFAULT_POINTS, rule="simpson") -> float:
    """
    Error functional P_n of an arbitrary h, either from the quadratic form
    h^H S h - 2 Re(c^H h) + const or by direct quadrature of |A_n - 1|^2 and |A_n|^2.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.size != problem.N + 1:
        raise ConfigurationError(f"Expected {problem.N + 1} coefficients, got {h.size}")
    if method == "quadratic":
        return _quadratic_P(h, gram_system(problem, n))
    if method != "quadrature":
        raise ValueError(f"Unknown evaluation method '{method}'")

    require_valid_band(problem.band)
    theta = band_grid(problem.band.omega1_T1, problem.band.omega2_T1, points)
    passband = np.abs(freq_response(h, problem.pattern, n, theta) - 1.0) ** 2
    stopband = np.abs(freq_response(h, problem.pattern, n, -theta)) ** 2
    # the mirror integral over [-w2, -w1] equals the integral over theta of A(-theta)
    total = integrate_samples(passband, theta, rule) + integrate_samples(stopband, theta, rule)
    return float(total / (2 * np.pi))


def optimal_error(system: GramSystem) -> float:
    """const - Re(c^H S^-1 c), the minimum of the quadratic form."""
    factor = linalg.cho_factor(system.S, lower=True)
    return float(system.const_term - np.real(np.vdot(system.c, linalg.cho_solve(factor, system.c))))


def noise_gain(bank: FilterBank) -> dict:
    """Energy sum |h_n(k)|^2 per designed row."""
    return {n: float(np.sum(np.abs(h) ** 2)) for n, h in bank.rows.items()}


def response_table(h, pattern: SamplingPattern, n: int, omega_over_pi):
    """Rows (omega_over_pi, mag_db, phase_rad) of A_n on a grid given in units of pi."""
    grid = np.asarray(omega_over_pi, dtype=np.float64)
    A = freq_response(h, pattern, n, grid * np.pi)
    mag = np.abs(A)
    with np.errstate(divide="ignore"):
        mag_db = 20 * np.log10(mag)
    return [(float(w), float(m), float(p)) for w, m, p in zip(grid, mag_db, np.angle(A))]
