"""Leading-order semiclassical phases for the decoupled quadratic summands.

At unit coupling the model separates in sum/difference coordinates into two
1D pieces of the form h = alpha p^2 + beta x^2 + i delta x p.  The phase
S(x) of the exp(i S / hbar) ansatz solves the eikonal (Jacobi) equation

    alpha S'^2 + i delta x S' + beta x^2 = E,

in closed form inside the classically allowed interval |x| < x_t.  The
left-adjoint branch (phase of the adjoint operator's eigenfunction) has the
same real part and opposite imaginary part, which is what drives the
squared-norm integrals apart as hbar -> 0: the right-eigenfunction norm
diverges, the left one vanishes, and the cross overlap stays finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss as _leggauss
from scipy.special import logsumexp


@lru_cache(maxsize=16)
def leggauss(n: int):
    nodes, weights = _leggauss(n)
    nodes.setflags(write=False)  # cached and shared
    weights.setflags(write=False)
    return nodes, weights


class Branch(Enum):
    RIGHT = +1
    LEFT_ADJOINT = -1


@dataclass(frozen=True)
class QuadraticSummand:
    """h = alpha p^2 + beta x^2 + i delta x p with alpha, beta > 0."""

    alpha: float
    beta: float
    delta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")

    def turning_point(self, energy: float) -> float:
        if energy <= 0:
            raise ValueError("energy must be positive")
        return math.sqrt(4.0 * self.alpha * energy / (4.0 * self.alpha * self.beta + self.delta**2))


def sum_coordinate_summand() -> QuadraticSummand:
    """Center-of-mass piece (1/8) p^2 + 2 x^2 + i x p."""
    return QuadraticSummand(0.125, 2.0, 1.0)


def difference_coordinate_summand() -> QuadraticSummand:
    """Relative piece (1/2) p^2 + (1/2) x^2 + i x p."""
    return QuadraticSummand(0.5, 0.5, 1.0)


@dataclass(frozen=True)
class PhaseFunction:
    """Closed-form S(x) on |x| < x_t for one summand, energy and branch."""

    summand: QuadraticSummand
    energy: float
    branch: Branch = Branch.RIGHT

    @property
    def turning_point(self) -> float:
        return self.summand.turning_point(self.energy)

    def _momentum_root(self, x):
        s = self.summand
        arg = 4.0 * s.alpha * self.energy - (4.0 * s.alpha * s.beta + s.delta**2) * x * x
        return np.sqrt(arg)

    def derivative(self, x):
        """S'(x) = (-i delta x + sqrt(4 a E - (4 a b + d^2) x^2)) / (2 a),
        with the imaginary part flipped on the left-adjoint branch."""
        x = self._check(x)
        s = self.summand
        im = -self.branch.value * s.delta * x / (2.0 * s.alpha)
        return self._momentum_root(x) / (2.0 * s.alpha) + 1j * im

    def real_part(self, x):
        x = self._check(x)
        s = self.summand
        k = 4.0 * s.alpha * s.beta + s.delta**2
        root = self._momentum_root(x)
        return x * root / (4.0 * s.alpha) + (self.energy / math.sqrt(k)) * np.arcsin(
            x * math.sqrt(k / (4.0 * s.alpha * self.energy))
        )

    def imag_part(self, x):
        x = self._check(x)
        return -self.branch.value * self.summand.delta * x * x / (4.0 * self.summand.alpha)

    def __call__(self, x):
        out = self.real_part(x) + 1j * self.imag_part(x)
        return complex(out) if np.ndim(out) == 0 else out

    def jacobi_residual(self, x):
        """alpha S'^2 +/- i delta x S' + beta x^2 - E (sign per branch);
        identically zero for the exact phase."""
        x = self._check(x)
        s = self.summand
        sp = self.derivative(x)
        return s.alpha * sp * sp + self.branch.value * 1j * s.delta * x * sp + s.beta * x * x - self.energy

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) >= self.turning_point):
            raise ValueError("x outside the classically allowed interval")
        return x


def wkb_phase(summand: QuadraticSummand, energy: float, x, branch: Branch = Branch.RIGHT):
    """Convenience wrapper: S(x) for the given branch."""
    return PhaseFunction(summand, energy, branch)(x)


def _converged_quadrature(f, half_width: float, n0: int = 64, rtol: float = 1e-9, n_cap: int = 8192):
    """Gauss-Legendre on [-half_width, half_width] with node doubling."""
    prev = None
    n = n0
    while True:
        t, w = leggauss(n)
        val = float(np.dot(w, f(half_width * t)) * half_width)
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return val
        if n >= n_cap:
            return val
        prev, n = val, 2 * n


def _log_gaussian_integral(c: float, half_width: float, n0: int = 64, rtol: float = 1e-9, n_cap: int = 8192):
    """log of integral of e^(c x^2) over [-half_width, half_width],
    overflow-safe for any magnitude of c."""
    prev = None
    n = n0
    while True:
        t, w = leggauss(n)
        x = half_width * t
        val = float(logsumexp(c * x * x + np.log(w * half_width)))
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return val
        if n >= n_cap:
            return val
        prev, n = val, 2 * n


@dataclass(frozen=True)
class NormIntegralRow:
    hbar: float
    right_norm: float     # I1: integral of |Psi|^2, diverges as hbar -> 0
    left_norm: float      # I2: integral of |Psi_tilde|^2, vanishes
    cross_overlap: float  # I3: integral of conj(Psi) Psi_tilde, stays finite
    log_right_norm: float
    log_left_norm: float


def wkb_integrals(
    summand: QuadraticSummand, energy: float, hbars, n0: int = 64
) -> list[NormIntegralRow]:
    """The three hbar-scaling integrals over the classically allowed interval.

    |Psi|^2 = e^(-2 Im S / hbar) and |Psi_tilde|^2 = e^(+2 Im S / hbar) are
    pure Gaussians in x (Im S = -delta x^2 / (4 alpha)); the cross integrand
    conj(Psi) Psi_tilde is computed from the two phase functions and equals
    1 identically in leading order.  The diverging integral is evaluated
    through a log-sum so small hbar cannot overflow internally (the linear
    value is +inf past the float range).
    """
    x_t = summand.turning_point(energy)
    c = summand.delta / (2.0 * summand.alpha)
    right = PhaseFunction(summand, energy, Branch.RIGHT)
    left = PhaseFunction(summand, energy, Branch.LEFT_ADJOINT)
    rows = []
    for hbar in hbars:
        hbar = float(hbar)
        if hbar <= 0:
            raise ValueError("hbar must be positive")
        log_i1 = _log_gaussian_integral(+c / hbar, x_t, n0)
        log_i2 = _log_gaussian_integral(-c / hbar, x_t, n0)

        def cross(x):
            phase = 1j * (left(x) - np.conj(right(x))) / hbar
            return np.exp(phase).real

        i3 = _converged_quadrature(cross, x_t, n0)
        with np.errstate(over="ignore"):  # +inf past the float range is intended
            i1, i2 = float(np.exp(log_i1)), float(np.exp(log_i2))
        rows.append(NormIntegralRow(hbar, i1, i2, i3, log_i1, log_i2))
    return rows
