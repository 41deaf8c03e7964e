"""Closed-form eigenfunctions and the three inner products.

The base modes are products of orthonormal oscillator functions in
stretched coordinates (frequency w = sqrt(1+gamma^2)); the right and left
eigenfunction families multiply by e^(+2 gamma x y) and e^(-2 gamma x y).
All members are unit-normalized, so biorthogonality and physical
orthonormality both come out with constant 1.

Inner products fold every Gaussian and e^(c x y) factor into the exponent
of a coupled tensor quadrature; only scaled Hermite products are evaluated
at the nodes, which keeps the integrands overflow-free.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

from .quadrature import hermite_function_jet, hermite_scaled, integrate_coupled


class ModeKind(Enum):
    """Mode families: base oscillator, right eigenfunctions, left
    (adjoint) eigenfunctions."""

    PHI = 0
    PSI = +1
    PSI_TILDE = -1


class InnerProductKind(Enum):
    """Weight selector: flat L^2, physical (e^(-4 g x y)), dual
    (e^(+4 g x y)).  Physical and dual reduce to flat at gamma = 0."""

    FLAT = 0
    PHYSICAL = -1
    DUAL = +1


class Jet(NamedTuple):
    value: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    dxx: np.ndarray
    dyy: np.ndarray
    dxy: np.ndarray


def eigenvalue(m: int, n: int, gamma: float) -> float:
    """(1 + m + n) sqrt(1 + gamma^2); shared by all three operators."""
    if m < 0 or n < 0:
        raise ValueError("mode indices must be >= 0")
    return (1 + m + n) * math.hypot(1.0, gamma)


@dataclass(frozen=True)
class ModeFunction:
    """Evaluable eigenfunction pinned to a kind, index pair and coupling.

    Evaluation runs through the orthonormal-oscillator-function recurrence,
    whose values stay O(1) for any index, so no overflow guard or log
    scaling is needed even for very large m + n."""

    kind: ModeKind
    m: int
    n: int
    gamma: float

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("mode indices must be >= 0")

    @property
    def omega(self) -> float:
        return math.hypot(1.0, self.gamma)

    @property
    def coupling(self) -> float:
        """Coefficient c in the e^(c x y) factor."""
        return 2.0 * self.gamma * self.kind.value

    @property
    def energy(self) -> float:
        return eigenvalue(self.m, self.n, self.gamma)

    def eval(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = math.sqrt(2.0 * self.omega)
        u, _, _ = hermite_function_jet(self.m, s * x)
        v, _, _ = hermite_function_jet(self.n, s * y)
        out = s * u * v * np.exp(self.coupling * x * y)
        return float(out) if out.ndim == 0 else out

    def jet(self, x, y) -> Jet:
        """Value with first and second partial derivatives."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = math.sqrt(2.0 * self.omega)
        u, u1, u2 = (s * w for w in hermite_function_jet(self.m, s * x))
        u1, u2 = s * u1, s * s * u2
        v, v1, v2 = hermite_function_jet(self.n, s * y)
        v1, v2 = s * v1, s * s * v2
        c = self.coupling
        w = np.exp(c * x * y)
        wx, wy = c * y * w, c * x * w
        value = u * v * w
        return Jet(
            value=value,
            dx=u1 * v * w + u * v * wx,
            dy=u * v1 * w + u * v * wy,
            dxx=u2 * v * w + 2.0 * u1 * v * wx + u * v * (c * y) ** 2 * w,
            dyy=u * v2 * w + 2.0 * u * v1 * wy + u * v * (c * x) ** 2 * w,
            dxy=u1 * v1 * w + u1 * v * wy + u * v1 * wx + u * v * (c + c * c * x * y) * w,
        )

    def poly_part(self, x, y):
        """Mode value with the Gaussian and coupling factors stripped:
        value = poly_part * e^(-w (x^2+y^2)) * e^(c x y)."""
        s = math.sqrt(2.0 * self.omega)
        scale = math.sqrt(2.0 * self.omega / math.pi)
        return scale * hermite_scaled(self.m, s * np.asarray(x, float)) * hermite_scaled(
            self.n, s * np.asarray(y, float)
        )


def apply_hamiltonian(f: ModeFunction, x, y, which: str = "H"):
    """Apply H, H* or the self-adjoint partner H0 analytically at (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    jet = f.jet(x, y)
    kinetic = -0.25 * (jet.dxx + jet.dyy)
    if which == "H":
        out = kinetic + f.gamma * (y * jet.dx + x * jet.dy) + (x * x + y * y) * jet.value
    elif which == "Hstar":
        out = kinetic - f.gamma * (y * jet.dx + x * jet.dy) + (x * x + y * y) * jet.value
    elif which == "H0":
        out = kinetic + (1.0 + f.gamma**2) * (x * x + y * y) * jet.value
    else:
        raise ValueError(f"unknown operator {which!r}")
    return float(out) if out.ndim == 0 else out


#: which mode family each operator diagonalizes
OPERATOR_MODE = {"H": ModeKind.PSI, "Hstar": ModeKind.PSI_TILDE, "H0": ModeKind.PHI}


def eigen_residual(which: str, m: int, n: int, gamma: float, grid=None) -> float:
    """max |op f - E f| / max |E f| over a point grid (default 10x10 in
    [-2,2]^2) for the matching (operator, mode-family) pair."""
    if grid is None:
        ax = np.linspace(-2.0, 2.0, 10)
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
    else:
        gx, gy = grid
    f = ModeFunction(OPERATOR_MODE[which], m, n, gamma)
    applied = apply_hamiltonian(f, gx, gy, which)
    reference = f.energy * f.eval(gx, gy)
    return float(np.max(np.abs(applied - reference)) / np.max(np.abs(reference)))


def _weight_coupling(kind: InnerProductKind, gamma: float) -> float:
    return 4.0 * gamma * kind.value


def inner_product(
    f: ModeFunction,
    g: ModeFunction,
    kind: InnerProductKind = InnerProductKind.FLAT,
    n_nodes: int = 64,
) -> float:
    """<f, g> under the selected weight, by folded tensor quadrature.

    Both modes are real, so conjugation is immaterial.  All exponential
    factors (two mode Gaussians, the modes' couplings, the weight) are
    combined into one coupled-Gaussian exponent; the quadrature is then
    exact for the remaining polynomial factor.
    """
    if f.gamma != g.gamma:
        raise ValueError("modes must share the coupling constant")
    a = 2.0 * f.omega
    c = 0.5 * (f.coupling + g.coupling + _weight_coupling(kind, f.gamma))
    return integrate_coupled(
        lambda x, y: f.poly_part(x, y) * g.poly_part(x, y), (a, a, c), n_nodes
    )


def norm_growth(gamma: float, m_max: int, n_nodes: int = 96) -> np.ndarray:
    """Flat squared norms of the diagonal right eigenfunctions, m = 0..m_max.

    Strictly increasing for gamma != 0; identically 1 at gamma = 0."""
    out = np.empty(m_max + 1)
    for m in range(m_max + 1):
        f = ModeFunction(ModeKind.PSI, m, m, gamma)
        out[m] = inner_product(f, f, InnerProductKind.FLAT, n_nodes)
    return out


@dataclass(frozen=True)
class ExpansionResult:
    coeffs: np.ndarray
    norm_sq: float
    norm_defect: float
    residual_sq: float


def expand_amplitudes(
    psi: Callable,
    gamma: float,
    cutoff: int,
    n_nodes: int = 96,
    warn_threshold: float = 1e-6,
) -> ExpansionResult:
    """Probability amplitudes c_mn = <<psi, Psi_mn>> for m, n <= cutoff.

    psi must be evaluable on numpy arrays and is assumed to lie in the span
    of the right eigenfunctions up to the cutoff; the returned residual_sq
    (physical norm of psi minus its reconstruction) diagnoses violations.
    """
    omega = math.hypot(1.0, gamma)
    a = 2.0 * omega
    modes = [
        [ModeFunction(ModeKind.PSI, m, n, gamma) for n in range(cutoff + 1)]
        for m in range(cutoff + 1)
    ]

    # de-Gaussianized psi: psi = G * e^(-w (x^2+y^2)) * e^(2 g x y) on the span
    def bare(x, y):
        return psi(x, y) * np.exp(omega * (x * x + y * y) - 2.0 * gamma * x * y)

    coeffs = np.empty((cutoff + 1, cutoff + 1))
    for m in range(cutoff + 1):
        for n in range(cutoff + 1):
            part = modes[m][n].poly_part
            coeffs[m, n] = integrate_coupled(
                lambda x, y: bare(x, y) * part(x, y), (a, a, 0.0), n_nodes
            )
    norm_sq = integrate_coupled(lambda x, y: bare(x, y) ** 2, (a, a, 0.0), n_nodes)

    def bare_residual(x, y):
        acc = bare(x, y)
        for m in range(cutoff + 1):
            for n in range(cutoff + 1):
                acc = acc - coeffs[m, n] * modes[m][n].poly_part(x, y)
        return acc**2

    residual_sq = integrate_coupled(bare_residual, (a, a, 0.0), n_nodes)
    defect = abs(float(np.sum(coeffs**2)) - norm_sq)
    if residual_sq > warn_threshold:
        warnings.warn(
            f"expansion residual {residual_sq:.3e} exceeds {warn_threshold:.1e}; "
            "input may lie outside the truncated span",
            stacklevel=2,
        )
    return ExpansionResult(coeffs, norm_sq, defect, residual_sq)


def mode_superposition(coeffs: np.ndarray, gamma: float) -> Callable:
    """Callable sum_{mn} c_mn Psi_mn for a (M+1)x(M+1) coefficient array."""
    coeffs = np.asarray(coeffs, dtype=float)
    modes = [
        [ModeFunction(ModeKind.PSI, m, n, gamma) for n in range(coeffs.shape[1])]
        for m in range(coeffs.shape[0])
    ]

    def psi(x, y):
        acc = 0.0
        for m in range(coeffs.shape[0]):
            for n in range(coeffs.shape[1]):
                if coeffs[m, n]:
                    acc = acc + coeffs[m, n] * modes[m][n].eval(x, y)
        return acc

    return psi
