"""Uniform 1D grids, boundary conditions and the discrete operators on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import integrate as _spi
from scipy import linalg
from scipy.special import roots_legendre

from .errors import NumericalFailure, UsageError


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on ``[x_min, x_max]``.

    ``n_points`` is rounded up to the next odd integer (composite Simpson
    needs an even number of panels); the value actually used is stored.
    """

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        n = int(self.n_points)
        if n < 3:
            n = 3
        if n % 2 == 0:
            n += 1
        object.__setattr__(self, "n_points", n)
        if not self.x_max > self.x_min:
            raise UsageError(f"empty grid [{self.x_min}, {self.x_max}]")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, h: float) -> "Grid1D":
        """Grid whose spacing is at most ``h``."""
        n = int(np.ceil((x_max - x_min) / h - 1e-9)) + 1
        return cls(x_min, x_max, n)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True)
class Dirichlet:
    value: float = 0.0


@dataclass(frozen=True)
class Neumann:
    slope: float = 0.0


@dataclass(frozen=True)
class FixedVacuum:
    value: float


BoundaryCondition = Union[Dirichlet, Neumann, FixedVacuum]


def is_pinned(bc: BoundaryCondition) -> bool:
    return isinstance(bc, (Dirichlet, FixedVacuum))


@dataclass
class FieldProfile:
    """Field values on a grid together with the conditions at both ends."""

    grid: Grid1D
    values: np.ndarray
    bc_left: BoundaryCondition = field(default_factory=Neumann)
    bc_right: BoundaryCondition = field(default_factory=Neumann)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_points,):
            raise UsageError(
                f"profile has {self.values.size} values for {self.grid.n_points} nodes")
        if not np.all(np.isfinite(self.values)):
            raise UsageError("profile contains non-finite values")

    def with_values(self, values) -> "FieldProfile":
        return FieldProfile(self.grid, values, self.bc_left, self.bc_right)


def _ghosts(values, h, bc, n_ghost, side):
    """Ghost values beyond one end, ordered outward from the boundary node."""
    if side == "left":
        inner = values[1:n_ghost + 1]
    else:
        inner = values[-2:-n_ghost - 2:-1]
    k = np.arange(1, n_ghost + 1)
    if isinstance(bc, Neumann):
        # outward normal points to -x on the left
        sgn = -1.0 if side == "left" else 1.0
        return inner + sgn * 2.0 * k * h * bc.slope
    # pinned: odd reflection about the boundary value
    return 2.0 * bc.value - inner


def padded(profile: FieldProfile, n_ghost: int = 1) -> np.ndarray:
    """Profile values extended by ``n_ghost`` boundary-implied ghosts per side."""
    v = profile.values
    h = profile.grid.h
    left = _ghosts(v, h, profile.bc_left, n_ghost, "left")[::-1]
    right = _ghosts(v, h, profile.bc_right, n_ghost, "right")
    return np.concatenate([left, v, right])


def second_derivative(profile: FieldProfile) -> np.ndarray:
    """Three-point second derivative at every node, ghosts from the boundary conditions."""
    p = padded(profile, 1)
    return (p[:-2] - 2.0 * p[1:-1] + p[2:]) / profile.grid.h ** 2


def first_derivative4(profile: FieldProfile) -> np.ndarray:
    """Fourth-order central first derivative at every node."""
    p = padded(profile, 2)
    return (p[:-4] - 8.0 * p[1:-3] + 8.0 * p[3:-1] - p[4:]) / (12.0 * profile.grid.h)


def integrate(values, grid: Grid1D) -> float:
    """Composite Simpson rule over the grid."""
    values = np.asarray(values, dtype=float)
    if grid.n_points % 2 == 0 or values.shape[-1] != grid.n_points:
        raise UsageError("Simpson integration needs values on an odd-sized grid")
    return float(_spi.simpson(values, dx=grid.h))


def inner_product(f: FieldProfile, g: FieldProfile) -> float:
    """Grid inner product ``<f g>``."""
    if f.grid != g.grid:
        raise UsageError("inner product of profiles on different grids")
    return integrate(f.values * g.values, f.grid)


def cumulative_quad(func: Callable[[np.ndarray], np.ndarray], pts, order: int = 12) -> np.ndarray:
    """Running integral ``int_{pts[0]}^{pts[i]} func`` with Gauss-Legendre panels.

    Each interval between consecutive points is one panel; ``func`` must be
    vectorised.  Accurate to rounding for smooth integrands on panels much
    narrower than the integrand's length scale.
    """
    pts = np.asarray(pts, dtype=float)
    nodes, weights = roots_legendre(order)
    lo, hi = pts[:-1, None], pts[1:, None]
    half = 0.5 * (hi - lo)
    xs = 0.5 * (hi + lo) + half * nodes[None, :]
    panel = (func(xs) * weights[None, :]).sum(axis=1) * half[:, 0]
    if not np.all(np.isfinite(panel)):
        raise NumericalFailure("non-finite integrand in cumulative quadrature")
    return np.concatenate([[0.0], np.cumsum(panel)])


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix ``diag`` / ``off`` acting on grid vectors."""

    diag: np.ndarray
    off: np.ndarray
    h: float

    def __matmul__(self, v):
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


def fluctuation_operator(model, grid: Grid1D) -> TridiagonalOperator:
    """``-d^2/dx^2 + U''(u_c(x))`` with zero values just outside the grid."""
    h = grid.h
    potential = model.d2U(model.kink(grid.x))
    diag = 2.0 / h ** 2 + potential
    off = np.full(grid.n_points - 1, -1.0 / h ** 2)
    return TridiagonalOperator(diag, off, h)


def lowest_eigenpairs(op: TridiagonalOperator, k: int, tol: float = 1e-8):
    """The ``k`` smallest eigenvalues with eigenvectors normalised to ``sum v^2 h = 1``.

    Returns a list of ``(eigenvalue, eigenvector)`` in non-decreasing order.
    """
    n = op.diag.size
    if not 1 <= k <= n:
        raise UsageError(f"need 1 <= k <= {n}, got {k}")
    vals, vecs = linalg.eigh_tridiagonal(
        op.diag, op.off, select="i", select_range=(0, k - 1), lapack_driver="stebz")
    scale = max(1.0, float(np.max(np.abs(op.diag)) + 2.0 * np.max(np.abs(op.off), initial=0.0)))
    pairs = []
    for j in range(k):
        v = vecs[:, j]
        res = np.linalg.norm(op @ v - vals[j] * v) / scale
        if not res <= tol:
            raise NumericalFailure(f"eigenvector {j} residual {res:.3e} exceeds {tol:.1e}")
        # fix the sign so the largest-magnitude entry is positive
        v = v * np.sign(v[np.argmax(np.abs(v))]) / np.sqrt(op.h)
        pairs.append((float(vals[j]), v))
    return pairs
