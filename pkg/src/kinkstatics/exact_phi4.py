"""Exact deformed Phi^4 kinks driven by the internal shape mode.

Dividing numerator and denominator of the closed-form profiles by ``2 e^x``
gives the compact form used throughout::

    Phi(x; b) = sinh(x) / (cosh(x) - b)

with ``b = qbar = sqrt(3/2) q`` for the physical amplitude and
``b = -/+ exp(-3 tau) / 2`` for the plus/minus branches of the diffusion-time
parameterisation.  All x-, q- and tau-derivatives are closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import OutOfRange, SingularConfiguration, UsageError
from .grid import FieldProfile, FixedVacuum, Grid1D, first_derivative4, inner_product, integrate
from .model import FieldModel, make_phi4

SQRT_3_2 = np.sqrt(1.5)
Q_LIMIT = np.sqrt(2.0 / 3.0)


@dataclass(frozen=True)
class InternalModeAmplitude:
    """Collective amplitude ``q`` of the shape mode, ``|q| < sqrt(2/3)``."""

    q: float

    def __post_init__(self):
        if not abs(self.q) < Q_LIMIT:
            raise OutOfRange(f"|q| must be below sqrt(2/3) ~ {Q_LIMIT:.6f}, got {self.q}")

    @property
    def q_bar(self) -> float:
        return float(SQRT_3_2 * self.q)


class Branch(Enum):
    PLUS = "+"
    MINUS = "-"


@dataclass(frozen=True)
class TauState:
    tau: float
    branch: Branch = Branch.PLUS

    @property
    def b(self) -> float:
        """Equivalent ``qbar``: ``-e^{-3 tau}/2`` (plus) or ``+e^{-3 tau}/2`` (minus)."""
        sign = -1.0 if self.branch is Branch.PLUS else 1.0
        return sign * 0.5 * np.exp(-3.0 * self.tau)

    def amplitude(self) -> InternalModeAmplitude:
        """The physical amplitude ``q = -/+ e^{-3 tau} / sqrt(6)``."""
        return InternalModeAmplitude(self.b / SQRT_3_2)


def sigma(x):
    """Normalised shape mode ``sqrt(3/2) tanh(x) / cosh(x)`` (eigenvalue 3)."""
    return SQRT_3_2 * np.tanh(x) / np.cosh(x)


def _denominator(x, b):
    d = np.cosh(x) - b
    if np.any(d <= 0.0):
        raise SingularConfiguration(f"profile denominator vanishes for b={b}")
    return d


def _profile(x, b):
    x = np.asarray(x, dtype=float)
    return np.sinh(x) / _denominator(x, b)


def _profile_dx(x, b):
    x = np.asarray(x, dtype=float)
    return (1.0 - b * np.cosh(x)) / _denominator(x, b) ** 2


def _profile_dxx(x, b):
    x = np.asarray(x, dtype=float)
    return -np.sinh(x) * (2.0 - b * b - b * np.cosh(x)) / _denominator(x, b) ** 3


def _profile_db(x, b):
    x = np.asarray(x, dtype=float)
    return np.sinh(x) / _denominator(x, b) ** 2


def tau_solution(x, state: TauState):
    """Deformed kink ``(e^{2x}-1)/(e^{2x}+1 +/- e^{x-3 tau})``."""
    return _profile(x, state.b)


def tau_solution_dtau(x, state: TauState):
    # db/dtau = -3 b
    return -3.0 * state.b * _profile_db(x, state.b)


def tau_solution_dx(x, state: TauState):
    return _profile_dx(x, state.b)


def tau_solution_dxx(x, state: TauState):
    return _profile_dxx(x, state.b)


def diffusion_residual(x, state: TauState):
    """``dPhi/dtau - Phi'' + 2 Phi (Phi^2 - 1)`` from the closed-form derivatives."""
    phi = tau_solution(x, state)
    return tau_solution_dtau(x, state) - tau_solution_dxx(x, state) + 2.0 * phi * (phi * phi - 1.0)


def deformed_profile(x, amp: InternalModeAmplitude):
    """Deformed kink ``(e^{2x}-1)/(e^{2x}+1-sqrt(6) q e^x) ~ tanh x + q sigma(x)``."""
    return _profile(x, amp.q_bar)


def deformed_profile_dx(x, amp: InternalModeAmplitude):
    return _profile_dx(x, amp.q_bar)


def deformed_profile_dq(x, amp: InternalModeAmplitude):
    return SQRT_3_2 * _profile_db(x, amp.q_bar)


def deformed_energy(amp: InternalModeAmplitude) -> float:
    """Closed-form static energy of :func:`deformed_profile`.

    ``E = 4/3 + qb^2/(1-qb^2) + qb^3 arccos(-qb) / (1-qb^2)^{3/2}``,
    which grows without bound as ``qb -> 1`` where the profile develops a
    pole at ``x = 0``.  Small amplitudes give ``4/3 + (3/2) q^2 + O(q^3)``.
    """
    b = amp.q_bar
    one_minus = 1.0 - b * b
    return float(4.0 / 3.0 + b * b / one_minus + b ** 3 * np.arccos(-b) / one_minus ** 1.5)


def energy_density(profile: FieldProfile, model: FieldModel) -> np.ndarray:
    grad = first_derivative4(profile)
    return 0.5 * grad * grad + model.U(profile.values)


def energy_functional(profile: FieldProfile, model: FieldModel, vacuum_tol: float = 1e-6) -> float:
    """Static energy ``int [(1/2) Phi'^2 + U(Phi)] dx`` of a profile.

    Both grid ends must sit within ``vacuum_tol`` of a model vacuum.
    """
    vacua = np.array([model.u_minus, model.u_plus])
    for end in (profile.values[0], profile.values[-1]):
        if np.min(np.abs(end - vacua)) > vacuum_tol:
            raise UsageError(f"profile end value {end} is not a vacuum of {model.name}")
    return integrate(energy_density(profile, model), profile.grid)


def _vacuum_profile(grid: Grid1D, values):
    return FieldProfile(grid, values, FixedVacuum(-1.0), FixedVacuum(1.0))


def default_grid(half_width: float = 25.0, h: float = 0.005) -> Grid1D:
    return Grid1D.from_spacing(-half_width, half_width, h)


def energy_by_quadrature(amp: InternalModeAmplitude, grid: Grid1D | None = None) -> float:
    """:func:`energy_functional` of :func:`deformed_profile` on ``grid``."""
    grid = default_grid() if grid is None else grid
    return energy_functional(_vacuum_profile(grid, deformed_profile(grid.x, amp)), make_phi4())


def verify_orthogonality(amp: InternalModeAmplitude, grid: Grid1D | None = None) -> float:
    """``<dPhi/dx, dPhi/dq>`` on the grid; zero for an exact ansatz."""
    grid = default_grid() if grid is None else grid
    x = grid.x
    fx = _vacuum_profile(grid, deformed_profile_dx(x, amp))
    fq = _vacuum_profile(grid, deformed_profile_dq(x, amp))
    return inner_product(fx, fq)


def verify_gauge_tau(state: TauState, grid: Grid1D | None = None, dtau: float = 1e-3) -> float:
    """Gauge quotient ``-<Phi_tau^2>^{-1} dE/dtau`` along the tau family.

    ``dE/dtau`` is a central difference of :func:`energy_functional`; the
    τ-derivative inside the norm is analytic.  Equals 1 up to ``O(dtau^2)``.
    """
    grid = default_grid() if grid is None else grid
    model = make_phi4()
    x = grid.x

    def energy(tau):
        s = TauState(tau, state.branch)
        return energy_functional(_vacuum_profile(grid, tau_solution(x, s)), model)

    dE = (energy(state.tau + dtau) - energy(state.tau - dtau)) / (2.0 * dtau)
    phi_tau = tau_solution_dtau(x, state)
    return -dE / integrate(phi_tau * phi_tau, grid)


def lattice_residual(state_branch: Branch = Branch.PLUS, x_range=(-8.0, 8.0),
                     tau_range=(0.5, 3.0), h: float = 1e-3, dtau: float = 1e-3,
                     norm: str = "l2") -> float:
    """Norm of the diffusion residual with central finite differences.

    ``tau_solution`` is sampled on the lattice ``x_i = x0 + i h``,
    ``tau_j = t0 + j dtau`` and ``dPhi/dtau - Phi'' + 2 Phi (Phi^2 - 1)`` is
    formed with second-order central differences at interior lattice points.
    The result is ``O(h^2 + dtau^2)``.  ``norm`` is ``"l2"`` (the discrete
    ``sqrt(sum r^2 h dtau)``, which averages rounding noise) or ``"max"``.
    """
    if norm not in ("l2", "max"):
        raise UsageError("norm must be 'l2' or 'max'")
    nx = int(round((x_range[1] - x_range[0]) / h)) + 1
    nt = int(round((tau_range[1] - tau_range[0]) / dtau)) + 1
    x = np.linspace(x_range[0], x_range[1], nx)
    taus = np.linspace(tau_range[0], tau_range[1], nt)
    sign = -1.0 if state_branch is Branch.PLUS else 1.0
    sh, ch = np.sinh(x)[None, :], np.cosh(x)[None, :]
    worst = 0.0
    total = 0.0
    block = 128
    # interior tau rows j = 1 .. nt-2, processed in blocks with a one-row halo
    for j0 in range(1, nt - 1, block):
        j1 = min(j0 + block, nt - 1)
        b = sign * 0.5 * np.exp(-3.0 * taus[j0 - 1:j1 + 1])[:, None]
        phi = sh / (ch - b)
        phi_t = (phi[2:, 1:-1] - phi[:-2, 1:-1]) / (2.0 * dtau)
        phi_xx = (phi[1:-1, 2:] - 2.0 * phi[1:-1, 1:-1] + phi[1:-1, :-2]) / h ** 2
        mid = phi[1:-1, 1:-1]
        res = phi_t - phi_xx + 2.0 * mid * (mid * mid - 1.0)
        worst = max(worst, float(np.max(np.abs(res))))
        total += float(np.sum(res * res))
    return worst if norm == "max" else float(np.sqrt(total * h * dtau))
