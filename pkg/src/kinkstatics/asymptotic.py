"""Large-distance perturbation theory for a soliton pair.

To the left of the pair centre the configuration is a single kink plus a
small distortion, ``Phi(x, r) = u_c(x + r) + eta(x + r)``.  With the zero
mode ``u_c'`` the linearised static equation reduces to the first-order ODE::

    -u_c' eta' + u_c'' eta = (M(x) / 2M) dE/dr,    M(x) = int_{-inf}^x u_c'^2

whose solution, fixed by the symmetry condition at the pair centre, feeds
the energy relation ``E - 2M = A(r) + B(r) (dE/dr / 2M)^2``.  At leading
exponential order ``A`` cancels and the relation integrates to
``E = 2M -/+ 2 m a^2 exp(-2 m r)`` (upper sign: kink-antikink).

Integrands such as ``M / u_c'^2`` grow like ``exp(2 m x)``; they are always
evaluated through logarithms with the exponential factor ``exp(2 m r)``
pulled out, so that nothing overflows for any ``r`` in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .errors import SingularBoundary, UsageError
from .grid import Grid1D, cumulative_quad, first_derivative4, FieldProfile
from .model import AccumulatedMass, FieldModel
from .relaxation import PairKind, _check_kind, model_data


_masses: dict = {}


def _mass_profile(model: FieldModel) -> AccumulatedMass:
    # keyed by name, like relaxation.model_data
    if model.name not in _masses:
        _masses[model.name] = AccumulatedMass(model)
    return _masses[model.name]


def _log_abs_du(model: FieldModel, x):
    """``log|u_c'(x)|`` with the exponential tail substituted where it underflows."""
    d = model_data(model)
    x = np.asarray(x, dtype=float)
    cut = 20.0 / d.m
    with np.errstate(divide="ignore", under="ignore"):
        direct = np.log(np.abs(model.dkink(np.clip(x, -cut, cut))))
    right = np.log(d.a * d.m) - d.m * x
    # left tail continued from its value at -cut, so no amplitude is needed there
    left = direct + d.m * (x + cut)
    return np.where(x > cut, right, np.where(x < -cut, left, direct))


def _scaled_ratio(model: FieldModel, x, r: float, power: int = 1):
    """``M(x)^power / u_c'(x)^2 * exp(-2 m r)`` without overflow.

    Far to the left, where ``M = u_c'^2 / 2m`` holds to rounding, the ratio
    is taken from that limit directly.
    """
    d = model_data(model)
    mass = _mass_profile(model)
    x = np.asarray(x, dtype=float)
    cut = mass.cut
    with np.errstate(divide="ignore", under="ignore"):
        log_m = np.log(mass(np.clip(x, -cut, None)))
    lr = power * log_m - 2.0 * _log_abs_du(model, x) - 2.0 * d.m * r
    out = np.exp(lr)
    if power == 1:
        far = np.exp(-2.0 * d.m * r) / (2.0 * d.m)
    else:
        # M^2 / u'^2 = u'^2 / (2m)^2 on the far left
        far = np.exp(2.0 * _log_abs_du(model, x) - 2.0 * d.m * r) / (2.0 * d.m) ** 2
    return np.where(x < -cut, far, out)


def asymptotic_energy(model: FieldModel, r, kind: PairKind):
    """``2M -/+ 2 m a^2 exp(-2 m r)``, upper sign for kink-antikink."""
    _check_kind(model, kind)
    d = model_data(model)
    return 2.0 * d.M - kind.sign * 2.0 * d.m * d.a ** 2 * np.exp(-2.0 * d.m * np.asarray(r, float))


def asymptotic_slope(model: FieldModel, r, kind: PairKind):
    """``dE/dr`` of :func:`asymptotic_energy`."""
    d = model_data(model)
    return kind.sign * 4.0 * d.m ** 2 * d.a ** 2 * np.exp(-2.0 * d.m * np.asarray(r, float))


def eta_boundary(model: FieldModel, r: float, kind: PairKind, dEdr: float) -> tuple[float, float]:
    """Boundary data ``(eta(r), eta'(r))`` from the symmetry condition at the pair centre.

    Kink-antikink pairs have ``Phi'(0) = 0``, kink-kink pairs ``Phi(0) = 0``;
    the ODE evaluated at ``x = r`` supplies the other value.
    """
    _check_kind(model, kind)
    d = model_data(model)
    if r < 3.0 / d.m:
        raise UsageError(f"large-distance expansion needs r >= 3/m, got {r}")
    du, d2u, u = float(model.dkink(r)), float(model.d2kink(r)), float(model.kink(r))
    load = _mass_profile(model)(r) / (2.0 * d.M) * dEdr
    if kind is PairKind.KINK_ANTIKINK:
        if d2u == 0.0:
            raise SingularBoundary(f"u_c''({r}) vanishes")
        return (load - du * du) / d2u, -du
    if du == 0.0:
        raise SingularBoundary(f"u_c'({r}) vanishes")
    return -u, -(load + d2u * u) / du


@dataclass
class EtaProfile:
    """Distortion ``eta`` on a grid ending at ``x = r`` (``slope`` is ``eta'``, analytic)."""

    r: float
    kind: PairKind
    grid: Grid1D
    values: np.ndarray
    slope: np.ndarray
    dEdr_used: float


def eta_profile(model: FieldModel, r: float, kind: PairKind, dEdr: float | None = None,
                grid: Grid1D | None = None) -> EtaProfile:
    """Solve the first-order distortion equation on ``[x_min, r]``.

    ``eta(x) = u_c'(x) [eta(r)/u_c'(r) + (dE/dr / 2M) int_x^r M/u_c'^2]``.
    ``dEdr`` defaults to the slope of :func:`asymptotic_energy`; the default
    grid spans ``[-20/m, r]`` with spacing ``0.01/m``.
    """
    d = model_data(model)
    if dEdr is None:
        dEdr = float(asymptotic_slope(model, r, kind))
    if grid is None:
        grid = Grid1D.from_spacing(-20.0 / d.m, r, 0.01 / d.m)
    if abs(grid.x_max - r) > 1e-12 * max(1.0, abs(r)):
        raise UsageError("eta grid must end at x = r")
    eta_r, _ = eta_boundary(model, r, kind, dEdr)
    x = grid.x
    # I(x) e^{-2mr}, accumulated from x = r leftwards
    scaled = -cumulative_quad(lambda s: _scaled_ratio(model, s, r), x[::-1])[::-1]
    scale = np.exp(2.0 * d.m * r)
    du = model.dkink(x)
    coeff = eta_r / float(model.dkink(r)) + dEdr / (2.0 * d.M) * scaled * scale
    values = du * coeff
    ratio = _mass_profile(model)(x) / np.where(du == 0.0, np.inf, du)
    slope = model.d2kink(x) * coeff - dEdr / (2.0 * d.M) * ratio
    values[-1] = eta_r
    return EtaProfile(r=r, kind=kind, grid=grid, values=values, slope=slope, dEdr_used=dEdr)


def eta_residual(model: FieldModel, eta: EtaProfile, analytic_slope: bool = False) -> np.ndarray:
    """Residual of the distortion ODE on the interior nodes.

    ``eta'`` is a fourth-order finite difference unless ``analytic_slope``.
    The two nodes at each end, where the stencil is one-sided, are dropped.
    """
    d = model_data(model)
    x = eta.grid.x
    if analytic_slope:
        slope = eta.slope
    else:
        slope = first_derivative4(FieldProfile(eta.grid, eta.values))
    res = (-model.dkink(x) * slope + model.d2kink(x) * eta.values
           - _mass_profile(model)(x) / (2.0 * d.M) * eta.dEdr_used)
    return res[2:-2]


@dataclass(frozen=True)
class ABCoefficients:
    """Coefficients of ``E - 2M = A + B (dE/dr / 2M)^2``.

    ``B_scaled = B exp(-2 m r)`` is finite for every ``r``; ``B`` itself may
    overflow to ``inf`` when ``r`` exceeds about ``350/m``.
    """

    r: float
    kind: PairKind
    A: float
    B_scaled: float
    m: float

    @property
    def B(self) -> float:
        with np.errstate(over="ignore"):
            return float(self.B_scaled * np.exp(2.0 * self.m * self.r))


def _gl_panels(func, lo, hi, order: int = 12):
    """Gauss-Legendre integral of ``func(xs, row)`` over each ``[lo[i], hi[i]]``."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)[:, None]
    xs = 0.5 * (hi + lo)[:, None] + half * nodes
    return (func(xs) * weights).sum(axis=1) * half[:, 0]


def _tail_integral_scaled(model: FieldModel, rs: np.ndarray) -> np.ndarray:
    """``exp(-2 m r) int_{-inf}^r M^2 / u_c'^2`` for ascending ``rs``.

    The first value is a panel sum from far left; later ones use
    ``F(r_i) = F(r_{i-1}) exp(-2 m (r_i - r_{i-1})) + int_{r_{i-1}}^{r_i}``.
    """
    d = model_data(model)
    cut = _mass_profile(model).cut
    r0 = rs[0]
    lo = min(-cut, r0 - 40.0 / d.m)
    pts = np.linspace(lo, r0, int(np.ceil((r0 - lo) * d.m / 0.1)) + 1)
    body = cumulative_quad(lambda s: _scaled_ratio(model, s, r0, power=2), pts)[-1]
    # below lo: M^2/u'^2 = u'^2/(2m)^2, which decays like exp(2 m x)
    tail = float(np.exp(2.0 * _log_abs_du(model, lo) - 2.0 * d.m * r0)) / (2.0 * d.m) ** 3
    out = np.empty(rs.size)
    out[0] = body + tail
    if rs.size > 1:
        upper = rs[1:][:, None]
        panels = _gl_panels(lambda xs: _scaled_ratio(model, xs, upper, power=2), rs[:-1], rs[1:])
        decay = np.exp(-2.0 * d.m * np.diff(rs))
        for i in range(1, rs.size):
            out[i] = out[i - 1] * decay[i - 1] + panels[i - 1]
    return out


def _u_d2u_tail(model: FieldModel, rs: np.ndarray) -> np.ndarray:
    """``int_r^inf (u_c - u_plus) u_c''`` for ascending ``rs``; analytic beyond ``20/m``."""
    d = model_data(model)
    cut = max(rs[-1], 20.0 / d.m)
    f = lambda s: (model.kink(s) - model.u_plus) * model.d2kink(s)
    far = 0.5 * d.a ** 2 * d.m * np.exp(-2.0 * d.m * cut)
    if cut > rs[-1]:
        pts = np.linspace(rs[-1], cut, int(np.ceil((cut - rs[-1]) * d.m / 0.05)) + 1)
        far += cumulative_quad(f, pts)[-1]
    panels = _gl_panels(f, rs[:-1], rs[1:]) if rs.size > 1 else np.zeros(0)
    return far + np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]])


def ab_coefficients(model: FieldModel, r: float, kind: PairKind) -> ABCoefficients:
    """``A(r)`` and ``B(r)`` for the pair symmetry ``kind``."""
    _check_kind(model, kind)
    if r < 3.0 / model_data(model).m:
        raise UsageError(f"large-distance expansion needs r >= 3/m, got {r}")
    A, Bs = _ab_mesh(model, np.array([float(r)]), kind)
    return ABCoefficients(r=float(r), kind=kind, A=float(A[0]), B_scaled=float(Bs[0]),
                          m=model_data(model).m)


def _ab_mesh(model: FieldModel, rs: np.ndarray, kind: PairKind):
    """``A`` and ``B exp(-2 m r)`` on an ascending mesh."""
    d = model_data(model)
    mass = _mass_profile(model)
    du, d2u, u = model.dkink(rs), model.d2kink(rs), model.kink(rs)
    integral = _tail_integral_scaled(model, rs)
    if kind is PairKind.KINK_ANTIKINK:
        if np.any(du == 0.0) or np.any(d2u == 0.0):
            raise SingularBoundary("u_c' or u_c'' vanishes on the requested r values")
        A = -du ** 3 / d2u - 2.0 * mass.complement(rs)
        # M(r)^2 / (u' u'') e^{-2mr}, via logs
        lg = 2.0 * np.log(mass(rs)) - np.log(np.abs(du)) - np.log(np.abs(d2u)) - 2.0 * d.m * rs
        return A, np.sign(du * d2u) * np.exp(lg) + integral
    if np.any(du == 0.0):
        raise SingularBoundary("u_c' vanishes on the requested r values")
    A = u * u * d2u / du + 2.0 * _u_d2u_tail(model, rs)
    return A, integral


@dataclass
class PotentialCurve:
    """``E(r)`` from the energy relation, tabulated on a descending ``r`` mesh.

    ``stopped`` is ``None`` if ``r_lo`` was reached, else the reason the
    march ended (the radicand became negative).
    """

    model: str
    kind: PairKind
    r: np.ndarray
    E: np.ndarray
    A: np.ndarray
    B_scaled: np.ndarray
    stopped: str | None = None


def potential_from_ode(model: FieldModel, kind: PairKind, r_lo: float, r_hi: float,
                       dr: float = 1e-3) -> PotentialCurve:
    """Integrate ``dE/dr = +/- 2M sqrt((E - 2M - A)/B)`` down from ``r_hi``.

    The sign makes ``E -> 2M`` as ``r -> inf``: ``+`` for kink-antikink
    (``B < 0``, attraction), ``-`` for kink-kink (``B > 0``, repulsion).
    ``E(r_hi)`` is :func:`asymptotic_energy`.  Classic RK4; the coefficients
    are precomputed on the half-step mesh.
    """
    _check_kind(model, kind)
    d = model_data(model)
    if r_lo < 2.5 / d.m or r_hi <= r_lo:
        raise UsageError(f"need 2.5/m <= r_lo < r_hi, got [{r_lo}, {r_hi}]")
    n = int(np.ceil((r_hi - r_lo) / dr - 1e-9))
    h = (r_hi - r_lo) / n
    mesh = r_hi - 0.5 * h * np.arange(2 * n + 1)
    # the formulas stay defined down to r_lo >= 2.5/m
    A, Bs = (c[::-1] for c in _ab_mesh(model, mesh[::-1], kind))
    sigma = kind.sign

    def rhs(i, E):
        # (E - 2M - A)/B with the e^{2mr} factor of B removed
        rad = (E - 2.0 * d.M - A[i]) / Bs[i] * np.exp(-2.0 * d.m * mesh[i])
        if not rad >= 0.0:
            return None
        return sigma * 2.0 * d.M * np.sqrt(rad)

    E = np.empty(n + 1)
    E[0] = float(asymptotic_energy(model, r_hi, kind))
    stopped = None
    last = n
    for k in range(n):
        i = 2 * k
        k1 = rhs(i, E[k])
        k2 = None if k1 is None else rhs(i + 1, E[k] - 0.5 * h * k1)
        k3 = None if k2 is None else rhs(i + 1, E[k] - 0.5 * h * k2)
        k4 = None if k3 is None else rhs(i + 2, E[k] - h * k3)
        if k4 is None:
            stopped = f"negative radicand near r={mesh[i]:.6g}"
            last = k
            break
        # marching toward smaller r
        E[k + 1] = E[k] - h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    idx = slice(0, last + 1)
    return PotentialCurve(model=model.name, kind=kind, r=mesh[::2][idx], E=E[idx],
                          A=A[::2][idx], B_scaled=Bs[::2][idx], stopped=stopped)
