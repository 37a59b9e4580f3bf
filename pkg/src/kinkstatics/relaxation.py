"""Two-soliton configurations from the gauge-fixed nonlinear diffusion equation.

On the half line ``x <= 0`` the pair configuration obeys::

    -Phi'' + U'(Phi) = s(r) dPhi/dr,   s(r) = +/- (2 m^2 a^2 / M) exp(-2 m r)

with the upper sign for a kink-antikink pair (Neumann condition at the pair
centre) and the lower sign for a kink-kink pair (Dirichlet condition).  The
separation parameter ``r`` plays the role of time; in this gauge ``2 r`` is
the distance between the solitons once they are well separated.

Marching toward smaller ``r`` is a gradient descent of the energy for the
attractive kink-antikink channel and an ascent, i.e. a backward-diffusion
problem, for the repulsive kink-kink channel.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import solve_banded

from .errors import StepFailure, UnsupportedConfiguration, UsageError
from .exact_phi4 import energy_density
from .grid import (Dirichlet, FieldProfile, FixedVacuum, Grid1D, Neumann, fluctuation_operator,
                   integrate, lowest_eigenpairs, second_derivative)
from .model import FieldModel, asymptotics, kink_mass

log = logging.getLogger(__name__)


class PairKind(Enum):
    """Pair symmetry.  ``sign`` is the upper (+1) / lower (-1) sign of the gauge."""

    KINK_ANTIKINK = "ka"
    KINK_KINK = "kk"

    @property
    def sign(self) -> float:
        return 1.0 if self is PairKind.KINK_ANTIKINK else -1.0


def _check_kind(model: FieldModel, kind: PairKind):
    if kind is PairKind.KINK_KINK and not model.supports_kink_kink:
        raise UnsupportedConfiguration(
            f"kink-kink pairs need a periodic potential; {model.name} is not periodic")


@dataclass(frozen=True)
class _ModelData:
    m: float
    a: float
    M: float


_cache: dict = {}


def model_data(model: FieldModel) -> _ModelData:
    key = model.name
    if key not in _cache:
        tail = asymptotics(model)
        _cache[key] = _ModelData(tail.m, tail.a, kink_mass(model))
    return _cache[key]


@dataclass
class RelaxationConfig:
    """Numerical settings of a relaxation run.

    ``theta`` selects the implicit scheme (0.5 Crank-Nicolson, 1 backward
    Euler); ``None`` means Crank-Nicolson for kink-antikink runs, preceded by
    ``startup_steps`` backward-Euler steps that remove the mismatch of the
    superposition seed, and backward Euler for kink-kink runs.  Kink-kink
    steps are enlarged to at least ``4 |s(r)| / gap`` (``gap`` being the
    lowest non-zero fluctuation eigenvalue), which keeps every fast mode
    damped; once that exceeds ``dr_max`` the run stops.  A kink-antikink step
    whose Newton iteration fails is retried with half the step, at most
    ``max_halvings`` times.
    """

    r_start: float
    r_end: float
    grid: Grid1D
    dr: float = 0.005
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    record_every: int = 1
    theta: float | None = None
    startup_steps: int = 2
    dr_max: float | None = None
    max_halvings: int = 6

    def __post_init__(self):
        if not self.dr > 0:
            raise UsageError("dr must be positive")
        if not self.newton_tol > 0:
            raise UsageError("newton_tol must be positive")
        if self.r_start <= self.r_end:
            raise UsageError("r_start must exceed r_end (the march goes to smaller r)")
        if self.grid.x_max != 0.0:
            raise UsageError("relaxation grids live on [x_min, 0]")
        if self.record_every < 1:
            raise UsageError("record_every must be >= 1")

    @classmethod
    def for_model(cls, model: FieldModel, r_start: float, r_end: float, dr: float = 0.005,
                  x_margin: float = 12.0, h: float = 0.02, **kw) -> "RelaxationConfig":
        """Defaults scaled by the pion mass: spacing ``h/m``, ``x_min = -(r_start + x_margin/m)``."""
        m = model.mass_scale
        grid = Grid1D.from_spacing(-(r_start + x_margin / m), 0.0, h / m)
        return cls(r_start=r_start, r_end=r_end, grid=grid, dr=dr, **kw)


@dataclass
class Snapshot:
    r: float
    profile: FieldProfile


@dataclass
class EnergyTable:
    """Interaction potential along a relaxation run.

    ``phi_r_norm2`` is the full-line ``<Phi_r^2>``; ``natural_distance`` holds
    ``None`` where the profile no longer has a midpoint crossing.
    ``half_distance`` is half the natural distance (NaN where undefined) and
    ``phi_rho_norm2`` the norm of the derivative with respect to it,
    ``<Phi_r^2> / (d rho / d r)^2``.
    ``stopped`` is ``None`` for a run that reached ``r_end`` and a reason
    string otherwise.
    """

    model: str
    kind: PairKind
    r: np.ndarray
    E_full: np.ndarray
    dE_dr: np.ndarray
    gauge_lhs: np.ndarray
    gauge_rhs: np.ndarray
    natural_distance: list
    phi_r_norm2: np.ndarray
    half_distance: np.ndarray
    phi_rho_norm2: np.ndarray
    stopped: str | None = None

    COLUMNS = ("r", "E_full", "dE_dr", "gauge_lhs", "gauge_rhs", "natural_distance")

    def rows(self):
        for i in range(len(self.r)):
            yield (float(self.r[i]), float(self.E_full[i]), float(self.dE_dr[i]),
                   float(self.gauge_lhs[i]), float(self.gauge_rhs[i]), self.natural_distance[i])

    def at(self, r: float) -> int:
        """Index of the tabulated separation closest to ``r``."""
        return int(np.argmin(np.abs(self.r - r)))


def interaction_fit(table: EnergyTable, mass: float, lo: float, hi: float,
                    abscissa: str = "natural") -> tuple[float, float]:
    """Least-squares fit ``log|E - 2M| = log(amplitude) + slope * rho`` on ``[lo, hi]``.

    ``abscissa`` is ``"natural"`` (half the natural distance) or ``"label"``
    (the separation parameter ``r``).  The first tabulated row, the
    unrelaxed seed, is never used.
    """
    if abscissa == "natural":
        rho = table.half_distance
    elif abscissa == "label":
        rho = table.r
    else:
        raise UsageError(f"abscissa must be 'natural' or 'label', got {abscissa!r}")
    sel = np.isfinite(rho) & (rho >= lo) & (rho <= hi)
    sel[0] = False
    if np.count_nonzero(sel) < 3:
        raise UsageError(f"fewer than three rows with {abscissa} abscissa in [{lo}, {hi}]")
    slope, icpt = np.polyfit(rho[sel], np.log(np.abs(table.E_full[sel] - 2.0 * mass)), 1)
    return float(slope), float(np.exp(icpt))


def boundary_conditions(model: FieldModel, kind: PairKind):
    right = Neumann(0.0) if kind is PairKind.KINK_ANTIKINK else Dirichlet(0.0)
    return FixedVacuum(model.u_minus), right


def initial_pair_profile(model: FieldModel, kind: PairKind, r: float, grid: Grid1D) -> Snapshot:
    """Superposition of a kink at ``-r`` and its mirror image at ``+r``."""
    _check_kind(model, kind)
    m = model.mass_scale
    if r < 3.0 / m:
        raise UsageError(f"superposition seed needs r >= 3/m = {3.0 / m}, got {r}")
    x = grid.x
    if kind is PairKind.KINK_ANTIKINK:
        values = model.kink(x + r) + model.kink(r - x) - model.u_plus
    else:
        values = model.kink(x + r) - model.kink(r - x)
    values = np.asarray(values, dtype=float)
    values[0] = model.u_minus
    if kind is PairKind.KINK_KINK:
        values[-1] = 0.0
    left, right = boundary_conditions(model, kind)
    return Snapshot(r, FieldProfile(grid, values, left, right))


def gauge_source(model: FieldModel, kind: PairKind, r: float) -> float:
    """Gauge factor ``s(r) = +/- (2 m^2 a^2 / M) exp(-2 m r)``."""
    d = model_data(model)
    return kind.sign * 2.0 * d.m ** 2 * d.a ** 2 / d.M * np.exp(-2.0 * d.m * r)


def static_residual(profile: FieldProfile, model: FieldModel) -> np.ndarray:
    """``-Phi'' + U'(Phi)`` at every node."""
    return -second_derivative(profile) + model.dU(profile.values)


def half_line_energy(profile: FieldProfile, model: FieldModel) -> float:
    return integrate(energy_density(profile, model), profile.grid)


def _free_slice(profile: FieldProfile):
    lo = 1 if not isinstance(profile.bc_left, Neumann) else 0
    hi = profile.grid.n_points - (1 if not isinstance(profile.bc_right, Neumann) else 0)
    return slice(lo, hi)


def _jacobian_bands(profile: FieldProfile, model: FieldModel, diag_shift: float, theta: float):
    """Banded Jacobian of ``diag_shift*(Phi_old - Phi) - theta R(Phi)`` on the free nodes."""
    h2 = profile.grid.h ** 2
    n = profile.grid.n_points
    main = -diag_shift - theta * (2.0 / h2 + model.d2U(profile.values))
    up = np.full(n, theta / h2)    # up[i] = J[i, i+1]
    lo = np.full(n, theta / h2)    # lo[i] = J[i, i-1]
    # Neumann mirror ghosts double the coupling to the first interior node
    if isinstance(profile.bc_left, Neumann):
        up[0] *= 2.0
    if isinstance(profile.bc_right, Neumann):
        lo[-1] *= 2.0
    sl = _free_slice(profile)
    main, up, lo = main[sl], up[sl], lo[sl]
    ab = np.zeros((3, main.size))
    ab[0, 1:] = up[:-1]
    ab[1] = main
    ab[2, :-1] = lo[1:]
    return ab


def evolve_step(snap: Snapshot, dr: float, model: FieldModel, kind: PairKind,
                config: RelaxationConfig, theta: float = 0.5, guess=None) -> Snapshot:
    """One implicit step from ``r`` to ``r - dr``.

    Solves ``s(r - theta dr) (Phi_old - Phi_new) / dr = theta R(Phi_new) +
    (1 - theta) R(Phi_old)`` with ``R = -Phi'' + U'(Phi)`` by damped Newton
    iteration on the tridiagonal Jacobian.
    """
    if not dr > 0:
        raise UsageError("dr must be positive")
    old = snap.profile
    s = gauge_source(model, kind, snap.r - theta * dr)
    shift = s / dr
    r_old = static_residual(old, model)
    sl = _free_slice(old)
    values = np.array(old.values if guess is None else guess, dtype=float)
    values[0], values[-1] = old.values[0], old.values[-1]

    def residual(v):
        prof = old.with_values(v)
        return shift * (old.values - v) - theta * static_residual(prof, model) - (1.0 - theta) * r_old

    g = residual(values)
    g_norm = np.max(np.abs(g[sl]))
    # rounding floor of the discrete residual; below it the Jacobian's
    # conditioning (slow mode ~ s/dr) makes the update size meaningless
    floor = 64.0 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(values)))) / old.grid.h ** 2
    for it in range(config.newton_max_iter):
        ab = _jacobian_bands(old.with_values(values), model, shift, theta)
        delta = -solve_banded((1, 1), ab, g[sl])
        lam = 1.0
        while True:
            trial = values.copy()
            trial[sl] += lam * delta
            g_trial = residual(trial)
            trial_norm = np.max(np.abs(g_trial[sl]))
            # full Newton steps may raise the max-norm transiently; damp only blow-ups
            if np.isfinite(trial_norm) and (trial_norm <= 4.0 * g_norm or lam < 1e-3):
                break
            lam *= 0.5
        values, g, g_norm = trial, g_trial, trial_norm
        log.debug("newton r=%.6g it=%d |G|=%.3e |dPhi|=%.3e lam=%g", snap.r, it, g_norm,
                  np.max(np.abs(delta)), lam)
        if not np.isfinite(g_norm):
            break
        if lam * np.max(np.abs(delta)) <= config.newton_tol or g_norm <= floor:
            return Snapshot(snap.r - dr, old.with_values(values))
    raise StepFailure(f"Newton did not converge in step from r={snap.r:.6g}", snap.r, float(g_norm))


def fast_mode_gap(model: FieldModel) -> float:
    """Lowest non-zero eigenvalue of the single-kink fluctuation operator."""
    key = ("gap", model.name)
    if key not in _cache:
        m = model.mass_scale
        grid = Grid1D.from_spacing(-40.0 / m, 40.0 / m, 0.02 / m)
        _cache[key] = lowest_eigenpairs(fluctuation_operator(model, grid), 2)[1][0]
    return _cache[key]


def natural_distance(snap: Snapshot, model: FieldModel) -> float | None:
    """Twice the distance from the pair centre to the nearest midpoint crossing."""
    mid = 0.5 * (model.u_plus + model.u_minus)
    x = snap.profile.grid.x
    d = snap.profile.values - mid
    idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
    exact = np.nonzero(d == 0.0)[0]
    exact = exact[exact < x.size - 1]
    candidates = []
    if idx.size:
        i = idx[-1]
        candidates.append(x[i] - d[i] * (x[i + 1] - x[i]) / (d[i + 1] - d[i]))
    if exact.size:
        candidates.append(x[exact[-1]])
    if not candidates:
        return None
    return float(2.0 * abs(max(candidates)))


def collinearity_check(snap_a: Snapshot, snap_b: Snapshot, model: FieldModel) -> float | None:
    """Cosine between the static residual and ``dPhi/dr`` at the midpoint profile."""
    dr = snap_a.r - snap_b.r
    if dr == 0.0:
        return None
    phi_r = (snap_a.profile.values - snap_b.profile.values) / dr
    mid = snap_a.profile.with_values(0.5 * (snap_a.profile.values + snap_b.profile.values))
    res = static_residual(mid, model)
    sl = _free_slice(mid)
    res[:sl.start] = 0.0
    res[sl.stop:] = 0.0
    grid = mid.grid
    nr = integrate(res * res, grid)
    np_ = integrate(phi_r * phi_r, grid)
    if nr <= 1e-300 or np_ <= 1e-300:
        return None
    return integrate(res * phi_r, grid) / np.sqrt(nr * np_)


def _step(snap, dr, model, kind, config, theta, guess):
    # kink-kink failures mark the stability limit and are never retried
    halvings = config.max_halvings if kind is PairKind.KINK_ANTIKINK else 0
    for attempt in range(halvings + 1):
        try:
            return evolve_step(snap, dr, model, kind, config, theta=theta, guess=guess)
        except StepFailure:
            if attempt == halvings:
                raise
            dr *= 0.5
            guess = None
            log.debug("halving step at r=%.6g to %.3g", snap.r, dr)


def _snap_to_end(snap: Snapshot, config: RelaxationConfig) -> Snapshot:
    # accumulated step sums miss r_end by rounding; land on it exactly
    if abs(snap.r - config.r_end) <= 1e-9 * config.dr:
        snap.r = config.r_end
    return snap


@dataclass
class _Run:
    r: list = field(default_factory=list)
    values: list = field(default_factory=list)
    stopped: str | None = None


def _march(model, kind, config, seed: Snapshot) -> tuple[_Run, list]:
    run = _Run()
    snaps = [seed]
    run.r.append(seed.r)
    run.values.append(seed.profile.values)
    if kind is PairKind.KINK_ANTIKINK:
        theta = 0.5 if config.theta is None else config.theta
    else:
        theta = 1.0 if config.theta is None else config.theta
    gap = fast_mode_gap(model) if kind is PairKind.KINK_KINK else None
    dr_max = float("inf") if config.dr_max is None else config.dr_max
    if kind is PairKind.KINK_KINK and config.dr_max is None:
        dr_max = 0.25 / model.mass_scale
    snap = seed
    k = 0
    prev = None
    while snap.r > config.r_end + 1e-12:
        dr = config.dr
        if gap is not None:
            dr = max(dr, 4.0 * abs(gauge_source(model, kind, snap.r)) / gap)
            if dr > dr_max:
                run.stopped = f"stability limit: step {dr:.3g} > dr_max at r={snap.r:.6g}"
                break
        dr = min(dr, snap.r - config.r_end)
        th = 1.0 if (config.theta is None and k < config.startup_steps) else theta
        guess = None
        if prev is not None and kind is PairKind.KINK_ANTIKINK:
            guess = snap.profile.values + (snap.profile.values - prev) * dr / (run.r[-2] - run.r[-1])
        try:
            new = _step(snap, dr, model, kind, config, th, guess)
        except StepFailure as exc:
            if kind is PairKind.KINK_KINK:
                run.stopped = f"stability limit: Newton failed at r={exc.r:.6g}"
                break
            raise
        prev = snap.profile.values
        snap = _snap_to_end(new, config)
        k += 1
        run.r.append(snap.r)
        run.values.append(snap.profile.values)
        snaps.append(snap)
    if run.stopped:
        log.info("%s %s run stopped: %s", model.name, kind.value, run.stopped)
    return run, snaps


def _table(model, kind, config, run: _Run, snaps) -> tuple[EnergyTable, list]:
    r = np.array(run.r)
    vals = np.array(run.values)
    grid = config.grid
    left, right = boundary_conditions(model, kind)
    energies = np.array([2.0 * half_line_energy(FieldProfile(grid, v, left, right), model)
                         for v in vals])
    if r.size >= 3:
        dE = np.gradient(energies, r)
        phi_r = np.gradient(vals, r, axis=0)
    elif r.size == 2:
        dE = np.full(2, (energies[0] - energies[1]) / (r[0] - r[1]))
        phi_r = np.repeat(((vals[0] - vals[1]) / (r[0] - r[1]))[None, :], 2, axis=0)
    else:
        dE = np.full(1, np.nan)
        phi_r = np.full_like(vals, np.nan)
    norm2 = np.array([2.0 * integrate(p * p, grid) for p in phi_r])
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = dE / norm2
    rhs = np.array([gauge_source(model, kind, ri) for ri in r])
    nat = [natural_distance(s, model) for s in snaps]
    rho = np.array([np.nan if d is None else 0.5 * d for d in nat])
    with np.errstate(divide="ignore", invalid="ignore"):
        drho = np.gradient(rho, r) if r.size >= 2 else np.full(r.size, np.nan)
        norm_rho = norm2 / drho ** 2
    keep = np.arange(0, r.size, config.record_every)
    if keep[-1] != r.size - 1:
        keep = np.append(keep, r.size - 1)
    table = EnergyTable(
        model=model.name, kind=kind, r=r[keep], E_full=energies[keep], dE_dr=dE[keep],
        gauge_lhs=lhs[keep], gauge_rhs=rhs[keep], natural_distance=[nat[i] for i in keep],
        phi_r_norm2=norm2[keep], half_distance=rho[keep], phi_rho_norm2=norm_rho[keep],
        stopped=run.stopped)
    return table, [snaps[i] for i in keep]


def solve_pair(model: FieldModel, kind: PairKind, config: RelaxationConfig):
    """March the pair configuration from ``r_start`` down to ``r_end``.

    Returns ``(EnergyTable, snapshots)``.  Kink-antikink failures propagate
    as :class:`StepFailure`; kink-kink runs end at the stability limit and
    record the reason in ``EnergyTable.stopped``.
    """
    _check_kind(model, kind)
    m = model.mass_scale
    if config.grid.x_min > -(config.r_start + 10.0 / m):
        raise UsageError("grid must extend to x_min <= -(r_start + 10/m)")
    seed = initial_pair_profile(model, kind, config.r_start, config.grid)
    run, snaps = _march(model, kind, config, seed)
    return _table(model, kind, config, run, snaps)


def annihilation_run(model: FieldModel, config: RelaxationConfig) -> Snapshot:
    """Follow the kink-antikink descent as far as the stepper converges."""
    kind = PairKind.KINK_ANTIKINK
    seed = initial_pair_profile(model, kind, config.r_start, config.grid)
    snap = seed
    theta = 0.5 if config.theta is None else config.theta
    k = 0
    while snap.r > config.r_end + 1e-12:
        dr = min(config.dr, snap.r - config.r_end)
        th = 1.0 if (config.theta is None and k < config.startup_steps) else theta
        try:
            snap = _snap_to_end(_step(snap, dr, model, kind, config, th, None), config)
        except StepFailure:
            log.info("annihilation run stopped at r=%.6g", snap.r)
            break
        k += 1
    return snap
