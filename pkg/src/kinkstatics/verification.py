"""Self-checks run by ``kinkstatics verify``.

Each check computes one quantity and compares it with a reference value at
a stated tolerance.  The reference is either a closed form or an
independent numerical route to the same number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import asymptotic as asy
from . import exact_phi4 as ex
from .errors import KinkStaticsError
from .grid import Grid1D, fluctuation_operator, lowest_eigenpairs
from .model import FieldModel, kink_mass
from .relaxation import (PairKind, RelaxationConfig, interaction_fit, model_data, solve_pair)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _within(name, value, target, tol, relative=False):
    err = abs(value - target) / (abs(target) if relative else 1.0)
    kind = "rel" if relative else "abs"
    return Check(name, bool(err <= tol), f"value={value:.10g} target={target:.10g} {kind}err={err:.3g} tol={tol:g}")


def _mass(model):
    d = model_data(model)
    coarse, fine = kink_mass(model), kink_mass(model, x_cut=30.0 / d.m)
    return _within("kink mass, two quadrature windows", coarse, fine, 1e-8, relative=True)


def _spectrum(model):
    d = model_data(model)
    grid = Grid1D.from_spacing(-20.0 / d.m, 20.0 / d.m, 0.01 / d.m)
    pairs = lowest_eigenpairs(fluctuation_operator(model, grid), 2)
    out = [_within("zero mode eigenvalue", pairs[0][0], 0.0, 1e-3 * d.m ** 2)]
    if model.name == "phi4":
        out.append(_within("shape mode eigenvalue", pairs[1][0], 3.0, 1e-3))
    return out


def _phi4_exact():
    out = []
    worst = max(abs(ex.deformed_energy(ex.InternalModeAmplitude(q))
                    - ex.energy_by_quadrature(ex.InternalModeAmplitude(q)))
                for q in (-0.7, -0.3, 0.0, 0.3, 0.7))
    out.append(Check("closed-form energy vs quadrature", worst <= 1e-6, f"max diff={worst:.3g} tol=1e-06"))
    worst = max(abs(ex.verify_orthogonality(ex.InternalModeAmplitude(q))) for q in (-0.5, 0.25, 0.5))
    out.append(Check("orthogonality of shape deformation", worst <= 1e-8, f"max={worst:.3g} tol=1e-08"))
    for branch in ex.Branch:
        g = ex.verify_gauge_tau(ex.TauState(2.0, branch))
        out.append(_within(f"tau gauge quotient ({branch.value} branch)", g, 1.0, 1e-4))
    x = np.linspace(-8.0, 8.0, 161)
    res = max(np.max(np.abs(ex.diffusion_residual(x, ex.TauState(t, b))))
              for t in (0.5, 1.5, 3.0) for b in ex.Branch)
    out.append(Check("exact diffusion solution residual", res <= 1e-10, f"max={res:.3g} tol=1e-10"))
    return out


def _relaxation(model, kind, r_start, lo, hi):
    d = model_data(model)
    cfg = RelaxationConfig.for_model(model, r_start, lo - 0.1 / d.m)
    table, _ = solve_pair(model, kind, cfg)
    slope, amp = interaction_fit(table, d.M, lo, hi)
    tag = f"{model.name} {kind.value}"
    out = [_within(f"{tag}: interaction slope", slope, -2.0 * d.m, 0.05, relative=True),
           _within(f"{tag}: interaction amplitude", amp, 2.0 * d.m * d.a ** 2, 0.10, relative=True)]
    sel = np.isfinite(table.half_distance) & (table.half_distance >= 3.0)
    sel[0] = False
    dev = float(np.max(np.abs(table.phi_rho_norm2[sel] / (2.0 * d.M) - 1.0)))
    out.append(Check(f"{tag}: <Phi_rho^2> = 2M for rho >= 3", dev <= 0.05, f"max rel dev={dev:.3g} tol=0.05"))
    sign = np.sign(table.E_full[1:] - 2.0 * d.M)
    want = -1.0 if kind is PairKind.KINK_ANTIKINK else 1.0
    out.append(Check(f"{tag}: sign of E - 2M", bool(np.all(sign == want)), f"expected {want:+.0f}"))
    return out


def _asymptotic(model, kinds):
    d = model_data(model)
    out = []
    for kind in kinds:
        eta = asy.eta_profile(model, 4.0 / d.m, kind)
        res = float(np.max(np.abs(asy.eta_residual(model, eta))))
        out.append(Check(f"{kind.value}: distortion ODE residual", res <= 1e-8, f"max={res:.3g} tol=1e-08"))
        b4, b5 = (asy.ab_coefficients(model, r / d.m, kind).B_scaled for r in (8.0, 10.0))
        out.append(_within(f"{kind.value}: B exp(-2mr) converged", b4, b5, 0.05, relative=True))
        lead = -kind.sign * d.M ** 2 / (2.0 * d.m ** 3 * d.a ** 2)
        out.append(_within(f"{kind.value}: B exp(-2mr) leading value", b5, lead, 0.02, relative=True))
    return out


def run_checks(model: FieldModel) -> list[Check]:
    """All applicable checks for ``model``; inner failures become failed checks."""
    ka, kk = PairKind.KINK_ANTIKINK, PairKind.KINK_KINK
    d = model_data(model)
    steps: list[tuple[str, Callable]] = [("mass", lambda: [_mass(model)]),
                                         ("spectrum", lambda: _spectrum(model))]
    if model.name == "phi4":
        steps.append(("exact solutions", _phi4_exact))
    steps.append(("ka relaxation", lambda: _relaxation(model, ka, 8.0 / d.m, 5.0 / d.m, 7.0 / d.m)))
    kinds = [ka]
    if model.supports_kink_kink:
        kinds.append(kk)
        steps.append(("kk relaxation", lambda: _relaxation(model, kk, 6.0 / d.m, 2.5 / d.m, 4.0 / d.m)))
    steps.append(("asymptotics", lambda: _asymptotic(model, kinds)))
    results: list[Check] = []
    for label, fn in steps:
        try:
            results.extend(fn())
        except KinkStaticsError as exc:
            results.append(Check(label, False, f"{type(exc).__name__}: {exc}"))
    return results
