import dataclasses

import numpy as np
import pytest

from kinkstatics import PairKind, SingularBoundary, UnsupportedConfiguration, UsageError
from kinkstatics import asymptotic as asy
from kinkstatics.grid import Grid1D

KA, KK = PairKind.KINK_ANTIKINK, PairKind.KINK_KINK


def test_asymptotic_energy_examples(phi4, sg):
    assert asy.asymptotic_energy(phi4, 2.0, KA) - 8.0 / 3.0 == pytest.approx(-16 * np.exp(-8), rel=1e-6)
    assert asy.asymptotic_energy(phi4, 2.0, KA) - 8.0 / 3.0 == pytest.approx(-5.3674e-3, abs=1e-7)
    # 32 e^{-6} = 0.0793200...
    assert asy.asymptotic_energy(sg, 3.0, KK) - 16.0 == pytest.approx(32 * np.exp(-6), rel=1e-6)
    assert asy.asymptotic_energy(sg, 60.0, KA) == pytest.approx(16.0, abs=1e-12)
    with pytest.raises(UnsupportedConfiguration):
        asy.asymptotic_energy(phi4, 3.0, KK)


def test_slope_is_derivative(sg):
    r, e = 3.5, 1e-5
    fd = (asy.asymptotic_energy(sg, r + e, KK) - asy.asymptotic_energy(sg, r - e, KK)) / (2 * e)
    assert asy.asymptotic_slope(sg, r, KK) == pytest.approx(fd, rel=1e-7)


def test_eta_boundary_examples(phi4, sg):
    r = 3.0
    eta, deta = asy.eta_boundary(phi4, r, KA, 0.0)
    sech2 = 1.0 / np.cosh(r) ** 2
    assert eta == pytest.approx(-(sech2 ** 2) / (-2 * sech2 * np.tanh(r)), rel=1e-12)
    assert deta == pytest.approx(-sech2, rel=1e-12)
    eta, _ = asy.eta_boundary(sg, 8.0, KK, 0.0)
    assert eta == pytest.approx(4 * np.exp(-8.0), rel=1e-6)
    small = asy.eta_boundary(sg, 30.0, KK, float(asy.asymptotic_slope(sg, 30.0, KK)))
    assert max(abs(v) for v in small) < 1e-11
    with pytest.raises(UsageError):
        asy.eta_boundary(phi4, 1.0, KA, 0.0)


def test_singular_boundary(phi4):
    flat = dataclasses.replace(phi4, d2kink=lambda x: 0.0 * np.asarray(x, float))
    with pytest.raises(SingularBoundary):
        asy.eta_boundary(flat, 3.0, KA, 0.0)


@pytest.mark.parametrize("name,kind", [("phi4", KA), ("sine-gordon", KA), ("sine-gordon", KK)])
def test_eta_profile_solves_ode(name, kind):
    from kinkstatics import get_model
    model = get_model(name)
    m = model.mass_scale
    eta = asy.eta_profile(model, 4.0 / m, kind)
    assert np.max(np.abs(asy.eta_residual(model, eta))) <= 1e-8
    assert np.max(np.abs(asy.eta_residual(model, eta, analytic_slope=True))) <= 1e-10
    bnd = asy.eta_boundary(model, 4.0 / m, kind, eta.dEdr_used)
    assert eta.values[-1] == bnd[0]
    x = eta.grid.x
    tail = np.abs(eta.values[np.searchsorted(x, [-20.0 / m, -15.0 / m])])
    assert tail[0] < tail[1] < 1e-3


def test_eta_profile_custom_slope_and_grid(phi4):
    g = Grid1D.from_spacing(-8.0, 3.0, 0.005)
    measured = 1.1 * float(asy.asymptotic_slope(phi4, 3.0, KA))
    eta = asy.eta_profile(phi4, 3.0, KA, dEdr=measured, grid=g)
    assert eta.dEdr_used == measured
    assert np.max(np.abs(asy.eta_residual(phi4, eta))) <= 1e-8
    with pytest.raises(UsageError):
        asy.eta_profile(phi4, 3.0, KA, grid=Grid1D(-8.0, 2.0, 101))


def test_B_leading_value_and_convergence(phi4, sg):
    b = [asy.ab_coefficients(phi4, r, KA).B_scaled for r in (4.0, 5.0, 8.0)]
    assert abs(b[0] - b[1]) <= 0.05 * abs(b[1])
    assert b[2] == pytest.approx(-1.0 / 36.0, rel=1e-3)
    assert asy.ab_coefficients(sg, 12.0, KK).B_scaled == pytest.approx(2.0, rel=1e-3)
    assert asy.ab_coefficients(sg, 12.0, KA).B_scaled == pytest.approx(-2.0, rel=1e-3)


def test_B_definite_sign(sg):
    for r in np.arange(3.0, 10.0, 0.5):
        assert asy.ab_coefficients(sg, r, KK).B > 0
        assert asy.ab_coefficients(sg, r, KA).B < 0


def test_A_negligible(phi4, sg):
    for model, kind in ((phi4, KA), (sg, KA), (sg, KK)):
        m = model.mass_scale
        c = asy.ab_coefficients(model, 4.0, kind)
        # e^{2mr} B (dE/dr / 2M)^2 with the leading slope: the retained 2 m a^2 term
        from kinkstatics.relaxation import model_data
        d = model_data(model)
        retained = abs(c.B_scaled) * 4 * d.m ** 4 * d.a ** 4 / d.M ** 2
        assert abs(c.A) * np.exp(2 * m * c.r) < 1e-3 * retained
        far = asy.ab_coefficients(model, 8.0, kind)
        assert abs(far.A) * np.exp(2 * m * far.r) < abs(c.A) * np.exp(2 * m * c.r)


def test_B_overflow_is_inf(sg):
    c = asy.ab_coefficients(sg, 400.0, KK)
    assert np.isfinite(c.B_scaled) and c.B == np.inf


def test_ab_rejects_short_distance(phi4):
    with pytest.raises(UsageError):
        asy.ab_coefficients(phi4, 1.0, KA)


def test_potential_from_ode(phi4):
    curve = asy.potential_from_ode(phi4, KA, 2.5, 4.0)
    assert curve.E[0] == asy.asymptotic_energy(phi4, 4.0, KA)
    assert curve.stopped is None
    assert curve.r[-1] == pytest.approx(2.5)
    sel = (curve.r >= 2.5) & (curve.r <= 3.5)
    e22 = asy.asymptotic_energy(phi4, curve.r[sel], KA)
    rel = np.abs(curve.E[sel] - e22) / np.abs(e22 - 8.0 / 3.0)
    assert np.max(rel) <= 0.2


def test_potential_from_ode_matches_relaxation(phi4):
    from kinkstatics import RelaxationConfig, solve_pair
    table, _ = solve_pair(phi4, KA, RelaxationConfig.for_model(phi4, 4.0, 2.4))
    curve = asy.potential_from_ode(phi4, KA, 2.5, 4.0)
    rho = table.half_distance
    sel = (rho >= 2.5) & (rho <= 3.5)
    sel[0] = False
    ode = np.interp(rho[sel], curve.r[::-1], curve.E[::-1])
    rel = np.abs(table.E_full[sel] - ode) / np.abs(ode - 8.0 / 3.0)
    assert np.max(rel) <= 0.10


def test_potential_from_ode_kk_repulsive(sg):
    curve = asy.potential_from_ode(sg, KK, 2.5, 6.0, dr=5e-3)
    assert np.all(np.diff(curve.E) > 0)


def test_potential_from_ode_validation(phi4):
    with pytest.raises(UsageError):
        asy.potential_from_ode(phi4, KA, 1.0, 3.0)
    with pytest.raises(UsageError):
        asy.potential_from_ode(phi4, KA, 3.0, 3.0)
