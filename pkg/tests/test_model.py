import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kinkstatics import (AccumulatedMass, FieldModel, ModelInconsistency, asymptotics, get_model,
                         kink_mass, partial_mass)


def test_phi4_mass(phi4):
    assert abs(kink_mass(phi4) - 4.0 / 3.0) <= 1e-8


def test_sine_gordon_mass_two_windows(sg):
    assert abs(kink_mass(sg) - 8.0) <= 1e-8
    assert abs(kink_mass(sg, x_cut=30.0) - kink_mass(sg)) <= 1e-10


def test_tail_parameters(phi4, sg):
    t = asymptotics(phi4)
    assert t.m == pytest.approx(2.0, abs=1e-12)
    assert t.a == pytest.approx(2.0, rel=1e-6)
    t = asymptotics(sg)
    assert t.m == pytest.approx(1.0, abs=1e-12)
    assert t.a == pytest.approx(4.0, rel=1e-6)


def test_inconsistent_tail_is_rejected(phi4):
    # kink with an algebraic tail: (u_plus - u) e^{mx} never settles
    bad = FieldModel("bad", phi4.U, phi4.dU, phi4.d2U,
                     kink=lambda x: 1.0 - 1.0 / (1.0 + np.asarray(x) ** 2),
                     dkink=phi4.dkink, d2kink=phi4.d2kink, u_minus=-1.0, u_plus=1.0)
    with pytest.raises(ModelInconsistency):
        asymptotics(bad)


def test_sine_gordon_kink_runs_between_vacua(sg):
    x = np.array([-40.0, 0.0, 40.0])
    u = sg.kink(x)
    assert u[0] == pytest.approx(-2.0 * np.pi, abs=1e-12)
    assert u[1] == pytest.approx(-np.pi, abs=1e-14)
    assert u[2] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("name", ["phi4", "sine-gordon"])
def test_kink_solves_static_equation(name):
    model = get_model(name)
    x = np.round(np.arange(-100, 101) * 0.1, 12)
    assert np.max(np.abs(model.d2kink(x) - model.dU(model.kink(x)))) < 1e-12
    # first integral: u'^2 / 2 = U(u)
    assert np.max(np.abs(0.5 * model.dkink(x) ** 2 - model.U(model.kink(x)))) < 1e-12


def test_unknown_model():
    with pytest.raises(ValueError):
        get_model("phi6")


def test_partial_mass_closed_form(phi4):
    x = np.array([-12.0, -2.0, 0.0, 0.7, 3.0])
    t = np.tanh(x)
    exact = t - t ** 3 / 3.0 + 2.0 / 3.0
    assert np.max(np.abs(partial_mass(phi4, x) - exact)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(-30.0, 30.0))
def test_accumulated_mass_matches_closed_form(x):
    from kinkstatics import make_phi4
    acc = AccumulatedMass(make_phi4())
    t = np.tanh(x)
    # complement (1 - t)^2 (2 + t) / 3, written without cancellation
    om = 2.0 / (np.exp(2.0 * x) + 1.0)
    comp = om * om * (2.0 + t) / 3.0
    assert acc(x) == pytest.approx(t - t ** 3 / 3 + 2 / 3, abs=1e-14)
    assert acc.complement(x) == pytest.approx(comp, rel=1e-8, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(st.floats(-20.0, 20.0), st.floats(0.0, 5.0))
def test_accumulated_mass_monotone(x, dx):
    from kinkstatics import make_sine_gordon
    acc = AccumulatedMass(make_sine_gordon())
    assert acc(x + dx) >= acc(x) - 1e-15
    assert acc(x) + acc.complement(x) == pytest.approx(acc.total, abs=1e-13)


@pytest.mark.parametrize("name", ["phi4", "sine-gordon"])
def test_vacuum_data(name):
    model = get_model(name)
    for v in (model.u_minus, model.u_plus):
        assert abs(model.U(v)) < 1e-15 and abs(model.dU(v)) < 1e-15
    assert model.d2U(model.u_plus) > 0


def test_mass_symmetry(sg):
    from scipy.integrate import quad
    half, _ = quad(lambda x: sg.dkink(x) ** 2, 0.0, 40.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    assert abs(kink_mass(sg) - 2.0 * half) / kink_mass(sg) <= 1e-10


def test_phi4_half_mass(phi4):
    assert partial_mass(phi4, 0.0) == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert partial_mass(phi4, -40.0) < 1e-30
    assert partial_mass(phi4, 40.0) == pytest.approx(4.0 / 3.0, abs=1e-12)


def test_sine_gordon_kink_slope(sg):
    e = 1e-6
    assert sg.dkink(0.0) == pytest.approx(2.0, abs=1e-14)
    assert (sg.kink(e) - sg.kink(-e)) / (2 * e) == pytest.approx(2.0, abs=1e-8)
    assert (sg.U(e) - 2 * sg.U(0.0) + sg.U(-e)) / e ** 2 == pytest.approx(1.0, abs=1e-4)
