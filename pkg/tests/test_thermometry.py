"""Standard form, temperature, and non-thermality diagnostics."""

import math

import numpy as np
import pytest
from scipy.integrate import dblquad
from scipy.special import eval_laguerre

from cavitherm import (
    StandardForm,
    edr_temperature,
    edr_temperature_spread,
    fock_populations,
    reconstruct,
    squeezing_energy_ratio,
    standard_form,
    temperature,
    thermality_report,
)
from cavitherm.errors import GroundStateDivergence, PopulationInversion

RNG = np.random.default_rng(99)


def test_standard_form_round_trip():
    for _ in range(40):
        form = StandardForm(nu=RNG.uniform(1.0, 6.0), r=RNG.uniform(0.0, 1.2),
                            theta=RNG.uniform(-np.pi / 2, np.pi / 2))
        sigma = reconstruct(form)
        back = standard_form(sigma)
        assert np.max(np.abs(reconstruct(back) - sigma)) < 1e-10
        assert back.nu == pytest.approx(form.nu, rel=1e-12)
        assert back.r == pytest.approx(form.r, abs=1e-12)


def test_standard_form_angle_convention():
    sigma = reconstruct(StandardForm(nu=2.0, r=0.5, theta=0.3))
    assert standard_form(sigma).theta == pytest.approx(0.3, abs=1e-12)
    # angle folds into [-pi/2, pi/2] (the ellipse has no orientation)
    sigma = reconstruct(StandardForm(nu=2.0, r=0.5, theta=0.3 + np.pi))
    assert standard_form(sigma).theta == pytest.approx(0.3, abs=1e-10)
    # isotropic state: angle pinned to zero
    form = standard_form(3.0 * np.eye(2))
    assert form.r == 0.0 and form.theta == 0.0 and form.nu == pytest.approx(3.0)


def test_standard_form_rejects_unphysical():
    with pytest.raises(ValueError):
        standard_form(0.5 * np.eye(2))  # det < 1
    with pytest.raises(ValueError):
        standard_form(np.array([[2.0, 0.5], [0.1, 2.0]]))
    with pytest.raises(ValueError):
        standard_form(np.eye(4))


def test_temperature_reference_values():
    # arccoth(coth(1)) = 1, so T = omega0/2 there
    nu = 1.0 / math.tanh(1.0)
    assert temperature(nu, 2.0) == pytest.approx(1.0, rel=1e-13)
    assert temperature(1.0, 5.0) == 0.0
    with pytest.raises(ValueError):
        temperature(0.5, 1.0)
    with pytest.raises(ValueError):
        temperature(2.0, 0.0)


def test_temperature_monotone_in_nu():
    omega0 = 0.7
    nus = np.linspace(1.0 + 1e-9, 40.0, 300)
    temps = [temperature(nu, omega0) for nu in nus]
    assert np.all(np.diff(temps) > 0.0)


def test_temperature_high_limit():
    # equipartition: T -> omega0 nu / 2 for large nu
    assert temperature(1e6, 1.0) == pytest.approx(0.5e6, rel=1e-5)


def test_squeezing_energy_ratio_values():
    assert squeezing_energy_ratio(2.0, 0.0) == 0.0
    expected = 2.0 * (math.cosh(0.1) - 1.0) / 1.0
    assert squeezing_energy_ratio(2.0, 0.1) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(0.010008, abs=5e-7)
    with pytest.raises(GroundStateDivergence):
        squeezing_energy_ratio(1.0, 1e-3)
    with pytest.raises(ValueError):
        squeezing_energy_ratio(2.0, -0.1)


def test_edr_spread_values():
    arccoth2 = 0.5 * math.log(3.0)
    assert edr_temperature_spread(2.0, 1e-3) == pytest.approx(
        4e-6 / (2.0 * 9.0 * arccoth2), rel=1e-12)
    assert edr_temperature_spread(2.0, 0.0) == 0.0
    # divergence toward the ground state at fixed r
    assert edr_temperature_spread(1.01, 1e-3) > edr_temperature_spread(2.0, 1e-3)
    with pytest.raises(GroundStateDivergence):
        edr_temperature_spread(1.0, 1e-3)


def _wigner_population(sigma: np.ndarray, n: int) -> float:
    # overlap of the Gaussian Wigner function with the Fock-state Wigner
    # function W_n = ((-1)^n / pi) L_n(2 rho^2) exp(-rho^2)
    inv = np.linalg.inv(sigma)
    norm = 1.0 / (np.pi * math.sqrt(np.linalg.det(sigma)))

    def integrand(p, q):
        x = np.array([q, p])
        rho2 = q * q + p * p
        wg = norm * math.exp(-float(x @ inv @ x))
        wn = ((-1.0) ** n / np.pi) * eval_laguerre(n, 2.0 * rho2) * math.exp(-rho2)
        return wg * wn

    value, err = dblquad(integrand, -8.0, 8.0, -8.0, 8.0,
                         epsabs=1e-11, epsrel=1e-11)
    assert err < 1e-8
    return 2.0 * np.pi * value


def test_fock_populations_against_wigner_overlap():
    form = StandardForm(nu=1.5, r=0.01, theta=0.0)
    sigma = reconstruct(form)
    p0, p1, p2 = fock_populations(form.nu, form.r)
    for n, closed in enumerate((p0, p1, p2)):
        assert closed == pytest.approx(_wigner_population(sigma, n), abs=1e-8)


def test_fock_populations_limits():
    assert fock_populations(1.0, 0.0) == (1.0, 0.0, 0.0)
    nu = 1.8
    p0, p1, p2 = fock_populations(nu, 0.0)
    x = (nu - 1.0) / (nu + 1.0)
    assert p1 / p0 == pytest.approx(x, rel=1e-13)
    assert p2 / p1 == pytest.approx(x, rel=1e-13)
    assert 1.0 - p0 - p1 - p2 >= 0.0
    # tail vanishes toward the ground state
    q0, q1, q2 = fock_populations(1.0 + 1e-9, 1e-9)
    assert 1.0 - q0 - q1 - q2 == pytest.approx(0.0, abs=1e-8)


def test_geometric_ratio_matches_temperature():
    nu, omega0 = 1.7, 0.9
    p0, p1, _ = fock_populations(nu, 0.0)
    assert p1 / p0 == pytest.approx(
        math.exp(-omega0 / temperature(nu, omega0)), rel=1e-12)


def test_edr_temperature_consistency():
    omega0 = 1.3
    for nu in (1.2, 2.0, 5.0):
        p0, p1, p2 = fock_populations(nu, 0.0)
        t01 = edr_temperature(p0, p1, 0, 1, omega0)
        t02 = edr_temperature(p0, p2, 0, 2, omega0)
        t12 = edr_temperature(p1, p2, 1, 2, omega0)
        t_ref = temperature(nu, omega0)
        for t in (t01, t02, t12):
            assert t == pytest.approx(t_ref, rel=1e-12)


def test_edr_temperature_edge_cases():
    with pytest.raises(PopulationInversion):
        edr_temperature(0.1, 0.2, 0, 1, 1.0)
    with pytest.raises(ValueError):
        edr_temperature(0.0, 0.1, 0, 1, 1.0)
    with pytest.raises(ValueError):
        edr_temperature(0.3, 0.1, 1, 1, 1.0)
    with pytest.raises(ValueError):
        edr_temperature(0.3, 0.1, 0, 1, -1.0)
    # underflowed excited population reads as the ground-state limit
    assert edr_temperature(0.9, 0.0, 0, 1, 1.0) == 0.0


def test_edr_spread_prediction_matches_measured_spread():
    # epsilon predicts |t02 - t01|/t01 to leading order in r
    nu, r, omega0 = 1.2, 1e-3, 1.0
    p0, p1, p2 = fock_populations(nu, r)
    t01 = edr_temperature(p0, p1, 0, 1, omega0)
    t02 = edr_temperature(p0, p2, 0, 2, omega0)
    measured = abs(t02 - t01) / t01
    predicted = edr_temperature_spread(nu, r)
    assert measured == pytest.approx(predicted, rel=1e-4)


def test_thermality_report_assembles_fields():
    form = StandardForm(nu=2.5, r=1e-4, theta=0.1)
    rep = thermality_report(form, omega0=0.8)
    assert rep.t0 == pytest.approx(temperature(2.5, 0.8))
    assert rep.delta == pytest.approx(squeezing_energy_ratio(2.5, 1e-4))
    assert rep.epsilon == pytest.approx(edr_temperature_spread(2.5, 1e-4))
    p0, p1, p2 = fock_populations(2.5, 1e-4)
    assert (rep.p0, rep.p1, rep.p2) == (p0, p1, p2)
    assert rep.t_edr_01 == pytest.approx(edr_temperature(p0, p1, 0, 1, 0.8))
    # near-thermal: all three estimates bunch around the temperature
    assert rep.t_edr_02 == pytest.approx(rep.t_edr_01, rel=1e-6)
    assert rep.t_edr_12 == pytest.approx(rep.t_edr_01, rel=1e-6)
