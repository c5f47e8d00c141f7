import math

import numpy as np
import pytest

from kinetics.ensembles       import HydroState, fourteen, moment, quadrature_nodes
from kinetics.errors          import DomainError, NoSignChange
from kinetics.fourteen_moment import (
    P_iso_coefficients,
    alpha_from_dof,
    alpha_vibrating,
    balance_fluxes_14,
    closure_fluxes_14,
    delta_Pr,
    delta_scan,
    eucken_Pr,
    eucken_Pr_atoms,
    gamma_to_s,
    n_constants,
    prandtl_number,
    production_14,
    production_coefficients,
    production_from_tensors,
    relaxation_times,
    s_to_gamma,
    solve_gamma_star,
    sum_P_rrtt,
    sum_P_rtrt,
    transport_coefficients,
)
from kinetics.microdynamics   import InteractionParams, SpeciesParams
from kinetics.six_field       import tau_Pi_six
from tests.helpers import hydro


P_DEV = np.array([[0.0, 0.01, 0.0], [0.01, 0.0, 0.0], [0.0, 0.0, 0.0]])
GRID_ALPHA = [-0.5, 0.0, 0.5, 1.0, 2.0, 5.0]
GRID_GAMMA = [0.1, 0.5, 1.0, 2.0, 4.0]


def _unit(gamma):
    return InteractionParams.constant(gamma, K=1.0)


# ── Constants and productions ─────────────────────────────────────────────────

def test_n_constants_hard_spheres():
    n1, n2 = n_constants(0.0, 1.0)
    assert n1 == pytest.approx(2.0, rel=1e-13)
    assert n2 == pytest.approx(math.pi ** 2 / 4.0, rel=1e-13)


@pytest.mark.parametrize("alpha", GRID_ALPHA)
@pytest.mark.parametrize("gamma", GRID_GAMMA)
def test_productions_are_dissipative(alpha, gamma):
    co = production_coefficients(hydro(), SpeciesParams.dimensionless(alpha), _unit(gamma))
    assert co.P_dev_coeff < 0.0
    assert co.P_Pi_coeff < 0.0
    assert co.Q_q_coeff < 0.0
    n1, n2 = n_constants(alpha, gamma)
    assert n1 > 0.0 and n2 > 0.0


def test_production_vanishes_at_equilibrium(gas):
    P, Q, _ = production_14(hydro(U=[1.0, 2.0, 3.0]), gas, _unit(1.0))
    np.testing.assert_array_equal(P, 0.0)
    np.testing.assert_array_equal(Q, 0.0)


def test_production_is_linear(gas):
    P1, _, _ = production_14(hydro(p_dev=P_DEV), gas, _unit(1.0))
    P2, _, _ = production_14(hydro(p_dev=2.0 * P_DEV), gas, _unit(1.0))
    assert P2[0, 1] == pytest.approx(2.0 * P1[0, 1], rel=1e-14)
    P3, _, _ = production_14(hydro(p_dev=P_DEV, Pi=0.005), gas, _unit(1.0))
    # Pi only enters the diagonal
    assert P3[0, 1] == pytest.approx(P1[0, 1], rel=1e-14)


def test_production_needs_constant_kernel(gas):
    tabulated = InteractionParams(gamma=1.0, b_cos=(-1.0, 1.0), b_values=(1.0, 1.0))
    with pytest.raises(DomainError):
        production_14(hydro(), gas, tabulated)


def test_trace_identity(gas_half):
    h = hydro(Pi=0.02)
    P, _, _ = production_14(h, gas_half, _unit(1.5))
    _, tau_Pi, _ = relaxation_times(h, gas_half, _unit(1.5))
    assert np.trace(P) == pytest.approx(-3.0 * 0.02 / tau_Pi, rel=1e-13)


def test_heat_production_is_galilean(gas):
    q = np.array([0.01, 0.0, -0.003])
    base = dict(Pi=0.005, p_dev=P_DEV, q=q)
    P0, Q0, _ = production_14(hydro(**base), gas, _unit(1.0))
    U = np.array([100.0, -50.0, 3.0])
    P1, Q1, _ = production_14(hydro(U=U, **base), gas, _unit(1.0))
    np.testing.assert_allclose(P1, P0, rtol=1e-12)
    np.testing.assert_allclose(Q1 - U @ P1, Q0, rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
@pytest.mark.parametrize("gamma", [0.5, 1.0, 3.0])
def test_tensor_decomposition_reproduces_closed_forms(alpha, gamma):
    sp = SpeciesParams.dimensionless(alpha)
    h = hydro(rho=1.3, T=0.7, Pi=0.004, p_dev=P_DEV, q=[0.01, 0.02, 0.0], U=[0.1, 0.0, 0.2])
    P, Q, _ = production_14(h, sp, _unit(gamma))
    P_t, Q_t = production_from_tensors(h, sp, _unit(gamma))
    np.testing.assert_allclose(P_t, P, rtol=1e-11, atol=1e-16)
    np.testing.assert_allclose(Q_t, Q, rtol=1e-11, atol=1e-16)


def test_isotropic_coefficients_invert_contractions():
    args = (1.1, 0.9, 0.5, 1.2, 0.7, 1.0)
    P1, P2 = P_iso_coefficients(*args)
    assert 9.0 * P1 + 6.0 * P2 == pytest.approx(sum_P_rrtt(*args), rel=1e-13)
    assert 3.0 * P1 + 12.0 * P2 == pytest.approx(sum_P_rtrt(*args), rel=1e-13)


# ── Transport coefficients ────────────────────────────────────────────────────

def test_transport_relations(nitrogen):
    inter = InteractionParams.constant(0.524, K=3e-19)
    h = HydroState(rho=1.16, T=293.0)
    p = h.pressure(nitrogen)
    tc = transport_coefficients(h, nitrogen, inter)
    assert tc.mu == pytest.approx(p * tc.tau_s, rel=1e-12)
    assert tc.nu_bulk == pytest.approx(4.0 / 15.0 * p * tc.tau_Pi, rel=1e-12)
    assert tc.kappa == pytest.approx(3.5 * p * p / (h.rho * h.T) * tc.tau_q, rel=1e-12)
    assert tc.Pr == pytest.approx(3.5 * nitrogen.k / nitrogen.m * tc.mu / tc.kappa, rel=1e-12)
    for value in tc.to_dict().values():
        assert value > 0.0


def test_viscosity_temperature_exponent(nitrogen):
    gamma = 0.664
    inter = InteractionParams.constant(gamma, K=1e-19)
    mu_300 = transport_coefficients(HydroState(rho=1.0, T=300.0), nitrogen, inter).mu
    mu_900 = transport_coefficients(HydroState(rho=2.5, T=900.0), nitrogen, inter).mu
    assert mu_900 / mu_300 == pytest.approx(3.0 ** (1.0 - gamma / 2.0), rel=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_bulk_relaxation_is_three_six_field_times(alpha, gamma):
    sp = SpeciesParams.dimensionless(alpha)
    inter = InteractionParams.constant(gamma, K=0.3)
    _, tau_Pi, _ = relaxation_times(hydro(), sp, inter)
    assert tau_Pi == pytest.approx(3.0 * tau_Pi_six(hydro(), sp, inter), rel=1e-12)


# ── Prandtl number ────────────────────────────────────────────────────────────

def test_prandtl_at_small_gamma():
    for alpha in (0.0, 0.5, 2.0):
        expected = (4 * alpha ** 2 + 19 * alpha + 20) / (4 * alpha ** 2 + 21 * alpha + 24.5)
        assert prandtl_number(alpha, 1e-10) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("alpha,gamma,expected", [
    (0.0, 2.0, 0.7454),
    (0.0, 0.664, 0.816),
    (0.0, 0.134, 0.819),
    (0.5, 0.328, 0.849),
    (2.0, 0.599, 0.894),
    (5.0, 0.419, 0.930),
])
def test_prandtl_values(alpha, gamma, expected):
    assert prandtl_number(alpha, gamma) == pytest.approx(expected, abs=1e-3)


def test_eucken():
    assert eucken_Pr(0.0) == pytest.approx(14.0 / 19.0)
    assert eucken_Pr(2.0) == pytest.approx(22.0 / 27.0)
    assert eucken_Pr(5.0) == pytest.approx(34.0 / 39.0)
    assert eucken_Pr_atoms(3) == pytest.approx(22.0 / 27.0)
    with pytest.raises(DomainError):
        eucken_Pr(-1.0)


def test_delta_is_base_state_independent(nitrogen):
    d300 = delta_Pr(1.2, 0.0, nitrogen, HydroState(rho=1.0, T=300.0))
    d900 = delta_Pr(1.2, 0.0, nitrogen, HydroState(rho=0.3, T=900.0))
    assert d300 == pytest.approx(d900, rel=1e-12)
    assert d300 == pytest.approx(delta_Pr(1.2, 0.0), rel=1e-12)


@pytest.mark.parametrize("alpha,expected,tol", [
    (0.0, 2.153, 1e-3),
    (0.5, 2.368, 1e-3),
    (2.0, 4.063, 5e-3),
    (3.5, 9.469, 1e-2),
    (5.0, 17.262, 5e-2),
    (6.5, 25.801, 5e-2),
    (8.0, 34.705, 5e-2),
    (9.5, 43.835, 5e-2),
    (11.0, 53.123, 5e-2),
    (12.5, 62.526, 5e-2),
])
def test_gamma_star(alpha, expected, tol):
    gamma = solve_gamma_star(alpha)
    assert gamma == pytest.approx(expected, abs=tol)
    assert abs(delta_Pr(gamma, alpha)) < 1e-8


def test_gamma_star_without_sign_change():
    # both ends above the root: the scan cannot find a sign change
    with pytest.raises(NoSignChange):
        solve_gamma_star(0.0, bracket=(3.0, 50.0))
    # both ends below: no sign change either
    with pytest.raises(NoSignChange):
        solve_gamma_star(0.0, bracket=(0.01, 1.0))


def test_delta_scan_frame():
    frame = delta_scan([0.0, 0.5], [0.5, 1.0, 2.0])
    assert list(frame.columns) == ["alpha", "gamma", "delta"]
    assert len(frame) == 6
    assert (frame.loc[frame["gamma"] < 2.0, "delta"] > 0.0).all()


# ── Exponents and degrees of freedom ──────────────────────────────────────────

@pytest.mark.parametrize("s,gamma", [(0.668, 0.664), (0.5, 1.0), (0.933, 0.134)])
def test_s_to_gamma(s, gamma):
    assert s_to_gamma(s) == pytest.approx(gamma, abs=1e-12)
    assert gamma_to_s(gamma) == pytest.approx(s, abs=1e-12)


def test_s_to_gamma_domain():
    with pytest.raises(DomainError):
        s_to_gamma(1.0)


def test_dof_helpers():
    assert alpha_from_dof(5.0) == 0.0
    assert alpha_from_dof(6.0) == 0.5
    assert alpha_vibrating(2) == 0.5
    assert alpha_vibrating(5) == 5.0
    with pytest.raises(DomainError):
        alpha_vibrating(1)
    with pytest.raises(DomainError):
        alpha_from_dof(3.0)


# ── Fluxes ────────────────────────────────────────────────────────────────────

def _f14_state():
    return hydro(rho=1.2, T=0.9, Pi=0.01, p_dev=P_DEV, q=[0.02, -0.01, 0.005])


def test_closure_fluxes_match_moments(gas_half):
    h = _f14_state()
    spec = fourteen(h, gas_half)
    fl = closure_fluxes_14(h, gas_half)
    np.testing.assert_allclose(moment(spec, "m_ccc", order=8), fl.p_ijk, rtol=1e-8, atol=1e-13)
    np.testing.assert_allclose(moment(spec, "energy_cc", order=8), fl.q_ij, rtol=1e-8, atol=1e-13)


def test_closure_fluxes_at_equilibrium(gas):
    fl = closure_fluxes_14(hydro(rho=2.0, T=0.5), gas)
    np.testing.assert_array_equal(fl.p_ijk, 0.0)
    np.testing.assert_allclose(fl.q_ij, 3.5 * 0.5 * np.eye(3), rtol=1e-14)


def test_balance_fluxes_are_lab_frame_moments(gas_half):
    U = np.array([0.4, -0.3, 0.1])
    h = _f14_state().with_fields(U=U)
    c, I, w = quadrature_nodes(fourteen(h, gas_half), order=8)
    v = c + U
    E = 0.5 * np.einsum("ni,ni->n", v, v) + I
    fl = balance_fluxes_14(h, gas_half)
    np.testing.assert_allclose(fl.mass, np.einsum("n,ni->i", w, v), rtol=1e-10)
    np.testing.assert_allclose(fl.momentum, np.einsum("n,ni,nj->ij", w, v, v), rtol=1e-10, atol=1e-13)
    np.testing.assert_allclose(fl.stress, np.einsum("n,ni,nj,nk->ijk", w, v, v, v), rtol=1e-10, atol=1e-13)
    np.testing.assert_allclose(fl.energy, np.einsum("n,ni->i", w * E, v), rtol=1e-10)
    np.testing.assert_allclose(fl.energy_flux, np.einsum("n,ni,nj->ij", w * E, v, v), rtol=1e-10, atol=1e-13)
