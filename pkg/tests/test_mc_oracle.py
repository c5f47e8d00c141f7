import math

import numpy as np
import pytest

from kinetics.ensembles       import collision_frequency, fourteen, maxwellian, six_field
from kinetics.errors          import DomainError, UnsupportedWeight
from kinetics.fourteen_moment import production_14, sum_P_rrtt, sum_P_rtrt, sum_Q_rr
from kinetics.mc_oracle       import (
    MCEstimate,
    Setting,
    WeakFormSpec,
    compare,
    entropy_sign_check,
    equivalence_check,
    mc_weak_form,
    oracle_collision_freq,
    oracle_production6,
    oracle_production14,
    verify_suite,
)
from kinetics.microdynamics   import InteractionParams, MicroState, SpeciesParams
from kinetics.six_field       import entropy_production_D6, production_P
from tests.helpers import hydro


SEED = 7
SIGMAS = 3.0


def _agrees(est: MCEstimate, target, sigmas=SIGMAS, atol=1e-12):
    assert est.agrees_with(target, sigmas=sigmas, atol=atol), (est.value, est.std_error, target)


def _unit(gamma=1.0):
    return InteractionParams.constant(gamma, K=1.0)


# ── Estimates ─────────────────────────────────────────────────────────────────

def test_estimate_helpers():
    est = MCEstimate(np.array([1.0, 2.0]), np.array([0.1, 0.1]), 100, 1)
    assert est.agrees_with([1.2, 2.0])
    assert not est.agrees_with([1.5, 2.0])
    assert est.component(1).value == 2.0
    assert est.component(0).upper_bound(2.0) == pytest.approx(1.2)


def test_same_seed_is_reproducible(gas):
    state = MicroState([1.0, 0.0, 0.0], 0.5)
    a = oracle_collision_freq(state, hydro(), gas, _unit(), n=5000, seed=SEED)
    b = oracle_collision_freq(state, hydro(), gas, _unit(), n=5000, seed=SEED)
    assert a == b
    c = oracle_collision_freq(state, hydro(), gas, _unit(), n=5000, seed=SEED + 1)
    assert c.value != a.value


def test_worker_split_is_reproducible(gas):
    spec = WeakFormSpec(Setting.NON_WEIGHTED, "m_v2", six_field(hydro(Pi=0.2), gas), _unit())
    a = mc_weak_form(spec, n=6001, seed=SEED, workers=3)
    b = mc_weak_form(spec, n=6001, seed=SEED, workers=3)
    assert a.value == b.value
    assert a.std_error == b.std_error
    assert a.n_samples == 6001


def test_std_error_halves_with_four_times_the_samples(gas):
    state = MicroState([0.5, 0.0, 0.0], 1.0)
    small = oracle_collision_freq(state, hydro(), gas, _unit(), n=20_000, seed=SEED)
    large = oracle_collision_freq(state, hydro(), gas, _unit(), n=80_000, seed=SEED)
    assert 0.4 < large.std_error / small.std_error < 0.6


def test_too_few_samples(gas):
    with pytest.raises(DomainError):
        oracle_collision_freq(MicroState([0.0, 0.0, 0.0], 0.0), hydro(), gas, _unit(), n=1)


# ── Weak form ─────────────────────────────────────────────────────────────────

def test_unknown_test_function(gas):
    with pytest.raises(UnsupportedWeight):
        WeakFormSpec(Setting.NON_WEIGHTED, "spin", maxwellian(hydro(), gas), _unit())


def test_mass_is_annihilated_exactly(gas_half):
    spec = WeakFormSpec(Setting.NON_WEIGHTED, "mass", six_field(hydro(Pi=0.3), gas_half), _unit())
    est = mc_weak_form(spec, n=4000, seed=SEED)
    assert est.value == 0.0
    assert est.std_error == 0.0


NON_EQUILIBRIUM = {
    "six_field": lambda sp: six_field(hydro(U=[0.3, -0.2, 0.1], Pi=0.3), sp),
    "fourteen": lambda sp: fourteen(
        hydro(U=[0.2, -0.1, 0.3], Pi=0.05,
              p_dev=[[0.02, 0.01, 0.0], [0.01, -0.01, 0.0], [0.0, 0.0, -0.01]],
              q=[0.03, -0.01, 0.02]),
        sp),
}


@pytest.mark.parametrize("kind", sorted(NON_EQUILIBRIUM))
@pytest.mark.parametrize("name", ["mass", "momentum", "energy"])
@pytest.mark.parametrize("setting", list(Setting))
def test_invariants_are_annihilated(gas_half, kind, name, setting):
    spec = WeakFormSpec(setting, name, NON_EQUILIBRIUM[kind](gas_half), _unit(2.0))
    est = mc_weak_form(spec, n=4000, seed=SEED)
    if name == "mass":
        assert np.all(est.value == 0.0)
    else:
        assert np.all(np.abs(est.value) < 1e-10)


def test_weak_form_of_kinetic_energy_matches_production(gas):
    h = hydro(Pi=0.3)
    spec = WeakFormSpec(Setting.NON_WEIGHTED, "m_v2", six_field(h, gas), _unit())
    closed, _ = production_P(h, gas, _unit())
    _agrees(mc_weak_form(spec, n=100_000, seed=SEED), closed)


def test_tensor_test_function_shape(gas):
    spec = WeakFormSpec(Setting.NON_WEIGHTED, "m_vv", six_field(hydro(Pi=0.3), gas), _unit())
    est = mc_weak_form(spec, n=2000, seed=SEED)
    assert np.shape(est.value) == (3, 3)
    assert np.shape(est.std_error) == (3, 3)


# ── Six-field production ──────────────────────────────────────────────────────

@pytest.mark.parametrize("sampler", ["reduced", "full"])
@pytest.mark.parametrize("x", [-0.5, 0.3])
def test_production6_matches_closed_form(gas_half, sampler, x):
    h = hydro(Pi=x)
    closed, _ = production_P(h, gas_half, _unit(2.0))
    est = oracle_production6(h, gas_half, _unit(2.0), n=100_000, seed=SEED, sampler=sampler)
    _agrees(est, closed)
    assert est.value * x < 0.0


def test_production6_at_equilibrium(gas):
    est = oracle_production6(hydro(), gas, _unit(), n=50_000, seed=SEED)
    _agrees(est, 0.0)


def test_production6_is_odd_near_equilibrium(gas):
    up = oracle_production6(hydro(Pi=0.05), gas, _unit(), n=100_000, seed=SEED)
    down = oracle_production6(hydro(Pi=-0.05), gas, _unit(), n=100_000, seed=SEED + 1)
    spread = SIGMAS * math.hypot(up.std_error, down.std_error)
    closed, _ = production_P(hydro(Pi=0.05), gas, _unit())
    assert abs(up.value + down.value) <= spread + 0.25 * abs(closed)


def test_unknown_sampler(gas):
    with pytest.raises(DomainError):
        oracle_production6(hydro(Pi=0.1), gas, _unit(), n=100, sampler="exact")


# ── Fourteen-moment production ────────────────────────────────────────────────

H14 = dict(Pi=0.005, q=[0.01, 0.0, 0.0],
           p_dev=[[0.0, 0.01, 0.0], [0.01, 0.0, 0.0], [0.0, 0.0, 0.0]])


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.0, 0.5])
def test_production14_matches_closed_form(alpha):
    sp = SpeciesParams.dimensionless(alpha)
    inter = _unit(1.0)
    h = hydro(**H14)
    P, Q, _ = production_14(h, sp, inter)
    est = oracle_production14(h, sp, inter, n=200_000, seed=SEED)
    _agrees(est.P.component((0, 1)), P[0, 1])
    _agrees(est.trace_P, float(np.trace(P)))
    _agrees(est.Q.component(0), Q[0])


@pytest.mark.slow
@pytest.mark.parametrize("alpha,gamma", [(0.0, 1.0), (0.5, 2.0)])
def test_production14_isotropic_sums(alpha, gamma):
    sp = SpeciesParams.dimensionless(alpha)
    inter = _unit(gamma)
    h = hydro(**H14)
    est = oracle_production14(h, sp, inter, n=200_000, seed=SEED)
    args = (1.0, 1.0, alpha, gamma, 1.0, 1.0)
    _agrees(est.sum_P_rrtt, sum_P_rrtt(*args))
    _agrees(est.sum_P_rtrt, sum_P_rtrt(*args))
    _agrees(est.sum_Q_rr, sum_Q_rr(*args))


def test_production14_vanishes_at_equilibrium(gas):
    est = oracle_production14(hydro(), gas, _unit(), n=5000, seed=SEED)
    assert np.all(est.P.value == 0.0)
    assert np.all(est.Q.value == 0.0)


# ── Collision frequency ───────────────────────────────────────────────────────

@pytest.mark.parametrize("c_hat,I_hat", [(0.0, 0.0), (1.0, 1.0), (3.0, 0.5)])
def test_collision_frequency_matches_closed_form(gas_half, c_hat, I_hat):
    state = MicroState([c_hat, 0.0, 0.0], I_hat)
    inter = _unit(1.0)
    est = oracle_collision_freq(state, hydro(), gas_half, inter, n=100_000, seed=SEED)
    _agrees(est, collision_frequency(state, hydro(), gas_half, inter))


# ── Setting equivalence ───────────────────────────────────────────────────────

def _m_vx2(v, I, m):
    return m * v[:, 0] ** 2


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_settings_agree_on_common_samples(alpha):
    sp = SpeciesParams.dimensionless(alpha)
    n = 20_000
    weighted, plain = equivalence_check(hydro(Pi=0.3), sp, _unit(), _m_vx2, n=n, seed=SEED)
    scale = abs(plain.value) + plain.std_error * math.sqrt(n)
    assert abs(weighted.value - plain.value) <= 1e-9 * scale


def test_settings_agree_for_fourteen_moment(gas_half):
    n = 20_000
    weighted, plain = equivalence_check(hydro(**H14), gas_half, _unit(), "energy_v", n=n, seed=SEED)
    assert np.shape(weighted.value) == (3,)
    scale = np.abs(plain.value) + plain.std_error * math.sqrt(n)
    assert np.all(np.abs(weighted.value - plain.value) <= 1e-9 * scale)


def test_settings_agree_on_independent_samples(gas_half):
    weighted, plain = equivalence_check(hydro(Pi=0.3), gas_half, _unit(), "m_v2",
                                        n=50_000, seed=SEED, independent=True)
    assert weighted.value != plain.value
    assert abs(weighted.value - plain.value) <= SIGMAS * math.hypot(weighted.std_error, plain.std_error)


# ── Entropy production ────────────────────────────────────────────────────────

def test_entropy_production_is_negative_off_equilibrium(gas):
    h = hydro(Pi=0.3)
    est = entropy_sign_check(six_field(h, gas), _unit(), n=100_000, seed=SEED)
    assert est.upper_bound() < 0.0
    _agrees(est, entropy_production_D6(h, gas, _unit()))


def test_entropy_production_vanishes_for_maxwellian(gas_half):
    est = entropy_sign_check(maxwellian(hydro(), gas_half), _unit(), n=5000, seed=SEED)
    assert abs(est.value) < 1e-10


# ── Suite ─────────────────────────────────────────────────────────────────────

def test_compare_with_exact_estimate():
    check = compare("exact", 0.0, MCEstimate(0.0, 0.0, 10, 0))
    assert check.passed
    assert check.sigmas == 0.0
    check = compare("off", 1.0, MCEstimate(0.0, 0.0, 10, 0))
    assert not check.passed
    assert math.isinf(check.sigmas)


def test_verify_suite_structure():
    checks = verify_suite(n=2000, seed=SEED)
    assert len(checks) == 31
    names = [c.name for c in checks]
    assert len(set(names)) == len(names)
    row = checks[0].to_dict()
    assert set(row) == {"name", "closed_form", "mc_value", "std_error", "sigmas", "pass"}
    annihilation = [c for c in checks if "annihilation" in c.name]
    assert len(annihilation) == 2
    assert all(c.passed for c in annihilation)
