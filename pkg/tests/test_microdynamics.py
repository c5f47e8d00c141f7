import math

import numpy as np
import pytest

from kinetics.errors        import DegenerateCollision, DegenerateDirection, DomainError
from kinetics.microdynamics import (
    CollisionAngles,
    CollisionState,
    InteractionParams,
    MicroState,
    SpeciesParams,
    collide,
    collide_arrays,
    cross_section_arrays,
    cross_section_model3,
    finite_difference_jacobian,
    invariant_product,
    jacobian,
    jacobian_velocity_form,
    measure_weight,
    total_energy,
    total_energy_arrays,
)
from tests.helpers import random_collision


def _flat(s: CollisionState):
    return np.concatenate([s.a.v, s.b.v, [s.a.I, s.b.I, s.angles.r, s.angles.R], s.angles.sigma])


# ── Value types ───────────────────────────────────────────────────────────────

def test_microstate_rejects_negative_energy():
    with pytest.raises(DomainError):
        MicroState(v=[0.0, 0.0, 0.0], I=-1e-3)


@pytest.mark.parametrize("r,R,sigma", [
    (1.2, 0.5, [0.0, 0.0, 1.0]),
    (0.5, -0.1, [0.0, 0.0, 1.0]),
    (0.5, 0.5, [0.0, 0.0, 1.1]),
])
def test_angles_validation(r, R, sigma):
    with pytest.raises(DomainError):
        CollisionAngles(r, R, sigma)


def test_species_from_dof():
    sp = SpeciesParams.from_dof("CO2", m=7.3e-26, D=9.0)
    assert sp.alpha == 2.0
    with pytest.raises(DomainError):
        SpeciesParams(name="x", m=1.0, alpha=0.0, D=7.0)
    with pytest.raises(DomainError):
        SpeciesParams(name="x", m=1.0, alpha=-1.0)


def test_interaction_norm_conventions():
    assert InteractionParams.constant(1.0, K=2.0).b_norm == pytest.approx(8.0 * math.pi)
    assert InteractionParams.from_norm(0.5, 3.0).b_norm == pytest.approx(3.0)
    tabulated = InteractionParams(gamma=1.0, b_cos=(-1.0, 0.0, 1.0), b_values=(2.0, 2.0, 2.0))
    assert tabulated.b_norm == pytest.approx(8.0 * math.pi)
    with pytest.raises(DomainError):
        InteractionParams(gamma=0.0, K=1.0)
    with pytest.raises(DomainError):
        InteractionParams(gamma=1.0, b_cos=(-0.5, 1.0), b_values=(1.0, 1.0))


# ── Collision map ─────────────────────────────────────────────────────────────

@pytest.mark.parametrize("seed", range(10))
def test_collision_is_involution(gas, seed):
    s = random_collision(np.random.default_rng(seed))
    back = collide(collide(s, gas), gas)
    np.testing.assert_allclose(_flat(back), _flat(s), rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_collision_conserves_momentum_and_energy(gas, seed):
    s = random_collision(np.random.default_rng(seed))
    post = collide(s, gas)
    np.testing.assert_allclose(post.a.v + post.b.v, s.a.v + s.b.v, rtol=1e-12, atol=1e-12)

    def energy(state):
        return 0.5 * gas.m * (state.a.v @ state.a.v + state.b.v @ state.b.v) + state.a.I + state.b.I

    assert energy(post) == pytest.approx(energy(s), rel=1e-12)
    assert total_energy(post, gas) == pytest.approx(total_energy(s, gas), rel=1e-12)


def test_collision_with_physical_units(nitrogen, rng):
    s = random_collision(rng, scale=400.0)
    s = CollisionState.from_values(s.a.v, s.b.v, 1e-21 * s.a.I, 1e-21 * s.b.I,
                                   s.angles.r, s.angles.R, s.angles.sigma)
    back = collide(collide(s, nitrogen), nitrogen)
    np.testing.assert_allclose(back.a.v, s.a.v, rtol=1e-10)
    assert back.a.I == pytest.approx(s.a.I, rel=1e-10)


def test_swap_commutes_with_collision(gas, rng):
    s = random_collision(rng)
    np.testing.assert_allclose(_flat(collide(s.swapped(), gas)), _flat(collide(s, gas).swapped()),
                               rtol=1e-12, atol=1e-13)


def test_zero_internal_energy_sets_half_split(gas):
    s = CollisionState.from_values([1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], 0.0, 0.0, 0.3, 1.0, [0.0, 0.0, 1.0])
    post = collide(s, gas)
    assert post.angles.r == 0.5
    assert post.angles.R == pytest.approx(1.0)


def test_degenerate_collisions(gas):
    zero = CollisionState.from_values([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 0.0, 0.0, 0.5, 0.5, [1.0, 0.0, 0.0])
    with pytest.raises(DegenerateCollision):
        collide(zero, gas)
    no_direction = CollisionState.from_values([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1.0, 0.5, 0.5, 0.5,
                                              [1.0, 0.0, 0.0])
    with pytest.raises(DegenerateDirection):
        collide(no_direction, gas)


def test_array_kernel_matches_scalar(gas, rng):
    states = [random_collision(rng) for _ in range(5)]
    v = np.array([s.a.v for s in states])
    vs = np.array([s.b.v for s in states])
    I = np.array([s.a.I for s in states])
    Is = np.array([s.b.I for s in states])
    r = np.array([s.angles.r for s in states])
    R = np.array([s.angles.R for s in states])
    sig = np.array([s.angles.sigma for s in states])
    v1, _, I1, _, _, R1, _ = collide_arrays(v, vs, I, Is, r, R, sig, gas.m)
    for k, s in enumerate(states):
        post = collide(s, gas)
        np.testing.assert_allclose(v1[k], post.a.v, rtol=1e-14)
        assert I1[k] == pytest.approx(post.a.I, rel=1e-14)
        assert R1[k] == pytest.approx(post.angles.R, rel=1e-14)


# ── Jacobian and invariants ───────────────────────────────────────────────────

@pytest.mark.parametrize("seed", range(6))
def test_jacobian_forms_agree(gas, seed):
    s = random_collision(np.random.default_rng(seed))
    assert jacobian(s, gas) == pytest.approx(jacobian_velocity_form(s, gas), rel=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_jacobian_of_inverse_is_reciprocal(gas, seed):
    s = random_collision(np.random.default_rng(seed))
    assert jacobian(s, gas) * jacobian(collide(s, gas), gas) == pytest.approx(1.0, rel=1e-11)


@pytest.mark.parametrize("seed", range(100))
def test_jacobian_matches_finite_differences(gas, seed):
    s = random_collision(np.random.default_rng(100 + seed))
    assert finite_difference_jacobian(s, gas) == pytest.approx(jacobian(s, gas), rel=1e-5)


def test_finite_difference_jacobian_southern_chart(gas):
    s = CollisionState.from_values([0.3, -0.2, 0.1], [-0.4, 0.5, 0.2], 0.7, 1.1, 0.4, 0.6,
                                   [0.1, 0.0, -math.sqrt(0.99)])
    assert finite_difference_jacobian(s, gas) == pytest.approx(jacobian(s, gas), rel=1e-5)


@pytest.mark.parametrize("seed", range(6))
def test_invariant_product_preserved(gas, seed):
    s = random_collision(np.random.default_rng(seed))
    assert invariant_product(collide(s, gas)) == pytest.approx(invariant_product(s), rel=1e-11)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 4.063])
def test_cross_section_invariant_under_collision(gas, rng, gamma):
    inter = InteractionParams.constant(gamma, K=0.7)
    s = random_collision(rng)
    assert cross_section_model3(collide(s, gas), gas, inter) == pytest.approx(
        cross_section_model3(s, gas, inter), rel=1e-11)


def test_measure_weight_transforms_with_jacobian(gas_half, rng):
    inter = InteractionParams.constant(1.5)
    s = random_collision(rng)
    post = collide(s, gas_half)
    lhs = measure_weight(post, gas_half, inter) * jacobian(s, gas_half)
    assert lhs == pytest.approx(measure_weight(s, gas_half, inter), rel=1e-11)


def test_tabulated_kernel_uses_scattering_angle(gas):
    inter = InteractionParams(gamma=1.0, b_cos=(-1.0, 1.0), b_values=(0.0, 2.0))
    s = CollisionState.from_values([1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], 0.0, 0.0, 0.5, 1.0, [1.0, 0.0, 0.0])
    # forward scattering: b(1) = 2, kinetic term |u| = 2
    assert cross_section_model3(s, gas, inter) == pytest.approx(4.0)


# ── Batched properties ────────────────────────────────────────────────────────

BATCH_ROWS = 100_000


def _batch(seed, n=BATCH_ROWS):
    rng = np.random.default_rng(seed)
    sigma = rng.normal(size=(n, 3))
    return (
        rng.normal(size=(n, 3)),
        rng.normal(size=(n, 3)),
        rng.gamma(1.5, size=n),
        rng.gamma(1.5, size=n),
        rng.uniform(0.05, 0.95, size=n),
        rng.uniform(0.05, 0.95, size=n),
        sigma / np.linalg.norm(sigma, axis=1, keepdims=True),
    )


def _jacobian_arrays(R, R_post):
    return (1.0 - R) * np.sqrt(R) / ((1.0 - R_post) * np.sqrt(R_post))


@pytest.mark.parametrize("seed", [0, 1])
def test_batched_collision_is_involution(gas, seed):
    pre = _batch(seed)
    back = collide_arrays(*collide_arrays(*pre, gas.m), gas.m)
    for got, want in zip(back, pre):
        np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("seed", [2, 3])
def test_batched_collision_conserves_momentum_and_energy(gas, seed):
    v, vs, I, Is, r, R, sig = _batch(seed)
    v1, vs1, I1, Is1, *_ = collide_arrays(v, vs, I, Is, r, R, sig, gas.m)
    np.testing.assert_allclose(v1 + vs1, v + vs, rtol=1e-12, atol=1e-12)

    def energy(a, b, Ia, Ib):
        return 0.5 * gas.m * (np.einsum("ij,ij->i", a, a) + np.einsum("ij,ij->i", b, b)) + Ia + Ib

    np.testing.assert_allclose(energy(v1, vs1, I1, Is1), energy(v, vs, I, Is), rtol=1e-12)
    np.testing.assert_allclose(total_energy_arrays(v1, vs1, I1, Is1, gas.m),
                               total_energy_arrays(v, vs, I, Is, gas.m), rtol=1e-12)


def test_batched_jacobian_consistency(gas):
    pre = _batch(4)
    post = collide_arrays(*pre, gas.m)
    back = collide_arrays(*post, gas.m)
    R, R1, R2 = pre[5], post[5], back[5]

    forward = _jacobian_arrays(R, R1)
    np.testing.assert_allclose(forward * _jacobian_arrays(R1, R2), 1.0, rtol=1e-10)

    u = np.linalg.norm(pre[0] - pre[1], axis=1)
    u_post = np.linalg.norm(post[0] - post[1], axis=1)
    velocity_form = (1.0 - R) * u_post / ((1.0 - R1) * u)
    np.testing.assert_allclose(velocity_form, forward, rtol=1e-10)


def test_batched_invariant_product_preserved(gas):
    pre = _batch(5)
    post = collide_arrays(*pre, gas.m)

    def product(batch):
        _, _, I, Is, r, R, _ = batch
        return I * Is * r * (1.0 - r) * (1.0 - R) ** 2

    np.testing.assert_allclose(product(post), product(pre), rtol=1e-10)


@pytest.mark.parametrize("gamma", [0.5, 2.0])
def test_batched_cross_section_invariant(gas, gamma):
    inter = InteractionParams.constant(gamma, K=0.7)
    pre = _batch(6)
    post = collide_arrays(*pre, gas.m)
    np.testing.assert_allclose(cross_section_arrays(*post, gas.m, inter),
                               cross_section_arrays(*pre, gas.m, inter), rtol=1e-10)
