import numpy as np

from kinetics.ensembles     import HydroState
from kinetics.microdynamics import CollisionState


def hydro(rho=1.0, T=1.0, **fields) -> HydroState:
    return HydroState(rho=rho, T=T, **fields)


def random_collision(rng, scale=1.0) -> CollisionState:
    sigma = rng.normal(size=3)
    return CollisionState.from_values(
        v=scale * rng.normal(size=3),
        v_star=scale * rng.normal(size=3),
        I=rng.gamma(1.5),
        I_star=rng.gamma(1.5),
        r=rng.uniform(0.05, 0.95),
        R=rng.uniform(0.05, 0.95),
        sigma=sigma / np.linalg.norm(sigma),
    )
