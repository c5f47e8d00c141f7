"""
Microdynamics
=============
Binary collisions of polyatomic molecules carrying a continuous internal
energy I, parametrized the Borgnakke–Larsen way:

  R      share of the total energy E that stays kinetic after the collision
  r      split of the remaining internal energy between the two molecules
  sigma  post-collisional direction of the relative velocity

The map T sending (v, v*, I, I*, r, R, sigma) to its post-collisional
counterpart is an involution. The array functions at the bottom are the
vectorised kernels used by the Monte Carlo oracle; the scalar functions on
CollisionState validate their input and delegate to them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing      import Optional

import numpy as np

from kinetics.constants import BOLTZMANN
from kinetics.errors    import (
    DegenerateCollision,
    DegenerateDirection,
    DomainError,
    SingularConfiguration,
)


UNIT_TOL = 1e-14
# |sigma_z| beyond which the finite-difference oracle changes stereographic chart
CHART_SWITCH = 0.9


def _frozen_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(3)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {arr}")
    arr.setflags(write=False)
    return arr


# ── Value types ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MicroState:
    """One molecule: velocity v (m/s) and internal energy I (J)."""

    v: np.ndarray
    I: float

    def __post_init__(self):
        object.__setattr__(self, "v", _frozen_vector(self.v, "v"))
        if not self.I >= 0.0:
            raise DomainError(f"internal energy must be >= 0, got {self.I}")
        object.__setattr__(self, "I", float(self.I))


@dataclass(frozen=True)
class CollisionAngles:
    r: float
    R: float
    sigma: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise DomainError(f"r must lie in [0, 1], got {self.r}")
        if not 0.0 <= self.R <= 1.0:
            raise DomainError(f"R must lie in [0, 1], got {self.R}")
        sigma = _frozen_vector(self.sigma, "sigma")
        if abs(np.linalg.norm(sigma) - 1.0) > UNIT_TOL * 10:
            raise DomainError(f"sigma must be a unit vector, |sigma| = {np.linalg.norm(sigma)!r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class CollisionState:
    a: MicroState
    b: MicroState
    angles: CollisionAngles

    @classmethod
    def from_values(cls, v, v_star, I, I_star, r, R, sigma) -> "CollisionState":
        return cls(MicroState(v, I), MicroState(v_star, I_star), CollisionAngles(r, R, sigma))

    def swapped(self) -> "CollisionState":
        """Particle exchange: v <-> v*, I <-> I*, r -> 1-r, sigma -> -sigma."""
        return CollisionState(
            self.b, self.a,
            CollisionAngles(1.0 - self.angles.r, self.angles.R, -self.angles.sigma),
        )


@dataclass(frozen=True)
class SpeciesParams:
    """
    Molecular mass m (kg), internal-degrees parameter alpha = (D-5)/2 and the
    Boltzmann constant used with it (1 in dimensionless mode).
    """

    name: str
    m: float
    alpha: float
    D: Optional[float] = None
    k: float = BOLTZMANN

    def __post_init__(self):
        if not self.m > 0.0:
            raise DomainError(f"{self.name}: mass must be positive, got {self.m}")
        if not self.alpha > -1.0:
            raise DomainError(f"{self.name}: alpha must exceed -1, got {self.alpha}")
        if not self.k > 0.0:
            raise DomainError(f"{self.name}: k must be positive, got {self.k}")
        if self.D is not None and abs(self.alpha - (self.D - 5.0) / 2.0) >= 1e-12:
            raise DomainError(
                f"{self.name}: alpha={self.alpha} inconsistent with D={self.D} (alpha=(D-5)/2)"
            )

    @classmethod
    def from_dof(cls, name: str, m: float, D: float, k: float = BOLTZMANN) -> "SpeciesParams":
        return cls(name=name, m=m, alpha=(D - 5.0) / 2.0, D=D, k=k)

    @classmethod
    def dimensionless(cls, alpha: float, name: str = "dimensionless") -> "SpeciesParams":
        return cls(name=name, m=1.0, alpha=alpha, k=1.0)


@dataclass(frozen=True)
class InteractionParams:
    """
    Model-3 cross section parameters: exponent gamma and the angular kernel b.

    Either a constant kernel b = K, or a table of b over cos(theta) in [-1, 1]
    (linear interpolation); b_norm is the L1 norm of b over the unit sphere.
    """

    gamma: float
    K: Optional[float] = None
    b_cos: Optional[tuple] = None
    b_values: Optional[tuple] = None
    b_norm: float = field(init=False)

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if self.K is not None:
            if self.b_cos is not None:
                raise DomainError("give either a constant K or a tabulated kernel, not both")
            norm = 4.0 * math.pi * self.K
        else:
            if self.b_cos is None or self.b_values is None:
                raise DomainError("angular kernel missing: pass K or (b_cos, b_values)")
            mu = np.asarray(self.b_cos, dtype=float)
            b = np.asarray(self.b_values, dtype=float)
            if mu.shape != b.shape or mu.size < 2 or np.any(np.diff(mu) <= 0):
                raise DomainError("b_cos must be strictly increasing and match b_values")
            if mu[0] > -1.0 or mu[-1] < 1.0:
                raise DomainError("tabulated kernel must cover cos(theta) in [-1, 1]")
            if np.any(b < 0):
                raise DomainError("angular kernel must be nonnegative")
            object.__setattr__(self, "b_cos", tuple(mu))
            object.__setattr__(self, "b_values", tuple(b))
            norm = 2.0 * math.pi * float(np.trapezoid(b, mu))
        if not norm > 0.0:
            raise DomainError(f"||b|| over the sphere must be positive, got {norm}")
        object.__setattr__(self, "b_norm", norm)

    @classmethod
    def constant(cls, gamma: float, K: float = 1.0) -> "InteractionParams":
        return cls(gamma=gamma, K=K)

    @classmethod
    def from_norm(cls, gamma: float, b_norm: float) -> "InteractionParams":
        """Constant kernel with the given sphere norm (K = ||b|| / 4 pi)."""
        return cls(gamma=gamma, K=b_norm / (4.0 * math.pi))

    @property
    def is_constant(self) -> bool:
        return self.K is not None

    def angular(self, cos_theta):
        if self.K is not None:
            return np.full_like(np.asarray(cos_theta, dtype=float), self.K)
        return np.interp(cos_theta, self.b_cos, self.b_values)


# ── Array kernels ─────────────────────────────────────────────────────────────

def total_energy_arrays(v, v_star, I, I_star, m):
    u = v - v_star
    return 0.25 * m * np.einsum("...i,...i->...", u, u) + I + I_star


def collide_arrays(v, v_star, I, I_star, r, R, sigma, m):
    """
    Apply T to batches. Shapes: velocities (..., 3), scalars (...).
    Returns (v', v*', I', I*', r', R', sigma'). Rows with E = 0 or u = 0
    come back as nan in the affected outputs.
    """
    u = v - v_star
    u2 = np.einsum("...i,...i->...", u, u)
    E = 0.25 * m * u2 + I + I_star
    V = 0.5 * (v + v_star)
    with np.errstate(divide="ignore", invalid="ignore"):
        speed = np.sqrt(R * E / m)[..., None]
        v_new = V + speed * sigma
        vs_new = V - speed * sigma
        I_new = r * (1.0 - R) * E
        Is_new = (1.0 - r) * (1.0 - R) * E
        internal = I + I_star
        r_new = np.where(internal > 0.0, I / np.where(internal > 0.0, internal, 1.0), 0.5)
        R_new = 0.25 * m * u2 / E
        norm_u = np.sqrt(u2)[..., None]
        sigma_new = u / norm_u
    return v_new, vs_new, I_new, Is_new, r_new, R_new, sigma_new


def cross_section_arrays(v, v_star, I, I_star, r, R, sigma, m, inter: InteractionParams):
    """B^{nw} of model 3 evaluated row-wise."""
    u = v - v_star
    u2 = np.einsum("...i,...i->...", u, u)
    g = inter.gamma
    kinetic = np.power(R * u2, 0.5 * g)
    first = np.power(r * (1.0 - R) * I / m, 0.5 * g)
    second = np.power((1.0 - r) * (1.0 - R) * I_star / m, 0.5 * g)
    if inter.is_constant:
        b = inter.K
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            cos_theta = np.einsum("...i,...i->...", u, sigma) / np.sqrt(u2)
        b = inter.angular(np.nan_to_num(cos_theta, nan=1.0))
    return b * (kinetic + first + second)


def phi_alpha(r, alpha):
    return np.power(r * (1.0 - r), alpha)


def psi_alpha(R, alpha):
    return np.power(1.0 - R, 2.0 * alpha)


def measure_weight_arrays(v, v_star, I, I_star, r, R, sigma, species: SpeciesParams,
                          inter: InteractionParams):
    a = species.alpha
    B = cross_section_arrays(v, v_star, I, I_star, r, R, sigma, species.m, inter)
    return (B * phi_alpha(r, a) * (1.0 - R) * np.sqrt(R) * psi_alpha(R, a)
            * np.power(I, a) * np.power(I_star, a))


# ── Scalar operations ─────────────────────────────────────────────────────────

def _unpack(s: CollisionState):
    return (s.a.v, s.b.v, s.a.I, s.b.I, s.angles.r, s.angles.R, s.angles.sigma)


def total_energy(s: CollisionState, species: SpeciesParams) -> float:
    """E = (m/4)|v - v*|^2 + I + I*, the energy available in the centre-of-mass frame."""
    return float(total_energy_arrays(s.a.v, s.b.v, s.a.I, s.b.I, species.m))


def collide(s: CollisionState, species: SpeciesParams) -> CollisionState:
    """Post-collisional state T(s); T(T(s)) = s."""
    E = total_energy(s, species)
    if not E > 0.0:
        raise DegenerateCollision("total collision energy is zero")
    u = s.a.v - s.b.v
    if not np.linalg.norm(u) > 0.0:
        raise DegenerateDirection("relative velocity is zero, sigma' undefined")
    v1, v2, I1, I2, r1, R1, sig = collide_arrays(*_unpack(s), species.m)
    # R' may round a hair outside [0, 1]
    R1 = min(max(float(R1), 0.0), 1.0)
    r1 = min(max(float(r1), 0.0), 1.0)
    sig = sig / np.linalg.norm(sig)
    return CollisionState(
        MicroState(v1, max(float(I1), 0.0)),
        MicroState(v2, max(float(I2), 0.0)),
        CollisionAngles(r1, R1, sig),
    )


def jacobian(s: CollisionState, species: SpeciesParams) -> float:
    """J_T = (1-R) R^{1/2} / ((1-R') R'^{1/2})."""
    R = s.angles.R
    E = total_energy(s, species)
    if not E > 0.0:
        raise DegenerateCollision("total collision energy is zero")
    u = s.a.v - s.b.v
    R_post = 0.25 * species.m * float(u @ u) / E
    denom = (1.0 - R_post) * math.sqrt(R_post)
    if denom == 0.0:
        raise SingularConfiguration(f"Jacobian denominator vanishes (R'={R_post})")
    return (1.0 - R) * math.sqrt(R) / denom


def jacobian_velocity_form(s: CollisionState, species: SpeciesParams) -> float:
    """Same Jacobian written as (1-R)|u'| / ((1-R')|u|)."""
    post = collide(s, species)
    u = np.linalg.norm(s.a.v - s.b.v)
    u_post = np.linalg.norm(post.a.v - post.b.v)
    denom = (1.0 - post.angles.R) * u
    if denom == 0.0:
        raise SingularConfiguration("Jacobian denominator vanishes")
    return (1.0 - s.angles.R) * u_post / denom


def invariant_product(s: CollisionState) -> float:
    """I I* r(1-r)(1-R)^2, unchanged by the collision map."""
    r, R = s.angles.r, s.angles.R
    return s.a.I * s.b.I * r * (1.0 - r) * (1.0 - R) ** 2


def cross_section_model3(s: CollisionState, species: SpeciesParams, inter: InteractionParams) -> float:
    return float(cross_section_arrays(*_unpack(s), species.m, inter))


def measure_weight(s: CollisionState, species: SpeciesParams, inter: InteractionParams) -> float:
    """B^{nw} phi(r) (1-R) R^{1/2} psi(R) I^alpha I*^alpha."""
    return float(measure_weight_arrays(*_unpack(s), species, inter))


# ── Finite-difference Jacobian oracle ─────────────────────────────────────────

def _chart_pole(sigma) -> float:
    return -1.0 if sigma[2] < -CHART_SWITCH else 1.0


def _to_chart(sigma, pole: float):
    return sigma[:2] / (1.0 + pole * sigma[2])


def _from_chart(xy, pole: float):
    x, y = xy
    d = 1.0 + x * x + y * y
    return np.array([2.0 * x / d, 2.0 * y / d, pole * (1.0 - x * x - y * y) / d])


def _chart_area(xy) -> float:
    d = 1.0 + xy[0] ** 2 + xy[1] ** 2
    return 4.0 / (d * d)


def finite_difference_jacobian(s: CollisionState, species: SpeciesParams, h: float = 1e-6) -> float:
    """
    |det DT| with respect to dv dv* dI dI* dr dR dsigma, by central
    differences in 12 coordinates (sigma in a stereographic chart). The chart
    area elements on both sides convert the coordinate determinant back to
    surface measure.
    """
    pole_in = _chart_pole(s.angles.sigma)
    base = collide(s, species)
    pole_out = _chart_pole(base.angles.sigma)

    def coords_in(state: CollisionState):
        return np.concatenate([state.a.v, state.b.v,
                               [state.a.I, state.b.I, state.angles.r, state.angles.R],
                               _to_chart(state.angles.sigma, pole_in)])

    def image(z):
        sigma = _from_chart(z[10:12], pole_in)
        out = collide_arrays(z[0:3], z[3:6], z[6], z[7], z[8], z[9], sigma, species.m)
        v1, v2, I1, I2, r1, R1, sig = out
        sig = sig / np.linalg.norm(sig)
        return np.concatenate([v1, v2, [I1, I2, r1, R1], _to_chart(sig, pole_out)])

    z0 = coords_in(s)
    jac = np.empty((12, 12))
    for j in range(12):
        step = h * max(1.0, abs(z0[j]))
        zp, zm = z0.copy(), z0.copy()
        zp[j] += step
        zm[j] -= step
        jac[:, j] = (image(zp) - image(zm)) / (2.0 * step)
    det = abs(np.linalg.det(jac))
    xy_in = z0[10:12]
    xy_out = _to_chart(base.angles.sigma, pole_out)
    return det * _chart_area(xy_out) / _chart_area(xy_in)
