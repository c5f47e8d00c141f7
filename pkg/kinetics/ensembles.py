"""
Ensembles
=========
Local equilibrium and maximum-entropy distributions of the non-weighted
polyatomic model, their moments, entropy, and the equilibrium collision
frequency of the model-3 cross section.

  Maxwellian           f_M  = L0 I^alpha exp(-(m|c|^2/2 + I)/kT)
  SixField             f6   = L  I^alpha exp(-M|c|^2 - N I)
  FourteenLinearized   f14  = f_M (1 + linear corrections in Pi, p<ij>, q)

Moments are evaluated with tensorized Gauss–Hermite (per velocity axis,
centred on U) times generalized Gauss–Laguerre (weight I^alpha e^{-I}) nodes
scaled to each distribution's own Gaussian/Gamma envelope, or by plain
Monte Carlo from that same envelope.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from enum        import Enum
from functools   import lru_cache
from typing      import Optional, Union

import numpy as np
from scipy.special import roots_genlaguerre, xlogy

from kinetics.constants     import WINDOW_GUARD
from kinetics.errors        import DomainError, OutOfValidityWindow, UnsupportedWeight
from kinetics.microdynamics import InteractionParams, MicroState, SpeciesParams
from kinetics.special_fn    import gamma_fn, log_gamma, scaled_hyp1f1_b3half
from utils.rng              import substream


log = logging.getLogger(__name__)

QUAD_ORDER = int(os.getenv("POLYKIN_QUAD_ORDER", "40"))


# ── Macroscopic state ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class HydroState:
    """
    rho (kg/m^3), U (m/s), T (K, or energy units with k = 1), dynamic
    pressure Pi (Pa), traceless deviator p_dev (Pa), heat flux q (W/m^2).
    The hydrostatic pressure is always derived: p = rho k T / m.
    """

    rho: float
    T: float
    U: np.ndarray = field(default_factory=lambda: np.zeros(3))
    Pi: float = 0.0
    p_dev: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    q: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not self.rho > 0.0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not self.T > 0.0:
            raise DomainError(f"T must be positive, got {self.T}")
        U = np.array(self.U, dtype=float).reshape(3)
        q = np.array(self.q, dtype=float).reshape(3)
        p_dev = np.array(self.p_dev, dtype=float).reshape(3, 3)
        if not np.allclose(p_dev, p_dev.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(p_dev).max())):
            raise DomainError("p_dev must be symmetric")
        if abs(np.trace(p_dev)) > 1e-12 * np.linalg.norm(p_dev):
            raise DomainError(f"p_dev must be traceless, trace = {np.trace(p_dev)}")
        for arr in (U, q, p_dev):
            arr.setflags(write=False)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p_dev", p_dev)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "Pi", float(self.Pi))

    @classmethod
    def from_pressure(cls, rho: float, p: float, species: SpeciesParams, **fields) -> "HydroState":
        return cls(rho=rho, T=p * species.m / (rho * species.k), **fields)

    def pressure(self, species: SpeciesParams) -> float:
        return self.rho * species.k * self.T / species.m

    def number_density(self, species: SpeciesParams) -> float:
        return self.rho / species.m

    def at_equilibrium(self) -> "HydroState":
        return HydroState(rho=self.rho, T=self.T, U=self.U)

    def with_fields(self, **changes) -> "HydroState":
        values = dict(rho=self.rho, T=self.T, U=self.U, Pi=self.Pi, p_dev=self.p_dev, q=self.q)
        values.update(changes)
        return HydroState(**values)


def pi_ratio(hydro: HydroState, species: SpeciesParams) -> float:
    return hydro.Pi / hydro.pressure(species)


def window_upper(alpha: float) -> float:
    return 2.0 * (alpha + 1.0) / 3.0


def check_window(hydro: HydroState, species: SpeciesParams) -> float:
    """Return Pi/p, raising when it leaves -1 < Pi/p < 2(alpha+1)/3 (minus the guard band)."""
    x = pi_ratio(hydro, species)
    if not (-1.0 + WINDOW_GUARD < x < window_upper(species.alpha) - WINDOW_GUARD):
        raise OutOfValidityWindow(x, species.alpha)
    return x


# ── Distributions ─────────────────────────────────────────────────────────────

class DistributionKind(str, Enum):
    MAXWELLIAN = "maxwellian"
    SIX_FIELD = "six_field"
    FOURTEEN = "fourteen_linearized"


@dataclass(frozen=True)
class DistributionSpec:
    kind: DistributionKind
    hydro: HydroState
    species: SpeciesParams

    def __post_init__(self):
        object.__setattr__(self, "kind", DistributionKind(self.kind))
        if self.kind is DistributionKind.SIX_FIELD:
            check_window(self.hydro, self.species)

    @property
    def nonequilibrium_norm(self) -> float:
        """(|Pi| + ||p_dev|| + ||q|| / sqrt(p^3/rho)) / p, a size diagnostic for f14."""
        h, p = self.hydro, self.hydro.pressure(self.species)
        q_scale = math.sqrt(p ** 3 / h.rho)
        return (abs(h.Pi) + np.linalg.norm(h.p_dev)) / p + np.linalg.norm(h.q) / q_scale


def maxwellian(hydro: HydroState, species: SpeciesParams) -> DistributionSpec:
    return DistributionSpec(DistributionKind.MAXWELLIAN, hydro.at_equilibrium(), species)


def six_field(hydro: HydroState, species: SpeciesParams) -> DistributionSpec:
    return DistributionSpec(DistributionKind.SIX_FIELD, hydro, species)


def fourteen(hydro: HydroState, species: SpeciesParams) -> DistributionSpec:
    return DistributionSpec(DistributionKind.FOURTEEN, hydro, species)


@dataclass(frozen=True)
class SixFieldParameters:
    """Exponents M, N and prefactor L of f6 = L I^alpha exp(-M|c|^2 - N I)."""

    M: float
    N: float
    log_L: float

    @property
    def L(self) -> float:
        return math.exp(self.log_L)


def six_field_parameters(hydro: HydroState, species: SpeciesParams) -> SixFieldParameters:
    x = check_window(hydro, species)
    kT = species.k * hydro.T
    a = species.alpha
    M = species.m / (2.0 * kT * (1.0 + x))
    N = 1.0 / (kT * (1.0 - 1.5 * x / (a + 1.0)))
    assert M > 0.0 and N > 0.0
    log_L = (math.log(hydro.rho / species.m) + 1.5 * math.log(M / math.pi)
             + (a + 1.0) * math.log(N) - log_gamma(a + 1.0))
    return SixFieldParameters(M=M, N=N, log_L=log_L)


@dataclass(frozen=True)
class Envelope:
    """Isotropic Gaussian in c (per-axis std s_v) times Gamma(alpha+1, theta) in I."""

    s_v: float
    theta: float


def envelope(spec: DistributionSpec) -> Envelope:
    if spec.kind is DistributionKind.SIX_FIELD:
        par = six_field_parameters(spec.hydro, spec.species)
        return Envelope(s_v=math.sqrt(0.5 / par.M), theta=1.0 / par.N)
    kT = spec.species.k * spec.hydro.T
    return Envelope(s_v=math.sqrt(kT / spec.species.m), theta=kT)


def log_envelope_pdf(spec: DistributionSpec, env: Envelope, c, I):
    """log of (rho/m) * Gaussian(c) * Gamma(I), normalized to the number density."""
    a = spec.species.alpha
    c2 = np.einsum("...i,...i->...", c, c)
    return (math.log(spec.hydro.rho / spec.species.m)
            - 1.5 * math.log(2.0 * math.pi * env.s_v ** 2) - c2 / (2.0 * env.s_v ** 2)
            + xlogy(a, I) - I / env.theta - (a + 1.0) * math.log(env.theta) - log_gamma(a + 1.0))


def _fourteen_factor(spec: DistributionSpec, c, I):
    """The braces of f14 = f_M {...}."""
    h, sp = spec.hydro, spec.species
    p = h.pressure(sp)
    a, m, rho = sp.alpha, sp.m, h.rho
    c2 = np.einsum("...i,...i->...", c, c)
    energy = 0.5 * m * c2 + I
    qc = c @ h.q
    A = h.p_dev + (a + 2.5) / (a + 1.0) * h.Pi * np.eye(3)
    cAc = np.einsum("...i,ij,...j->...", c, A, c)
    return (1.0
            - rho / p ** 2 * qc
            - 1.5 / (a + 1.0) * h.Pi * rho / (m * p ** 2) * energy
            + rho / (2.0 * p ** 2) * cAc
            + rho ** 2 / ((a + 3.5) * m * p ** 3) * qc * energy)


def envelope_ratio(spec: DistributionSpec, c, I):
    if spec.kind is DistributionKind.FOURTEEN:
        return _fourteen_factor(spec, c, I)
    return np.ones(np.shape(I))


def log_weighted_pdf(spec: DistributionSpec, c, I):
    """log(f I^{-alpha}) at peculiar velocity c; the distribution must be positive there."""
    env = envelope(spec)
    a = spec.species.alpha
    ratio = envelope_ratio(spec, c, I)
    if np.any(ratio <= 0.0):
        raise DomainError("distribution is not positive at the evaluation points; log undefined")
    c2 = np.einsum("...i,...i->...", c, c)
    return (math.log(spec.hydro.rho / spec.species.m)
            - 1.5 * math.log(2.0 * math.pi * env.s_v ** 2) - c2 / (2.0 * env.s_v ** 2)
            - I / env.theta - (a + 1.0) * math.log(env.theta) - log_gamma(a + 1.0)
            + np.log(ratio))


def eval_pdf(spec: DistributionSpec, v, I=None):
    """
    Distribution value at velocity v (..., 3) and internal energy I (...).
    Accepts a MicroState in place of (v, I). Returns a float for scalar input.
    """
    if isinstance(v, MicroState):
        v, I = v.v, v.I
    v = np.asarray(v, dtype=float)
    I = np.asarray(I, dtype=float)
    if np.any(I < 0):
        raise DomainError("internal energy must be nonnegative")
    c = v - spec.hydro.U
    env = envelope(spec)
    value = np.exp(log_envelope_pdf(spec, env, c, I)) * envelope_ratio(spec, c, I)
    return float(value) if np.ndim(value) == 0 else value


def partition_Z(T: float, species: SpeciesParams) -> float:
    """Z(T) = (kT)^{alpha+1} Gamma(alpha+1)."""
    if not T > 0.0:
        raise DomainError(f"T must be positive, got {T}")
    kT = species.k * T
    return kT ** (species.alpha + 1.0) * gamma_fn(species.alpha + 1.0)


# ── Moments ───────────────────────────────────────────────────────────────────

WEIGHTS = (
    "number", "mass", "momentum", "m_c2", "energy",
    "m_cc", "m_c2c", "energy_c", "m_ccc", "energy_cc",
)


def _reduce(weight: str, w, c, v, I, m):
    """Sum over nodes of w * chi for the selected test function."""
    if weight == "number":
        return np.sum(w)
    if weight == "mass":
        return m * np.sum(w)
    if weight == "momentum":
        return m * np.einsum("n,ni->i", w, v)
    c2 = np.einsum("ni,ni->n", c, c)
    if weight == "m_c2":
        return m * np.dot(w, c2)
    energy = 0.5 * m * c2 + I
    if weight == "energy":
        return np.dot(w, energy)
    if weight == "m_cc":
        return m * np.einsum("n,ni,nj->ij", w, c, c)
    if weight == "m_c2c":
        return m * np.einsum("n,ni->i", w * c2, c)
    if weight == "energy_c":
        return np.einsum("n,ni->i", w * energy, c)
    if weight == "m_ccc":
        return m * np.einsum("n,ni,nj,nk->ijk", w, c, c, c)
    if weight == "energy_cc":
        return np.einsum("n,ni,nj->ij", w * energy, c, c)
    raise UnsupportedWeight(f"unsupported weight selector {weight!r}; choose from {WEIGHTS}")


@lru_cache(maxsize=32)
def _reference_nodes(order: int, alpha: float):
    x, wx = np.polynomial.hermite.hermgauss(order)
    y, wy = roots_genlaguerre(order, alpha)
    gx = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    gw = np.einsum("i,j,k->ijk", wx, wx, wx).reshape(-1) / math.pi ** 1.5
    nodes = (np.repeat(gx, order, axis=0), np.tile(y, order ** 3))
    weights = np.repeat(gw, order) * np.tile(wy / wy.sum(), order ** 3)
    for arr in (*nodes, weights):
        arr.setflags(write=False)
    return nodes, weights


def quadrature_nodes(spec: DistributionSpec, order: Optional[int] = None):
    """(c, I, w) with sum(w * F(c, I)) ~ integral of F f dI dv."""
    order = order or QUAD_ORDER
    (x, y), w_ref = _reference_nodes(order, float(spec.species.alpha))
    env = envelope(spec)
    c = math.sqrt(2.0) * env.s_v * x
    I = env.theta * y
    w = spec.hydro.rho / spec.species.m * w_ref * envelope_ratio(spec, c, I)
    return c, I, w


@dataclass(frozen=True)
class MomentEstimate:
    value: Union[float, np.ndarray]
    std_error: Union[float, np.ndarray]
    n_samples: int
    seed: int


def moment(spec: DistributionSpec, weight: str, method: str = "quadrature",
           order: Optional[int] = None, n: int = 100_000, seed: int = 0):
    """
    Moment of the distribution against a test function.

    weight  one of WEIGHTS (momentum uses v, the rest the peculiar velocity c)
    method  "quadrature" (returns float or ndarray) or "mc" (MomentEstimate)
    """
    if weight not in WEIGHTS:
        raise UnsupportedWeight(f"unsupported weight selector {weight!r}; choose from {WEIGHTS}")
    m = spec.species.m
    if method == "quadrature":
        c, I, w = quadrature_nodes(spec, order)
        if spec.kind is DistributionKind.FOURTEEN and w.min() < 0.0:
            log.warning("linearized f14 is negative on some quadrature nodes (min weight %.3g)", w.min())
        v = c + spec.hydro.U
        result = _reduce(weight, w, c, v, I, m)
        return float(result) if np.ndim(result) == 0 else result
    if method == "mc":
        return _moment_mc(spec, weight, n, seed)
    raise DomainError(f"unknown moment method {method!r}")


def _per_sample(weight: str, c, v, I, m):
    c2 = np.einsum("ni,ni->n", c, c)
    energy = 0.5 * m * c2 + I
    if weight == "number":
        return np.ones_like(I)
    if weight == "mass":
        return np.full_like(I, m)
    if weight == "momentum":
        return m * v
    if weight == "m_c2":
        return m * c2
    if weight == "energy":
        return energy
    if weight == "m_cc":
        return m * np.einsum("ni,nj->nij", c, c)
    if weight == "m_c2c":
        return m * c2[:, None] * c
    if weight == "energy_c":
        return energy[:, None] * c
    if weight == "m_ccc":
        return m * np.einsum("ni,nj,nk->nijk", c, c, c)
    return energy[:, None, None] * np.einsum("ni,nj->nij", c, c)


def _moment_mc(spec: DistributionSpec, weight: str, n: int, seed: int) -> MomentEstimate:
    env = envelope(spec)
    rng = substream(seed, 0)
    c = rng.normal(0.0, env.s_v, size=(n, 3))
    I = rng.gamma(spec.species.alpha + 1.0, env.theta, size=n)
    ratio = spec.hydro.rho / spec.species.m * envelope_ratio(spec, c, I)
    chi = _per_sample(weight, c, c + spec.hydro.U, I, spec.species.m)
    contrib = ratio.reshape((n,) + (1,) * (chi.ndim - 1)) * chi
    mean = contrib.mean(axis=0)
    se = contrib.std(axis=0, ddof=1) / math.sqrt(n)
    if np.ndim(mean) == 0:
        mean, se = float(mean), float(se)
    return MomentEstimate(value=mean, std_error=se, n_samples=n, seed=seed)


def fourteen_min_weight(spec: DistributionSpec, order: Optional[int] = None) -> float:
    """Smallest f14 / f_M factor over the quadrature nodes (negative means f14 < 0 somewhere)."""
    c, I, _ = quadrature_nodes(spec, order)
    return float(np.min(envelope_ratio(spec, c, I)))


# ── Entropy ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class EntropyDensity:
    """Physical entropy density h (J/(K m^3)) and its flux h_j (W/(K m^2))."""

    h: float
    flux: np.ndarray


def _h_closed(spec: DistributionSpec) -> float:
    sp = spec.species
    hydro = spec.hydro if spec.kind is DistributionKind.SIX_FIELD else spec.hydro.at_equilibrium()
    par = six_field_parameters(hydro, sp)
    return -sp.k * hydro.rho / sp.m * (-(sp.alpha + 2.5) + par.log_L)


def entropy_density(spec: DistributionSpec, method: str = "closed",
                    order: Optional[int] = None) -> EntropyDensity:
    """
    h = -k integral of f log(f I^{-alpha}). "closed" is available for the
    Maxwellian and six-field distributions; "quadrature" integrates directly
    and requires f > 0 on every node.
    """
    sp = spec.species
    if method == "closed":
        if spec.kind is DistributionKind.FOURTEEN:
            raise DomainError("no closed-form entropy for the linearized fourteen-moment distribution")
        h = _h_closed(spec)
    elif method == "quadrature":
        c, I, w = quadrature_nodes(spec, order)
        h = float(-sp.k * np.dot(w, log_weighted_pdf(spec, c, I)))
    else:
        raise DomainError(f"unknown entropy method {method!r}")
    return EntropyDensity(h=h, flux=h * spec.hydro.U)


def rescale_weighted(value: float, I: float, alpha: float, inverse: bool = False) -> float:
    """
    f = g I^alpha (forward) or g = f I^{-alpha} (inverse).

    The inverse at I = 0 is only defined by continuity, so it is refused; a
    negative alpha makes the forward map blow up at I = 0.
    """
    if I < 0.0:
        raise DomainError(f"I must be nonnegative, got {I}")
    if alpha == 0.0:
        return float(value)
    if inverse:
        if I == 0.0:
            raise DomainError("g = f I^-alpha is undefined at I = 0 (removable for alpha > 0)")
        return float(value) * I ** (-alpha)
    if I == 0.0 and alpha < 0.0:
        raise DomainError("f = g I^alpha is infinite at I = 0 for alpha < 0")
    return float(value) * I ** alpha


# ── Collision frequency ───────────────────────────────────────────────────────

def collision_frequency_hat(c_hat: float, I_hat: float, alpha: float, gamma: float) -> float:
    """Dimensionless equilibrium collision frequency of the model-3 cross section."""
    if c_hat < 0.0 or I_hat < 0.0:
        raise DomainError("c_hat and I_hat must be nonnegative")
    g = gamma
    a1 = alpha + 1.0
    ag = alpha + 0.5 * g + 1.0
    z = 0.5 * c_hat * c_hat
    kinetic = (math.exp(log_gamma(a1) + 2.0 * log_gamma(0.5 * (g + 3.0)))
               * 2.0 ** (0.5 * g + 1.0) / math.sqrt(math.pi)
               * scaled_hyp1f1_b3half(0.5 * (g + 3.0), z))
    internal = (0.5 * math.sqrt(math.pi) * math.exp(log_gamma(ag))
                * (I_hat ** (0.5 * g) + math.exp(log_gamma(ag) - log_gamma(a1))))
    return math.exp(log_gamma(a1) - log_gamma(0.5 * (4.0 * alpha + g + 7.0))) * (kinetic + internal)


def collision_frequency(state: MicroState, hydro: HydroState, species: SpeciesParams,
                        inter: InteractionParams) -> float:
    """nu(v, I) in 1/s for the local Maxwellian of `hydro` (Pi, p_dev, q ignored)."""
    kT = species.k * hydro.T
    c = state.v - hydro.U
    c_hat = math.sqrt(species.m / kT) * float(np.linalg.norm(c))
    I_hat = state.I / kT
    scale = hydro.rho / species.m * inter.b_norm * (kT / species.m) ** (0.5 * inter.gamma)
    return scale * collision_frequency_hat(c_hat, I_hat, species.alpha, inter.gamma)


def collision_frequency_grid(alpha: float, gamma: float, c_hat_grid, I_hat_grid):
    """nu_hat over the product grid, as a pandas DataFrame with columns c_hat, I_hat, nu_hat."""
    import pandas as pd

    rows = [
        (float(c), float(i), collision_frequency_hat(float(c), float(i), alpha, gamma))
        for c in c_hat_grid for i in I_hat_grid
    ]
    return pd.DataFrame(rows, columns=["c_hat", "I_hat", "nu_hat"])
