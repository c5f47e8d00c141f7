"""
Fourteen-Moment Closure
=======================
Linearized production terms of the fourteen-moment system for the model-3
cross section with a constant angular kernel b = K, and everything derived
from them: relaxation times, shear/bulk viscosity, heat conductivity and the
Prandtl number.

  P_ij = -(1/tau_s) p<ij> - (1/tau_Pi) Pi delta_ij
  Q_i  = sum_k U_k P_ki - (1/tau_q) q_i

  mu = p tau_s      nu = 4(a+1)/(3(2a+5)) p tau_Pi      kappa = (a+7/2) p^2/(rho T) tau_q

The Prandtl number depends on (alpha, gamma) only. It is evaluated with every
Gamma function in log space so the gamma* search can run up to gamma ~ 100.
The bulk relaxation time here is three times the six-field one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing      import Optional

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from kinetics.ensembles     import HydroState
from kinetics.errors        import DomainError, NoSignChange
from kinetics.microdynamics import InteractionParams, SpeciesParams
from kinetics.special_fn    import log_gamma


log = logging.getLogger(__name__)

GAMMA_BRACKET = (1e-3, 100.0)
SCAN_INTERVALS = 200
ROOT_XTOL = 1e-12


def _check_params(alpha: float, gamma: float) -> None:
    if not alpha > -1.0:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")


def _constant_kernel(inter: InteractionParams) -> float:
    if not inter.is_constant:
        raise DomainError("fourteen-moment production terms need a constant angular kernel b = K")
    return inter.K


# ── Constants ─────────────────────────────────────────────────────────────────

def _log_n_constants(alpha: float, gamma: float) -> tuple[float, float]:
    _check_params(alpha, gamma)
    log_n1 = (2.0 * log_gamma(alpha + 1.0)
              + log_gamma(0.5 * (gamma + 3.0)) + log_gamma(0.5 * (gamma + 5.0)))
    log_n2 = math.log(math.pi) + 2.0 * log_gamma(alpha + 0.5 * gamma + 1.0)
    return log_n1, log_n2


def n_constants(alpha: float, gamma: float) -> tuple[float, float]:
    """n1 = Gamma(a+1)^2 Gamma((g+3)/2) Gamma((g+5)/2),  n2 = pi Gamma(a + g/2 + 1)^2."""
    log_n1, log_n2 = _log_n_constants(alpha, gamma)
    return math.exp(log_n1), math.exp(log_n2)


def _heat_polynomials(alpha: float, gamma: float) -> tuple[float, float]:
    # n1 and n2 coefficients of the heat-flux production, without the 2^{g+5} of the first
    s = 4.0 * alpha + gamma
    A = s * (3.0 * alpha + gamma) + 57.0 * alpha + 15.0 * gamma + 60.0
    B = 9.0 * (s * (2.0 * s + gamma * gamma + 38.0) + 7.0 * gamma * gamma + 160.0)
    return A, B


def _rate_prefactor(hydro: HydroState, species: SpeciesParams, K: float, gamma: float) -> float:
    # K (rho/m) (p/rho)^{gamma/2} sqrt(pi), the Gamma((4a+g+9)/2) divisor handled by the callers
    p = hydro.pressure(species)
    return K * hydro.rho / species.m * (p / hydro.rho) ** (0.5 * gamma) * math.sqrt(math.pi)


def _shear_bracket(alpha: float, gamma: float) -> float:
    """(4a+g+7)(2^{g+2}(g+5) n1 + 15 n2) / (15 Gamma((4a+g+9)/2))."""
    log_n1, log_n2 = _log_n_constants(alpha, gamma)
    lg = log_gamma(0.5 * (4.0 * alpha + gamma + 9.0))
    inner = (math.exp((gamma + 2.0) * math.log(2.0) + math.log(gamma + 5.0) + log_n1 - lg)
             + 15.0 * math.exp(log_n2 - lg))
    return (4.0 * alpha + gamma + 7.0) * inner / 15.0


def _bulk_bracket(alpha: float, gamma: float) -> float:
    """(a+5/2)(2^{g+4} n1/3 + (4a+g+4) n2/(a+1)) / Gamma((4a+g+9)/2)."""
    log_n1, log_n2 = _log_n_constants(alpha, gamma)
    lg = log_gamma(0.5 * (4.0 * alpha + gamma + 9.0))
    inner = (math.exp((gamma + 4.0) * math.log(2.0) + log_n1 - lg) / 3.0
             + (4.0 * alpha + gamma + 4.0) / (alpha + 1.0) * math.exp(log_n2 - lg))
    return (alpha + 2.5) * inner


def _heat_bracket(alpha: float, gamma: float) -> float:
    """(2^{g+5} A n1 + B n2) / (72 (a+7/2) Gamma((4a+g+9)/2))."""
    log_n1, log_n2 = _log_n_constants(alpha, gamma)
    lg = log_gamma(0.5 * (4.0 * alpha + gamma + 9.0))
    A, B = _heat_polynomials(alpha, gamma)
    inner = (A * math.exp((gamma + 5.0) * math.log(2.0) + log_n1 - lg)
             + B * math.exp(log_n2 - lg))
    return inner / (72.0 * (alpha + 3.5))


# ── Production terms ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ProductionLinear14:
    """Rates (1/s) multiplying p<ij>, Pi delta_ij and q_i; all negative."""

    P_dev_coeff: float
    P_Pi_coeff: float
    Q_q_coeff: float


def production_coefficients(hydro: HydroState, species: SpeciesParams,
                            inter: InteractionParams) -> ProductionLinear14:
    K = _constant_kernel(inter)
    a, g = species.alpha, inter.gamma
    pref = _rate_prefactor(hydro, species, K, g)
    return ProductionLinear14(
        P_dev_coeff=-pref * _shear_bracket(a, g),
        P_Pi_coeff=-pref * _bulk_bracket(a, g),
        Q_q_coeff=-pref * _heat_bracket(a, g),
    )


def production_14(hydro: HydroState, species: SpeciesParams, inter: InteractionParams):
    """
    Linearized productions (P_ij, Q_i, coefficients) at the state `hydro`.
    Q_i includes the convective part sum_k U_k P_ki.
    """
    co = production_coefficients(hydro, species, inter)
    P = co.P_dev_coeff * hydro.p_dev + co.P_Pi_coeff * hydro.Pi * np.eye(3)
    Q = hydro.U @ P + co.Q_q_coeff * hydro.q
    return P, Q, co


def relaxation_times(hydro: HydroState, species: SpeciesParams,
                     inter: InteractionParams) -> tuple[float, float, float]:
    co = production_coefficients(hydro, species, inter)
    return -1.0 / co.P_dev_coeff, -1.0 / co.P_Pi_coeff, -1.0 / co.Q_q_coeff


# ── Isotropic decomposition of the collision tensors ─────────────────────────

def _tensor_prefactor(rho: float, p: float, K: float, m: float, gamma: float, power: float) -> float:
    return K * rho * rho / m * (p / rho) ** (0.5 * gamma + power)


def sum_P_rrtt(rho: float, p: float, alpha: float, gamma: float, K: float, m: float) -> float:
    """Full contraction sum_{r,t} P_rrtt of the linearized stress production tensor."""
    log_n1, log_n2 = _log_n_constants(alpha, gamma)
    lg = log_gamma(0.5 * (4.0 * alpha + gamma + 9.0))
    brace = (3.0 * (4.0 * alpha + gamma + 4.0) * math.exp(log_n2 - lg)
             + (alpha + 1.0) * math.exp((gamma + 4.0) * math.log(2.0) + log_n1 - lg))
    return -_tensor_prefactor(rho, p, K, m, gamma, 2.0) * 2.0 * math.sqrt(math.pi) * brace


def sum_P_rtrt(rho: float, p: float, alpha: float, gamma: float, K: float, m: float) -> float:
    """Contraction sum_{r,t} P_rtrt."""
    log_n1, log_n2 = _log_n_constants(alpha, gamma)
    lg = log_gamma(0.5 * (4.0 * alpha + gamma + 9.0))
    poly = 4.0 * alpha * (gamma + 6.0) + gamma * (gamma + 12.0) + 39.0
    brace = (9.0 * (8.0 * alpha + 2.0 * gamma + 13.0) * math.exp(log_n2 - lg)
             + poly * math.exp((gamma + 2.0) * math.log(2.0) + log_n1 - lg))
    return -_tensor_prefactor(rho, p, K, m, gamma, 2.0) * 2.0 * math.sqrt(math.pi) * brace / 3.0


def sum_Q_rr(rho: float, p: float, alpha: float, gamma: float, K: float, m: float) -> float:
    """Trace sum_r Q_rr of the linearized heat-flux production tensor (m-independent)."""
    log_n1, log_n2 = _log_n_constants(alpha, gamma)
    lg = log_gamma(0.5 * (4.0 * alpha + gamma + 9.0))
    A, B = _heat_polynomials(alpha, gamma)
    brace = (A * math.exp((gamma + 5.0) * math.log(2.0) + log_n1 - lg)
             + B * math.exp(log_n2 - lg))
    return -K * rho * rho * (p / rho) ** (0.5 * gamma + 3.0) * math.sqrt(math.pi) / 24.0 * brace


def P_iso_coefficients(rho: float, p: float, alpha: float, gamma: float, K: float,
                       m: float) -> tuple[float, float]:
    """(P1, P2) of P_ijkl = P1 d_ij d_kl + P2 (d_ik d_jl + d_il d_jk)."""
    rrtt = sum_P_rrtt(rho, p, alpha, gamma, K, m)
    rtrt = sum_P_rtrt(rho, p, alpha, gamma, K, m)
    return (2.0 * rrtt - rtrt) / 15.0, (3.0 * rtrt - rrtt) / 30.0


def production_from_tensors(hydro: HydroState, species: SpeciesParams, inter: InteractionParams):
    """P_ij and Q_i rebuilt from the isotropic tensor sums instead of the closed forms."""
    K = _constant_kernel(inter)
    a, g, m = species.alpha, inter.gamma, species.m
    rho = hydro.rho
    p = hydro.pressure(species)
    P1, P2 = P_iso_coefficients(rho, p, a, g, K, m)
    A = hydro.p_dev + (a + 2.5) / (a + 1.0) * hydro.Pi * np.eye(3)
    P = rho / (2.0 * p * p) * (P1 * np.trace(A) * np.eye(3) + 2.0 * P2 * A)
    heat = rho * rho / ((a + 3.5) * m * p ** 3) * sum_Q_rr(rho, p, a, g, K, m) / 3.0
    Q = hydro.U @ P + heat * hydro.q
    return P, Q


# ── Transport coefficients ────────────────────────────────────────────────────

@dataclass(frozen=True)
class TransportCoefficients:
    mu: float
    nu_bulk: float
    kappa: float
    tau_s: float
    tau_Pi: float
    tau_q: float
    Pr: float

    def to_dict(self) -> dict:
        return asdict(self)


def transport_coefficients(hydro: HydroState, species: SpeciesParams,
                           inter: InteractionParams) -> TransportCoefficients:
    """mu, nu, kappa from their closed forms; relaxation times from the productions."""
    K = _constant_kernel(inter)
    a, g, m, k = species.alpha, inter.gamma, species.m, species.k
    theta = (hydro.pressure(species) / hydro.rho) ** (1.0 - 0.5 * g)
    sqrt_pi = math.sqrt(math.pi)
    log_n1, log_n2 = _log_n_constants(a, g)
    lg = log_gamma(0.5 * (4.0 * a + g + 9.0))

    shear = (4.0 * a + g + 7.0) * (math.exp((g + 2.0) * math.log(2.0) + math.log(g + 5.0) + log_n1 - lg)
                                   + 15.0 * math.exp(log_n2 - lg))
    mu = m / K * theta / sqrt_pi * 15.0 / shear

    bulk = ((a + 1.0) * math.exp((g + 4.0) * math.log(2.0) + log_n1 - lg) / 3.0
            + (4.0 * a + g + 4.0) * math.exp(log_n2 - lg))
    nu = m / K * theta * 2.0 * (a + 1.0) ** 2 / (3.0 * (a + 2.5) ** 2) / sqrt_pi / bulk

    A, B = _heat_polynomials(a, g)
    heat = (A * math.exp((g + 5.0) * math.log(2.0) + log_n1 - lg) + B * math.exp(log_n2 - lg))
    kappa = k / K * theta * (a + 3.5) ** 2 * 72.0 / sqrt_pi / heat

    tau_s, tau_Pi, tau_q = relaxation_times(hydro, species, inter)
    return TransportCoefficients(
        mu=mu, nu_bulk=nu, kappa=kappa,
        tau_s=tau_s, tau_Pi=tau_Pi, tau_q=tau_q,
        Pr=prandtl_number(a, g),
    )


# ── Prandtl number ────────────────────────────────────────────────────────────

def prandtl_number(alpha: float, gamma: float) -> float:
    """(a+7/2)(k/m) mu/kappa; depends on (alpha, gamma) only."""
    return _heat_bracket(alpha, gamma) / _shear_bracket(alpha, gamma)


def eucken_Pr(alpha: float) -> float:
    if not alpha > -1.0:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    return (4.0 * alpha + 14.0) / (4.0 * alpha + 19.0)


def delta_Pr(gamma: float, alpha: float, species: Optional[SpeciesParams] = None,
             hydro: Optional[HydroState] = None, K: float = 1.0) -> float:
    """
    Model Prandtl number minus Eucken's value. With a species and base state
    the model value goes through the dimensional mu and kappa instead.
    """
    if species is None:
        pr = prandtl_number(alpha, gamma)
    else:
        sp = replace(species, alpha=alpha, D=None)
        base = hydro or HydroState(rho=1.0, T=300.0)
        tc = transport_coefficients(base, sp, InteractionParams.constant(gamma, K))
        pr = (alpha + 3.5) * sp.k / sp.m * tc.mu / tc.kappa
    return pr - eucken_Pr(alpha)


def _scan_bracket(f, lo: float, hi: float, intervals: int):
    grid = np.geomspace(lo, hi, intervals + 1)
    prev_x, prev_f = grid[0], f(grid[0])
    for x in grid[1:]:
        fx = f(x)
        if prev_f == 0.0:
            return prev_x, prev_x
        if np.sign(fx) != np.sign(prev_f):
            return prev_x, x
        prev_x, prev_f = x, fx
    return None


def solve_gamma_star(alpha: float, bracket: tuple[float, float] = GAMMA_BRACKET) -> float:
    """gamma with Delta(gamma, alpha) = 0, i.e. model Pr equal to Eucken's."""
    lo, hi = bracket
    if not 0.0 < lo < hi:
        raise DomainError(f"invalid bracket {bracket}")

    def f(g):
        return delta_Pr(g, alpha)

    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        log.info("Delta has one sign at both ends of %s for alpha=%g, scanning %d intervals",
                 bracket, alpha, SCAN_INTERVALS)
        found = _scan_bracket(f, lo, hi, SCAN_INTERVALS)
        if found is None:
            raise NoSignChange(f"Delta(gamma, {alpha}) does not change sign on {bracket}")
        lo, hi = found
        if lo == hi:
            return lo
    return brentq(f, lo, hi, xtol=ROOT_XTOL, rtol=4.0 * np.finfo(float).eps)


def delta_scan(alphas, gammas) -> pd.DataFrame:
    """Delta(gamma, alpha) over a grid, columns alpha, gamma, delta."""
    rows = [(float(a), float(g), delta_Pr(float(g), float(a))) for a in alphas for g in gammas]
    return pd.DataFrame(rows, columns=["alpha", "gamma", "delta"])


# ── Viscosity exponent and degrees of freedom ─────────────────────────────────

def s_to_gamma(s: float) -> float:
    """gamma from the viscosity temperature exponent of mu ~ T^s."""
    if not s < 1.0:
        raise DomainError(f"viscosity exponent s must be < 1 for a positive gamma, got {s}")
    return 2.0 - 2.0 * s


def gamma_to_s(gamma: float) -> float:
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return 1.0 - 0.5 * gamma


def alpha_from_dof(D: float) -> float:
    alpha = (D - 5.0) / 2.0
    if not alpha > -1.0:
        raise DomainError(f"D = {D} gives alpha = {alpha} <= -1")
    return alpha


def alpha_vibrating(atoms: int) -> float:
    """alpha of an N-atom molecule with all 3N modes active."""
    if atoms < 2:
        raise DomainError(f"polyatomic molecule needs at least 2 atoms, got {atoms}")
    return (3.0 * atoms - 5.0) / 2.0


def eucken_Pr_atoms(atoms: int) -> float:
    return eucken_Pr(alpha_vibrating(atoms))


# ── Closed fluxes ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ClosureFluxes14:
    p_ijk: np.ndarray
    q_ij: np.ndarray


def _full_pressure(hydro: HydroState, p: float) -> np.ndarray:
    return hydro.p_dev + (p + hydro.Pi) * np.eye(3)


def closure_fluxes_14(hydro: HydroState, species: SpeciesParams) -> ClosureFluxes14:
    a = species.alpha
    p = hydro.pressure(species)
    q = hydro.q
    d = np.eye(3)
    p_ijk = (np.einsum("i,jk->ijk", q, d) + np.einsum("j,ki->ijk", q, d)
             + np.einsum("k,ij->ijk", q, d)) / (a + 3.5)
    q_ij = (a + 4.5) * p / hydro.rho * _full_pressure(hydro, p) - p * p / hydro.rho * d
    return ClosureFluxes14(p_ijk=p_ijk, q_ij=q_ij)


@dataclass(frozen=True)
class BalanceFluxes14:
    """Lab-frame fluxes of the fourteen densities (rho, rho U, rho UU + p, energy, energy flux)."""

    mass: np.ndarray
    momentum: np.ndarray
    stress: np.ndarray
    energy: np.ndarray
    energy_flux: np.ndarray


def balance_fluxes_14(hydro: HydroState, species: SpeciesParams) -> BalanceFluxes14:
    a = species.alpha
    rho, U, q = hydro.rho, hydro.U, hydro.q
    p = hydro.pressure(species)
    P = _full_pressure(hydro, p)
    closed = closure_fluxes_14(hydro, species)
    d = np.eye(3)
    U2 = float(U @ U)
    total_energy = 0.5 * rho * U2 + (a + 2.5) * p

    stress = (rho * np.einsum("i,j,k->ijk", U, U, U)
              + np.einsum("i,jk->ijk", U, P) + np.einsum("j,ki->ijk", U, P)
              + np.einsum("k,ij->ijk", U, P) + closed.p_ijk)
    energy = total_energy * U + P @ U + q
    PU = P @ U
    energy_flux = (total_energy * np.outer(U, U)
                   + np.outer(U, PU) + np.outer(PU, U)
                   + 0.5 * U2 * P
                   + (a + 4.5) / (a + 3.5) * (np.outer(q, U) + np.outer(U, q))
                   + float(q @ U) / (a + 3.5) * d
                   + closed.q_ij)
    return BalanceFluxes14(
        mass=rho * U,
        momentum=rho * np.outer(U, U) + P,
        stress=stress,
        energy=energy,
        energy_flux=energy_flux,
    )
