"""
Six-Field Closure
=================
Closed-form production term, entropy production and nonequilibrium entropy
of the maximum-entropy six-field distribution, together with the
space-homogeneous relaxation of the dynamic pressure.

All functions take the state as a HydroState and work with x = Pi/p, which
must stay inside -1 < x < 2(alpha+1)/3. Large gamma is handled in log space:
the Gamma ratios in C_P overflow well before the ratio itself does.

  P      = -C_P (rho^2/m) (p/rho)^{gamma/2+1} ||b|| x
  Sigma  = (1/3) dK/dPi * P >= 0
  K      = (k rho/m) log{(1+x)^{3/2} (1 - 3x/(2(alpha+1)))^{alpha+1}}
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from kinetics.constants     import WINDOW_GUARD
from kinetics.ensembles     import (
    HydroState,
    check_window,
    entropy_density,
    six_field,
    six_field_parameters,
    window_upper,
)
from kinetics.errors        import DomainError, IntegrationFailure, WindowExit
from kinetics.microdynamics import InteractionParams, SpeciesParams
from kinetics.special_fn    import log_gamma


log = logging.getLogger(__name__)

ODE_RTOL = 1e-8
ODE_METHOD = "RK45"


def _check_params(alpha: float, gamma: float) -> None:
    if not alpha > -1.0:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")


# ── Constants ─────────────────────────────────────────────────────────────────

def _log_k_constants(alpha: float, gamma: float) -> tuple[float, float]:
    _check_params(alpha, gamma)
    log_k1 = (0.5 * (gamma + 3.0) * math.log(2.0)
              + log_gamma(alpha + 2.0) + log_gamma(alpha + 1.0)
              + log_gamma(0.5 * (gamma + 3.0)) + log_gamma(0.5 * (gamma + 5.0)))
    log_k2 = (math.log(0.75 * math.sqrt(2.0) * math.pi * (2.0 * alpha + 0.5 * gamma + 2.0))
              + 2.0 * log_gamma(alpha + 0.5 * gamma + 1.0))
    return log_k1, log_k2


def k_constants(alpha: float, gamma: float) -> tuple[float, float]:
    """
    k1 = 2^{(g+3)/2} Gamma(a+2) Gamma(a+1) Gamma((g+3)/2) Gamma((g+5)/2)
    k2 = (3 sqrt2 / 4) pi (2a + g/2 + 2) Gamma(a + g/2 + 1)^2
    """
    log_k1, log_k2 = _log_k_constants(alpha, gamma)
    return math.exp(log_k1), math.exp(log_k2)


def c_P_factor(x: float, alpha: float, gamma: float) -> float:
    """C_P as a function of x = Pi/p; positive on the open validity window."""
    log_k1, log_k2 = _log_k_constants(alpha, gamma)
    lg = log_gamma(0.5 * (4.0 * alpha + gamma + 9.0))
    d_kin = 2.0 * (1.0 + x)
    d_int = 1.0 - 1.5 * x / (alpha + 1.0)
    if not (d_kin > 0.0 and d_int > 0.0):
        raise DomainError(f"C_P undefined at Pi/p = {x} for alpha={alpha}")
    half_g = 0.5 * gamma
    bracket = (math.exp(log_k1 - lg + half_g * math.log(d_kin))
               + math.exp(log_k2 - lg + half_g * math.log(d_int)))
    return math.sqrt(2.0 / math.pi) * (alpha + 2.5) / (alpha + 1.0) * bracket


def _production_scale(rho: float, p: float, species: SpeciesParams, inter: InteractionParams) -> float:
    # (rho^2/m) (p/rho)^{gamma/2+1} ||b||
    return rho * rho / species.m * (p / rho) ** (0.5 * inter.gamma + 1.0) * inter.b_norm


def _production_from_ratio(x: float, rho: float, p: float, species: SpeciesParams,
                           inter: InteractionParams) -> float:
    c_P = c_P_factor(x, species.alpha, inter.gamma)
    return -c_P * _production_scale(rho, p, species, inter) * x


# ── Production and entropy ────────────────────────────────────────────────────

def production_P(hydro: HydroState, species: SpeciesParams,
                 inter: InteractionParams) -> tuple[float, float]:
    """Production term P (Pa/s) of the trace equation and its factor C_P."""
    x = check_window(hydro, species)
    p = hydro.pressure(species)
    c_P = c_P_factor(x, species.alpha, inter.gamma)
    return -c_P * _production_scale(hydro.rho, p, species, inter) * x, c_P


def _window_denominators(x: float, alpha: float) -> tuple[float, float]:
    return 1.0 - 1.5 * x / (alpha + 1.0), 1.0 + x


def entropy_production_Sigma(hydro: HydroState, species: SpeciesParams,
                             inter: InteractionParams) -> float:
    x = check_window(hydro, species)
    a = species.alpha
    p = hydro.pressure(species)
    P, _ = production_P(hydro, species, inter)
    d_int, d_kin = _window_denominators(x, a)
    pref = species.k * hydro.rho / (2.0 * species.m * p)
    return -pref / (d_int * d_kin) * (a + 2.5) / (a + 1.0) * x * P


def _K_value(rho: float, p: float, Pi: float, species: SpeciesParams) -> float:
    x = Pi / p
    a = species.alpha
    return species.k * rho / species.m * (1.5 * math.log1p(x) + (a + 1.0) * math.log1p(-1.5 * x / (a + 1.0)))


def K_noneq(hydro: HydroState, species: SpeciesParams) -> float:
    """Nonequilibrium entropy h(f6) - h(f_M); zero at Pi = 0, negative elsewhere."""
    check_window(hydro, species)
    return _K_value(hydro.rho, hydro.pressure(species), hydro.Pi, species)


def dK_dPi(hydro: HydroState, species: SpeciesParams) -> float:
    x = check_window(hydro, species)
    a = species.alpha
    p = hydro.pressure(species)
    d_int, d_kin = _window_denominators(x, a)
    return -1.5 * species.k * hydro.rho / (species.m * p) * (a + 2.5) / (a + 1.0) * x / (d_int * d_kin)


def K_pde_residual(hydro: HydroState, species: SpeciesParams, rel_step: float = 1e-5) -> float:
    """
    Left-hand side of the extended-thermodynamics condition on K:

      rho K_rho + ((p+Pi)/(a+5/2) + p) K_p
        + {(p+Pi)(5/3 - 1/(a+5/2)) - p} K_Pi - K + Pi/T

    K_Pi is the closed form, K_rho and K_p are central differences. The
    exact value is zero; what comes back is the differencing error.
    """
    check_window(hydro, species)
    a = species.alpha
    rho, Pi = hydro.rho, hydro.Pi
    p = hydro.pressure(species)
    T = species.m * p / (rho * species.k)

    h_rho = rel_step * rho
    h_p = rel_step * p
    K_rho = (_K_value(rho + h_rho, p, Pi, species) - _K_value(rho - h_rho, p, Pi, species)) / (2.0 * h_rho)
    K_p = (_K_value(rho, p + h_p, Pi, species) - _K_value(rho, p - h_p, Pi, species)) / (2.0 * h_p)
    K_Pi = dK_dPi(hydro, species)
    K = _K_value(rho, p, Pi, species)

    beta = a + 2.5
    return (rho * K_rho
            + ((p + Pi) / beta + p) * K_p
            + ((p + Pi) * (5.0 / 3.0 - 1.0 / beta) - p) * K_Pi
            - K + Pi / T)


def tau_Pi_six(hydro: HydroState, species: SpeciesParams, inter: InteractionParams) -> float:
    """Relaxation time from P = -Pi / tau_Pi linearized at Pi = 0."""
    a, g = species.alpha, inter.gamma
    log_k1, log_k2 = _log_k_constants(a, g)
    lg = log_gamma(0.5 * (4.0 * a + g + 9.0))
    p = hydro.pressure(species)
    bracket = math.exp(0.5 * g * math.log(2.0) + log_k1 - lg) + math.exp(log_k2 - lg)
    rate = (hydro.rho / species.m * (p / hydro.rho) ** (0.5 * g) * inter.b_norm
            * (a + 2.5) / (a + 1.0) * math.sqrt(2.0 / math.pi) * bracket)
    return 1.0 / rate


def entropy_production_D6(hydro: HydroState, species: SpeciesParams,
                          inter: InteractionParams) -> float:
    """
    Integral of log(f6 I^-alpha) against the collision operator, evaluated
    through the collision invariants: D = ((m/2) N - M) P / m. Sigma = -k D.
    """
    par = six_field_parameters(hydro, species)
    P, _ = production_P(hydro, species, inter)
    return (0.5 * species.m * par.N - par.M) * P / species.m


# ── Fluxes and report ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ClosureFluxes6:
    """Non-convective fluxes of f6 plus its entropy density and flux."""

    p_ij: np.ndarray
    p_iij: np.ndarray
    q: np.ndarray
    h: float
    h_flux: np.ndarray


def closure_fluxes_6(hydro: HydroState, species: SpeciesParams) -> ClosureFluxes6:
    check_window(hydro, species)
    p = hydro.pressure(species)
    ent = entropy_density(six_field(hydro, species))
    return ClosureFluxes6(
        p_ij=(p + hydro.Pi) * np.eye(3),
        p_iij=np.zeros(3),
        q=np.zeros(3),
        h=ent.h,
        h_flux=ent.flux,
    )


@dataclass(frozen=True)
class SixFieldReport:
    P: float
    C_P: float
    Sigma: float
    K_noneq: float
    dK_dPi: float
    tau_Pi: float
    Pi_over_p: float

    def to_dict(self) -> dict:
        return asdict(self)


def six_field_report(hydro: HydroState, species: SpeciesParams,
                     inter: InteractionParams) -> SixFieldReport:
    x = check_window(hydro, species)
    P, c_P = production_P(hydro, species, inter)
    return SixFieldReport(
        P=P,
        C_P=c_P,
        Sigma=entropy_production_Sigma(hydro, species, inter),
        K_noneq=K_noneq(hydro, species),
        dK_dPi=dK_dPi(hydro, species),
        tau_Pi=tau_Pi_six(hydro, species, inter),
        Pi_over_p=x,
    )


# ── Space-homogeneous relaxation ──────────────────────────────────────────────

def relax_homogeneous(initial: HydroState, species: SpeciesParams, inter: InteractionParams,
                      t_end: float, n_out: int = 201, rtol: float = ODE_RTOL) -> pd.DataFrame:
    """
    Integrate dPi/dt = P(Pi)/3 at constant rho, U and p.

    Step size is left to the adaptive integrator; n_out only fixes the
    output grid of equally spaced times in [0, t_end]. Returns a DataFrame
    with columns t, Pi, Pi_over_p, rho and p, one row per output time, so
    the conserved fields can be checked along the trace. The linearized
    solution decays as Pi(0) exp(-t / (3 tau_Pi)) with tau_Pi from tau_Pi_six.
    """
    if not t_end > 0.0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    if n_out < 2:
        raise DomainError(f"n_out must be at least 2, got {n_out}")
    check_window(initial, species)
    rho = initial.rho
    p = initial.pressure(species)
    a = species.alpha
    lo = -1.0 + WINDOW_GUARD
    hi = window_upper(a) - WINDOW_GUARD

    def rhs(_t, y):
        x = y[0] / p
        # trial stages may overshoot; nan makes the integrator reject the step
        if not lo < x < hi:
            return [np.nan]
        return [_production_from_ratio(x, rho, p, species, inter) / 3.0]

    t_eval = np.linspace(0.0, t_end, n_out)
    sol = solve_ivp(rhs, (0.0, t_end), [initial.Pi], method=ODE_METHOD, t_eval=t_eval,
                    rtol=rtol, atol=1e-12 * p)
    if not sol.success:
        raise IntegrationFailure(sol.message)
    log.info("relaxation of Pi/p = %.4g: %d rhs evaluations", initial.Pi / p, sol.nfev)

    Pi = sol.y[0]
    ratio = Pi / p
    if not np.all(np.isfinite(Pi)) or np.any(ratio <= lo) or np.any(ratio >= hi):
        raise WindowExit("relaxation trajectory left the validity window")
    return pd.DataFrame({
        "t":         sol.t,
        "Pi":        Pi,
        "Pi_over_p": ratio,
        "rho":       np.full(len(Pi), rho),
        "p":         np.full(len(Pi), p),
    })
