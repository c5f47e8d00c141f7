"""
Special Functions
=================
Gamma function, the confluent hypergeometric function 1F1(a; 3/2; z) and the
Beta-type constant C_(a,b,c) that the closed-form production terms and
transport coefficients are assembled from.

Everything here works in plain double precision. Arbitrary precision is only
used by the test oracles.

Gamma:   Lanczos approximation, g = 7, nine coefficients, reflection below 1/2.
1F1:     Taylor series for z <= 50, asymptotic expansion of e^{-z} 1F1 beyond,
         with a log-space series fallback when the asymptotic series does not
         settle.
"""

import logging
import math

from kinetics.constants import LOG_SQRT_2PI, SQRT_2PI
from kinetics.errors    import DomainError


log = logging.getLogger(__name__)


LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Largest x with a finite double Gamma(x).
GAMMA_MAX_ARG = 171.6243769563027

SERIES_Z_MAX   = 50.0
SERIES_TOL     = 1e-17
SERIES_MAX_TERMS = 100_000
HYP_B = 1.5


def _lanczos_sum(x: float) -> float:
    # A_g(x) for the shifted argument x - 1
    total = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        total += LANCZOS_COEFFS[i] / (x - 1.0 + i)
    return total


def gamma_fn(x: float) -> float:
    """Gamma(x) for x > 0, relative error below 1e-12 on [1e-3, 170]."""
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"gamma_fn requires x > 0, got {x!r}")
    if x > GAMMA_MAX_ARG:
        raise OverflowError(f"Gamma({x}) exceeds the double range; use log_gamma")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    t = x - 0.5 + LANCZOS_G
    # split the power so t**(x-1/2) does not overflow before Gamma does
    half = math.pow(t, 0.5 * (x - 0.5))
    return SQRT_2PI * half * math.exp(-t) * half * _lanczos_sum(x)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0; safe far beyond the overflow point of gamma_fn."""
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    t = x - 0.5 + LANCZOS_G
    return LOG_SQRT_2PI + (x - 0.5) * math.log(t) - t + math.log(_lanczos_sum(x))


def _check_hyp_args(a: float, z: float) -> None:
    if not a > 0.0:
        raise DomainError(f"hyp1f1_b3half requires a > 0, got a={a!r}")
    if not z >= 0.0:
        raise DomainError(f"hyp1f1_b3half requires z >= 0, got z={z!r}")


def _taylor(a: float, b: float, z: float) -> float:
    total = 1.0
    term = 1.0
    for k in range(SERIES_MAX_TERMS):
        term *= (a + k) / (b + k) * z / (k + 1.0)
        total += term
        # terms grow until k ~ z; only stop once they are shrinking
        if term < SERIES_TOL * total and (a + k) * z < (b + k) * (k + 1.0):
            return total
    raise ArithmeticError(f"1F1({a}, {b}, {z}) series did not converge")


def _scaled_log_series(a: float, b: float, z: float) -> float:
    # sum_k exp(log t_k - z), t_k the positive Taylor terms
    log_term = -z
    total = math.exp(log_term)
    log_z = math.log(z)
    for k in range(SERIES_MAX_TERMS):
        log_term += math.log(a + k) - math.log(b + k) - math.log(k + 1.0) + log_z
        term = math.exp(log_term)
        total += term
        if term < SERIES_TOL * total and (a + k) * z < (b + k) * (k + 1.0):
            return total
    raise ArithmeticError(f"scaled 1F1({a}, {b}, {z}) series did not converge")


def _scaled_asymptotic(a: float, b: float, z: float):
    """Leading asymptotic branch of e^{-z} 1F1(a;b;z); None if it will not settle."""
    total = 1.0
    term = 1.0
    prev = math.inf
    for k in range(200):
        term *= (b - a + k) * (1.0 - a + k) / ((k + 1.0) * z)
        if term == 0.0:
            break
        if abs(term) > prev:
            return None
        prev = abs(term)
        total += term
        if abs(term) < SERIES_TOL * abs(total):
            break
    else:
        return None
    log_pref = log_gamma(b) - log_gamma(a) + (a - b) * math.log(z)
    return math.exp(log_pref) * total


def scaled_hyp1f1_b3half(a: float, z: float) -> float:
    """e^{-z} * 1F1(a; 3/2; z), finite for every z >= 0."""
    a, z = float(a), float(z)
    _check_hyp_args(a, z)
    if z <= SERIES_Z_MAX:
        return _taylor(a, HYP_B, z) * math.exp(-z)
    value = _scaled_asymptotic(a, HYP_B, z)
    if value is None:
        log.info("asymptotic 1F1 expansion did not settle at a=%g z=%g, summing in log space", a, z)
        value = _scaled_log_series(a, HYP_B, z)
    return value


def hyp1f1_b3half(a: float, z: float) -> float:
    """1F1(a; 3/2; z) for a > 0, z >= 0 (OverflowError once the value leaves double range)."""
    a, z = float(a), float(z)
    _check_hyp_args(a, z)
    if z <= SERIES_Z_MAX:
        return _taylor(a, HYP_B, z)
    try:
        return scaled_hyp1f1_b3half(a, z) * math.exp(z)
    except OverflowError:
        raise OverflowError(
            f"1F1({a}, 3/2, {z}) overflows; use scaled_hyp1f1_b3half"
        ) from None


def log_c_const(alpha: float, a: float, b: float, c: float) -> float:
    args_num = (2 * alpha + a + 2, b + 1.5, alpha + c + 1, alpha + 1)
    args_den = (2 * alpha + a + b + 3.5, 2 * alpha + c + 2)
    for arg in args_num + args_den:
        if not arg > 0.0:
            raise DomainError(
                f"C_(a,b,c) needs positive Gamma arguments: alpha={alpha}, a={a}, b={b}, c={c}"
            )
    return sum(log_gamma(x) for x in args_num) - sum(log_gamma(x) for x in args_den)


def c_const(alpha: float, a: float, b: float, c: float) -> float:
    """
    C_(a,b,c) = Gamma(2a'+a+2) Gamma(b+3/2) Gamma(a'+c+1) Gamma(a'+1)
                / (Gamma(2a'+a+b+7/2) Gamma(2a'+c+2)),   a' = alpha

    Equals the integral over (r, R) in [0,1]^2 of
    (r(1-r))^alpha (1-R)^{2 alpha+1} R^{1/2} (1-R)^a R^b r^c.
    """
    return math.exp(log_c_const(alpha, a, b, c))
