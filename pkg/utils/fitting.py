"""
Viscosity Power-Law Fit
=======================
Ordinary least squares on (log T, log mu) for mu = A T^s, then the
cross-section exponent gamma = 2(1 - s) and the Prandtl number of the
fourteen-moment closure for the gas's alpha.

s >= 1 has no positive gamma: the fit is still returned, with the gamma
and Prandtl fields left as None and warning = "ExponentOutOfRange".
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing      import Optional

import numpy as np
from scipy.stats import linregress

from data_sources.viscosity   import ViscosityDataset
from kinetics.errors          import DegenerateFit
from kinetics.fourteen_moment import eucken_Pr, prandtl_number, s_to_gamma


log = logging.getLogger(__name__)

EXPONENT_OUT_OF_RANGE = "ExponentOutOfRange"


@dataclass(frozen=True)
class FitResult:
    A: float
    s: float
    residual_rms: float
    n_points: int
    gas: str = ""
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    Pr_model: Optional[float] = None
    Pr_eucken: Optional[float] = None
    rel_error: Optional[float] = None
    warning: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)

    def predict(self, T):
        return self.A * np.asarray(T, dtype=float) ** self.s


def log_log_fit(T, mu) -> tuple[float, float, float]:
    """(A, s, rms of the log residuals) of mu = A T^s."""
    x = np.log(np.asarray(T, dtype=float))
    y = np.log(np.asarray(mu, dtype=float))
    if x.size < 2 or np.ptp(x) == 0.0:
        raise DegenerateFit(f"need at least two distinct temperatures, got {np.unique(np.exp(x)).size}")
    fit = linregress(x, y)
    residual = y - (fit.intercept + fit.slope * x)
    return math.exp(fit.intercept), float(fit.slope), float(np.sqrt(np.mean(residual ** 2)))


def fit_power_law(data: ViscosityDataset, alpha: Optional[float] = None) -> FitResult:
    """
    Fit mu = A T^s to a validated dataset. With alpha given, also report
    gamma, the model and Eucken Prandtl numbers and their relative error.
    """
    data.validate()
    A, s, rms = log_log_fit(data.T, data.mu)
    base = dict(A=A, s=s, residual_rms=rms, n_points=len(data.points), gas=data.gas, alpha=alpha)

    if not s < 1.0:
        log.warning("%s: fitted exponent s = %.4f >= 1 has no positive gamma", data.gas, s)
        return FitResult(**base, warning=EXPONENT_OUT_OF_RANGE)

    gamma = s_to_gamma(s)
    if alpha is None:
        return FitResult(**base, gamma=gamma)
    pr = prandtl_number(alpha, gamma)
    pr_eucken = eucken_Pr(alpha)
    return FitResult(**base, gamma=gamma, Pr_model=pr, Pr_eucken=pr_eucken,
                     rel_error=abs(pr - pr_eucken) / pr_eucken)
