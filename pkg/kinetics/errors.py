"""
Error hierarchy
===============
Every failure the library raises on purpose derives from KineticsError so
callers (the CLI in particular) can map it to an exit code in one place.
"""


class KineticsError(Exception):
    """Base class for all PolyKin errors."""


class DomainError(KineticsError, ValueError):
    """Argument outside the domain of the function being evaluated."""


class DegenerateCollision(DomainError):
    """Total collision energy E is zero; no post-collisional state exists."""


class DegenerateDirection(DomainError):
    """Relative velocity vanishes, so the scattering direction is undefined."""


class SingularConfiguration(DomainError):
    """A Jacobian or change of variables has a vanishing denominator."""


class OutOfValidityWindow(DomainError):
    """Dynamic pressure outside -1 < Pi/p < 2(alpha+1)/3."""

    def __init__(self, ratio: float, alpha: float):
        self.ratio = ratio
        self.alpha = alpha
        upper = 2.0 * (alpha + 1.0) / 3.0
        super().__init__(
            f"Pi/p = {ratio:.6g} outside six-field window (-1, {upper:.6g}) for alpha={alpha:g}"
        )


SixFieldOutOfRange = OutOfValidityWindow


class WindowExit(KineticsError):
    """Relaxation trajectory left the six-field validity window."""


class IntegrationFailure(KineticsError):
    """ODE integrator stopped without reaching t_end."""


class NoSignChange(KineticsError):
    """Root bracket does not straddle a sign change."""


class UnsupportedWeight(DomainError):
    """Unknown moment / test-function selector."""


class UnknownSpecies(KineticsError, KeyError):
    """Gas name could not be resolved against the species config."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown species"


class DatasetError(KineticsError):
    """Problem with an ingested dataset or config file."""


class ParseError(DatasetError):

    def __init__(self, message: str, line: int = None, path: str = None):
        self.line = line
        self.path = path
        where = ""
        if path:
            where = f"{path}:"
        if line is not None:
            where = f"{where}{line}: "
        elif where:
            where = f"{where} "
        super().__init__(f"{where}{message}")


class ValidationError(DatasetError):

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = f"violated invariant '{invariant}'"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class DegenerateFit(DatasetError):
    """Least-squares design is rank deficient (all temperatures equal)."""
