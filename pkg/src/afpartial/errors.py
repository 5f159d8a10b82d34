"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class AlgebraError(ValueError):
    """Base class for every error raised by afpartial."""


class ShapeMismatch(AlgebraError):
    pass


class CapExceeded(AlgebraError):
    pass


class NotUnitModulus(AlgebraError):
    pass


class DomainViolation(AlgebraError):
    pass


class PlacementError(AlgebraError):
    pass


class BadLevels(AlgebraError):
    pass


class InvalidDigit(AlgebraError):
    pass


class OutOfRange(AlgebraError):
    pass


class OutOfDomain(AlgebraError):
    """The odometer (or its inverse) was applied at its excluded point."""


class VerificationFailure(AlgebraError):
    """A numerical certificate failed.

    ``check`` names the failing identity, ``residual`` is the offending
    residual and ``witness`` holds whatever reproduces it (seed, word, z).
    """

    def __init__(self, check: str, residual: float, witness: dict | None = None, msg: str = ""):
        self.check = check
        self.residual = float(residual)
        self.witness = dict(witness or {})
        text = msg or f"{check} failed: residual {self.residual:.3e}"
        if self.witness:
            text += " (" + ", ".join(f"{k}={v}" for k, v in self.witness.items()) + ")"
        super().__init__(text)


class AxiomViolation(VerificationFailure):
    pass


class CovarianceViolation(VerificationFailure):
    pass


class RegularityViolation(VerificationFailure):
    pass
