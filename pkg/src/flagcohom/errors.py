"""Exception hierarchy shared by every module."""


class FlagCohomError(Exception):
    """Base class for library errors."""


class UsageError(FlagCohomError, ValueError):
    """Bad arguments: mismatched variable counts, fields, out-of-range indices."""


class PrecisionError(FlagCohomError, ArithmeticError):
    """The certified window is too small to decide the question asked."""


class IndeterminateError(PrecisionError):
    """A valuation or slice lies outside the certified range of a series."""


class NotAUnitError(FlagCohomError, ArithmeticError):
    """No certified invertible lex-leading term."""


class DiscriminantError(UsageError):
    """Weierstrass data with vanishing discriminant."""


class PresetInconsistencyError(FlagCohomError):
    """A subspace family violates the face-inclusion structure."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InconsistentInputError(FlagCohomError):
    """Input data admits several incompatible readings."""
