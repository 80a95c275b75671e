"""Exception hierarchy shared by all modules."""


class CubicTwistError(Exception):
    """Base class for every error raised by this package."""


# field_core
class NoRepresentation(CubicTwistError):
    pass


class InvalidConductorData(CubicTwistError, ValueError):
    pass


class NonIntegralPolynomial(CubicTwistError):
    pass


class ReduciblePolynomial(CubicTwistError):
    pass


class FieldMismatch(CubicTwistError, TypeError):
    pass


class GaloisReconstructionError(CubicTwistError):
    pass


# lattice_geom
class DegenerateGram(CubicTwistError, ValueError):
    pass


class UnequalDiagonal(CubicTwistError, ValueError):
    pass


class BudgetExceeded(CubicTwistError):
    pass


class NotWR(CubicTwistError):
    pass


# twist_engine
class DegenerateBasis(CubicTwistError, ValueError):
    pass


class SignMismatch(CubicTwistError, ValueError):
    pass


class NotAUnit(CubicTwistError, ValueError):
    pass


class Unverified(CubicTwistError):
    pass


# ramified_ideals
class NotRepresentable(CubicTwistError):
    pass


class InvalidSpec(CubicTwistError, ValueError):
    pass


# families
class GateFailed(CubicTwistError):
    pass


class ConditionOutOfRange(CubicTwistError):
    pass
