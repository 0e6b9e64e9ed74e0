"""Exception hierarchy shared across the package.

Each class maps onto one of the named failure modes of the public
operations (invalid-modulus, corrupt-data, insufficient-zeros, ...).
"""


class PrimeRaceError(Exception):
    """Base class for all package errors."""


class InvalidModulusError(PrimeRaceError, ValueError):
    """Modulus outside the supported range, or q < 2."""


class NotReducedError(PrimeRaceError, ValueError):
    """Residue not coprime to the modulus."""


class CorruptDataError(PrimeRaceError, ValueError):
    """Zero file fails validation (non-monotone, unparsable, ...)."""


class WrongCharacterError(PrimeRaceError, ValueError):
    """Zero file header does not match the expected character key."""


class EmptyTableError(PrimeRaceError, ValueError):
    """Zero file contains no ordinates."""


class MissingConstantError(PrimeRaceError, KeyError):
    """No tail-sum constant known for this character and no override given."""


class InsufficientZerosError(PrimeRaceError, ValueError):
    """Requested truncation height exceeds the table's certified height."""


class InvalidOrdinateError(PrimeRaceError, ValueError):
    """Zero ordinate must be a positive real number."""


class RangeError(PrimeRaceError, ValueError):
    """Profile queried outside its sampled range."""


class BoundInvalidError(PrimeRaceError, ValueError):
    """Remainder bound inapplicable: |b1| x^2 >= 1."""


class BoundInapplicableError(PrimeRaceError, ValueError):
    """Closed-form tail bound needs decay exponents > 1."""


class ParameterOutOfRangeError(PrimeRaceError, ValueError):
    """Grid parameter violates a precondition (e.g. epsilon >= 1/5)."""


class NotCertifiedError(PrimeRaceError, ValueError):
    """Recomputed tail constants are weaker than the certified thresholds."""


class NumericalInconsistencyError(PrimeRaceError, ArithmeticError):
    """Assembled density has a non-vanishing imaginary part or leaves [0,1]."""


class ResourceLimitError(PrimeRaceError, ValueError):
    """Requested computation exceeds a hard resource cap."""
