"""Exception hierarchy.

The CLI maps the three families onto exit codes: verification failures (1),
input errors (2) and size guards (3).
"""


class OpklsError(Exception):
    pass


class InputError(OpklsError):
    """Malformed or mathematically invalid input."""


class NotALattice(InputError):
    pass


class NotGraded(InputError):
    pass


class NotGeometric(InputError):
    pass


class NotComparable(InputError):
    pass


class InvalidMatroid(InputError):
    pass


class SizeGuardExceeded(OpklsError):
    pass


class HostMismatch(ValueError, OpklsError):
    pass


class NotInterior(ValueError, OpklsError):
    pass


class DegreeExceedsRank(ValueError, OpklsError):
    pass


class VerificationError(OpklsError):
    """An invariant that must hold by construction did not."""


class ELVerificationFailed(VerificationError):
    pass


class KernelCheckFailed(VerificationError):
    pass


class RecursionInconsistent(VerificationError):
    pass


class CharacterizationMismatch(VerificationError):
    pass


class SubcomplexViolation(VerificationError):
    pass


class DSquareNonzero(VerificationError):
    pass


class ConcentrationFailure(VerificationError):
    pass


class LoopCapExceeded(VerificationError):
    pass
