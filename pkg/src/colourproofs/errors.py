"""Exception types shared across the package."""


class ColourProofsError(Exception):
    """Base class for all package-specific errors."""


class CharDividesK(ColourProofsError):
    """Field characteristic divides the colour count, so no primitive root exists."""


class PrimeTooLarge(ColourProofsError):
    """Characteristic exceeds the single-limb bound."""


class FieldMismatch(ColourProofsError):
    """Operands belong to different fields or carry different exponent caps."""


class UnboundVariable(ColourProofsError):
    """Evaluation point leaves a variable of the polynomial unassigned."""


class MissingRoot(ColourProofsError):
    """The field does not hold the primitive k-th root required."""


class InvalidColour(ColourProofsError):
    """Colour index outside the admissible range."""


class GadgetInfeasible(ColourProofsError):
    """No legal gadget colouring exists where one is guaranteed; internal failure."""


class DegreeTooSmall(ColourProofsError):
    """Requested degree is below the degree of some axiom."""


class BudgetExceeded(ColourProofsError):
    """A brute-force or search budget was exhausted before an answer was reached."""


class TooLarge(ColourProofsError):
    """Instance exceeds an exhaustive-check bound."""


class MatchingExists(ColourProofsError):
    """A complete left matching exists, so there is nothing to refute."""


class InputNotRefutation(ColourProofsError):
    """A proof transform expected a refutation but received something else."""


class MissingBranch(ColourProofsError):
    """Branch composition is missing a subproof for some colour tuple."""
