"""Exception hierarchy shared by all starmorita modules."""


class StarMoritaError(Exception):
    """Base class for all library errors."""


class BadParams(StarMoritaError):
    pass


class NotInRing(StarMoritaError):
    """A fraction could not be demoted to a ring element."""


class DenominatorVanishesAtZero(StarMoritaError):
    """The fraction has no classical limit (pole at the deformation origin)."""


class ShapeMismatch(StarMoritaError):
    pass


class NotHermitian(StarMoritaError):
    pass


class NotPsd(StarMoritaError):
    pass


class NotPositiveFunctional(StarMoritaError):
    pass


class InvalidWitness(StarMoritaError):
    pass


class AlgebraMismatch(StarMoritaError):
    pass


class DegenerateModule(StarMoritaError):
    pass


class MissingInnerB(StarMoritaError):
    pass


class NoIdentityStructure(StarMoritaError):
    pass


class MiddleAlgebraMismatch(StarMoritaError):
    pass


class MissingCyclicWitness(StarMoritaError):
    pass


class DegenerateRiggedModule(StarMoritaError):
    pass


class NotStarHomomorphism(StarMoritaError):
    pass


class NotProjection(StarMoritaError):
    pass


class NotFull(StarMoritaError):
    """Raised when a projection or an inner product fails to span; carries the deficient rank."""

    def __init__(self, msg, rank=None, needed=None):
        super().__init__(msg)
        self.rank = rank
        self.needed = needed


class NotUnital(StarMoritaError):
    pass


class ContextConditionFailed(StarMoritaError):
    pass


class PositivityViolated(StarMoritaError):
    """Induced inner product fails positivity; carries the witness vector."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class InvalidBimodule(StarMoritaError):
    pass


class NotStronglyNonDegenerate(StarMoritaError):
    pass


class NotInCommutant(StarMoritaError):
    pass


class NotIntertwiner(StarMoritaError):
    pass


class NotAdjointable(StarMoritaError):
    pass


class UnknownCommand(StarMoritaError):
    pass


class UnresolvedReference(StarMoritaError):
    pass


class MalformedScalar(StarMoritaError):
    pass
