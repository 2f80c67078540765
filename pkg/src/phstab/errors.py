"""Exception hierarchy for the toolkit."""


class PHSError(Exception):
    """Base class for all toolkit errors."""


class SingularPortMap(PHSError):
    """The extended port map could not be inverted reliably."""


class DimensionMismatch(PHSError):
    """Operands have incompatible shapes."""


class InsufficientSmoothness(PHSError):
    """A state representation does not support the requested derivative order."""


class DegenerateConstraints(PHSError):
    """Boundary constraints admit no nontrivial polynomial sample."""


class NotDissipative(PHSError):
    """The boundary form is energy-increasing; no dissipation coefficient exists."""


class EmptySelector(PHSError):
    """A trace selector with no entries was supplied."""


class RankDeficientW(PHSError):
    """The boundary matrix W is not full row rank."""


class ConstraintRankLoss(PHSError):
    """Discretized boundary constraints lost rank at the chosen grid."""


class EigenSolverFailure(PHSError):
    """The dense eigenvalue solver did not converge."""


class OnSpectrum(PHSError):
    """The requested resolvent point is (numerically) an eigenvalue."""


class SingularStep(PHSError):
    """The implicit midpoint step matrix could not be factorized."""


class NonpositiveEnergy(PHSError):
    """A log-linear decay fit was requested on nonpositive energies."""


class NotPassive(PHSError):
    """The declared input/output split violates the boundary power balance."""


class UnknownPreset(PHSError):
    """No preset model with the given name exists."""


class BadParameter(PHSError):
    """A preset parameter is outside its documented range."""


class EmptyInput(PHSError):
    """An interconnection input of dimension zero was requested."""


class NearSingularDenominator(PHSError):
    """The closed-form resolvent denominator is too close to zero."""


class ParseError(PHSError):
    """A model file is not valid JSON."""


class SchemaError(PHSError):
    """A model document is missing a key or has an ill-typed value."""


class DimensionError(SchemaError):
    """Matrix dimensions in a model document are inconsistent."""
