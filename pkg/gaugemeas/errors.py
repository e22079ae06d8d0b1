"""Exception hierarchy for gaugemeas."""


class GaugingError(Exception):
    """Base class for every error raised by the library"""
    pass


class DimensionMismatchError(GaugingError, ValueError):
    """Operands have incompatible shapes or qubit counts"""
    pass


class NoSolutionError(GaugingError):
    """The right-hand side of a linear system lies outside the image"""
    pass


class ChainComplexError(GaugingError):
    """A chain complex fails its validation report"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotACocycleError(GaugingError):
    """A gate was evaluated on a chain that is not a cocycle"""
    pass


class CodespaceError(GaugingError):
    """A gate fails one of the code-space preservation conditions"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidGateError(GaugingError):
    """Site operators or their embedding do not form a higher-form gate"""
    pass


class NotCleanableError(GaugingError):
    """A gate restriction cannot be cleaned off the excluded sites"""
    pass


class NotGaugeableError(GaugingError):
    """An operator's symmetry charge is not the boundary of any hyperedge chain"""
    pass


class DetectedFaultError(GaugingError):
    """The hyperedge outcomes admit no byproduct solution"""

    def __init__(self, message: str, outcomes=None):
        super().__init__(message)
        self.outcomes = outcomes


class QubitCeilingError(GaugingError):
    """Statevector simulation refused because the register is too large"""
    pass


class OperatorSizeError(GaugingError):
    """Dense matrix requested for an operator above the oracle ceiling"""
    pass


class BackendMismatchError(GaugingError):
    """The state backend cannot apply the requested operator"""
    pass


class CommutationError(GaugingError):
    """Two checks of a gauged code fail to commute within the check group"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class BoundViolationError(GaugingError):
    """A fault-tolerance bound is violated by an explicit witness"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InstanceError(GaugingError):
    """Unknown instance name or malformed instance input"""
    pass


class CampaignError(GaugingError):
    """Custom exception for campaign activity failures"""
    pass
