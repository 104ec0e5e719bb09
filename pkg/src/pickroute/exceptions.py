class PickRouteError(Exception):
    pass


class InstanceFormatError(PickRouteError, ValueError):
    """Malformed instance or tour file; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class Infeasible(PickRouteError):
    """No tour subgraph satisfies feasibility plus the requested restriction."""


class BudgetExceeded(PickRouteError):
    pass


class StateGuardExceeded(PickRouteError):
    pass


class ContractViolation(PickRouteError, ValueError):
    """A precondition of an operation was not met."""


class StructuralError(PickRouteError):
    """A double run that cannot belong to a connected feasible tour."""


class Case1Inapplicable(ContractViolation):
    pass


class RewriteGuardTripped(PickRouteError):
    """The elimination loop hit its iteration bound; carries the trace."""

    def __init__(self, message: str, trace=()):
        self.trace = list(trace)
        super().__init__(message)
