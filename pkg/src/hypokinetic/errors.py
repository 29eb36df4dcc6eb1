"""Exception types shared across the package."""


class HypokineticError(Exception):
    """Base class for all package-specific errors."""


class NonIntegrable(HypokineticError):
    """Equilibrium mass does not converge as the truncation radius grows."""


class InvalidExponent(HypokineticError):
    """Fast-diffusion exponent outside the admissible range."""


class HypothesisFailed(HypokineticError):
    """A pointwise hypothesis on the potential is violated."""

    def __init__(self, name, node, message=""):
        self.name = name
        self.node = node
        super().__init__(f"{name} violated at node {node}" + (f": {message}" if message else ""))


class SingularSystem(HypokineticError):
    """The discrete elliptic system lost positive definiteness."""


class CFLViolation(HypokineticError):
    """Transport time step exceeds the grid's backtrace bound."""


class NonFinite(HypokineticError):
    """A field turned non-finite during time stepping."""

    def __init__(self, step):
        self.step = step
        super().__init__(f"non-finite field at step {step}")


class NoGap(HypokineticError):
    """The discrete eigenproblem has no spectral gap."""


class Infeasible(HypokineticError):
    """No parameter choice makes the decay-rate constants positive."""


class DegenerateWindow(HypokineticError):
    """Not enough usable samples for a decay-rate fit."""


class ParseError(HypokineticError):
    """Scenario file could not be parsed."""


class ValidationError(HypokineticError):
    """Scenario field failed validation."""

    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"invalid value for '{field}'" + (f": {message}" if message else ""))
