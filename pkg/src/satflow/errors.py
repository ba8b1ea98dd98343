"""Exception hierarchy shared by all satflow modules.

The CLI maps these onto stable exit codes, so the distinction between the
three classes is part of the public contract:

* ScenarioError      -> exit 2 (bad input: schema, dimensions, invariants)
* NumericalError     -> exit 3 (iteration budget or residual not attainable)
* PreconditionError  -> exit 4 (operation called outside its domain)
"""


class SatflowError(Exception):
    """Base class for all satflow errors."""


class ScenarioError(SatflowError, ValueError):
    """Raised when a network description violates the model invariants."""


class NumericalError(SatflowError, ArithmeticError):
    """Raised when a solver cannot reach its required residual."""


class PreconditionError(SatflowError, ValueError):
    """Raised when an operation is invoked outside its stated preconditions."""
