"""Exception hierarchy shared by the compute modules and the CLI."""


class WKSError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DomainError(WKSError, ValueError):
    """A parameter lies outside the domain where a family or formula is defined."""

    exit_code = 1


class InputError(WKSError, ValueError):
    """Malformed user input (missing samples, atoms outside the band, ...)."""

    exit_code = 1


class GateError(WKSError):
    """An admissibility inequality required by a bound is violated.

    ``inequality`` names the violated condition in plain text so the CLI can
    echo it back verbatim.
    """

    exit_code = 2

    def __init__(self, inequality, detail=""):
        self.inequality = inequality
        self.detail = detail
        msg = f"gate violated: {inequality}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UnsatisfiableError(WKSError):
    """No truncation order up to the search cap satisfies the certificate."""

    exit_code = 3


class ComputationError(WKSError, ArithmeticError):
    """Numerical routine failed (no bracket, no convergence)."""

    exit_code = 4


class DivergenceError(ComputationError):
    """An improper integral failed to stabilize under refinement."""


class ResolutionError(InputError):
    """Time grid is too coarse for the sinc kernel."""
