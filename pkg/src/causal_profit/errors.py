"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ContractViolation(ValueError):
    """Inputs are individually valid but break an operation's joint precondition."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, grad_norm=float("nan"), repetition=None):
        super().__init__(message)
        self.grad_norm = grad_norm
        self.repetition = repetition
