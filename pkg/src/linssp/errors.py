"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised for invalid parameters, shapes or instance definitions."""


class NonConvergent(RuntimeError):
    """An iterative procedure exhausted its iteration budget."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class Improper(RuntimeError):
    """A policy has infinite expected cost-to-go from some state."""

    def __init__(self, message, states=()):
        super().__init__(message)
        self.states = tuple(states)


class StepCapExceeded(RuntimeError):
    """An episode hit the hard step cap before reaching the goal."""

    def __init__(self, cost, steps):
        super().__init__(f"episode truncated after {steps} steps (partial cost {cost:.6g})")
        self.cost = cost
        self.steps = steps


class InsufficientData(ValueError):
    """Not enough usable points for a regression."""
