"""
Error hierarchy shared by the bound, transform, distribution and oracle modules.
The command line front-end maps these onto its exit codes.
"""


class SimplexHoeffdingError(Exception):
    """Base class for all errors raised by simplex_hoeffding."""


class InvalidSimplexPoint(SimplexHoeffdingError, ValueError):
    pass


class PreconditionOrderViolated(SimplexHoeffdingError, ValueError):
    def __init__(self, index: int, direction: str, z_value: float, mu_value: float) -> None:
        """
        Raised when the target vector is not ordered against the mean as the tail direction requires.

        Parameters
        ----------
        index : int
            1-based coordinate that violates the order.
        direction : str
            Name of the tail direction ('lower' or 'upper').
        """
        self.index = index
        self.direction = direction
        self.z_value = z_value
        self.mu_value = mu_value
        relation = "<=" if direction == "lower" else ">="
        super().__init__(f"{direction} tail requires z_{index} {relation} mu_{index}, "
                         f"got z_{index}={z_value!r}, mu_{index}={mu_value!r}")


class DegenerateTarget(SimplexHoeffdingError, ValueError):
    pass


class RequiresStrictInterior(SimplexHoeffdingError, ValueError):
    def __init__(self, index: int, message: str) -> None:
        self.index = index
        super().__init__(message)


class OutOfBox(SimplexHoeffdingError, ValueError):
    def __init__(self, index: int, message: str) -> None:
        self.index = index
        super().__init__(message)


class DegenerateBox(SimplexHoeffdingError, ValueError):
    pass


class CountMismatch(SimplexHoeffdingError, ValueError):
    pass


class InvalidSpec(SimplexHoeffdingError, ValueError):
    pass


class BudgetExceeded(SimplexHoeffdingError, RuntimeError):
    def __init__(self, required: int, allowed: int) -> None:
        self.required = required
        self.allowed = allowed
        super().__init__(f"Enumeration needs {required} lattice points but the budget allows {allowed}.")


class InvalidModel(SimplexHoeffdingError, TypeError):
    pass


class ConfigError(SimplexHoeffdingError, ValueError):
    pass
