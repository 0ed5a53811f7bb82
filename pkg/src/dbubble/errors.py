class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class StructuralError(ValueError):
    """A network violates a structural requirement (e.g. junction degree)."""


class ClassMismatch(ValueError):
    """Competitor volumes do not belong to the requested instance."""

    def __init__(self, measured, expected):
        self.measured = tuple(measured)
        self.expected = tuple(expected)
        super().__init__(
            "CLASS_MISMATCH: measured volumes "
            f"({self.measured[0]:.12g}, {self.measured[1]:.12g}) vs instance "
            f"({self.expected[0]:.12g}, {self.expected[1]:.12g})"
        )


class NumericalFailure(RuntimeError):
    """A root finder or integrator failed to converge."""
