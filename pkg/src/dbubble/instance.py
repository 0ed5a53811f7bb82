from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .profile import WeightTriple
from .spherical import check_dimension


@dataclass(frozen=True)
class ProblemInstance:
    """A point (V1, V2, w0, w1, w2, n) of the unification space."""

    v1: float
    v2: float
    weights: WeightTriple
    n: int = 3

    def __post_init__(self):
        check_dimension(self.n)
        if not (math.isfinite(self.v1) and math.isfinite(self.v2)):
            raise DomainError("volumes must be finite")
        if self.v1 < 0 or self.v2 < 0:
            raise DomainError(f"volumes must be nonnegative, got ({self.v1}, {self.v2})")
        if self.v1 == 0 and self.v2 == 0:
            raise DomainError("volumes must not both be zero")

    @classmethod
    def of(cls, n, v1, v2, w0, w1, w2) -> "ProblemInstance":
        return cls(float(v1), float(v2), WeightTriple(float(w0), float(w1), float(w2)), int(n))

    @property
    def volumes(self) -> tuple[float, float]:
        return (self.v1, self.v2)

    def swapped(self) -> "ProblemInstance":
        return ProblemInstance(self.v2, self.v1, self.weights.swapped(), self.n)

    def replace(self, **kw) -> "ProblemInstance":
        v1 = kw.pop("v1", self.v1)
        v2 = kw.pop("v2", self.v2)
        n = kw.pop("n", self.n)
        w = self.weights
        w = WeightTriple(kw.pop("w0", w.w0), kw.pop("w1", w.w1), kw.pop("w2", w.w2))
        if kw:
            raise TypeError(f"unknown fields {sorted(kw)}")
        return ProblemInstance(v1, v2, w, n)

    def as_row(self) -> dict:
        return {"n": self.n, "V1": self.v1, "V2": self.v2,
                "w0": self.weights.w0, "w1": self.weights.w1, "w2": self.weights.w2}
