from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction


@dataclass(frozen=True)
class BalancerConfig:
    """Runtime knobs for the balancing engine.

    ``matching_floor`` is the size at or below which a Vizing matching is
    discarded; the asymptotic argument uses 16k¹⁰, which at desk scale would
    discard every matching, so the default keeps them all. ``m2_threshold``
    overrides the 100k¹²θd degree-gap test used to mark a vertex v0.
    """

    gamma: Fraction = Fraction(1, 64)
    theta: Fraction = Fraction(1, 4)
    q: int | None = None  # None: 2 for oriented inputs, 1 otherwise
    matching_floor: int | None = 0  # None: 16k¹⁰
    m2_threshold: Fraction | None = None
    node_budget: int = 10**6
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        object.__setattr__(self, "theta", Fraction(self.theta))
        if not (0 < self.gamma < 1 and 0 < self.theta < 1):
            raise ValueError("gamma and theta must lie strictly between 0 and 1")
        if self.q not in (None, 1, 2):
            raise ValueError("q must be 1 or 2")

    def floor_for(self, k: int) -> int:
        return 16 * k**10 if self.matching_floor is None else self.matching_floor

    def m2_for(self, k: int, d: int) -> Fraction:
        if self.m2_threshold is not None:
            return Fraction(self.m2_threshold)
        return 100 * k**12 * self.theta * d

    def to_json(self) -> dict:
        out = asdict(self)
        for key in ("gamma", "theta", "m2_threshold"):
            if out[key] is not None:
                out[key] = str(out[key])
        return out
