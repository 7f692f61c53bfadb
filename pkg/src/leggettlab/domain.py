"""Shared value types for polarization-correlation experiments.

Outcome conventions used across the package:

* each polarizer has two outcomes, coded +1 (transmission along the
  analyzer axis) and -1 (transmission along the orthogonal axis);
* a joint experiment on a photon pair therefore has four outcome cells,
  ordered ``(++, +-, -+, --)`` everywhere an array is used;
* single-side averages are written ``a_bar``/``b_bar`` and the product
  average ``ab_bar``; all three live in ``[-1, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PROB_ATOL",
    "InputError",
    "MeasurementSettings",
    "JointOutcomeDistribution",
    "CorrelationTriple",
]

# Absolute tolerance for normalization / probability sanity checks.
PROB_ATOL = 1e-12


class InputError(ValueError):
    """Raised when a caller-supplied value violates a documented domain."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class MeasurementSettings:
    """A pair of analyzer angles (radians): ``alpha`` for side A, ``beta`` for side B."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _require_finite("alpha", self.alpha))
        object.__setattr__(self, "beta", _require_finite("beta", self.beta))


@dataclass(frozen=True)
class JointOutcomeDistribution:
    """Probabilities of the four joint outcomes ``(++, +-, -+, --)``.

    Entries must be nonnegative and sum to 1, both within ``PROB_ATOL``.
    Tiny negative entries produced by floating-point cancellation are
    accepted (down to ``-PROB_ATOL``) but never rescaled.
    """

    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self) -> None:
        total = 0.0
        for name in ("p_pp", "p_pm", "p_mp", "p_mm"):
            value = _require_finite(name, getattr(self, name))
            if value < -PROB_ATOL or value > 1.0 + PROB_ATOL:
                raise InputError(f"{name} out of [0, 1]: {value!r}")
            object.__setattr__(self, name, value)
            total += value
        if abs(total - 1.0) > PROB_ATOL:
            raise InputError(f"joint probabilities sum to {total!r}, expected 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)

    @property
    def marginal_a(self) -> float:
        """P(A = +1)."""
        return self.p_pp + self.p_pm

    @property
    def marginal_b(self) -> float:
        """P(B = +1)."""
        return self.p_pp + self.p_mp


@dataclass(frozen=True)
class CorrelationTriple:
    """The averages ``(a_bar, b_bar, ab_bar)`` of A, B and the product AB."""

    a_bar: float
    b_bar: float
    ab_bar: float

    def __post_init__(self) -> None:
        for name in ("a_bar", "b_bar", "ab_bar"):
            value = _require_finite(name, getattr(self, name))
            if abs(value) > 1.0 + PROB_ATOL:
                raise InputError(f"{name} out of [-1, 1]: {value!r}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a_bar, self.b_bar, self.ab_bar)
