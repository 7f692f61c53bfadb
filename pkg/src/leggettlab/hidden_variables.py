"""Finite-support realist models and the feasibility oracle for the bounds.

A hidden-variable model assigns each label ``lambda`` a weight
``rho(lambda) >= 0`` (weights sum to 1) and a deterministic outcome pair
``(A, B)`` with ``A, B in {+1, -1}``, all at one fixed pair of analyzer
settings.  Ensemble averages of such a model always satisfy the
two-sided bound; this module provides the models, their averages, the
pointwise identity that drives the derivation, the collapse of
outcome-dependent (sequential) models to outcome-independent ones, and
an independent linear-programming oracle showing the bounds are exactly
the attainable range of ``ab_bar`` given the marginals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .domain import PROB_ATOL, CorrelationTriple, InputError

__all__ = [
    "HVModel",
    "SequentialHVModel",
    "ensemble_averages",
    "pointwise_identity",
    "collapse_sequential",
    "frechet_range",
    "random_model",
    "model_to_json",
    "model_from_json",
]


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size < 1:
        raise InputError("weights must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(w)):
        raise InputError("weights must be finite")
    if np.any(w < 0.0):
        raise InputError("weights must be nonnegative")
    total = float(np.sum(w))
    if abs(total - 1.0) > PROB_ATOL:
        raise InputError(f"weights sum to {total!r}, expected 1 within {PROB_ATOL}")
    w.setflags(write=False)
    return w


def _check_signs(values, name: str, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.asarray(values)
    if arr.shape != shape:
        raise InputError(f"{name} must have shape {shape}, got {arr.shape}")
    as_int = arr.astype(np.int8)
    if not np.array_equal(as_int, arr) or not np.all(np.abs(as_int) == 1):
        raise InputError(f"{name} entries must be exactly +1 or -1")
    as_int.setflags(write=False)
    return as_int


@dataclass(frozen=True, eq=False)
class HVModel:
    """Outcome-independent model: per label, a weight and a fixed ``(A, B)`` pair.

    ``labels`` are opaque identifiers; they default to ``0..n-1``.
    """

    weights: np.ndarray
    responses: np.ndarray  # shape (n, 2), entries exactly +/-1
    labels: tuple = ()

    def __post_init__(self) -> None:
        w = _check_weights(self.weights)
        r = _check_signs(self.responses, "responses", (w.size, 2))
        labels = tuple(self.labels) if self.labels else tuple(range(w.size))
        if len(labels) != w.size:
            raise InputError(f"got {len(labels)} labels for {w.size} weights")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "responses", r)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True, eq=False)
class SequentialHVModel:
    """Outcome-dependent model: ``B`` may consult the other wing's outcome.

    ``first`` holds ``A(lambda)``; ``second_given_first[:, 0]`` is the
    ``B`` response when ``A = +1`` and ``[:, 1]`` when ``A = -1``, so the
    conditional response is total on both inputs by construction.
    """

    weights: np.ndarray
    first: np.ndarray  # shape (n,)
    second_given_first: np.ndarray  # shape (n, 2)
    labels: tuple = ()

    def __post_init__(self) -> None:
        w = _check_weights(self.weights)
        a = _check_signs(self.first, "first", (w.size,))
        b = _check_signs(self.second_given_first, "second_given_first", (w.size, 2))
        labels = tuple(self.labels) if self.labels else tuple(range(w.size))
        if len(labels) != w.size:
            raise InputError(f"got {len(labels)} labels for {w.size} weights")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "first", a)
        object.__setattr__(self, "second_given_first", b)
        object.__setattr__(self, "labels", labels)


def ensemble_averages(model: HVModel) -> CorrelationTriple:
    """Weighted averages ``(a_bar, b_bar, ab_bar)`` over the model's support."""
    if not isinstance(model, HVModel):
        raise InputError("ensemble_averages expects an HVModel")
    a = model.responses[:, 0]
    b = model.responses[:, 1]
    return CorrelationTriple(
        a_bar=float(model.weights @ a),
        b_bar=float(model.weights @ b),
        ab_bar=float(model.weights @ (a * b)),
    )


def pointwise_identity(a: int, b: int) -> tuple[float, float, float]:
    """The chain ``1 - |A - B| = AB = -1 + |A + B|`` for one outcome pair.

    Holds exactly because each side is 1 on equal outcomes and -1 on
    unequal outcomes; averaging it over any model yields the two-sided
    bound.
    """
    for name, v in (("A", a), ("B", b)):
        if v not in (1, -1):
            raise InputError(f"{name} must be +1 or -1, got {v!r}")
    a = float(a)
    b = float(b)
    return (1.0 - abs(a - b), a * b, -1.0 + abs(a + b))


def collapse_sequential(model: SequentialHVModel) -> HVModel:
    """Compose the later response with the earlier outcome.

    Substituting ``A(lambda)`` into ``B(lambda, A)`` yields an
    outcome-independent model on the same support with identical
    weights; because the collapsed arrays are exactly the ones any
    sequential-model average would use, the ensemble averages agree
    bit for bit.
    """
    if not isinstance(model, SequentialHVModel):
        raise InputError("collapse_sequential expects a SequentialHVModel")
    a = model.first
    b = np.where(a == 1, model.second_given_first[:, 0], model.second_given_first[:, 1])
    responses = np.stack([a, b.astype(np.int8)], axis=1)
    return HVModel(weights=model.weights, responses=responses, labels=model.labels)


_ENUM_STEP = 1e-3


def frechet_range(a_bar: float, b_bar: float, method: str = "lp") -> tuple[float, float]:
    """Attainable range of ``ab_bar`` over all joint distributions with given marginals.

    ``method="lp"`` solves the two 4-variable linear programs exactly;
    ``method="enumeration"`` sweeps the one free cell ``p_pp`` over its
    feasible interval (step 1e-3, endpoints included — the objective is
    linear in ``p_pp``, so the endpoints already realize the extremes).
    Both reproduce ``(-1 + |a+b|, 1 - |a-b|)``.
    """
    for name, v in (("a_bar", a_bar), ("b_bar", b_bar)):
        v = float(v)
        if not math.isfinite(v) or abs(v) > 1.0 + PROB_ATOL:
            raise InputError(f"{name} must lie in [-1, 1], got {v!r}")
    p_a = min(max(0.5 * (1.0 + float(a_bar)), 0.0), 1.0)
    p_b = min(max(0.5 * (1.0 + float(b_bar)), 0.0), 1.0)

    if method == "lp":
        # Cells x = (p_pp, p_pm, p_mp, p_mm); ab_bar = x0 - x1 - x2 + x3.
        # Feasibility tolerances are tightened from the solver default
        # (1e-7) so near-degenerate marginals still resolve within 1e-9.
        objective = np.array([1.0, -1.0, -1.0, 1.0])
        a_eq = np.array([
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
        ])
        b_eq = np.array([1.0, p_a, p_b])
        options = {
            "primal_feasibility_tolerance": 1e-10,
            "dual_feasibility_tolerance": 1e-10,
        }
        lo = linprog(objective, A_eq=a_eq, b_eq=b_eq, bounds=(0.0, 1.0),
                     method="highs", options=options)
        hi = linprog(-objective, A_eq=a_eq, b_eq=b_eq, bounds=(0.0, 1.0),
                     method="highs", options=options)
        if lo.status != 0 or hi.status != 0:
            raise ArithmeticError(
                f"LP solver failed for marginals ({a_bar}, {b_bar}): "
                f"status {lo.status}/{hi.status}"
            )
        return (float(lo.fun), float(-hi.fun))

    if method == "enumeration":
        low = max(0.0, p_a + p_b - 1.0)
        high = min(p_a, p_b)
        interior = np.arange(low, high, _ENUM_STEP)
        grid = np.concatenate([interior, [low, high]])
        ab = 4.0 * grid - 2.0 * p_a - 2.0 * p_b + 1.0
        return (float(ab.min()), float(ab.max()))

    raise InputError(f"unknown method {method!r}, expected 'lp' or 'enumeration'")


def random_model(label_count: int, seed: int, stream: int = 0) -> HVModel:
    """Deterministic pseudo-random model fixture.

    Uses the counter-based Philox generator keyed by ``(seed, stream)``,
    so distinct streams give independent models under one seed.  Weights
    are uniform draws normalized to sum 1; responses are fair sign flips.
    """
    label_count = int(label_count)
    if label_count < 1:
        raise InputError(f"label_count must be >= 1, got {label_count}")
    for name, v in (("seed", seed), ("stream", stream)):
        if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < 2**64:
            raise InputError(f"{name} must be an integer in [0, 2^64), got {v!r}")
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))
    raw = gen.random(label_count)
    total = float(raw.sum())
    weights = raw / total if total > 0.0 else np.full(label_count, 1.0 / label_count)
    responses = (gen.integers(0, 2, size=(label_count, 2)) * 2 - 1).astype(np.int8)
    return HVModel(weights=weights, responses=responses)


def model_to_json(model: HVModel) -> str:
    """Serialize to ``{"weights": [...], "responses": [[a, b], ...]}``.

    Weights are rendered with ``repr``'s shortest exact decimal, so the
    document round-trips to bit-identical floats.
    """
    if not isinstance(model, HVModel):
        raise InputError("model_to_json expects an HVModel")
    weights = ", ".join(repr(float(w)) for w in model.weights)
    responses = ", ".join(f"[{int(a)}, {int(b)}]" for a, b in model.responses)
    return f'{{"weights": [{weights}], "responses": [{responses}]}}'


def model_from_json(text: str) -> HVModel:
    """Parse and validate a model serialized by :func:`model_to_json`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid model JSON: {exc}") from None
    if not isinstance(doc, dict) or set(doc) - {"weights", "responses"}:
        raise InputError("model JSON must be an object with 'weights' and 'responses'")
    try:
        weights = doc["weights"]
        responses = doc["responses"]
    except KeyError as exc:
        raise InputError(f"model JSON missing {exc.args[0]!r}") from None
    return HVModel(weights=np.asarray(weights), responses=np.asarray(responses))
