"""Seeded stochastic simulation of measurement records.

Sampling uses the counter-based Philox generator.  A run of ``n`` draws
is split into fixed-size blocks of ``2**20`` samples; block ``k`` is
generated from the key ``(seed, k)``, and per-block outcome counts are
summed.  Because the block layout depends only on ``n`` and ``seed``,
results are bit-identical for any worker count: workers merely map
blocks to threads.

Estimators are plain plug-in frequencies with normal-approximation
(Wald) standard errors ``sqrt((1 - x^2)/n)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import resolve_workers
from .domain import CorrelationTriple, InputError, JointOutcomeDistribution
from .hidden_variables import HVModel

__all__ = [
    "BLOCK_SIZE",
    "SampleCounts",
    "MCEstimate",
    "sample_pairs",
    "simulate_hv",
    "estimate",
]

BLOCK_SIZE = 1 << 20


@dataclass(frozen=True)
class SampleCounts:
    """Empirical outcome counts in cell order ``(++, +-, -+, --)``.

    ``seed`` records provenance when the counts came from a seeded
    sampler; hand-built counts may leave it None.
    """

    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    n_total: int
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("n_pp", "n_pm", "n_mp", "n_mm", "n_total"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or int(value) < 0:
                raise InputError(f"{name} must be a nonnegative integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        total = self.n_pp + self.n_pm + self.n_mp + self.n_mm
        if total != self.n_total:
            raise InputError(f"counts sum to {total}, but n_total is {self.n_total}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n_pp, self.n_pm, self.n_mp, self.n_mm)


@dataclass(frozen=True)
class MCEstimate:
    """Plug-in correlation estimates with Wald standard errors."""

    triple_hat: CorrelationTriple
    std_errors: tuple[float, float, float]
    n: int
    seed: Optional[int] = None


def _check_positive_count(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or int(n) < 1:
        raise InputError(f"sample count must be an integer >= 1, got {n!r}")
    return int(n)


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < 2**64:
        raise InputError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def _blocks(n: int) -> list[tuple[int, int]]:
    """(block index, block size) pairs covering ``n`` samples."""
    out = []
    offset = 0
    index = 0
    while offset < n:
        size = min(BLOCK_SIZE, n - offset)
        out.append((index, size))
        offset += size
        index += 1
    return out


def _run_blocks(n: int, seed: int, workers: Optional[int], one_block) -> np.ndarray:
    """Sum ``one_block(index, size)`` over the block layout, worker-independent."""
    workers = resolve_workers(workers)
    blocks = _blocks(n)
    totals = np.zeros(4, dtype=np.int64)
    if workers == 1 or len(blocks) == 1:
        for index, size in blocks:
            totals += one_block(index, size)
        return totals
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for counts in pool.map(lambda args: one_block(*args), blocks):
            totals += counts
    return totals


def sample_pairs(
    dist: JointOutcomeDistribution,
    n: int,
    seed: int = 0,
    workers: Optional[int] = None,
) -> SampleCounts:
    """Draw ``n`` outcome pairs from a joint distribution, deterministically."""
    if not isinstance(dist, JointOutcomeDistribution):
        raise InputError("sample_pairs expects a JointOutcomeDistribution")
    n = _check_positive_count(n)
    seed = _check_seed(seed)
    probs = np.clip(np.asarray(dist.as_tuple()), 0.0, None)
    edges = np.cumsum(probs[:3])

    def one_block(index: int, size: int) -> np.ndarray:
        gen = np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))
        cells = np.searchsorted(edges, gen.random(size), side="right")
        return np.bincount(cells, minlength=4)

    totals = _run_blocks(n, seed, workers, one_block)
    return SampleCounts(*(int(t) for t in totals), n_total=n, seed=seed)


def simulate_hv(
    model: HVModel,
    n: int,
    seed: int = 0,
    workers: Optional[int] = None,
) -> SampleCounts:
    """Sample labels by weight and emit each label's deterministic pair."""
    if not isinstance(model, HVModel):
        raise InputError("simulate_hv expects an HVModel")
    n = _check_positive_count(n)
    seed = _check_seed(seed)
    thresholds = np.cumsum(model.weights)[:-1]
    cells = ((model.responses[:, 0] == -1).astype(np.int64) * 2
             + (model.responses[:, 1] == -1).astype(np.int64))

    def one_block(index: int, size: int) -> np.ndarray:
        gen = np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))
        labels = np.searchsorted(thresholds, gen.random(size), side="right")
        return np.bincount(cells[labels], minlength=4)

    totals = _run_blocks(n, seed, workers, one_block)
    return SampleCounts(*(int(t) for t in totals), n_total=n, seed=seed)


def estimate(counts: SampleCounts) -> MCEstimate:
    """Plug-in triple and Wald errors from empirical counts."""
    if not isinstance(counts, SampleCounts):
        raise InputError("estimate expects SampleCounts")
    n = counts.n_total
    if n < 1:
        raise InputError("cannot estimate from zero samples")
    n_pp, n_pm, n_mp, n_mm = counts.as_tuple()
    a_hat = (n_pp + n_pm - n_mp - n_mm) / n
    b_hat = (n_pp + n_mp - n_pm - n_mm) / n
    ab_hat = (n_pp + n_mm - n_pm - n_mp) / n
    errors = tuple(math.sqrt(max(0.0, 1.0 - x * x) / n) for x in (a_hat, b_hat, ab_hat))
    return MCEstimate(
        triple_hat=CorrelationTriple(a_hat, b_hat, ab_hat),
        std_errors=errors,
        n=n,
        seed=counts.seed,
    )
