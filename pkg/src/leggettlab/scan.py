"""Exhaustive and refined search for the supremum of the bound's left-hand side.

A :class:`ScanSpec` names a state family and closed coordinate ranges
with steps; :func:`grid_scan` evaluates S at every grid point and
reports the maximum, its first (lexicographically smallest) attaining
point, every point exceeding ``1 + tolerance``, and — when an epsilon
ladder is attached — the ``(c, eps)`` pairs where the first-order
truncated condition predicts a violation.  :func:`refine` then polishes
the argmax inside its bracketing grid cells with derivative-free
coordinate search (golden-section bracketing plus parabolic steps; the
objective has absolute-value kinks, so no gradients).

Families:

* ``diagonal`` — the two-parameter entangled family over a ``c`` axis;
  hot path, runs on the compiled kernel backend.
* ``singlet`` and ``positive-parity`` — fixed maximally entangled
  states, angle grid only.
* ``fixed-matrix`` — any supplied :class:`~leggettlab.quantum.PureTwoPhotonState`.

Scans shard the ``c`` axis across worker threads; per-slice results are
merged in axis order, so reports are identical for every worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from time import perf_counter
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .config import resolve_workers
from .domain import InputError, MeasurementSettings
from .kernels import DiagonalScanner, plane_collect, plane_row_scan
from .quantum import (
    PureTwoPhotonState,
    joint_distribution,
    marginals,
    positive_parity_state,
    singlet_state,
)

__all__ = [
    "FAMILIES",
    "VIOLATION_CAP",
    "ScanPoint",
    "ScanSpec",
    "ScanReport",
    "halving_ladder",
    "grid_scan",
    "refine",
    "write_csv",
]

FAMILIES = ("diagonal", "singlet", "positive-parity", "fixed-matrix")

# Stored violation rows are capped (the count stays exact); only scans
# run with a deliberately lowered tolerance can produce large lists.
VIOLATION_CAP = 10_000


class ScanPoint(NamedTuple):
    """One evaluated point; ``c`` is None for families without a weight axis."""

    c: Optional[float]
    alpha: float
    beta: float
    s: float


def _check_range(name: str, rng, lo: float | None = None, hi: float | None = None):
    try:
        start, stop, step = (float(v) for v in rng)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be (start, stop, step), got {rng!r}") from None
    if not all(map(math.isfinite, (start, stop, step))):
        raise InputError(f"{name} must be finite, got {rng!r}")
    if step <= 0.0:
        raise InputError(f"{name} step must be > 0, got {step!r}")
    if stop < start:
        raise InputError(f"{name} is empty: stop {stop!r} < start {start!r}")
    if lo is not None and (start < lo or stop > hi):
        raise InputError(f"{name} must lie within [{lo}, {hi}], got {rng!r}")
    return (start, stop, step)


@dataclass(frozen=True)
class ScanSpec:
    """Grid description for one scan.

    Ranges are closed: the grid runs ``start, start + step, ...`` and
    includes ``stop`` when it is a whole number of steps away
    (commensurability judged at relative slack 1e-9).  ``tolerance``
    sets the violation threshold ``S > 1 + tolerance``; negative values
    are permitted to exercise the collection path.  ``eps_ladder``
    (diagonal family only) marks first-order predicted violations.
    """

    family: str = "diagonal"
    c_range: tuple[float, float, float] = (0.0, 0.7, 1e-3)
    alpha_range: tuple[float, float, float] = (0.0, math.pi, 1e-3)
    beta_range: tuple[float, float, float] = (0.0, math.pi, 1e-3)
    refine: bool = True
    tolerance: float = 1e-9
    state: Optional[PureTwoPhotonState] = None
    eps_ladder: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        object.__setattr__(self, "c_range", _check_range("c_range", self.c_range, 0.0, 1.0))
        object.__setattr__(self, "alpha_range", _check_range("alpha_range", self.alpha_range))
        object.__setattr__(self, "beta_range", _check_range("beta_range", self.beta_range))
        if not math.isfinite(self.tolerance) or self.tolerance <= -2.0:
            raise InputError(f"tolerance must be finite and > -2, got {self.tolerance!r}")
        if self.family == "fixed-matrix":
            if not isinstance(self.state, PureTwoPhotonState):
                raise InputError("family 'fixed-matrix' requires a PureTwoPhotonState")
        elif self.state is not None:
            raise InputError(f"family {self.family!r} does not take an explicit state")
        ladder = tuple(float(e) for e in self.eps_ladder)
        if ladder:
            if self.family != "diagonal":
                raise InputError("eps_ladder applies only to the diagonal family")
            if any(not math.isfinite(e) or e <= 0.0 for e in ladder):
                raise InputError("eps ladder entries must be positive and finite")
            if any(b >= a for a, b in zip(ladder, ladder[1:])):
                raise InputError("eps ladder must be strictly decreasing")
        object.__setattr__(self, "eps_ladder", ladder)


@dataclass(frozen=True)
class ScanReport:
    """Outcome of a grid scan (optionally refined).

    ``violations`` stores at most ``VIOLATION_CAP`` points in canonical
    (c, alpha, beta) order; ``violation_count`` is always the exact
    total.  ``slice_maxima`` holds one row per c (diagonal family) or
    per alpha (fixed states) — the curve the CSV export writes.
    """

    family: str
    max_s: float
    argmax: ScanPoint
    grid_points: int
    violations: tuple[ScanPoint, ...]
    violation_count: int
    first_order_predicted_violations: tuple[tuple[float, float], ...]
    slice_maxima: tuple[ScanPoint, ...]
    tolerance: float
    wall_time: float
    refined: bool = False


def halving_ladder(start: float = 1e-2, stop: float = 1e-5) -> tuple[float, ...]:
    """``start, start/2, start/4, ...`` down to the last value >= ``stop``."""
    start, stop = float(start), float(stop)
    if not (math.isfinite(start) and math.isfinite(stop)) or not 0.0 < stop <= start:
        raise InputError(f"need 0 < stop <= start, got start={start!r} stop={stop!r}")
    out = []
    eps = start
    while eps >= stop * (1.0 - 1e-12):
        out.append(eps)
        eps *= 0.5
    return tuple(out)


def _axis(rng: tuple[float, float, float]) -> np.ndarray:
    """Closed-interval grid; endpoint included at relative slack 1e-9."""
    start, stop, step = rng
    quotient = (stop - start) / step
    n = int(math.floor(quotient + 1e-9 * (abs(quotient) + 1.0))) + 1
    values = start + step * np.arange(n)
    return np.minimum(np.maximum(values, start), stop)


def _diagonal_lhs(c: float, alpha: float, beta: float) -> float:
    """Scalar S for the diagonal family (same closed form as the kernels)."""
    u = abs(1.0 - 2.0 * c * c)
    w = c * math.sqrt(1.0 - c * c)
    ca2, sa2 = math.cos(alpha) ** 2, math.sin(alpha) ** 2
    cb2, sb2 = math.cos(beta) ** 2, math.sin(beta) ** 2
    return (
        u * abs(ca2 - cb2)
        + (ca2 * cb2 + sa2 * sb2)
        + w * (math.sin(2.0 * alpha) * math.sin(2.0 * beta))
    )


def _plane_lhs(state: PureTwoPhotonState, alpha: float, beta: float) -> float:
    """Scalar probability-form S for a fixed state."""
    settings = MeasurementSettings(alpha=alpha, beta=beta)
    p_a, p_b = marginals(state, settings)
    dist = joint_distribution(state, settings)
    return abs(p_a - p_b) + dist.p_pp + dist.p_mm


def _family_state(spec: ScanSpec) -> PureTwoPhotonState:
    if spec.family == "singlet":
        return singlet_state()
    if spec.family == "positive-parity":
        return positive_parity_state()
    return spec.state  # fixed-matrix; validated at spec construction


def _shards(n: int, workers: int) -> list[slice]:
    pieces = min(n, workers)
    bounds = np.linspace(0, n, pieces + 1).astype(int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _predicted_violations(
    cs: np.ndarray, ladder: tuple[float, ...]
) -> tuple[tuple[float, float], ...]:
    """(c, eps) grid points where the truncated condition predicts violation.

    The condition ``c >= 2 c eps + 2 sqrt(1 - c^2) eps`` is evaluated
    verbatim on its domain ``1 > 2 c^2``; points off that domain are
    skipped rather than guessed."""
    out: list[tuple[float, float]] = []
    in_domain = 1.0 > 2.0 * cs * cs
    root = np.sqrt(np.clip(1.0 - cs * cs, 0.0, None))
    for eps in ladder:
        holds = cs >= (2.0 * cs + 2.0 * root) * eps
        for k in np.nonzero(in_domain & ~holds)[0]:
            out.append((float(cs[k]), eps))
    out.sort()
    return tuple(out)


def grid_scan(
    spec: ScanSpec, *, workers: Optional[int] = None, backend: Optional[str] = None
) -> ScanReport:
    """Evaluate S at every point of the grid ``spec`` describes; deterministic for any worker count."""
    started = perf_counter()
    workers = resolve_workers(workers)
    if spec.family == "diagonal":
        report = _scan_diagonal(spec, workers, backend)
    else:
        report = _scan_plane(spec)
    return replace(report, wall_time=perf_counter() - started)


def _scan_diagonal(spec: ScanSpec, workers: int, backend: Optional[str]) -> ScanReport:
    cs = _axis(spec.c_range)
    alphas = _axis(spec.alpha_range)
    betas = _axis(spec.beta_range)
    threshold = 1.0 + spec.tolerance
    scanner = DiagonalScanner(alphas, betas, backend)
    u, w = DiagonalScanner.weights(cs)

    shards = _shards(cs.size, workers)
    if len(shards) == 1:
        parts = [scanner.scan(u, w, threshold)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda sl: scanner.scan(u[sl], w[sl], threshold), shards))
    max_s = np.concatenate([p[0] for p in parts])
    arg_i = np.concatenate([p[1] for p in parts])
    arg_j = np.concatenate([p[2] for p in parts])
    n_over = np.concatenate([p[3] for p in parts])

    best_k = 0
    best = -math.inf
    for k in range(cs.size):
        if max_s[k] > best:
            best = float(max_s[k])
            best_k = k
    argmax = ScanPoint(
        c=float(cs[best_k]),
        alpha=float(alphas[arg_i[best_k]]),
        beta=float(betas[arg_j[best_k]]),
        s=best,
    )

    violations: list[ScanPoint] = []
    for k in np.nonzero(n_over > 0)[0]:
        if len(violations) >= VIOLATION_CAP:
            break
        i_idx, j_idx, s_vals = scanner.collect(float(u[k]), float(w[k]), threshold)
        room = VIOLATION_CAP - len(violations)
        for i, j, s in zip(i_idx[:room], j_idx[:room], s_vals[:room]):
            violations.append(ScanPoint(float(cs[k]), float(alphas[i]), float(betas[j]), float(s)))

    slice_maxima = tuple(
        ScanPoint(float(cs[k]), float(alphas[arg_i[k]]), float(betas[arg_j[k]]), float(max_s[k]))
        for k in range(cs.size)
    )
    return ScanReport(
        family=spec.family,
        max_s=best,
        argmax=argmax,
        grid_points=int(cs.size) * int(alphas.size) * int(betas.size),
        violations=tuple(violations),
        violation_count=int(n_over.sum()),
        first_order_predicted_violations=_predicted_violations(cs, spec.eps_ladder),
        slice_maxima=slice_maxima,
        tolerance=spec.tolerance,
        wall_time=0.0,
    )


def _scan_plane(spec: ScanSpec) -> ScanReport:
    state = _family_state(spec)
    alphas = _axis(spec.alpha_range)
    betas = _axis(spec.beta_range)
    threshold = 1.0 + spec.tolerance
    row_max, row_arg, count = plane_row_scan(state.coeffs, alphas, betas, threshold)

    best_i = 0
    best = -math.inf
    for i in range(alphas.size):
        if row_max[i] > best:
            best = float(row_max[i])
            best_i = i
    argmax = ScanPoint(
        c=None, alpha=float(alphas[best_i]), beta=float(betas[row_arg[best_i]]), s=best
    )

    violations: tuple[ScanPoint, ...] = ()
    if count > 0:
        i_idx, j_idx, s_vals = plane_collect(state.coeffs, alphas, betas, threshold)
        violations = tuple(
            ScanPoint(None, float(alphas[i]), float(betas[j]), float(s))
            for i, j, s in zip(i_idx[:VIOLATION_CAP], j_idx[:VIOLATION_CAP], s_vals[:VIOLATION_CAP])
        )

    slice_maxima = tuple(
        ScanPoint(None, float(alphas[i]), float(betas[row_arg[i]]), float(row_max[i]))
        for i in range(alphas.size)
    )
    return ScanReport(
        family=spec.family,
        max_s=best,
        argmax=argmax,
        grid_points=int(alphas.size) * int(betas.size),
        violations=violations,
        violation_count=int(count),
        first_order_predicted_violations=(),
        slice_maxima=slice_maxima,
        tolerance=spec.tolerance,
        wall_time=0.0,
    )


# ---------------------------------------------------------------------------
# Derivative-free refinement.
# ---------------------------------------------------------------------------

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def _line_max(
    f: Callable[[float], float], lo: float, hi: float, seed_x: float, seed_f: float
) -> tuple[float, float]:
    """Golden-section bracketing plus parabolic polish on [lo, hi].

    Tracks the best evaluated point, seeded with the incumbent so the
    result never regresses.  The parabolic steps use wide finite
    differences (1e-4, then 1e-6) to see through the floating-point
    flatness at quadratic maxima, where bracketing alone stalls at
    sqrt(eps)-scale accuracy.
    """
    best_x, best_f = seed_x, seed_f
    a, b = lo, hi
    c = a + _INVPHI2 * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    if fc > best_f:
        best_x, best_f = c, fc
    if fd > best_f:
        best_x, best_f = d, fd
    for _ in range(80):
        if fc > fd:
            b, d, fd = d, c, fc
            c = a + _INVPHI2 * (b - a)
            fc = f(c)
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            if fd > best_f:
                best_x, best_f = d, fd
        if b - a < 1e-12:
            break
    for h in (1e-4, 1e-6):
        if hi - lo <= 2.0 * h:
            continue
        x = min(max(best_x, lo + h), hi - h)
        f0, fp, fm = f(x), f(x + h), f(x - h)
        denom = (fp - f0) + (fm - f0)
        if denom < 0.0:  # concave along this line: parabola vertex is a max
            step = 0.5 * h * (fm - fp) / denom
            cand = min(max(x + step, lo), hi)
            f_cand = f(cand)
            if f_cand >= best_f:
                best_x, best_f = cand, f_cand
    return best_x, best_f


def refine(report: ScanReport, spec: ScanSpec) -> ScanReport:
    """Polish the argmax inside its bracketing grid cells.

    Coordinate-wise line maximization cycles over the active axes until
    positions move < 1e-11 and the value improves < 1e-15.  max_s never
    decreases; the argmax stays within one grid step of the original.
    A grid with a single point on every active axis is returned as-is.
    """
    if not isinstance(report, ScanReport):
        raise InputError("refine expects a ScanReport")
    if spec.family != report.family:
        raise InputError(
            f"spec family {spec.family!r} does not match report family {report.family!r}"
        )
    started = perf_counter()

    if spec.family == "diagonal":
        axes = [("c", _axis(spec.c_range)), ("alpha", _axis(spec.alpha_range)),
                ("beta", _axis(spec.beta_range))]
        coords = [report.argmax.c, report.argmax.alpha, report.argmax.beta]

        def objective(pt: Sequence[float]) -> float:
            return _diagonal_lhs(pt[0], pt[1], pt[2])

    else:
        state = _family_state(spec)
        axes = [("alpha", _axis(spec.alpha_range)), ("beta", _axis(spec.beta_range))]
        coords = [report.argmax.alpha, report.argmax.beta]

        def objective(pt: Sequence[float]) -> float:
            return _plane_lhs(state, pt[0], pt[1])

    brackets = []
    for (name, grid), coord in zip(axes, coords):
        idx = int(np.argmin(np.abs(grid - coord)))
        lo = float(grid[max(idx - 1, 0)])
        hi = float(grid[min(idx + 1, grid.size - 1)])
        brackets.append((lo, hi))
    if all(lo == hi for lo, hi in brackets):
        return report

    value = report.max_s
    for _ in range(40):
        improved = 0.0
        moved = 0.0
        for k, (lo, hi) in enumerate(brackets):
            if lo == hi:
                continue

            def along(t: float, k: int = k) -> float:
                probe = list(coords)
                probe[k] = t
                return objective(probe)

            new_x, new_f = _line_max(along, lo, hi, coords[k], value)
            improved += new_f - value
            moved += abs(new_x - coords[k])
            coords[k] = new_x
            value = new_f
        if improved < 1e-15 and moved < 1e-11:
            break

    if spec.family == "diagonal":
        argmax = ScanPoint(c=coords[0], alpha=coords[1], beta=coords[2], s=value)
    else:
        argmax = ScanPoint(c=None, alpha=coords[0], beta=coords[1], s=value)
    return replace(
        report,
        max_s=max(report.max_s, value),
        argmax=argmax,
        refined=True,
        wall_time=report.wall_time + (perf_counter() - started),
    )


def write_csv(report: ScanReport, path: str) -> str:
    """Write the slice-maxima curve as ``c,alpha,beta,S`` rows for plotting."""
    lines = ["c,alpha,beta,S"]
    for point in report.slice_maxima:
        c_field = "" if point.c is None else format(point.c, ".17g")
        lines.append(
            f"{c_field},{format(point.alpha, '.17g')},"
            f"{format(point.beta, '.17g')},{format(point.s, '.17g')}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
