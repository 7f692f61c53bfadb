"""Hot evaluation kernels for grid scans, with two interchangeable backends.

The adjudication scan evaluates

    S(c, a, b) = u |cos^2 a - cos^2 b|
                 + (cos^2 a cos^2 b + sin^2 a sin^2 b)
                 + w (sin 2a sin 2b),
    u = |1 - 2 c^2|,   w = c sqrt(1 - c^2),

over grids with billions of points, so the inner loops are compiled
with numba when available.  A pure-numpy implementation of the same
arithmetic (same operation order, hence bit-identical results) serves
as fallback and cross-check; select it with ``LEGGETTLAB_BACKEND=numpy``
or the ``backend`` argument.

Per weight value ``c`` the kernels report the grid maximum of S, the
first (lexicographically smallest) index pair attaining it, and the
number of grid points with ``S > threshold``.  Violation *collection*
(materializing the offending points) is a cold path shared by both
backends.

General states beyond the diagonal family have no closed form here;
:func:`plane_scan` evaluates the probability form ``|P_A - P_B| +
p_pp + p_mm`` from amplitude matrices in row blocks.  Those grids are
small (no ``c`` axis), so there is no compiled variant.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .config import ENV_BACKEND
from .domain import InputError

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        def wrap(func):
            return func

        return wrap


__all__ = [
    "HAVE_NUMBA",
    "available_backends",
    "resolve_backend",
    "DiagonalScanner",
    "plane_row_scan",
    "plane_collect",
]


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def resolve_backend(name: str | None = None) -> str:
    """Explicit argument, else ``LEGGETTLAB_BACKEND``, else numba when importable."""
    if name is None:
        name = os.environ.get(ENV_BACKEND)
    if name is None:
        return "numba" if HAVE_NUMBA else "numpy"
    if name not in ("numba", "numpy"):
        raise InputError(f"unknown backend {name!r}, expected 'numba' or 'numpy'")
    if name == "numba" and not HAVE_NUMBA:
        raise InputError("backend 'numba' requested but numba is not importable")
    return name


def _diagonal_scan_py(u, w, ca2, sa2, s2a, cb2, sb2, s2b, threshold):
    """Reference implementation of the per-``c`` scan; numba-compiled below.

    For each c: fill one row of S at a time, reduce its maximum, rescan
    for the first attaining column, and count threshold crossings.  The
    expression is evaluated as ((u*x) + y) + (w*z) with x = |p - q|,
    y = p*q + sp*sq, z = za*zb, matching the numpy backend exactly.
    """
    nc = u.shape[0]
    na = ca2.shape[0]
    nb = cb2.shape[0]
    max_s = np.empty(nc, dtype=np.float64)
    arg_i = np.zeros(nc, dtype=np.int64)
    arg_j = np.zeros(nc, dtype=np.int64)
    n_over = np.zeros(nc, dtype=np.int64)
    row = np.empty(nb, dtype=np.float64)
    for k in range(nc):
        uu = u[k]
        ww = w[k]
        best = -np.inf
        best_i = 0
        best_j = 0
        count = 0
        for i in range(na):
            p = ca2[i]
            sp = sa2[i]
            za = s2a[i]
            for j in range(nb):
                x = p - cb2[j]
                if x < 0.0:
                    x = -x
                row[j] = uu * x + (p * cb2[j] + sp * sb2[j]) + ww * (za * s2b[j])
            row_best = row[0]
            for j in range(1, nb):
                if row[j] > row_best:
                    row_best = row[j]
            if row_best > best:
                for j in range(nb):
                    if row[j] == row_best:
                        best = row_best
                        best_i = i
                        best_j = j
                        break
            if row_best > threshold:
                for j in range(nb):
                    if row[j] > threshold:
                        count += 1
        max_s[k] = best
        arg_i[k] = best_i
        arg_j[k] = best_j
        n_over[k] = count
    return max_s, arg_i, arg_j, n_over


_diagonal_scan_numba = _njit(cache=True, nogil=True)(_diagonal_scan_py)


@dataclass(frozen=True)
class _AngleTables:
    ca2: np.ndarray
    sa2: np.ndarray
    s2a: np.ndarray
    cb2: np.ndarray
    sb2: np.ndarray
    s2b: np.ndarray


def _angle_tables(alphas: np.ndarray, betas: np.ndarray) -> _AngleTables:
    alphas = np.ascontiguousarray(alphas, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64)
    return _AngleTables(
        ca2=np.cos(alphas) ** 2,
        sa2=np.sin(alphas) ** 2,
        s2a=np.sin(2.0 * alphas),
        cb2=np.cos(betas) ** 2,
        sb2=np.sin(betas) ** 2,
        s2b=np.sin(2.0 * betas),
    )


class DiagonalScanner:
    """Reusable scanner over a fixed (alpha, beta) grid for the diagonal family.

    Construction precomputes the trigonometric tables (and, for the
    numpy backend, the three angle-only planes of the S expression).
    :meth:`scan` is thread-safe: worker threads may process disjoint
    ``c`` slabs concurrently against the shared read-only tables.
    """

    def __init__(self, alphas: np.ndarray, betas: np.ndarray, backend: str | None = None):
        self.backend = resolve_backend(backend)
        self._t = _angle_tables(alphas, betas)
        self._planes: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
        if self.backend == "numpy":
            self._ensure_planes()

    def _ensure_planes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self._planes is None:
            t = self._t
            x = np.abs(t.ca2[:, None] - t.cb2[None, :])
            y = t.ca2[:, None] * t.cb2[None, :] + t.sa2[:, None] * t.sb2[None, :]
            z = t.s2a[:, None] * t.s2b[None, :]
            self._planes = (x, y, z)
        return self._planes

    @staticmethod
    def weights(cs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(u, w) = (|1 - 2c^2|, c sqrt(1 - c^2))`` for a weight axis."""
        cs = np.asarray(cs, dtype=np.float64)
        return np.abs(1.0 - 2.0 * cs * cs), cs * np.sqrt(1.0 - cs * cs)

    def scan(
        self, u: np.ndarray, w: np.ndarray, threshold: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Per-``c`` grid maxima, first argmax indices, and threshold counts."""
        u = np.ascontiguousarray(u, dtype=np.float64)
        w = np.ascontiguousarray(w, dtype=np.float64)
        if self.backend == "numba":
            t = self._t
            return _diagonal_scan_numba(
                u, w, t.ca2, t.sa2, t.s2a, t.cb2, t.sb2, t.s2b, float(threshold)
            )
        return self._scan_numpy(u, w, float(threshold))

    def _scan_numpy(self, u, w, threshold):
        x, y, z = self._ensure_planes()
        nc = u.shape[0]
        max_s = np.empty(nc)
        arg_i = np.zeros(nc, dtype=np.int64)
        arg_j = np.zeros(nc, dtype=np.int64)
        n_over = np.zeros(nc, dtype=np.int64)
        nb = x.shape[1]
        s = np.empty_like(x)
        t = np.empty_like(x)
        for k in range(nc):
            np.multiply(x, u[k], out=s)
            s += y
            np.multiply(z, w[k], out=t)
            s += t
            flat = int(np.argmax(s))
            max_s[k] = s.flat[flat]
            arg_i[k] = flat // nb
            arg_j[k] = flat % nb
            if max_s[k] > threshold:
                n_over[k] = int(np.count_nonzero(s > threshold))
        return max_s, arg_i, arg_j, n_over

    def collect(
        self, u_k: float, w_k: float, threshold: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All ``(i, j, S)`` with ``S > threshold`` for one ``c``, row-major order.

        Cold path: both backends produce bit-identical S values, so the
        plane arithmetic is shared.
        """
        x, y, z = self._ensure_planes()
        s = x * u_k
        s += y
        t = z * w_k
        s += t
        mask = s > threshold
        i_idx, j_idx = np.nonzero(mask)
        return i_idx, j_idx, s[mask]


def _ket_rows(angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    plus = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    minus = np.stack([-np.sin(angles), np.cos(angles)], axis=1)
    return plus, minus


def _plane_blocks(coeffs: np.ndarray, alphas: np.ndarray, betas: np.ndarray, block: int):
    """Yield ``(row_offset, S_block)`` for the probability-form S of a fixed state."""
    alphas = np.asarray(alphas, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    kb_p, kb_m = _ket_rows(betas)
    right_p = coeffs @ kb_p.T  # (2, nb)
    right_m = coeffs @ kb_m.T
    p_b = np.sum(right_p.real**2 + right_p.imag**2, axis=0)
    for start in range(0, alphas.size, block):
        chunk = alphas[start : start + block]
        ka_p, ka_m = _ket_rows(chunk)
        left_p = ka_p @ coeffs  # (m, 2)
        p_a = np.sum(left_p.real**2 + left_p.imag**2, axis=1)
        amp_pp = ka_p @ right_p
        amp_mm = ka_m @ right_m
        s = np.abs(p_a[:, None] - p_b[None, :])
        s += amp_pp.real**2 + amp_pp.imag**2
        s += amp_mm.real**2 + amp_mm.imag**2
        yield start, s


def plane_row_scan(
    coeffs: np.ndarray,
    alphas: np.ndarray,
    betas: np.ndarray,
    threshold: float,
    block: int = 256,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Per-alpha-row maxima, first attaining column, and total threshold count."""
    na = np.asarray(alphas).size
    row_max = np.empty(na)
    row_arg = np.zeros(na, dtype=np.int64)
    count = 0
    for start, s in _plane_blocks(coeffs, alphas, betas, block):
        stop = start + s.shape[0]
        row_arg[start:stop] = np.argmax(s, axis=1)
        row_max[start:stop] = s[np.arange(s.shape[0]), row_arg[start:stop]]
        if float(s.max(initial=-np.inf)) > threshold:
            count += int(np.count_nonzero(s > threshold))
    return row_max, row_arg, count


def plane_collect(
    coeffs: np.ndarray,
    alphas: np.ndarray,
    betas: np.ndarray,
    threshold: float,
    block: int = 256,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All ``(i, j, S)`` with ``S > threshold`` for a fixed state, row-major order."""
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for start, s in _plane_blocks(coeffs, alphas, betas, block):
        mask = s > threshold
        if mask.any():
            i_idx, j_idx = np.nonzero(mask)
            rows.append(i_idx + start)
            cols.append(j_idx)
            vals.append(s[mask])
    if not rows:
        empty_i = np.empty(0, dtype=np.int64)
        return empty_i, empty_i.copy(), np.empty(0)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
