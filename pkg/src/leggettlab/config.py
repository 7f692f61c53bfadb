"""Environment-variable contract and worker/backend resolution.

Two process-level knobs:

* ``LEGGETTLAB_BACKEND``: ``"numba"`` or ``"numpy"`` — selects the hot
  scan kernel implementation.  Default: numba when importable, else the
  pure-numpy path.
* ``LEGGETTLAB_THREADS``: default worker count for sharded scans and
  sampling.  Default: 1.  Results are worker-count independent by
  construction; this knob only trades wall time.
"""

from __future__ import annotations

import os

from .domain import InputError

__all__ = ["ENV_BACKEND", "ENV_THREADS", "resolve_workers"]

ENV_BACKEND = "LEGGETTLAB_BACKEND"
ENV_THREADS = "LEGGETTLAB_THREADS"


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument, else ``LEGGETTLAB_THREADS``, else 1."""
    if workers is None:
        raw = os.environ.get(ENV_THREADS)
        if raw is None:
            return 1
        try:
            workers = int(raw)
        except ValueError:
            raise InputError(f"{ENV_THREADS} must be an integer, got {raw!r}") from None
    workers = int(workers)
    if workers < 1:
        raise InputError(f"worker count must be >= 1, got {workers}")
    return workers
