"""
Deterministic, parallelizable Monte Carlo expectation engine.

Sample functions are vectorized: they take an array of sample indices and
return one value per index. The index range is cut into fixed-size chunks
that are evaluated by a thread pool; chunk outputs are stitched back in
index order before any reduction, so the estimate is bit-identical for any
worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NumericFailure

CHUNK = 1000
BATCH = 1000
DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 20130101


def default_seed() -> int:
    """Root seed from ``PRODSUP_SEED`` if set, else a fixed constant."""
    value = os.environ.get("PRODSUP_SEED")
    return int(value, 0) if value else DEFAULT_SEED


@dataclass(frozen=True)
class McSettings:
    n_samples: int = DEFAULT_SAMPLES
    root_seed: int = DEFAULT_SEED
    target_rel_stderr: Optional[float] = None
    max_samples: int = 1_000_000
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        if self.n_samples > self.max_samples:
            raise ValueError(f"n_samples={self.n_samples} exceeds max_samples={self.max_samples}")
        if self.target_rel_stderr is not None and not 0 < self.target_rel_stderr < 1:
            raise ValueError("target_rel_stderr must lie in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass(frozen=True)
class McResult:
    mean: float
    std_error: float
    n: int


def evaluate(fn: Callable[[np.ndarray], np.ndarray], start: int, stop: int, workers: int = 1) -> np.ndarray:
    """Values of ``fn`` on indices ``start..stop-1``, in index order."""
    bounds = [(lo, min(lo + CHUNK, stop)) for lo in range(start, stop, CHUNK)]

    def run(lohi):
        lo, hi = lohi
        out = np.asarray(fn(np.arange(lo, hi, dtype=np.int64)), dtype=float)
        if out.shape != (hi - lo,):
            raise ValueError(f"sample function returned shape {out.shape}, expected {(hi - lo,)}")
        return out

    if workers == 1 or len(bounds) == 1:
        parts = [run(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    values = np.concatenate(parts) if parts else np.empty(0)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NumericFailure(start + int(bad[0]), values[bad[0]])
    return values


def summarize(values: np.ndarray) -> McResult:
    n = values.size
    if n and np.all(values == values[0]):
        return McResult(float(values[0]), 0.0, n)
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McResult(mean, se, n)


def estimate(fn: Callable[[np.ndarray], np.ndarray], settings: McSettings) -> McResult:
    """Sample mean and standard error of ``fn`` over sample indices ``0..n-1``.

    With ``target_rel_stderr`` set, batches of :data:`BATCH` further samples
    are drawn until the relative standard error meets the target or
    ``max_samples`` is reached.
    """
    values = evaluate(fn, 0, settings.n_samples, settings.workers)
    result = summarize(values)
    target = settings.target_rel_stderr
    if target is None:
        return result
    while result.n < settings.max_samples and not _converged(result, target):
        stop = min(result.n + BATCH, settings.max_samples)
        values = np.concatenate([values, evaluate(fn, result.n, stop, settings.workers)])
        result = summarize(values)
    return result


def _converged(result: McResult, target: float) -> bool:
    if result.std_error == 0:
        return True
    return result.mean != 0 and result.std_error / abs(result.mean) <= target
