"""Monte Carlo cross-check of the limiting densities c_l.

The large prime factors of a random integer behave like a Poisson-
Dirichlet process: stick-breaking with uniform fractions gives the
components Y_1, Y_2, ... in size-biased order.  A prime of relative size
Y contributes floor(1/Y) - 1 fair coin flips of doubling carries, so

    c_l = E prod_j P[ Bin(floor(1/Y_j) - 1, 1/2) >= l ],

which this module estimates by direct simulation.  A component with
Y > 1/(l+1) has fewer than l flips, its factor is 0, and the sample can
be abandoned early.

Sampling uses a counter-based generator (Philox) keyed by (seed, worker
index), so results are reproducible for any worker count and the
per-worker partial sums can be reduced in a fixed order.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MCResult:
    ell: int
    samples: int
    mean: float
    std_error: float
    seed: int
    depth: int
    workers: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "ell": self.ell,
                "samples": self.samples,
                "mean": repr(self.mean),
                "std_error": repr(self.std_error),
                "seed": self.seed,
                "depth": self.depth,
                "workers": self.workers,
            }
        )


def worker_stream(seed: int, worker_index: int) -> np.random.Generator:
    """Independent counter-based stream for one worker."""
    return np.random.Generator(np.random.Philox(key=(seed, worker_index)))


def pd_sample(rng: np.random.Generator, count: int, depth: int) -> np.ndarray:
    """(count, depth) stick-breaking components in size-biased order."""
    u = rng.random((count, depth))
    y = np.empty_like(u)
    rest = np.ones(count)
    for j in range(depth):
        y[:, j] = rest * u[:, j]
        rest = rest * (1.0 - u[:, j])
    return y


def survival_table(ell: int, m_cap: int = 256) -> np.ndarray:
    """g[m] = P[Bin(m-1, 1/2) >= ell] for m = 0..m_cap.

    Zero for m <= ell, which subsumes the y > 1/(ell+1) cutoff branch.
    """
    g = np.zeros(m_cap + 1)
    for m in range(ell + 1, m_cap + 1):
        flips = m - 1
        tail = sum(math.comb(flips, i) for i in range(ell, flips + 1))
        g[m] = tail / 2.0**flips
    return g


def g_factor(y: np.ndarray, ell: int, table: np.ndarray | None = None) -> np.ndarray:
    """Per-component factor P[Bin(floor(1/y) - 1, 1/2) >= ell]; 0 above the cutoff."""
    if np.any(np.asarray(y) <= 0):
        raise ValueError("y must be positive")
    if table is None:
        table = survival_table(ell)
    with np.errstate(divide="ignore", over="ignore"):
        m = np.floor(1.0 / np.maximum(y, 1e-300))
    m = np.minimum(m, len(table) - 1).astype(np.int64)
    return table[m]


def _worker_sums(seed, worker_index, n, ell, depth, chunk, table):
    rng = worker_stream(seed, worker_index)
    sums = []
    sqsums = []
    done = 0
    while done < n:
        m = min(chunk, n - done)
        # clamp exact-zero components (possible u = 0 draws); their factor is 1
        y = np.maximum(pd_sample(rng, m, depth), 1e-300)
        x = np.prod(g_factor(y, ell, table), axis=1)
        sums.append(float(np.sum(x)))
        sqsums.append(float(np.sum(x * x)))
        done += m
    return math.fsum(sums), math.fsum(sqsums)


def mc_estimate(
    ell: int,
    samples: int = 10**7,
    seed: int = 0,
    depth: int = 50,
    workers: int = 1,
    chunk: int = 1 << 16,
) -> MCResult:
    """Monte Carlo estimate of c_l with its standard error."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    table = survival_table(ell)
    per = [samples // workers] * workers
    for i in range(samples % workers):
        per[i] += 1
    if workers == 1:
        parts = [_worker_sums(seed, 0, per[0], ell, depth, chunk, table)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(_worker_sums, seed, w, per[w], ell, depth, chunk, table)
                for w in range(workers)
            ]
            # reduce in worker-index order for a deterministic result
            parts = [f.result() for f in futs]
    total = math.fsum(p[0] for p in parts)
    sqtotal = math.fsum(p[1] for p in parts)
    mean = total / samples
    var = max(sqtotal / samples - mean * mean, 0.0) * samples / (samples - 1)
    return MCResult(
        ell=ell,
        samples=samples,
        mean=mean,
        std_error=math.sqrt(var / samples),
        seed=seed,
        depth=depth,
        workers=workers,
    )
