"""Branch-level Monte-Carlo oracle for hop laws, end-to-end SNR and SER.

Sampling is organized in fixed-size chunks; chunk i draws from a fresh
generator seeded by SeedSequence((master_seed, stream, i)).  Workers only
decide which chunks they execute, never what those chunks produce, and
results land in chunk-indexed slots of the output array — so every
estimate is bitwise identical for any worker_count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .diversity import CombiningScheme, HopConfig
from .relay import LinkScenario, equivalent_snr
from .ser import PskModulation, conditional_sep

__all__ = [
    "McRun",
    "simulate_hop",
    "simulate_end_to_end",
    "empirical_cdf",
    "mc_ser",
    "sweep_eq_samples",
]

_CHUNK = 1 << 16
# Distinct substream tags keep standalone hop draws and the two hops of a
# link simulation statistically independent of each other.
_HOP_STREAM = 0
_LINK_STREAM_HOP1 = 1
_LINK_STREAM_HOP2 = 2


@dataclass(frozen=True)
class McRun:
    """Size, seed and parallelism of one simulation run."""

    master_seed: int
    n_samples: int
    worker_count: int = 1

    def __post_init__(self):
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")


def _chunk_rng(master_seed: int, stream: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence((master_seed, stream, index))
    return np.random.Generator(np.random.PCG64(seq))


def _run_chunked(run: McRun, stream: int, compute) -> np.ndarray:
    """Fill an n_samples array chunk by chunk; layout independent of workers."""
    out = np.empty(run.n_samples, dtype=float)
    spans = [(i, start, min(start + _CHUNK, run.n_samples))
             for i, start in enumerate(range(0, run.n_samples, _CHUNK))]

    def fill(span):
        index, start, stop = span
        rng = _chunk_rng(run.master_seed, stream, index)
        out[start:stop] = compute(rng, stop - start)

    if run.worker_count == 1 or len(spans) == 1:
        for span in spans:
            fill(span)
    else:
        with ThreadPoolExecutor(max_workers=run.worker_count) as pool:
            list(pool.map(fill, spans))
    return out


def _hop_chunk(cfg: HopConfig, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n effective hop SNRs by explicit per-branch simulation."""
    branches = rng.gamma(cfg.m, cfg.mean_branch_snr / cfg.m,
                         size=(n, cfg.n_tx, cfg.n_rx))
    if cfg.scheme is CombiningScheme.MRC:
        return branches[:, 0, :].sum(axis=1)
    if cfg.scheme is CombiningScheme.STBC:
        return branches[:, :, 0].sum(axis=1) / cfg.n_tx
    if cfg.scheme is CombiningScheme.STBC_MRC:
        return branches.sum(axis=(1, 2)) / cfg.n_tx
    return branches.sum(axis=2).max(axis=1)  # TAS_MRC


def simulate_hop(cfg: HopConfig, run: McRun, stream: int = _HOP_STREAM) -> np.ndarray:
    """Effective hop SNR samples (length run.n_samples)."""
    return _run_chunked(run, stream, lambda rng, n: _hop_chunk(cfg, rng, n))


def simulate_end_to_end(scenario: LinkScenario, run: McRun) -> np.ndarray:
    """Samples of the end-to-end equivalent SNR with independent hops."""
    g1 = simulate_hop(scenario.hop1, run, stream=_LINK_STREAM_HOP1)
    g2 = simulate_hop(scenario.hop2, run, stream=_LINK_STREAM_HOP2)
    return equivalent_snr(g1, g2, scenario.combiner)


def empirical_cdf(samples, grid) -> np.ndarray:
    """Fraction of samples <= each grid point (grid must be sorted)."""
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise ValueError("samples must be nonempty")
    points = np.asarray(grid, dtype=float)
    if points.size > 1 and np.any(np.diff(points) < 0):
        raise ValueError("grid must be sorted ascending")
    return np.searchsorted(np.sort(values), points, side="right") / values.size


def mc_ser(mod: PskModulation, eq_samples) -> tuple[float, float]:
    """Semi-analytic SER estimate: (mean conditional SEP, 95% halfwidth)."""
    samples = np.asarray(eq_samples, dtype=float)
    if samples.size == 0:
        raise ValueError("eq_samples must be nonempty")
    sep = conditional_sep(mod, samples)
    estimate = float(sep.mean())
    if samples.size < 2:
        return estimate, 0.0
    halfwidth = 1.96 * float(sep.std(ddof=1)) / math.sqrt(samples.size)
    return estimate, halfwidth


def sweep_eq_samples(scenario: LinkScenario, hop2_mean_db_grid,
                     hop1_mean_db: float, run: McRun):
    """Yield (hop2_db, equivalent-SNR samples) per sweep point, drawing each hop once.

    The effective hop SNR scales linearly with the per-branch mean for
    every scheme (sums and maxima are 1-homogeneous), so the hop-2 draw at
    unit mean is rescaled per point instead of resampled.  Points share a
    common random base, which removes sampling jitter between them.
    """
    hop1 = replace(scenario.hop1, mean_branch_snr=10.0 ** (hop1_mean_db / 10.0))
    g1 = simulate_hop(hop1, run, stream=_LINK_STREAM_HOP1)
    base2 = simulate_hop(replace(scenario.hop2, mean_branch_snr=1.0), run,
                         stream=_LINK_STREAM_HOP2)
    for db in np.asarray(hop2_mean_db_grid, dtype=float):
        scale = 10.0 ** (db / 10.0)
        yield float(db), equivalent_snr(g1, base2 * scale, scenario.combiner)
