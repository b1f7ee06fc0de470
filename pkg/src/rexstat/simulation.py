"""Seeded Monte Carlo harness for the empirical studies.

Three studies: the trichotomy of single-observation extremes across ranks
(density comparison), the separation of mean extremes across ranks at
moderate n, and the coverage of the rank confidence intervals on a
(p, d) grid with n = round(0.8 d).

Replicates are embarrassingly parallel: replicate r of cell c uses the
stream (seed, c * 2^32 + r), and aggregation is index-ordered, so results
are bit-identical for any worker count. REX_THREADS caps the pool.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import DegenerateSampleError, DomainError, EmptyInputError
from .inference import rex_confidence_interval
from .sampling import RngStream, build_uniform_model, sample_iid_extremes, sample_observations

__all__ = [
    "THREADS_ENV",
    "DensityEstimate",
    "TrichotomyConfig",
    "TrichotomyRankResult",
    "TrichotomyResult",
    "MeanSeparationRankResult",
    "MeanSeparationResult",
    "CoverageConfig",
    "CoverageRow",
    "CoverageTable",
    "kde",
    "run_trichotomy",
    "run_mean_separation",
    "run_coverage",
    "worker_count",
]

THREADS_ENV = "REX_THREADS"
_STREAM_BLOCK = 1 << 32  # replicates per cell never collide across cells
_KDE_CHUNK = 4096


def worker_count() -> int:
    """Worker cap from REX_THREADS, defaulting to the hardware count."""
    raw = os.environ.get(THREADS_ENV)
    if raw is not None:
        try:
            value = int(raw)
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if value < 1:
            raise DomainError(f"{THREADS_ENV} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _replicate_map(fn, reps: int, workers: int | None = None) -> list:
    """fn(replicate_index) for each replicate, results in index order."""
    w = worker_count() if workers is None else workers
    if w <= 1 or reps < 2:
        return [fn(r) for r in range(reps)]
    with ThreadPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, range(reps)))


@dataclass(frozen=True)
class DensityEstimate:
    """Gaussian-kernel density on an explicit grid."""

    grid: np.ndarray
    values: np.ndarray
    bandwidth: float


def _nrd0_bandwidth(arr: np.ndarray) -> float:
    # R's bw.nrd0: 0.9 min(sd, IQR/1.34) n^(-1/5), with its zero fallbacks
    n = arr.size
    sd = float(arr.std(ddof=1))
    q75, q25 = np.percentile(arr, [75.0, 25.0])
    spread = min(sd, (q75 - q25) / 1.34)
    if spread == 0.0:
        spread = sd if sd > 0.0 else (abs(float(arr[0])) or 1.0)
    return 0.9 * spread * n ** (-0.2)


def kde(samples, grid_size: int = 512) -> DensityEstimate:
    """Kernel density estimate with the nrd0 rule-of-thumb bandwidth.

    Grid spans [min - 3h, max + 3h]; needs at least two distinct samples.
    """
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size < 2:
        raise EmptyInputError(f"need at least 2 samples, got {arr.size}")
    if grid_size < 2:
        raise DomainError(f"requires grid_size >= 2, got {grid_size}")
    if np.all(arr == arr[0]):
        raise DegenerateSampleError("all sample values are equal")
    h = _nrd0_bandwidth(arr)
    lo = float(arr.min()) - 3.0 * h
    hi = float(arr.max()) + 3.0 * h
    grid = np.linspace(lo, hi, grid_size)
    values = np.zeros(grid_size)
    for start in range(0, arr.size, _KDE_CHUNK):
        chunk = arr[start : start + _KDE_CHUNK]
        z = (grid[:, None] - chunk[None, :]) / h
        values += np.exp(-0.5 * z * z).sum(axis=1)
    values /= arr.size * h * math.sqrt(2.0 * math.pi)
    return DensityEstimate(grid=grid, values=values, bandwidth=h)


@dataclass(frozen=True)
class TrichotomyConfig:
    """Design of the extreme-value studies at one p.

    ranks must include the i.i.d. sentinel d = p (drawn as p independent
    standard normals rather than through a loading matrix). reps replicates
    per rank, fresh loadings per replicate; n_for_means observations per
    replicate in the mean study.
    """

    p: int = 3000
    ranks: tuple = (3, 10, 100, 300, 3000)
    reps: int = 5000
    n_for_means: int = 30
    seed: int = 0

    def __post_init__(self) -> None:
        if self.p < 3:
            raise DomainError(f"requires p >= 3, got {self.p}")
        if not self.ranks:
            raise DomainError("ranks must be nonempty")
        if any(d < 1 for d in self.ranks):
            raise DomainError(f"ranks must be >= 1, got {self.ranks}")
        if self.p not in self.ranks:
            raise DomainError(
                f"ranks must include the i.i.d. sentinel d = p = {self.p}"
            )
        if self.reps < 1:
            raise DomainError(f"requires reps >= 1, got {self.reps}")


@dataclass(frozen=True)
class TrichotomyRankResult:
    rank: int
    iid: bool
    extremes: np.ndarray
    density: DensityEstimate
    below_threshold_fraction: float
    mean: float


@dataclass(frozen=True)
class TrichotomyResult:
    config: TrichotomyConfig
    threshold: float
    per_rank: tuple
    metadata: dict = field(default_factory=dict)

    def rank_result(self, d: int) -> TrichotomyRankResult:
        for rr in self.per_rank:
            if rr.rank == d:
                return rr
        raise KeyError(f"rank {d} not in this run")

    def export_extremes_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("rank,replicate,k_value\n")
            for rr in self.per_rank:
                for i, k in enumerate(rr.extremes.tolist()):
                    fh.write(f"{rr.rank},{i},{k!r}\n")

    def export_density_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("rank,grid,density\n")
            for rr in self.per_rank:
                for x, v in zip(rr.density.grid.tolist(), rr.density.values.tolist()):
                    fh.write(f"{rr.rank},{x!r},{v!r}\n")


def _single_extreme(p: int, d: int, stream: RngStream) -> float:
    gen = stream.generator()
    if d == p:
        return float(sample_iid_extremes(p, 1, gen)[0])
    model = build_uniform_model(p, d, gen)
    return float(sample_observations(model, 1, gen).extremes[0])


def _mean_extreme(p: int, d: int, n: int, stream: RngStream) -> float:
    gen = stream.generator()
    if d == p:
        return float(sample_iid_extremes(p, n, gen).mean())
    model = build_uniform_model(p, d, gen)
    return float(sample_observations(model, n, gen).extremes.mean())


def _run_metadata(config) -> dict:
    return {
        "loadings": "fresh per replicate",
        "seed": config.seed,
        "stream_block": _STREAM_BLOCK,
    }


def run_trichotomy(config: TrichotomyConfig, workers: int | None = None) -> TrichotomyResult:
    """Single-observation extremes for each rank, with density estimates
    and the fraction falling below the sqrt(ln p) threshold."""
    p = config.p
    threshold = math.sqrt(math.log(p))
    per_rank = []
    for cell, d in enumerate(config.ranks):
        base = cell * _STREAM_BLOCK

        def one(r: int, d=d, base=base) -> float:
            return _single_extreme(p, d, RngStream(config.seed, base + r))

        extremes = np.array(_replicate_map(one, config.reps, workers))
        extremes.setflags(write=False)
        per_rank.append(
            TrichotomyRankResult(
                rank=d,
                iid=(d == p),
                extremes=extremes,
                density=kde(extremes),
                below_threshold_fraction=float((extremes < threshold).mean()),
                mean=float(extremes.mean()),
            )
        )
    return TrichotomyResult(
        config=config,
        threshold=threshold,
        per_rank=tuple(per_rank),
        metadata=_run_metadata(config),
    )


@dataclass(frozen=True)
class MeanSeparationRankResult:
    rank: int
    iid: bool
    means: np.ndarray
    below_threshold_fraction: float


@dataclass(frozen=True)
class MeanSeparationResult:
    config: TrichotomyConfig
    threshold: float
    per_rank: tuple
    metadata: dict = field(default_factory=dict)

    def rank_result(self, d: int) -> MeanSeparationRankResult:
        for rr in self.per_rank:
            if rr.rank == d:
                return rr
        raise KeyError(f"rank {d} not in this run")


def run_mean_separation(
    config: TrichotomyConfig, workers: int | None = None
) -> MeanSeparationResult:
    """Distribution of the mean extreme K-bar over n_for_means observations,
    one fresh model per replicate; reports threshold separation per rank.

    With n_for_means = 1 the means reduce to the single-observation extremes
    of run_trichotomy, stream for stream."""
    if config.n_for_means < 1:
        raise DomainError(f"requires n_for_means >= 1, got {config.n_for_means}")
    p = config.p
    threshold = math.sqrt(math.log(p))
    per_rank = []
    for cell, d in enumerate(config.ranks):
        base = cell * _STREAM_BLOCK

        def one(r: int, d=d, base=base) -> float:
            return _mean_extreme(p, d, config.n_for_means, RngStream(config.seed, base + r))

        means = np.array(_replicate_map(one, config.reps, workers))
        means.setflags(write=False)
        per_rank.append(
            MeanSeparationRankResult(
                rank=d,
                iid=(d == p),
                means=means,
                below_threshold_fraction=float((means < threshold).mean()),
            )
        )
    return MeanSeparationResult(
        config=config,
        threshold=threshold,
        per_rank=tuple(per_rank),
        metadata=_run_metadata(config),
    )


@dataclass(frozen=True)
class CoverageConfig:
    """Grid design for the confidence-interval coverage study."""

    p_values: tuple = (3000,)
    d_values: tuple = (5, 6, 7, 8, 9, 10, 11, 12)
    alpha: float = 0.05
    reps: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.p_values or not self.d_values:
            raise DomainError("p_values and d_values must be nonempty")
        if any(p < 2 for p in self.p_values):
            raise DomainError(f"requires p >= 2, got {self.p_values}")
        if any(d < 1 for d in self.d_values):
            raise DomainError(f"requires d >= 1, got {self.d_values}")
        if self.reps < 1:
            raise DomainError(f"requires reps >= 1, got {self.reps}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"requires alpha in (0, 1), got {self.alpha}")

    @staticmethod
    def n_for_rank(d: int) -> int:
        return int(round(0.8 * d))


@dataclass(frozen=True)
class CoverageRow:
    p: int
    d: int
    n: int
    alpha: float
    reps: int
    coverage: float
    mc_stderr: float
    coverage_int: float  # with the conservatively rounded integer endpoints


@dataclass(frozen=True)
class CoverageTable:
    rows: tuple
    metadata: dict = field(default_factory=dict)

    def row(self, p: int, d: int) -> CoverageRow:
        for r in self.rows:
            if r.p == p and r.d == d:
                return r
        raise KeyError(f"cell (p={p}, d={d}) not in this table")

    def export_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("p,d,n,alpha,reps,coverage,mc_stderr\n")
            for r in self.rows:
                fh.write(
                    f"{r.p},{r.d},{r.n},{r.alpha!r},{r.reps},"
                    f"{r.coverage!r},{r.mc_stderr!r}\n"
                )


def _coverage_cell(p: int, d: int, n: int, alpha: float, stream: RngStream):
    gen = stream.generator()
    model = build_uniform_model(p, d, gen)
    samples = sample_observations(model, n, gen)
    ci = rex_confidence_interval(samples.extremes, p, alpha)
    return ci.covers(d), (ci.d_l_int <= d <= ci.d_u_int)


def run_coverage(config: CoverageConfig, workers: int | None = None) -> CoverageTable:
    """Coverage of the rank CI per (p, d) cell at n = round(0.8 d).

    Coverage counts the real-valued interval [d_l, d_u] (the endpoint
    equations are solved over real d); the integer-endpoint coverage is
    reported alongside.
    """
    rows = []
    for cell, (p, d) in enumerate(product(config.p_values, config.d_values)):
        n = config.n_for_rank(d)
        if n < 1:
            n = 1
        base = cell * _STREAM_BLOCK

        def one(r: int, p=p, d=d, n=n, base=base):
            return _coverage_cell(p, d, n, config.alpha, RngStream(config.seed, base + r))

        hits = _replicate_map(one, config.reps, workers)
        coverage = sum(h[0] for h in hits) / config.reps
        coverage_int = sum(h[1] for h in hits) / config.reps
        rows.append(
            CoverageRow(
                p=p,
                d=d,
                n=n,
                alpha=config.alpha,
                reps=config.reps,
                coverage=coverage,
                mc_stderr=math.sqrt(coverage * (1.0 - coverage) / config.reps),
                coverage_int=coverage_int,
            )
        )
    return CoverageTable(rows=tuple(rows), metadata=_run_metadata(config))
