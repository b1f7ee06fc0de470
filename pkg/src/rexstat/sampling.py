"""Reproducible random generation for the low-rank Gaussian model.

The model: a d x p loading matrix L with unit columns defines a correlation
matrix Sigma = L^T L of rank d; observations are rows X_i = Z_i^T L with
Z_i ~ N(0, I_d), so every marginal X_ij is standard normal and
max_j |X_ij| = ||Z_i||_2 * max_j |l_j^T U_i| with U_i = Z_i / ||Z_i||_2.

Streams are counter-based: a (seed, stream_id) pair keys a Philox generator,
so parallel replicates reproduce bit-identically regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, EmptyInputError, ParseError

__all__ = [
    "RngStream",
    "LowRankModel",
    "SampleMatrix",
    "NoiseSpec",
    "sample_sphere",
    "build_uniform_model",
    "sample_observations",
    "add_noise",
    "sample_iid_extremes",
]

_MIN_NORM = 1e-100
_CHUNK_ELEMENTS = 1 << 22  # fixed so chunked generation is reproducible


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream_id) pair naming one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def sample_sphere(d: int, rng) -> np.ndarray:
    """One draw from the uniform distribution on the unit sphere S^(d-1)."""
    if d < 1:
        raise DomainError(f"requires d >= 1, got {d}")
    gen = _as_generator(rng)
    while True:
        v = gen.standard_normal(d)
        norm = float(np.linalg.norm(v))
        if norm >= _MIN_NORM:
            return v / norm


@dataclass(frozen=True)
class LowRankModel:
    """Loading matrix L (d x p, unit columns) defining Sigma = L^T L."""

    p: int
    d: int
    loadings: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.loadings, dtype=float)
        if arr.shape != (self.d, self.p):
            raise DomainError(
                f"loadings shape {arr.shape} does not match (d, p) = ({self.d}, {self.p})"
            )
        norms = np.linalg.norm(arr, axis=0)
        if not np.all(np.abs(norms - 1.0) <= 1e-10):
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise DomainError(
                f"column {worst} has norm {norms[worst]!r}; all columns must be unit"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "loadings", arr)


def build_uniform_model(p: int, d: int, rng) -> LowRankModel:
    """Model with columns drawn i.i.d. uniformly on S^(d-1)."""
    if p < 1 or d < 1:
        raise DomainError(f"requires p >= 1 and d >= 1, got p={p}, d={d}")
    gen = _as_generator(rng)
    cols = gen.standard_normal((d, p))
    norms = np.linalg.norm(cols, axis=0)
    while True:
        bad = norms < _MIN_NORM
        if not bad.any():
            break
        cols[:, bad] = gen.standard_normal((d, int(bad.sum())))
        norms = np.linalg.norm(cols, axis=0)
    return LowRankModel(p=p, d=d, loadings=cols / norms)


@dataclass(frozen=True)
class SampleMatrix:
    """n observations of p variables with cached per-row extremes
    extremes[i] = max_j |values[i, j]|."""

    values: np.ndarray
    extremes: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_values(cls, values) -> "SampleMatrix":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise EmptyInputError(f"need a nonempty 2-D array, got shape {arr.shape}")
        extremes = np.abs(arr).max(axis=1)
        arr.setflags(write=False)
        extremes.setflags(write=False)
        return cls(values=arr, extremes=extremes)

    def save_csv(self, path, header: bool = True) -> None:
        """One observation per line, %.17g so values round-trip exactly."""
        head = ",".join(f"x{j + 1}" for j in range(self.p)) if header else ""
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g", header=head, comments="")

    @classmethod
    def load_csv(cls, path) -> "SampleMatrix":
        text = Path(path).read_text()
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise EmptyInputError(f"{path}: no data rows")
        first = lines[0].split(",")
        has_header = False
        try:
            float(first[0])
        except ValueError:
            has_header = True
        rows = []
        width = None
        for i, line in enumerate(lines, start=1):
            if has_header and i == 1:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(i, f"expected {width} fields, found {len(fields)}")
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise ParseError(i, str(exc)) from None
        if not rows:
            raise EmptyInputError(f"{path}: no data rows")
        return cls.from_values(np.array(rows, dtype=float))


@dataclass(frozen=True)
class NoiseSpec:
    """Per-variable noise standard deviations, or one scalar broadcast."""

    sigmas: object

    def as_vector(self, p: int) -> np.ndarray:
        arr = np.asarray(self.sigmas, dtype=float)
        if arr.ndim == 0:
            arr = np.full(p, float(arr))
        if arr.shape != (p,):
            raise DomainError(f"noise vector has shape {arr.shape}, expected ({p},)")
        if not np.all(arr >= 0.0):
            raise DomainError("noise standard deviations must be nonnegative")
        return arr

    @property
    def sigma_max(self) -> float:
        arr = np.atleast_1d(np.asarray(self.sigmas, dtype=float))
        if not np.all(arr >= 0.0):
            raise DomainError("noise standard deviations must be nonnegative")
        return float(arr.max())


def sample_observations(model: LowRankModel, n: int, rng, return_latent: bool = False):
    """n rows X_i = Z_i^T L; extremes are populated on construction.

    With return_latent=True also returns the n x d matrix of latent Z draws,
    for checks of the factorization ||X_i||_inf = ||Z_i||_2 max_j |l_j^T U_i|.
    """
    if n < 1:
        raise DomainError(f"requires n >= 1, got {n}")
    gen = _as_generator(rng)
    latent = gen.standard_normal((n, model.d))
    samples = SampleMatrix.from_values(latent @ model.loadings)
    if return_latent:
        return samples, latent
    return samples


def add_noise(samples: SampleMatrix, noise: NoiseSpec, rng) -> SampleMatrix:
    """Y = X + eps with independent eps_ij ~ N(0, sigma_j^2); extremes are
    recomputed on Y. Noise applies to the observed X, never to the latent Z.
    """
    gen = _as_generator(rng)
    sig = noise.as_vector(samples.p)
    eps = gen.standard_normal(samples.values.shape) * sig
    return SampleMatrix.from_values(samples.values + eps)


def sample_iid_extremes(p: int, n: int, rng) -> np.ndarray:
    """n draws of max_j |G_j| over p i.i.d. standard normals, computed in
    column chunks so the p x n matrix is never materialized."""
    if p < 1 or n < 1:
        raise DomainError(f"requires p >= 1 and n >= 1, got p={p}, n={n}")
    gen = _as_generator(rng)
    out = np.zeros(n)
    chunk = max(1, _CHUNK_ELEMENTS // n)
    done = 0
    while done < p:
        width = min(chunk, p - done)
        block = np.abs(gen.standard_normal((n, width))).max(axis=1)
        np.maximum(out, block, out=out)
        done += width
    return out
