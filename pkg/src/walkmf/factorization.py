"""Low-rank factorization of target matrices into node/context embeddings.

Truncated SVD with the singular values split evenly across both factors is
the canonical choice here: the rank-d product W H^T is then the best rank-d
Frobenius approximation of the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .targets import TargetMatrix

SPLITS = ("symmetric", "left")


class FactorizationError(ValueError):
    """Input not factorizable or the solver failed to converge."""


@dataclass(frozen=True, eq=False)
class EmbeddingPair:
    """Node matrix w (one row per node) and context matrix h, with w @ h.T
    approximating the target."""

    w: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        if self.w.ndim != 2 or self.h.ndim != 2 or self.w.shape[1] != self.h.shape[1]:
            raise ValueError(f"embedding shapes disagree: {self.w.shape} vs {self.h.shape}")
        if not (np.all(np.isfinite(self.w)) and np.all(np.isfinite(self.h))):
            raise ValueError("embeddings must be finite")

    @property
    def dim(self) -> int:
        return self.w.shape[1]


def _as_array(m) -> np.ndarray:
    values = m.values if isinstance(m, TargetMatrix) else m
    return np.asarray(values, dtype=float)


def _fix_signs(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Deterministic output: leading non-negligible entry of each left singular
    # vector is made positive; the paired right vector flips with it.
    for col in range(u.shape[1]):
        column = u[:, col]
        cutoff = 1e-12 * max(np.abs(column).max(), 1e-300)
        idx = np.argmax(np.abs(column) > cutoff)
        if column[idx] < 0:
            u[:, col] = -column
            vt[col, :] = -vt[col, :]
    return u, vt


def truncated_svd(m, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-d singular triplets (u, s, v) of a finite matrix, s descending.

    Columns of u and v are orthonormal; signs are fixed so repeated calls
    give identical output.
    """
    mat = _as_array(m)
    if mat.ndim != 2:
        raise FactorizationError(f"expected a 2-d matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise FactorizationError(
            "matrix has non-finite entries; apply a zero policy (floor or truncate) "
            "before factorizing"
        )
    limit = min(mat.shape)
    if not (1 <= d <= limit):
        raise FactorizationError(f"rank d must be in 1..{limit}, got {d}")
    try:
        u, s, vt = np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"SVD did not converge: {exc}") from exc
    u, vt = _fix_signs(u, vt)
    return u[:, :d], s[:d], vt[:d, :].T


def factorize(m, d: int, split: str = "symmetric") -> EmbeddingPair:
    """Rank-d embeddings from the SVD: symmetric split puts sqrt(s) in both
    factors, 'left' puts all of s into the node matrix."""
    if split not in SPLITS:
        raise ValueError(f"split must be one of {SPLITS}, got {split!r}")
    u, s, v = truncated_svd(m, d)
    if split == "symmetric":
        scale = np.sqrt(s)
        return EmbeddingPair(w=u * scale, h=v * scale)
    return EmbeddingPair(w=u * s, h=v)


def reconstruction_error(m, pair: EmbeddingPair) -> float:
    """Frobenius norm of (target - w h^T)."""
    mat = _as_array(m)
    approx = pair.w @ pair.h.T
    if approx.shape != mat.shape:
        raise ValueError(f"shape mismatch: target {mat.shape}, product {approx.shape}")
    return float(np.linalg.norm(mat - approx))


def singular_values(m) -> np.ndarray:
    """Full singular spectrum (used for tail-energy reports)."""
    mat = _as_array(m)
    if not np.all(np.isfinite(mat)):
        raise FactorizationError(
            "matrix has non-finite entries; apply a zero policy (floor or truncate) first"
        )
    return np.linalg.svd(mat, compute_uv=False)


def write_embedding_matrix(mat: np.ndarray, path) -> None:
    """word2vec text format: header 'n d', then one 'id x1 ... xd' line per row."""
    mat = np.asarray(mat, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{mat.shape[0]} {mat.shape[1]}\n")
        for i, row in enumerate(mat):
            coords = " ".join("%.17g" % x for x in row)
            fh.write(f"{i} {coords}\n")


def read_embedding_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        n, d = int(header[0]), int(header[1])
        mat = np.zeros((n, d))
        filled = np.zeros(n, dtype=bool)
        for line in fh:
            parts = line.split()
            idx = int(parts[0])
            mat[idx] = [float(x) for x in parts[1:]]
            filled[idx] = True
    if not filled.all():
        raise ValueError("embedding file is missing rows")
    return mat
