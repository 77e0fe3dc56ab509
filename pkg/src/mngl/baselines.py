"""Pipeline baselines: k-means state splitting, then a per-state solver.

These deliberately decouple state assignment from network estimation, so
they serve as the comparison point for the joint mixture fit. The k-means
here is the seeded kmeans++ variant with restarts (unlike the
deterministic variant used only for indicator initialization).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cgl import CglSolution, cgl_solve
from .core import as_array, empirical_covariance
from .errors import PipelineError
from .onmtf import OnmtfSolution, onmtf_solve
from .types import DataMatrix, SolverSettings

_N_RESTARTS = 10


def _kmeanspp_centers(pts: np.ndarray, m: int, rng: np.random.Generator
                      ) -> np.ndarray:
    n = pts.shape[0]
    centers = np.empty((m, pts.shape[1]))
    centers[0] = pts[rng.integers(n)]
    d2 = np.einsum("ij,ij->i", pts - centers[0], pts - centers[0])
    for c in range(1, m):
        total = d2.sum()
        if total <= 0:
            centers[c] = pts[rng.integers(n)]
            continue
        idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total))
        centers[c] = pts[min(idx, n - 1)]
        d2 = np.minimum(d2, np.einsum("ij,ij->i", pts - centers[c],
                                      pts - centers[c]))
    return centers


def _lloyd(pts: np.ndarray, centers: np.ndarray, max_iter: int = 300
           ) -> tuple[np.ndarray, float]:
    n, m = pts.shape[0], centers.shape[0]
    sq = np.einsum("ij,ij->i", pts, pts)
    labels = np.full(n, -1)
    for _ in range(max_iter):
        dist = (sq[:, None]
                + np.einsum("ij,ij->i", centers, centers)[None, :]
                - 2.0 * (pts @ centers.T))
        new_labels = np.argmin(dist, axis=1)
        for c in range(m):
            members = new_labels == c
            if np.any(members):
                centers[c] = pts[members].mean(axis=0)
            else:
                # re-seed an empty cluster at the point farthest from its
                # current center, then reassign
                farthest = int(np.argmax(np.min(dist, axis=1)))
                centers[c] = pts[farthest]
                new_labels[farthest] = c
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    dist = (sq[:, None]
            + np.einsum("ij,ij->i", centers, centers)[None, :]
            - 2.0 * (pts @ centers.T))
    labels = np.argmin(dist, axis=1)
    inertia = float(np.min(dist, axis=1).sum())
    return labels, inertia


def kmeans(points, m: int, seed: int) -> np.ndarray:
    """Hard labels from Lloyd's iterations with kmeans++ seeding.

    Runs 10 restarts and keeps the lowest-inertia labeling; fully
    deterministic for a fixed seed.
    """
    pts = as_array(points)
    n = pts.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if m == 1:
        return np.zeros(n, dtype=int)
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(_N_RESTARTS):
        centers = _kmeanspp_centers(pts, m, rng)
        labels, inertia = _lloyd(pts, centers)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return np.asarray(best_labels, dtype=int)


@dataclass(frozen=True)
class PipelineResult:
    """State labels from k-means plus one per-state solver solution."""

    assignment: np.ndarray
    per_state: tuple[CglSolution | OnmtfSolution, ...]

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=int)
        m = len(self.per_state)
        if a.size and (a.min() < 0 or a.max() >= m):
            raise ValueError("labels outside [0, m)")
        counts = np.bincount(a, minlength=m)
        if np.any(counts == 0):
            raise ValueError("every state must be non-empty")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "per_state", tuple(self.per_state))

    @property
    def m(self) -> int:
        return len(self.per_state)


def _split_states(X: DataMatrix, m: int, k: int, settings: SolverSettings
                  ) -> tuple[np.ndarray, list[np.ndarray]]:
    labels = kmeans(X.values, m, settings.seed)
    subsets = []
    for j in range(m):
        sub = X.values[labels == j]
        if sub.shape[0] < k:
            raise PipelineError(
                f"state {j} has {sub.shape[0]} observations, fewer than k={k}"
            )
        subsets.append(sub)
    return labels, subsets


def pipeline_cgl(X: DataMatrix, m: int, k: int,
                 settings: SolverSettings) -> PipelineResult:
    """k-means over observations, then an independent joint solve per state."""
    labels, subsets = _split_states(X, m, k, settings)
    sols = tuple(
        cgl_solve(sub / np.sqrt(sub.shape[0]), k, settings) for sub in subsets
    )
    return PipelineResult(assignment=labels, per_state=sols)


def pipeline_onmtf(X: DataMatrix, m: int, k: int,
                   settings: SolverSettings) -> PipelineResult:
    """k-means over observations, then a tri-factorization per state."""
    labels, subsets = _split_states(X, m, k, settings)
    sols = tuple(
        onmtf_solve(empirical_covariance(sub), k, settings) for sub in subsets
    )
    return PipelineResult(assignment=labels, per_state=sols)
