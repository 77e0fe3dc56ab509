"""Ground-truth mixture-network generator and benchmark scenario sweeps.

Each latent state is a block-diagonal-structured precision matrix over p
variables: blocks (the true nodes) differ across states by perturbed
boundaries, within-block entries are dense (0.8) and cross-block entries
sparse (0.05), with magnitudes uniform in [0.2, 0.6] and random sign. The
matrix is symmetrized and shifted by (|min eigenvalue| + 0.1) I, so every
state is positive definite with minimum eigenvalue at least 0.1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import GenerationError
from .glasso import matrix_edges
from .types import ClusterIndicator, DataMatrix

WITHIN_BLOCK_DENSITY = 0.8
CROSS_BLOCK_DENSITY = 0.05
ENTRY_RANGE = (0.2, 0.6)
PD_MARGIN = 0.1
TRUTH_EDGE_THRESHOLD = 1e-8
_MAX_DRAW_ATTEMPTS = 100


@dataclass(frozen=True)
class GroundTruth:
    """True per-state precisions, block indicators, and mixing weights."""

    thetas: tuple[np.ndarray, ...]
    Hs: tuple[ClusterIndicator, ...]
    node_boundaries: tuple[tuple[int, ...], ...]  # block sizes per state
    phi: np.ndarray
    seed: int

    def __post_init__(self):
        thetas = tuple(np.asarray(t, dtype=float) for t in self.thetas)
        for t in thetas:
            t.setflags(write=False)
        phi = np.asarray(self.phi, dtype=float)
        phi.setflags(write=False)
        if abs(phi.sum() - 1.0) > 1e-9:
            raise ValueError("mixing weights must sum to 1")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "Hs", tuple(self.Hs))
        object.__setattr__(
            self, "node_boundaries",
            tuple(tuple(int(s) for s in b) for b in self.node_boundaries),
        )
        object.__setattr__(self, "phi", phi)

    @property
    def m(self) -> int:
        return len(self.thetas)

    @property
    def p(self) -> int:
        return self.thetas[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.node_boundaries[0])

    def block_labels(self, j: int) -> np.ndarray:
        """Per-variable true node label under state j."""
        return np.repeat(np.arange(self.k), self.node_boundaries[j])

    def node_precision(self, j: int) -> np.ndarray:
        """Node-level precision H_j^T Theta_j H_j."""
        H = self.Hs[j].values
        out = H.T @ self.thetas[j] @ H
        return 0.5 * (out + out.T)

    def node_edges(self, j: int) -> set[tuple[int, int]]:
        """True node-level edge set of state j."""
        return matrix_edges(self.node_precision(j), TRUTH_EDGE_THRESHOLD)

    def covariance(self, j: int) -> np.ndarray:
        cov = np.linalg.inv(self.thetas[j])
        return 0.5 * (cov + cov.T)


def _block_sizes(p: int, k: int, rng: np.random.Generator,
                 taken: set[tuple[int, ...]]) -> tuple[int, ...]:
    """Jitter the equal-split block boundaries into a fresh parcellation."""
    if k == 1:
        return (p,)
    base = np.round(np.arange(1, k) * p / k).astype(int)
    jitter = max(1, p // (4 * k))
    for _ in range(_MAX_DRAW_ATTEMPTS):
        cuts = base + rng.integers(-jitter, jitter + 1, size=k - 1)
        cuts = np.clip(np.sort(cuts), 1, p - 1)
        if len(set(cuts)) != k - 1:
            continue
        sizes = tuple(int(s) for s in np.diff(np.concatenate(([0], cuts, [p]))))
        if min(sizes) < 1:
            continue
        if sizes not in taken:
            return sizes
    raise GenerationError(
        f"could not draw distinct block sizes for p={p}, k={k}"
    )


def _fill_theta(sizes: tuple[int, ...], rng: np.random.Generator
                ) -> np.ndarray:
    p = sum(sizes)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    iu, ju = np.triu_indices(p, k=1)
    density = np.where(labels[iu] == labels[ju],
                       WITHIN_BLOCK_DENSITY, CROSS_BLOCK_DENSITY)
    mask = rng.random(iu.size) < density
    mags = rng.uniform(*ENTRY_RANGE, size=iu.size)
    signs = np.where(rng.random(iu.size) < 0.5, -1.0, 1.0)
    vals = np.where(mask, mags * signs, 0.0)
    A = np.zeros((p, p))
    A[iu, ju] = vals
    A[ju, iu] = vals
    eigmin = float(np.linalg.eigvalsh(A)[0])
    return A + (abs(eigmin) + PD_MARGIN) * np.eye(p)


def generate_truth(p: int, k: int, m: int, seed: int) -> GroundTruth:
    """Draw m latent network states over p variables with k nodes each.

    Block boundaries are guaranteed distinct across states (for k >= 2),
    and every state's node-level edge set is non-empty (for k >= 2) by
    redrawing the sparsity pattern when a draw comes out empty.
    """
    if p < 2 * k:
        raise GenerationError(f"need p >= 2k, got p={p}, k={k}")
    if m < 1:
        raise GenerationError("m must be at least 1")
    rng = np.random.default_rng(seed)
    taken: set[tuple[int, ...]] = set()
    thetas, Hs, boundaries = [], [], []
    for _ in range(m):
        sizes = _block_sizes(p, k, rng, taken)
        if k >= 2:
            taken.add(sizes)
        for _ in range(_MAX_DRAW_ATTEMPTS):
            theta = _fill_theta(sizes, rng)
            labels = np.repeat(np.arange(k), sizes)
            H = np.zeros((p, k))
            H[np.arange(p), labels] = 1.0
            if k < 2 or matrix_edges(H.T @ theta @ H, TRUTH_EDGE_THRESHOLD):
                break
        else:
            raise GenerationError("could not draw a non-empty node edge set")
        thetas.append(theta)
        Hs.append(ClusterIndicator(H))
        boundaries.append(sizes)
    return GroundTruth(
        thetas=tuple(thetas), Hs=tuple(Hs),
        node_boundaries=tuple(boundaries),
        phi=np.full(m, 1.0 / m), seed=seed,
    )


def sample(truth: GroundTruth, n: int, sigma: float, seed: int
           ) -> tuple[DataMatrix, np.ndarray]:
    """Draw n observations from the mixture, plus their true state labels.

    Each observation picks a state from the mixing weights, draws from the
    state's zero-mean Gaussian via a Cholesky factor of its covariance,
    then adds isotropic N(0, sigma^2) noise.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    rng = np.random.default_rng(seed)
    labels = rng.choice(truth.m, size=n, p=truth.phi)
    chols = [np.linalg.cholesky(truth.covariance(j)) for j in range(truth.m)]
    Z = rng.standard_normal((n, truth.p))
    X = np.empty((n, truth.p))
    for j in range(truth.m):
        members = labels == j
        X[members] = Z[members] @ chols[j].T
    if sigma > 0:
        X += sigma * rng.standard_normal((n, truth.p))
    return DataMatrix(X), labels


_SCENARIO_SWEPT = {"S1": "n", "S2": "sigma", "S3": "p", "S4": "k"}
DEFAULT_SWEEPS = {
    "S1": (200, 500, 1000, 1500, 2000),
    "S2": (2.0, 3.0, 4.0, 5.0),
    "S3": (70, 140, 210, 280, 350),
    "S4": (3, 5, 7, 9, 11),
}


@dataclass(frozen=True)
class ScenarioSpec:
    """One controlled sweep: vary exactly one of n, sigma, p, k."""

    id: str
    n: int = 2000
    p: int = 70
    k: int = 5
    m: int = 2
    sigma: float = 0.0
    sweep: tuple = ()
    repeats: int = 10

    def __post_init__(self):
        if self.id not in _SCENARIO_SWEPT:
            raise ValueError(f"unknown scenario {self.id!r}")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        sweep = tuple(self.sweep) if self.sweep else DEFAULT_SWEEPS[self.id]
        if any(v <= 0 for v in sweep):
            raise ValueError("swept values must be positive")
        object.__setattr__(self, "sweep", sweep)

    @property
    def swept_parameter(self) -> str:
        return _SCENARIO_SWEPT[self.id]

    def instance_params(self, value) -> dict:
        params = {"n": self.n, "p": self.p, "k": self.k,
                  "m": self.m, "sigma": self.sigma}
        if self.swept_parameter in ("n", "p", "k"):
            params[self.swept_parameter] = int(value)
        else:
            params[self.swept_parameter] = float(value)
        return params


def _derived_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence((seed,) + key).generate_state(1)[0])


def scenario_instances(spec: ScenarioSpec, seed: int = 0
                       ) -> Iterator[tuple[GroundTruth, DataMatrix, np.ndarray]]:
    """Yield repeats x |sweep| instances with per-instance derived seeds.

    Ordering is sweep-major: all repeats of the first swept value, then the
    next, and so on; two iterations with the same spec and seed produce
    identical streams.
    """
    for si, value in enumerate(spec.sweep):
        params = spec.instance_params(value)
        for rep in range(spec.repeats):
            truth = generate_truth(
                params["p"], params["k"], params["m"],
                seed=_derived_seed(seed, si, rep, 0),
            )
            X, labels = sample(
                truth, params["n"], params["sigma"],
                seed=_derived_seed(seed, si, rep, 1),
            )
            yield truth, X, labels
