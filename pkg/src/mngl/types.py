"""Core value types shared by every solver.

All types are immutable after construction: array fields are copied,
validated, and marked read-only, so instances are safe to share across
threads and processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DefinitenessError, ShapeError

PHI_SUM_TOL = 1e-9
ROW_SUM_TOL = 1e-9
SYMMETRY_TOL = 1e-12


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DataMatrix:
    """Raw observations: n rows (samples) by p columns (variables).

    The model contract assumes zero-mean data; no centering is applied
    anywhere downstream. Callers working with un-centered signals should
    center before constructing a DataMatrix.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ShapeError(f"data must be 2-d, got shape {v.shape}")
        n, p = v.shape
        if n < 1 or p < 2:
            raise ShapeError(f"need n >= 1 and p >= 2, got n={n}, p={p}")
        if not np.all(np.isfinite(v)):
            raise ValueError("data contains non-finite entries")
        object.__setattr__(self, "values", _frozen_array(v))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class EmpiricalCovariance:
    """Symmetric p x p second-moment matrix (1/n normalizer, no centering)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ShapeError(f"covariance must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("covariance contains non-finite entries")
        if np.max(np.abs(v - v.T)) > SYMMETRY_TOL:
            raise ValueError("covariance is not symmetric within 1e-12")
        if np.any(np.diag(v) < 0):
            raise ValueError("covariance has a negative diagonal entry")
        object.__setattr__(self, "values", _frozen_array(v))

    @property
    def p(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ClusterIndicator:
    """Non-negative p x k matrix mapping variables (rows) to nodes (columns)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ShapeError(f"indicator must be 2-d, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("indicator contains non-finite entries")
        if np.any(v < 0):
            raise ValueError("indicator has negative entries")
        if np.any(v.max(axis=1) <= 0):
            raise ValueError("indicator has an all-zero row")
        norms = np.linalg.norm(v, axis=0)
        if np.any(norms <= 0):
            raise ValueError("indicator has an all-zero column")
        object.__setattr__(self, "values", _frozen_array(v))

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class NodePrecision:
    """Symmetric positive-definite k x k inter-node precision matrix.

    ``sparsity_threshold`` is the magnitude below which an off-diagonal
    entry is reported as an absent edge.
    """

    values: np.ndarray
    sparsity_threshold: float = 1e-4

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ShapeError(f"precision must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("precision contains non-finite entries")
        asym = np.max(np.abs(v - v.T)) if v.size else 0.0
        if asym > 1e-8 * max(1.0, np.max(np.abs(v))):
            raise ValueError("precision is not symmetric")
        v = 0.5 * (v + v.T)
        try:
            np.linalg.cholesky(v)
        except np.linalg.LinAlgError as exc:
            raise DefinitenessError("precision is not positive definite") from exc
        if self.sparsity_threshold <= 0:
            raise ValueError("sparsity_threshold must be positive")
        object.__setattr__(self, "values", _frozen_array(v))

    @property
    def k(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class MixtureComponent:
    """One mixture component: prior weight, indicator, node precision."""

    phi: float
    H: ClusterIndicator
    theta_star: NodePrecision

    def __post_init__(self):
        if not (0.0 < self.phi <= 1.0 + PHI_SUM_TOL):
            raise ValueError(f"phi must be in (0, 1], got {self.phi}")
        if self.H.k != self.theta_star.k:
            raise ShapeError(
                f"indicator has k={self.H.k} but precision has k={self.theta_star.k}"
            )


@dataclass(frozen=True)
class MixtureState:
    """Full mixture parameter set plus fit diagnostics."""

    components: tuple[MixtureComponent, ...]
    nll: float = float("nan")
    iterations: int = 0
    converged: bool = False

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        total = sum(c.phi for c in comps)
        if abs(total - 1.0) > PHI_SUM_TOL:
            raise ValueError(f"component weights sum to {total}, not 1")
        ks = {c.H.k for c in comps}
        if len(ks) != 1:
            raise ShapeError(f"components disagree on node count: {sorted(ks)}")
        object.__setattr__(self, "components", comps)

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def k(self) -> int:
        return self.components[0].H.k

    @property
    def phi(self) -> np.ndarray:
        return np.array([c.phi for c in self.components])


@dataclass(frozen=True)
class ResponsibilityMatrix:
    """Row-stochastic n x m posterior weights of observations over components."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ShapeError(f"responsibilities must be 2-d, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("responsibilities contain non-finite entries")
        if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise ValueError("responsibilities outside [0, 1]")
        rows = v.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > ROW_SUM_TOL:
            raise ValueError("responsibility rows do not sum to 1 within 1e-9")
        object.__setattr__(self, "values", _frozen_array(v))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SolverSettings:
    """Shared solver knobs; one seed drives every random draw downstream."""

    lam: float = 0.1
    max_outer_iters: int = 100
    max_inner_iters: int = 200
    tol: float = 1e-6
    seed: int = 0
    edge_threshold: float = 1e-4

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise ValueError("iteration caps must be at least 1")
        if self.edge_threshold <= 0:
            raise ValueError("edge_threshold must be positive")
