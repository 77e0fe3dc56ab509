"""Projection and likelihood primitives shared by every solver.

All Gaussian densities are evaluated in the log domain (Cholesky log-det,
max-shifted log-sum-exp); linear-domain evaluation underflows already at a
few dozen nodes. Covariances use the biased 1/n normalizer and no mean
subtraction: zero-mean data is part of the model contract.
"""

from __future__ import annotations

import numpy as np

from .errors import DefinitenessError, EmptyComponentError, ShapeError
from .types import ClusterIndicator, DataMatrix, EmpiricalCovariance, MixtureState

LOG_2PI = float(np.log(2.0 * np.pi))
_PHI_FLOOR = 1e-300


def as_array(x) -> np.ndarray:
    """Unwrap a domain type to its ndarray, or pass an array-like through."""
    if hasattr(x, "values"):
        return np.asarray(x.values, dtype=float)
    return np.asarray(x, dtype=float)


def project(X, H) -> np.ndarray:
    """Map observations into node space: row i of the result is H^T x_i."""
    Xv = as_array(X)
    Hv = as_array(H)
    if Xv.shape[1] != Hv.shape[0]:
        raise ShapeError(
            f"indicator has {Hv.shape[0]} rows but data has {Xv.shape[1]} variables"
        )
    return Xv @ Hv


def empirical_covariance(X) -> EmpiricalCovariance:
    """Biased second-moment matrix (1/n) sum_i x_i x_i^T, exactly symmetrized."""
    Xv = as_array(X)
    if not np.all(np.isfinite(Xv)):
        raise ValueError("data contains non-finite entries")
    n = Xv.shape[0]
    S = (Xv.T @ Xv) / n
    S = 0.5 * (S + S.T)
    return EmpiricalCovariance(S)


def weighted_data(X, r_col) -> np.ndarray:
    """Scale row i by sqrt(r_i / sum(r)) so the result's Gram matrix is the
    responsibility-weighted covariance with unit total weight."""
    Xv = as_array(X)
    w = np.asarray(r_col, dtype=float).ravel()
    if w.shape[0] != Xv.shape[0]:
        raise ShapeError(f"{w.shape[0]} weights for {Xv.shape[0]} observations")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    s = w.sum()
    if s <= 0:
        raise EmptyComponentError("component has zero total weight")
    return np.sqrt(w / s)[:, None] * Xv


def component_log_densities(X, state: MixtureState) -> np.ndarray:
    """n x m matrix of log N(H_j^T x_i | 0, theta_j^{-1}), one column per component.

    Raises DefinitenessError if any component precision fails to factorize.
    """
    Xv = as_array(X)
    n = Xv.shape[0]
    out = np.empty((n, state.m))
    for j, comp in enumerate(state.components):
        Y = project(Xv, comp.H)
        theta = comp.theta_star.values
        k = theta.shape[0]
        try:
            L = np.linalg.cholesky(theta)
        except np.linalg.LinAlgError as exc:
            raise DefinitenessError(
                f"component {j} precision is not positive definite"
            ) from exc
        logdet = 2.0 * np.sum(np.log(np.diag(L)))
        Z = Y @ L  # row i is (L^T y_i)^T, so |Z_i|^2 = y_i^T theta y_i
        quad = np.einsum("ij,ij->i", Z, Z)
        out[:, j] = 0.5 * logdet - 0.5 * k * LOG_2PI - 0.5 * quad
    return out


def mixture_nll(X, state: MixtureState) -> float:
    """Negative log likelihood of the mixture, evaluated in the log domain."""
    logd = component_log_densities(X, state)
    logw = np.log(np.maximum(state.phi, _PHI_FLOOR))[None, :] + logd
    shift = logw.max(axis=1)
    per_row = shift + np.log(np.exp(logw - shift[:, None]).sum(axis=1))
    return float(-per_row.sum())
