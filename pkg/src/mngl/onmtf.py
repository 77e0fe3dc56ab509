"""Orthogonal non-negative tri-factorization of the absolute covariance.

Baseline node-discovery method: factorizes |Sigma| ~ H S_mid H^T with
H >= 0 and near-orthonormal columns via multiplicative updates. Its
"edges" are read from the thresholded middle factor, i.e. they are
correlation-style associations and do not separate direct from indirect
connections; that limitation is inherent to the method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AssignmentError, InvalidNodeCountError
from .initialization import initial_indicator
from .types import ClusterIndicator, EmpiricalCovariance, SolverSettings

_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class OnmtfSolution:
    H: ClusterIndicator
    S_mid: np.ndarray
    residual: float
    iterations: int
    objective_trace: tuple[float, ...] = ()
    defect_trace: tuple[float, ...] = ()


def _objective(A: np.ndarray, H: np.ndarray, S_mid: np.ndarray) -> float:
    return float(np.sum((A - H @ S_mid @ H.T) ** 2))


def orthogonality_defect(H: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part of H^T H."""
    G = H.T @ H
    return float(np.linalg.norm(G - np.diag(np.diag(G))))


def onmtf_solve(Sigma: EmpiricalCovariance, k: int,
                settings: SolverSettings) -> OnmtfSolution:
    """Factorize the absolute covariance into k non-negative node profiles.

    Runs multiplicative updates with the middle factor refreshed as
    H^T |Sigma| H each sweep; stops when the objective stalls (relative
    change below ``settings.tol``) or after ``settings.max_outer_iters``
    sweeps. The trace fields record the objective and the orthogonality
    defect of H per sweep for diagnostics.
    """
    A = np.abs(np.asarray(Sigma.values, dtype=float))
    p = A.shape[0]
    if k < 1 or k > p:
        raise InvalidNodeCountError(f"k must be in [1, {p}], got {k}")

    H = initial_indicator(A, k)
    S_mid = H.T @ A @ H
    trace = [_objective(A, H, S_mid)]
    defects = [orthogonality_defect(H)]

    sweeps = 0
    for sweeps in range(1, settings.max_outer_iters + 1):
        S_mid = H.T @ A @ H
        AHS = A @ H @ S_mid
        denom = H @ (H.T @ AHS)
        ratio = np.maximum(AHS, 0.0) / np.maximum(denom, _DENOM_FLOOR)
        H = H * np.sqrt(ratio)
        S_mid = H.T @ A @ H
        obj = _objective(A, H, S_mid)
        trace.append(obj)
        defects.append(orthogonality_defect(H))
        if abs(trace[-2] - obj) < settings.tol * max(1.0, abs(trace[-2])):
            break

    return OnmtfSolution(
        H=ClusterIndicator(H),
        S_mid=0.5 * (S_mid + S_mid.T),
        residual=trace[-1],
        iterations=sweeps,
        objective_trace=tuple(trace),
        defect_trace=tuple(defects),
    )


def cluster_assign(H) -> np.ndarray:
    """Hard node labels: per-row argmax, ties broken toward the lowest column."""
    Hv = np.asarray(H.values if hasattr(H, "values") else H, dtype=float)
    if np.any(Hv < 0):
        raise ValueError("indicator has negative entries")
    if np.any(Hv.max(axis=1) <= 0):
        bad = int(np.argmax(Hv.max(axis=1) <= 0))
        raise AssignmentError(f"row {bad} of the indicator is all zero")
    return np.argmax(Hv, axis=1)
