"""Coherent graphical lasso: joint node discovery and edge detection.

Alternates, per sweep, (a) a graphical-lasso solve for the node precision
at the current indicator and (b) one multiplicative indicator update, on a
(possibly responsibility-weighted) data matrix whose Gram matrix is the
covariance. The multiplicative update preserves non-negativity and never
revives an entry that has reached zero, so callers start strictly positive.

The orthonormality constraint on the indicator is approached by
renormalizing its columns to unit Euclidean norm after each update, with
the precision compensated by the matching diagonal congruence (this keeps
the trace term of the objective unchanged; the log-det and penalty terms
move, which is part of why the per-sweep objective is only approximately
monotone).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidNodeCountError, NumericalError
from .glasso import GlassoProblem, GlassoSolution, glasso_objective, glasso_solve
from .initialization import initial_indicator
from .types import (
    ClusterIndicator,
    EmpiricalCovariance,
    NodePrecision,
    SolverSettings,
)

_DENOM_FLOOR = 1e-12
_DEAD_COLUMN_NORM = 1e-12


@dataclass(frozen=True)
class CglSolution:
    H: ClusterIndicator
    theta_star: NodePrecision
    objective: float
    iterations: int
    converged: bool
    objective_trace: tuple[float, ...] = ()


def _split(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Non-negative split A = A_plus - A_minus."""
    absA = np.abs(A)
    return 0.5 * (absA + A), 0.5 * (absA - A)


def h_update(H, X_tilde, theta_star) -> np.ndarray:
    """One multiplicative indicator update at fixed node precision.

    With St the Gram matrix of the weighted data and L = -H^T St H T the
    orthogonality multiplier, each entry is multiplied by

        (St H T_minus + H L_minus) / (St H T_plus + H L_plus)

    where the plus/minus parts are (|A| +- A) / 2. Denominators are floored
    at 1e-12 and negative numerators are clamped to zero so the result is
    always entrywise non-negative; a zero entry stays zero.
    """
    Hv = np.asarray(H.values if hasattr(H, "values") else H, dtype=float)
    Xv = np.asarray(X_tilde, dtype=float)
    T = np.asarray(
        theta_star.values if hasattr(theta_star, "values") else theta_star,
        dtype=float,
    )
    St = Xv.T @ Xv
    StH = St @ Hv
    lam1 = -(Hv.T @ StH) @ T
    T_plus, T_minus = _split(T)
    L_plus, L_minus = _split(lam1)
    numer = StH @ T_minus + Hv @ L_minus
    denom = StH @ T_plus + Hv @ L_plus
    out = Hv * (np.maximum(numer, 0.0) / np.maximum(denom, _DENOM_FLOOR))
    if not np.all(np.isfinite(out)):
        raise NumericalError(
            "indicator update produced non-finite entries",
            iterate={"H": Hv, "theta_star": T, "numerator": numer,
                     "denominator": denom},
        )
    return out


def cgl_objective(H, theta, St: np.ndarray, lam: float,
                  penalize_diagonal: bool = True) -> float:
    """-log det T + tr(H^T St H T) + lam |T|_1 at the given iterate."""
    Hv = np.asarray(H.values if hasattr(H, "values") else H, dtype=float)
    Tv = np.asarray(theta.values if hasattr(theta, "values") else theta,
                    dtype=float)
    S_star = Hv.T @ St @ Hv
    return glasso_objective(Tv, 0.5 * (S_star + S_star.T), lam,
                            penalize_diagonal)


def _normalize_columns(H: np.ndarray, theta: np.ndarray,
                       fallback: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit-norm columns with diagonal compensation of the precision.

    A column zeroed out by the multiplicative step (a dead node) is
    restored from ``fallback`` instead of dividing by zero.
    """
    norms = np.linalg.norm(H, axis=0)
    dead = norms < _DEAD_COLUMN_NORM
    if np.any(dead):
        H = H.copy()
        H[:, dead] = fallback[:, dead]
        norms = np.linalg.norm(H, axis=0)
    Hn = H / norms
    comp = np.outer(norms, norms) * theta
    return Hn, 0.5 * (comp + comp.T)


def _node_covariance(H: np.ndarray, St: np.ndarray) -> EmpiricalCovariance:
    S_star = H.T @ St @ H
    return EmpiricalCovariance(0.5 * (S_star + S_star.T))


def cgl_solve(X_tilde, k: int, settings: SolverSettings,
              H_init: np.ndarray | None = None,
              theta_init: np.ndarray | None = None,
              freeze_h: bool = False,
              max_sweeps: int | None = None,
              penalize_diagonal: bool = True) -> CglSolution:
    """Jointly estimate the indicator and the node precision.

    Parameters
    ----------
    X_tilde : ndarray
        Weighted data matrix (n x p) whose Gram matrix X^T X is the
        covariance with unit total weight; pass X / sqrt(n) for raw data.
    k : int
        Number of nodes, 1 <= k <= p.
    settings : SolverSettings
        lam, tolerances, and iteration caps (``max_outer_iters`` bounds the
        alternation sweeps, ``max_inner_iters`` the inner glasso sweeps).
    H_init, theta_init : ndarray, optional
        Warm starts. H_init defaults to a deterministic k-means indicator
        plus 0.2 and should be strictly positive for a fresh solve (zeros
        lock permanently under the multiplicative update); it is column
        -normalized on entry with the precision compensated. theta_init
        defaults to the glasso solution at the initial indicator.
    freeze_h : bool
        Keep the indicator fixed and run a single glasso solve on the
        projected covariance; with the identity indicator this is exactly
        the plain graphical-lasso path.
    max_sweeps : int, optional
        Override on the alternation count (e.g. 1 for a generalized
        M-step). Defaults to ``settings.max_outer_iters``.

    Returns
    -------
    CglSolution
        Final iterate, objective, per-sweep objective trace, and a
        convergence flag (both parameter blocks moved less than
        ``settings.tol`` in max-norm during the last sweep).
    """
    Xv = np.asarray(X_tilde, dtype=float)
    p = Xv.shape[1]
    if k < 1 or k > p:
        raise InvalidNodeCountError(f"k must be in [1, {p}], got {k}")
    St = Xv.T @ Xv

    if freeze_h:
        H = np.eye(p) if H_init is None else np.asarray(H_init, dtype=float)
        if H.shape != (p, k):
            raise InvalidNodeCountError(
                f"frozen indicator has shape {H.shape}, expected {(p, k)}"
            )
        sol = glasso_solve(
            GlassoProblem(_node_covariance(H, St), settings.lam, settings,
                          penalize_diagonal),
            theta_init=theta_init,
        )
        return CglSolution(
            H=ClusterIndicator(H), theta_star=sol.theta,
            objective=sol.objective, iterations=sol.iterations,
            converged=sol.converged, objective_trace=sol.objective_trace,
        )

    if H_init is None:
        H = initial_indicator(Xv.T, k)
    else:
        H = np.array(H_init, dtype=float)
    theta = None if theta_init is None else np.array(theta_init, dtype=float)
    H, theta = _normalize_columns(
        H, np.eye(k) if theta is None else theta, fallback=np.full((p, k), 0.2)
    )
    if theta_init is None:
        theta = glasso_solve(
            GlassoProblem(_node_covariance(H, St), settings.lam, settings,
                          penalize_diagonal)
        ).theta.values.copy()

    trace = [cgl_objective(H, theta, St, settings.lam, penalize_diagonal)]
    sweeps = 0
    converged = False
    limit = settings.max_outer_iters if max_sweeps is None else max_sweeps
    for sweeps in range(1, limit + 1):
        H_prev = H.copy()
        theta_prev = theta.copy()
        gl = glasso_solve(
            GlassoProblem(_node_covariance(H, St), settings.lam, settings,
                          penalize_diagonal),
            theta_init=theta,
        )
        theta = gl.theta.values.copy()
        H_raw = h_update(H, Xv, theta)
        H, theta = _normalize_columns(H_raw, theta, fallback=H_prev)
        trace.append(cgl_objective(H, theta, St, settings.lam,
                                   penalize_diagonal))
        if (np.max(np.abs(H - H_prev)) < settings.tol
                and np.max(np.abs(theta - theta_prev)) < settings.tol):
            converged = True
            break

    return CglSolution(
        H=ClusterIndicator(H),
        theta_star=NodePrecision(theta, settings.edge_threshold),
        objective=trace[-1],
        iterations=sweeps,
        converged=converged,
        objective_trace=tuple(trace),
    )
