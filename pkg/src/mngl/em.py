"""EM fitting of a mixture of coherent-graphical-lasso network states.

Each outer iteration runs a generalized M-step (one alternation sweep per
component, warm-started from the previous parameters, on responsibility
-weighted data) followed by an E-step; the initial random responsibilities
stand in for the first E-step and are what breaks the symmetry between the
initially identical components. The negative log likelihood is recorded
after every M-step; it is non-increasing up to the (documented) slack of
the multiplicative indicator update.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cgl import cgl_solve
from .core import (
    as_array,
    component_log_densities,
    empirical_covariance,
    mixture_nll,
    weighted_data,
)
from .errors import FitError, ShapeError
from .glasso import GlassoProblem, glasso_solve
from .initialization import initial_indicator
from .types import (
    ClusterIndicator,
    DataMatrix,
    EmpiricalCovariance,
    MixtureComponent,
    MixtureState,
    ResponsibilityMatrix,
    SolverSettings,
)

logger = logging.getLogger(__name__)

_PHI_FLOOR = 1e-300
_COLLAPSE_FRACTION = 1e-3
_MAX_COLLAPSE_RESTARTS = 3
INIT_WEIGHT = 0.9


@dataclass(frozen=True)
class MnglConfig:
    """Mixture size, node count, and solver knobs for one fit."""

    m: int
    k: int
    settings: SolverSettings = field(default_factory=SolverSettings)
    init_scheme: str = "random-responsibility"
    m_step_to_convergence: bool = False
    freeze_h: bool = False

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise ValueError("m and k must be at least 1")
        if self.init_scheme not in ("random-responsibility", "user-supplied"):
            raise ValueError(f"unknown init_scheme {self.init_scheme!r}")


@dataclass(frozen=True)
class MnglResult:
    state: MixtureState
    responsibilities: ResponsibilityMatrix
    nll_trace: tuple[float, ...]


def _random_responsibilities(n: int, m: int, rng: np.random.Generator
                             ) -> np.ndarray:
    """Each observation softly owned (weight 0.9) by one random component."""
    if m == 1:
        return np.ones((n, 1))
    r = np.full((n, m), (1.0 - INIT_WEIGHT) / (m - 1))
    r[np.arange(n), rng.integers(0, m, size=n)] = INIT_WEIGHT
    return r


def initialize(X: DataMatrix, config: MnglConfig
               ) -> tuple[MixtureState, ResponsibilityMatrix]:
    """Starting point: random soft assignments plus shared whole-sample
    network parameters.

    All components start identical (k-means indicator + 0.2, column
    -normalized, with the glasso precision of the projected whole-sample
    covariance); only the asymmetric responsibilities distinguish them.
    """
    rng = np.random.default_rng(config.settings.seed)
    r = _random_responsibilities(X.n, config.m, rng)

    H0 = initial_indicator(X.values.T, config.k)
    H0 = H0 / np.linalg.norm(H0, axis=0)
    S = empirical_covariance(X).values
    S_star = H0.T @ S @ H0
    theta0 = glasso_solve(
        GlassoProblem(EmpiricalCovariance(0.5 * (S_star + S_star.T)),
                      config.settings.lam, config.settings)
    ).theta

    comp = MixtureComponent(1.0 / config.m, ClusterIndicator(H0), theta0)
    state = MixtureState(components=(comp,) * config.m)
    state = MixtureState(components=state.components,
                         nll=mixture_nll(X, state))
    return state, ResponsibilityMatrix(r)


def e_step(X, state: MixtureState) -> ResponsibilityMatrix:
    """Posterior component weights per observation, computed in log domain.

    A row whose every component underflows is assigned the uniform 1/m and
    a warning is logged.
    """
    logd = component_log_densities(X, state)
    logw = np.log(np.maximum(state.phi, _PHI_FLOOR))[None, :] + logd
    shift = logw.max(axis=1, keepdims=True)
    dead = ~np.isfinite(shift[:, 0])
    if np.any(dead):
        logger.warning(
            "E-step underflow on %d observation(s); assigning uniform weights",
            int(dead.sum()),
        )
        logw[dead] = 0.0
        shift[dead] = 0.0
    r = np.exp(logw - shift)
    r /= r.sum(axis=1, keepdims=True)
    return ResponsibilityMatrix(r)


def m_step_phi(r) -> np.ndarray:
    """Updated prior weights: column means of the responsibilities."""
    rv = as_array(r)
    return rv.mean(axis=0)


def m_step_networks(X, r, state: MixtureState, config: MnglConfig
                    ) -> MixtureState:
    """Update every component's network on its responsibility-weighted data.

    Runs one coherent-graphical-lasso alternation sweep per component
    (or a full solve with ``config.m_step_to_convergence``), warm-started
    from the component's previous indicator and precision, then refreshes
    the prior weights.
    """
    rv = as_array(r)
    phi = m_step_phi(rv)
    sweeps = None if config.m_step_to_convergence else 1
    comps = []
    for j, comp in enumerate(state.components):
        X_t = weighted_data(X, rv[:, j])
        sol = cgl_solve(
            X_t, config.k, config.settings,
            H_init=comp.H.values, theta_init=comp.theta_star.values,
            freeze_h=config.freeze_h, max_sweeps=sweeps,
        )
        comps.append(MixtureComponent(float(phi[j]), sol.H, sol.theta_star))
    new_state = MixtureState(components=tuple(comps),
                             iterations=state.iterations + 1)
    return MixtureState(components=new_state.components,
                        nll=mixture_nll(X, new_state),
                        iterations=new_state.iterations)


def _repair_collapsed(r: np.ndarray, rng: np.random.Generator,
                      restarts: np.ndarray, n: int) -> np.ndarray:
    """Redraw the responsibility column of any collapsed component.

    A component whose total weight fell below 1e-3 * n gets a fresh
    0.9 / 0.1 draw in its column (rows then renormalized); after three
    restarts of the same component the fit fails.
    """
    m = r.shape[1]
    col_sums = r.sum(axis=0)
    for j in np.flatnonzero(col_sums < _COLLAPSE_FRACTION * n):
        if restarts[j] >= _MAX_COLLAPSE_RESTARTS:
            raise FitError(
                f"component {j} collapsed {restarts[j]} times "
                f"(column sums {np.array2string(col_sums, precision=3)})"
            )
        restarts[j] += 1
        logger.warning("component %d collapsed (weight %.3e); reseeding",
                       j, col_sums[j])
        fresh = np.where(rng.random(n) < 1.0 / m,
                         INIT_WEIGHT, (1.0 - INIT_WEIGHT) / max(m - 1, 1))
        r = r.copy()
        r[:, j] = fresh
        r /= r.sum(axis=1, keepdims=True)
    return r


def _sorted_by_weight(state: MixtureState, r: np.ndarray
                      ) -> tuple[MixtureState, np.ndarray]:
    """Deterministic component order: descending weight, then precision bytes."""
    order = sorted(
        range(state.m),
        key=lambda j: (
            -state.components[j].phi,
            tuple(state.components[j].theta_star.values.ravel()),
        ),
    )
    comps = tuple(state.components[j] for j in order)
    return (
        MixtureState(components=comps, nll=state.nll,
                     iterations=state.iterations, converged=state.converged),
        r[:, order],
    )


def mngl_fit(X: DataMatrix, config: MnglConfig,
             init_state: MixtureState | None = None,
             init_resp: ResponsibilityMatrix | None = None) -> MnglResult:
    """Fit the mixture by EM.

    Alternates the generalized M-step and the E-step until the negative
    log likelihood changes by less than ``settings.tol`` or the iteration
    cap is hit; the trace records the NLL after every M-step. Components
    of the result are sorted by descending weight. With m = 1 the mixture
    degenerates to a single coherent-graphical-lasso solve and the fit
    delegates to it directly.
    """
    if X.n <= config.k:
        raise ShapeError(f"need n > k, got n={X.n}, k={config.k}")
    st = config.settings

    if config.m == 1:
        sol = cgl_solve(X.values / np.sqrt(X.n), config.k, st,
                        freeze_h=config.freeze_h)
        comp = MixtureComponent(1.0, sol.H, sol.theta_star)
        state = MixtureState(components=(comp,), iterations=sol.iterations,
                             converged=sol.converged)
        nll = mixture_nll(X, state)
        state = MixtureState(components=state.components, nll=nll,
                             iterations=sol.iterations, converged=sol.converged)
        return MnglResult(state, ResponsibilityMatrix(np.ones((X.n, 1))),
                          (nll,))

    if config.init_scheme == "user-supplied":
        if init_state is None or init_resp is None:
            raise ValueError(
                "init_scheme 'user-supplied' needs init_state and init_resp"
            )
        state, r = init_state, init_resp.values.copy()
    else:
        state, resp = initialize(X, config)
        r = resp.values.copy()

    repair_rng = np.random.default_rng([st.seed, 0x5eed])
    restarts = np.zeros(config.m, dtype=int)
    trace: list[float] = []
    converged = False
    iteration = 0
    for iteration in range(1, st.max_outer_iters + 1):
        r = _repair_collapsed(r, repair_rng, restarts, X.n)
        state = m_step_networks(X, r, state, config)
        trace.append(state.nll)
        r = e_step(X, state).values
        if len(trace) >= 2 and abs(trace[-1] - trace[-2]) < st.tol:
            converged = True
            break

    state = MixtureState(components=state.components, nll=trace[-1],
                         iterations=iteration, converged=converged)
    state, r = _sorted_by_weight(state, r)
    return MnglResult(state, ResponsibilityMatrix(r), tuple(trace))
