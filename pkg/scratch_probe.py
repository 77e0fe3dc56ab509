"""Dev probe: sanity-check solver behaviors before freezing tests."""
import time

import numpy as np

from mngl import (
    DataMatrix, EmpiricalCovariance, GlassoProblem, SolverSettings,
    cgl_solve, cluster_assign, edge_set, empirical_covariance, glasso_solve,
    generate_truth, sample, mngl_fit, MnglConfig, score_run, nmi,
    pipeline_cgl, pipeline_onmtf,
)

rng = np.random.default_rng(0)

# --- glasso: lam=0 equals inverse -----------------------------------------
for trial in range(5):
    A = rng.standard_normal((10, 10))
    S = A @ A.T / 10 + np.eye(10)
    prob = GlassoProblem(EmpiricalCovariance(S), 0.0, SolverSettings())
    sol = glasso_solve(prob)
    err = np.max(np.abs(sol.theta.values - np.linalg.inv(S)))
    assert err < 1e-6, err
print("glasso lam=0 inverse: ok")

# --- glasso: diagonal S ----------------------------------------------------
d = np.diag([1.0, 2.0, 3.0])
sol = glasso_solve(GlassoProblem(EmpiricalCovariance(d), 0.3, SolverSettings()))
print("diag solution:", np.diag(sol.theta.values), "expect", 1 / (np.diag(d) + 0.3))

# --- glasso vs generic optimizer on 2x2 ------------------------------------
from scipy.optimize import minimize

S2 = np.array([[1.0, 0.5], [0.5, 1.0]])
lam = 0.1

def obj(v):
    a, b, c = v
    T = np.array([[a, b], [b, c]])
    det = a * c - b * b
    if a <= 0 or det <= 0:
        return 1e10
    return -np.log(det) + np.sum(S2 * T) + lam * (abs(a) + 2 * abs(b) + abs(c))

res = minimize(obj, [1.0, 0.0, 1.0], method="Nelder-Mead",
               options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
sol2 = glasso_solve(GlassoProblem(EmpiricalCovariance(S2), lam, SolverSettings()))
T_opt = np.array([[res.x[0], res.x[1]], [res.x[1], res.x[2]]])
print("2x2 oracle:", res.x, "bcd:", sol2.theta.values.ravel(),
      "max diff:", np.max(np.abs(T_opt - sol2.theta.values)))

# --- glasso monotonicity ---------------------------------------------------
worst = 0.0
for trial in range(10):
    A = rng.standard_normal((12, 12))
    S = A @ A.T / 12 + 0.5 * np.eye(12)
    sol = glasso_solve(GlassoProblem(EmpiricalCovariance(S), 0.2, SolverSettings()))
    tr = np.array(sol.objective_trace)
    worst = max(worst, float(np.max(np.diff(tr))) if len(tr) > 1 else 0.0)
print("glasso worst objective increase:", worst)

# --- CGL two-block recovery ------------------------------------------------
t0 = time.time()
truth = generate_truth(p=20, k=2, m=1, seed=3)
X, labels = sample(truth, 2000, 0.0, seed=4)
st = SolverSettings(lam=0.1, seed=0)
sol = cgl_solve(X.values / np.sqrt(X.n), 2, st)
pred = cluster_assign(sol.H)
true_blocks = truth.block_labels(0)
print(f"CGL two-block NMI: {nmi(pred, true_blocks):.3f} "
      f"(iters {sol.iterations}, conv {sol.converged}, {time.time()-t0:.2f}s)")
tr = np.array(sol.objective_trace)
print("CGL worst objective increase:", float(np.max(np.diff(tr))) if len(tr) > 1 else 0.0)

# --- MNGL paper-scale recovery (THE risky bit) ------------------------------
t0 = time.time()
truth = generate_truth(p=70, k=5, m=2, seed=11)
X, labels = sample(truth, 2000, 0.0, seed=12)
cfg = MnglConfig(m=2, k=5, settings=SolverSettings(lam=0.1, seed=0, max_outer_iters=100))
res = mngl_fit(X, cfg)
rep = score_run(res.state, truth)
print(f"MNGL fit: {time.time()-t0:.1f}s iters={res.state.iterations} "
      f"conv={res.state.converged}")
print(f"  mean NMI {rep.mean_nmi:.3f}  mean F1 {rep.mean_f1:.3f}  "
      f"acc {rep.mean_accuracy:.3f}  purity {rep.mean_purity:.3f}")
tr = np.array(res.nll_trace)
print("  NLL first/last:", tr[0], tr[-1], " worst increase:",
      float(np.max(np.diff(tr))) if len(tr) > 1 else 0.0)

# responsibilities vs true labels
r = res.responsibilities.values
hard = np.argmax(r, axis=1)
print("  state NMI(obs):", f"{nmi(hard, labels):.3f}")

# --- baselines on same instance ---------------------------------------------
t0 = time.time()
pc = pipeline_cgl(X, 2, 5, st)
rep_pc = score_run(pc, truth)
print(f"kmeans+CGL:   NMI {rep_pc.mean_nmi:.3f} F1 {rep_pc.mean_f1:.3f} ({time.time()-t0:.1f}s)")
t0 = time.time()
po = pipeline_onmtf(X, 2, 5, st)
rep_po = score_run(po, truth)
print(f"kmeans+ONMtF: NMI {rep_po.mean_nmi:.3f} F1 {rep_po.mean_f1:.3f} ({time.time()-t0:.1f}s)")
