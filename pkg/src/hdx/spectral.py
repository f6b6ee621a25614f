"""Weighted adjacency spectra, links, and local-to-global expansion bounds.

The adjacency operator averages a function over a random neighbour: sample
an edge by mu1 conditioned on containing v, step to the other endpoint.
With mu0 descending from mu1 the walk is reversible, so conjugating by
diag(mu0)^(1/2) yields a symmetric matrix; its spectrum is computed by an
in-house cyclic Jacobi sweep (dense, deterministic).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cheeger as chg
from .complexes import Complex, connected_components, is_descending_mu0, link
from .config import TOLERANCES

EIG_TOL = TOLERANCES["eigenvalue"]
INEQ_SLACK = TOLERANCES["inequality_slack"]
JACOBI_OFF = TOLERANCES["jacobi_offdiagonal"]


def jacobi_eigh(matrix: np.ndarray, off_tol: float = JACOBI_OFF):
    """Eigenvalues (descending) and matching eigenvector columns of a dense
    symmetric matrix, by cyclic Jacobi rotations."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    if n == 1:
        return np.array([a[0, 0]]), np.eye(1)
    v = np.eye(n)
    converged = False
    for _ in range(100):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2)
        if off < off_tol:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < off_tol / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1)) if theta != 0 else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    if not converged and np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2) >= off_tol:
        raise ArithmeticError("Jacobi sweeps failed to reach the off-diagonal tolerance")
    evals = np.diag(a).copy()
    order = np.argsort(-evals, kind="stable")
    return evals[order], v[:, order]


def walk_matrix(cx: Complex):
    """Row-stochastic neighbour-averaging matrix and the mu0 weights.

    Requires mu0 descending from mu1 (otherwise the operator is not
    self-adjoint in the mu0 inner product).
    """
    if not is_descending_mu0(cx):
        raise ValueError("adjacency operator requires mu0 descending from mu1")
    n = cx.n_vertices
    p = np.zeros((n, n))
    for e, (s, t) in enumerate(cx.edges):
        w = float(cx.measures.mu1[e])
        p[s, t] += w
        p[t, s] += w
    rows = p.sum(axis=1)
    if np.any(rows == 0):
        raise ValueError("isolated vertex: the walk is undefined")
    p /= rows[:, None]
    mu0 = np.array([float(m) for m in cx.measures.mu0])
    return p, mu0


def _symmetrized(cx: Complex):
    p, mu0 = walk_matrix(cx)
    d = np.sqrt(mu0)
    s = d[:, None] * p / d[None, :]
    return (s + s.T) / 2, mu0


def second_eigenvalue(cx: Complex) -> float:
    """lambda_2 of the weighted adjacency operator.  A disconnected graph
    reports 1 (a locally constant non-constant eigenfunction exists)."""
    if not cx.is_connected:
        return 1.0
    s, _ = _symmetrized(cx)
    evals, _ = jacobi_eigh(s)
    if abs(evals[0] - 1.0) > EIG_TOL:
        raise ArithmeticError(f"leading eigenvalue {evals[0]} is not 1")
    return float(evals[1])


def fiedler_order(cx: Complex):
    """(lambda2, vertices ordered by the second eigenfunction) for sweep cuts."""
    s, mu0 = _symmetrized(cx)
    evals, evecs = jacobi_eigh(s)
    f = evecs[:, 1] / np.sqrt(mu0)
    order = sorted(range(cx.n_vertices), key=lambda v: (f[v], v))
    return float(evals[1]), order


@dataclass
class SpectralReport:
    lambda2: float | None = None
    link_table: list = field(default_factory=list)
    local_lambda: float | None = None
    trickling_bound: float | None = None
    checks: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))

    def to_dict(self) -> dict:
        return {
            "lambda2": self.lambda2,
            "link_table": self.link_table,
            "local_lambda": self.local_lambda,
            "trickling_bound": self.trickling_bound,
            "checks": self.checks,
            "tolerances": self.tolerances,
        }


def _require_pure_simplicial(cx: Complex) -> None:
    if not cx.is_simplicial():
        raise ValueError("the complex is not simplicial")
    for e in range(len(cx.edges)):
        if not cx.edge_polygons[e]:
            raise ValueError(f"edge {e} lies in no triangle (complex is not pure)")
    for v in range(cx.n_vertices):
        if not cx.out_darts[v]:
            raise ValueError(f"vertex {v} lies in no triangle (complex is not pure)")


def local_lambda(cx: Complex) -> SpectralReport:
    """Per-vertex link second eigenvalues and their maximum."""
    _require_pure_simplicial(cx)
    table = []
    worst = None
    for v in range(cx.n_vertices):
        lam = second_eigenvalue(link(cx, v))
        table.append({"vertex": v, "lambda2": lam})
        worst = lam if worst is None else max(worst, lam)
    report = SpectralReport(link_table=table, local_lambda=worst)
    return report


def trickling_check(cx: Complex, slack: float = INEQ_SLACK) -> dict:
    """Local spectral expansion trickles down: if every link has lambda_2 at
    most lam < 1/2 on a pure connected descending-measured complex, the
    global walk has lambda_2 at most lam / (1 - lam)."""
    record: dict = {"holds": None, "skipped": False}
    try:
        _require_pure_simplicial(cx)
        if not cx.is_connected:
            raise ValueError("complex is disconnected")
        if not (all(m > 0 for m in cx.measures.mu2) and all(m > 0 for m in cx.measures.mu1) and all(m > 0 for m in cx.measures.mu0)):
            raise ValueError("measures are not fully supported")
        lam = local_lambda(cx).local_lambda
        record["local_lambda"] = lam
        if lam >= 0.5:
            raise ValueError(f"local lambda {lam} is not below 1/2")
    except ValueError as exc:
        record.update(skipped=True, reason=str(exc))
        return record
    bound = lam / (1 - lam)
    lam2 = second_eigenvalue(cx)
    record.update(
        global_lambda2=lam2,
        bound=bound,
        holds=bool(lam2 <= bound + slack),
        slack=slack,
    )
    return record


def weighted_cheeger_lower(cx: Complex, slack: float = INEQ_SLACK) -> dict:
    """Spectral lower bound on edge expansion: h0(X, F2) >= 1 - lambda_2.

    The exact h0 side is evaluated when the subset search is feasible.
    """
    lam2 = second_eigenvalue(cx)
    record = {
        "lambda2": lam2,
        "lower": 1.0 - lam2,
        "h0_exact": None,
        "holds": None,
        "slack": slack,
    }
    if cx.n_vertices <= chg.H0_EXACT_MAX_VERTICES:
        h0 = chg.h0_f2(cx, "exact").value
        record["h0_exact"] = h0
        record["holds"] = bool(float(h0) >= 1.0 - lam2 - slack)
    return record


def cover_cosystole_bound(cx: Complex, experiment_degrees=()) -> dict:
    """Certified cosystole lower bound (1 - 2 lam) / (2 - 2 lam) for every
    connected cover of a lam-local spectral expander, lam < 1/2.

    Optional experiment: enumerate covers at the given degrees and verify
    the bound on every connected non-coboundary cocycle.
    """
    from . import cochain as ch
    from . import covering as cov

    lam = local_lambda(cx).local_lambda
    record: dict = {"local_lambda": lam}
    if lam >= 0.5:
        record.update(bound=None, vacuous=True)
        return record
    bound = (1 - 2 * lam) / (2 - 2 * lam)
    record.update(bound=bound, vacuous=bound <= 0)
    experiments = []
    for n in experiment_degrees:
        coeff = ch.Coefficient.sym(n)
        for rep in cov.enumerate_cocycles(cx, coeff):
            if ch.is_coboundary_exact(rep) or not ch.is_connected_cochain(rep):
                continue
            dist, beta = ch.dist_to_coboundaries(rep, "exact")
            experiments.append(
                {"degree": n, "norm": float(dist), "holds": bool(float(dist) >= bound - INEQ_SLACK)}
            )
    record["experiments"] = experiments
    record["holds"] = all(e["holds"] for e in experiments) if experiments else None
    return record


def spectral_profile(cx: Complex) -> SpectralReport:
    """Full report: global lambda2, link table, trickling prediction."""
    report = SpectralReport()
    if cx.is_connected:
        report.lambda2 = second_eigenvalue(cx)
    else:
        report.lambda2 = 1.0
        report.checks["components"] = connected_components(cx)
    try:
        lk = local_lambda(cx)
        report.link_table = lk.link_table
        report.local_lambda = lk.local_lambda
        if lk.local_lambda is not None and lk.local_lambda < 0.5:
            report.trickling_bound = lk.local_lambda / (1 - lk.local_lambda)
    except ValueError as exc:
        report.checks["links"] = f"skipped: {exc}"
    report.checks["constant_eigenfunction"] = _constant_check(cx)
    return report


def _constant_check(cx: Complex) -> bool:
    try:
        p, _ = walk_matrix(cx)
    except ValueError:
        return False
    ones = np.ones(cx.n_vertices)
    return bool(np.max(np.abs(p @ ones - ones)) < EIG_TOL)
