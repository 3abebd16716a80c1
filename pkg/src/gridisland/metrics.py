"""Objective metrics for islanding strategies.

Relaxed metrics f, h_i and J are squared distances from target vectors to
the column span of the selected incidence submatrix.  The constrained
imbalance F adds box limits on load and generation (solved by Dykstra
alternating projections), and the constrained non-coherency H_i is the
per-island equality-constrained least squares of the coherency targets.

Unit convention: b0, d_max and g_max are carried in MW, so f and F are in
MW^2 and sqrt(f) is directly the imbalance in MW.  The coherency targets
c^i are unitless.  This mixed convention is what makes trade-off weights
xi of order 1e-7..1e-5 put the two objectives on comparable scales.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .coherency import CoherencyModel
from .netcase import OperatingPoint, PowerNetwork, incidence_matrix

RANK_TOL = 1e-10  # relative residual below which a column adds no span


class MetricError(Exception):
    pass


@dataclass(frozen=True)
class MetricContext:
    net: PowerNetwork
    A: np.ndarray          # full m x l incidence matrix, canonical order
    b0: np.ndarray         # MW net load vector d0 - g0 (balanced)
    c: np.ndarray          # m x n matrix of coherency targets c^i
    xi: float
    d_max: np.ndarray      # MW
    g_max: np.ndarray      # MW
    refs: tuple[int, ...]  # generator indices
    C: np.ndarray          # A^T A / (2n)

    @property
    def targets(self) -> np.ndarray:
        """Weighted target block [sqrt(xi) * b0, c^1, ..., c^n]."""
        return np.column_stack([np.sqrt(self.xi) * self.b0, self.c])


def build_context(
    net: PowerNetwork,
    op: OperatingPoint,
    model: CoherencyModel,
    xi: float,
) -> MetricContext:
    if xi < 0:
        raise MetricError("trade-off weight must be nonnegative")
    A = incidence_matrix(net)
    n = net.n
    gen_pos = net.gen_positions()
    ref_pos = gen_pos[list(model.refs)]
    c = np.zeros((net.m, n))
    for i in range(n):
        c[gen_pos[i], i] += 1.0
        for k, sp in enumerate(ref_pos):
            c[sp, i] -= model.L[i, k]
    b0 = op.injections
    return MetricContext(
        net=net, A=A, b0=b0, c=c, xi=xi,
        d_max=net.d_max_vector(), g_max=net.g_max_vector(),
        refs=tuple(model.refs), C=A.T @ A / (2 * n),
    )


def orthonormal_span(A_S: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column span, dropping dependent columns."""
    m = A_S.shape[0]
    Q = np.zeros((m, 0))
    for k in range(A_S.shape[1]):
        col = A_S[:, k]
        resid = col - Q @ (Q.T @ col)
        resid -= Q @ (Q.T @ resid)  # second pass for orthogonality
        norm = np.linalg.norm(resid)
        if norm > RANK_TOL * max(np.linalg.norm(col), 1.0):
            Q = np.column_stack([Q, resid / norm])
    return Q


def subspace_distance_sq(A_S: np.ndarray, v: np.ndarray) -> float:
    """Squared distance from v to the column span of A_S."""
    if A_S.shape[0] != v.shape[0]:
        raise MetricError("dimension mismatch between matrix and vector")
    Q = orthonormal_span(A_S)
    proj = Q.T @ v
    return float(max(v @ v - proj @ proj, 0.0))


class IncrementalEvaluator:
    """Cached-projection evaluator for one search over edge subsets.

    Maintains an orthonormal basis of span(A(S)) that grows one column at
    a time, so marginal J-decreases for every candidate edge come from a
    single matrix product instead of a fresh least-squares solve.  Owned
    by one logical search; the context itself is immutable and shared.
    """

    def __init__(self, ctx: MetricContext):
        self.ctx = ctx
        self.A = ctx.A
        self.T = ctx.targets          # m x (n+1), weighted
        self.base = float((self.T * self.T).sum())  # J(empty set)
        self.Q = np.zeros((self.A.shape[0], 0))
        self.S: list[int] = []

    def J(self) -> float:
        P = self.Q.T @ self.T
        return float(max(self.base - (P * P).sum(), 0.0))

    def gains(self, candidates) -> np.ndarray:
        """J(S) - J(S + {e}) for each candidate edge, vectorized."""
        cand = list(candidates)
        Ac = self.A[:, cand]
        R = Ac - self.Q @ (self.Q.T @ Ac)
        R -= self.Q @ (self.Q.T @ R)
        norms = np.linalg.norm(R, axis=0)
        out = np.zeros(len(cand))
        ok = norms > RANK_TOL * np.sqrt(2.0)
        if ok.any():
            Qn = R[:, ok] / norms[ok]
            P = Qn.T @ self.T
            out[ok] = (P * P).sum(axis=1)
        return out

    def add(self, e: int) -> None:
        col = self.A[:, e]
        resid = col - self.Q @ (self.Q.T @ col)
        resid -= self.Q @ (self.Q.T @ resid)
        norm = np.linalg.norm(resid)
        if norm > RANK_TOL * np.sqrt(2.0):
            self.Q = np.column_stack([self.Q, resid / norm])
        self.S.append(e)

    def fork_without(self, v: int) -> "IncrementalEvaluator":
        """Evaluator for S minus one edge (fresh orthogonalization)."""
        other = IncrementalEvaluator(self.ctx)
        for e in self.S:
            if e != v:
                other.add(e)
        return other


def f(ctx: MetricContext, S) -> float:
    return subspace_distance_sq(ctx.A[:, sorted(S)], ctx.b0)


def h_i(ctx: MetricContext, S, i: int) -> float:
    return subspace_distance_sq(ctx.A[:, sorted(S)], ctx.c[:, i])


def J(ctx: MetricContext, S) -> float:
    cols = sorted(S)
    A_S = ctx.A[:, cols]
    Q = orthonormal_span(A_S)
    T = ctx.targets
    P = Q.T @ T
    return float(max((T * T).sum() - (P * P).sum(), 0.0))


def F(ctx: MetricContext, S, tol: float = 1e-8, max_iter: int = 10000) -> float:
    """Constrained load-generation imbalance (MW^2).

    Distance from b0 to the intersection of span(A(S)) with the box
    [-g_max, d_max], via Dykstra alternating projections.  The
    intersection contains the origin, so it is never empty.
    """
    Q = orthonormal_span(ctx.A[:, sorted(S)])
    lo, hi = -ctx.g_max, ctx.d_max
    y = ctx.b0.copy()
    p = np.zeros_like(y)
    q = np.zeros_like(y)
    for _ in range(max_iter):
        w = Q @ (Q.T @ (y + p))
        p = y + p - w
        y_new = np.clip(w + q, lo, hi)
        q = w + q - y_new
        if np.linalg.norm(y_new - y) <= tol * max(1.0, np.linalg.norm(ctx.b0)):
            y = y_new
            break
        y = y_new
    else:
        raise MetricError(
            f"imbalance projection did not converge; last residual "
            f"{float(np.linalg.norm(y - ctx.b0) ** 2):.6g}"
        )
    # polish: the limit lies in the box; project once more onto the subspace
    # and keep the feasible iterate for the reported value
    return float(np.linalg.norm(y - ctx.b0) ** 2)


def island_labels(ctx: MetricContext, S) -> np.ndarray | None:
    """Bus -> island index if S induces a valid r-island partition, else None."""
    net = ctx.net
    parent = list(range(net.m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in S:
        br = net.branches[e]
        ra, rb = find(net.bus_pos[br.i]), find(net.bus_pos[br.j])
        if ra == rb:
            return None  # cycle: not a forest
        parent[ra] = rb
    gen_pos = net.gen_positions()
    ref_roots = [find(gen_pos[i]) for i in ctx.refs]
    if len(set(ref_roots)) != len(ref_roots):
        return None  # two references share an island
    root_to_island = {rt: k for k, rt in enumerate(ref_roots)}
    labels = np.empty(net.m, dtype=int)
    for b in range(net.m):
        rt = find(b)
        if rt not in root_to_island:
            return None  # component without a reference
        labels[b] = root_to_island[rt]
    return labels


def H_i_constrained(ctx: MetricContext, S, i: int, model: CoherencyModel) -> float:
    """Constrained non-coherency of generator i under a valid partition.

    The equality constraints zero the flow mismatch at every bus other
    than u_i and the references, so within each island the feasible
    injections live on the allowed buses with zero sum.  The projection
    then has a closed per-island form.
    """
    labels = island_labels(ctx, S)
    if labels is None:
        raise MetricError("edge set does not induce a valid r-island partition")
    net = ctx.net
    gen_pos = net.gen_positions()
    allowed = {int(gen_pos[i])} | {int(gen_pos[k]) for k in ctx.refs}
    ci = ctx.c[:, i]
    total = 0.0
    for isl in range(len(ctx.refs)):
        members = np.flatnonzero(labels == isl)
        free = [b for b in members if b in allowed]
        fixed = [b for b in members if b not in allowed]
        total += float(sum(ci[b] ** 2 for b in fixed))
        if free:
            mean = float(np.mean([ci[b] for b in free]))
            total += len(free) * mean * mean
    return total


def h_contributions(ctx: MetricContext, S) -> dict:
    """Debug breakdown of J: f and each generator's h_i, JSON-ready."""
    cols = sorted(S)
    Q = orthonormal_span(ctx.A[:, cols])

    def dist(v):
        p = Q.T @ v
        return float(max(v @ v - p @ p, 0.0))

    h = [dist(ctx.c[:, i]) for i in range(ctx.c.shape[1])]
    f_val = dist(ctx.b0)
    return {
        "f": f_val,
        "h": h,
        "xi": ctx.xi,
        "J": ctx.xi * f_val + sum(h),
    }


def noncoherency(L: np.ndarray, L_g: np.ndarray) -> float:
    """Squared Frobenius distance between coherency and partition matrices."""
    if L.shape != L_g.shape:
        raise MetricError("shape mismatch between L and L_g")
    return float(np.linalg.norm(L - L_g, "fro") ** 2)


def lambda_min_C(ctx: MetricContext) -> float:
    vals = np.linalg.eigvalsh(0.5 * (ctx.C + ctx.C.T))
    return float(vals[0])


def lambda_min_sparse(ctx: MetricContext, s: int, limit: int = 200000) -> float:
    """Smallest s-sparse eigenvalue of C by exhaustive column enumeration."""
    l = ctx.C.shape[0]
    from math import comb

    if comb(l, s) > limit:
        raise MetricError(
            f"C({l},{s}) subsets exceed the exhaustive sweep limit; "
            "use the dense smallest eigenvalue instead"
        )
    best = np.inf
    for cols in itertools.combinations(range(l), s):
        sub = ctx.C[np.ix_(cols, cols)]
        best = min(best, float(np.linalg.eigvalsh(sub)[0]))
    return best


def submodularity_ratio_bound(ctx: MetricContext, k: int, U_size: int = 0) -> float:
    """Lower bound on the submodularity ratio of J: lambda_min of C.

    For small k + U_size the sharper sparse eigenvalue is available via
    lambda_min_sparse; this returns the always-valid dense bound.
    """
    if k < 1:
        raise MetricError("k must be at least 1")
    return lambda_min_C(ctx)
