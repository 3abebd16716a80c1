"""Reference generator selection from the slow eigenbasis.

Picks the r most linearly independent rows of the eigenbasis, either by
greedy log-det-Gramian maximization (submodular, hence a (1 - 1/e)
guarantee) or by the classic complete-pivoting elimination heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NEG_INF = float("-inf")


class SelectionError(Exception):
    pass


@dataclass(frozen=True)
class ReferenceSelection:
    refs: tuple[int, ...]
    gain_trace: tuple[float, ...]


def log_gramian(U: np.ndarray, T) -> float:
    """log det(U(T) U(T)'); 0 for empty T, -inf when singular."""
    rows = sorted(T)
    if not rows:
        return 0.0
    G = U[rows, :] @ U[rows, :].T
    sign, logdet = np.linalg.slogdet(G)
    if sign <= 0:
        return NEG_INF
    return logdet


def select_references_greedy(U: np.ndarray, r: int) -> ReferenceSelection:
    """Greedily add the row with maximal marginal log-det gain.

    Ties break toward the smallest row index; a candidate collinear with
    the current selection scores -inf and never wins.
    """
    n = U.shape[0]
    if r > n:
        raise SelectionError(f"cannot pick {r} references from {n} generators")
    chosen: list[int] = []
    trace: list[float] = []
    current = 0.0
    for _ in range(r):
        best_gain, best_row = NEG_INF, None
        for v in range(n):
            if v in chosen:
                continue
            gain = log_gramian(U, chosen + [v]) - current
            if gain > best_gain:
                best_gain, best_row = gain, v
        if best_row is None or best_gain == NEG_INF:
            raise SelectionError("rank-deficient eigenbasis")
        chosen.append(best_row)
        current += best_gain
        trace.append(best_gain)
    return ReferenceSelection(tuple(chosen), tuple(trace))


def select_references_pivoting(U: np.ndarray, r: int) -> ReferenceSelection:
    """r steps of Gaussian elimination with complete pivoting on a copy of U.

    The pivot row of each step names one reference generator.
    """
    n, cols = U.shape
    if r > min(n, cols):
        raise SelectionError(f"cannot pick {r} pivots from a {n}x{cols} basis")
    W = U.astype(float).copy()
    free_rows = list(range(n))
    free_cols = list(range(cols))
    refs: list[int] = []
    pivots: list[float] = []
    for _ in range(r):
        sub = np.abs(W[np.ix_(free_rows, free_cols)])
        flat = int(np.argmax(sub))
        ri, ci = divmod(flat, len(free_cols))
        piv_row, piv_col = free_rows[ri], free_cols[ci]
        piv = W[piv_row, piv_col]
        if piv == 0.0:
            raise SelectionError("zero pivot before r steps")
        refs.append(piv_row)
        pivots.append(abs(piv))
        for row in free_rows:
            if row != piv_row:
                W[row, :] -= (W[row, piv_col] / piv) * W[piv_row, :]
        free_rows.remove(piv_row)
        free_cols.remove(piv_col)
    return ReferenceSelection(tuple(refs), tuple(pivots))
