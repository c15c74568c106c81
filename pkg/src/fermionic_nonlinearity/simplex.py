"""Dense two-phase simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Dantzig pricing, switching to Bland's rule after a run of degenerate pivots.
Sized for the small problems of the quasiprobability LP (tens of rows and
columns); no sparse machinery.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11
MAX_ITER = 100_000
DEGENERATE_RUN = 50


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


class IterationLimitError(LPError):
    pass


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    basis: np.ndarray
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])


def _run(T: np.ndarray, basis: np.ndarray, n_cols: int, max_iter: int, it0: int) -> int:
    """Optimize the tableau in place over the first ``n_cols`` columns; returns the iteration count."""
    it = it0
    degenerate = 0
    m = T.shape[0] - 1
    while True:
        reduced = T[-1, :n_cols]
        if degenerate >= DEGENERATE_RUN:
            candidates = np.flatnonzero(reduced < -FEAS_TOL)
            if candidates.size == 0:
                return it
            col = int(candidates[0])
        else:
            col = int(np.argmin(reduced))
            if reduced[col] >= -FEAS_TOL:
                return it
        column = T[:m, col]
        ok = column > PIVOT_TOL
        if not ok.any():
            raise UnboundedError("objective is unbounded below")
        ratios = np.full(m, np.inf)
        ratios[ok] = T[:m, -1][ok] / column[ok]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + FEAS_TOL)
        # Bland: leave on the smallest basic index among ties
        row = int(ties[np.argmin(basis[ties])])
        degenerate = degenerate + 1 if best <= FEAS_TOL else 0
        _pivot(T, row, col)
        basis[row] = col
        it += 1
        if it >= max_iter:
            raise IterationLimitError(f"simplex did not converge in {max_iter} iterations")


def simplex(c: np.ndarray, A: np.ndarray, b: np.ndarray, max_iter: int = MAX_ITER) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase 1: artificial identity block, minimize their sum
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = np.arange(n, n + m)
    it = _run(T, basis, n + m, max_iter, 0)
    if -T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
        raise InfeasibleError(f"phase 1 residual {-T[-1, -1]:.3g}")

    # drive artificials out of the basis; rows where that fails are redundant
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] < n:
            continue
        cols = np.flatnonzero(np.abs(T[r, :n]) > 1e-9)
        if cols.size:
            col = int(cols[np.argmax(np.abs(T[r, cols]))])
            _pivot(T, r, col)
            basis[r] = col
        else:
            keep[r] = False
    rows = np.flatnonzero(keep)
    T2 = np.zeros((rows.size + 1, n + 1))
    T2[:-1, :n] = T[rows, :n]
    T2[:-1, -1] = T[rows, -1]
    basis = basis[rows]

    # phase 2: price out the basic columns
    T2[-1, :n] = c
    T2[-1, -1] = 0.0
    for r, j in enumerate(basis):
        T2[-1] -= c[j] * T2[r]
    it = _run(T2, basis, n, max_iter, it)

    # refine x_B from the original data to undo tableau round-off
    x = np.zeros(n)
    AB = A[np.ix_(rows, basis)]
    xb, *_ = np.linalg.lstsq(AB, b[rows], rcond=None)
    if np.min(xb, initial=0.0) < -1e-7:
        xb = T2[:-1, -1]
    x[basis] = np.maximum(xb, 0.0)
    logger.debug("simplex finished in %d iterations", it)
    return SimplexResult(x=x, objective=float(c @ x), basis=basis.copy(), iterations=it)
