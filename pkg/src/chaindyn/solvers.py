"""Exact solvers for the small NP-hard subproblems.

Maximum independent set (separated families), minimum dominating set
(spanning/cover families) and minimum set cover are solved exactly with the
HiGHS MILP backend behind scipy.optimize.milp.  Connected-component
decomposition keeps the instances tiny; everything here is deterministic.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse.csgraph import connected_components

from .errors import InvalidArgumentError


def conflict_matrix(chains: np.ndarray, dist: np.ndarray, eps: float, n_check: int,
                    closed: bool = True) -> np.ndarray:
    """conflict[a, b] = rows a, b within eps (<= if closed, < otherwise) at
    every coordinate in [0, n_check)."""
    n = chains.shape[0]
    conf = np.ones((n, n), dtype=bool)
    for i in range(n_check):
        d = dist[chains[:, i]][:, chains[:, i]]
        conf &= (d <= eps) if closed else (d < eps)
        if not conf.any():
            break
    return conf


def _milp_binary(c, constraints):
    res = milp(
        c=c,
        constraints=constraints,
        integrality=np.ones(len(c)),
        bounds=Bounds(0, 1),
    )
    if res.status != 0:  # pragma: no cover - infeasibility cannot arise here
        raise RuntimeError(f"MILP solve failed: {res.message}")
    return res


def max_independent_exact(conflict: np.ndarray) -> int:
    """Maximum number of pairwise non-conflicting rows (exact).

    Decomposes into connected components of the conflict graph first; each
    component is a small MILP with one constraint per conflicting pair.
    """
    n = conflict.shape[0]
    if n == 0:
        return 0
    off = conflict.copy()
    np.fill_diagonal(off, False)
    n_comp, comp = connected_components(sparse.csr_matrix(off), directed=False)
    total = 0
    for c in range(n_comp):
        idx = np.flatnonzero(comp == c)
        k = len(idx)
        if k == 1:
            total += 1
            continue
        sub = off[np.ix_(idx, idx)]
        iu, ju = np.triu_indices(k, 1)
        pairs = sub[iu, ju]
        ii, jj = iu[pairs], ju[pairs]
        if len(ii) == 0:
            total += k
            continue
        rows = np.arange(len(ii))
        a = sparse.csr_matrix(
            (
                np.ones(2 * len(ii)),
                (np.concatenate([rows, rows]), np.concatenate([ii, jj])),
            ),
            shape=(len(ii), k),
        )
        res = _milp_binary(-np.ones(k), LinearConstraint(a, -np.inf, 1))
        total += int(round(-res.fun))
    return total


def min_dominating_exact(conflict: np.ndarray) -> int:
    """Minimum set of rows whose closed conflict neighborhoods cover all rows."""
    n = conflict.shape[0]
    if n == 0:
        return 0
    closed = conflict.copy()
    np.fill_diagonal(closed, True)
    n_comp, comp = connected_components(sparse.csr_matrix(closed), directed=False)
    total = 0
    for c in range(n_comp):
        idx = np.flatnonzero(comp == c)
        k = len(idx)
        if k == 1:
            total += 1
            continue
        sub = closed[np.ix_(idx, idx)]
        a = sparse.csr_matrix(sub.astype(np.float64))
        res = _milp_binary(np.ones(k), LinearConstraint(a, 1, np.inf))
        total += int(round(res.fun))
    return total


def exact_set_cover_masks(masks: list[int], universe: int, n_bits: int) -> int:
    """Minimum number of the given bitmask sets covering ``universe`` (exact)."""
    if universe == 0:
        return 0
    if not masks:
        raise InvalidArgumentError("no candidate sets")
    cols = []
    for m in masks:
        col = np.zeros(n_bits)
        for b in range(n_bits):
            if m >> b & 1:
                col[b] = 1.0
        cols.append(col)
    a = np.stack(cols, axis=1)
    need = np.array([(universe >> b) & 1 for b in range(n_bits)], dtype=float)
    keep = need > 0
    res = _milp_binary(
        np.ones(len(masks)), LinearConstraint(a[keep], 1, np.inf)
    )
    return int(round(res.fun))
