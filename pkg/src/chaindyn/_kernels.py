"""Hot inner loops: numba-compiled kernels with pure-numpy fallbacks.

The greedy separated-set scan over enumerated chain arrays dominates the
runtime of the pseudo-entropy estimators, so it is compiled with numba
``@njit`` when available.  Set the environment variable
``CHAINDYN_DISABLE_NUMBA=1`` to force the pure-numpy fallback path (used by
``benchmarks/bench_kernels.py`` to compare both).

Both implementations are exposed unconditionally as ``*_njit`` / ``*_numpy``
so tests and benchmarks can exercise each path explicitly; the public names
bind to whichever path is active.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("CHAINDYN_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
)

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = HAVE_NUMBA and not _DISABLE


@njit(cache=True)
def _greedy_separated_njit(chains, dist, eps, n_check, closed_conflict):
    """Greedy maximal separated family of chains, scan in row order.

    chains : int32[N, L] point-id rows
    dist   : float64[P, P] metric matrix
    conflict between two rows  =  all coordinate distances <= eps
    (closed_conflict) or < eps (open), over coordinates [0, n_check).
    Returns a boolean keep mask.  Rejection scans the kept rows most recent
    first: in lexicographic row order the conflicting partner of a rejected
    candidate is almost always nearby.
    """
    n_rows = chains.shape[0]
    keep = np.zeros(n_rows, dtype=np.bool_)
    kept_idx = np.empty(n_rows, dtype=np.int64)
    n_kept = 0
    for r in range(n_rows):
        ok = True
        for s in range(n_kept - 1, -1, -1):
            other = kept_idx[s]
            conflict = True
            for i in range(n_check):
                d = dist[chains[r, i], chains[other, i]]
                if closed_conflict:
                    if d > eps:
                        conflict = False
                        break
                else:
                    if d >= eps:
                        conflict = False
                        break
            if conflict:
                ok = False
                break
        if ok:
            keep[r] = True
            kept_idx[n_kept] = r
            n_kept += 1
    return keep


def _greedy_separated_numpy(chains, dist, eps, n_check, closed_conflict):
    """Pure-numpy fallback: same scan, vectorized over the kept set."""
    n_rows = chains.shape[0]
    keep = np.zeros(n_rows, dtype=bool)
    kept_rows = []
    kept_arr = np.empty((0, n_check), dtype=chains.dtype)
    for r in range(n_rows):
        if kept_arr.shape[0]:
            conflict = np.ones(kept_arr.shape[0], dtype=bool)
            for i in range(n_check):
                d = dist[chains[r, i], kept_arr[:, i]]
                conflict &= (d <= eps) if closed_conflict else (d < eps)
                if not conflict.any():
                    break
            if conflict.any():
                continue
        keep[r] = True
        kept_rows.append(chains[r, :n_check])
        kept_arr = np.asarray(kept_rows, dtype=chains.dtype)
    return keep


@njit(cache=True)
def _count_new_coverage_njit(chains, dist, eps, n_check, covered, cand):
    """Number of not-yet-covered rows within eps of row ``cand`` everywhere."""
    n_rows = chains.shape[0]
    total = 0
    for r in range(n_rows):
        if covered[r]:
            continue
        conflict = True
        for i in range(n_check):
            if dist[chains[cand, i], chains[r, i]] > eps:
                conflict = False
                break
        if conflict:
            total += 1
    return total


@njit(cache=True)
def _mark_coverage_njit(chains, dist, eps, n_check, covered, cand):
    for r in range(chains.shape[0]):
        if covered[r]:
            continue
        conflict = True
        for i in range(n_check):
            if dist[chains[cand, i], chains[r, i]] > eps:
                conflict = False
                break
        if conflict:
            covered[r] = True


def _coverage_mask_numpy(chains, dist, eps, n_check, cand):
    mask = np.ones(chains.shape[0], dtype=bool)
    for i in range(n_check):
        mask &= dist[chains[cand, i], chains[:, i]] <= eps
        if not mask.any():
            break
    return mask


def greedy_cover_first_fit(chains, dist, eps, n_check):
    """First-fit chain cover: pick every row not covered by an earlier pick.

    The chosen rows coincide with the greedy separated family (a chain is
    uncovered exactly when it is > eps from every earlier pick somewhere),
    so this reuses the separated kernel.  Valid upper bound on the minimum
    cover.
    """
    keep = greedy_separated(chains, dist, eps, n_check, True)
    return np.flatnonzero(keep)


def _greedy_cover_max_coverage_njit_impl(chains, dist, eps, n_check):
    n_rows = chains.shape[0]
    covered = np.zeros(n_rows, dtype=np.bool_)
    chosen = []
    while not covered.all():
        best, best_gain = -1, -1
        for cand in range(n_rows):
            gain = _count_new_coverage_njit(
                chains, dist, eps, n_check, covered, cand
            )
            if gain > best_gain:
                best, best_gain = cand, gain
        _mark_coverage_njit(chains, dist, eps, n_check, covered, best)
        chosen.append(best)
    return np.asarray(chosen, dtype=np.int64)


def _greedy_cover_max_coverage_numpy(chains, dist, eps, n_check):
    n_rows = chains.shape[0]
    covered = np.zeros(n_rows, dtype=bool)
    chosen = []
    while not covered.all():
        best, best_gain = -1, -1
        for cand in range(n_rows):
            gain = int((_coverage_mask_numpy(chains, dist, eps, n_check, cand) & ~covered).sum())
            if gain > best_gain:
                best, best_gain = cand, gain
        covered |= _coverage_mask_numpy(chains, dist, eps, n_check, best)
        chosen.append(best)
    return np.asarray(chosen, dtype=np.int64)


def warmup():
    """Trigger JIT compilation on a tiny instance (keeps timed runs honest)."""
    if not USE_NUMBA:
        return
    chains = np.array([[0, 1], [1, 0]], dtype=np.int32)
    dist = np.array([[0.0, 1.0], [1.0, 0.0]])
    _greedy_separated_njit(chains, dist, 0.5, 2, True)
    covered = np.zeros(2, dtype=np.bool_)
    _count_new_coverage_njit(chains, dist, 0.5, 2, covered, 0)
    _mark_coverage_njit(chains, dist, 0.5, 2, covered, 0)


if USE_NUMBA:
    greedy_separated = _greedy_separated_njit
    greedy_cover_max_coverage = _greedy_cover_max_coverage_njit_impl
else:
    greedy_separated = _greedy_separated_numpy
    greedy_cover_max_coverage = _greedy_cover_max_coverage_numpy
