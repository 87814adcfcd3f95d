"""Orbit and pseudo-orbit entropy estimators plus the exact counting oracle.

Inequality conventions follow the definitions verbatim: orbit-separated sets
use >= eps and orbit-spanning uses < eps, while pseudo-separated uses > eps
and pseudo-spanning uses <= eps with coordinates restricted to i < n (the
endpoint excluded).  ``strict``/``include_endpoint`` keywords exist to
harmonize the conventions for sensitivity studies; defaults are verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels, solvers
from .errors import InvalidArgumentError, ResourceBudgetError
from .graph import (
    ChainGraph,
    build_chain_graph,
    count_chains_for_word,
    enumerate_chains,
    total_chain_count_sequence,
)
from .space import EXACT_COVER_LIMIT
from .system import (
    GeneratorSystem,
    Word,
    skew_depth_for,
    skew_product,
    word_metric_matrix,
    words_of_length,
)

CHAIN_EXACT_LIMIT = 2000
WORD_EXHAUSTIVE_LIMIT = 4096
DEFAULT_WORD_SAMPLE = 256


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    method: str
    epsilon: float
    delta: float
    n_range: tuple[int, int]
    word_sample: int  # 0 = exhaustive
    raw_curve: tuple[tuple[int, float], ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "n_range": list(self.n_range),
            "word_sample": self.word_sample,
            "raw_curve": [[n, v] for n, v in self.raw_curve],
        }


def _slope_top_half(curve: Sequence[tuple[int, float]]) -> float:
    """Least-squares slope over the top half of the n-range (transient bias
    lives at small n)."""
    if len(curve) < 2:
        return 0.0
    ns = np.array([c[0] for c in curve], dtype=float)
    ys = np.array([c[1] for c in curve], dtype=float)
    cutoff = (ns[0] + ns[-1]) / 2.0
    mask = ns >= cutoff
    if mask.sum() < 2:
        mask = np.ones_like(ns, dtype=bool)
    return float(np.polyfit(ns[mask], ys[mask], 1)[0])


# -- orbit (Bufetov) counts ----------------------------------------------------


def orbit_separated_count(
    g: GeneratorSystem, w: Word, epsilon: float, *, strict: bool = False
) -> tuple[int, str]:
    """Max cardinality of a set pairwise separated by the word metric.

    Separation is d_w >= eps (non-strict) by default.  Exact via maximum
    independent set for spaces up to EXACT_COVER_LIMIT points, greedy maximal
    family (a lower bound) above.
    """
    if epsilon <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    n = g.space.point_count
    dw = word_metric_matrix(g, w)
    if n <= EXACT_COVER_LIMIT:
        conflict = (dw <= epsilon) if strict else (dw < epsilon)
        return solvers.max_independent_exact(conflict), "exact"
    pts = np.arange(n, dtype=np.int32)[:, None]
    keep = _kernels.greedy_separated(pts, dw, epsilon, 1, strict)
    return int(keep.sum()), "greedy-lower"


def orbit_spanning_count(
    g: GeneratorSystem, w: Word, epsilon: float, *, strict: bool = True
) -> tuple[int, str]:
    """Min cardinality of a set covering the space within d_w < eps (strict)."""
    if epsilon <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    n = g.space.point_count
    dw = word_metric_matrix(g, w)
    covers = (dw < epsilon) if strict else (dw <= epsilon)
    if n <= EXACT_COVER_LIMIT:
        return solvers.min_dominating_exact(covers), "exact"
    # first-fit: uncovered points are exactly those >= eps from every pick
    pts = np.arange(n, dtype=np.int32)[:, None]
    keep = _kernels.greedy_separated(pts, dw, epsilon, 1, not strict)
    return int(keep.sum()), "greedy-upper"


def _sample_words(m: int, n: int, word_sample: int, rng: np.random.Generator):
    if word_sample <= 0:
        if m**n > WORD_EXHAUSTIVE_LIMIT:
            raise ResourceBudgetError(
                f"{m ** n} words of length {n} exceed the exhaustive budget "
                f"{WORD_EXHAUSTIVE_LIMIT}; pass word_sample > 0"
            )
        return list(words_of_length(m, n)), 0
    if m**n <= word_sample:
        return list(words_of_length(m, n)), 0
    draws = rng.integers(0, m, size=(word_sample, n))
    return [tuple(int(a) for a in row) for row in draws], word_sample


def bufetov_entropy(
    g: GeneratorSystem,
    epsilon: float,
    n_range: tuple[int, int],
    word_sample: int = 0,
    seed: int = 0,
    *,
    method: str = "separated",
) -> EntropyEstimate:
    """Orbit-growth entropy estimate: slope of log word-averaged counts.

    Counts are averaged over all words of each length (exhaustive) or over a
    seeded uniform sample, which is an unbiased estimate of the 1/m**n
    average.
    """
    lo, hi = int(n_range[0]), int(n_range[1])
    if lo < 1 or hi < lo:
        raise InvalidArgumentError("bad n_range")
    rng = np.random.default_rng(seed)
    counter = orbit_separated_count if method == "separated" else orbit_spanning_count
    curve = []
    sampled = 0
    for n in range(lo, hi + 1):
        words, sampled_n = _sample_words(g.m, n, word_sample, rng)
        sampled = max(sampled, sampled_n)
        vals = [counter(g, g.word(w), epsilon)[0] for w in words]
        curve.append((n, math.log(sum(vals) / len(vals))))
    return EntropyEstimate(
        value=_slope_top_half(curve),
        method=f"orbit-{method}",
        epsilon=epsilon,
        delta=0.0,
        n_range=(lo, hi),
        word_sample=sampled,
        raw_curve=tuple(curve),
    )


# -- pseudo-orbit counts -------------------------------------------------------


def pseudo_separated_count(
    cg: ChainGraph,
    w: Word,
    epsilon: float,
    *,
    strict: bool = True,
    include_endpoint: bool = False,
    exact_limit: int = CHAIN_EXACT_LIMIT,
) -> tuple[int, str]:
    """Max family of (w, delta)-chains pairwise > eps apart at some i < n.

    Exact (maximum independent set over the chain conflict graph) when the
    chain count is at most ``exact_limit``; greedy maximal family above.
    When eps is below the smallest positive distance every pair of distinct
    chains is separated, so the count is exactly |E(w, delta)|.
    """
    if epsilon <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    n_check = len(w) + 1 if include_endpoint else len(w)
    if n_check == 0:
        raise InvalidArgumentError("empty separation range")
    if strict and epsilon < cg.system.space.min_positive_distance:
        return count_chains_for_word(cg, w), "exact"
    total = count_chains_for_word(cg, w)
    dist = cg.system.space.dist_matrix
    if total <= exact_limit:
        chains = enumerate_chains(cg, w)
        conflict = solvers.conflict_matrix(
            chains, dist, epsilon, n_check, closed=strict
        )
        return solvers.max_independent_exact(conflict), "exact"
    chains = enumerate_chains(cg, w)
    keep = _kernels.greedy_separated(chains, dist, epsilon, n_check, strict)
    return int(keep.sum()), "greedy-lower"


def pseudo_spanning_count(
    cg: ChainGraph,
    w: Word,
    epsilon: float,
    *,
    strict: bool = False,
    include_endpoint: bool = False,
    exact_limit: int = CHAIN_EXACT_LIMIT,
    greedy_cover_limit: int = 20_000,
) -> tuple[int, str]:
    """Min family of (w, delta)-chains covering E(w, delta) within eps at all
    i < n (non-strict).  Exact minimum dominating set when small, greedy cover
    above (max-coverage up to ``greedy_cover_limit`` chains, first-fit beyond).
    """
    if epsilon <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    n_check = len(w) + 1 if include_endpoint else len(w)
    if n_check == 0:
        raise InvalidArgumentError("empty coverage range")
    total = count_chains_for_word(cg, w)
    dist = cg.system.space.dist_matrix
    if total <= exact_limit:
        chains = enumerate_chains(cg, w)
        conflict = solvers.conflict_matrix(
            chains, dist, epsilon, n_check, closed=not strict
        )
        return solvers.min_dominating_exact(conflict), "exact"
    chains = enumerate_chains(cg, w)
    if total <= greedy_cover_limit:
        chosen = _kernels.greedy_cover_max_coverage(chains, dist, epsilon, n_check)
        return len(chosen), "greedy-upper"
    chosen = _kernels.greedy_cover_first_fit(chains, dist, epsilon, n_check)
    return len(chosen), "greedy-upper"


@dataclass(frozen=True)
class PseudoEntropyResult:
    estimates: tuple[tuple[float, float, EntropyEstimate], ...]  # (eps, delta, est)

    def at(self, epsilon: float, delta: float) -> EntropyEstimate:
        for e, d, est in self.estimates:
            if e == epsilon and d == delta:
                return est
        raise KeyError((epsilon, delta))

    @property
    def corner(self) -> EntropyEstimate:
        """Smallest eps after smallest delta: the finite stand-in for
        lim_{eps->0} lim_{delta->0}."""
        eps_min = min(e for e, _, _ in self.estimates)
        delta_min = min(d for _, d, _ in self.estimates)
        return self.at(eps_min, delta_min)

    def to_dict(self) -> dict:
        return {
            "matrix": [
                {"epsilon": e, "delta": d, "estimate": est.to_dict()}
                for e, d, est in self.estimates
            ],
            "corner": self.corner.to_dict(),
        }


def pseudo_entropy(
    g: GeneratorSystem,
    eps_ladder,
    delta_ladder,
    n_range: tuple[int, int],
    word_sample: int = 0,
    seed: int = 0,
) -> PseudoEntropyResult:
    """Pseudo-entropy estimates over an (eps, delta) ladder matrix.

    Each cell is the growth slope of the word-averaged pseudo-separated
    count; the limits are reported as the full matrix plus the corner value.
    No extrapolation is applied.
    """
    from .space import as_ladder

    eps_ladder = as_ladder(eps_ladder)
    delta_ladder = as_ladder(delta_ladder)
    lo, hi = int(n_range[0]), int(n_range[1])
    if lo < 1 or hi < lo:
        raise InvalidArgumentError("bad n_range")
    out = []
    for delta in delta_ladder:
        cg = build_chain_graph(g, delta)
        for eps in eps_ladder:
            rng = np.random.default_rng(seed)
            curve = []
            sampled = 0
            for n in range(lo, hi + 1):
                words, sampled_n = _sample_words(g.m, n, word_sample, rng)
                sampled = max(sampled, sampled_n)
                vals = [
                    pseudo_separated_count(cg, g.word(wl), eps)[0] for wl in words
                ]
                curve.append((n, math.log(sum(vals) / len(vals))))
            est = EntropyEstimate(
                value=_slope_top_half(curve),
                method="pseudo-separated",
                epsilon=eps,
                delta=delta,
                n_range=(lo, hi),
                word_sample=sampled,
                raw_curve=tuple(curve),
            )
            out.append((eps, delta, est))
    return PseudoEntropyResult(tuple(out))


# -- exact growth-rate oracle --------------------------------------------------


def _growth_from_counts(counts: Sequence[int], tol: float = 1e-9, p_max: int = 16):
    """Growth rate of a positive big-integer sequence via windowed count
    ratios; converged when the per-step estimate stabilizes to ``tol``.

    Window p > 1 handles periodic graphs whose single-step ratio oscillates.
    Returns (value, converged, n_used).
    """
    n = len(counts)
    for p in range(1, p_max + 1):
        prev = None
        stable = 0
        for k in range(p, n):
            if counts[k - p] == 0 or counts[k] == 0:
                return float("-inf"), True, k
            est = math.log(counts[k] / counts[k - p]) / p
            if prev is not None and abs(est - prev) < tol:
                stable += 1
                if stable >= 2:
                    return est, True, k
            else:
                stable = 0
            prev = est
    # fall back to the least-squares slope of log counts over the top half
    logs = [0.0]
    for k in range(1, n):
        if counts[k] == 0:
            return float("-inf"), True, k
        logs.append(logs[-1] + math.log(counts[k] / counts[k - 1]))
    curve = list(enumerate(logs))
    return _slope_top_half(curve), False, n


def spectral_growth_rate(cg: ChainGraph, tol: float = 1e-9, n_cap: int = 400) -> float:
    """Exact oracle: lim (1/n) log[(1/m**n) total_chain_count(n)].

    Equals log of the spectral radius of sum_i A_i minus log m, computed from
    big-integer count ratios iterated until the relative change drops below
    ``tol``.  Returns -inf when the graph has no paths (cannot happen for
    graphs built from total maps at delta >= 0).
    """
    counts = total_chain_count_sequence(cg, n_cap)
    value, _, _ = _growth_from_counts(counts, tol=tol)
    if value == float("-inf"):
        return value
    return value - math.log(cg.m)


def float_spectral_radius(cg: ChainGraph, iters: int = 2000, tol: float = 1e-12) -> float:
    """Float power-iteration cross-check of the spectral radius of sum A_i."""
    m_int = cg.adjacency.sum(axis=0).astype(np.float64)
    v = np.ones(m_int.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = m_int.T @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        w /= nrm
        new_lam = float(w @ (m_int.T @ w))
        if abs(new_lam - lam) < tol * max(1.0, abs(new_lam)):
            lam = new_lam
            break
        lam = new_lam
        v = w
    return lam


# -- skew-product identity -----------------------------------------------------


@dataclass(frozen=True)
class SkewIdentityReport:
    delta: float
    depth: int
    h_f: float
    h_g: float
    log_m: float
    discrepancy: float
    factorization_ok: bool
    factorization_checked_n: int

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "depth": self.depth,
            "h_f": self.h_f,
            "h_g": self.h_g,
            "log_m": self.log_m,
            "discrepancy": self.discrepancy,
            "factorization_ok": self.factorization_ok,
            "factorization_checked_n": self.factorization_checked_n,
        }


def verify_skew_identity(
    g: GeneratorSystem,
    delta: float,
    budget_points: int = 1 << 20,
    n_cap: int = 400,
    check_n: int = 6,
) -> SkewIdentityReport:
    """Check h(F) = log m + h(G) on the finite skew-product realization.

    The fiber depth follows the depth rule (smallest depth with
    m**-depth <= delta), which makes the branch-union relation of F exactly
    its delta-chain relation; the path counts then factor exactly as
    c_F(n) = m**depth * c_G(n), so both growth estimates agree to the
    count-ratio convergence tolerance.

    h(F) is the growth rate of the single-map chain relation of F (no word
    average); h(G) subtracts log m per the word-averaged definition.
    """
    depth = skew_depth_for(g.m, delta)
    f_sys = skew_product(g, depth, budget_points=budget_points)
    cg_g = build_chain_graph(g, delta)
    cg_f = build_chain_graph(f_sys, delta)
    counts_g = total_chain_count_sequence(cg_g, n_cap)
    counts_f = total_chain_count_sequence(cg_f, n_cap)
    factor = g.m**depth
    upto = min(check_n, n_cap)
    factorization_ok = all(
        counts_f[n] == factor * counts_g[n] for n in range(upto + 1)
    )
    est_f, _, _ = _growth_from_counts(counts_f)
    est_g, _, _ = _growth_from_counts(counts_g)
    log_m = math.log(g.m)
    h_f = est_f  # single transformation: no 1/m**n average
    h_g = est_g - log_m
    return SkewIdentityReport(
        delta=delta,
        depth=depth,
        h_f=h_f,
        h_g=h_g,
        log_m=log_m,
        discrepancy=abs(h_f - (log_m + h_g)),
        factorization_ok=factorization_ok,
        factorization_checked_n=upto,
    )
