"""Cyclic structure of chain transitive systems.

Period via cycle-length gcd, the class decomposition with its permutation
check and per-class mixing of the power system, the period ladder used as
adding-machine evidence, odometer construction, and the numerical-semigroup
facts behind the mixing arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError, NotTransitiveError, ResourceBudgetError
from .graph import (
    ChainGraph,
    bfs_levels,
    build_chain_graph,
    digraph_period,
    strongly_connected,
)
from .space import FiniteMetricSpace
from .system import GeneratorSystem, power_system, system_from_descriptions
from .errors import ResourceBudgetError as _Budget


def period_k(cg: ChainGraph) -> int:
    """Digraph period of the union graph: the common gcd of the sets of
    return-chain lengths, the same for every basepoint."""
    if not strongly_connected(cg.union):
        raise NotTransitiveError("period is defined for chain transitive systems")
    return digraph_period(cg.union)


@dataclass(frozen=True)
class DecompositionReport:
    epsilon: float
    k: int
    class_of: tuple[int, ...]
    permutation_ok: bool
    per_class_mixing: Optional[tuple[bool, ...]]
    case: str  # mixing | periodic | diagnostic-only

    def class_members(self, c: int) -> tuple[int, ...]:
        return tuple(i for i, cl in enumerate(self.class_of) if cl == c)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "k": self.k,
            "class_of": list(self.class_of),
            "permutation_ok": self.permutation_ok,
            "per_class_mixing": list(self.per_class_mixing)
            if self.per_class_mixing is not None
            else None,
            "case": self.case,
        }


def epsilon_classes(
    cg: ChainGraph, power_budget: int = 1024
) -> DecompositionReport:
    """Decompose into the k cyclically permuted equivalence classes.

    Classes are BFS level mod k from an arbitrary root; on a strongly
    connected digraph every chain from x to y has length congruent to
    level(y) - level(x) mod k, so equal class is equivalent to being joined
    by a chain of length a multiple of k.  The permutation check then
    verifies every generator edge advances the class index by exactly 1.
    Each class is tested for chain mixing of the k-th power system unless the
    m**k generator blowup exceeds ``power_budget`` (case diagnostic-only).
    """
    if not strongly_connected(cg.union):
        raise NotTransitiveError("decomposition needs chain transitivity")
    n = cg.point_count
    k = digraph_period(cg.union)
    succ = cg.union_successors()
    levels = bfs_levels(succ, 0, n)
    class_of = tuple(int(l % k) for l in levels)
    permutation_ok = True
    for u in range(n):
        for v in succ[u]:
            if class_of[v] != (class_of[u] + 1) % k:
                permutation_ok = False
                break
        if not permutation_ok:
            break
    g = cg.system
    per_class: Optional[tuple[bool, ...]]
    case = "mixing" if k == 1 else "periodic"
    try:
        gk = power_system(g, k, budget=power_budget)
        cg_k = build_chain_graph(gk, cg.delta)
        flags = []
        for c in range(k):
            members = np.array([i for i in range(n) if class_of[i] == c])
            sub = cg_k.union[np.ix_(members, members)]
            flags.append(bool(strongly_connected(sub) and digraph_period(sub) == 1))
        per_class = tuple(flags)
    except _Budget:
        per_class = None
        case = "diagnostic-only"
    return DecompositionReport(
        epsilon=cg.delta,
        k=k,
        class_of=class_of,
        permutation_ok=permutation_ok,
        per_class_mixing=per_class,
        case=case,
    )


@dataclass(frozen=True)
class LadderDiagnostic:
    entries: tuple[tuple[float, int], ...]  # (epsilon, k_epsilon), epsilon decreasing
    divisibility_ok: bool
    growth_flag: str  # stabilized | growing
    truncated_reason: str = ""

    def to_dict(self) -> dict:
        return {
            "entries": [list(e) for e in self.entries],
            "divisibility_ok": self.divisibility_ok,
            "growth_flag": self.growth_flag,
            "truncated_reason": self.truncated_reason,
        }


def k_ladder(
    g: GeneratorSystem,
    eps_ladder,
    delta_rule: Callable[[float], float] | str = "equal",
) -> LadderDiagnostic:
    """Period k_eps down an epsilon ladder (delta tied to eps, default equal).

    Smaller-eps periods must be multiples of larger-eps periods; the growth
    flag says whether the ladder has stabilized by its end.  The adding
    machine case shows up as a growing, divisibility-consistent ladder.
    """
    from .space import as_ladder

    if delta_rule == "equal":
        rule = lambda e: e
    elif callable(delta_rule):
        rule = delta_rule
    else:
        raise InvalidArgumentError(f"unknown delta rule {delta_rule!r}")
    entries = []
    reason = ""
    for eps in as_ladder(eps_ladder):
        cg = build_chain_graph(g, rule(eps))
        if not strongly_connected(cg.union):
            reason = f"transitivity lost at epsilon {eps}"
            break
        entries.append((eps, digraph_period(cg.union)))
    div_ok = all(
        later % earlier == 0
        for (_, earlier), (_, later) in zip(entries, entries[1:])
    )
    if len(entries) >= 2 and entries[-1][1] != entries[-2][1]:
        flag = "growing"
    else:
        flag = "stabilized"
    return LadderDiagnostic(tuple(entries), div_ok, flag, reason)


# -- adding machine -------------------------------------------------------------


@dataclass(frozen=True)
class OdometerSpec:
    """Finite truncation of the digit sequence of an adding machine."""

    radices: tuple[int, ...]

    def __post_init__(self):
        if not self.radices:
            raise InvalidArgumentError("odometer needs at least one digit")
        if any(j < 2 for j in self.radices):
            raise InvalidArgumentError("all odometer radices must be >= 2")

    @property
    def state_count(self) -> int:
        return math.prod(self.radices)


def build_odometer_space(spec: OdometerSpec, budget: int = 1 << 20) -> FiniteMetricSpace:
    """Digit-product space with the first-disagreement metric
    d(a, b) = prod_{i < k} 1/j_i, mirroring the shift-space metric."""
    count = spec.state_count
    if count > budget:
        raise ResourceBudgetError(f"odometer state space {count} exceeds budget {budget}")
    radices = spec.radices
    depth = len(radices)
    digit_mat = np.empty((count, depth), dtype=np.int64)
    rem = np.arange(count, dtype=np.int64)
    for i, j in enumerate(radices):
        digit_mat[:, i] = rem % j
        rem //= j
    scales = np.ones(depth + 1)
    for i, j in enumerate(radices):
        scales[i + 1] = scales[i] / j

    def pair(a, b):
        da = digit_mat[np.asarray(a)]
        db = digit_mat[np.asarray(b)]
        neq = da != db
        first = np.where(neq.any(axis=1), neq.argmax(axis=1), depth)
        return np.where(first >= depth, 0.0, scales[np.minimum(first, depth)])

    labels = [
        "".join(str(d) for d in row) for row in digit_mat
    ] if count <= 4096 else None
    return FiniteMetricSpace(
        count,
        pair,
        diameter=1.0,
        min_positive=float(scales[depth - 1]),
        labels=labels,
        kind="odometer",
        params={"radices": list(radices)},
    )


def odometer_system(spec: OdometerSpec, budget: int = 1 << 20) -> GeneratorSystem:
    """Single-generator adding machine: add (1, 0, 0, ...) with carry to the
    right, digits cyclic mod their radices."""
    space = build_odometer_space(spec, budget)
    return system_from_descriptions(space, [{"kind": "odometer_step"}])


# -- numerical semigroup facts ----------------------------------------------------


def gcd_of_set(t) -> int:
    vals = sorted(set(int(v) for v in t))
    if not vals:
        raise InvalidArgumentError("gcd of an empty set")
    if any(v <= 0 for v in vals):
        raise InvalidArgumentError("gcd_of_set expects positive integers")
    return math.gcd(*vals) if len(vals) > 1 else vals[0]


def additive_stabilization_bound(generators) -> tuple[int, int]:
    """(d, N) with d = gcd and N the least integer such that n*d is a
    nonnegative combination of the generators for every n >= N.

    Dynamic programming over the scaled (gcd-divided) generators up to the
    two-generator Frobenius-style cap, then the certified window: once
    min-generator consecutive values are representable, everything beyond is.
    """
    gens = sorted(set(int(v) for v in generators))
    if not gens:
        raise InvalidArgumentError("empty generator set")
    if any(v <= 0 for v in gens):
        raise InvalidArgumentError("generators must be positive")
    d = gcd_of_set(gens)
    scaled = sorted(v // d for v in gens)
    a_min, a_max = scaled[0], scaled[-1]
    if a_min == 1:
        return d, 1
    cap = (a_min - 1) * (a_max - 1) + a_min + 1
    reach = np.zeros(cap + 1, dtype=bool)
    reach[0] = True
    for a in scaled:
        for v in range(a, cap + 1):
            if reach[v - a]:
                reach[v] = True
    non_rep = [v for v in range(1, cap + 1) if not reach[v]]
    n_start = (non_rep[-1] + 1) if non_rep else 1
    # certify the window [n_start, n_start + a_min)
    assert all(reach[v] for v in range(n_start, min(n_start + a_min, cap + 1)))
    return d, n_start


def representable(n: int, a: int, b: int) -> bool:
    """Whether n is a nonnegative integer combination of a and b."""
    if n < 0:
        return False
    for p in range(n // a + 1):
        if (n - p * a) % b == 0:
            return True
    return False


def frobenius_two(a: int, b: int) -> int:
    """Largest integer not representable by coprime a, b: a*b - a - b."""
    if a < 1 or b < 1:
        raise InvalidArgumentError("generators must be positive")
    if math.gcd(a, b) != 1:
        raise InvalidArgumentError("frobenius_two needs coprime generators")
    return a * b - a - b


# -- connectivity corollary --------------------------------------------------------


@dataclass(frozen=True)
class ConnectivityEquivalenceReport:
    epsilon: float
    applicable: bool
    recurrent: Optional[bool]
    transitive: Optional[bool]
    totally_transitive: Optional[bool]
    mixing: Optional[bool]
    power_cap: int
    agree: Optional[bool]
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "applicable": self.applicable,
            "recurrent": self.recurrent,
            "transitive": self.transitive,
            "totally_transitive": self.totally_transitive,
            "mixing": self.mixing,
            "power_cap": self.power_cap,
            "agree": self.agree,
            "detail": self.detail,
        }


def connectivity_equivalence_check(
    g: GeneratorSystem, epsilon: float, power_cap: int = 4
) -> ConnectivityEquivalenceReport:
    """On an eps-connected space, chain recurrence, transitivity, total
    transitivity (powers up to ``power_cap``) and mixing should agree.

    The eps-proximity graph (edges d <= eps) is the discrete surrogate for
    connectedness; when it is disconnected the corollary does not apply.
    """
    from scipy import sparse
    from scipy.sparse.csgraph import connected_components

    from .recurrence import is_chain_mixing, is_chain_transitive, recurrence_time

    prox = g.space.dist_matrix <= epsilon
    n_comp, _ = connected_components(
        sparse.csr_matrix(prox), directed=False
    )
    if n_comp != 1:
        return ConnectivityEquivalenceReport(
            epsilon, False, None, None, None, None, power_cap, None,
            f"space is not epsilon-connected ({n_comp} proximity components)",
        )
    cg = build_chain_graph(g, epsilon)
    rep = recurrence_time(cg)
    transitive = rep.transitive
    totally = True
    for kk in range(1, power_cap + 1):
        gk = power_system(g, kk)
        if not is_chain_transitive(build_chain_graph(gk, epsilon)):
            totally = False
            break
    mixing = is_chain_mixing(cg)
    flags = [rep.recurrent, transitive, totally, mixing]
    return ConnectivityEquivalenceReport(
        epsilon,
        True,
        rep.recurrent,
        transitive,
        totally,
        mixing,
        power_cap,
        all(flags) or not any(flags),
    )
