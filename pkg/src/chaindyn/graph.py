"""The delta-chain relation as boolean adjacency, with exact path counting.

Counting uses arbitrary-precision Python integers over successor lists
(counts grow like lambda**n, so floats are out); reachability uses plain
boolean numpy arrays.  The two representations are kept separate on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import InvalidArgumentError, ResourceBudgetError
from .space import DENSE_LIMIT
from .system import Chain, GeneratorSystem, Word

CHAIN_ENUM_LIMIT = 400_000


class ChainGraph:
    """Per-generator relations A_i = {(x, y) : d(f_i(x), y) <= delta} plus
    their union.  The inequality is non-strict.  Immutable once built."""

    def __init__(self, system: GeneratorSystem, delta: float, adjacency: np.ndarray):
        self.system = system
        self.delta = float(delta)
        self.adjacency = adjacency  # bool [m, P, P]
        self.union = adjacency.any(axis=0)
        self.warnings: list[str] = []
        if delta < system.quantization_error:
            self.warnings.append(
                f"delta {delta} below quantization error "
                f"{system.quantization_error}; grid chains may miss continuum chains"
            )
        self.effective_tolerance = self.delta + system.quantization_error
        self._succ: dict[int, list[np.ndarray]] = {}
        self._union_succ: list[np.ndarray] | None = None
        self._multi_succ: list[np.ndarray] | None = None

    @property
    def m(self) -> int:
        return len(self.adjacency)

    @property
    def point_count(self) -> int:
        return self.union.shape[0]

    def successors(self, letter: int) -> list[np.ndarray]:
        if letter not in self._succ:
            self._succ[letter] = [
                np.flatnonzero(self.adjacency[letter][x]) for x in range(self.point_count)
            ]
        return self._succ[letter]

    def union_successors(self) -> list[np.ndarray]:
        if self._union_succ is None:
            self._union_succ = [
                np.flatnonzero(self.union[x]) for x in range(self.point_count)
            ]
        return self._union_succ

    def multi_successors(self) -> list[np.ndarray]:
        """Successors under sum_i A_i with multiplicity (for total counts)."""
        if self._multi_succ is None:
            self._multi_succ = [
                np.concatenate([np.flatnonzero(self.adjacency[i][x]) for i in range(self.m)])
                for x in range(self.point_count)
            ]
        return self._multi_succ


def build_chain_graph(g: GeneratorSystem, delta: float) -> ChainGraph:
    """Materialize the delta-chain relation (dense spaces only)."""
    if delta < 0:
        raise InvalidArgumentError("delta must be nonnegative")
    n = g.space.point_count
    if n > DENSE_LIMIT:
        raise ResourceBudgetError(
            f"chain graphs need a dense space ({n} > {DENSE_LIMIT} points)"
        )
    d = g.space.dist_matrix
    adj = np.stack([d[t] <= delta for t in g.tables])
    return ChainGraph(g, delta, adj)


def is_chain(cg: ChainGraph, c: Chain) -> bool:
    """True iff every step (x_j, x_{j+1}) lies in A_{i_j}."""
    if c.word.m > cg.m:
        raise InvalidArgumentError("chain word letters exceed generator count")
    for j, letter in enumerate(c.word.letters):
        if not cg.adjacency[letter][c.points[j], c.points[j + 1]]:
            return False
    return True


def count_chains_for_word(cg: ChainGraph, w: Word) -> int:
    """|E(w, delta)| exactly: labeled paths using A_{i_j} at step j."""
    counts = [1] * cg.point_count
    for letter in w.letters:
        succ = cg.successors(letter)
        nxt = [0] * cg.point_count
        for x, cx in enumerate(counts):
            if cx:
                for y in succ[x]:
                    nxt[y] += cx
        counts = nxt
    return sum(counts)


def total_chain_count(cg: ChainGraph, n: int) -> int:
    """Sum of |E(w, delta)| over all words of length n (unnormalized)."""
    if n < 0:
        raise InvalidArgumentError("n must be >= 0")
    counts = total_chain_count_sequence(cg, n)
    return counts[n]


def total_chain_count_sequence(cg: ChainGraph, n_max: int) -> list[int]:
    """[c_0, ..., c_{n_max}] with c_n = sum over |w| = n of |E(w, delta)|.

    Equals the path count of the integer matrix sum_i A_i, computed with
    exact big integers.
    """
    succ = cg.multi_successors()
    counts = [1] * cg.point_count
    out = [sum(counts)]
    for _ in range(n_max):
        nxt = [0] * cg.point_count
        for x, cx in enumerate(counts):
            if cx:
                for y in succ[x]:
                    nxt[y] += cx
        counts = nxt
        out.append(sum(counts))
    return out


def reach_layers(
    cg: ChainGraph, start: Iterable[int], n_max: int
) -> list[np.ndarray]:
    """Exact-length reachability under the union graph.

    layers[0] = start, layers[t+1] = out-neighbors of layers[t]; returns
    n_max + 1 layers as sorted point-id arrays.
    """
    start_ids = np.asarray(sorted(set(int(s) for s in start)), dtype=np.int64)
    if start_ids.size == 0:
        raise InvalidArgumentError("start set must be nonempty")
    if n_max < 1:
        raise InvalidArgumentError("n_max must be >= 1")
    mask = np.zeros(cg.point_count, dtype=bool)
    mask[start_ids] = True
    layers = [start_ids]
    for _ in range(n_max):
        mask = cg.union[mask].any(axis=0)
        layers.append(np.flatnonzero(mask))
    return layers


def enumerate_chains(
    cg: ChainGraph, w: Word, limit: int = CHAIN_ENUM_LIMIT
) -> np.ndarray:
    """All (w, delta)-chains as an int32 array [count, len(w) + 1].

    Rows are in lexicographic point order (the deterministic order the greedy
    estimators scan).  Raises ResourceBudgetError when the exact count
    exceeds ``limit``.
    """
    total = count_chains_for_word(cg, w)
    if total > limit:
        raise ResourceBudgetError(
            f"{total} chains for word of length {len(w)} exceed the enumeration limit {limit}"
        )
    chains = np.arange(cg.point_count, dtype=np.int32)[:, None]
    for letter in w.letters:
        succ = cg.successors(letter)
        last = chains[:, -1]
        counts = np.fromiter((len(succ[x]) for x in last), dtype=np.int64, count=len(last))
        rep = np.repeat(np.arange(len(chains)), counts)
        if len(rep) == 0:
            return np.empty((0, chains.shape[1] + 1), dtype=np.int32)
        nxt = np.concatenate([succ[x] for x in last]).astype(np.int32)
        chains = np.concatenate([chains[rep], nxt[:, None]], axis=1)
    return chains


# -- digraph primitives shared by recurrence/structure -------------------------


def strongly_connected(adj: np.ndarray) -> bool:
    n_comp, _ = connected_components(sparse.csr_matrix(adj), directed=True, connection="strong")
    return n_comp == 1


def bfs_levels(adj_succ: Sequence[np.ndarray], root: int, n: int) -> np.ndarray:
    levels = np.full(n, -1, dtype=np.int64)
    levels[root] = 0
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj_succ[u]:
                if levels[v] < 0:
                    levels[v] = levels[u] + 1
                    nxt.append(int(v))
        frontier = nxt
    return levels


def digraph_period(adj: np.ndarray, root: int = 0) -> int:
    """Period (gcd of cycle lengths) of a strongly connected digraph.

    gcd over all edges (u, v) of level(u) + 1 - level(v) for any BFS level
    assignment; independent of the root.
    """
    import math

    n = adj.shape[0]
    succ = [np.flatnonzero(adj[x]) for x in range(n)]
    levels = bfs_levels(succ, root, n)
    g = 0
    for u in range(n):
        lu = levels[u]
        for v in succ[u]:
            g = math.gcd(g, int(lu + 1 - levels[v]))
    return abs(g) if g else 1


def is_primitive(adj: np.ndarray) -> bool:
    return strongly_connected(adj) and digraph_period(adj) == 1


def wielandt_cap(n: int) -> int:
    """Primitivity index bound (n - 1)**2 + 1 for an n-node primitive graph."""
    return (n - 1) ** 2 + 1
