"""Finite metric spaces: builders, validation, covering numbers, box dimension.

All spaces are immutable after construction.  Distances are served either
from a dense matrix (point_count <= DENSE_LIMIT) or recomputed on demand
from a vectorized pair function; quadratic memory is the binding constraint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError, MetricViolationError, ResourceBudgetError

DENSE_LIMIT = 4096
EXACT_COVER_LIMIT = 16


@dataclass(frozen=True)
class ScaleLadder:
    """Strictly decreasing ladder of positive scales (finite stand-in for a limit)."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise InvalidArgumentError("scale ladder must be nonempty")
        if any(v <= 0 for v in vals):
            raise InvalidArgumentError("scale ladder values must be positive")
        if any(a <= b for a, b in zip(vals, vals[1:])):
            raise InvalidArgumentError("scale ladder must be strictly decreasing")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def as_ladder(values) -> ScaleLadder:
    if isinstance(values, ScaleLadder):
        return values
    return ScaleLadder(tuple(values))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    axiom: Optional[str] = None  # identity | symmetry | nonnegativity | triangle
    witness: Optional[tuple] = None
    detail: str = ""


class FiniteMetricSpace:
    """An indexed point set with a validated metric.

    Parameters
    ----------
    point_count : number of points; ids are 0..point_count-1
    pair_fn : vectorized (i_array, j_array) -> float64 distances
    diameter : max pairwise distance (computed if omitted and space is dense)
    min_positive : smallest nonzero distance (ditto)
    labels : optional human-readable point descriptors
    """

    def __init__(
        self,
        point_count: int,
        pair_fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
        *,
        diameter: Optional[float] = None,
        min_positive: Optional[float] = None,
        labels: Optional[Sequence[str]] = None,
        kind: str = "custom",
        params: Optional[dict] = None,
    ):
        if point_count < 1:
            raise InvalidArgumentError("point_count must be >= 1")
        self.point_count = int(point_count)
        self._pair_fn = pair_fn
        self.labels = list(labels) if labels is not None else None
        self.kind = kind
        self.params = dict(params or {})
        self._matrix: Optional[np.ndarray] = None
        self._diameter = diameter
        self._min_positive = min_positive

    # -- distance access ---------------------------------------------------

    def dist(self, i: int, j: int) -> float:
        return float(self._pair_fn(np.asarray([i]), np.asarray([j]))[0])

    def dist_pairs(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        return self._pair_fn(np.asarray(i), np.asarray(j))

    def dist_row(self, i: int) -> np.ndarray:
        js = np.arange(self.point_count)
        return self._pair_fn(np.full(self.point_count, i), js)

    @property
    def is_dense(self) -> bool:
        return self.point_count <= DENSE_LIMIT

    @property
    def dist_matrix(self) -> np.ndarray:
        if self._matrix is None:
            if not self.is_dense:
                raise ResourceBudgetError(
                    f"dense matrix unavailable for {self.point_count} > {DENSE_LIMIT} points"
                )
            n = self.point_count
            ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
            self._matrix = self._pair_fn(ii.ravel(), jj.ravel()).reshape(n, n)
        return self._matrix

    @property
    def diameter(self) -> float:
        if self._diameter is None:
            self._diameter = float(self.dist_matrix.max()) if self.point_count > 1 else 0.0
        return self._diameter

    @property
    def min_positive_distance(self) -> float:
        """Smallest nonzero pairwise distance; inf on a one-point space."""
        if self._min_positive is None:
            if self.point_count == 1:
                self._min_positive = float("inf")
            else:
                m = self.dist_matrix
                vals = m[m > 0]
                self._min_positive = float(vals.min()) if vals.size else float("inf")
        return self._min_positive

    def __repr__(self):
        return f"FiniteMetricSpace(kind={self.kind!r}, points={self.point_count})"

    def describe(self) -> dict:
        return {"kind": self.kind, "point_count": self.point_count, **self.params}


# -- builders ---------------------------------------------------------------


def build_circle_grid(n: int, circumference: float = 1.0) -> FiniteMetricSpace:
    """n evenly spaced points on a circle; shortest-arc distance."""
    if n < 2:
        raise InvalidArgumentError("circle grid needs n >= 2")
    if circumference <= 0:
        raise InvalidArgumentError("circumference must be positive")
    c = float(circumference)
    pos = np.arange(n) * (c / n)

    def pair(i, j):
        d = np.abs(pos[i] - pos[j])
        return np.minimum(d, c - d)

    return FiniteMetricSpace(
        n,
        pair,
        diameter=(n // 2) * (c / n),
        min_positive=c / n,
        kind="circle",
        params={"n": n, "circumference": c},
    )


def build_disjoint_union(
    parts: Sequence[FiniteMetricSpace], cross_distance: float
) -> FiniteMetricSpace:
    """Disjoint union; all cross-part distances equal ``cross_distance``.

    The triangle inequality across parts needs cross_distance >= diam/2 for
    every part: for x,y in one part and z in another,
    d(x,y) <= d(x,z) + d(z,y) = 2*cross_distance.
    """
    parts = list(parts)
    if not parts:
        raise InvalidArgumentError("union needs at least one part")
    if len(parts) == 1:
        return parts[0]
    if cross_distance <= 0:
        raise InvalidArgumentError("cross_distance must be positive")
    max_diam = max(p.diameter for p in parts)
    if cross_distance < max_diam / 2:
        raise MetricViolationError(
            f"cross_distance {cross_distance} < half the largest part diameter "
            f"{max_diam / 2}: triangle inequality would fail"
        )
    offsets = np.cumsum([0] + [p.point_count for p in parts])
    total = int(offsets[-1])
    cross = float(cross_distance)

    def pair(i, j):
        i = np.asarray(i)
        j = np.asarray(j)
        pi = np.searchsorted(offsets, i, side="right") - 1
        pj = np.searchsorted(offsets, j, side="right") - 1
        out = np.full(i.shape, cross, dtype=np.float64)
        for p_idx, p in enumerate(parts):
            same = (pi == p_idx) & (pj == p_idx)
            if same.any():
                out[same] = p.dist_pairs(i[same] - offsets[p_idx], j[same] - offsets[p_idx])
        return out

    labels = None
    if all(p.labels is not None for p in parts):
        labels = [f"{k}:{lab}" for k, p in enumerate(parts) for lab in p.labels]
    return FiniteMetricSpace(
        total,
        pair,
        diameter=max(max_diam, cross),
        min_positive=min(min(p.min_positive_distance for p in parts), cross),
        labels=labels,
        kind="disjoint_union",
        params={"parts": [p.describe() for p in parts], "cross_distance": cross},
    )


def union_part_of(space: FiniteMetricSpace, point: int) -> int:
    """Part index of a point in a disjoint-union space."""
    if space.kind != "disjoint_union":
        raise InvalidArgumentError("not a disjoint union space")
    sizes = [p["point_count"] for p in space.params["parts"]]
    offsets = np.cumsum([0] + sizes)
    return int(np.searchsorted(offsets, point, side="right") - 1)


def build_product(a: FiniteMetricSpace, b: FiniteMetricSpace) -> FiniteMetricSpace:
    """Product space under the max metric; index (x, y) -> x * |b| + y."""
    nb = b.point_count

    def pair(i, j):
        i = np.asarray(i)
        j = np.asarray(j)
        da = a.dist_pairs(i // nb, j // nb)
        db = b.dist_pairs(i % nb, j % nb)
        return np.maximum(da, db)

    return FiniteMetricSpace(
        a.point_count * nb,
        pair,
        diameter=max(a.diameter, b.diameter),
        min_positive=min(a.min_positive_distance, b.min_positive_distance),
        kind="product",
        params={"a": a.describe(), "b": b.describe()},
    )


def build_shift_space(m: int, depth: int, budget: int = 1 << 20) -> FiniteMetricSpace:
    """All words of length ``depth`` over m symbols; d(w, w') = m**-k with k
    the first index of disagreement (0 when the words are equal)."""
    if m < 2:
        raise InvalidArgumentError("shift space needs m >= 2")
    if depth < 1:
        raise InvalidArgumentError("depth must be >= 1")
    count = m**depth
    if count > budget:
        raise ResourceBudgetError(f"shift space size {count} exceeds budget {budget}")
    # symbol 0 of a word is the most significant base-m digit of its id
    powers = m ** np.arange(depth - 1, -1, -1, dtype=np.int64)

    def digits(idx):
        return (np.asarray(idx)[:, None] // powers[None, :]) % m

    def pair(i, j):
        di = digits(i)
        dj = digits(j)
        neq = di != dj
        first = np.where(neq.any(axis=1), neq.argmax(axis=1), depth)
        return np.where(first >= depth, 0.0, np.power(float(m), -first.astype(np.float64)))

    labels = None
    if count <= DENSE_LIMIT:
        labels = [
            "".join(str(d) for d in row)
            for row in (np.arange(count)[:, None] // powers[None, :]) % m
        ]
    return FiniteMetricSpace(
        count,
        pair,
        diameter=1.0,
        min_positive=float(m) ** (-(depth - 1)),
        labels=labels,
        kind="shift",
        params={"m": m, "depth": depth},
    )


def shift_word_digits(space: FiniteMetricSpace, idx: int) -> tuple[int, ...]:
    """Symbols of a shift-space point, leading symbol first."""
    m, depth = space.params["m"], space.params["depth"]
    out = []
    for p in range(depth - 1, -1, -1):
        out.append((idx // m**p) % m)
    return tuple(out)


def from_distance_matrix(
    matrix: np.ndarray, labels: Optional[Sequence[str]] = None
) -> FiniteMetricSpace:
    """Wrap an explicit distance matrix (used for hand-built instances)."""
    mat = np.asarray(matrix, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidArgumentError("distance matrix must be square")

    def pair(i, j):
        return mat[np.asarray(i), np.asarray(j)]

    space = FiniteMetricSpace(mat.shape[0], pair, labels=labels, kind="matrix")
    space._matrix = mat
    return space


# -- validation --------------------------------------------------------------


def validate_metric(s: FiniteMetricSpace, sample_triples: int = 200_000, seed: int = 0) -> ValidationReport:
    """Check the metric axioms; exhaustive for dense spaces of moderate size.

    Reports the first violated axiom with a witness triple.  On spaces whose
    triple count exceeds the sample budget, triangle triples are sampled
    (seeded) and the report says so.
    """
    n = s.point_count
    if n > DENSE_LIMIT:
        rng = np.random.default_rng(seed)
        ii = rng.integers(0, n, size=sample_triples)
        jj = rng.integers(0, n, size=sample_triples)
        kk = rng.integers(0, n, size=sample_triples)
        dij = s.dist_pairs(ii, jj)
        dji = s.dist_pairs(jj, ii)
        if (dij < 0).any():
            b = int(np.argmax(dij < 0))
            return ValidationReport(False, "nonnegativity", (int(ii[b]), int(jj[b])))
        bad = np.abs(dij - dji) > 0
        if bad.any():
            b = int(np.argmax(bad))
            return ValidationReport(False, "symmetry", (int(ii[b]), int(jj[b])))
        dii = s.dist_pairs(ii, ii)
        if (dii != 0).any():
            b = int(np.argmax(dii != 0))
            return ValidationReport(False, "identity", (int(ii[b]),))
        dik = s.dist_pairs(ii, kk)
        dkj = s.dist_pairs(kk, jj)
        slack = dij - (dik + dkj)
        if (slack > 1e-12).any():
            b = int(np.argmax(slack))
            return ValidationReport(
                False, "triangle", (int(ii[b]), int(kk[b]), int(jj[b]))
            )
        return ValidationReport(True, detail="sampled")

    mat = s.dist_matrix
    if (mat < 0).any():
        i, j = np.unravel_index(np.argmax(mat < 0), mat.shape)
        return ValidationReport(False, "nonnegativity", (int(i), int(j)))
    if (np.diag(mat) != 0).any():
        i = int(np.argmax(np.diag(mat) != 0))
        return ValidationReport(False, "identity", (i,), "d(x,x) != 0")
    off = mat.copy()
    np.fill_diagonal(off, np.inf)
    zero_pair = off == 0
    if zero_pair.any():
        i, j = np.unravel_index(np.argmax(zero_pair), mat.shape)
        return ValidationReport(
            False, "identity", (int(i), int(j)), "distinct points at distance 0"
        )
    asym = mat != mat.T
    if asym.any():
        i, j = np.unravel_index(np.argmax(asym), mat.shape)
        return ValidationReport(False, "symmetry", (int(i), int(j)))
    for k in range(n):
        slack = mat - (mat[:, k : k + 1] + mat[k : k + 1, :])
        slack_max = slack.max()
        if slack_max > 1e-12:
            i, j = np.unravel_index(np.argmax(slack), slack.shape)
            return ValidationReport(
                False,
                "triangle",
                (int(i), k, int(j)),
                f"d(x,z) exceeds d(x,y)+d(y,z) by {slack_max:.3g}",
            )
    return ValidationReport(True, detail="exhaustive")


# -- covering numbers and box dimension ---------------------------------------


@dataclass(frozen=True)
class CoveringNumber:
    count: int
    exact: bool

    def __int__(self):
        return self.count


def _exact_min_clique_cover(adj: np.ndarray) -> int:
    """Minimum cover of all vertices by cliques of the threshold graph.

    Subsets of diameter <= delta are exactly the cliques of the graph with
    edges d(x,y) <= delta, so the covering number is a minimum clique cover.
    Exhaustive search over maximal cliques, feasible for <= EXACT_COVER_LIMIT
    points.
    """
    n = adj.shape[0]
    masks = []
    # Bron-Kerbosch, iterative, collecting maximal cliques as bitmasks
    nbr = [int(sum(1 << j for j in range(n) if adj[i, j] and j != i)) for i in range(n)]
    stack = [(0, (1 << n) - 1, 0)]
    while stack:
        r, p, x = stack.pop()
        if p == 0 and x == 0:
            masks.append(r)
            continue
        pivot_pool = p | x
        pivot = (pivot_pool & -pivot_pool).bit_length() - 1
        cand = p & ~nbr[pivot]
        while cand:
            v = (cand & -cand).bit_length() - 1
            vbit = 1 << v
            cand &= ~vbit
            stack.append((r | vbit, p & nbr[v], x & nbr[v]))
            p &= ~vbit
            x |= vbit
    full = (1 << n) - 1
    from .solvers import exact_set_cover_masks

    return exact_set_cover_masks(masks, full, n)


def _greedy_diameter_cover(s: FiniteMetricSpace, delta: float) -> int:
    """Farthest-point heuristic: grow diameter-<=delta sets around the point
    farthest from everything already covered."""
    n = s.point_count
    covered = np.zeros(n, dtype=bool)
    min_dist_to_covered = np.full(n, np.inf)
    count = 0
    while not covered.all():
        cand = np.where(~covered)[0]
        seed_pt = int(cand[np.argmax(min_dist_to_covered[cand])])
        row = s.dist_row(seed_pt)
        members = [seed_pt]
        member_rows = [row]
        # admit nearest-first while the set diameter stays within delta
        order = cand[np.argsort(row[cand], kind="stable")]
        for q in order:
            if q == seed_pt:
                continue
            if row[q] > delta:
                break
            q_row = s.dist_row(int(q))
            if all(q_row[mm] <= delta for mm in members):
                members.append(int(q))
                member_rows.append(q_row)
        for q, q_row in zip(members, member_rows):
            covered[q] = True
            np.minimum(min_dist_to_covered, q_row, out=min_dist_to_covered)
        count += 1
    return count


def covering_number(s: FiniteMetricSpace, delta: float) -> CoveringNumber:
    """Minimum number of subsets of diameter <= delta covering the space.

    Exact (exhaustive clique cover) for point_count <= EXACT_COVER_LIMIT,
    greedy farthest-point upper bound above that, tagged accordingly.
    """
    if delta <= 0:
        raise InvalidArgumentError("delta must be positive")
    if delta >= s.diameter:
        return CoveringNumber(1, True)
    if delta < s.min_positive_distance:
        return CoveringNumber(s.point_count, True)
    if s.point_count <= EXACT_COVER_LIMIT:
        adj = s.dist_matrix <= delta
        return CoveringNumber(_exact_min_clique_cover(adj), True)
    return CoveringNumber(_greedy_diameter_cover(s, delta), False)


def ball_covering_number(s: FiniteMetricSpace, radius: float) -> CoveringNumber:
    """Minimum number of closed balls of the given radius covering the space.

    The box-dimension estimator uses diameter-based covers (covering_number);
    this ball variant exists for callers mirroring ball-based covering
    arguments.  Exact by set cover for small spaces, greedy otherwise.
    """
    if radius <= 0:
        raise InvalidArgumentError("radius must be positive")
    n = s.point_count
    if radius >= s.diameter:
        return CoveringNumber(1, True)
    if n <= EXACT_COVER_LIMIT:
        from .solvers import exact_set_cover_masks

        masks = []
        for c in range(n):
            row = s.dist_row(c)
            masks.append(int(sum(1 << j for j in range(n) if row[j] <= radius)))
        return CoveringNumber(exact_set_cover_masks(masks, (1 << n) - 1, n), True)
    covered = np.zeros(n, dtype=bool)
    min_dist_to_covered = np.full(n, np.inf)
    count = 0
    while not covered.all():
        cand = np.where(~covered)[0]
        center = int(cand[np.argmax(min_dist_to_covered[cand])])
        row = s.dist_row(center)
        covered |= row <= radius
        np.minimum(min_dist_to_covered, row, out=min_dist_to_covered)
        count += 1
    return CoveringNumber(count, False)


@dataclass(frozen=True)
class BoxDimensionEstimate:
    lower_b: float
    upper_b: float
    curve: tuple[tuple[float, int], ...] = field(default_factory=tuple)


def box_dimension_estimate(s: FiniteMetricSpace, ladder) -> BoxDimensionEstimate:
    """Finite-scale box dimension: slopes of log N_delta against log(1/delta).

    Consecutive-pair finite differences stand in for liminf (lower_b = min
    slope) and limsup (upper_b = max slope); the raw curve is returned so
    callers can judge the scaling regime themselves.
    """
    ladder = as_ladder(ladder)
    if s.point_count == 1:
        curve = tuple((d, 1) for d in ladder)
        return BoxDimensionEstimate(0.0, 0.0, curve)
    for d in ladder:
        if not (s.min_positive_distance <= d <= s.diameter):
            raise InvalidArgumentError(
                f"ladder value {d} outside meaningful range "
                f"[{s.min_positive_distance}, {s.diameter}]"
            )
    curve = tuple((d, covering_number(s, d).count) for d in ladder)
    slopes = []
    for (d1, n1), (d2, n2) in zip(curve, curve[1:]):
        slopes.append(
            (np.log(n2) - np.log(n1)) / (np.log(1.0 / d2) - np.log(1.0 / d1))
        )
    if not slopes:
        # single-rung ladder: one global ratio
        d, nd = curve[0]
        slopes = [np.log(nd) / np.log(1.0 / d)] if d < 1 else [0.0]
    return BoxDimensionEstimate(float(min(slopes)), float(max(slopes)), curve)
