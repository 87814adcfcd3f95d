"""Generator systems: quantized point maps, words, powers, products, skew product.

Composition convention (fixed once, reused by every word-indexed structure):
for a word w = i_0 i_1 ... i_{k-1}, the composition f_w applies the RIGHTMOST
letter first, f_w = f_{i_0} o f_{i_1} o ... o f_{i_{k-1}}.  A labeled chain for
w reads the word left to right: step j applies f_{i_j}, so the endpoint of the
exact orbit chain started at x is f_{w reversed}(x).  The Bowen word metric
d_w takes the max over the forward orbit prefixes (letters applied in order
i_0, i_1, ...), with the empty suffix contributing the identity term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InvalidArgumentError,
    ResourceBudgetError,
    UnsupportedMapError,
)
from .space import (
    FiniteMetricSpace,
    build_product,
    build_shift_space,
    union_part_of,
)

GENERATOR_BUDGET = 1024


@dataclass(frozen=True)
class Word:
    """A finite word over the generator alphabet {0, ..., m-1}."""

    letters: tuple[int, ...]
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidArgumentError("alphabet size must be >= 1")
        if any(not (0 <= a < self.m) for a in self.letters):
            raise InvalidArgumentError("word letter out of range")

    def __len__(self):
        return len(self.letters)

    @property
    def reversed_letters(self) -> tuple[int, ...]:
        return tuple(reversed(self.letters))


@dataclass(frozen=True)
class Chain:
    """A labeled pseudo-orbit; validity at tolerance delta is a ChainGraph query."""

    word: Word
    points: tuple[int, ...]

    def __post_init__(self):
        if len(self.points) != len(self.word) + 1:
            raise InvalidArgumentError("chain needs len(word) + 1 points")


class GeneratorSystem:
    """m total point maps over a finite metric space.

    quantization_error is the largest snap distance incurred when the maps
    were quantized from continuum descriptions (0 for exact tables).
    """

    def __init__(
        self,
        space: FiniteMetricSpace,
        tables: Sequence[np.ndarray],
        quantization_error: float = 0.0,
        descriptions: Optional[list] = None,
    ):
        if not tables:
            raise InvalidArgumentError("need at least one generator")
        self.space = space
        self.tables = [np.asarray(t, dtype=np.int64) for t in tables]
        n = space.point_count
        for t in self.tables:
            if t.shape != (n,):
                raise InvalidArgumentError(
                    f"map table has length {t.shape}, expected ({n},)"
                )
            if t.min() < 0 or t.max() >= n:
                raise InvalidArgumentError("map table entry out of range")
        self.quantization_error = float(quantization_error)
        self.descriptions = descriptions or [{"kind": "table"}] * len(tables)

    @property
    def m(self) -> int:
        return len(self.tables)

    def word(self, letters: Sequence[int]) -> Word:
        return Word(tuple(int(a) for a in letters), self.m)

    def describe(self) -> dict:
        return {
            "space": self.space.describe(),
            "maps": self.descriptions,
            "quantization_error": self.quantization_error,
        }

    def __repr__(self):
        return f"GeneratorSystem(m={self.m}, points={self.space.point_count})"


def from_map_tables(
    space: FiniteMetricSpace, tables: Sequence[Sequence[int]]
) -> GeneratorSystem:
    """Exact system from explicit point-map tables (quantization_error = 0)."""
    arrs = [np.asarray(t, dtype=np.int64) for t in tables]
    return GeneratorSystem(space, arrs, 0.0, [{"kind": "table"} for _ in arrs])


# -- map description language -------------------------------------------------


def _nearest_on_circle(space: FiniteMetricSpace, targets: np.ndarray):
    """Snap continuum positions to grid points; ties toward the lower index."""
    n = space.params["n"]
    c = space.params["circumference"]
    step = c / n
    pos = targets % c
    k0 = np.floor(pos / step).astype(np.int64) % n
    k1 = (k0 + 1) % n
    d0 = np.abs(pos - k0 * step)
    d0 = np.minimum(d0, c - d0)
    d1 = np.abs(pos - k1 * step)
    d1 = np.minimum(d1, c - d1)
    pick_k1 = (d1 < d0) | ((d1 == d0) & (k1 < k0))
    table = np.where(pick_k1, k1, k0)
    err = np.where(pick_k1, d1, d0)
    return table, float(err.max()) if len(err) else 0.0


def quantize_map(space: FiniteMetricSpace, analytic: dict):
    """Quantize a continuum map description to a grid table.

    Supported kinds: ``affine_circle`` (mul*x + add mod circumference) on
    circle grids, ``cross_affine`` on disjoint unions of circle grids (affine
    image placed in another part), ``prepend`` on shift spaces,
    ``odometer_step`` on digit spaces, ``table`` (explicit), and ``product``
    (coordinatewise pair of descriptions).  Returns (table, snap_error).
    """
    kind = analytic.get("kind")
    if kind == "table":
        t = np.asarray(analytic["values"], dtype=np.int64)
        if t.shape != (space.point_count,) or t.min() < 0 or t.max() >= space.point_count:
            raise InvalidArgumentError("bad explicit table")
        return t, 0.0

    if kind == "affine_circle":
        if space.kind != "circle":
            raise UnsupportedMapError("affine_circle needs a circle grid")
        n = space.params["n"]
        c = space.params["circumference"]
        mul = float(analytic.get("mul", 1))
        add = float(analytic.get("add", 0.0))
        pos = np.arange(n) * (c / n)
        return _nearest_on_circle(space, mul * pos + add)

    if kind == "cross_affine":
        if space.kind != "disjoint_union":
            raise UnsupportedMapError("cross_affine needs a disjoint union")
        parts = space.params["parts"]
        if any(p["kind"] != "circle" for p in parts):
            raise UnsupportedMapError("cross_affine parts must be circle grids")
        sizes = [p["point_count"] for p in parts]
        offsets = np.cumsum([0] + sizes)
        mul = float(analytic.get("mul", 1))
        add = float(analytic.get("add", 0.0))
        shift = int(analytic.get("part_shift", 1))
        table = np.empty(space.point_count, dtype=np.int64)
        err = 0.0
        for p_idx, p in enumerate(parts):
            q_idx = (p_idx + shift) % len(parts)
            q = parts[q_idx]
            n_p, c_p = p["n"], p["circumference"]
            pos = np.arange(n_p) * (c_p / n_p)
            # reuse circle snapping on the target part's grid
            from .space import build_circle_grid

            target_grid = build_circle_grid(q["n"], q["circumference"])
            sub, e = _nearest_on_circle(target_grid, mul * pos + add)
            table[offsets[p_idx] : offsets[p_idx + 1]] = sub + offsets[q_idx]
            err = max(err, e)
        return table, err

    if kind == "prepend":
        if space.kind != "shift":
            raise UnsupportedMapError("prepend needs a shift space")
        m, depth = space.params["m"], space.params["depth"]
        sym = int(analytic["symbol"])
        if not (0 <= sym < m):
            raise InvalidArgumentError("prepend symbol out of range")
        ids = np.arange(space.point_count, dtype=np.int64)
        # drop the last symbol, prepend sym as the new leading symbol
        table = sym * m ** (depth - 1) + ids // m
        return table, 0.0

    if kind == "odometer_step":
        if space.kind != "odometer":
            raise UnsupportedMapError("odometer_step needs an odometer digit space")
        radices = space.params["radices"]
        table = np.empty(space.point_count, dtype=np.int64)
        for idx in range(space.point_count):
            digits = []
            rem = idx
            for j in radices:
                digits.append(rem % j)
                rem //= j
            carry = 1
            for pos_i, j in enumerate(radices):
                digits[pos_i] += carry
                carry, digits[pos_i] = divmod(digits[pos_i], j)[0], digits[pos_i] % j
                if carry == 0:
                    break
            out = 0
            mult = 1
            for d, j in zip(digits, radices):
                out += d * mult
                mult *= j
            table[idx] = out
        return table, 0.0

    if kind == "product":
        if space.kind != "product":
            raise UnsupportedMapError("product map needs a product space")
        raise UnsupportedMapError(
            "quantize product maps by building the factor systems and calling product_system"
        )

    raise UnsupportedMapError(f"unknown map kind {kind!r}")


def system_from_descriptions(
    space: FiniteMetricSpace, descriptions: Sequence[dict]
) -> GeneratorSystem:
    tables, errs = [], []
    for desc in descriptions:
        t, e = quantize_map(space, desc)
        tables.append(t)
        errs.append(e)
    return GeneratorSystem(space, tables, max(errs) if errs else 0.0, list(descriptions))


# -- word actions --------------------------------------------------------------


def apply_word(g: GeneratorSystem, w: Word, x: int) -> int:
    """f_w(x) with the rightmost letter acting first."""
    if len(w) == 0:
        raise InvalidArgumentError("empty word; the identity is handled by callers")
    y = x
    for letter in reversed(w.letters):
        y = int(g.tables[letter][y])
    return y


def orbit_prefix_tables(g: GeneratorSystem, w: Word) -> list[np.ndarray]:
    """Position tables Z_j with Z_0 = id and Z_{j+1} = f_{i_j} o Z_j.

    Z_j[x] is the j-th point of the exact orbit chain of x along w, i.e. the
    value of f_{w'} at x for the length-j suffix w' of the reversed word.
    """
    n = g.space.point_count
    tables = [np.arange(n, dtype=np.int64)]
    for letter in w.letters:
        tables.append(g.tables[letter][tables[-1]])
    return tables


def word_metric_dw(g: GeneratorSystem, w: Word, x: int, y: int) -> float:
    """Bowen word metric: max distance along the two orbit prefixes,
    including the identity term (empty suffix)."""
    best = 0.0
    for z in orbit_prefix_tables(g, w):
        best = max(best, g.space.dist(int(z[x]), int(z[y])))
    return best


def word_metric_matrix(g: GeneratorSystem, w: Word) -> np.ndarray:
    """Full d_w matrix (dense spaces only)."""
    d = g.space.dist_matrix
    out = None
    for z in orbit_prefix_tables(g, w):
        cur = d[np.ix_(z, z)]
        out = cur.copy() if out is None else np.maximum(out, cur)
    return out


def words_of_length(m: int, n: int):
    """All words of length n over m letters, lexicographic order."""
    if n == 0:
        yield ()
        return
    idx = [0] * n
    while True:
        yield tuple(idx)
        pos = n - 1
        while pos >= 0 and idx[pos] == m - 1:
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            return
        idx[pos] += 1


def power_system(g: GeneratorSystem, k: int, budget: int = GENERATOR_BUDGET) -> GeneratorSystem:
    """G^k: one generator per length-k word, in lexicographic word order."""
    if k < 1:
        raise InvalidArgumentError("power k must be >= 1")
    if k == 1:
        return g
    count = g.m**k
    if count > budget:
        raise ResourceBudgetError(f"G^{k} needs {count} generators > budget {budget}")
    tables = []
    descs = []
    for w in words_of_length(g.m, k):
        t = np.arange(g.space.point_count, dtype=np.int64)
        for letter in reversed(w):
            t = g.tables[letter][t]
        tables.append(t)
        descs.append({"kind": "power", "word": list(w)})
    return GeneratorSystem(g.space, tables, g.quantization_error, descs)


def product_system(g: GeneratorSystem, h: GeneratorSystem) -> GeneratorSystem:
    """G x H acting coordinatewise on the max-metric product space.

    Generator (j, k) gets index j * h.m + k; this is the documented bijection
    between product letters and letter pairs.
    """
    prod_space = build_product(g.space, h.space)
    nb = h.space.point_count
    xs = np.arange(g.space.point_count, dtype=np.int64)
    ys = np.arange(nb, dtype=np.int64)
    tables = []
    descs = []
    for j in range(g.m):
        gx = g.tables[j][xs]
        for k in range(h.m):
            hy = h.tables[k][ys]
            tables.append((gx[:, None] * nb + hy[None, :]).ravel())
            descs.append({"kind": "pair", "g": j, "h": k})
    return GeneratorSystem(
        prod_space,
        tables,
        max(g.quantization_error, h.quantization_error),
        descs,
    )


def skew_depth_for(m: int, delta: float) -> int:
    """Smallest depth with m**-depth <= delta (the depth rule); 1 when m == 1."""
    if delta <= 0:
        raise InvalidArgumentError("delta must be positive for the depth rule")
    if m == 1:
        return 1
    depth = 1
    scale = 1.0 / m
    while scale > delta:
        depth += 1
        scale /= m
    return depth


def skew_product(
    g: GeneratorSystem, depth: int, budget_points: int = 1 << 20
) -> GeneratorSystem:
    """Finite realization of the skew product on (truncated shift) x X.

    Branch s sends (w, x) to (sigma(w) with s appended, f_{w_0}(x)) where w_0
    is the leading symbol of w.  Truncation erases the shifted-away tail, so
    the union of the m branch relations at tolerance delta >= m**-depth is
    exactly the delta-chain relation of the skew product map.
    """
    if depth < 1:
        raise InvalidArgumentError("depth must be >= 1")
    n_x = g.space.point_count
    if g.m == 1:
        # one-symbol shift space degenerates to a single point; the skew
        # product is the original map on an isometric copy of X
        from .space import from_distance_matrix

        fiber = from_distance_matrix(np.zeros((1, 1)))
        fiber.kind = "shift"
        fiber.params = {"m": 1, "depth": depth}
        prod_space = build_product(fiber, g.space)
        return GeneratorSystem(
            prod_space, [g.tables[0].copy()], g.quantization_error,
            [{"kind": "skew_branch", "symbol": 0}],
        )
    n_words = g.m**depth
    if n_words * n_x > budget_points:
        raise ResourceBudgetError(
            f"skew product needs {n_words * n_x} points > budget {budget_points}"
        )
    shift = build_shift_space(g.m, depth, budget=budget_points)
    prod_space = build_product(shift, g.space)
    msd = g.m ** (depth - 1)  # weight of the leading symbol
    w_ids = np.arange(n_words, dtype=np.int64)
    lead = w_ids // msd
    shifted = (w_ids % msd) * g.m
    xs = np.arange(n_x, dtype=np.int64)
    tables = []
    for s in range(g.m):
        new_word = shifted + s
        fx = np.empty((n_words, n_x), dtype=np.int64)
        for sym in range(g.m):
            rows = lead == sym
            fx[rows] = g.tables[sym][xs][None, :]
        tables.append((new_word[:, None] * n_x + fx).ravel())
    return GeneratorSystem(
        prod_space,
        tables,
        g.quantization_error,
        [{"kind": "skew_branch", "symbol": s} for s in range(g.m)],
    )
