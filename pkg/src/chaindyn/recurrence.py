"""Chain recurrence, transitivity and mixing at a fixed tolerance, with the
recurrence/mixing time computations and the product/power property suites.

At graph level the chain tolerance is the delta the graph was built with, so
throughout this module the graph's delta plays the role of the epsilon in the
chain definitions; the separate ``delta_ball`` argument of the mixing time is
the radius of the closed starting ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError
from .graph import (
    ChainGraph,
    bfs_levels,
    build_chain_graph,
    digraph_period,
    reach_layers,
    strongly_connected,
    wielandt_cap,
)
from .system import GeneratorSystem, power_system, product_system


def is_chain_transitive(cg: ChainGraph) -> bool:
    """Chains connect every ordered pair iff the union graph is strongly
    connected."""
    return strongly_connected(cg.union)


def is_chain_mixing(cg: ChainGraph) -> bool:
    """Chains of every large length connect every pair iff the union graph is
    primitive (strongly connected with period 1)."""
    return strongly_connected(cg.union) and digraph_period(cg.union) == 1


def _reverse_levels(cg: ChainGraph, target: int) -> np.ndarray:
    rev = cg.union.T
    succ = [np.flatnonzero(rev[x]) for x in range(cg.point_count)]
    return bfs_levels(succ, target, cg.point_count)


def recurrence_time_point(cg: ChainGraph, x: int) -> Optional[int]:
    """Length of the shortest chain from x back to itself, None if x is not
    chain recurrent at this tolerance."""
    dist_to_x = _reverse_levels(cg, x)
    best = None
    for y in np.flatnonzero(cg.union[x]):
        if dist_to_x[y] >= 0:
            cand = 1 + int(dist_to_x[y])
            if best is None or cand < best:
                best = cand
    return best


@dataclass(frozen=True)
class RecurrenceReport:
    epsilon: float
    recurrent: bool
    transitive: bool
    mixing: bool
    r_per_point: tuple[Optional[int], ...]
    r_global: Optional[int]
    wielandt_cap: int

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "recurrent": self.recurrent,
            "transitive": self.transitive,
            "mixing": self.mixing,
            "r_per_point": list(self.r_per_point),
            "r_global": self.r_global,
            "wielandt_cap": self.wielandt_cap,
        }


def recurrence_time(cg: ChainGraph) -> RecurrenceReport:
    per_point = tuple(recurrence_time_point(cg, x) for x in range(cg.point_count))
    recurrent = all(r is not None for r in per_point)
    transitive = is_chain_transitive(cg)
    return RecurrenceReport(
        epsilon=cg.delta,
        recurrent=recurrent,
        transitive=transitive,
        mixing=transitive and digraph_period(cg.union) == 1,
        r_per_point=per_point,
        r_global=max(per_point) if recurrent else None,
        wielandt_cap=wielandt_cap(cg.point_count),
    )


def mixing_time_point(
    cg: ChainGraph, x: int, delta_ball: float
) -> Optional[int]:
    """Smallest N such that chains of every length n >= N reach every point
    from the closed ball B(x, delta_ball); None unless chain mixing.

    The infinite quantifier is certified finitely: once a layer equals the
    full point set it stays full (primitivity gives every point an incoming
    edge), and primitivity guarantees fullness within the Wielandt cap.
    """
    if delta_ball <= 0:
        raise InvalidArgumentError("delta_ball must be positive")
    if not is_chain_mixing(cg):
        return None
    row = cg.system.space.dist_row(x)
    ball = np.flatnonzero(row <= delta_ball)
    cap = wielandt_cap(cg.point_count)
    mask = np.zeros(cg.point_count, dtype=bool)
    mask[ball] = True
    n = 0
    full = np.ones(cg.point_count, dtype=bool)
    while n <= cap:
        if mask.all():
            return max(n, 1)
        mask = cg.union[mask].any(axis=0)
        n += 1
    return None  # unreachable for a primitive graph


@dataclass(frozen=True)
class MixingReport:
    epsilon: float
    delta: float
    m_per_point: tuple[Optional[int], ...]
    m_global: Optional[int]

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "m_per_point": list(self.m_per_point),
            "m_global": self.m_global,
        }


def mixing_time(cg: ChainGraph, delta_ball: float) -> MixingReport:
    if not is_chain_mixing(cg):
        return MixingReport(cg.delta, delta_ball, (None,) * cg.point_count, None)
    per_point = tuple(
        mixing_time_point(cg, x, delta_ball) for x in range(cg.point_count)
    )
    return MixingReport(cg.delta, delta_ball, per_point, max(per_point))


# -- proposition suite ---------------------------------------------------------


@dataclass(frozen=True)
class CheckItem:
    name: str
    status: str  # pass | fail | skipped
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class PropositionSuiteReport:
    items: tuple[CheckItem, ...]

    @property
    def all_pass(self) -> bool:
        return all(i.status == "pass" for i in self.items)

    @property
    def failures(self) -> tuple[CheckItem, ...]:
        return tuple(i for i in self.items if i.status == "fail")

    def to_dict(self) -> dict:
        return {"items": [i.to_dict() for i in self.items]}


def _r_per_point(cg: ChainGraph) -> list[Optional[int]]:
    return [recurrence_time_point(cg, x) for x in range(cg.point_count)]


def proposition_suite(
    g: GeneratorSystem,
    h: GeneratorSystem,
    k: int,
    epsilon: float,
    delta: float,
    eps_prime_grid: Optional[Sequence[float]] = None,
) -> PropositionSuiteReport:
    """Product and power laws for recurrence and mixing times.

    Pointwise checks: max(r(x,G), r(y,H)) <= r((x,y), GxH) <= lcm(r(x,G),
    r(y,H)) and r(x, G^k) >= r(x, G)/k; global checks: m(delta, GxH) =
    max(m(delta,G), m(delta,H)) and m(delta, G^k) >= m(delta, G)/k.  The
    existential bounds search the eps'-grid (default epsilon, epsilon/2,
    epsilon/4, 0) and report the found eps' or exhaustion.  Preconditions
    that fail produce skipped entries with reasons.
    """
    if eps_prime_grid is None:
        eps_prime_grid = (epsilon, epsilon / 2, epsilon / 4, 0.0)
    items: list[CheckItem] = []

    cg_g = build_chain_graph(g, epsilon)
    cg_h = build_chain_graph(h, epsilon)
    r_g = _r_per_point(cg_g)
    r_h = _r_per_point(cg_h)

    if any(r is None for r in r_g) or any(r is None for r in r_h):
        items.append(
            CheckItem("prop5.1", "skipped", "a factor system is not chain recurrent")
        )
    else:
        prod = product_system(g, h)
        cg_prod = build_chain_graph(prod, epsilon)
        r_prod = _r_per_point(cg_prod)
        nb = h.space.point_count
        bad = []
        for x in range(g.space.point_count):
            for y in range(nb):
                rp = r_prod[x * nb + y]
                lo = max(r_g[x], r_h[y])
                hi = math.lcm(r_g[x], r_h[y])
                if rp is None or not (lo <= rp <= hi):
                    bad.append((x, y, rp, lo, hi))
        items.append(
            CheckItem(
                "prop5.1",
                "pass" if not bad else "fail",
                f"{len(bad)} violations" if bad else "max <= r_prod <= lcm at every pair",
            )
        )

    gk = power_system(g, k)
    cg_gk = build_chain_graph(gk, epsilon)
    r_gk = _r_per_point(cg_gk)
    if any(r is None for r in r_g):
        items.append(CheckItem("prop5.2.1", "skipped", "G not chain recurrent"))
    elif any(r is None for r in r_gk):
        items.append(CheckItem("prop5.2.1", "fail", "G^k lost recurrence"))
    else:
        bad = [
            x
            for x in range(g.space.point_count)
            if k * r_gk[x] < r_g[x]
        ]
        items.append(
            CheckItem(
                "prop5.2.1",
                "pass" if not bad else "fail",
                f"{len(bad)} points violate k*r(x,G^k) >= r(x,G)" if bad else "",
            )
        )

    # existential: r_eps(x, G^k) <= r_eps'(x, G) for some grid eps'
    if all(r is not None for r in r_gk):
        grid_r = {}
        for ep in eps_prime_grid:
            grid_r[ep] = _r_per_point(build_chain_graph(g, ep))
        unmatched = []
        found_eps = set()
        for x in range(g.space.point_count):
            hit = None
            for ep in eps_prime_grid:
                rx = grid_r[ep][x]
                if rx is not None and r_gk[x] <= rx:
                    hit = ep
                    break
            if hit is None:
                unmatched.append(x)
            else:
                found_eps.add(hit)
        items.append(
            CheckItem(
                "prop5.2.2",
                "pass" if not unmatched else "fail",
                f"eps' exhausted at points {unmatched[:5]}"
                if unmatched
                else f"eps' found in grid for every point",
            )
        )
    else:
        items.append(CheckItem("prop5.2.2", "skipped", "G^k not chain recurrent"))

    mixing_g = is_chain_mixing(cg_g)
    mixing_h = is_chain_mixing(cg_h)
    if not (mixing_g and mixing_h):
        items.append(CheckItem("prop4.8.1", "skipped", "factors not both chain mixing"))
        items.append(CheckItem("prop4.8.2", "skipped", "G not chain mixing"))
        items.append(CheckItem("prop4.8.3", "skipped", "G not chain mixing"))
        return PropositionSuiteReport(tuple(items))

    m_g = mixing_time(cg_g, delta).m_global
    m_h = mixing_time(cg_h, delta).m_global
    prod = product_system(g, h)
    cg_prod = build_chain_graph(prod, epsilon)
    m_prod = mixing_time(cg_prod, delta).m_global
    if m_prod is None:
        items.append(CheckItem("prop4.8.1", "fail", "product lost mixing"))
    else:
        ok = m_prod == max(m_g, m_h)
        items.append(
            CheckItem(
                "prop4.8.1",
                "pass" if ok else "fail",
                f"m(GxH)={m_prod}, max(m(G), m(H))={max(m_g, m_h)}",
            )
        )

    m_gk = mixing_time(cg_gk, delta).m_global
    if m_gk is None:
        items.append(CheckItem("prop4.8.2", "fail", "G^k lost mixing"))
        items.append(CheckItem("prop4.8.3", "fail", "G^k lost mixing"))
    else:
        ok = k * m_gk >= m_g
        items.append(
            CheckItem(
                "prop4.8.2",
                "pass" if ok else "fail",
                f"m(G^k)={m_gk}, m(G)={m_g}, k={k}",
            )
        )
        hit = None
        for ep in eps_prime_grid:
            cg_ep = build_chain_graph(g, ep)
            if not is_chain_mixing(cg_ep):
                continue
            m_ep = mixing_time(cg_ep, delta).m_global
            if m_ep is not None and m_gk <= m_ep:
                hit = ep
                break
        items.append(
            CheckItem(
                "prop4.8.3",
                "pass" if hit is not None else "fail",
                f"eps'={hit}" if hit is not None else "eps' grid exhausted",
            )
        )
    return PropositionSuiteReport(tuple(items))


# -- theorem-scale checks --------------------------------------------------------


@dataclass(frozen=True)
class UbdRow:
    epsilon: float
    recurrent: bool
    transitive: bool
    r_global: Optional[int]
    product: Optional[float]  # r_eps(G) * eps**(b_upper + 1)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "recurrent": self.recurrent,
            "transitive": self.transitive,
            "r_global": self.r_global,
            "product": self.product,
        }


@dataclass(frozen=True)
class UbdReport:
    b_upper: float
    rows: tuple[UbdRow, ...]
    max_product: Optional[float]
    trend: str  # bounded | growing | partial

    def to_dict(self) -> dict:
        return {
            "b_upper": self.b_upper,
            "rows": [r.to_dict() for r in self.rows],
            "max_product": self.max_product,
            "trend": self.trend,
        }


def verify_ubd(g: GeneratorSystem, eps_ladder, space_box_b: float) -> UbdReport:
    """Recurrence-time boundedness trend: r_eps(G) * eps**(b+1) across the
    ladder.

    The theorem's constant is unspecified, so this reports the empirical
    products and their max rather than enforcing a threshold.  r_eps is
    computed whenever recurrence holds; the row notes whether transitivity
    additionally holds.
    """
    from .space import as_ladder

    rows = []
    products = []
    partial = False
    for eps in as_ladder(eps_ladder):
        cg = build_chain_graph(g, eps)
        rep = recurrence_time(cg)
        if rep.r_global is None:
            rows.append(UbdRow(eps, False, rep.transitive, None, None))
            partial = True
            continue
        product = rep.r_global * eps ** (space_box_b + 1)
        rows.append(UbdRow(eps, True, rep.transitive, rep.r_global, product))
        products.append(product)
    if not products:
        trend = "partial"
    elif partial:
        trend = "partial"
    elif len(products) >= 2 and all(
        b > a for a, b in zip(products, products[1:])
    ):
        trend = "growing"
    else:
        trend = "bounded"
    return UbdReport(
        b_upper=space_box_b,
        rows=tuple(rows),
        max_product=max(products) if products else None,
        trend=trend,
    )


@dataclass(frozen=True)
class LbmReport:
    b_lower: float
    eps_min: float
    mixing_ok: bool
    per_delta: tuple[tuple[float, Optional[int], Optional[float]], ...]
    rhs: Optional[float]
    h_hat: Optional[float]
    slack: float
    holds: Optional[bool]

    def to_dict(self) -> dict:
        return {
            "b_lower": self.b_lower,
            "eps_min": self.eps_min,
            "mixing_ok": self.mixing_ok,
            "per_delta": [list(row) for row in self.per_delta],
            "rhs": self.rhs,
            "h_hat": self.h_hat,
            "slack": self.slack,
            "holds": self.holds,
        }


def verify_lbm(
    g: GeneratorSystem,
    eps_ladder,
    delta_ladder,
    lower_b: float,
    slack: float = 0.1,
) -> LbmReport:
    """Entropy lower bound via mixing times:

        h(G) >= max{0, b_lower * max_delta [log(1/delta) / m(delta)] - log m}

    with m(delta) the chain mixing time at the smallest ladder epsilon and
    h(G) estimated by the exact counting oracle at that epsilon.  The slack
    absorbs estimator bias; both sides are reported raw.
    """
    from .entropy import spectral_growth_rate
    from .space import as_ladder

    eps_ladder = as_ladder(eps_ladder)
    delta_ladder = as_ladder(delta_ladder)
    eps_min = min(eps_ladder)
    for eps in eps_ladder:
        cg = build_chain_graph(g, eps)
        if not is_chain_mixing(cg):
            return LbmReport(
                lower_b, eps_min, False, tuple(), None, None, slack, None
            )
    cg_min = build_chain_graph(g, eps_min)
    per_delta = []
    ratios = []
    for delta in delta_ladder:
        m_hat = mixing_time(cg_min, delta).m_global
        ratio = math.log(1.0 / delta) / m_hat if m_hat else None
        per_delta.append((delta, m_hat, ratio))
        if ratio is not None:
            ratios.append(ratio)
    rhs = lower_b * max(ratios) - math.log(g.m)
    h_hat = spectral_growth_rate(cg_min)
    holds = h_hat >= max(0.0, rhs) - slack
    return LbmReport(
        lower_b, eps_min, True, tuple(per_delta), rhs, h_hat, slack, holds
    )
