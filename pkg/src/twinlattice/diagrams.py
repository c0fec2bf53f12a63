"""Coxeter diagram classification and the flat rank of the associated building.

Connected diagrams are matched against the tables of irreducible spherical
and affine Coxeter diagrams by shape and edge labels (integer arithmetic only).
The flat rank is the largest value of sum(|T_i| - 1) over families of
pairwise commuting irreducible affine subdiagrams T_i.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

from .coxeter import INF, CoxeterSystem

FINITE, AFFINE, INDEFINITE = "finite", "affine", "indefinite"
QI_MAX_K = 5


@dataclass(frozen=True)
class DiagramComponent:
    mask: int
    kind: str
    name: Optional[str] = None

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    def members(self) -> list[int]:
        return mask_members(self.mask)

    @property
    def label(self) -> str:
        if self.kind == INDEFINITE:
            return "indefinite"
        return ("~" + self.name) if self.kind == AFFINE else self.name

    def render(self, sys: CoxeterSystem) -> str:
        gens = ",".join(sys.generators[i] for i in self.members())
        return f"{self.label}{{{gens}}}"


def mask_members(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _edges(sys: CoxeterSystem) -> list[int]:
    """Neighbour bitmask of each generator in the diagram (edges where m >= 3)."""
    n = sys.rank
    return [sum(1 << j for j in range(n) if j != i and sys.m(i, j) >= 3) for i in range(n)]


def connected_components(sys: CoxeterSystem, subset: int) -> list[int]:
    nbr = _edges(sys)
    comps, left = [], subset
    while left:
        start = left & -left
        comp, frontier = start, start
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = nbr[v] & subset & ~comp
            comp |= new
            frontier |= new
        comps.append(comp)
        left &= ~comp
    return comps


# -- table matching --------------------------------------------------------------

def _path_labels(sys: CoxeterSystem, nodes: list[int], adj: dict) -> Optional[list]:
    ends = [v for v in nodes if len(adj[v]) == 1]
    if len(ends) != 2:
        return None
    order, prev, cur = [ends[0]], None, ends[0]
    while len(order) < len(nodes):
        nxt = next(u for u in adj[cur] if u != prev)
        order.append(nxt)
        prev, cur = cur, nxt
    return [sys.m(a, b) for a, b in zip(order, order[1:])]


def _match_path(labels: list) -> Optional[tuple]:
    n = len(labels) + 1
    for ls in (labels, labels[::-1]):
        rest = ls[1:-1]
        if all(m == 3 for m in ls):
            return FINITE, f"A{n}"
        if ls[0] == 4 and all(m == 3 for m in ls[1:]):
            return FINITE, f"B{n}"
        if ls[0] == 4 and ls[-1] == 4 and all(m == 3 for m in rest):
            return AFFINE, f"C{n - 1}"
        if ls == [3, 4, 3]:
            return FINITE, "F4"
        if ls == [3, 3, 4, 3]:
            return AFFINE, "F4"
        if ls == [5, 3]:
            return FINITE, "H3"
        if ls == [5, 3, 3]:
            return FINITE, "H4"
        if ls == [6, 3]:
            return AFFINE, "G2"
    return None


def _legs(sys: CoxeterSystem, center: int, adj: dict) -> list[list]:
    """Edge labels along each leg leaving ``center``, nearest edge first."""
    legs = []
    for start in sorted(adj[center]):
        labels = [sys.m(center, start)]
        prev, cur = center, start
        while len(adj[cur]) == 2:
            nxt = next(u for u in adj[cur] if u != prev)
            labels.append(sys.m(cur, nxt))
            prev, cur = cur, nxt
        if len(adj[cur]) > 2:
            return []
        legs.append(labels)
    return legs


_SIMPLY_LACED_FORKS = {
    (1, 2, 2): (FINITE, "E6"),
    (1, 2, 3): (FINITE, "E7"),
    (1, 2, 4): (FINITE, "E8"),
    (2, 2, 2): (AFFINE, "E6"),
    (1, 3, 3): (AFFINE, "E7"),
    (1, 2, 5): (AFFINE, "E8"),
}


def _match_fork(legs: list[list]) -> Optional[tuple]:
    n = 1 + sum(len(leg) for leg in legs)
    lengths = tuple(sorted(len(leg) for leg in legs))
    if all(m == 3 for leg in legs for m in leg):
        if lengths[:2] == (1, 1):
            return FINITE, f"D{n}"
        return _SIMPLY_LACED_FORKS.get(lengths)
    for i, leg in enumerate(legs):
        others = [legs[j] for j in range(3) if j != i]
        if (leg[-1] == 4 and all(m == 3 for m in leg[:-1])
                and all(o == [3] for o in others)):
            return AFFINE, f"B{n - 1}"
    return None


def _classify_connected(sys: CoxeterSystem, mask: int) -> tuple:
    nodes = mask_members(mask)
    n = len(nodes)
    if n == 1:
        return FINITE, "A1"
    if n == 2:
        m = sys.m(*nodes)
        if m == INF:
            return AFFINE, "A1"
        return FINITE, {3: "A2", 4: "B2", 6: "G2"}.get(m, f"I2({m})")
    adj = {v: [u for u in nodes if u != v and sys.m(u, v) >= 3] for v in nodes}
    labels = [sys.m(u, v) for u in nodes for v in adj[u] if u < v]
    if any(m == INF for m in labels):
        return INDEFINITE, None
    degrees = sorted(len(adj[v]) for v in nodes)
    if len(labels) == n:
        if degrees == [2] * n and all(m == 3 for m in labels):
            return AFFINE, f"A{n - 1}"
        return INDEFINITE, None
    if len(labels) != n - 1:
        return INDEFINITE, None
    # trees from here on
    branch = [v for v in nodes if len(adj[v]) >= 3]
    if not branch:
        return _match_path(_path_labels(sys, nodes, adj)) or (INDEFINITE, None)
    if any(m != 3 for m in labels) and len(branch) != 1:
        return INDEFINITE, None
    if len(branch) == 1:
        c = branch[0]
        if len(adj[c]) == 4:
            if n == 5 and all(m == 3 for m in labels):
                return AFFINE, "D4"
            return INDEFINITE, None
        if len(adj[c]) != 3:
            return INDEFINITE, None
        legs = _legs(sys, c, adj)
        return (_match_fork(legs) if legs else None) or (INDEFINITE, None)
    if len(branch) == 2 and all(len(adj[v]) == 3 for v in branch):
        leaves = lambda v: sum(1 for u in adj[v] if len(adj[u]) == 1)
        if all(leaves(v) == 2 for v in branch):
            return AFFINE, f"D{n - 1}"
    return INDEFINITE, None


def classify(sys: CoxeterSystem, subset: Optional[int] = None) -> list[DiagramComponent]:
    """Connected components of the induced diagram on ``subset`` (default: all of S), typed."""
    full = (1 << sys.rank) - 1
    if subset is None:
        subset = full
    if subset & ~full:
        raise ValueError("subset has bits outside the generator set")
    return [DiagramComponent(c, *_classify_connected(sys, c)) for c in connected_components(sys, subset)]


def connected_affine_subsets(sys: CoxeterSystem) -> list[DiagramComponent]:
    """All connected subsets of affine type.

    Connected subsets are grown one neighbour at a time from finite ones only:
    a connected proper superset of an affine or indefinite diagram is never
    finite or affine.
    """
    nbr = _edges(sys)
    seen: set[int] = set()
    frontier = [1 << i for i in range(sys.rank)]
    affine = []
    while frontier:
        nxt = []
        for mask in frontier:
            if mask in seen:
                continue
            seen.add(mask)
            kind, name = _classify_connected(sys, mask)
            if kind == AFFINE:
                affine.append(DiagramComponent(mask, kind, name))
            if kind != FINITE:
                continue
            boundary = 0
            for v in mask_members(mask):
                boundary |= nbr[v]
            boundary &= ~mask
            while boundary:
                bit = boundary & -boundary
                boundary &= boundary - 1
                nxt.append(mask | bit)
        frontier = nxt
    affine.sort(key=lambda c: c.mask)
    return affine


@dataclass(frozen=True)
class FlatRankReport:
    R: int
    witness: tuple
    bounds: tuple
    indefinite: bool
    components: tuple

    def witness_mask(self) -> int:
        out = 0
        for c in self.witness:
            out |= c.mask
        return out

    def as_dict(self, sys: CoxeterSystem) -> dict:
        return {
            "R": self.R,
            "bounds": list(self.bounds),
            "witness": [
                {"type": c.label, "generators": [sys.generators[i] for i in c.members()]}
                for c in self.witness
            ],
            "components": [
                {"type": c.label, "generators": [sys.generators[i] for i in c.members()]}
                for c in self.components
            ],
            "indefinite_component": self.indefinite,
        }


def flat_rank(sys: CoxeterSystem) -> FlatRankReport:
    """Maximise sum(|T|-1) over pairwise commuting affine subdiagrams T.

    Ties go to the numerically smallest union bitmask.
    """
    n = sys.rank
    nbr = _edges(sys)
    items = connected_affine_subsets(sys)
    closed = []
    for c in items:
        reach = c.mask
        for v in c.members():
            reach |= nbr[v]
        closed.append(reach)
    by_low: dict[int, list[int]] = {}
    for k, c in enumerate(items):
        by_low.setdefault((c.mask & -c.mask).bit_length() - 1, []).append(k)

    @functools.lru_cache(maxsize=None)
    def best(avail: int) -> tuple:
        # returns (R, -union, chosen item indices)
        if not avail:
            return (0, 0, ())
        v = (avail & -avail).bit_length() - 1
        top = best(avail & ~(1 << v))
        for k in by_low.get(v, ()):
            c = items[k]
            if c.mask & ~avail:
                continue
            r, neg_union, chosen = best(avail & ~closed[k])
            cand = (r + c.size - 1, neg_union - c.mask, chosen + (k,))
            if cand[:2] > top[:2]:
                top = cand
        return top

    r, _, chosen = best((1 << n) - 1)
    best.cache_clear()
    witness = tuple(sorted((items[k] for k in chosen), key=lambda c: c.mask))
    comps = tuple(classify(sys))
    return FlatRankReport(
        R=r,
        witness=witness,
        bounds=(r, 2 * r),
        indefinite=any(c.kind == INDEFINITE for c in comps),
        components=comps,
    )


def is_commuting_family(sys: CoxeterSystem, masks: list[int]) -> bool:
    for a in range(len(masks)):
        for b in range(a + 1, len(masks)):
            if masks[a] & masks[b]:
                return False
            for i in mask_members(masks[a]):
                for j in mask_members(masks[b]):
                    if sys.m(i, j) != 2:
                        return False
    return True


def affine_triangle_family(k: int) -> CoxeterSystem:
    """k pairwise commuting copies of the triangle diagram ~A2."""
    if not 1 <= k <= QI_MAX_K:
        raise ValueError(f"k must be between 1 and {QI_MAX_K}")
    n = 3 * k
    gens = [f"{'abc'[i % 3]}{i // 3 + 1}" for i in range(n)]
    m = [[1 if i == j else (3 if i // 3 == j // 3 else 2) for j in range(n)] for i in range(n)]
    return CoxeterSystem(gens, m)


qi_family = affine_triangle_family


def qi_table(max_k: int) -> list[dict]:
    if not 1 <= max_k <= QI_MAX_K:
        raise ValueError(f"max-k must be between 1 and {QI_MAX_K}")
    rows = []
    for k in range(1, max_k + 1):
        sys = qi_family(k)
        rep = flat_rank(sys)
        rows.append({"k": k, "generators": sys.rank, "R": rep.R, "bounds": list(rep.bounds)})
    return rows
