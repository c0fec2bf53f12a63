from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twinlattice.coxeter import INF, CoxeterSystem, dihedral
from twinlattice.diagrams import (
    AFFINE, FINITE, INDEFINITE, classify, connected_affine_subsets, connected_components,
    flat_rank, is_commuting_family, qi_family, qi_table,
)


def gram_kind(sys_: CoxeterSystem) -> str:
    """Type of a connected diagram from the signature of its cosine matrix."""
    n = sys_.rank
    g = np.array([[1.0 if i == j else (-1.0 if sys_.m(i, j) == INF else -math.cos(math.pi / sys_.m(i, j)))
                   for j in range(n)] for i in range(n)])
    ev = np.linalg.eigvalsh(g)
    if ev.min() > 1e-9:
        return FINITE
    if ev.min() > -1e-9 and int(np.sum(np.abs(ev) < 1e-9)) == 1:
        return AFFINE
    return INDEFINITE


def from_edges(n, edges):
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    for i, j, x in edges:
        m[i][j] = m[j][i] = x
    return CoxeterSystem([f"v{i}" for i in range(n)], m)


def path(labels):
    return from_edges(len(labels) + 1, [(i, i + 1, x) for i, x in enumerate(labels)])


def star(legs, labels=None):
    """Node 0 joined to legs of the given lengths; all labels 3 unless overridden."""
    edges, nxt = [], 1
    for leg in legs:
        prev = 0
        for _ in range(leg):
            edges.append((prev, nxt, 3))
            prev, nxt = nxt, nxt + 1
    for k, x in (labels or {}).items():
        i, j, _ = edges[k]
        edges[k] = (i, j, x)
    return from_edges(nxt, edges)


def cycle(n):
    return from_edges(n, [(i, (i + 1) % n, 3) for i in range(n)])


TABLE = [
    (path([]), FINITE, "A1"),
    (dihedral(3), FINITE, "A2"),
    (dihedral(INF), AFFINE, "A1"),
    (dihedral(7), FINITE, "I2(7)"),
    (path([3, 3]), FINITE, "A3"),
    (path([4, 3, 3]), FINITE, "B4"),
    (star([1, 1, 2]), FINITE, "D5"),
    (star([1, 2, 2]), FINITE, "E6"),
    (star([1, 2, 3]), FINITE, "E7"),
    (star([1, 2, 4]), FINITE, "E8"),
    (path([3, 4, 3]), FINITE, "F4"),
    (path([6]), FINITE, "G2"),
    (path([5, 3]), FINITE, "H3"),
    (path([5, 3, 3]), FINITE, "H4"),
    (cycle(3), AFFINE, "A2"),
    (cycle(5), AFFINE, "A4"),
    (star([1, 1, 1], {2: 4}), AFFINE, "B3"),
    (star([1, 1, 3], {4: 4}), AFFINE, "B5"),
    (path([4, 4]), AFFINE, "C2"),
    (path([4, 3, 3, 4]), AFFINE, "C4"),
    (star([1, 1, 1, 1]), AFFINE, "D4"),
    (from_edges(6, [(0, 2, 3), (1, 2, 3), (2, 3, 3), (3, 4, 3), (3, 5, 3)]), AFFINE, "D5"),
    (star([2, 2, 2]), AFFINE, "E6"),
    (star([1, 3, 3]), AFFINE, "E7"),
    (star([1, 2, 5]), AFFINE, "E8"),
    (path([3, 3, 4, 3]), AFFINE, "F4"),
    (path([6, 3]), AFFINE, "G2"),
    (path([5, 4]), INDEFINITE, None),
    (star([2, 2, 3]), INDEFINITE, None),
    (from_edges(3, [(0, 1, INF), (1, 2, 3)]), INDEFINITE, None),
]


@pytest.mark.parametrize("sys_,kind,name", TABLE)
def test_classification_table(sys_, kind, name):
    (comp,) = classify(sys_)
    assert (comp.kind, comp.name) == (kind, name)
    assert gram_kind(sys_) == kind


def test_classify_examples_from_labels():
    assert classify(dihedral(INF))[0].label == "~A1"
    assert classify(dihedral(3))[0].label == "A2"
    assert classify(cycle(3))[0].label == "~A2"


def test_classify_partitions_subset():
    sys_ = qi_family(2)
    comps = classify(sys_, 0b110011)
    assert sorted(c.mask for c in comps) == [0b000011, 0b110000]
    assert all(c.label == "A2" for c in comps)
    assert [c.label for c in classify(sys_, 0b001111)] == ["~A2", "A1"]
    with pytest.raises(ValueError):
        classify(sys_, 1 << 6)


@st.composite
def connected_diagrams(draw, max_rank=9):
    n = draw(st.integers(1, max_rank))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    m = [[1] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = m[j][i] = rng.choices([2, 3, 4, 5, 6, INF], [24, 8, 1, 0.5, 0.5, 0.3])[0]
    # join components with label-3 edges so the diagram is connected
    sys_ = CoxeterSystem([str(i) for i in range(n)], m)
    comps = connected_components(sys_, (1 << n) - 1)
    for a, b in zip(comps, comps[1:]):
        i, j = (a & -a).bit_length() - 1, (b & -b).bit_length() - 1
        m[i][j] = m[j][i] = 3
    return CoxeterSystem([str(i) for i in range(n)], m)


@given(connected_diagrams())
def test_classification_agrees_with_gram_signature(sys_):
    (comp,) = classify(sys_)
    assert comp.kind == gram_kind(sys_)


@given(connected_diagrams(7))
def test_affine_subsets_are_affine(sys_):
    for c in connected_affine_subsets(sys_):
        sub = sys_.restrict(c.members())
        assert gram_kind(sub) == AFFINE
        assert len(connected_components(sys_, c.mask)) == 1


# -- flat rank --------------------------------------------------------------------

def brute_flat_rank(sys_: CoxeterSystem) -> int:
    """Maximum over all subsets whose components are all affine."""
    best = 0
    for mask in range(1, 1 << sys_.rank):
        comps = classify(sys_, mask)
        if all(c.kind == AFFINE for c in comps):
            best = max(best, sum(c.size - 1 for c in comps))
    return best


def test_flat_rank_examples():
    assert flat_rank(dihedral(INF)).R == 1
    assert flat_rank(dihedral(3)).R == 0
    assert flat_rank(path([3, 3])).R == 0
    assert flat_rank(cycle(3)).R == 2
    rep = flat_rank(dihedral(INF))
    assert rep.bounds == (1, 2)


@pytest.mark.parametrize("k", range(1, 6))
def test_qi_family(k):
    sys_ = qi_family(k)
    assert sys_.rank == 3 * k
    rep = flat_rank(sys_)
    assert rep.R == 2 * k and rep.bounds == (2 * k, 4 * k)
    assert len(rep.witness) == k
    assert all(c.label == "~A2" for c in rep.witness)


def test_qi_family_range():
    for bad in (0, 6):
        with pytest.raises(ValueError):
            qi_family(bad)


def test_qi_table_rows():
    assert qi_table(2) == [
        {"k": 1, "generators": 3, "R": 2, "bounds": [2, 4]},
        {"k": 2, "generators": 6, "R": 4, "bounds": [4, 8]},
    ]
    assert [r["R"] for r in qi_table(5)] == [2, 4, 6, 8, 10]


def test_indefinite_flag_and_tie_break():
    # ~A1 on {0,1} joined by a 3 to node 2, then ~A1 on {2,3}: the two compete
    sys_ = from_edges(4, [(0, 1, INF), (1, 2, 3), (2, 3, INF)])
    rep = flat_rank(sys_)
    assert rep.indefinite
    assert rep.R == 1
    assert rep.witness_mask() == 0b0011


@given(connected_diagrams(7))
def test_flat_rank_matches_brute_force(sys_):
    rep = flat_rank(sys_)
    assert rep.R == brute_flat_rank(sys_)
    assert rep.R == sum(c.size - 1 for c in rep.witness)
    assert all(c.kind == AFFINE for c in rep.witness)
    assert is_commuting_family(sys_, [c.mask for c in rep.witness])
    assert rep.bounds == (rep.R, 2 * rep.R)


@given(connected_diagrams(7), st.integers(0, 2**32 - 1))
def test_flat_rank_permutation_invariant(sys_, seed):
    n = sys_.rank
    perm = list(range(n))
    random.Random(seed).shuffle(perm)
    permuted = CoxeterSystem([sys_.generators[i] for i in perm],
                             [[sys_.m(perm[i], perm[j]) for j in range(n)] for i in range(n)])
    assert flat_rank(permuted).R == flat_rank(sys_).R
