"""Word metric of SL_2(F_p[t, 1/t]) against the combinatorial metric of its twin tree.

The generating set Sigma consists of the lattice elements moving the base
opposite pair c = (c+, c-) to an adjacent opposite pair, so the Cayley graph
of (Gamma, Sigma) is the adjacency graph on opposite pairs.  ``factorize``
writes any lattice element as a Sigma-word of length at most 2 d_X(c, g.c)
by lifting minimal galleries from one tree to the other.
"""

from __future__ import annotations

import functools
import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import CertificateError, NoSolverError, NotOppositeError, ResourceLimitError
from .laurent import MatSL2, check_prime
from .twintree import (
    IDENTITY_W, LETTERS, MINUS, PLUS, Chamber, OppPair,
    base_chamber, bruhat_cell, chi_alpha, chi_alpha0, chi_neg_alpha,
    chi_neg_alpha0, codistance, distance, iwahori_member, n0, n1, opposite_pair,
    pairs_adjacent, panel, relative_position, torus,
)


# -- generating set ------------------------------------------------------------------

def in_sigma(g: MatSL2) -> bool:
    """Does g move c to an adjacent (or equal) opposite pair?"""
    if not g.is_lattice_element():
        return False
    wp = bruhat_cell(g, PLUS).w
    if wp.length > 1:
        return False
    wm = bruhat_cell(g, MINUS).w
    if wm.length > 1:
        return False
    return wp.first is None or wm.first is None or wp.first == wm.first


def stabilizes_base(g: MatSL2) -> bool:
    return iwahori_member(g, PLUS) and iwahori_member(g, MINUS)


@dataclass(frozen=True)
class GeneratorSet:
    p: int
    elements: tuple
    index: dict = field(repr=False, compare=False)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i: int) -> MatSL2:
        return self.elements[i]

    def lookup(self, g: MatSL2) -> Optional[int]:
        return self.index.get(g)

    def stabilizer(self) -> list[int]:
        return [i for i, g in enumerate(self.elements) if stabilizes_base(g)]

    def product(self, word) -> MatSL2:
        g = MatSL2.identity(self.p)
        for i in word:
            g = g * self.elements[i]
        return g


def elementary_pool(p: int) -> list[MatSL2]:
    pool = []
    for root in (chi_alpha, chi_neg_alpha, chi_alpha0, chi_neg_alpha0):
        pool.extend(root(a, p) for a in range(p))
    pool += [n0(p), n1(p)]
    pool.extend(torus(lam, p) for lam in range(1, p))
    return pool


@functools.lru_cache(maxsize=None)
def build_sigma(p: int) -> GeneratorSet:
    """Sigma, found among products of at most three elementary matrices.

    Ordered by first appearance: the empty product, then single factors,
    pairs and triples in pool order.
    """
    check_prime(p)
    pool = elementary_pool(p)
    found: dict[MatSL2, int] = {}
    seen: set = set()
    for n in range(4):
        for factors in itertools.product(pool, repeat=n):
            g = MatSL2.identity(p)
            for f in factors:
                g = g * f
            if g in seen:
                continue
            seen.add(g)
            if in_sigma(g):
                found[g] = len(found)
    elements = tuple(found)
    sigma = GeneratorSet(p, elements, dict(found))
    for g in elements:
        if g.inverse() not in found:
            raise CertificateError("generating set is not closed under inverses")
    return sigma


# -- galleries --------------------------------------------------------------------------

def minimal_gallery(start: Chamber, end: Chamber) -> list[Chamber]:
    """Greedy descent: step to the first panel neighbour (s0 before s1) closer to end."""
    if start.sign != end.sign:
        raise ValueError("gallery endpoints must have the same sign")
    gallery = [start]
    d = distance(start, end)
    current = start
    while d:
        for s in LETTERS:
            nxt = next((y for y in panel(current, s)[1:] if distance(y, end) < d), None)
            if nxt is not None:
                break
        else:
            raise CertificateError("no distance-decreasing neighbour")
        current = nxt
        gallery.append(current)
        d -= 1
    return gallery


def lift_gallery_with_coordinates(gallery: list[Chamber], y0: Chamber):
    """Lift a gallery to the other tree inside the twin apartment of (gallery[0], y0).

    Returns the lifted chambers, their apartment coordinates and the apartment.
    """
    if not gallery:
        raise ValueError("empty gallery")
    x0 = gallery[0]
    if y0.sign != -x0.sign:
        raise ValueError("y0 must lie in the other tree")
    if not codistance(x0, y0).is_identity():
        raise NotOppositeError("y0 is not opposite the first gallery chamber")
    if x0.sign == PLUS:
        _, apt = opposite_pair(x0.rep, y0.rep)
    else:
        _, apt = opposite_pair(y0.rep, x0.rep)
    lifted, coords = [y0], [IDENTITY_W]
    for prev, x in zip(gallery, gallery[1:]):
        if distance(prev, x) > 1:
            raise ValueError("consecutive gallery chambers must be adjacent")
        y, w = lifted[-1], coords[-1]
        delta = codistance(x, y)
        if not delta.is_identity():
            if delta.length != 1:
                raise CertificateError(f"codistance {delta} along a gallery step")
            w = w.times(delta.first)
            y = apt.chamber_at(w, y.sign)
            if not codistance(x, y).is_identity():
                raise CertificateError("lifted chamber is not opposite (twinning axiom violated)")
        lifted.append(y)
        coords.append(w)
    return lifted, coords, apt


def lift_gallery(gallery: list[Chamber], y0: Chamber) -> list[Chamber]:
    return lift_gallery_with_coordinates(gallery, y0)[0]


def check_lift(gallery: list[Chamber], lifted: list[Chamber]) -> dict:
    """Evaluate the three lifting properties independently of how the lift was built."""
    pairs = [_pair(x, y) for x, y in zip(gallery, lifted)]
    _, apt = opposite_pair(pairs[0].plus.rep, pairs[0].minus.rep)
    return {
        "opposite": all(codistance(x, y).is_identity() for x, y in zip(gallery, lifted)),
        "adjacent": all(pairs_adjacent(a, b) for a, b in zip(pairs, pairs[1:])),
        "in_apartment": all(apt.coordinate(y) is not None for y in lifted),
    }


def _pair(x: Chamber, y: Chamber) -> OppPair:
    return OppPair(x, y) if x.sign == PLUS else OppPair(y, x)


def returning_companions(gallery: list[Chamber], home: Chamber, budget: int = 100_000) -> list[Chamber]:
    """Chambers e_0 = home, ..., e_k = home of the other sign such that each
    (gallery[i], e_i) is opposite and e_i equals or is s-adjacent to e_(i-1),
    s being the type of the i-th gallery step.

    Depth-first; candidates are tried as: the panel chamber closer to home,
    staying put, then the remaining panel chambers in pool order.
    """
    steps = [relative_position(a, b).first for a, b in zip(gallery, gallery[1:])]
    k = len(steps)
    path = [home]
    visited = 0

    def candidates(e: Chamber, i: int) -> list[Chamber]:
        z = gallery[i]
        s = steps[i - 1]
        if s is None:
            return [e] if codistance(z, e).is_identity() else []
        d = distance(e, home)
        others = panel(e, s)[1:]
        closer = [y for y in others if distance(y, home) < d]
        rest = [y for y in others if not any(y is c for c in closer)]
        ordered = closer + [e] + rest
        return [y for y in ordered if codistance(z, y).is_identity()]

    def dfs(i: int) -> bool:
        nonlocal visited
        visited += 1
        if visited > budget:
            raise ResourceLimitError("companion search budget exhausted")
        if i > k:
            return path[-1] == home
        for y in candidates(path[-1], i):
            if distance(y, home) > k - i:
                continue
            path.append(y)
            if dfs(i + 1):
                return True
            path.pop()
        return False

    if not dfs(1):
        raise CertificateError("no returning companion walk exists")
    return path


# -- solving and factorizing ---------------------------------------------------------------

def solve_adjacent(z: OppPair, sigma: GeneratorSet) -> int:
    """Index of the first sigma in Sigma with sigma.z = c."""
    p = sigma.p
    if distance(base_chamber(PLUS, p), z.plus) > 1 or distance(base_chamber(MINUS, p), z.minus) > 1:
        raise ValueError("pair is not within distance 1 of the base pair")
    for i, g in enumerate(sigma.elements):
        if iwahori_member(g * z.plus.rep, PLUS) and iwahori_member(g * z.minus.rep, MINUS):
            return i
    raise NoSolverError("no element of Sigma carries the pair to the base pair")


def _walk_to_base(pairs: list[OppPair], sigma: GeneratorSet) -> tuple[list[int], MatSL2]:
    """pairs[0] = c and consecutive pairs adjacent; return sigma_i with
    (sigma_m ... sigma_1).pairs[m] = c."""
    acc = MatSL2.identity(sigma.p)
    word: list[int] = []
    for pair in pairs[1:]:
        i = solve_adjacent(pair.translate(acc), sigma)
        word.append(i)
        acc = sigma[i] * acc
    return word, acc


@dataclass(frozen=True)
class FactorizationCertificate:
    target: MatSL2
    word: tuple
    d_plus: int
    d_minus: int
    stabilizer_flag: bool
    phase_b_route: str = "lifted"

    @property
    def d_x(self) -> int:
        return self.d_plus + self.d_minus

    def __len__(self):
        return len(self.word)

    def bound_holds(self) -> bool:
        return len(self.word) <= max(1, 2 * self.d_x)


def factorize(gamma: MatSL2, sigma: Optional[GeneratorSet] = None) -> FactorizationCertificate:
    """Write gamma as gamma_+ . gamma_- with |gamma_-| <= d_-(c-, x-) and
    |gamma_+| <= d_+(c+, gamma_-.x+), where x = gamma^-1.c."""
    if not gamma.is_lattice_element():
        raise ValueError("factorize needs a lattice element")
    p = gamma.p
    sigma = sigma or build_sigma(p)
    c_plus, c_minus = base_chamber(PLUS, p), base_chamber(MINUS, p)
    d_plus = bruhat_cell(gamma, PLUS).w.length
    d_minus = bruhat_cell(gamma, MINUS).w.length
    g_inv = gamma.inverse()
    x_minus = Chamber(MINUS, g_inv)

    # phase A: carry x- to c- along a minimal gallery lifted from c+
    gal = minimal_gallery(c_minus, x_minus)
    lifted = lift_gallery(gal, c_plus)
    word_minus, gamma_minus = _walk_to_base([OppPair(y, r) for r, y in zip(gal, lifted)], sigma)
    if not Chamber(MINUS, gamma_minus * g_inv) == c_minus:
        raise CertificateError("phase A did not reach c-")

    # phase B: carry gamma_-.x+ to c+ while fixing c-
    z0 = Chamber(PLUS, gamma_minus * g_inv)
    gal = minimal_gallery(z0, c_plus)
    companions = lift_gallery(gal, c_minus)
    route = "lifted"
    if companions[-1] != c_minus:
        # the apartment of (z0, c-) need not contain c+, so the lift can end
        # at another chamber opposite c+; search for a returning walk instead
        companions = returning_companions(gal, c_minus)
        route = "searched"
    rev = [OppPair(z, y) for z, y in zip(reversed(gal), reversed(companions))]
    word_plus, gamma_plus = _walk_to_base(rev, sigma)

    residue = gamma_plus * gamma_minus * g_inv
    if not stabilizes_base(residue):
        raise CertificateError("residue does not stabilize the base pair")
    # gamma = residue^-1 . gamma_+ . gamma_-, as a left-to-right product
    word = list(reversed(word_plus)) + list(reversed(word_minus))
    stab = residue.inverse()
    flag = False
    if not stab.is_identity():
        if word:
            merged = sigma.lookup(stab * sigma[word[0]])
            if merged is None:
                word.insert(0, _index_or_fail(sigma, stab))
                flag = True
            else:
                word[0] = merged
        else:
            word = [_index_or_fail(sigma, stab)]
            flag = True
    cert = FactorizationCertificate(gamma, tuple(word), d_plus, d_minus, flag, route)
    if sigma.product(cert.word) != gamma:
        raise CertificateError("factorization does not recompose")
    return cert


def _index_or_fail(sigma: GeneratorSet, g: MatSL2) -> int:
    i = sigma.lookup(g)
    if i is None:
        raise CertificateError("stabilizer element missing from Sigma")
    return i


# -- exact word length -----------------------------------------------------------------------

@functools.lru_cache(maxsize=8)
def word_length_ball(p: int, radius: int, max_size: int = 2_000_000) -> dict:
    """{g: |g|_Sigma} for all g with |g|_Sigma <= radius, by BFS from the identity."""
    sigma = build_sigma(p)
    ident = MatSL2.identity(p)
    dist = {ident: 0}
    frontier = [ident]
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in sigma.elements:
                h = g * s
                if h not in dist:
                    dist[h] = r
                    nxt.append(h)
                    if len(dist) > max_size:
                        raise ResourceLimitError(f"word-length ball exceeds {max_size} elements")
        frontier = nxt
    return dist


def exact_word_length(gamma: MatSL2, radius_cap: int) -> Optional[int]:
    """|gamma|_Sigma if it is at most radius_cap, else None."""
    return word_length_ball(gamma.p, radius_cap).get(gamma)


# -- experiment ----------------------------------------------------------------------------

CSV_COLUMNS = ("gamma_id", "d_plus", "d_minus", "d_X", "factor_len", "exact_len", "ratio", "stab_flag")

DEFAULT_EXACT_RADIUS = {2: 4, 3: 2, 5: 1}


@dataclass
class ExperimentRow:
    gamma_id: int
    d_plus: int
    d_minus: int
    d_x: int
    factor_len: int
    exact_len: Optional[int]
    stab_flag: bool
    gamma: MatSL2 = field(repr=False)
    word: tuple = field(default=(), repr=False)

    @property
    def ratio(self) -> Optional[float]:
        return self.factor_len / self.d_x if self.d_x else None

    def violations(self) -> list[str]:
        out = []
        if self.d_x > 2 * self.factor_len:
            out.append("d_X > 2 factor_len")
        if self.factor_len > max(1, 2 * self.d_x):
            out.append("factor_len > max(1, 2 d_X)")
        if self.exact_len is not None:
            if self.d_x > 2 * self.exact_len:
                out.append("d_X > 2 exact_len")
            if self.exact_len > self.factor_len:
                out.append("exact_len > factor_len")
        return out

    def csv_fields(self) -> list[str]:
        return [
            str(self.gamma_id), str(self.d_plus), str(self.d_minus), str(self.d_x),
            str(self.factor_len), "" if self.exact_len is None else str(self.exact_len),
            "" if self.ratio is None else f"{self.ratio:.6f}", str(int(self.stab_flag)),
        ]


def random_sigma_word(sigma: GeneratorSet, max_len: int, rng: random.Random) -> MatSL2:
    length = rng.randint(0, max_len)
    return sigma.product(rng.randrange(len(sigma)) for _ in range(length))


def distortion_experiment(p: int, samples: int, max_word_len: int, seed: int,
                          exact_radius: Optional[int] = None) -> dict:
    """Sample random Sigma-words and certify both orbit-map inequalities on each.

    Returns {"rows": [...], "summary": {...}}.  Rows are produced in sample
    order from a single seeded generator, so the table is reproducible.
    """
    if p not in (2, 3, 5):
        raise ValueError("experiments support p in {2, 3, 5}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    start = time.perf_counter()
    sigma = build_sigma(p)
    radius = DEFAULT_EXACT_RADIUS[p] if exact_radius is None else exact_radius
    rng = random.Random(seed)
    rows = []
    for k in range(samples):
        gamma = random_sigma_word(sigma, max_word_len, rng)
        cert = factorize(gamma, sigma)
        rows.append(ExperimentRow(
            gamma_id=k, d_plus=cert.d_plus, d_minus=cert.d_minus, d_x=cert.d_x,
            factor_len=len(cert), exact_len=exact_word_length(gamma, radius),
            stab_flag=cert.stabilizer_flag or (cert.d_x == 0 and not gamma.is_identity()),
            gamma=gamma, word=cert.word,
        ))
    ratios = [r.ratio for r in rows if r.ratio is not None]
    summary = {
        "samples": samples,
        "violations": sum(1 for r in rows if r.violations()),
        "max_ratio": max(ratios) if ratios else 0.0,
        "runtime_ms": round(1000 * (time.perf_counter() - start)),
    }
    return {"rows": rows, "summary": summary}
