"""The twin tree of SL_2(F_p[t, 1/t]).

Chambers of the positive tree are cosets g.B+ and chambers of the negative
tree are cosets g.B-, where

    B+ = {v_t(a), v_t(b), v_t(d) >= 0, v_t(c) >= 1}
    B- = {v_inf(a), v_inf(c), v_inf(d) >= 0, v_inf(b) >= 1}

are the Iwahori subgroups fixing the base chambers c+ and c-.  The Weyl
group is infinite dihedral on {s0, s1}, lifted by n1 = [[0, 1], [-1, 0]] and
n0 = [[0, -1/t], [t, 0]].  Bruhat cells (distance) and Birkhoff cells
(codistance) are computed by exact elimination and returned together with
a certificate that recomposes to the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CertificateError, NotOppositeError
from .laurent import INF_PLACE, T_PLACE, MatSL2, RatFunc

S0, S1 = 0, 1
LETTERS = (S0, S1)
PLUS, MINUS = 1, -1

_PLACE = {PLUS: T_PLACE, MINUS: INF_PLACE}
# required valuations of (a, b, c, d) for Iwahori membership
_IWAHORI_BOUNDS = {PLUS: (0, 0, 1, 0), MINUS: (0, 1, 0, 0)}


def letter_name(s: int) -> str:
    return f"s{s}"


def sign_name(sign: int) -> str:
    return "+" if sign == PLUS else "-"


# -- affine Weyl group -----------------------------------------------------------

@dataclass(frozen=True)
class AffineWeylElt:
    """Element of the infinite dihedral group <s0, s1>.

    A reduced word alternates letters, so the length and the first letter
    determine the element.
    """

    length: int = 0
    first: Optional[int] = None

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if (self.length == 0) != (self.first is None):
            raise ValueError("first letter must be given exactly when length > 0")
        if self.first is not None and self.first not in LETTERS:
            raise ValueError(f"bad letter {self.first!r}")

    @classmethod
    def from_word(cls, word) -> "AffineWeylElt":
        stack: list[int] = []
        for s in word:
            if s not in LETTERS:
                raise ValueError(f"bad letter {s!r}")
            if stack and stack[-1] == s:
                stack.pop()
            else:
                stack.append(s)
        return cls(len(stack), stack[0] if stack else None)

    @classmethod
    def letter(cls, s: int) -> "AffineWeylElt":
        return cls(1, s)

    def word(self) -> tuple[int, ...]:
        if not self.length:
            return ()
        return tuple(self.first if i % 2 == 0 else 1 - self.first for i in range(self.length))

    @property
    def last(self) -> Optional[int]:
        if not self.length:
            return None
        return self.first if self.length % 2 else 1 - self.first

    def is_identity(self) -> bool:
        return self.length == 0

    def inverse(self) -> "AffineWeylElt":
        return AffineWeylElt(self.length, self.last)

    def __mul__(self, other: "AffineWeylElt") -> "AffineWeylElt":
        return AffineWeylElt.from_word(self.word() + other.word())

    def times(self, s: int) -> "AffineWeylElt":
        """Right multiplication by a simple reflection."""
        return AffineWeylElt.from_word(self.word() + (s,))

    def __str__(self):
        return "".join(letter_name(s) for s in self.word()) or "1"


IDENTITY_W = AffineWeylElt()


# -- fixed group elements ----------------------------------------------------------

def _r(p, terms):
    return RatFunc.laurent(p, terms)


def n1(p: int) -> MatSL2:
    return MatSL2(_r(p, {}), _r(p, {0: 1}), _r(p, {0: -1}), _r(p, {}), check=False)


def n0(p: int) -> MatSL2:
    return MatSL2(_r(p, {}), _r(p, {-1: -1}), _r(p, {1: 1}), _r(p, {}), check=False)


def n_s(s: int, p: int) -> MatSL2:
    return n0(p) if s == S0 else n1(p)


def weyl_lift(w: AffineWeylElt, p: int) -> MatSL2:
    """n_w: the product of n0, n1 along the reduced word of w."""
    g = MatSL2.identity(p)
    for s in w.word():
        g = g * n_s(s, p)
    return g


def chi_alpha(a: int, p: int) -> MatSL2:
    return MatSL2(_r(p, {0: 1}), _r(p, {0: a}), _r(p, {}), _r(p, {0: 1}), check=False)


def chi_neg_alpha(a: int, p: int) -> MatSL2:
    return MatSL2(_r(p, {0: 1}), _r(p, {}), _r(p, {0: a}), _r(p, {0: 1}), check=False)


def chi_alpha0(a: int, p: int) -> MatSL2:
    return MatSL2(_r(p, {0: 1}), _r(p, {}), _r(p, {1: a}), _r(p, {0: 1}), check=False)


def chi_neg_alpha0(a: int, p: int) -> MatSL2:
    return MatSL2(_r(p, {0: 1}), _r(p, {-1: a}), _r(p, {}), _r(p, {0: 1}), check=False)


def torus(lam: int, p: int) -> MatSL2:
    if lam % p == 0:
        raise ValueError("torus parameter must be nonzero")
    return MatSL2(_r(p, {0: lam}), _r(p, {}), _r(p, {}), _r(p, {0: pow(lam, p - 2, p)}), check=False)


def diag_t(k: int, p: int) -> MatSL2:
    """diag(t^k, t^-k)."""
    return MatSL2(_r(p, {k: 1}), _r(p, {}), _r(p, {}), _r(p, {-k: 1}), check=False)


# root group of the s-panel of the base chamber, per sign
_PANEL_ROOT = {
    (PLUS, S1): chi_alpha,
    (PLUS, S0): chi_alpha0,
    (MINUS, S1): chi_neg_alpha,
    (MINUS, S0): chi_neg_alpha0,
}


# -- Iwahori membership and cells ----------------------------------------------------

def iwahori_member(g: MatSL2, sign: int) -> bool:
    place = _PLACE[sign]
    for x, bound in zip(g.entries(), _IWAHORI_BOUNDS[sign]):
        if not x.is_zero() and x.valuation(place) < bound:
            return False
    return True


def _exponent(x: RatFunc, sign: int) -> int:
    """Exponent e with x = t^e * (unit at the place of the given sign)."""
    v = x.valuation(_PLACE[sign])
    return v if sign == PLUS else -v


def weyl_from_monomial(m: MatSL2, sign: int) -> AffineWeylElt:
    """Read off w from a monomial matrix lying in n_w times the torus."""
    if m.b.is_zero() and m.c.is_zero():
        k = _exponent(m.a, sign)
        if k > 0:
            return AffineWeylElt(2 * k, S1)
        if k < 0:
            return AffineWeylElt(-2 * k, S0)
        return IDENTITY_W
    if m.a.is_zero() and m.d.is_zero():
        e = _exponent(m.b, sign)
        if e >= 0:
            return AffineWeylElt(2 * e + 1, S1)
        return AffineWeylElt(-2 * e - 1, S0)
    raise ValueError("matrix is not monomial")


@dataclass(frozen=True)
class CellCertificate:
    """left * n_w * right == g, with left and right in the stated Iwahori subgroups."""

    w: AffineWeylElt
    left: MatSL2
    right: MatSL2

    def recompose(self, p: int) -> MatSL2:
        return self.left * weyl_lift(self.w, p) * self.right


_INF = float("inf")


def _score(x: RatFunc, sign: int, offset: int) -> float:
    if x.is_zero():
        return _INF
    return 2 * x.valuation(_PLACE[sign]) + offset


def bruhat_cell(g: MatSL2, sign: int) -> CellCertificate:
    """The w with g in B.n_w.B for the Iwahori B of the given sign.

    Entries are scored by twice their valuation, shifted by one in the two
    off-diagonal corners so that Iwahori membership reads "all scores >= 0"
    and the minimum is attained at a unique pivot otherwise.  Clearing the
    pivot's row and column with Iwahori-elementary operations leaves a
    monomial matrix, which is n_w up to the torus.
    """
    p = g.p
    # b corner needs valuation >= 0 (+) or >= 1 (-); c corner the reverse
    off_b, off_c = (1, -1) if sign == PLUS else (-1, 1)
    scores = (
        _score(g.a, sign, 0), _score(g.b, sign, off_b),
        _score(g.c, sign, off_c), _score(g.d, sign, 0),
    )
    one, zero = RatFunc.one(p), RatFunc.zero(p)
    ident = MatSL2.identity(p)
    if min(scores) >= 0:
        cert = CellCertificate(IDENTITY_W, ident, g)
    else:
        pivot = scores.index(min(scores))
        i, j = divmod(pivot, 2)
        rows = [[g.a, g.b], [g.c, g.d]]
        piv = rows[i][j]
        # row operation: clear the other entry of column j
        x = -(rows[1 - i][j] / piv)
        left = MatSL2(one, zero, x, one, check=False) if i == 0 else MatSL2(one, x, zero, one, check=False)
        # column operation: clear the other entry of row i
        y = -(rows[i][1 - j] / piv)
        right = MatSL2(one, y, zero, one, check=False) if j == 0 else MatSL2(one, zero, y, one, check=False)
        if not (iwahori_member(left, sign) and iwahori_member(right, sign)):
            raise CertificateError("elimination step left the Iwahori subgroup")
        m = left * g * right
        w = weyl_from_monomial(m, sign)
        h = weyl_lift(w, p).inverse() * m
        cert = CellCertificate(w, left.inverse(), h * right.inverse())
    if not (iwahori_member(cert.left, sign) and iwahori_member(cert.right, sign)):
        raise CertificateError("Bruhat certificate factor outside the Iwahori subgroup")
    if cert.recompose(p) != g:
        raise CertificateError("Bruhat certificate does not recompose")
    return cert


def _lowest(row) -> tuple[int, tuple[int, int]]:
    """Lowest t-exponent of a pair of Laurent polynomials and its coefficient vector."""
    terms = [x.laurent_terms() for x in row]
    lo = min(min(tm) for tm in terms if tm)
    return lo, tuple(tm.get(lo, 0) for tm in terms)


def birkhoff_cell(g: MatSL2) -> CellCertificate:
    """The w with g in B-.n_w.B+, for g in SL_2(F_p[t, 1/t]).

    Row-reduces g by operations from B- (multipliers in F_p[1/t], strictly
    negative powers in the upper corner) until the coefficient vectors of
    the lowest powers of t in the two rows are independent.  The rows then
    sit at t^k and t^-k and one more step exposes n_w.  The certificate
    factors are Laurent matrices, so left is in B- and right in B+ of the
    lattice itself.
    """
    if not g.is_lattice_element():
        raise ValueError("codistance is defined for lattice elements only")
    p = g.p
    one, zero = RatFunc.one(p), RatFunc.zero(p)
    r1, r2 = [g.a, g.b], [g.c, g.d]
    ops: list[MatSL2] = []

    def add_row(target, source, coef: int, exp: int, upper: bool):
        mult = RatFunc.monomial(p, coef, exp)
        for col in range(2):
            target[col] = target[col] + mult * source[col]
        op = MatSL2(one, mult, zero, one, check=False) if upper else MatSL2(one, zero, mult, one, check=False)
        ops.append(op)

    inv = lambda x: pow(x, p - 2, p)  # noqa: E731
    while True:
        lo1, lc1 = _lowest(r1)
        lo2, lc2 = _lowest(r2)
        if (lc1[0] * lc2[1] - lc1[1] * lc2[0]) % p:
            break
        # proportional leading vectors: cancel the higher-degree row (in 1/t)
        if lo1 < lo2:
            k = next(i for i in range(2) if lc2[i])
            lam = lc1[k] * inv(lc2[k]) % p
            add_row(r1, r2, -lam, lo1 - lo2, upper=True)
        else:
            k = next(i for i in range(2) if lc1[i])
            lam = lc2[k] * inv(lc1[k]) % p
            add_row(r2, r1, -lam, lo2 - lo1, upper=False)
    if lo1 + lo2 != 0:
        raise CertificateError("row-reduced form has the wrong total degree")
    k = lo1
    (l11, _), (l21, _) = lc1, lc2
    if l21 == 0:
        w = weyl_from_monomial(diag_t(k, p), PLUS)
    elif l11 == 0:
        w = AffineWeylElt(2 * k + 1, S1) if k >= 0 else AffineWeylElt(-2 * k - 1, S0)
    elif k >= 0:
        add_row(r2, r1, -l21 * inv(l11), -2 * k, upper=False)
        w = weyl_from_monomial(diag_t(k, p), PLUS)
    else:
        add_row(r1, r2, -l11 * inv(l21), 2 * k, upper=True)
        w = AffineWeylElt(-2 * k - 1, S0)
    reduced = MatSL2(r1[0], r1[1], r2[0], r2[1], check=False)
    left_inv = MatSL2.identity(p)
    for op in ops:
        left_inv = op * left_inv
    right = weyl_lift(w, p).inverse() * reduced
    cert = CellCertificate(w, left_inv.inverse(), right)
    if not (cert.left.is_lattice_element() and iwahori_member(cert.left, MINUS)):
        raise CertificateError("Birkhoff left factor outside B-")
    if not (cert.right.is_lattice_element() and iwahori_member(cert.right, PLUS)):
        raise CertificateError("Birkhoff right factor outside B+")
    if cert.recompose(p) != g:
        raise CertificateError("Birkhoff certificate does not recompose")
    return cert


# -- chambers ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Chamber:
    """The chamber rep.c_sign.  Equality is equality of chambers, not of reps."""

    sign: int
    rep: MatSL2

    def __eq__(self, other):
        if not isinstance(other, Chamber):
            return NotImplemented
        return same_chamber(self, other)

    __hash__ = None

    def translate(self, g: MatSL2) -> "Chamber":
        return Chamber(self.sign, g * self.rep)

    def __str__(self):
        return f"{self.rep}.c{sign_name(self.sign)}"


def base_chamber(sign: int, p: int) -> Chamber:
    return Chamber(sign, MatSL2.identity(p))


def same_chamber(x: Chamber, y: Chamber) -> bool:
    return x.sign == y.sign and iwahori_member(x.rep.inverse() * y.rep, x.sign)


def relative_position(x: Chamber, y: Chamber) -> AffineWeylElt:
    if x.sign != y.sign:
        raise ValueError("Weyl distance needs chambers of the same sign")
    return bruhat_cell(x.rep.inverse() * y.rep, x.sign).w


def distance(x: Chamber, y: Chamber) -> int:
    return relative_position(x, y).length


def codistance_cert(minus: Chamber, plus: Chamber) -> CellCertificate:
    if minus.sign != MINUS or plus.sign != PLUS:
        raise ValueError("codistance takes a negative then a positive chamber")
    return birkhoff_cell(minus.rep.inverse() * plus.rep)


def codistance(x: Chamber, y: Chamber) -> AffineWeylElt:
    """delta*(x, y) for chambers of opposite signs, in either order."""
    if x.sign == y.sign:
        raise ValueError("codistance needs chambers of opposite signs")
    if x.sign == MINUS:
        return codistance_cert(x, y).w
    return codistance_cert(y, x).w.inverse()


def is_opposite(x: Chamber, y: Chamber) -> bool:
    return codistance(x, y).is_identity()


def panel(x: Chamber, s: int) -> list[Chamber]:
    """The s-panel through x: x first, then rep.u(a).n_s.c for a = 0..p-1."""
    p = x.rep.p
    root = _PANEL_ROOT[(x.sign, s)]
    ns = n_s(s, p)
    out = [x]
    for a in range(p):
        out.append(Chamber(x.sign, x.rep * root(a, p) * ns))
    return out


def neighbors(x: Chamber, s: int) -> list[Chamber]:
    """All p+1 chambers of the s-panel through x, including x, checked pairwise distinct."""
    chambers = panel(x, s)
    p = x.rep.p
    for i, y in enumerate(chambers):
        for z in chambers[i + 1:]:
            if relative_position(y, z) != AffineWeylElt.letter(s):
                raise CertificateError(f"panel pool is not a thick {letter_name(s)}-panel")
    if len(chambers) != p + 1:
        raise CertificateError("panel has the wrong size")
    return chambers


# -- opposite pairs and twin apartments -------------------------------------------------

@dataclass(frozen=True, eq=False)
class OppPair:
    plus: Chamber
    minus: Chamber

    def translate(self, g: MatSL2) -> "OppPair":
        return OppPair(self.plus.translate(g), self.minus.translate(g))

    def __eq__(self, other):
        if not isinstance(other, OppPair):
            return NotImplemented
        return self.plus == other.plus and self.minus == other.minus

    __hash__ = None


@dataclass(frozen=True)
class TwinApartment:
    """The twin apartment base.A of the standard one; chamber_at(w) = base.n_w.c."""

    base: MatSL2

    def chamber_at(self, w: AffineWeylElt, sign: int) -> Chamber:
        return Chamber(sign, self.base * weyl_lift(w, self.base.p))

    def coordinate(self, x: Chamber) -> Optional[AffineWeylElt]:
        """w with x = chamber_at(w, sign), or None if x is outside the apartment."""
        w = bruhat_cell(self.base.inverse() * x.rep, x.sign).w
        return w if self.chamber_at(w, x.sign) == x else None


def base_pair(p: int) -> OppPair:
    return OppPair(base_chamber(PLUS, p), base_chamber(MINUS, p))


def opposite_pair(plus_rep: MatSL2, minus_rep: MatSL2) -> tuple[OppPair, TwinApartment]:
    plus, minus = Chamber(PLUS, plus_rep), Chamber(MINUS, minus_rep)
    cert = codistance_cert(minus, plus)
    if not cert.w.is_identity():
        raise NotOppositeError(f"chambers are not opposite (codistance {cert.w})")
    apartment = TwinApartment(plus_rep * cert.right.inverse())
    if apartment.chamber_at(IDENTITY_W, PLUS) != plus or apartment.chamber_at(IDENTITY_W, MINUS) != minus:
        raise CertificateError("apartment base does not carry the base pair onto the given pair")
    return OppPair(plus, minus), apartment


def pairs_adjacent(x: OppPair, y: OppPair) -> bool:
    """Adjacency in Opp(X): both sides s-adjacent or equal, for one common s."""
    wp = relative_position(x.plus, y.plus)
    wm = relative_position(x.minus, y.minus)
    if wp.length > 1 or wm.length > 1:
        return False
    return wp.first is None or wm.first is None or wp.first == wm.first
