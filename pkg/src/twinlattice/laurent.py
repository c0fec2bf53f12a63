"""Exact arithmetic in F_p(t) and in SL_2 over it.

Polynomials are tuples of integers in {0, ..., p-1}, lowest degree first,
with no trailing zeros; the zero polynomial is ``()``.  A :class:`RatFunc`
is a reduced fraction with monic denominator, so equality is structural.
Laurent polynomials (denominator a power of t) take a fast path through
reduction, since nearly every value handled by the twin tree is one.
"""

from __future__ import annotations

import ast
from typing import Sequence

from .errors import ResourceLimitError

T_PLACE = "t"
INF_PLACE = "t_inf"

DEGREE_CAP = 512

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)

Poly = tuple


def check_prime(p: int) -> int:
    if p not in _PRIMES:
        raise ValueError(f"p must be a prime between 2 and 31, got {p!r}")
    return p


# -- polynomial helpers ------------------------------------------------------

def _trim(c: list) -> Poly:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(f: Poly, g: Poly, p: int) -> Poly:
    if len(f) < len(g):
        f, g = g, f
    c = list(f)
    for i, x in enumerate(g):
        c[i] = (c[i] + x) % p
    return _trim(c)


def poly_neg(f: Poly, p: int) -> Poly:
    return tuple((-x) % p for x in f)


def poly_sub(f: Poly, g: Poly, p: int) -> Poly:
    return poly_add(f, poly_neg(g, p), p)


def poly_mul(f: Poly, g: Poly, p: int) -> Poly:
    if not f or not g:
        return ()
    c = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                c[i + j] += x * y
    return _trim([x % p for x in c])


def poly_scale(f: Poly, k: int, p: int) -> Poly:
    k %= p
    if k == 0:
        return ()
    return tuple(x * k % p for x in f)


def poly_divmod(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    inv_lead = pow(g[-1], p - 2, p)
    if len(r) - 1 < dg:
        return (), tuple(r)
    q = [0] * (len(r) - dg)
    for i in range(len(r) - 1 - dg, -1, -1):
        coef = r[i + dg] * inv_lead % p
        q[i] = coef
        if coef:
            for j, y in enumerate(g):
                r[i + j] = (r[i + j] - coef * y) % p
    return _trim(q), _trim(r[:dg])


def poly_gcd(f: Poly, g: Poly, p: int) -> Poly:
    while g:
        f, g = g, poly_divmod(f, g, p)[1]
    return poly_monic(f, p)


def poly_monic(f: Poly, p: int) -> Poly:
    if not f or f[-1] == 1:
        return f
    return poly_scale(f, pow(f[-1], p - 2, p), p)


def low_degree(f: Poly) -> int:
    """Order of vanishing at t = 0 of a nonzero polynomial."""
    for i, x in enumerate(f):
        if x:
            return i
    raise ValueError("zero polynomial has no valuation")


def _is_monomial(f: Poly) -> bool:
    return f[-1] == 1 and all(x == 0 for x in f[:-1])


# -- rational functions ------------------------------------------------------

class RatFunc:
    """An element of F_p(t) stored as num/den in lowest terms, den monic."""

    __slots__ = ("p", "num", "den", "_hash")

    def __init__(self, p: int, num: Poly, den: Poly = (1,)):
        num, den = _reduce(p, tuple(x % p for x in num), tuple(x % p for x in den))
        self._set(p, num, den)

    def _set(self, p, num, den):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def _raw(cls, p: int, num: Poly, den: Poly) -> "RatFunc":
        obj = object.__new__(cls)
        obj._set(p, num, den)
        return obj

    @classmethod
    def _from(cls, p: int, num: Poly, den: Poly) -> "RatFunc":
        num, den = _reduce(p, num, den)
        return cls._raw(p, num, den)

    # constructors
    @classmethod
    def const(cls, p: int, k: int) -> "RatFunc":
        k %= p
        return cls._raw(p, (k,) if k else (), (1,))

    @classmethod
    def zero(cls, p: int) -> "RatFunc":
        return cls._raw(p, (), (1,))

    @classmethod
    def one(cls, p: int) -> "RatFunc":
        return cls._raw(p, (1,), (1,))

    @classmethod
    def monomial(cls, p: int, k: int, exp: int) -> "RatFunc":
        """k * t**exp."""
        k %= p
        if k == 0:
            return cls.zero(p)
        if exp >= 0:
            return cls._raw(p, (0,) * exp + (k,), (1,))
        return cls._raw(p, (k,), (0,) * (-exp) + (1,))

    @classmethod
    def laurent(cls, p: int, coeffs: dict) -> "RatFunc":
        """Build sum of c * t**e from a mapping {e: c}."""
        coeffs = {e: c % p for e, c in coeffs.items() if c % p}
        if not coeffs:
            return cls.zero(p)
        lo = min(coeffs)
        shift = -lo if lo < 0 else 0
        num = [0] * (max(coeffs) + shift + 1)
        for e, c in coeffs.items():
            num[e + shift] = c
        return cls._from(p, _trim(num), (0,) * shift + (1,))

    # predicates
    def is_zero(self) -> bool:
        return not self.num

    def is_laurent(self) -> bool:
        return _is_monomial(self.den)

    def laurent_terms(self) -> dict:
        """{exponent: coefficient} for a Laurent polynomial."""
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        shift = len(self.den) - 1
        return {i - shift: c for i, c in enumerate(self.num) if c}

    def valuation(self, place: str = T_PLACE) -> int:
        if not self.num:
            raise ValueError("valuation of zero is undefined")
        if place == T_PLACE:
            return low_degree(self.num) - low_degree(self.den)
        if place == INF_PLACE:
            return (len(self.den) - 1) - (len(self.num) - 1)
        raise ValueError(f"unknown place {place!r}")

    def _check(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, int):
                return RatFunc.const(self.p, other)
            return NotImplemented
        if other.p != self.p:
            raise ValueError("characteristic mismatch")
        return other

    # arithmetic
    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.p
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            return RatFunc._from(p, poly_add(self.num, other.num, p), self.den)
        if _is_monomial(self.den) and _is_monomial(other.den):
            i, j = len(self.den) - 1, len(other.den) - 1
            m = max(i, j)
            a = (0,) * (m - i) + self.num
            b = (0,) * (m - j) + other.num
            return RatFunc._from(p, poly_add(a, b, p), (0,) * m + (1,))
        num = poly_add(poly_mul(self.num, other.den, p), poly_mul(other.num, self.den, p), p)
        return RatFunc._from(p, num, poly_mul(self.den, other.den, p))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(self.p, poly_neg(self.num, self.p), self.den)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.p
        if not self.num or not other.num:
            return RatFunc.zero(p)
        if self.den == (1,) and other.den == (1,):
            return RatFunc._from(p, poly_mul(self.num, other.num, p), (1,))
        return RatFunc._from(p, poly_mul(self.num, other.num, p), poly_mul(self.den, other.den, p))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        lead = self.num[-1]
        k = pow(lead, self.p - 2, self.p)
        return RatFunc._raw(self.p, poly_scale(self.den, k, self.p), poly_monic(self.num, self.p))

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = RatFunc.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = RatFunc.const(self.p, other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.p == other.p and self.num == other.num and self.den == other.den

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.p, self.num, self.den))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.is_laurent():
            return format_laurent(self.laurent_terms())
        return f"({_fmt_poly(self.num)})/({_fmt_poly(self.den)})"


def _reduce(p: int, num: Poly, den: Poly) -> tuple[Poly, Poly]:
    num, den = _trim(list(num)), _trim(list(den))
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return (), (1,)
    if _is_monomial(den):
        k = len(den) - 1
        if k:
            common = min(k, low_degree(num))
            if common:
                num, den = num[common:], den[common:]
    else:
        g = poly_gcd(num, den, p)
        if len(g) > 1:
            num = poly_divmod(num, g, p)[0]
            den = poly_divmod(den, g, p)[0]
        if den[-1] != 1:
            k = pow(den[-1], p - 2, p)
            num, den = poly_scale(num, k, p), poly_scale(den, k, p)
    if len(num) > DEGREE_CAP + 1 or len(den) > DEGREE_CAP + 1:
        raise ResourceLimitError(f"degree cap {DEGREE_CAP} exceeded")
    return num, den


def _fmt_poly(f: Poly) -> str:
    return format_laurent({i: c for i, c in enumerate(f) if c})


def format_laurent(terms: dict) -> str:
    if not terms:
        return "0"
    parts = []
    for e in sorted(terms):
        c = terms[e]
        if e == 0:
            parts.append(str(c))
        else:
            mono = "t" if e == 1 else f"t^{e}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(parts)


def valuation(f: RatFunc, place: str = T_PLACE) -> int:
    return f.valuation(place)


# -- SL_2 ----------------------------------------------------------------------

class MatSL2:
    """A determinant-one 2x2 matrix [[a, b], [c, d]] over F_p(t)."""

    __slots__ = ("a", "b", "c", "d", "_hash")

    def __init__(self, a: RatFunc, b: RatFunc, c: RatFunc, d: RatFunc, check: bool = True):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_hash", None)
        if check:
            if len({a.p, b.p, c.p, d.p}) != 1:
                raise ValueError("entries over different fields")
            if a * d - b * c != RatFunc.one(a.p):
                raise ValueError("matrix does not have determinant 1")

    def __setattr__(self, name, value):
        raise AttributeError("MatSL2 is immutable")

    @property
    def p(self) -> int:
        return self.a.p

    @classmethod
    def identity(cls, p: int) -> "MatSL2":
        one, zero = RatFunc.one(p), RatFunc.zero(p)
        return cls(one, zero, zero, one, check=False)

    @classmethod
    def from_laurent(cls, p: int, rows: Sequence[Sequence[dict]]) -> "MatSL2":
        (a, b), (c, d) = [[RatFunc.laurent(p, e) for e in row] for row in rows]
        return cls(a, b, c, d)

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, other: "MatSL2") -> "MatSL2":
        if not isinstance(other, MatSL2):
            return NotImplemented
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return MatSL2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, check=False)

    def inverse(self) -> "MatSL2":
        return MatSL2(self.d, -self.b, -self.c, self.a, check=False)

    def __neg__(self):
        return MatSL2(-self.a, -self.b, -self.c, -self.d, check=False)

    def det(self) -> RatFunc:
        return self.a * self.d - self.b * self.c

    def is_lattice_element(self) -> bool:
        """True iff all entries are Laurent polynomials, i.e. self is in SL_2(F_p[t, 1/t])."""
        return all(x.is_laurent() for x in self.entries())

    def is_identity(self) -> bool:
        return self == MatSL2.identity(self.p)

    def __eq__(self, other):
        if not isinstance(other, MatSL2):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.entries())
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        a, b, c, d = (str(x) for x in self.entries())
        return f"[[{a}, {b}], [{c}, {d}]]"

    def __repr__(self):
        return f"MatSL2({self}, p={self.p})"


def mat_mul(g: MatSL2, h: MatSL2) -> MatSL2:
    return g * h


def mat_inverse(g: MatSL2) -> MatSL2:
    return g.inverse()


def diag(x: RatFunc) -> MatSL2:
    p = x.p
    zero = RatFunc.zero(p)
    return MatSL2(x, zero, zero, x.inverse(), check=False)


# -- text syntax ---------------------------------------------------------------

def parse_ratfunc(text: str, p: int) -> RatFunc:
    """Parse an expression in t such as ``"1 + 2*t^-1"`` over F_p."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval(tree.body, p)


def parse_matrix(text: str, p: int) -> MatSL2:
    """Parse ``"[[a, b], [c, d]]"`` with entries in t and t^-1 over F_p."""
    check_prime(p)
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse matrix {text!r}: {exc.msg}") from None
    rows = tree.body
    if not (isinstance(rows, ast.List) and len(rows.elts) == 2
            and all(isinstance(r, ast.List) and len(r.elts) == 2 for r in rows.elts)):
        raise ValueError("matrix must have the shape [[a, b], [c, d]]")
    (a, b), (c, d) = [[_eval(x, p) for x in r.elts] for r in rows.elts]
    return MatSL2(a, b, c, d)


def _eval(node, p: int) -> RatFunc:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return RatFunc.const(p, node.value)
    if isinstance(node, ast.Name) and node.id == "t":
        return RatFunc.monomial(p, 1, 1)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval(node.operand, p)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exp = _int_literal(node.right)
            return _eval(node.left, p) ** exp
        left, right = _eval(node.left, p), _eval(node.right, p)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right
    raise ValueError(f"unsupported expression: {ast.dump(node)}")


def _int_literal(node) -> int:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_literal(node.operand)
    raise ValueError("exponents must be integer literals")
