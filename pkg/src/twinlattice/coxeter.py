"""Coxeter systems: the word problem, canonical reduced words, balls and growth.

Elements are handled through the (exact) geometric representation.  The
matrix of w stores the images w(alpha_j) of the simple roots as columns, and
l(ws) < l(w) exactly when column s is a negative root.  Entries live in
Z when every m(s,t) is 2, 3 or inf, and otherwise in the cyclotomic integers
Z[zeta_N] reduced modulo the N-th cyclotomic polynomial, so equality of
elements is exact.  Only the sign of a nonzero root coordinate is decided
numerically.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ResourceLimitError

INF = math.inf
GENERATOR_CAP = 16
SPHERE_CAP = 10**7


# -- Coxeter matrices ------------------------------------------------------------

@dataclass(frozen=True)
class CoxeterSystem:
    generators: tuple
    matrix: tuple

    def __init__(self, generators: Sequence[str], matrix: Sequence[Sequence], generator_cap: int = GENERATOR_CAP):
        gens = tuple(str(g) for g in generators)
        rows = tuple(tuple(_entry(x) for x in row) for row in matrix)
        n = len(gens)
        if n > generator_cap:
            raise ResourceLimitError(f"{n} generators exceeds the cap of {generator_cap}")
        if len(set(gens)) != n:
            raise ValueError("generator labels must be distinct")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("Coxeter matrix must be square of size |S|")
        for i in range(n):
            if rows[i][i] != 1:
                raise ValueError(f"diagonal entry m({gens[i]},{gens[i]}) must be 1")
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("Coxeter matrix must be symmetric")
                if rows[i][j] < 2:
                    raise ValueError("off-diagonal entries must be >= 2 or inf")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "matrix", rows)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def m(self, i: int, j: int):
        return self.matrix[i][j]

    def restrict(self, indices: Sequence[int]) -> "CoxeterSystem":
        idx = list(indices)
        return CoxeterSystem([self.generators[i] for i in idx],
                             [[self.matrix[i][j] for j in idx] for i in idx])

    def check_word(self, word: Iterable[int]) -> tuple:
        letters = tuple(word)
        for s in letters:
            if not isinstance(s, int) or not 0 <= s < self.rank:
                raise IndexError(f"generator index {s!r} out of range for rank {self.rank}")
        return letters

    @functools.cached_property
    def _rep(self) -> "_GeometricRep":
        return _GeometricRep(self)

    def __repr__(self):
        return f"CoxeterSystem({list(self.generators)}, {[list(r) for r in self.matrix]})"


def _entry(x):
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        x = int(x)
    if x == INF:
        return INF
    if isinstance(x, float):
        if not x.is_integer():
            raise ValueError(f"Coxeter matrix entry {x} is not an integer")
        x = int(x)
    if not isinstance(x, int) or isinstance(x, bool):
        raise ValueError(f"bad Coxeter matrix entry {x!r}")
    return x


def dihedral(m) -> CoxeterSystem:
    return CoxeterSystem(["s", "t"], [[1, m], [m, 1]])


# -- exact coefficient rings -----------------------------------------------------

def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        q = num[k + len(den) - 1] // den[-1]
        out[k] = q
        for i, c in enumerate(den):
            num[k + i] -= q * c
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@functools.lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple:
    """Integer coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic(d)))
    return tuple(poly)


class _IntRing:
    """Coefficients 2cos(pi/m) for m in {2, 3, inf} are the integers 0, 1, 2."""

    zero, one = 0, 1

    @staticmethod
    def coefficient(m) -> int:
        return {2: 0, 3: 1}.get(m, 2)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def scale(c, a):
        return c * a

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def sign(a) -> int:
        return (a > 0) - (a < 0)


class _CycloRing:
    """Z[zeta_N] modulo Phi_N; elements are coefficient tuples of length phi(N)."""

    def __init__(self, n: int):
        self.n = n
        self.phi = cyclotomic(n)
        self.d = len(self.phi) - 1
        self.zero = (0,) * self.d
        self.one = (1,) + (0,) * (self.d - 1)
        self._cos = [math.cos(2 * math.pi * k / n) for k in range(self.d)]

    def _reduce(self, coeffs: list[int]) -> tuple:
        # Phi_N is monic, so plain long division stays in Z
        c = coeffs[:]
        for k in range(len(c) - 1, self.d - 1, -1):
            q = c[k]
            if q:
                for i, f in enumerate(self.phi):
                    c[k - self.d + i] -= q * f
        c = c[: self.d] + [0] * max(0, self.d - len(c))
        return tuple(c)

    def power(self, k: int) -> tuple:
        c = [0] * max(self.n, self.d)
        c[k % self.n] = 1
        return self._reduce(c)

    def coefficient(self, m):
        if m == INF:
            return self.scale_int(2, self.one)
        k = self.n // (2 * m)
        a, b = self.power(k), self.power(-k)
        return self.add(a, b)

    def scale_int(self, c: int, a: tuple) -> tuple:
        return tuple(c * x for x in a)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def scale(self, c, a):
        if not any(c) or not any(a):
            return self.zero
        prod = [0] * (2 * self.d - 1)
        for i, x in enumerate(c):
            if x:
                for j, y in enumerate(a):
                    prod[i + j] += x * y
        return self._reduce(prod)

    def value(self, a) -> float:
        return sum(x * c for x, c in zip(a, self._cos))

    def sign(self, a) -> int:
        if not any(a):
            return 0
        v = self.value(a)
        if abs(v) > 1e-6:
            return 1 if v > 0 else -1
        import mpmath

        with mpmath.workdps(80):
            v = mpmath.fsum(x * mpmath.cos(2 * mpmath.pi * k / self.n) for k, x in enumerate(a))
        if v == 0:
            raise ArithmeticError("nonzero cyclotomic integer evaluated to zero")
        return 1 if v > 0 else -1


class _GeometricRep:
    def __init__(self, sys: CoxeterSystem):
        n = sys.rank
        finite_ms = {sys.m(i, j) for i in range(n) for j in range(n) if i != j} - {INF}
        if finite_ms <= {2, 3}:
            self.ring = _IntRing()
        else:
            order = 1
            for m in finite_ms:
                order = order * 2 * m // math.gcd(order, 2 * m)
            self.ring = _CycloRing(order)
        r = self.ring
        self.n = n
        self.coef = [[None if i == j else r.coefficient(sys.m(i, j)) for j in range(n)] for i in range(n)]
        zero = r.zero
        self.identity = tuple(tuple(r.one if i == j else zero for i in range(n)) for j in range(n))
        self._ints = isinstance(r, _IntRing)

    def right_mul(self, mat: tuple, s: int) -> tuple:
        """Columns of w*s from the columns of w."""
        r = self.ring
        col_s = mat[s]
        out = []
        for j, col in enumerate(mat):
            if j == s:
                out.append(tuple(r.neg(x) for x in col_s))
                continue
            c = self.coef[s][j]
            if (c == 0) if self._ints else not any(c):
                out.append(col)
            else:
                out.append(tuple(r.add(x, r.scale(c, y)) for x, y in zip(col, col_s)))
        return tuple(out)

    def is_negative(self, col: tuple) -> bool:
        """Roots are positive or negative; the largest coordinate decides."""
        r = self.ring
        if self._ints:
            return any(x < 0 for x in col)
        best = max(col, key=lambda x: abs(r.value(x)))
        return r.sign(best) < 0

    def from_word(self, letters: Iterable[int]) -> tuple:
        mat = self.identity
        for s in letters:
            mat = self.right_mul(mat, s)
        return mat


# -- words -----------------------------------------------------------------------

@dataclass(frozen=True, order=False)
class WeylWord:
    letters: tuple = ()

    def __len__(self):
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def sort_key(self):
        return (len(self.letters), self.letters)

    def __lt__(self, other: "WeylWord"):
        return self.sort_key() < other.sort_key()

    def render(self, sys: CoxeterSystem) -> str:
        return " ".join(sys.generators[s] for s in self.letters) or "e"


def normalize(sys: CoxeterSystem, word: Iterable[int]) -> WeylWord:
    """The lexicographically least reduced word for the element ``word``.

    Peels off the smallest left descent of w each time; s is a left descent
    exactly when column s of the matrix of w^-1 is negative.
    """
    letters = sys.check_word(word)
    rep = sys._rep
    inv = rep.from_word(reversed(letters))
    out = []
    while True:
        s = next((s for s in range(rep.n) if rep.is_negative(inv[s])), None)
        if s is None:
            return WeylWord(tuple(out))
        out.append(s)
        inv = rep.right_mul(inv, s)


def multiply(sys: CoxeterSystem, a: Iterable[int], b: Iterable[int]) -> WeylWord:
    return normalize(sys, tuple(a) + tuple(b))


def inverse(sys: CoxeterSystem, a: Iterable[int]) -> WeylWord:
    return normalize(sys, tuple(reversed(tuple(a))))


def length(sys: CoxeterSystem, word: Iterable[int]) -> int:
    return len(normalize(sys, word))


def is_reduced(sys: CoxeterSystem, word: Iterable[int]) -> bool:
    letters = tuple(word)
    return len(normalize(sys, letters)) == len(letters)


def same_element(sys: CoxeterSystem, a: Iterable[int], b: Iterable[int]) -> bool:
    rep = sys._rep
    return rep.from_word(sys.check_word(a)) == rep.from_word(sys.check_word(b))


# -- spheres, balls, growth ------------------------------------------------------

def spheres(sys: CoxeterSystem, radius: int, cap: int = SPHERE_CAP) -> Iterator[list[WeylWord]]:
    """Yield the spheres of radius 0..radius, each sorted lexicographically.

    Extending the words of one sphere in lexicographic order by ascending
    letters reaches every element of the next sphere first through its
    canonical word, since a prefix of a least word is itself least.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    rep = sys._rep
    sphere = [((), rep.identity)]
    yield [WeylWord(())]
    for n in range(1, radius + 1):
        nxt: dict = {}
        for letters, mat in sphere:
            for s in range(rep.n):
                if rep.is_negative(mat[s]):
                    continue
                new = rep.right_mul(mat, s)
                if new not in nxt:
                    nxt[new] = letters + (s,)
                    if len(nxt) > cap:
                        raise ResourceLimitError(f"sphere size exceeds cap {cap}")
        sphere = sorted(((w, m) for m, w in nxt.items()), key=lambda e: e[0])
        yield [WeylWord(w) for w, _ in sphere]
        if not sphere:
            # finite group exhausted; remaining spheres are empty
            for _ in range(radius - n):
                yield []
            return


@dataclass(frozen=True)
class GrowthTable:
    coefficients: tuple
    truncation: int

    def __post_init__(self):
        if len(self.coefficients) != self.truncation + 1:
            raise ValueError("need exactly N+1 coefficients")

    def __getitem__(self, n: int) -> int:
        return self.coefficients[n]

    def is_exhausted(self) -> bool:
        """True when the enumeration reached the end of a finite group."""
        return self.coefficients[-1] == 0

    def ball_size(self) -> int:
        return sum(self.coefficients)


def growth_coefficients(sys: CoxeterSystem, n: int, cap: int = SPHERE_CAP) -> GrowthTable:
    if n < 0:
        raise ValueError("N must be non-negative")
    coeffs = tuple(len(s) for s in spheres(sys, n, cap))
    return GrowthTable(coeffs, n)


def ball(sys: CoxeterSystem, radius: int, cap: int = SPHERE_CAP) -> list[WeylWord]:
    out = []
    for s in spheres(sys, radius, cap):
        out.extend(s)
    return out
