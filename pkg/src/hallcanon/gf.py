"""Small finite fields GF(p^e) with table arithmetic, and exact linear algebra.

Field elements are encoded as ints in range(q); for extensions the int is
the base-p digit string of the polynomial representative.  Everything here
is exact; matrices are lists of int lists.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product

_MAX_TABLE_Q = 64


def _factor_prime_power(q: int):
    if q < 2:
        raise ValueError("q must be a prime power >= 2")
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, e
    raise ValueError(f"{q} is not a prime power")


def _poly_mul_mod(a, b, modulus, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    # Reduce by the monic modulus of degree e.
    e = len(modulus) - 1
    for i in range(len(out) - 1, e - 1, -1):
        c = out[i]
        if c:
            for j in range(e + 1):
                out[i - e + j] = (out[i - e + j] - c * modulus[j]) % p
    return out[:e]


def _find_irreducible(p: int, e: int):
    """Monic irreducible of degree e over F_p, coefficients ascending."""

    def is_irreducible(poly):
        # Trial division by all monic polys of degree <= e//2.
        for d in range(1, e // 2 + 1):
            for tail in product(range(p), repeat=d):
                div = list(tail) + [1]
                # Long division of poly by div over F_p.
                rem = list(poly)
                while len(rem) >= len(div) and any(rem):
                    while rem and rem[-1] == 0:
                        rem.pop()
                    if len(rem) < len(div):
                        break
                    c = rem[-1]
                    shift = len(rem) - len(div)
                    for j in range(len(div)):
                        rem[shift + j] = (rem[shift + j] - c * div[j]) % p
                    while rem and rem[-1] == 0:
                        rem.pop()
                if not any(rem):
                    return False
        return True

    for tail in product(range(p), repeat=e):
        poly = list(tail) + [1]
        if poly[0] != 0 and is_irreducible(poly):
            return poly
    raise ArithmeticError(f"no irreducible of degree {e} over F_{p}")


class GF:
    """The finite field with q elements; elements are ints 0..q-1."""

    _instances: dict[int, "GF"] = {}

    def __new__(cls, q: int):
        if q in cls._instances:
            return cls._instances[q]
        self = super().__new__(cls)
        cls._instances[q] = self
        return self

    def __init__(self, q: int):
        if hasattr(self, "q"):
            return
        if q > _MAX_TABLE_Q:
            raise ValueError(f"field size {q} above the table limit {_MAX_TABLE_Q}")
        p, e = _factor_prime_power(q)
        self.q = q
        self.p = p
        self.e = e
        if e == 1:
            self.modulus = None
            add = [[(a + b) % p for b in range(q)] for a in range(q)]
            mul = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            self.modulus = _find_irreducible(p, e)
            digits = [self._digits(a) for a in range(q)]
            add = [
                [self._undigits([(x + y) % p for x, y in zip(digits[a], digits[b])]) for b in range(q)]
                for a in range(q)
            ]
            mul = [
                [
                    self._undigits(_poly_mul_mod(digits[a], digits[b], self.modulus, p))
                    for b in range(q)
                ]
                for a in range(q)
            ]
        self._add = add
        self._mul = mul
        self._neg = [add[a].index(0) for a in range(q)]
        self._inv = [0] * q
        for a in range(1, q):
            self._inv[a] = mul[a].index(1)

    def _digits(self, a):
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def _undigits(self, ds):
        out = 0
        for d in reversed(ds):
            out = out * self.p + d
        return out

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def neg(self, a):
        return self._neg[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def elements(self):
        return range(self.q)

    def __repr__(self):
        return f"GF({self.q})"

    def __reduce__(self):
        return (GF, (self.q,))


# -- matrices ------------------------------------------------------------


def zeros(rows: int, cols: int):
    return [[0] * cols for _ in range(rows)]


def identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(F: GF, A, B):
    rows, inner, cols = len(A), len(B), len(B[0]) if B else 0
    out = zeros(rows, cols)
    for i in range(rows):
        Ai = A[i]
        for k in range(inner):
            a = Ai[k]
            if a:
                Bk = B[k]
                Oi = out[i]
                for j in range(cols):
                    if Bk[j]:
                        Oi[j] = F.add(Oi[j], F.mul(a, Bk[j]))
    return out


def mat_vec(F: GF, A, v):
    return [
        _dot(F, A[i], v)
        for i in range(len(A))
    ]


def _dot(F: GF, row, v):
    s = 0
    for a, b in zip(row, v):
        if a and b:
            s = F.add(s, F.mul(a, b))
    return s


def rref(F: GF, mat):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = [list(r) for r in mat]
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [F.sub(rows[i][j], F.mul(f, rows[r][j])) for j in range(n)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(F: GF, mat) -> int:
    return len(rref(F, mat)[0])


def nullspace(F: GF, mat):
    """Basis (list of vectors) of the right kernel of mat."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    if m == 0:
        return [[1 if j == i else 0 for j in range(n)] for i in range(n)]
    rows, pivots = rref(F, mat)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(rows[i][fc])
        basis.append(v)
    return basis


def is_invertible(F: GF, mat) -> bool:
    return len(mat) == len(mat[0]) and rank(F, mat) == len(mat)


def coords_in_rowspace(F: GF, rref_rows, pivots, v):
    """Coordinates of v in the row space, or None if v is outside it."""
    v = list(v)
    coords = []
    for i, pc in enumerate(pivots):
        c = v[pc]
        coords.append(c)
        if c:
            v = [F.sub(v[j], F.mul(c, rref_rows[i][j])) for j in range(len(v))]
    if any(v):
        return None
    return coords


def reduce_mod_rowspace(F: GF, rref_rows, pivots, v):
    """Canonical representative of v modulo the row space (pivot coords zeroed)."""
    v = list(v)
    for i, pc in enumerate(pivots):
        c = v[pc]
        if c:
            v = [F.sub(v[j], F.mul(c, rref_rows[i][j])) for j in range(len(v))]
    return v


@lru_cache(maxsize=None)
def gaussian_binomial_int(d: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^d, as an exact integer."""
    if k < 0 or k > d:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def subspace_count(d: int, q: int) -> int:
    return sum(gaussian_binomial_int(d, k, q) for k in range(d + 1))


def subspaces(F: GF, d: int, k: int):
    """All k-dimensional subspaces of F_q^d as RREF row tuples."""
    if k == 0:
        yield ()
        return
    for pivots in combinations(range(d), k):
        free_positions = [
            (r, c)
            for r in range(k)
            for c in range(pivots[r] + 1, d)
            if c not in pivots
        ]
        for values in product(F.elements(), repeat=len(free_positions)):
            rows = zeros(k, d)
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), val in zip(free_positions, values):
                rows[r][c] = val
            yield tuple(tuple(r) for r in rows)
