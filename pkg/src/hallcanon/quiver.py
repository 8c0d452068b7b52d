"""Quiver combinatorics: Euler forms, affine roots, reflections, admissible sequences.

Dimension vectors are plain int tuples indexed like ``Quiver.vertices``.
Supported constructors cover the cyclic quiver (including the one-loop
Jordan case), the Kronecker quiver and linearly ordered type A quivers
with arbitrary orientation; arbitrary quivers can be loaded from JSON.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .config import UnsupportedQuiverError


class Quiver:
    """Finite quiver with labelled vertices and arrows stored by index."""

    def __init__(self, vertices, arrows, name=None):
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        self.arrows = tuple((self.index[s], self.index[t]) for s, t in arrows)
        self.name = name or f"quiver:{self.vertices}:{self.arrows}"

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __eq__(self, other):
        return (
            isinstance(other, Quiver)
            and self.vertices == other.vertices
            and sorted(self.arrows) == sorted(other.arrows)
        )

    def __hash__(self):
        return hash((self.vertices, tuple(sorted(self.arrows))))

    def __repr__(self):
        return f"Quiver({self.name})"

    # -- structure ------------------------------------------------------

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
            return True
        except UnsupportedQuiverError:
            return False

    def topological_order(self) -> tuple[int, ...]:
        """Vertex indices ordered so every arrow goes forward; stable by label."""
        indeg = [0] * self.n
        for _, t in self.arrows:
            indeg[t] += 1
        ready = sorted(
            (i for i in range(self.n) if indeg[i] == 0), key=lambda i: self.vertices[i]
        )
        out = []
        indeg = list(indeg)
        while ready:
            i = ready.pop(0)
            out.append(i)
            touched = False
            for s, t in self.arrows:
                if s == i:
                    indeg[t] -= 1
                    if indeg[t] == 0:
                        ready.append(t)
                        touched = True
            if touched:
                ready.sort(key=lambda j: self.vertices[j])
        if len(out) != self.n:
            raise UnsupportedQuiverError("quiver has an oriented cycle")
        return tuple(out)

    def is_sink(self, i: int) -> bool:
        return all(s != i for s, _ in self.arrows)

    def is_source(self, i: int) -> bool:
        return all(t != i for _, t in self.arrows)

    def reversed_at(self, i: int) -> "Quiver":
        """Reverse every arrow incident to vertex i (BGP reflection of the quiver)."""
        arrows = []
        for s, t in self.arrows:
            if s == i or t == i:
                arrows.append((self.vertices[t], self.vertices[s]))
            else:
                arrows.append((self.vertices[s], self.vertices[t]))
        return Quiver(self.vertices, arrows, name=f"{self.name}|r{self.vertices[i]}")

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, [(self.vertices[t], self.vertices[s]) for s, t in self.arrows])

    # -- forms ------------------------------------------------------------

    def euler_form(self, nu, nu2) -> int:
        if len(nu) != self.n or len(nu2) != self.n:
            raise ValueError("dimension vector length mismatch")
        out = sum(a * b for a, b in zip(nu, nu2))
        for s, t in self.arrows:
            out -= nu[s] * nu2[t]
        return out

    def symmetric_form(self, nu, nu2) -> int:
        return self.euler_form(nu, nu2) + self.euler_form(nu2, nu)

    def cartan_matrix(self) -> list[list[int]]:
        eye = [[1 if i == j else 0 for j in range(self.n)] for i in range(self.n)]
        return [[self.symmetric_form(eye[i], eye[j]) for j in range(self.n)] for i in range(self.n)]

    # -- roots -------------------------------------------------------------

    def is_root(self, nu) -> bool:
        return any(nu) and 0 <= self.symmetric_form(nu, nu) <= 2

    def is_real_root(self, nu) -> bool:
        return any(nu) and self.symmetric_form(nu, nu) == 2

    def reflect(self, i: int, nu) -> tuple[int, ...]:
        """Simple reflection s_i(nu) = nu - (nu, e_i) e_i."""
        e = tuple(1 if j == i else 0 for j in range(self.n))
        c = self.symmetric_form(nu, e)
        return tuple(nu[j] - c * e[j] for j in range(self.n))

    def delta(self) -> tuple[int, ...]:
        """Minimal imaginary positive root of an affine quiver."""
        ker = _integer_kernel(self.cartan_matrix())
        if len(ker) != 1:
            raise UnsupportedQuiverError("quiver is not affine (Cartan corank != 1)")
        d = ker[0]
        if all(x <= 0 for x in d):
            d = tuple(-x for x in d)
        if not all(x > 0 for x in d):
            raise UnsupportedQuiverError("radical generator is not positive")
        return d

    def is_affine(self) -> bool:
        try:
            self.delta()
            return True
        except UnsupportedQuiverError:
            return False

    def is_finite_type(self) -> bool:
        # Positive definite symmetric Cartan matrix.
        return not _integer_kernel(self.cartan_matrix()) and _positive_definite(
            self.cartan_matrix()
        )

    def defect(self, nu) -> int:
        """Euler pairing <delta, nu>; the sign classifies AR components."""
        return self.euler_form(self.delta(), nu)

    def positive_roots_below(self, bound):
        """All positive roots componentwise <= bound, split (real, imaginary)."""
        real, imag = [], []
        for nu in _box(bound):
            if not any(nu):
                continue
            s = self.symmetric_form(nu, nu)
            if s == 2:
                real.append(nu)
            elif s == 0 and self.is_root(nu):
                imag.append(nu)
        return real, imag

    def to_json(self):
        return {
            "vertices": list(self.vertices),
            "arrows": [[self.vertices[s], self.vertices[t]] for s, t in self.arrows],
        }

    @staticmethod
    def from_json(data) -> "Quiver":
        return Quiver(data["vertices"], [tuple(a) for a in data["arrows"]])


def _box(bound):
    def rec(i):
        if i == len(bound):
            yield ()
            return
        for x in range(bound[i] + 1):
            for rest in rec(i + 1):
                yield (x,) + rest

    return rec(0)


def _integer_kernel(mat) -> list[tuple[int, ...]]:
    """Primitive integer basis of the kernel of an integer matrix."""
    n = len(mat)
    rows = [[Fraction(x) for x in row] for row in mat]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][fc]
        den = 1
        for x in vec:
            den = den * x.denominator // _gcd(den, x.denominator)
        ints = [int(x * den) for x in vec]
        g = 0
        for x in ints:
            g = _gcd(g, abs(x))
        basis.append(tuple(x // g for x in ints))
    return basis


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _positive_definite(mat) -> bool:
    n = len(mat)
    rows = [[Fraction(x) for x in row] for row in mat]
    for k in range(n):
        # Leading principal minors via fraction-free elimination.
        det = rows[k][k]
        if det <= 0:
            return False
        for i in range(k + 1, n):
            f = rows[i][k] / rows[k][k]
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[k])]
    return True


# -- named constructors -------------------------------------------------


def kronecker() -> Quiver:
    """Two vertices 0 -> 1 with a double arrow; vertex 1 is the sink."""
    return Quiver((0, 1), [(0, 1), (0, 1)], name="kronecker")


def cyclic(n: int) -> Quiver:
    """Cyclic quiver on vertices 1..n with arrows i -> i+1 (mod n)."""
    if n < 1:
        raise ValueError("cyclic quiver needs at least one vertex")
    vs = tuple(range(1, n + 1))
    arrows = [(i, (i % n) + 1) for i in vs]
    return Quiver(vs, arrows, name=f"cyclic:{n}")


def linear_an(n: int, orientation: str | None = None) -> Quiver:
    """Type A_n on vertices 1..n; orientation[i] is '>' for i -> i+1."""
    if n < 1:
        raise ValueError("A_n needs at least one vertex")
    orientation = orientation or ">" * (n - 1)
    if len(orientation) != n - 1 or any(c not in "<>" for c in orientation):
        raise ValueError("orientation must be a string of '<'/'>' of length n-1")
    arrows = []
    for i, c in enumerate(orientation, start=1):
        arrows.append((i, i + 1) if c == ">" else ((i + 1), i))
    return Quiver(tuple(range(1, n + 1)), arrows, name=f"an:{n}:{orientation}")


def from_spec(spec: str) -> Quiver:
    """Parse a quiver spec: a named constructor, inline JSON, or @file.json.

    Named forms: kronecker | jordan | cyclic:N | an:N[:orientation].
    JSON form: {"vertices": [...], "arrows": [[s, t], ...]}.
    """
    if spec == "kronecker":
        return kronecker()
    if spec == "jordan":
        return cyclic(1)
    if spec.startswith("cyclic:"):
        return cyclic(int(spec.split(":")[1]))
    if spec.startswith("an:"):
        parts = spec.split(":")
        return linear_an(int(parts[1]), parts[2] if len(parts) > 2 else None)
    if spec.lstrip().startswith("{") or spec.startswith("@"):
        import json

        if spec.startswith("@"):
            with open(spec[1:]) as fh:
                data = json.load(fh)
        else:
            data = json.loads(spec)
        return Quiver.from_json(data)
    raise UnsupportedQuiverError(f"unknown quiver spec {spec!r}")


# -- admissible sequences ------------------------------------------------


class AdmissibleSequence:
    """Doubly infinite vertex sequence adapted to an acyclic quiver.

    With vertices listed topologically (arrows only forward), the periodic
    rule i_t = topo[(t-1) mod n] makes i_0 the last vertex (a sink) and
    i_1 the first (a source).  In affine type this rule is admissible as
    it stands; in finite type the word eventually stops being reduced, so
    each step instead picks the first sink (resp. source) of the current
    reflected quiver that keeps the word reduced, preferring the periodic
    choice, until the finitely many positive roots are exhausted.
    """

    def __init__(self, quiver: Quiver):
        if not quiver.is_acyclic():
            raise UnsupportedQuiverError("admissible sequences need an acyclic quiver")
        self.quiver = quiver
        self.topo = quiver.topological_order()
        # Per side: chosen vertices, beta roots, reflected quivers, and the
        # columns of the accumulated Weyl group element.
        self._neg = {"verts": [], "betas": [], "quivers": [quiver], "w": _id_cols(quiver.n)}
        self._pos = {"verts": [], "betas": [], "quivers": [quiver], "w": _id_cols(quiver.n)}

    def _periodic(self, t: int) -> int:
        return self.topo[(t - 1) % self.quiver.n]

    def _extend(self, side: str) -> bool:
        """Grow one step; returns False when finite type is exhausted."""
        Q = self.quiver
        st = self._neg if side == "-" else self._pos
        cur = st["quivers"][-1]
        t = -len(st["verts"]) if side == "-" else len(st["verts"]) + 1
        ends = [i for i in range(Q.n) if (cur.is_sink(i) if side == "-" else cur.is_source(i))]
        pref = self._periodic(t)
        ends.sort(key=lambda i: (i != pref, Q.vertices[i]))
        for i in ends:
            beta = tuple(_apply_cols(st["w"], _unit(Q.n, i)))
            if all(x >= 0 for x in beta):
                st["verts"].append(i)
                st["betas"].append(beta)
                st["quivers"].append(cur.reversed_at(i))
                st["w"] = _mul_cols(Q, st["w"], i)
                return True
        return False

    def vertex(self, t: int) -> int:
        """Vertex index i_t."""
        st, k = (self._neg, -t) if t <= 0 else (self._pos, t - 1)
        while len(st["verts"]) <= k:
            if not self._extend("-" if t <= 0 else "+"):
                raise IndexError(f"sequence exhausted before i_{t} (finite type)")
        return st["verts"][k]

    def beta(self, t: int) -> tuple[int, ...]:
        """Positive real root beta_t; raises for out-of-range t in finite type."""
        st, k = (self._neg, -t) if t <= 0 else (self._pos, t - 1)
        while len(st["betas"]) <= k:
            if not self._extend("-" if t <= 0 else "+"):
                raise IndexError(f"beta_{t} out of range (finite type exhausted)")
        return st["betas"][k]

    def _horizon(self, bound) -> int:
        # Along each tau-orbit the height grows by at least one per period,
        # so this many steps safely exhausts all roots below the bound.
        return self.quiver.n * (sum(bound) + 2) + 2

    def preprojective_range(self, bound) -> list[int]:
        """All t <= 0 with beta_t componentwise <= bound."""
        out = []
        for s in range(self._horizon(bound)):
            try:
                b = self.beta(-s)
            except IndexError:
                break
            if all(x <= y for x, y in zip(b, bound)):
                out.append(-s)
        return out

    def preinjective_range(self, bound) -> list[int]:
        """All t > 0 with beta_t componentwise <= bound."""
        out = []
        for t in range(1, self._horizon(bound)):
            try:
                b = self.beta(t)
            except IndexError:
                break
            if all(x <= y for x, y in zip(b, bound)):
                out.append(t)
        return out

    def reflected_quiver_chain(self, count: int, side: str) -> list[Quiver]:
        """Quivers sigma_{i_t}...Q along the sink (side='-') or source (side='+') walk."""
        st = self._neg if side == "-" else self._pos
        while len(st["verts"]) < count:
            if not self._extend(side):
                break
        return list(st["quivers"][: len(st["verts"]) + 1])[: count + 1]

    def is_reduced_window(self, r: int, t: int) -> bool:
        """Is s_{i_r} s_{i_{r+1}} ... s_{i_t} reduced (r <= t)?"""
        word = [self.vertex(u) for u in range(r, t + 1)]
        return _word_is_reduced(self.quiver, word)

    def is_adapted_window(self, depth: int) -> bool:
        """Sink/source admissibility for |t| <= depth (holds by construction)."""
        for side in "-+":
            chain = self.reflected_quiver_chain(depth, side)
            st = self._neg if side == "-" else self._pos
            for k, i in enumerate(st["verts"][:depth]):
                q = chain[k]
                if side == "-" and not q.is_sink(i):
                    return False
                if side == "+" and not q.is_source(i):
                    return False
        return True


def _unit(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


def _id_cols(n):
    return [_unit(n, j) for j in range(n)]


def _apply_cols(cols, v):
    n = len(v)
    return [sum(v[j] * cols[j][m] for j in range(n)) for m in range(n)]


def _mul_cols(Q: Quiver, cols, i):
    """Columns of w*s_i given the columns of w."""
    n = Q.n
    cartan = Q.cartan_matrix()
    ci = cols[i]
    return [
        tuple(cols[j][m] - cartan[j][i] * ci[m] for m in range(n)) for j in range(n)
    ]


def _word_is_reduced(Q: Quiver, word) -> bool:
    """Check that s_{word[0]} ... s_{word[-1]} is reduced in the Weyl group.

    Build u from the right; prepending s_i raises the length exactly when
    u^-1(alpha_i) is a positive root.
    """
    n = Q.n
    cartan = Q.cartan_matrix()
    cols = [_unit(n, j) for j in range(n)]  # columns of u^-1
    for i in reversed(word):
        if any(x < 0 for x in cols[i]):
            return False
        # u <- s_i u, hence u^-1 <- u^-1 s_i:
        # new column j is cols[j] - cartan[j][i] * cols[i].
        ci = cols[i]
        cols = [
            tuple(cols[j][m] - cartan[j][i] * ci[m] for m in range(n))
            for j in range(n)
        ]
    return True


def default_admissible(quiver: Quiver) -> AdmissibleSequence:
    """The periodic admissible sequence from the topological vertex order."""
    return AdmissibleSequence(quiver)


# -- dimension oracle ----------------------------------------------------


@lru_cache(maxsize=None)
def _dim_f_table(quiver: Quiver, bound) -> dict:
    real, _ = quiver.positive_roots_below(bound)
    factors = [tuple(r) for r in sorted(real)]
    if quiver.is_affine():
        d = quiver.delta()
        mult = quiver.n - 1
        m = 1
        while all(m * d[i] <= bound[i] for i in range(quiver.n)):
            factors.extend([tuple(m * x for x in d)] * mult)
            m += 1
    table = {tuple([0] * quiver.n): 1}
    for a in factors:
        new = dict(table)
        points = sorted(table)
        for x in points:
            k = 1
            while True:
                y = tuple(x[i] + k * a[i] for i in range(quiver.n))
                if any(y[i] > bound[i] for i in range(quiver.n)):
                    break
                new[y] = new.get(y, 0) + table[x]
                k += 1
        table = new
    return table


def dim_f(quiver: Quiver, nu) -> int:
    """Graded dimension of the positive part of the quantized algebra at nu.

    Independent oracle: product of geometric series over positive real
    roots in the box, with imaginary roots m*delta carrying multiplicity
    (number of vertices - 1) in the affine case.
    """
    nu = tuple(nu)
    if quiver.name.startswith("cyclic:1"):
        raise UnsupportedQuiverError("dimension oracle degenerate for the one-loop quiver")
    return _dim_f_table(quiver, nu).get(nu, 0)
