"""Hall polynomials in q by exact multi-prime interpolation, with a cache.

Counting at single fields is delegated to ``fqrep.FieldContext``; this
module lifts the counts to polynomials in q via exact Lagrange fits with
degree escalation, validated on held-out prime powers.  Keys use abstract
homogeneous points ('slot', k) with a degree pattern, since Hall numbers
only depend on the degrees of the points involved.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from fractions import Fraction

from .config import (
    HallPolynomialContradiction,
    InsufficientPointsError,
    InterpolationError,
    JobConfig,
)
from .fqrep import FieldContext, closed_points, desc_indecs, make_cdesc
from .laurent import LaurentPoly
from .quiver import Quiver

STORE_VERSION = 1


def _poly_mul_int(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _poly_shift(a, k):
    return [0] * k + list(a)


# ---------------------------------------------------------------------------
# exact fitting
# ---------------------------------------------------------------------------


def lagrange_fit(points) -> tuple[Fraction, ...]:
    """Exact interpolating polynomial through (x, y) pairs, coeffs ascending."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            new = [Fraction(0)] * (len(basis) + 1)
            for k, c in enumerate(basis):
                new[k] -= c * xj
                new[k + 1] += c
            basis = new
            denom *= xi - xj
        scale = Fraction(yi) / denom
        for k, c in enumerate(basis):
            coeffs[k] += scale * c
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def eval_poly(coeffs, x):
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def fit_integer_poly(pairs, start_degree=0, cap=None, min_validate=2):
    """Least-degree integer polynomial through the pairs.

    Fits on the first d+1 pairs and demands agreement on every remaining
    pair, at least ``min_validate`` of them.  Returns (coeffs, n_fit) where
    n_fit is the number of pairs consumed by the fit; raises
    InterpolationError if no degree up to ``cap`` works.
    """
    pairs = list(pairs)
    if cap is None:
        cap = len(pairs) - 1 - min_validate
    cap = max(cap, start_degree)
    d = max(0, start_degree)
    while d <= cap:
        if d + 1 + min_validate > len(pairs):
            break
        coeffs = lagrange_fit(pairs[: d + 1])
        if all(c.denominator == 1 for c in coeffs) and all(
            eval_poly(coeffs, x) == y for x, y in pairs[d + 1 :]
        ):
            return tuple(int(c) for c in coeffs), d + 1
        d += 1
    raise InterpolationError(
        f"no integer polynomial of degree <= {cap} fits {len(pairs)} samples"
    )


def fit_rational_function(pairs, max_degree=8, min_validate=2):
    """Exact P(x)/Q(x) through the pairs, degrees escalated jointly.

    Returns (num_coeffs, den_coeffs) as integer tuples with primitive
    content and positive leading denominator coefficient.
    """
    pairs = [(Fraction(x), Fraction(y)) for x, y in pairs]
    for total in range(0, 2 * max_degree + 1):
        for dq in range(0, total + 1):
            dp = total - dq
            need = dp + dq + 1
            if need + min_validate > len(pairs):
                continue
            sol = _solve_rational(pairs[:need], dp, dq)
            if sol is None:
                continue
            num, den = sol
            ok = True
            for x, y in pairs[need:]:
                dv = eval_poly(den, x)
                if dv == 0 or eval_poly(num, x) != y * dv:
                    ok = False
                    break
            if ok:
                return _normalize_rational(num, den)
    raise InterpolationError(
        f"no rational function of degree <= {max_degree} fits {len(pairs)} samples"
    )


def _solve_rational(pairs, dp, dq):
    """Solve sum p_i x^i - y * sum q_j x^j = 0; returns (p, q) or None."""
    ncols = dp + 1 + dq + 1
    rows = []
    for x, y in pairs:
        row = [x**i for i in range(dp + 1)]
        row += [-y * x**j for j in range(dq + 1)]
        rows.append(row)
    kernel = _fraction_kernel(rows, ncols)
    for vec in kernel:
        num = vec[: dp + 1]
        den = vec[dp + 1 :]
        if any(den):
            # Reject spurious solutions where the denominator vanishes at a node.
            if all(eval_poly(den, x) != 0 for x, _ in pairs):
                return num, den
    return None


def _fraction_kernel(rows, ncols):
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][c]
        mat[r] = [x / inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    out = []
    for free in range(ncols):
        if free in pivots:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][free]
        out.append(vec)
    return out


def _normalize_rational(num, den):
    from math import gcd

    lcm = 1
    for c in list(num) + list(den):
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    ni = [int(c * lcm) for c in num]
    di = [int(c * lcm) for c in den]
    g = 0
    for c in ni + di:
        g = gcd(g, abs(c))
    if g > 1:
        ni = [c // g for c in ni]
        di = [c // g for c in di]
    lead = next((c for c in reversed(di) if c), 1)
    if lead < 0:
        ni = [-c for c in ni]
        di = [-c for c in di]
    while ni and ni[-1] == 0:
        ni.pop()
    while di and di[-1] == 0:
        di.pop()
    return tuple(ni), tuple(di)


# ---------------------------------------------------------------------------
# abstract keys
# ---------------------------------------------------------------------------


def abstract_desc(desc, slot_of) -> tuple:
    """Replace concrete homogeneous points by ('slot', k) using slot_of."""
    if desc[0] == "m":
        return desc
    _, cm, c0, cp, homog = desc
    new = tuple(sorted((("slot", slot_of[pt]), lam) for pt, lam in homog))
    return ("c", cm, c0, cp, new)


def abstract_triple(descL, descM, descN):
    """Canonical abstract (L, M, N, degrees); points become shared slots."""
    pts = []
    for d in (descL, descM, descN):
        for pt, _ in (d[4] if d[0] == "c" else ()):
            if pt not in pts:
                pts.append(pt)
    pts.sort(key=lambda p: (1 if p[0] == "i" else len(p[1]), p))
    slot_of = {pt: k for k, pt in enumerate(pts)}
    degrees = tuple(1 if p[0] == "i" else len(p[1]) for p in pts)
    return (
        abstract_desc(descL, slot_of),
        abstract_desc(descM, slot_of),
        abstract_desc(descN, slot_of),
        degrees,
    )


def instantiate_desc(desc, points_by_slot):
    if desc[0] == "m":
        return desc
    _, cm, c0, cp, homog = desc
    conc = tuple(sorted((points_by_slot[pt[1]], lam) for pt, lam in homog))
    return ("c", cm, c0, cp, conc)


def assign_points(q: int, degrees):
    """Deterministically pick distinct points of the required degrees."""
    by_degree: dict = {}
    out = []
    for d in degrees:
        pool = closed_points(q, d)
        used = by_degree.setdefault(d, 0)
        if used >= len(pool):
            raise InsufficientPointsError(
                f"q={q} has only {len(pool)} points of degree {d}"
            )
        out.append(pool[used])
        by_degree[d] = used + 1
    return out


# ---------------------------------------------------------------------------
# polynomials with provenance
# ---------------------------------------------------------------------------


class HallPolynomial:
    """Integer polynomial in q with its sampling provenance."""

    def __init__(self, coeffs, samples, validations, min_q):
        self.coeffs = tuple(int(c) for c in coeffs)
        self.samples = tuple((int(q), int(v)) for q, v in samples)
        self.validations = tuple((int(q), int(v)) for q, v in validations)
        self.min_q = min_q

    def eval(self, q: int) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * q + c
        return out

    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_laurent(self) -> LaurentPoly:
        """Substitute q = v^2."""
        return LaurentPoly.from_q_poly(self.coeffs)

    def text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            if k == 0:
                parts.append(f"{c}")
            else:
                qs = "q" if k == 1 else f"q^{k}"
                if c == 1:
                    parts.append(qs)
                elif c == -1:
                    parts.append(f"-{qs}")
                else:
                    parts.append(f"{c}*{qs}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return {
            "poly": list(self.coeffs),
            "samples": [list(s) for s in self.samples],
            "validations": [list(s) for s in self.validations],
            "min_q": self.min_q,
        }

    @staticmethod
    def from_json(data) -> "HallPolynomial":
        return HallPolynomial(
            data["poly"], data["samples"], data["validations"], data["min_q"]
        )

    def __repr__(self):
        return f"HallPolynomial({self.text()})"


# ---------------------------------------------------------------------------
# content-addressed store
# ---------------------------------------------------------------------------


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _checksum(record: dict) -> str:
    body = {k: v for k, v in record.items() if k != "checksum"}
    return hashlib.sha256(_canonical_json(body).encode()).hexdigest()


class CacheStore:
    """One JSON file per key under <root>/<quiver-id>/<keyhash>.json."""

    def __init__(self, root: str):
        self.root = root

    def path_for(self, quiver_id: str, key) -> str:
        h = hashlib.sha256(_canonical_json(_jsonable(key)).encode()).hexdigest()
        safe = quiver_id.replace(":", "_").replace("/", "_")
        return os.path.join(self.root, safe, f"{h}.json")

    def get(self, quiver_id: str, key):
        path = self.path_for(quiver_id, key)
        if not os.path.exists(path):
            return None
        try:
            with open(path) as fh:
                record = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        if record.get("version") != STORE_VERSION:
            return None
        if record.get("checksum") != _checksum(record):
            return None
        return record

    def put(self, quiver_id: str, key, payload: dict) -> dict:
        record = {
            "version": STORE_VERSION,
            "key": _jsonable(key),
            "created_at": time.time(),
            **payload,
        }
        record["checksum"] = _checksum(record)
        path = self.path_for(quiver_id, key)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(record, fh, sort_keys=True)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return record

    def entries(self):
        if not os.path.isdir(self.root):
            return
        for sub in sorted(os.listdir(self.root)):
            d = os.path.join(self.root, sub)
            if not os.path.isdir(d):
                continue
            for name in sorted(os.listdir(d)):
                if name.endswith(".json"):
                    yield os.path.join(d, name)

    def verify(self):
        """Return a list of (path, ok) for every record in the store."""
        out = []
        for path in self.entries():
            ok = True
            try:
                with open(path) as fh:
                    record = json.load(fh)
                ok = record.get("version") == STORE_VERSION and record.get(
                    "checksum"
                ) == _checksum(record)
            except (OSError, json.JSONDecodeError):
                ok = False
            out.append((path, ok))
        return out

    def gc(self):
        """Remove corrupt or out-of-version records; returns removed paths."""
        removed = []
        for path, ok in self.verify():
            if not ok:
                os.unlink(path)
                removed.append(path)
        return removed


def _jsonable(obj):
    if isinstance(obj, tuple):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, (list, dict, str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


# ---------------------------------------------------------------------------
# the interpolation engine
# ---------------------------------------------------------------------------


class HallPolyEngine:
    """Computes Hall and automorphism-count polynomials for one quiver."""

    def __init__(self, quiver: Quiver, cfg: JobConfig | None = None, contexts=None):
        self.quiver = quiver
        self.cfg = cfg or JobConfig.default()
        self._contexts = contexts if contexts is not None else {}
        self.store = CacheStore(self.cfg.cache_dir) if self.cfg.cache_dir else None
        self._memo: dict = {}

    def ctx(self, q: int) -> FieldContext:
        if q not in self._contexts:
            self._contexts[q] = FieldContext(self.quiver, q, self.cfg)
        return self._contexts[q]

    # -- degree heuristics -------------------------------------------------

    def _ends(self, q0, descL, descM, descN):
        ctx = self.ctx(q0)
        eL = ctx.end(descL)
        eM = ctx.end(descM)
        eN = ctx.end(descN)
        hMN = ctx.hom_desc(descM, descN)
        return eL, max(0, eL - eM - eN + hMN)

    # -- public API ----------------------------------------------------------

    def hall_polynomial(self, descL, descM, descN) -> HallPolynomial:
        """The polynomial q -> g^{L}_{M,N}; descriptors may use concrete points."""
        key = ("hall",) + abstract_triple(descL, descM, descN)
        return self._lookup(key, lambda: self._compute_hall(key))

    def aut_polynomial(self, desc) -> HallPolynomial:
        key_triple = abstract_triple(desc, desc, desc)
        key = ("aut", key_triple[0], key_triple[3])
        return self._lookup(key, lambda: self._compute_aut(key))

    def _lookup(self, key, compute):
        if key in self._memo:
            return self._memo[key]
        if self.store is not None:
            record = self.store.get(self.quiver.name, key)
            if record is not None:
                poly = HallPolynomial.from_json(record)
                self._memo[key] = poly
                return poly
        poly = compute()
        if self.store is not None:
            self.store.put(self.quiver.name, key, poly.to_json())
        self._memo[key] = poly
        return poly

    # -- computations ----------------------------------------------------------

    def _usable_qs(self, degrees):
        out = []
        for q in self.cfg.primes:
            try:
                assign_points(q, degrees)
            except InsufficientPointsError:
                continue
            out.append(q)
        return out

    def _count_hall(self, key, q):
        _, absL, absM, absN, degrees = key
        pts = assign_points(q, degrees)
        ctx = self.ctx(q)
        L = instantiate_desc(absL, pts)
        M = instantiate_desc(absM, pts)
        N = instantiate_desc(absN, pts)
        return ctx.hall(L, M, N), (L, M, N)

    def _compute_hall(self, key) -> HallPolynomial:
        _, absL, absM, absN, degrees = key
        qs = self._usable_qs(degrees)
        if len(qs) < 3:
            raise InterpolationError("not enough usable sample fields")
        # Dimension sanity: impossible shapes give the zero polynomial.
        q0 = qs[0]
        cnt0, (L0, M0, N0) = self._count_hall(key, q0)
        ctx0 = self.ctx(q0)
        dims_ok = tuple(
            a + b for a, b in zip(ctx0.desc_dim(M0), ctx0.desc_dim(N0))
        ) == ctx0.desc_dim(L0)
        if not dims_ok:
            return HallPolynomial((), ((q0, 0),), (), q0)
        cap, _heur = self._ends(q0, L0, M0, N0)
        # Escalate from degree zero: the least validated degree is what
        # "fit on minimal samples" means, and degree monotonicity makes the
        # result independent of the starting point.  The end-dimension
        # heuristic routinely exceeds what the sample pool can validate
        # (e.g. semisimple modules), so it only caps the escalation.
        start = 0
        cap = min(cap, len(qs) - 3)
        pairs = [(q0, cnt0)]
        for q in qs[1:]:
            pairs.append((q, self._count_hall(key, q)[0]))
            if len(pairs) >= 3:
                break
        idx = len(pairs)
        while True:
            try:
                coeffs, n_fit = fit_integer_poly(pairs, start_degree=start, cap=cap)
                break
            except InterpolationError:
                if idx >= len(qs):
                    raise
                pairs.append((qs[idx], self._count_hall(key, qs[idx])[0]))
                idx += 1
        return HallPolynomial(coeffs, pairs[:n_fit], pairs[n_fit:], qs[0])

    def _compute_aut(self, key) -> HallPolynomial:
        """|Aut M| as a polynomial in q, by radical lifting of units.

        For M = (+) M_i^{n_i} with the M_i pairwise non-isomorphic
        indecomposables, the cross-Hom blocks lie in the radical of End M,
        so |Aut M| = q^(sum of cross Hom dims) * prod |GL_{n_i}(End M_i)|
        with End M_i local of residue degree d_i and radical dimension
        e_i - d_i.  The result is validated against direct enumeration at
        every sample field where that enumeration fits the budget.
        """
        from .config import BudgetExceededError
        from .fqrep import point_degree as _pdeg

        _, absD, degrees = key
        qs = self._usable_qs(degrees)
        if not qs:
            raise InterpolationError("no usable sample fields")
        q0 = qs[0]
        ctx0 = self.ctx(q0)
        d0 = instantiate_desc(absD, assign_points(q0, degrees))
        comps = desc_indecs(d0)
        cross = 0
        for i, (ia, na) in enumerate(comps):
            for j, (ib, nb) in enumerate(comps):
                if i != j:
                    cross += na * nb * ctx0.hom_indec(ia, ib)
        coeffs = [0] * cross + [1]  # q^cross
        for ind, n in comps:
            e = ctx0.hom_indec(ind, ind)
            d = _pdeg(ind[1]) if ind[0] == "r" else 1
            rad = e - d
            assert rad >= 0
            coeffs = _poly_shift(coeffs, n * n * rad)
            for k in range(n):
                # factor q^(d n) - q^(d k)
                factor = [0] * (d * n + 1)
                factor[d * n] = 1
                factor[d * k] -= 1
                coeffs = _poly_mul_int(coeffs, factor)
        validations = []
        for q in qs:
            ctx = self.ctx(q)
            dd = instantiate_desc(absD, assign_points(q, degrees))
            if q ** ctx.end(dd) > self.cfg.budget_aut:
                continue
            counted = ctx.aut(dd)
            predicted = 0
            for c in reversed(coeffs):
                predicted = predicted * q + c
            if counted != predicted:
                raise HallPolynomialContradiction(
                    f"closed-form |Aut| disagrees with enumeration at q={q}"
                )
            validations.append((q, counted))
            if len(validations) >= 2:
                break
        return HallPolynomial(coeffs, (), validations, q0)

    def check_at(self, poly: HallPolynomial, descL, descM, descN, q: int):
        """Recount at a fresh field; a mismatch is a hard contradiction."""
        key = ("hall",) + abstract_triple(descL, descM, descN)
        cnt, _ = self._count_hall(key, q)
        if cnt != poly.eval(q):
            raise HallPolynomialContradiction(
                f"validated polynomial {poly.text()} disagrees at q={q}: {cnt}"
            )
        return True
