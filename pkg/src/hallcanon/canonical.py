"""The bar-invariant canonical basis and its certificates.

The bar involution is computed through monomial coordinates (monomials are
bar-fixed); the canonical elements solve the standard unitriangular system
g = g-bar * zeta with off-diagonal entries in v^-1 Z[v^-1].  A second,
independent route runs the truncation algorithm directly on the monomial
expansions; both must agree element by element.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import BarSolveError
from .hallalg import nindex_from_json, nindex_json
from .laurent import ONE, ZERO, LaurentPoly, in_delta_plus_tail
from .pbw import IndexSystem, PBWData


def _row_sub(row, other, factor):
    for k, c in other.items():
        s = row.get(k, ZERO) - factor * c
        if s:
            row[k] = s
        else:
            row.pop(k, None)


def invert_unitriangular(order, rows) -> dict:
    """Invert a unitriangular matrix given as {a: {b: coeff}} over the order."""
    pos = {a: i for i, a in enumerate(order)}
    inv = {a: {a: ONE} for a in order}
    for i, a in enumerate(order):
        # inv[a][c] = -sum_{c <= d < a} rows[a][d] * inv[d][c]
        acc: dict = {}
        for d, coeff in rows[a].items():
            if d == a:
                continue
            for c, x in inv[d].items():
                s = acc.get(c, ZERO) + coeff * x
                if s:
                    acc[c] = s
                else:
                    acc.pop(c, None)
        for c, x in acc.items():
            assert pos[c] < i
            inv[a][c] = -x
    return inv


def zeta_matrix(data: PBWData) -> dict:
    """bar(E_a) = sum_b zeta[a][b] E_b, unitriangular with diagonal one."""
    order = data.order
    eta_inv = invert_unitriangular(order, data.eta)
    Z: dict = {}
    for a in order:
        row: dict = {}
        for b, c in data.eta[a].items():
            cb = c.bar()
            for idx2, x in eta_inv[b].items():
                s = row.get(idx2, ZERO) + cb * x
                if s:
                    row[idx2] = s
                else:
                    row.pop(idx2, None)
        if row.get(a) != ONE:
            raise BarSolveError(f"bar matrix diagonal is not 1 at {a}")
        Z[a] = row
    _check_bar_involutive(order, Z)
    return Z


def _check_bar_involutive(order, Z):
    """bar applied twice must be the identity: Zbar * Z = I."""
    for a in order:
        acc: dict = {}
        for b, c in Z[a].items():
            cb = c.bar()
            for idx2, x in Z[b].items():
                s = acc.get(idx2, ZERO) + cb * x
                if s:
                    acc[idx2] = s
                else:
                    acc.pop(idx2, None)
        expected = {a: ONE}
        if acc != expected:
            raise BarSolveError(f"bar involution fails to square to 1 at {a}")


def lusztig_solve(order, Z, pos=None) -> dict:
    """Solve g = gbar * Z with unit diagonal and g off-diagonal in v^-1 Z[v^-1]."""
    if pos is None:
        pos = {a: i for i, a in enumerate(order)}
    G: dict = {}
    for a in order:
        row = {a: ONE}
        ia = pos[a]
        for ib in range(ia - 1, -1, -1):
            b = order[ib]
            r = ZERO
            for ic in range(ib + 1, ia + 1):
                c = order[ic]
                gc = row.get(c)
                zc = Z[c].get(b)
                if gc and zc:
                    r = r + gc.bar() * zc
            if r.is_zero():
                continue
            if r.coeff(0) != 0 or r.bar() != -r or not r.is_integral():
                raise BarSolveError(
                    f"no admissible solution at ({a}, {b}): residue {r.text()}"
                )
            g = r.negative_part()
            if g:
                row[b] = g
        G[a] = row
    return G


@dataclass
class CanonicalData:
    """Canonical basis data at one dimension vector."""

    pbw: PBWData
    zeta: dict
    g: dict  # C over E, unitriangular
    C_over_N: dict
    C_over_mon: dict


class CanonicalSolver:
    """Computes and verifies the canonical basis for one quiver."""

    def __init__(self, system: IndexSystem):
        self.system = system
        self.engine = system.engine
        self._solve_memo: dict = {}

    def solve(self, nu) -> CanonicalData:
        nu = tuple(nu)
        if nu in self._solve_memo:
            return self._solve_memo[nu]
        data = self.system.pbw_basis(nu)
        Z = zeta_matrix(data)
        G = lusztig_solve(data.order, Z)
        C_over_N = {}
        C_over_mon = {}
        for a in data.order:
            accN: dict = {}
            accM: dict = {}
            for b, c in G[a].items():
                for idx2, x in data.E[b].items():
                    s = accN.get(idx2, ZERO) + c * x
                    if s:
                        accN[idx2] = s
                    else:
                        accN.pop(idx2, None)
                for idx2, x in data.eta[b].items():
                    s = accM.get(idx2, ZERO) + c * x
                    if s:
                        accM[idx2] = s
                    else:
                        accM.pop(idx2, None)
            C_over_N[a] = accN
            C_over_mon[a] = accM
        out = CanonicalData(data, Z, G, C_over_N, C_over_mon)
        self._solve_memo[nu] = out
        return out

    def solve_with_order(self, nu, order) -> dict:
        """Re-run the triangular solve over another linear extension."""
        data = self.system.pbw_basis(tuple(nu))
        Z = zeta_matrix(data)
        pos = {a: i for i, a in enumerate(order)}
        return lusztig_solve(list(order), Z, pos)

    # -- the truncation algorithm ------------------------------------------

    def truncation(self, nu):
        """Bar-invariant elements by folding monomial coefficients.

        Returns (G_over_mon, G_over_N); a hard iteration guard protects
        against upstream corruption.
        """
        data = self.system.pbw_basis(tuple(nu))
        order = data.order
        aper = set(order)
        G_over_mon: dict = {}
        G_over_N: dict = {}
        guard = 0
        limit = (len(order) + 1) ** 2 + 16
        for pos, a in enumerate(order):
            cur = dict(data.mon[a])
            used = {a: ONE}
            for b in reversed(order[:pos]):
                guard += 1
                if guard > limit:
                    raise BarSolveError("truncation failed to terminate")
                phi = cur.get(b, ZERO)
                if phi.in_vinv_Z():
                    continue
                if not phi.is_integral():
                    raise BarSolveError(f"non-integral coefficient at {b}")
                fold = phi.bar_fold()
                _row_sub(cur, data.mon[b], fold)
                s = used.get(b, ZERO) - fold
                if s:
                    used[b] = s
                else:
                    used.pop(b, None)
            if cur.get(a) != ONE:
                raise BarSolveError("truncation lost its leading term")
            for b, c in cur.items():
                if b != a and b in aper and not c.in_vinv_Z():
                    raise BarSolveError("truncation left a bad aperiodic tail")
            G_over_mon[a] = used
            G_over_N[a] = cur
        return G_over_mon, G_over_N

    # -- the bar involution on coordinate vectors ----------------------------

    def bar_element(self, nu, coeffs_over_E) -> dict:
        """bar of sum c_a E_a, expressed over E again."""
        data = self.system.pbw_basis(tuple(nu))
        Z = zeta_matrix(data)
        out: dict = {}
        for a, c in coeffs_over_E.items():
            cb = c.bar()
            for b, z in Z[a].items():
                s = out.get(b, ZERO) + cb * z
                if s:
                    out[b] = s
                else:
                    out.pop(b, None)
        return out

    # -- certificates -----------------------------------------------------------

    def gram_E(self, nu) -> dict:
        """Green-form Gram data of the PBW elements, as rational functions."""
        data = self.system.pbw_basis(tuple(nu))
        out = {}
        for i, a in enumerate(data.order):
            for b in data.order[i:]:
                out[(a, b)] = self.engine.green_generic(data.E[a], data.E[b])
        return out

    def verify(self, nu, cdata: CanonicalData | None = None) -> dict:
        """Machine-checkable certificate for the canonical basis at nu."""
        nu = tuple(nu)
        if cdata is None:
            cdata = self.solve(nu)
        order = cdata.pbw.order
        pos = {a: i for i, a in enumerate(order)}
        report: dict = {}
        # Unitriangularity of C over E with v^-1-integral tails.
        unitri = True
        for a in order:
            for b, c in cdata.g[a].items():
                if b == a:
                    unitri = unitri and c == ONE
                elif not (pos[b] < pos[a] and c.in_vinv_Z()):
                    unitri = False
        report["unitriangular"] = unitri
        # Bar invariance per element: G = Gbar * Z.
        bar_ok = {}
        for a in order:
            acc: dict = {}
            for c, gc in cdata.g[a].items():
                gb = gc.bar()
                for b, z in cdata.zeta[c].items():
                    s = acc.get(b, ZERO) + gb * z
                    if s:
                        acc[b] = s
                    else:
                        acc.pop(b, None)
            bar_ok[a] = acc == cdata.g[a]
        report["bar_invariant"] = bar_ok
        # Almost orthogonality via the Green form on N coordinates.
        K = self.engine.cfg.series_order
        orth = {}
        for i, a in enumerate(order):
            for b in order[i:]:
                val = self.engine.green_generic(cdata.C_over_N[a], cdata.C_over_N[b])
                delta = 1 if a == b else 0
                orth[(a, b)] = in_delta_plus_tail(val, delta, K)
        report["almost_orthogonal"] = orth
        # Truncation route agreement.
        tmon, _ = self.truncation(nu)
        report["truncation_agrees"] = tmon == cdata.C_over_mon
        report["ok"] = (
            report["unitriangular"]
            and all(bar_ok.values())
            and all(orth.values())
            and report["truncation_agrees"]
        )
        return report

    # -- serialization ------------------------------------------------------------

    def bundle(self, nu) -> dict:
        """Deterministic JSON certificate bundle for one dimension vector."""
        nu = tuple(nu)
        cdata = self.solve(nu)
        report = self.verify(nu, cdata)
        order = cdata.pbw.order
        pos = {a: i for i, a in enumerate(order)}
        all_idx = cdata.pbw.idxset.all_indices
        npos = {a: i for i, a in enumerate(all_idx)}

        def mat(rows, col_space):
            out = []
            for a in order:
                row = rows.get(a, {})
                ent = [
                    [col_space[b], c.to_json()]
                    for b, c in sorted(row.items(), key=lambda kv: col_space[kv[0]])
                ]
                out.append(ent)
            return out

        gram = self.gram_E(nu)
        bundle = {
            "schema": 1,
            "quiver": self.engine.quiver.to_json(),
            "quiver_name": self.engine.quiver.name,
            "dim": list(nu),
            "indices": [nindex_json(a) for a in order],
            "n_indices": [nindex_json(a) for a in all_idx],
            "monomial_words": [
                list(map(list, self.system.word_for_index(a))) for a in order
            ],
            "monomial_over_N": mat(cdata.pbw.mon, npos),
            "E_over_N": mat(cdata.pbw.E, npos),
            "E_over_monomial": mat(cdata.pbw.eta, pos),
            "monomial_over_E": mat(invert_unitriangular(order, cdata.pbw.eta), pos),
            "zeta": mat(cdata.zeta, pos),
            "g": mat(cdata.g, pos),
            "C_over_E": mat(cdata.g, pos),
            "C_over_monomial": mat(cdata.C_over_mon, pos),
            "C_over_N": mat(cdata.C_over_N, npos),
            "gram_E": [
                [pos[a], pos[b], val.to_json()] for (a, b), val in sorted(
                    gram.items(), key=lambda kv: (pos[kv[0][0]], pos[kv[0][1]])
                )
            ],
            "certificates": {
                "unitriangular": report["unitriangular"],
                "bar_invariant": [report["bar_invariant"][a] for a in order],
                "almost_orthogonal": all(report["almost_orthogonal"].values()),
                "truncation_agrees": report["truncation_agrees"],
                "ok": report["ok"],
            },
            "meta": {
                "series_order": self.engine.cfg.series_order,
                "primes": list(self.engine.cfg.primes),
                "seed": self.engine.cfg.seed,
                "linear_extension": "lex-negated preprojective/preinjective data, "
                "then partition size, then tube degeneration keys, then partition lex",
            },
        }
        return bundle


def verify_bundle(bundle: dict) -> dict:
    """Re-check a bundle's certificates from its stored matrices alone."""
    from .laurent import RationalFn

    order = [nindex_from_json(x) for x in bundle["indices"]]
    n = len(order)

    def as_rows(mat):
        rows = []
        for ent in mat:
            rows.append({j: LaurentPoly.from_json(cj) for j, cj in ent})
        return rows

    g = as_rows(bundle["g"])
    zeta = as_rows(bundle["zeta"])
    report: dict = {}
    unitri = True
    for i in range(n):
        for j, c in g[i].items():
            if j == i:
                unitri = unitri and c == ONE
            elif not (j < i and c.in_vinv_Z()):
                unitri = False
    report["unitriangular"] = unitri
    bar_ok = []
    for i in range(n):
        acc: dict = {}
        for k, gc in g[i].items():
            gb = gc.bar()
            for j, z in zeta[k].items():
                s = acc.get(j, ZERO) + gb * z
                if s:
                    acc[j] = s
                else:
                    acc.pop(j, None)
        bar_ok.append(acc == g[i])
    report["bar_invariant"] = bar_ok
    # Orthogonality from the stored E-Gram matrix.
    gmap = {}
    for i, j, val in bundle["gram_E"]:
        gmap[(i, j)] = RationalFn.from_json(val)
    K = bundle["meta"]["series_order"]
    orth = True
    for i in range(n):
        for j in range(i, n):
            val = RationalFn(ZERO)
            for bi, ci in g[i].items():
                for bj, cj in g[j].items():
                    key = (bi, bj) if (bi, bj) in gmap else (bj, bi)
                    if key in gmap:
                        val = val + RationalFn(ci * cj) * gmap[key]
            if not in_delta_plus_tail(val, 1 if i == j else 0, K):
                orth = False
    report["almost_orthogonal"] = orth
    report["ok"] = unitri and all(bar_ok) and orth
    return report


def latex_table(bundle: dict) -> str:
    """A small LaTeX table of the canonical basis over the monomials."""
    lines = [
        r"\begin{tabular}{ll}",
        r"\hline",
        r"index & canonical element over monomials \\",
        r"\hline",
    ]
    for idx_json, row in zip(bundle["indices"], bundle["C_over_monomial"]):
        terms = []
        for j, cj in row:
            c = LaurentPoly.from_json(cj)
            terms.append(f"({c.text()})\\,\\mathfrak{{m}}_{{{j}}}")
        lines.append(f"${idx_json}$ & ${' + '.join(terms)}$ \\\\")
    lines += [r"\hline", r"\end{tabular}"]
    return "\n".join(lines)
