"""Index combinatorics, monomial builders and the inductive PBW basis.

Indices of the spanning family are pairs (frame, partition); the aperiodic
ones index the monomial, PBW and canonical bases.  The partial order
follows the lexicographic/defect/degeneration clauses; monomials are words
in divided simple powers whose expansions over the N family are computed
generically and checked for unitriangularity on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import UnsupportedQuiverError
from .fqrep import (
    enumerate_msegs,
    make_cdesc,
    mseg_aperiodic,
    mseg_dim,
    mseg_end,
    mseg_hom,
    mseg_normalize,
    mseg_peel_top,
)
from .hallalg import HallEngine, _geL, nindex
from .laurent import ONE, ZERO
from .quiver import dim_f

LESS = "less"
GREATER = "greater"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


def mseg_leq_G(n: int, pi, rho) -> bool:
    """Degeneration order pi <=_G rho via Hom-dimension comparison.

    Hom dimensions from all segment modules of length up to the combined
    total length decide the order at a fixed dimension vector.
    """
    if pi == rho:
        return True
    if mseg_dim(n, pi) != mseg_dim(n, rho):
        return False
    bound = sum(l * m for (_, l), m in pi) + sum(l * m for (_, l), m in rho)
    for l in range(1, bound + 1):
        for i in range(1, n + 1):
            seg = (((i, l), 1),)
            if mseg_hom(n, seg, pi) < mseg_hom(n, seg, rho):
                return False
    return True


def mseg_compare_G(n: int, pi, rho) -> str:
    le = mseg_leq_G(n, pi, rho)
    ge = mseg_leq_G(n, rho, pi)
    if le and ge:
        return EQUAL
    if le:
        return LESS
    if ge:
        return GREATER
    return INCOMPARABLE


@dataclass
class OrderedIndexSet:
    """All indices of one dimension vector with the order data."""

    nu: tuple
    all_indices: list
    aperiodic: list
    linear_extension: list = field(default_factory=list)
    alternative_extension: list = field(default_factory=list)


class IndexSystem:
    """Index enumeration, order, monomials and the PBW basis for one quiver."""

    def __init__(self, engine: HallEngine):
        self.engine = engine
        self.quiver = engine.quiver
        self.kind = engine.kind
        self._ddx_memo: dict = {}
        self._genext_memo: dict = {}
        self._mono_memo: dict = {}
        self._pbw_memo: dict = {}

    # -- enumeration -------------------------------------------------------

    def enumerate_indices(self, nu) -> OrderedIndexSet:
        nu = tuple(nu)
        if self.kind == "cyclic":
            n = self.quiver.n
            allidx = [nindex(("m", pi)) for pi in enumerate_msegs(n, nu)]
            aper = [i for i in allidx if mseg_aperiodic(n, i[0][1])]
        else:
            ctx = self.engine.ctx(self.engine.cfg.primes[0])
            allidx = []
            from .partitions import partitions

            seq = ctx.seq
            finite = self.engine.delta is None
            for cm in ctx._root_multisets(
                seq.preprojective_range(nu), nu, exact=finite
            ):
                if finite:
                    # Finite type: every module is preprojective, so the
                    # whole index lives on the c_- side.
                    allidx.append(nindex(make_cdesc(cm=cm)))
                    continue
                used = ctx.desc_dim(make_cdesc(cm=cm))
                rem1 = tuple(a - b for a, b in zip(nu, used))
                for cp in ctx._root_multisets(
                    seq.preinjective_range(rem1), rem1, exact=False, side="+"
                ):
                    used2 = ctx.desc_dim(make_cdesc(cp=cp))
                    rem = tuple(a - b for a, b in zip(rem1, used2))
                    d = self.engine.delta
                    if rem[0] * d[1] != rem[1] * d[0] or rem[0] < 0:
                        continue
                    m = rem[0] // d[0]
                    for lam in partitions(m):
                        allidx.append(nindex(make_cdesc(cm=cm, cp=cp), lam))
            aper = list(allidx)
        allidx = sorted(set(allidx), key=self.sort_key)
        aper = sorted(set(aper), key=self.sort_key)
        if not (self.kind == "cyclic" and self.quiver.n == 1):
            expected = dim_f(self.quiver, nu)
            if len(aper) != expected:
                raise ArithmeticError(
                    f"index count {len(aper)} != dim f_nu {expected} at {nu}"
                )
        return OrderedIndexSet(
            nu,
            allidx,
            aper,
            linear_extension=aper,
            alternative_extension=sorted(aper, key=self.alt_sort_key),
        )

    # -- the partial order ---------------------------------------------------

    def strictly_less(self, a, b) -> bool:
        """(c', t_lam') < (c, t_lam) in the index order; a is the primed one."""
        fa, la = a
        fb, lb = b
        if a == b:
            return False
        cma, c0a, cpa = _frame_parts_of(fa)
        cmb, c0b, cpb = _frame_parts_of(fb)
        ge_minus = _geL(cma, cmb)
        ge_plus = _geL(cpa, cpb, positive=True)
        if ge_minus and ge_plus and (cma != cmb or cpa != cpb):
            return True
        if cma != cmb or cpa != cpb:
            return False
        ma, mb = sum(la), sum(lb)
        if ma < mb:
            return True
        if ma > mb:
            return False
        if c0a != c0b:
            n = self.quiver.n
            le = all(
                mseg_leq_G(n, pa, pb) for pa, pb in zip(c0a, c0b)
            )
            return le
        return la > lb  # larger lexicographic partition is smaller

    def compare(self, a, b) -> str:
        if a == b:
            return EQUAL
        if self.strictly_less(a, b):
            return LESS
        if self.strictly_less(b, a):
            return GREATER
        return INCOMPARABLE

    def sort_key(self, idx):
        frame, lam = idx
        cm, c0, cp, window = self._key_parts(idx)
        kcm = tuple(-cm.get(t, 0) for t in window[0])
        kcp = tuple(-cp.get(t, 0) for t in window[1])
        kc0 = tuple((-mseg_end(self.quiver.n, pi), pi) for pi in c0)
        klam = tuple(-x for x in lam)
        return (kcm + kcp, sum(lam), kc0, klam)

    def alt_sort_key(self, idx):
        """A second linear extension of the order, for independence checks."""
        frame, lam = idx
        cm, c0, cp, window = self._key_parts(idx)
        kcm = tuple(-cm.get(t, 0) for t in window[0])
        kcp = tuple(-cp.get(t, 0) for t in window[1])
        kc0 = tuple(
            (-mseg_end(self.quiver.n, pi), tuple(reversed(pi))) for pi in c0
        )
        klam = tuple(-x for x in lam)
        return (kcp + kcm, sum(lam), kc0, klam)

    def _key_parts(self, idx):
        frame, lam = idx
        if frame[0] == "m":
            return {}, (frame[1],), {}, ((), ())
        _, cm, c0, cp, _ = frame
        # The window length depends only on the full graded dimension, so
        # keys within one dimension vector are comparable tuples.
        ctx = self.engine.ctx(self.engine.cfg.primes[0])
        total = sum(ctx.desc_dim(frame))
        if self.engine.delta is not None:
            total += sum(lam) * sum(self.engine.delta)
        horizon = 4 * (total + 4)
        wneg = tuple(range(0, -horizon, -1))
        wpos = tuple(range(1, horizon))
        return dict(cm), c0, dict(cp), (wneg, wpos)

    # -- distinguished words (cyclic engine) ----------------------------------

    def generic_extension(self, descM, descN):
        """The extension of M by N with minimal endomorphism dimension."""
        if descM[0] != "m" or descN[0] != "m":
            raise UnsupportedQuiverError("generic extensions implemented for cyclic quivers")
        key = (descM, descN)
        if key in self._genext_memo:
            return self._genext_memo[key]
        n = self.quiver.n
        if not descN[1]:
            self._genext_memo[key] = descM
            return descM
        if not descM[1]:
            self._genext_memo[key] = descN
            return descN
        nu = tuple(
            a + b for a, b in zip(mseg_dim(n, descM[1]), mseg_dim(n, descN[1]))
        )
        support = []
        for pi in enumerate_msegs(n, nu):
            poly = self.engine.polyeng.hall_polynomial(("m", pi), descM, descN)
            if not poly.is_zero():
                support.append(pi)
        ends = sorted((mseg_end(n, pi), pi) for pi in support)
        assert ends, "empty extension support"
        assert len(ends) == 1 or ends[0][0] < ends[1][0], "generic extension not unique"
        out = ("m", ends[0][1])
        self._genext_memo[key] = out
        return out

    def ddx_word(self, pi):
        """Distinguished word for an aperiodic multisegment by top peeling.

        Each step peels the full top multiplicity at one vertex and is kept
        only if the generic extension glues back; backtracking explores all
        peels.  Existence is guaranteed for aperiodic input.
        """
        n = self.quiver.n
        pi = mseg_normalize(pi)
        if not mseg_aperiodic(n, pi):
            raise ValueError("distinguished words exist only for aperiodic multisegments")
        words = self._ddx_words(pi, want_all=False)
        if not words:
            raise ArithmeticError(f"no distinguished word found for {pi}")
        return words[0]

    def ddx_words_all(self, pi):
        return self._ddx_words(mseg_normalize(pi), want_all=True)

    def _ddx_words(self, pi, want_all: bool):
        key = (pi, want_all)
        if key in self._ddx_memo:
            return self._ddx_memo[key]
        n = self.quiver.n
        if not pi:
            return [()]
        out = []
        for i in range(1, n + 1):
            a, peeled = mseg_peel_top(n, pi, i)
            if a == 0:
                continue
            top = ("m", mseg_normalize([((i, 1), a)]))
            if self.generic_extension(top, ("m", peeled)) != ("m", pi):
                continue
            for rest in self._ddx_words(peeled, want_all):
                out.append(((i, a),) + rest)
                if not want_all:
                    break
            if out and not want_all:
                break
        self._ddx_memo[key] = out
        return out

    # -- monomial builders -------------------------------------------------

    def dimvec_word(self, nu):
        """The word of the dimension-vector monomial u_1^(nu_1) ... u_n^(nu_n)."""
        topo = self.quiver.topological_order()
        return tuple(
            (self.quiver.vertices[i], nu[i]) for i in topo if nu[i]
        )

    def word_for_index(self, idx, word_choice=None):
        """The defining word of the monomial attached to an index."""
        frame, lam = idx
        if self.kind == "cyclic":
            if lam:
                raise UnsupportedQuiverError("cyclic indices carry no partition")
            word = word_choice if word_choice is not None else self.ddx_word(frame[1])
            return tuple(word)
        seq = self.engine.ctx(self.engine.cfg.primes[0]).seq
        _, cm, c0, cp, _ = frame
        if c0:
            raise UnsupportedQuiverError("non-homogeneous tube monomials need a cyclic engine")
        word = []
        for t, m in cm:  # stored with t descending from 0
            beta = seq.beta(t)
            word.extend(self.dimvec_word(tuple(m * x for x in beta)))
        for part in lam:
            word.extend(self.dimvec_word(tuple(part * x for x in self.engine.delta)))
        for t, m in reversed(cp):  # largest t leftmost
            beta = seq.beta(t)
            word.extend(self.dimvec_word(tuple(m * x for x in beta)))
        return tuple(word)

    # Named word builders for the separate monomial pieces.

    def word_preproj(self, cm):
        seq = self.engine.ctx(self.engine.cfg.primes[0]).seq
        word = []
        for t, m in sorted(cm, key=lambda p: -p[0]):
            word.extend(self.dimvec_word(tuple(m * x for x in seq.beta(t))))
        return tuple(word)

    def word_preinj(self, cp):
        seq = self.engine.ctx(self.engine.cfg.primes[0]).seq
        word = []
        for t, m in sorted(cp, reverse=True):
            word.extend(self.dimvec_word(tuple(m * x for x in seq.beta(t))))
        return tuple(word)

    def word_homog(self, lam):
        word = []
        for part in sorted(lam, reverse=True):
            word.extend(self.dimvec_word(tuple(part * x for x in self.engine.delta)))
        return tuple(word)

    def word_tube(self, c0):
        """Concatenated distinguished words, tubes in their recorded order."""
        word = []
        for pi in c0:
            word.extend(self.ddx_word(pi))
        return tuple(word)

    def monomial(self, word) -> dict:
        """Generic expansion of an arbitrary word over the N family."""
        return self.engine.generic_word(tuple(word))

    def monomial_over_N(self, idx, word_choice=None) -> dict:
        """Expansion of the monomial over the N family, with triangularity checks."""
        key = (idx, tuple(word_choice) if word_choice is not None else None)
        if key in self._mono_memo:
            return self._mono_memo[key]
        word = self.word_for_index(idx, word_choice)
        out = self.engine.generic_word(word)
        lead = out.get(idx, ZERO)
        if lead != ONE:
            raise ArithmeticError(
                f"monomial of {idx} has leading coefficient {lead.text()}"
            )
        for b, coeff in out.items():
            if b == idx:
                continue
            if not coeff.is_integral():
                raise ArithmeticError(f"non-integral coefficient at {b}")
            if not self.strictly_less(b, idx):
                raise ArithmeticError(
                    f"monomial support {b} is not below the leading index {idx}"
                )
        self._mono_memo[key] = out
        return out

    # -- PBW basis ----------------------------------------------------------

    def pbw_basis(self, nu) -> "PBWData":
        nu = tuple(nu)
        if nu in self._pbw_memo:
            return self._pbw_memo[nu]
        idxset = self.enumerate_indices(nu)
        order = idxset.linear_extension
        mon = {a: self.monomial_over_N(a) for a in order}
        aper = set(order)
        E: dict = {}
        eta: dict = {}
        for pos, a in enumerate(order):
            cur = dict(mon[a])
            eta_a = {a: ONE}
            for b in order[:pos]:
                phi = mon[a].get(b, ZERO)
                if not phi:
                    continue
                for idx2, c in E[b].items():
                    s = cur.get(idx2, ZERO) - phi * c
                    if s:
                        cur[idx2] = s
                    else:
                        cur.pop(idx2, None)
                for idx2, c in eta[b].items():
                    s = eta_a.get(idx2, ZERO) - phi * c
                    if s:
                        eta_a[idx2] = s
                    else:
                        eta_a.pop(idx2, None)
            if cur.get(a, ZERO) != ONE:
                raise ArithmeticError(f"PBW leading term corrupted at {a}")
            for b, c in cur.items():
                if b == a:
                    continue
                if b in aper:
                    raise ArithmeticError(
                        f"PBW tail of {a} touches the aperiodic index {b}"
                    )
                if not self.strictly_less(b, a):
                    raise ArithmeticError(f"PBW tail of {a} is not below it")
                if not c.is_integral():
                    raise ArithmeticError(f"PBW tail of {a} has non-integral entry")
            E[a] = cur
            eta[a] = eta_a
        data = PBWData(nu, idxset, order, mon, E, eta)
        self._pbw_memo[nu] = data
        return data


@dataclass
class PBWData:
    """Transition data at one dimension vector.

    ``mon``: monomial expansions over the N family; ``E``: PBW elements
    over N; ``eta``: PBW elements over monomials (unitriangular).
    """

    nu: tuple
    idxset: OrderedIndexSet
    order: list
    mon: dict
    E: dict
    eta: dict


def _frame_parts_of(frame):
    if frame[0] == "m":
        return (), (frame[1],), ()
    _, cm, c0, cp, _ = frame
    return cm, c0, cp
