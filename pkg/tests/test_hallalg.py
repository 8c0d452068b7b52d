import random
from fractions import Fraction

import pytest

from hallcanon.config import JobConfig
from hallcanon.fqrep import make_cdesc, mseg_normalize
from hallcanon.hallalg import (
    FieldElement,
    HallEngine,
    h_to_s_expansion,
    jacobi_trudi_h,
    nindex,
    symbolic_h_identity_holds,
    tensor_green,
)
from hallcanon.laurent import ONE, ZERO, LaurentPoly, RationalFn, in_delta_plus_tail
from hallcanon.partitions import kostka, partitions
from hallcanon.quiver import cyclic, kronecker, linear_an


@pytest.fixture(scope="module")
def kron():
    return HallEngine(kronecker())


@pytest.fixture(scope="module")
def cyc2():
    return HallEngine(cyclic(2))


def mdesc(*segs):
    return ("m", mseg_normalize(segs))


V = LaurentPoly.v_power


def test_unit_and_simple_products(cyc2):
    q = 5
    one = cyc2.unit(q)
    x = cyc2.cls_elt(mdesc(((1, 1), 1)), q)
    assert (one * x).terms == x.terms
    assert (x * one).terms == x.terms


def test_simple_self_product_divided_power(cyc2):
    # <S>*<S> = [2]_v <S^2> for a simple without self-extensions; at a fixed
    # field the count is numeric, so the coefficient is (q+1) v^-1, equal to
    # v + v^-1 only after specializing v = sqrt(q).
    q = 5
    S = cyc2.cls_elt(mdesc(((1, 1), 1)), q)
    SS = (S * S).terms
    assert SS == {mdesc(((1, 1), 2)): V(-1, q + 1)}
    diff = SS[mdesc(((1, 1), 2))] - LaurentPoly({1: 1, -1: 1})
    assert diff.eval_sqrt(q) == (0, 0)
    # divided power descriptor agrees
    assert cyc2.divided_power_desc(mdesc(((1, 1), 1)), 2) == mdesc(((1, 1), 2))


def test_divided_power_rejects_non_exceptional(kron):
    z = kron.ctx(5).points(1)[0]
    with pytest.raises(ValueError):
        kron.divided_power_desc(make_cdesc(homog=((z, (1,)),)), 2)


def test_cyclic_monomial_u1u2(cyc2):
    # u_1 u_2 = <S_1[2]> + v^-1 <S_1 + S_2> over the cyclic 2-quiver.
    q = 7
    x = cyc2.word_element(((1, 1), (2, 1)), q)
    expected = {
        mdesc(((1, 2), 1)): ONE,
        mdesc(((1, 1), 1), ((2, 1), 1)): V(-1),
    }
    assert x.terms == expected


def test_kronecker_lemma_m1(kron):
    # <S_0>*<S_1> = H_1 + v^-2 <S_1 + S_0> at every sample field.
    for q in (3, 5):
        S0 = kron.cls_elt(make_cdesc(cp=((1, 1),)), q)
        S1 = kron.cls_elt(make_cdesc(cm=((0, 1),)), q)
        lhs = S0 * S1
        rhs = kron.realize_H(1, q) + kron.cls_elt(
            make_cdesc(cm=((0, 1),), cp=((1, 1),)), q
        ).scale(V(-2))
        assert lhs == rhs
        # and the split product is a single class
        split = S1 * S0
        assert split.terms == {make_cdesc(cm=((0, 1),), cp=((1, 1),)): ONE}


def test_word_u0_u1_expansion_generic(kron):
    out = kron.generic_word(((0, 1), (1, 1)))
    split = nindex(make_cdesc(cm=((0, 1),), cp=((1, 1),)))
    reg = nindex(make_cdesc(), (1,))
    assert out == {reg: ONE, split: V(-2)}


def test_express_in_N_roundtrip_field(kron):
    q = 5
    x = kron.word_element(((0, 1), (1, 1)), q)
    coeffs = kron.express_in_N(x)
    rebuilt = kron.rebuild_from_N(coeffs, q)
    assert rebuilt.eval_eq(x)
    assert x.eval_eq(rebuilt)


def test_jacobi_trudi():
    assert jacobi_trudi_h((1,)) == (((1,), 1),)
    assert jacobi_trudi_h((1, 1)) == (((1, 1), 1), ((2,), -1))
    assert jacobi_trudi_h((2,)) == (((2,), 1),)


def test_h_s_symbolic_identities():
    for n in range(1, 5):
        for lam in partitions(n):
            assert symbolic_h_identity_holds(lam)
    assert h_to_s_expansion((1, 1)) == {(2,): 1, (1, 1): 1}


def test_realize_S_kostka_coefficients(kron):
    # Coefficient of u_[M(mu, z)] in S_lam is v^{-|lam||delta|} K_{lam mu}.
    for q in (5, 7):
        ctx = kron.ctx(q)
        pts = ctx.points(1)
        for m in (1, 2):
            for lam in partitions(m):
                S = kron.realize_S(lam, q)
                for mu in partitions(m):
                    desc = make_cdesc(
                        homog=tuple((pts[i], (mu[i],)) for i in range(len(mu)))
                    )
                    expected = V(-2 * m, kostka(lam, mu)) if kostka(lam, mu) else ZERO
                    assert S.u_coeff(desc) == expected


def test_realize_S_character_coefficients(kron):
    # Coefficient of u at a single degree-2 point is v^{-4} t_lam((2)).
    from hallcanon.partitions import character

    for q in (5, 7):
        ctx = kron.ctx(q)
        w = ctx.points(2)[0]
        for lam in partitions(2):
            S = kron.realize_S(lam, q)
            desc = make_cdesc(homog=((w, (1,)),))
            assert S.u_coeff(desc) == V(-4, character(lam, (2,)))
        # and the split cycle type via two degree-1 points
        pts = ctx.points(1)
        for lam in partitions(2):
            S = kron.realize_S(lam, q)
            desc = make_cdesc(homog=((pts[0], (1,)), (pts[1], (1,))))
            assert S.u_coeff(desc) == V(-4, character(lam, (1, 1)))


def test_H_commutativity(kron):
    q = 3
    H1 = kron.realize_H(1, q)
    H2 = kron.realize_H(2, q)
    assert (H1 * H2).terms == (H2 * H1).terms
    # distinct homogeneous tubes commute
    ctx = kron.ctx(q)
    z1, z2 = ctx.points(1)[:2]
    a = kron.cls_elt(make_cdesc(homog=((z1, (1,)),)), q)
    b = kron.cls_elt(make_cdesc(homog=((z2, (1,)),)), q)
    assert (a * b).terms == (b * a).terms


def test_serre_relations_field_level():
    for engine, pairs in (
        (HallEngine(cyclic(2)), [(1, 2), (2, 1)]),
        (HallEngine(cyclic(3)), [(1, 2), (2, 3), (3, 1), (2, 1)]),
        (HallEngine(kronecker()), [(0, 1), (1, 0)]),
    ):
        for q in (3, 5):
            for i, j in pairs:
                assert engine.serre_sum(i, j, q).is_zero_specialized()


def test_nmul_support_constraint(kron):
    i1 = nindex(make_cdesc(cm=((0, 1),)))
    i2 = nindex(make_cdesc(cp=((1, 1),)))
    out = kron.nmul(i2, i1)
    # N(S_0)*N(S_1) = H_1 + v^-2 N(split)
    assert out[nindex(make_cdesc(), (1,))] == ONE
    assert out[nindex(make_cdesc(cm=((0, 1),), cp=((1, 1),)))] == V(-2)
    # reverse order: single split term
    out2 = kron.nmul(i1, i2)
    assert out2 == {nindex(make_cdesc(cm=((0, 1),), cp=((1, 1),))): ONE}


def test_nmul_associativity_specialization(kron):
    # (N1*N2)*N3 == N1*(N2*N3) generically, on a few random triples.
    rng = random.Random(0)
    idxs = [
        nindex(make_cdesc(cm=((0, 1),))),
        nindex(make_cdesc(cp=((1, 1),))),
        nindex(make_cdesc(), (1,)),
    ]
    for _ in range(4):
        a, b, c = (rng.choice(idxs) for _ in range(3))
        lhs = kron.mul_generic(kron.mul_generic({a: ONE}, {b: ONE}), {c: ONE})
        rhs = kron.mul_generic({a: ONE}, kron.mul_generic({b: ONE}, {c: ONE}))
        assert lhs == rhs


def test_specialization_soundness(kron):
    # Generic structure constants, specialized at an untouched q, match a
    # direct field-level computation there.
    i1 = nindex(make_cdesc(cp=((1, 1),)))
    i2 = nindex(make_cdesc(cm=((0, 1),)))
    out = kron.nmul(i1, i2)
    q = 11
    direct = kron.express_in_N(kron.n_field(i1, q) * kron.n_field(i2, q))
    keys = set(out) | set(direct)
    for k in keys:
        a = out.get(k, ZERO)
        b = direct.get(k, ZERO)
        assert (a - b).eval_sqrt(q) == (0, 0)


def test_green_form_values(kron, cyc2):
    # (<S>,<S>) = v^2/(v^2-1)
    S = mdesc(((1, 1), 1))
    g = cyc2.green_nn(nindex(S), nindex(S))
    assert g == RationalFn(LaurentPoly.v_power(2), LaurentPoly.v_power(2) - ONE)
    # distinct classes pair to zero
    assert not cyc2.green_nn(nindex(S), nindex(mdesc(((2, 1), 1))))
    assert in_delta_plus_tail(g, 1, 10)


def test_s_gram_h1(kron):
    g = kron.s_gram((1,), (1,))
    # (H_1, H_1) = (q+1)/(q-1)
    assert g == RationalFn(LaurentPoly.from_q_poly([1, 1]), LaurentPoly.from_q_poly([-1, 1]))
    assert in_delta_plus_tail(g, 1, 10)


def test_s_gram_orthogonality_order10(kron):
    for lam in partitions(2):
        for mu in partitions(2):
            g = kron.s_gram(lam, mu)
            delta = 1 if lam == mu else 0
            assert in_delta_plus_tail(g, delta, 10)


def test_green_nn_matches_field_green(kron):
    # The product formula agrees with the direct field-level Green form.
    q = 7
    for lam in [(), (1,)]:
        for mu in [(), (1,)]:
            for f1 in [make_cdesc(cm=((0, 1),)), make_cdesc()]:
                i1 = nindex(f1, lam)
                i2 = nindex(f1, mu)
                if kron.ctx(q).desc_dim(desc_with(f1, lam)) != kron.ctx(q).desc_dim(
                    desc_with(f1, mu)
                ):
                    continue
                generic = kron.green_nn(i1, i2)
                x = kron.n_field(i1, q)
                y = kron.n_field(i2, q)
                field_val = kron.green_field(x, y)
                # compare at v = sqrt(q)
                ga, gb = field_val.eval_sqrt(q)
                na, nb = generic.num.eval_sqrt(q)
                da, db = generic.den.eval_sqrt(q)
                assert db == 0 and nb == 0 and gb == 0
                assert ga == na / da


def desc_with(frame, lam):
    if not lam:
        return frame
    return frame  # dimension comparison only needs the frame when lam sizes match


def test_coproduct_of_simple(cyc2):
    q = 5
    S1 = mdesc(((1, 1), 1))
    x = cyc2.cls_elt(S1, q)
    t = cyc2.coproduct(x)
    zero = mdesc()
    assert t.terms == {(S1, zero): ONE, (zero, S1): ONE}


def test_coproduct_of_unit(cyc2):
    t = cyc2.coproduct(cyc2.unit(5))
    zero = mdesc()
    assert t.terms == {(zero, zero): ONE}


def test_green_compatibility_small(cyc2):
    # (x, y*y') = (r(x), y (x) y') for class elements at q = 5.
    q = 5
    rng = random.Random(3)
    from hallcanon.fqrep import enumerate_msegs

    small = [mdesc(*segs) for segs in []]
    pool1 = [("m", pi) for pi in enumerate_msegs(2, (1, 0))] + [
        ("m", pi) for pi in enumerate_msegs(2, (0, 1))
    ] + [("m", pi) for pi in enumerate_msegs(2, (1, 1))]
    for _ in range(6):
        y = cyc2.cls_elt(rng.choice(pool1), q)
        yp = cyc2.cls_elt(rng.choice(pool1), q)
        prod = y * yp
        nu = prod.grading()
        if nu is None:
            continue
        for dx in enumerate_msegs(2, nu):
            x = cyc2.cls_elt(("m", dx), q)
            lhs = cyc2.green_field(x, prod)
            rhs = tensor_green(cyc2, cyc2.coproduct(x), y, yp)
            assert lhs == rhs


def test_coproduct_homomorphism_tiny(cyc2):
    # r(x*y) = r(x) r(y) in the twisted tensor algebra, tiny instance.
    q = 3
    S1 = cyc2.cls_elt(mdesc(((1, 1), 1)), q)
    S2 = cyc2.cls_elt(mdesc(((2, 1), 1)), q)
    lhs = cyc2.coproduct(S1 * S2)
    rhs = cyc2.coproduct(S1) * cyc2.coproduct(S2)
    assert lhs.eval_eq(rhs)


def test_reflect_element_homomorphism(kron):
    # sigma_i^+ is multiplicative on S_i-free elements.
    q = 3
    ctx = kron.ctx(q)
    z0, z1 = ctx.points(1)[:2]
    a = kron.cls_elt(make_cdesc(homog=((z0, (1,)),)), q)
    b = kron.cls_elt(make_cdesc(homog=((z1, (1,)),)), q)
    ra = kron.reflect_element(a, 1, "+")
    rb = kron.reflect_element(b, 1, "+")
    rab = kron.reflect_element(a * b, 1, "+")
    assert (ra * rb).terms == rab.terms


def test_finite_type_engine():
    eng = HallEngine(linear_an(2))
    q = 5
    # u_1 u_2 = <P> + v^-1 <S_1+S_2>; u_2 u_1 = <S_1+S_2>.
    x = eng.word_element(((1, 1), (2, 1)), q)
    y = eng.word_element(((2, 1), (1, 1)), q)
    P = make_cdesc(cm=((-1, 1),))
    split = make_cdesc(cm=((0, 1), (-2, 1)))
    assert x.terms == {P: ONE, split: V(-1)}
    assert y.terms == {split: ONE}
    out = eng.generic_word(((1, 1), (2, 1)))
    assert out == {nindex(P): ONE, nindex(split): V(-1)}


def test_generic_H_S_symbols(kron):
    # S_(1) = H_1, and the 2x2 Jacobi-Trudi determinant: S_(1,1) = H_1^2 - H_2.
    assert kron.S_generic((1,)) == kron.H_generic(1)
    H1sq = kron.mul_generic(kron.H_generic(1), kron.H_generic(1))
    lhs = dict(H1sq)
    for idx, c in kron.H_generic(2).items():
        s = lhs.get(idx, ZERO) - c
        if s:
            lhs[idx] = s
        else:
            lhs.pop(idx, None)
    assert lhs == kron.S_generic((1, 1))
    # H_lam = sum_mu kostka(mu, lam) S_mu as generic elements.  Products at
    # |lam| <= 2 stay at the acceptance scale; the |lam| <= 4 identity is
    # covered symbolically by test_h_s_symbolic_identities.
    from hallcanon.partitions import partitions as _parts

    for n in range(1, 3):
        for lam in _parts(n):
            expected = kron.H_lam_generic(lam)
            acc = {nindex(kron.zero_frame()): ONE}
            for part in lam:
                acc = kron.mul_generic(acc, kron.H_generic(part))
            assert acc == expected


def test_field_associativity_bulk(cyc2):
    import random as _random

    rng = _random.Random(42)
    from hallcanon.fqrep import enumerate_msegs, mseg_dim

    pool = []
    for nu in [(1, 0), (0, 1), (1, 1)]:
        pool.extend(("m", pi) for pi in enumerate_msegs(2, nu))
    q = 3
    checked = 0
    while checked < 200:
        descs = [rng.choice(pool) for _ in range(3)]
        total = [0, 0]
        for d in descs:
            dim = mseg_dim(2, d[1])
            total = [a + b for a, b in zip(total, dim)]
        if any(x > 2 for x in total):
            continue  # keep every product within the (2,2) budget
        a, b, c = (cyc2.cls_elt(d, q) for d in descs)
        assert ((a * b) * c).terms == (a * (b * c)).terms
        checked += 1


def test_census_vs_hall_table_consistency():
    # The Hall table row of L sums to the number of stable subspaces of the
    # given dimension, for every class L.
    from hallcanon.fqrep import FieldContext, graded_stable_subspaces

    ctx = FieldContext(cyclic(2), 3)
    nuL, nuN = (2, 1), (1, 1)
    by_L, _ = ctx.hall_table(nuL, nuN)
    for dL, counts in by_L.items():
        L = ctx.build(dL)
        n_subs = sum(1 for _ in graded_stable_subspaces(L, nuN))
        assert sum(counts.values()) == n_subs


def test_fingerprint_separates_classes():
    from hallcanon.fqrep import FieldContext

    ctx = FieldContext(kronecker(), 3)
    seen = {}
    for nu in [(1, 1), (2, 1)]:
        for d in ctx.classes(nu):
            fp = ctx.fingerprint(ctx.build(d))
            assert fp not in seen, (d, seen[fp])
            seen[fp] = d


def test_element_json_and_latex(kron):
    from hallcanon.hallalg import element_latex, element_to_json

    x = kron.word_element(((0, 1), (1, 1)), 5)
    data = element_to_json(x)
    assert data["basis"] == "module" and data["field"] == 5
    assert len(data["terms"]) == len(x.terms)
    gen = kron.generic_word(((0, 1), (1, 1)))
    data2 = element_to_json(gen)
    assert data2["basis"] == "N" and len(data2["terms"]) == 2
    assert "langle" in element_latex(x)


def test_green_nn_mixed_frame_matches_field(kron):
    # Frames with both preprojective and preinjective parts: the part-wise
    # product formula agrees with the direct field Green form (cross Homs
    # cancel between the twist and the automorphism count).
    q = 5
    f = make_cdesc(cm=((0, 1),), cp=((2, 1),))
    i1 = nindex(f)
    generic = kron.green_nn(i1, i1)
    x = kron.n_field(i1, q)
    field_val = kron.green_field(x, x)
    ga, gb = field_val.eval_sqrt(q)
    na, nb = generic.num.eval_sqrt(q)
    da, db = generic.den.eval_sqrt(q)
    assert gb == nb == db == 0
    assert ga == na / da


def test_mul_generic_unit_and_divided_power_m1(kron):
    unit = nindex(kron.zero_frame())
    x = {nindex(make_cdesc(cm=((0, 1),))): ONE}
    assert kron.mul_generic(x, {unit: ONE}) == x
    assert kron.mul_generic({unit: ONE}, x) == x
    d = make_cdesc(cm=((0, 2),))
    assert kron.divided_power_desc(d, 1) == d
    # divided power of a preprojective: <P>^(2) = <P^2> against mul + qfact
    from hallcanon.laurent import qfact

    P = make_cdesc(cm=((-1, 1),))
    P2 = kron.divided_power_desc(P, 2)
    q = 5
    prod = kron.cls_elt(P, q) * kron.cls_elt(P, q)
    two = qfact(2)
    diff = prod.terms[P2] - two
    assert diff.eval_sqrt(q) == (0, 0)
    assert set(prod.terms) == {P2}
