import pytest

from hallcanon.gf import (
    GF,
    coords_in_rowspace,
    gaussian_binomial_int,
    identity,
    is_invertible,
    mat_mul,
    nullspace,
    rank,
    reduce_mod_rowspace,
    rref,
    subspaces,
)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13])
def test_field_axioms(q):
    F = GF(q)
    els = list(F.elements())
    assert len(els) == q
    for a in els:
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    # Associativity and distributivity on a spread of triples.
    sample = els if q <= 5 else els[::2]
    for a in sample:
        for b in sample:
            for c in sample:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


def test_extension_field_frobenius():
    F = GF(9)
    # x -> x^3 must be an automorphism fixing exactly the prime field.
    fixed = [a for a in F.elements() if pow_elt(F, a, 3) == a]
    assert sorted(fixed) == [F.add(0, 0), 1, F.add(1, 1)] or len(fixed) == 3


def pow_elt(F, a, n):
    out = 1
    for _ in range(n):
        out = F.mul(out, a)
    return out


def test_not_prime_power():
    with pytest.raises(ValueError):
        GF(6)


def test_rref_and_rank():
    F = GF(5)
    A = [[1, 2, 3], [2, 4, 2], [0, 0, 0]]
    rows, pivots = rref(F, A)
    assert rank(F, A) == 2
    assert pivots == [0, 2]
    for v in ([1, 2, 3], [2, 4, 2]):
        assert coords_in_rowspace(F, rows, pivots, v) is not None
    assert coords_in_rowspace(F, rows, pivots, [0, 1, 0]) is None


def test_nullspace():
    F = GF(7)
    A = [[1, 2, 3], [2, 4, 6]]
    ns = nullspace(F, A)
    assert len(ns) == 2
    from hallcanon.gf import mat_vec

    for v in ns:
        assert all(x == 0 for x in mat_vec(F, A, v))


def test_reduce_mod_rowspace():
    F = GF(3)
    rows, pivots = rref(F, [[1, 1, 0]])
    r = reduce_mod_rowspace(F, rows, pivots, [1, 0, 1])
    assert r[0] == 0
    assert reduce_mod_rowspace(F, rows, pivots, [2, 2, 0]) == [0, 0, 0]


def test_invertibility():
    F = GF(4)
    assert is_invertible(F, identity(3))
    assert not is_invertible(F, [[1, 1], [1, 1]])


@pytest.mark.parametrize("q", [2, 3, 5])
def test_subspace_enumeration_counts(q):
    F = GF(q)
    for d in range(0, 4):
        for k in range(0, d + 1):
            subs = list(subspaces(F, d, k))
            assert len(subs) == gaussian_binomial_int(d, k, q)
            assert len(set(subs)) == len(subs)
            for rows in subs:
                if k:
                    assert rank(F, [list(r) for r in rows]) == k


def test_gaussian_binomial_values():
    assert gaussian_binomial_int(2, 1, 3) == 4
    assert gaussian_binomial_int(4, 2, 2) == 35
