from fractions import Fraction

import pytest

from conftest import random_coeff, random_operator, random_unital
from psdocalc import multiindex as mi
from psdocalc.diffpoly import DiffPoly, jet
from psdocalc.errors import AnsatzError, WindowError
from psdocalc.psdop import PsdOp, commutator, power_multi

import oracle_kp1 as oracle


def sym(name):
    return DiffPoly.sym(name)


def test_add_identities():
    n = 2
    psi = PsdOp(n, {(1, -1): sym("a")}, (-3, -3))
    assert (psi + PsdOp.zero(n)).window_equal(psi)
    assert (psi + (-psi)).is_window_zero()


def test_add_window_meet():
    n = 2
    a = PsdOp(n, {(0, -2): sym("f")}, (-3, -3))
    b = PsdOp(n, {(0, -2): sym("g")}, (-2, -2))
    assert (a + b).window == (-2, -2)


def test_mul_inverse_pair_closes_exactly():
    n = 2
    d2 = PsdOp.d(n, 1)
    d2inv = PsdOp.monomial(n, (0, -1))
    assert d2.mul(d2inv).window_equal(PsdOp.one(n))
    assert d2.mul(d2inv).is_exact()


def test_mul_needs_window_for_open_sums():
    n = 2
    d2inv = PsdOp.monomial(n, (0, -1))
    c = PsdOp(n, {(0, 0): sym("c")})
    with pytest.raises(WindowError):
        d2inv.mul(c)
    r = d2inv.mul(c, window=(None, -3))
    c_, cy, cyy = sym("c"), sym("c").derive((0, 1)), sym("c").derive((0, 1)).derive((0, 1))
    assert r.coeff((0, -1)) == c_
    assert r.coeff((0, -2)) == -cy
    assert r.coeff((0, -3)) == cyy
    # left-multiplying by d2 recovers the coefficient on the derived window
    back = PsdOp.d(n, 1).mul(r)
    assert back.coeff((0, 0)) == c_
    assert back.window == (None, -2)
    assert back.window_equal(PsdOp(n, {(0, 0): c_}, (None, -2)))


def test_adjoint_examples():
    n = 2
    for i in range(n):
        di = PsdOp.d(n, i)
        assert di.adjoint().window_equal(-di)
    c_op = PsdOp(n, {(0, -1): sym("c")}, (None, -3))
    adj = c_op.adjoint()
    c_, cy = sym("c"), sym("c").derive((0, 1))
    cyy = cy.derive((0, 1))
    assert adj.coeff((0, -1)) == -c_
    assert adj.coeff((0, -2)) == cy
    assert adj.coeff((0, -3)) == -cyy


def test_adjoint_requires_window_when_open():
    n = 1
    op = PsdOp(n, {(-1,): sym("c")})
    with pytest.raises(WindowError):
        op.adjoint()


def test_res_partial():
    n = 2
    assert PsdOp(n, {(-1, -1): sym("c")}, (-1, -1)).res_partial() == sym("c")
    assert PsdOp.d(n, 0).res_partial().is_zero()
    with pytest.raises(WindowError):
        PsdOp(n, {(1, 0): sym("c")}, (0, 0)).res_partial()
    # Leibniz expansion example: d1 (f d1^-2 d2^-1) has residue f
    f_op = PsdOp(n, {(-2, -1): sym("f")}, (-3, -3))
    assert PsdOp.d(n, 0).mul(f_op).res_partial() == sym("f")


def test_split_examples():
    n = 2
    psi = PsdOp(n, {(1, -1): sym("a"), (1, 0): sym("b"), (0, 2): sym("c")}, (-2, -2))
    plus, minus = psi.split()
    assert set(plus.terms) == {(1, 0), (0, 2)}
    assert set(minus.terms) == {(1, -1)}
    assert (plus + minus).window_equal(psi)
    # projections
    assert plus.split()[0].window_equal(plus)
    assert plus.split()[1].is_window_zero()
    d1d2inv = PsdOp.monomial(n, (1, -1))
    p, m = d1d2inv.split()
    assert p.is_window_zero() and m.window_equal(d1d2inv)


def test_membership():
    n = 2
    a = PsdOp(n, {(1, -1): sym("a")}, (-2, -2))
    assert a.in_pminus() and not a.in_phat()
    f = PsdOp(n, {(-1, -1): sym("f")}, (-2, -2))
    assert f.in_phat()
    one_plus = PsdOp.one(n) + a
    assert not one_plus.in_pminus()


def test_inverse():
    n = 2
    assert PsdOp.one(n).inverse().window_equal(PsdOp.one(n))
    w = sym("w")
    phi = PsdOp.one(n) + PsdOp.monomial(n, (0, -1), w)
    inv = phi.inverse(window=(None, -2))
    assert inv.coeff((0, -1)) == -w
    assert inv.coeff((0, -2)) == w * w
    assert phi.mul(inv, window=(None, -2)).window_equal(PsdOp.one(n, (None, -2)))
    with pytest.raises(AnsatzError):
        PsdOp.d(n, 0).inverse(window=(-1, -1))


def test_inverse_stays_in_phat(rng):
    for _ in range(10):
        phi = random_unital(rng, 2, depth=3, hat=True)
        inv = phi.inverse()
        assert (inv - PsdOp.one(2, inv.window)).in_phat()
        assert phi.mul(inv).window_equal(PsdOp.one(2, phi.window))
        assert inv.mul(phi).window_equal(PsdOp.one(2, phi.window))


def test_power_multi():
    n = 2
    c, d = sym("c"), sym("d")
    l2 = PsdOp.d(n, 1) + PsdOp.monomial(n, (0, -1), c) + PsdOp.monomial(n, (1, -2), d)
    assert power_multi((PsdOp.d(n, 0), l2), (0, 1)).window_equal(l2)
    sq = power_multi((PsdOp.d(n, 0), l2), (0, 2), window=(None, -2))
    cy = c.derive((0, 1))
    dy = d.derive((0, 1))
    assert sq.coeff((0, 2)) == DiffPoly.constant(1)
    assert sq.coeff((0, 0)) == c.scale(2)
    assert sq.coeff((0, -1)) == cy
    assert sq.coeff((1, -1)) == d.scale(2)
    assert sq.coeff((1, -2)) == dy
    assert sq.coeff((0, -2)) == c * c
    with pytest.raises(ValueError):
        power_multi((PsdOp.d(n, 0), l2), (-1, 0))


def test_commutator_basics():
    n = 2
    a = PsdOp(n, {(1, -1): sym("a")}, (-3, -3))
    assert commutator(a, a).is_window_zero()
    f = PsdOp(n, {(0, 0): sym("f")})
    assert commutator(PsdOp.d(n, 0), f).window_equal(
        PsdOp(n, {(0, 0): sym("f").derive((1, 0))})
    )


# -- property suites ----------------------------------------------------


def test_associativity_random(rng):
    for n in (1, 2, 3):
        for _ in range(25):
            a, b, c = (random_operator(rng, n) for _ in range(3))
            assert a.mul(b).mul(c).window_equal(a.mul(b.mul(c)))


def test_adjoint_antihomomorphism_random(rng):
    for n in (1, 2, 3):
        for _ in range(15):
            a, b = (random_operator(rng, n) for _ in range(2))
            assert a.mul(b).adjoint().window_equal(b.adjoint().mul(a.adjoint()))


def test_adjoint_involution_random(rng):
    for n in (1, 2, 3):
        for _ in range(25):
            a = random_operator(rng, n)
            assert a.adjoint().adjoint().window_equal(a)


def test_window_soundness_random(rng):
    """Products of truncations agree with the exact product on the derived window."""
    for n in (1, 2):
        for _ in range(15):
            a = random_operator(rng, n, depth=2, top=1, windowed=False)
            b = random_operator(rng, n, depth=2, top=1, windowed=False)
            deep = (-8,) * n
            reference = a.mul(b, window=deep)
            for cut in (2, 3):
                w = (-cut,) * n
                prod = a.truncate(w).mul(b.truncate(w))
                assert reference.truncate(prod.window).window_equal(prod)


def test_n1_reduction_against_oracle(rng):
    """The engine at n = 1 agrees with the classical one-variable rule."""
    for _ in range(40):
        a = random_operator(rng, 1, depth=3, max_terms=2, top=2)
        b = random_operator(rng, 1, depth=3, max_terms=2, top=2)
        prod = a.mul(b)
        o = oracle.mul(
            {e[0]: c for e, c in a.terms.items()},
            {e[0]: c for e, c in b.terms.items()},
            prod.window[0],
        )
        assert {e[0]: c for e, c in prod.terms.items()} == o
        adj = a.adjoint()
        o_adj = oracle.adjoint({e[0]: c for e, c in a.terms.items()}, adj.window[0])
        assert {e[0]: c for e, c in adj.terms.items()} == o_adj


def test_rendering_roundtrip_text():
    n = 2
    op = PsdOp(n, {(1, -1): sym("a"), (0, -2): sym("b")}, (-2, -2))
    assert str(op) == "a*d1*d2^-1 + b*d2^-2"
    obj = op.to_obj()
    assert obj["window"] == [-2, -2]
    assert {tuple(t["exponent"]) for t in obj["terms"]} == {(1, -1), (0, -2)}
