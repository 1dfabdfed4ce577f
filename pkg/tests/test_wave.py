from fractions import Fraction

import pytest

from conftest import random_operator, random_unital
from psdocalc import multiindex as mi
from psdocalc.diffpoly import DiffPoly, jet
from psdocalc.errors import TruncationError, WindowError
from psdocalc.hierarchy import dress, w4_rules
from psdocalc.psdop import PsdOp
from psdocalc.wave import (
    GroupTrunc,
    LaurentSeries,
    WaveSymbol,
    adjoint_baker,
    apply_to_wave,
    baker_from_phi,
    bilinear_check,
    pair_residue_check,
    res_z,
    series_inverse,
    symbol_of,
    wave_exponential,
)


def sym(name):
    return DiffPoly.sym(name)


def test_symbol_of_examples():
    n = 2
    assert str(symbol_of(PsdOp.monomial(n, (1, 1)))) == "z1*z2"
    g_op = PsdOp.monomial(n, (-1, -1), sym("g"))
    assert str(symbol_of(g_op, -1)) == "g*z1^-1*z2^-1"
    assert str(symbol_of(PsdOp.one(n), -1)) == "1"
    # supports coincide as multi-index sets
    psi = PsdOp(n, {(2, -1): sym("f"), (0, -2): sym("g")}, (-3, -3))
    for sign in (1, -1):
        h = symbol_of(psi, sign)
        assert {k[0] for k in h.terms} == set(psi.terms)


def test_apply_to_wave_basics():
    n = 2
    for i in range(n):
        plus = apply_to_wave(PsdOp.d(n, i), wave_exponential(n, 1))
        assert plus.sign == 1 and str(plus.hat) == f"z{i + 1}"
        minus = apply_to_wave(PsdOp.d(n, i), wave_exponential(n, -1))
        assert minus.sign == -1 and str(minus.hat) == f"-z{i + 1}"


def test_apply_to_wave_action_law(rng):
    n = 2
    for _ in range(10):
        psi = random_operator(rng, n, depth=2, max_terms=2)
        eta = random_operator(rng, n, depth=2, max_terms=2)
        w = wave_exponential(n, 1, window=(-4, -4))
        once = apply_to_wave(psi.mul(eta), w)
        twice = apply_to_wave(psi, apply_to_wave(eta, w))
        box = [max(a, b) if a is not None and b is not None else (a if b is None else b)
               for a, b in zip(once.hat.trunc["z"].box, twice.hat.trunc["z"].box)]
        diff = once.hat - twice.hat
        assert not [k for k in diff.terms if all(e >= c for e, c in zip(k[0], box))]


def test_res_z():
    n = 2
    h = LaurentSeries(n, ("z",), {((-1, -1),): sym("f"), ((1, 1),): sym("g")})
    assert res_z(h) == sym("f")
    assert res_z(LaurentSeries(n, ("z",), {((1, 1),): sym("g")})) == Fraction(0)
    trunc = {"z": GroupTrunc(box=(0, 0))}
    with pytest.raises(TruncationError):
        res_z(LaurentSeries(n, ("z",), {((1, 1),): sym("g")}, trunc))


def test_pair_residue_examples():
    n = 2
    g_op = PsdOp.monomial(n, (-1, -1), sym("g"), (-2, -2))
    one = PsdOp.one(n, (-2, -2))
    r = pair_residue_check(g_op, one)
    assert r.equal and r.lhs == sym("g")
    r = pair_residue_check(PsdOp.one(n, (-2, -2)), one)
    assert r.equal and r.lhs.is_zero()


def test_pair_residue_random(rng):
    for n in (1, 2):
        for _ in range(30):
            psi = random_operator(rng, n, depth=4, max_terms=3)
            eta = random_unital(rng, n, depth=4, hat=False)
            r = pair_residue_check(psi, eta)
            assert r.equal, (str(psi), str(eta), str(r.lhs), str(r.rhs))


def test_pair_residue_insufficient_window():
    n = 1
    psi = PsdOp(n, {(3,): sym("f")}, (-1,))
    eta = PsdOp.one(n, (-1,))
    with pytest.raises(WindowError):
        pair_residue_check(psi, eta)


def test_baker_from_phi():
    n = 2
    w = baker_from_phi(PsdOp.one(n))
    assert w.sign == 1 and str(w.hat) == "1"
    ws = adjoint_baker(PsdOp.one(n, (-2, -2)))
    assert ws.sign == -1 and str(ws.hat) == "1"
    phi = PsdOp.one(n) + PsdOp.monomial(n, (-1, -1), sym("a"))
    hat = baker_from_phi(phi.truncate((-2, -2))).hat
    assert hat.coeff(((0, 0),)) == Fraction(1)
    assert hat.coeff(((-1, -1),)) == sym("a")


def test_adjoint_baker_pairs_to_one(rng):
    for n in (1, 2):
        for _ in range(8):
            phi = random_unital(rng, n, depth=3, hat=True)
            what = baker_from_phi(phi).hat
            wstar = adjoint_baker(phi).hat
            prod = what.mul(wstar)
            assert prod.coeff(tuple([mi.zero(n)])) == Fraction(1)


def test_eigen_property(rng):
    """Dressed components act on the wave function as multiplication by z_i."""
    for n in (1, 2):
        for _ in range(6):
            phi = random_unital(rng, n, depth=3, hat=True)
            lax = dress(phi)
            w = baker_from_phi(phi)
            for i, li in enumerate(lax.components):
                lhs = apply_to_wave(li, w)
                rhs = w.hat.mul(LaurentSeries.var(n, "z", i))
                box = lhs.hat.trunc["z"].box
                diff = lhs.hat - rhs
                bad = [k for k in diff.terms
                       if all(b is None or e >= b for e, b in zip(k[0], box))]
                assert not bad, (str(phi), i, bad)


def test_flow_property_n1(rng):
    """Applying the plus power equals the flow derivative of the wave function."""
    n = 1
    phi = PsdOp(n, {(0,): DiffPoly.constant(1), (-1,): sym("w1"),
                    (-2,): sym("w2"), (-3,): sym("w3")})
    w = baker_from_phi(phi.truncate((-3,)))
    for k in (1, 2):
        alpha = (k,)
        rules = w4_rules(phi, alpha, window=(-3,))
        lalpha = phi.mul(PsdOp(n, {alpha: DiffPoly.constant(1)}), window=(-6,)).mul(
            phi.inverse(window=(-6,)), window=(-6,))
        lhs = apply_to_wave(lalpha.plus(), w)
        # d_{t_alpha} w = (d_{t_alpha} hat + z^alpha hat) e^xi
        rhs = w.hat.map_coeffs(lambda c: c.derive(alpha, rules.mapping)) + w.hat.mul(
            LaurentSeries.monomial(n, "z", alpha))
        box = lhs.hat.trunc["z"].box
        diff = lhs.hat - rhs
        bad = [kk for kk in diff.terms
               if all(b is None or e >= b for e, b in zip(kk[0], box))]
        assert not bad, (k, bad, str(diff))


def test_bilinear_static(rng):
    for n in (1, 2):
        for _ in range(6):
            phi = random_unital(rng, n, depth=3, hat=True)
            assert bilinear_check(phi).ok


def test_bilinear_one_shift_n1():
    n = 1
    phi = PsdOp(n, {(0,): DiffPoly.constant(1), (-1,): sym("w1"),
                    (-2,): sym("w2"), (-3,): sym("w3"), (-4,): sym("w4")})
    for k in (1, 2):
        alpha = (k,)
        rules = w4_rules(phi, alpha).mapping
        r = bilinear_check(phi, alpha=alpha, order=1, rules=rules)
        assert r.ok, str(r.residue)


def test_series_inverse():
    n = 1
    s = LaurentSeries(n, ("s",), {((0,),): Fraction(2), ((-1,),): Fraction(1)},
                      {"s": GroupTrunc(None, -4, None)})
    inv = series_inverse(s, "s")
    assert (s.mul(inv)).coeff(((0,),)) == Fraction(1)
    prod = s.mul(inv)
    assert all(not c for k, c in prod.terms.items() if k != ((0,),))
