"""Independent single-variable operator calculus used as a test oracle.

Deliberately separate from the engine: operators are plain dicts mapping an
integer exponent of d/dx to a DiffPoly coefficient, multiplied with the
classical one-variable rule

    (f d^a)(h d^b) = sum_{k >= 0} C(a, k) f h^(k) d^{a+b-k},

everything truncated below an explicit ``lowest`` exponent.  Only the scalar
coefficient ring is shared with the engine.
"""

from fractions import Fraction

from psdocalc.diffpoly import DiffPoly

X = (1,)


def binom(a, k):
    out = Fraction(1)
    for j in range(k):
        out *= Fraction(a - j, j + 1)
    return out


def clean(op):
    return {e: c for e, c in op.items() if c}


def add(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, DiffPoly.zero()) + c
    return clean(out)


def neg(a):
    return {e: -c for e, c in a.items()}


def mul(a, b, lowest):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            h = cb
            k = 0
            while True:
                e = ea + eb - k
                if e < lowest:
                    break
                if ea >= 0 and k > ea:
                    break
                coef = binom(ea, k)
                if coef:
                    term = (ca * h).scale(coef)
                    if term:
                        out[e] = out.get(e, DiffPoly.zero()) + term
                if h.is_constant():
                    break
                h = h.derive(X)
                k += 1
    return clean(out)


def adjoint(a, lowest):
    out = {}
    for ea, ca in a.items():
        sign = -1 if ea % 2 else 1
        h = ca
        k = 0
        while True:
            e = ea - k
            if e < lowest:
                break
            if ea >= 0 and k > ea:
                break
            coef = binom(ea, k) * sign
            if coef:
                term = h.scale(coef)
                if term:
                    out[e] = out.get(e, DiffPoly.zero()) + term
            if h.is_constant():
                break
            h = h.derive(X)
            k += 1
    return clean(out)


def one():
    return {0: DiffPoly.constant(1)}


def inverse(a, lowest):
    r = {e: c for e, c in a.items() if e != 0}
    out = one()
    term = one()
    for _ in range(-lowest + 1):
        term = mul(term, neg(r), lowest)
        if not term:
            break
        out = add(out, term)
    return out


def power(a, k, lowest):
    out = one()
    for _ in range(k):
        out = mul(out, a, lowest)
    return out


def split(a):
    plus = {e: c for e, c in a.items() if e >= 0}
    minus = {e: c for e, c in a.items() if e < 0}
    return plus, minus


def commutator(a, b, lowest):
    return add(mul(a, b, lowest), neg(mul(b, a, lowest)))


def dress_component(phi, lowest):
    """phi d phi^-1 computed entirely with oracle arithmetic."""
    d = {1: DiffPoly.constant(1)}
    return mul(mul(phi, d, lowest), inverse(phi, lowest), lowest)


def flow_rules(phi, k, depth, lowest):
    """Flow of the depth symbols along t_k per the dressing relation."""
    dk = {k: DiffPoly.constant(1)}
    lk = mul(mul(phi, dk, lowest), inverse(phi, lowest), lowest)
    _, lk_minus = split(lk)
    rhs = neg(mul(lk_minus, phi, lowest))
    return {j: rhs.get(-j, DiffPoly.zero()) for j in range(1, depth + 1)}
