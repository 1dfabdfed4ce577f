"""Truncated multivariate Laurent series and wave functions.

A ``LaurentSeries`` lives in one or more named variable groups (``z``, ``s``,
``sp``), each an n-tuple of commuting indeterminates with integer exponents.
Coefficients are exact rationals, differential polynomials, or time
polynomials.  Each group carries a truncation record (a box of per-component
lower bounds and/or total-degree bounds); terms outside a declared truncation
are unknown and never stored.

Wave functions ``g * exp(+xi)`` / ``g * exp(-xi)`` never expand the
exponential: it is carried as a sign flag, and operators act on the hat part
through the conjugated Leibniz rule ``d^alpha -> sum C(alpha, gamma)
(d^gamma .) (sign z)^{alpha - gamma}``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from . import multiindex as mi
from .diffpoly import DiffPoly, TimePolynomial
from .errors import DimensionError, TruncationError, WindowError
from .psdop import PsdOp

GROUP_ORDER = ("z", "s", "sp")


def _group_key(g):
    return (GROUP_ORDER.index(g) if g in GROUP_ORDER else len(GROUP_ORDER), g)


def _czero():
    return Fraction(0)


def _cpromote(a, b):
    if isinstance(a, Fraction) and not isinstance(b, Fraction):
        a = type(b).constant(a)
    elif isinstance(b, Fraction) and not isinstance(a, Fraction):
        b = type(a).constant(b)
    if type(a) is not type(b):
        raise TypeError(f"incompatible coefficient domains: {type(a).__name__} vs {type(b).__name__}")
    return a, b


def _cadd(a, b):
    a, b = _cpromote(a, b)
    return a + b


def _cmul(a, b):
    a, b = _cpromote(a, b)
    return a * b


class GroupTrunc(NamedTuple):
    """Truncation for one variable group; ``None`` means no constraint."""

    box: tuple = None
    deg_lo: int = None
    deg_hi: int = None

    def contains(self, exp):
        if self.box is not None and any(
            b is not None and e < b for e, b in zip(exp, self.box)
        ):
            return False
        t = sum(exp)
        if self.deg_lo is not None and t < self.deg_lo:
            return False
        if self.deg_hi is not None and t > self.deg_hi:
            return False
        return True

    def meet(self, other):
        """The coarser truncation: intersection of the known regions."""
        if other is None:
            return self
        if self.box is None:
            box = other.box
        elif other.box is None:
            box = self.box
        else:
            box = tuple(
                b1 if b2 is None else b2 if b1 is None else max(b1, b2)
                for b1, b2 in zip(self.box, other.box)
            )
        lo = self.deg_lo if other.deg_lo is None else other.deg_lo if self.deg_lo is None else max(self.deg_lo, other.deg_lo)
        hi = self.deg_hi if other.deg_hi is None else other.deg_hi if self.deg_hi is None else min(self.deg_hi, other.deg_hi)
        return GroupTrunc(box, lo, hi)


FREE = GroupTrunc()


class LaurentSeries:
    """Finitely supported truncated Laurent series over named groups."""

    __slots__ = ("n", "groups", "terms", "trunc")

    def __init__(self, n, groups, terms=None, trunc=None):
        self.n = n
        self.groups = tuple(groups)
        self.trunc = {g: (trunc or {}).get(g, FREE) for g in self.groups}
        clean = {}
        for key, c in (terms or {}).items():
            key = tuple(tuple(e) for e in key)
            if len(key) != len(self.groups):
                raise DimensionError(f"key {key!r} does not match groups {self.groups!r}")
            for e in key:
                mi.check_dim(e, n)
            if isinstance(c, int):
                c = Fraction(c)
            if not c:
                continue
            if all(self.trunc[g].contains(e) for g, e in zip(self.groups, key)):
                clean[key] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n, groups=("z",), trunc=None):
        return cls(n, groups, {}, trunc)

    @classmethod
    def constant(cls, n, c, groups=("z",), trunc=None):
        key = tuple(mi.zero(n) for _ in groups)
        return cls(n, groups, {key: c}, trunc)

    @classmethod
    def monomial(cls, n, group, exponent, coeff=Fraction(1), trunc=None):
        return cls(n, (group,), {(tuple(exponent),): coeff}, trunc)

    @classmethod
    def var(cls, n, group, i, k=1):
        exp = tuple(k if j == i else 0 for j in range(n))
        return cls.monomial(n, group, exp)

    # -- views ------------------------------------------------------------

    def group_index(self, group):
        try:
            return self.groups.index(group)
        except ValueError:
            raise DimensionError(f"series has no group {group!r} (groups: {self.groups})")

    def coeff(self, key):
        key = tuple(tuple(e) for e in key)
        return self.terms.get(key, _czero())

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        """Stored-term equality (truncations are metadata, not value)."""
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        a, b = self.align(other)
        keys = set(a.terms) | set(b.terms)
        return all(not _cadd(a.coeff(k), -_as_coeff(b.coeff(k))) for k in keys)

    __hash__ = None  # value-compared container, not hashable

    def bound(self, group):
        """Componentwise max exponent in ``group``; None if empty."""
        gi = self.group_index(group)
        if not self.terms:
            return None
        return tuple(max(k[gi][i] for k in self.terms) for i in range(self.n))

    # -- structural operations ---------------------------------------------

    def align(self, other):
        """Embed both series into the union of their groups."""
        if self.groups == other.groups:
            return self, other
        union = sorted(set(self.groups) | set(other.groups), key=_group_key)
        return self._embed(union), other._embed(union)

    def _embed(self, groups):
        groups = tuple(groups)
        if groups == self.groups:
            return self
        zero_e = mi.zero(self.n)
        pos = {g: i for i, g in enumerate(self.groups)}
        terms = {}
        for key, c in self.terms.items():
            terms[tuple(key[pos[g]] if g in pos else zero_e for g in groups)] = c
        trunc = {g: self.trunc.get(g, FREE) for g in groups}
        return LaurentSeries(self.n, groups, terms, trunc)

    def with_trunc(self, **per_group):
        """Restrict to a finer truncation (terms outside are dropped)."""
        trunc = dict(self.trunc)
        for g, t in per_group.items():
            trunc[g] = self.trunc.get(g, FREE).meet(t)
        return LaurentSeries(self.n, self.groups, self.terms, trunc)

    def rename_group(self, old, new):
        gi = self.group_index(old)
        groups = list(self.groups)
        groups[gi] = new
        order = sorted(range(len(groups)), key=lambda i: _group_key(groups[i]))
        new_groups = tuple(groups[i] for i in order)
        terms = {tuple(key[i] for i in order): c for key, c in self.terms.items()}
        trunc = {groups[i]: self.trunc[self.groups[i]] for i in range(len(groups))}
        return LaurentSeries(self.n, new_groups, terms, trunc)

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, DiffPoly, TimePolynomial)):
            other = LaurentSeries.constant(self.n, other, self.groups, self.trunc)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        a, b = self.align(other)
        trunc = {g: a.trunc[g].meet(b.trunc[g]) for g in a.groups}
        acc = dict(a.terms)
        for key, c in b.terms.items():
            s = _cadd(acc.get(key, _czero()), c)
            if _is_czero(s):
                acc.pop(key, None)
            else:
                acc[key] = s
        return LaurentSeries(a.n, a.groups, acc, trunc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.n, self.groups, {k: -c for k, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, DiffPoly, TimePolynomial)):
            other = LaurentSeries.constant(self.n, other, self.groups, self.trunc)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if isinstance(c, int):
            c = Fraction(c)
        if _is_czero(c):
            return LaurentSeries.zero(self.n, self.groups, self.trunc)
        return LaurentSeries(self.n, self.groups, {k: _cmul(v, c) for k, v in self.terms.items()}, self.trunc)

    def mul(self, other, trunc=None):
        """Product closed under ``trunc`` (default: meet of the factors').

        The default is only metadata; callers that need a provably sound
        region (residue extractions) compute and pass it explicitly.
        """
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, (DiffPoly, TimePolynomial)):
            return self.scale(other)
        a, b = self.align(other)
        out_trunc = {g: a.trunc[g].meet(b.trunc[g]) for g in a.groups}
        if trunc:
            for g, t in trunc.items():
                if g in out_trunc:
                    out_trunc[g] = t
        acc = {}
        for k1, c1 in a.terms.items():
            for k2, c2 in b.terms.items():
                key = tuple(mi.add(e1, e2) for e1, e2 in zip(k1, k2))
                if not all(out_trunc[g].contains(e) for g, e in zip(a.groups, key)):
                    continue
                s = _cadd(acc.get(key, _czero()), _cmul(c1, c2))
                if _is_czero(s):
                    acc.pop(key, None)
                else:
                    acc[key] = s
        return LaurentSeries(a.n, a.groups, acc, out_trunc)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, DiffPoly, TimePolynomial, LaurentSeries)):
            return self.mul(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, DiffPoly, TimePolynomial)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("series powers must be nonnegative integers")
        out = LaurentSeries.constant(self.n, Fraction(1), self.groups, self.trunc)
        for _ in range(k):
            out = out.mul(self)
        return out

    # -- residues and coefficient maps ------------------------------------

    def residue(self, group="z"):
        """Coefficient at exponent (-1, ..., -1) in ``group``.

        Collapses the group; returns a LaurentSeries over the remaining groups,
        or the bare coefficient if none remain.
        """
        gi = self.group_index(group)
        minus_one = tuple(-1 for _ in range(self.n))
        if not self.trunc[group].contains(minus_one):
            raise TruncationError(
                f"truncation of group {group!r} does not contain the residue exponent {minus_one}"
            )
        rest_groups = tuple(g for g in self.groups if g != group)
        if not rest_groups:
            out = _czero()
            for key, c in self.terms.items():
                if key[gi] == minus_one:
                    out = _cadd(out, c)
            return out
        acc = {}
        for key, c in self.terms.items():
            if key[gi] != minus_one:
                continue
            rest = tuple(e for j, e in enumerate(key) if j != gi)
            s = _cadd(acc.get(rest, _czero()), c)
            if _is_czero(s):
                acc.pop(rest, None)
            else:
                acc[rest] = s
        trunc = {g: self.trunc[g] for g in rest_groups}
        return LaurentSeries(self.n, rest_groups, acc, trunc)

    def map_coeffs(self, fn):
        acc = {}
        for key, c in self.terms.items():
            v = fn(c)
            if not _is_czero(v):
                acc[key] = v
        return LaurentSeries(self.n, self.groups, acc, self.trunc)

    def eval_times(self, point):
        """Evaluate TimePolynomial coefficients at a rational point."""
        return self.map_coeffs(lambda c: c.eval(point) if isinstance(c, TimePolynomial) else c)

    def derive_time(self, alpha):
        """Coefficientwise d/dt_alpha (coefficients must be TimePolynomial)."""
        alpha = tuple(alpha)
        return self.map_coeffs(
            lambda c: c.derive(alpha) if isinstance(c, TimePolynomial) else Fraction(0)
        )

    def derive_group(self, group, i):
        """Formal d/dv_i for variable i of ``group``: exponents step down."""
        gi = self.group_index(group)
        acc = {}
        for key, c in self.terms.items():
            e = key[gi]
            if e[i] == 0:
                continue
            ne = tuple(v - 1 if j == i else v for j, v in enumerate(e))
            nkey = tuple(ne if j == gi else k for j, k in enumerate(key))
            s = _cadd(acc.get(nkey, _czero()), _cmul(c, Fraction(e[i])))
            if _is_czero(s):
                acc.pop(nkey, None)
            else:
                acc[nkey] = s
        trunc = dict(self.trunc)
        t = trunc[group]
        trunc[group] = GroupTrunc(
            tuple(b - 1 if b is not None else None for b in t.box) if t.box is not None else None,
            t.deg_lo - 1 if t.deg_lo is not None else None,
            t.deg_hi,
        )
        return LaurentSeries(self.n, self.groups, acc, trunc)

    # -- rendering ----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=lambda k: tuple((-sum(e), e) for e in k)):
            c = self.terms[key]
            factors = []
            for g, e in zip(self.groups, key):
                for i, k in enumerate(e):
                    if k == 0:
                        continue
                    v = f"{g}{i + 1}"
                    factors.append(v if k == 1 else f"{v}^{k}")
            cs = str(c)
            multi = not isinstance(c, Fraction) and len(c.terms) > 1
            negated = False
            if not multi and cs.startswith("-"):
                negated, cs = True, cs[1:]
            if not factors:
                body = f"({cs})" if multi else cs
            else:
                mon = "*".join(factors)
                if multi:
                    body = f"({cs})*{mon}"
                elif cs == "1":
                    body = mon
                else:
                    body = f"{cs}*{mon}"
            if not parts:
                parts.append(f"-{body}" if negated else body)
            else:
                parts.append(f"- {body}" if negated else f"+ {body}")
        return " ".join(parts)

    def to_obj(self):
        return {
            "type": "laurent",
            "n": self.n,
            "groups": list(self.groups),
            "trunc": {
                g: {"box": list(t.box) if t.box is not None else None, "deg_lo": t.deg_lo, "deg_hi": t.deg_hi}
                for g, t in self.trunc.items()
            },
            "terms": [
                {"exponents": [list(e) for e in key], "coefficient": str(self.terms[key])}
                for key in sorted(self.terms)
            ],
        }


def _as_coeff(c):
    return Fraction(c) if isinstance(c, int) else c


def _is_czero(c):
    return not c


def series_inverse(s, group, depth=None):
    """Neumann inverse of a series that is unital in ``group`` grading.

    Requires the zero-exponent coefficient to be an invertible rational and
    every other term to lower the total degree of ``group``; the expansion is
    cut at total degree ``-depth`` (default: the group's declared deg_lo).
    """
    gi = s.group_index(group)
    zero_key = tuple(mi.zero(s.n) for _ in s.groups)
    c0 = s.coeff(zero_key)
    if not isinstance(c0, Fraction) or not c0:
        raise WindowError("series inverse needs an invertible rational constant term")
    t = s.trunc[group]
    if depth is None:
        if t.deg_lo is None:
            raise WindowError(f"series inverse needs a degree cut for group {group!r}")
        depth = -t.deg_lo
    tail = (s - LaurentSeries(s.n, s.groups, {zero_key: c0}, s.trunc)).scale(Fraction(1, 1) / c0)
    if any(sum(k[gi]) >= 0 for k in tail.terms):
        raise WindowError("series inverse requires the tail to lower the group degree")
    trunc = dict(s.trunc)
    trunc[group] = trunc[group].meet(GroupTrunc(None, -depth, None))
    out = LaurentSeries.constant(s.n, Fraction(1, 1) / c0, s.groups, trunc)
    term = LaurentSeries.constant(s.n, Fraction(1) / c0, s.groups, trunc)
    neg_tail = -tail
    for _ in range(depth + 1):
        term = term.mul(neg_tail, trunc)
        if term.is_zero():
            break
        out = out + term
    return out


def series_exp(s, group, degree):
    """exp of a series whose terms all raise the ``group`` degree, cut at ``degree``."""
    gi = s.group_index(group)
    if any(sum(k[gi]) <= 0 for k in s.terms):
        raise WindowError("series exp requires the argument to raise the group degree")
    trunc = dict(s.trunc)
    trunc[group] = trunc[group].meet(GroupTrunc(None, None, degree))
    out = LaurentSeries.constant(s.n, Fraction(1), s.groups, trunc)
    term = LaurentSeries.constant(s.n, Fraction(1), s.groups, trunc)
    k = 1
    while True:
        term = term.mul(s, trunc).scale(Fraction(1, k))
        if term.is_zero():
            break
        out = out + term
        k += 1
    return out


def series_exp_lowering(s, group, depth):
    """exp of a series whose terms all lower the ``group`` degree, cut at ``-depth``."""
    gi = s.group_index(group)
    if any(sum(k[gi]) >= 0 for k in s.terms):
        raise WindowError("series exp requires the argument to lower the group degree")
    trunc = dict(s.trunc)
    trunc[group] = trunc[group].meet(GroupTrunc(None, -depth, None))
    out = LaurentSeries.constant(s.n, Fraction(1), s.groups, trunc)
    term = LaurentSeries.constant(s.n, Fraction(1), s.groups, trunc)
    k = 1
    while True:
        term = term.mul(s, trunc).scale(Fraction(1, k))
        if term.is_zero():
            break
        out = out + term
        k += 1
    return out


# -- wave functions -------------------------------------------------------


class WaveSymbol(NamedTuple):
    """A hat series times exp(+xi) or exp(-xi), the exponential kept symbolic."""

    hat: LaurentSeries
    sign: int

    def __str__(self):
        s = "+" if self.sign > 0 else "-"
        return f"({self.hat})*exp({s}xi)"


def symbol_of(psi, sign=1):
    """Exponent-preserving substitution d^alpha -> (sign)^|alpha| z^alpha.

    The z-truncation box is inherited from the operator window.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    terms = {}
    for exp, c in psi.terms.items():
        s = 1 if (sign == 1 or mi.total(exp) % 2 == 0) else -1
        terms[(exp,)] = c.scale(s)
    trunc = {"z": GroupTrunc(box=psi.window)}
    return LaurentSeries(psi.n, ("z",), terms, trunc)


def wave_exponential(n, sign=1, window=None):
    """The bare wave function exp(+xi) or exp(-xi)."""
    trunc = {"z": GroupTrunc(box=window)} if window is not None else None
    hat = LaurentSeries.constant(n, Fraction(1), ("z",), trunc)
    return WaveSymbol(hat, sign)


def _hat_box(hat):
    return hat.trunc["z"].box or (None,) * hat.n


def _sound_box(win_a, nu_a, win_b, nu_b, n):
    out = []
    for i in range(n):
        cands = []
        if win_a[i] is not None:
            cands.append(win_a[i] + (nu_b[i] if nu_b else 0))
        if win_b[i] is not None:
            cands.append(win_b[i] + (nu_a[i] if nu_a else 0))
        out.append(max(cands) if cands else None)
    return tuple(out)


def apply_to_wave(psi, wave):
    """Act with an operator on a wave function; the hat picks up the
    conjugated Leibniz sum and the exponential sign is preserved."""
    hat = wave.hat
    if hat.groups != ("z",):
        raise DimensionError("wave hat must be a pure z-series")
    n = psi.n
    sign = wave.sign
    box_h = _hat_box(hat)
    nu_psi = psi.bound() if psi.terms else None
    nu_hat = hat.bound("z")
    out_box = _sound_box(psi.window, nu_hat, box_h, nu_psi, n)
    acc = {}
    for (beta,), g in hat.terms.items():
        g_poly = g if isinstance(g, DiffPoly) else DiffPoly.constant(g)
        g_table = {mi.zero(n): g_poly}
        g_const = g_poly.is_constant()
        for alpha, f in psi.terms.items():
            target = mi.add(alpha, beta)
            if not _box_contains(target, out_box):
                continue
            if g_const:
                caps = mi.zero(n)
            else:
                caps = []
                for i in range(n):
                    cap = None
                    if out_box[i] is not None:
                        cap = target[i] - out_box[i]
                    if alpha[i] >= 0:
                        cap = alpha[i] if cap is None else min(cap, alpha[i])
                    if cap is None:
                        raise WindowError(
                            f"wave application needs a z-window in component {i + 1}"
                        )
                    caps.append(max(cap, 0))
                caps = tuple(caps)
            for gamma in mi.iter_box(mi.zero(n), caps):
                cbin = mi.binomial(alpha, gamma)
                if cbin == 0:
                    continue
                gg = g_table.get(gamma)
                if gg is None:
                    gg = _derive_cached_local(g_table, gamma, n)
                if not gg:
                    continue
                exp = mi.sub(target, gamma)
                par = 1 if (sign == 1 or mi.total(mi.sub(alpha, gamma)) % 2 == 0) else -1
                term = (f * gg).scale(cbin * par)
                key = (exp,)
                s = acc.get(key)
                s = term if s is None else s + term
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
    out = LaurentSeries(n, ("z",), acc, {"z": GroupTrunc(box=out_box)})
    return WaveSymbol(out, sign)


def _box_contains(exp, box):
    return all(b is None or e >= b for e, b in zip(exp, box))


def _derive_cached_local(table, gamma, n):
    missing = [gamma]
    while missing:
        g = missing[-1]
        if g in table:
            missing.pop()
            continue
        i = next(j for j in range(n) if g[j] > 0)
        prev = tuple(v - 1 if j == i else v for j, v in enumerate(g))
        if prev in table:
            table[g] = table[prev].derive(mi.unit(n, i))
            missing.pop()
        else:
            missing.append(prev)
    return table[gamma]


def res_z(h):
    """Residue with respect to z: the coefficient at z^(-1, ..., -1)."""
    return h.residue("z")


class PairResidueResult(NamedTuple):
    lhs: DiffPoly
    rhs: DiffPoly
    equal: bool


def pair_residue_check(psi, eta):
    """Check Res_z (psi e^xi)(eta e^-xi) == Res_d (psi eta*).

    The left side multiplies the two symbols on the sound product box; the
    right side goes through the operator adjoint.  Both require windows deep
    enough to contain the residue exponent.
    """
    n = psi.n
    h1 = symbol_of(psi, 1)
    h2 = symbol_of(eta, -1)
    box = _sound_box(psi.window, eta.bound() if eta.terms else None,
                     eta.window, psi.bound() if psi.terms else None, n)
    minus_one = tuple(-1 for _ in range(n))
    if not _box_contains(minus_one, box):
        raise WindowError(f"windows too shallow for the residue: sound box {box}")
    prod = h1.mul(h2, {"z": GroupTrunc(box=box)})
    lhs = prod.residue("z")
    if isinstance(lhs, Fraction):
        lhs = DiffPoly.constant(lhs)
    rhs = psi.mul(eta.adjoint()).res_partial()
    return PairResidueResult(lhs, rhs, lhs == rhs)


def baker_from_phi(phi):
    """Wave function phi * exp(xi) of a unital operator."""
    return WaveSymbol(symbol_of(phi, 1), 1)


def adjoint_baker(phi, window=None):
    """Adjoint wave function (phi*)^-1 * exp(-xi)."""
    w = tuple(window) if window is not None else phi.window
    star = phi.truncate(w).adjoint() if window is not None else phi.adjoint()
    inv = star.inverse(window=w)
    return WaveSymbol(symbol_of(inv, -1), -1)


class BilinearReport(NamedTuple):
    ok: bool
    residue: object
    witness: object


def bilinear_check(phi, alpha=None, order=0, rules=None, window=None):
    """Check Res_z w(t', z) w*(t, z) = 0 with t' a Miwa-type shift of t.

    ``order`` = 0 is the unshifted identity.  For ``order`` >= 1 the shift
    moves t along one direction ``alpha`` >= (1,...,1); the hat part is
    Taylor-expanded using the evolutionary ``rules`` for that direction and
    the exponential contributes the finite kernel factor, so the residue
    becomes a series in s whose coefficients must all vanish.
    """
    n = phi.n
    w = baker_from_phi(phi)
    wstar = adjoint_baker(phi, window=window)
    box = _sound_box(phi.window, wstar.hat.bound("z"), _hat_box(wstar.hat),
                     phi.bound() if phi.terms else None, n)
    minus_one = tuple(-1 for _ in range(n))
    if not _box_contains(minus_one, box):
        raise WindowError(f"windows too shallow for the residue: sound box {box}")
    if order == 0:
        prod = w.hat.mul(wstar.hat, {"z": GroupTrunc(box=box)})
        r = prod.residue("z")
        if isinstance(r, Fraction):
            r = DiffPoly.constant(r)
        return BilinearReport(r.is_zero(), r, None if r.is_zero() else r)
    alpha = tuple(alpha)
    if not all(a >= 1 for a in alpha):
        raise WindowError("shift directions must have all components >= 1")
    inv_a = Fraction(1)
    for a in alpha:
        inv_a /= a
    # Taylor expansion of the shifted hat in powers of s^-alpha
    strunc = {"s": GroupTrunc(None, -order * mi.total(alpha), None)}
    shifted = w.hat._embed(("z", "s"))
    deriv = w.hat
    fact = Fraction(1)
    for m in range(1, order + 1):
        deriv = deriv.map_coeffs(lambda c: _dp(c).derive(alpha, rules))
        fact *= m
        coeff = (-inv_a) ** m / fact
        s_exp = tuple(-m * a for a in alpha)
        piece = LaurentSeries(n, ("z", "s"),
                              {(k[0], s_exp): _cmul(c, coeff) for k, c in deriv.terms.items()},
                              {"z": deriv.trunc["z"], "s": strunc["s"]})
        shifted = shifted + piece
    # kernel factor exp(-inv_a s^-alpha z^alpha) truncated to the same order
    kern_terms = {}
    fact = Fraction(1)
    for m in range(order + 1):
        if m:
            fact *= m
        kern_terms[(tuple(m * a for a in alpha), tuple(-m * a for a in alpha))] = (-inv_a) ** m / fact
    kern = LaurentSeries(n, ("z", "s"), kern_terms)
    prod = shifted.mul(wstar.hat, {"z": GroupTrunc(box=box)}).mul(kern, {"z": GroupTrunc(box=box)})
    r = prod.residue("z")
    if isinstance(r, LaurentSeries):
        ok = r.is_zero()
        wit = None if ok else min(r.terms)
        return BilinearReport(ok, r, wit)
    ok = _is_czero(r)
    return BilinearReport(ok, r, None if ok else r)


def _dp(c):
    return c if isinstance(c, DiffPoly) else DiffPoly.constant(c)
