"""Window-truncated pseudodifferential operators in several variables.

An operator is a finite sum ``sum_alpha f_alpha(t) d^alpha`` with ``DiffPoly``
coefficients, multiplied by the Leibniz rule

    (f d^alpha)(h d^beta) = sum_{gamma >= 0} C(alpha, gamma) f (d^gamma h) d^{alpha+beta-gamma}.

Because negative exponents make the gamma-sum infinite, every operator carries
a *window*: a vector of per-component lower bounds below which its terms are
unknown.  A ``None`` component means the operator is exactly known there.  All
equalities computed by this module are equalities-to-window; the product
window is derived so that discarded input terms can never contaminate stored
output terms:

    mu_out_i = max(mu_psi_i + nu_eta_i, mu_eta_i + nu_psi_i)

where ``nu`` is the (finite) upper support bound of the other factor.  A
requested window may shrink, but never deepen, the derived one.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _cartesian

from . import multiindex as mi
from .diffpoly import DiffPoly
from .errors import AnsatzError, DimensionError, WindowError


def _coerce_coeff(c):
    if isinstance(c, DiffPoly):
        return c
    if isinstance(c, (int, Fraction)):
        return DiffPoly.constant(c)
    raise TypeError(f"operator coefficients must be DiffPoly or rationals, got {type(c).__name__}")


def _in_window(exp, window):
    return all(w is None or e >= w for e, w in zip(exp, window))


def window_meet(w1, w2):
    """Componentwise coarser window (None acts as minus infinity)."""
    out = []
    for a, b in zip(w1, w2):
        if a is None:
            out.append(b)
        elif b is None:
            out.append(a)
        else:
            out.append(max(a, b))
    return tuple(out)


class PsdOp:
    """Immutable window-truncated pseudodifferential operator."""

    __slots__ = ("n", "terms", "window")

    def __init__(self, n, terms=None, window=None):
        self.n = n
        self.window = tuple(window) if window is not None else (None,) * n
        if len(self.window) != n:
            raise DimensionError(f"window must have length {n}: {window!r}")
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            mi.check_dim(exp, n)
            c = _coerce_coeff(c)
            if c and _in_window(exp, self.window):
                clean[exp] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n, window=None):
        return cls(n, {}, window)

    @classmethod
    def one(cls, n, window=None):
        return cls(n, {mi.zero(n): DiffPoly.constant(1)}, window)

    @classmethod
    def d(cls, n, i, exp=1):
        """The operator d_i^exp (0-based i), exactly known."""
        return cls(n, {mi.unit(n, i) if exp == 1 else tuple(exp if j == i else 0 for j in range(n)): DiffPoly.constant(1)})

    @classmethod
    def monomial(cls, n, exponent, coeff=1, window=None):
        return cls(n, {tuple(exponent): _coerce_coeff(coeff)}, window)

    # -- basic views --------------------------------------------------

    def coeff(self, exp):
        return self.terms.get(tuple(exp), DiffPoly.zero())

    def support(self):
        return set(self.terms)

    def bound(self):
        """Componentwise upper support bound nu; the window itself if empty."""
        if self.terms:
            return tuple(max(e[i] for e in self.terms) for i in range(self.n))
        return tuple(w if w is not None else 0 for w in self.window)

    def is_window_zero(self):
        return not self.terms

    def is_exact(self):
        return all(w is None for w in self.window)

    def __eq__(self, other):
        if not isinstance(other, PsdOp):
            return NotImplemented
        return self.n == other.n and self.window == other.window and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.window, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def window_equal(self, other, region=None):
        """Agreement on every exponent inside both windows (and ``region``)."""
        if self.n != other.n:
            raise DimensionError("dimension mismatch")
        reg = window_meet(self.window, other.window)
        if region is not None:
            reg = window_meet(reg, region)
        for exp in set(self.terms) | set(other.terms):
            if _in_window(exp, reg) and self.coeff(exp) != other.coeff(exp):
                return False
        return True

    def diff_witness(self, other, region=None):
        """First differing (exponent, lhs, rhs) inside both windows, or None."""
        reg = window_meet(self.window, other.window)
        if region is not None:
            reg = window_meet(reg, region)
        for exp in sorted(set(self.terms) | set(other.terms)):
            if _in_window(exp, reg):
                a, b = self.coeff(exp), other.coeff(exp)
                if a != b:
                    return exp, a, b
        return None

    # -- additive structure -------------------------------------------

    def _check_same_n(self, other):
        if self.n != other.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, DiffPoly)):
            other = PsdOp(self.n, {mi.zero(self.n): _coerce_coeff(other)})
        if not isinstance(other, PsdOp):
            return NotImplemented
        self._check_same_n(other)
        window = window_meet(self.window, other.window)
        acc = dict(self.terms)
        for exp, c in other.terms.items():
            s = acc.get(exp, DiffPoly.zero()) + c
            if s:
                acc[exp] = s
            else:
                acc.pop(exp, None)
        return PsdOp(self.n, acc, window)

    __radd__ = __add__

    def __neg__(self):
        return PsdOp(self.n, {e: -c for e, c in self.terms.items()}, self.window)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, DiffPoly)):
            other = PsdOp(self.n, {mi.zero(self.n): _coerce_coeff(other)})
        if not isinstance(other, PsdOp):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return PsdOp(self.n, {e: v.scale(c) for e, v in self.terms.items()}, self.window)

    def coeff_mul(self, p):
        """Left multiplication by a plain coefficient (no derivatives involved)."""
        p = _coerce_coeff(p)
        return PsdOp(self.n, {e: p * v for e, v in self.terms.items()}, self.window)

    # -- Leibniz product ----------------------------------------------

    def _derived_product_window(self, other, requested):
        out = []
        nu_s, nu_o = self.bound(), other.bound()
        for i in range(self.n):
            cands = []
            if self.window[i] is not None:
                cands.append(self.window[i] + nu_o[i])
            if other.window[i] is not None:
                cands.append(other.window[i] + nu_s[i])
            derived = max(cands) if cands else None
            if requested is not None and requested[i] is not None:
                out.append(requested[i] if derived is None else max(requested[i], derived))
            else:
                out.append(derived)
        return tuple(out)

    def mul(self, other, window=None):
        """Leibniz product, exact on the derived (or requested) window.

        Raises WindowError when a gamma-sum cannot terminate: a component is
        exact on both sides, the left exponent there is negative, and the
        right coefficient has derivatives that never vanish.
        """
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, DiffPoly):
            other = PsdOp(self.n, {mi.zero(self.n): other})
        self._check_same_n(other)
        if window is not None:
            window = tuple(window)
            if len(window) != self.n:
                raise DimensionError(f"requested window must have length {self.n}")
        if not self.terms or not other.terms:
            if self.is_exact() and not self.terms:
                return PsdOp.zero(self.n)
            if other.is_exact() and not other.terms:
                return PsdOp.zero(self.n)
            out_window = self._derived_product_window(other, window)
            return PsdOp.zero(self.n, out_window)
        out_window = self._derived_product_window(other, window)
        acc = {}
        for beta, h in other.terms.items():
            h_table = {mi.zero(self.n): h}
            h_const = h.is_constant()
            for alpha, f in self.terms.items():
                target = mi.add(alpha, beta)
                if not _in_window(target, out_window):
                    continue
                if h_const:
                    caps = mi.zero(self.n)
                else:
                    caps = []
                    for i in range(self.n):
                        cap = None
                        if out_window[i] is not None:
                            cap = target[i] - out_window[i]
                        if alpha[i] >= 0:
                            cap = alpha[i] if cap is None else min(cap, alpha[i])
                        if cap is None:
                            raise WindowError(
                                f"product needs a window in component {i + 1}: "
                                f"exponent {alpha[i]} < 0 with non-constant right coefficient"
                            )
                        caps.append(max(cap, 0))
                    caps = tuple(caps)
                for gamma in mi.iter_box(mi.zero(self.n), caps):
                    cbin = mi.binomial(alpha, gamma)
                    if cbin == 0:
                        continue
                    hg = h_table.get(gamma)
                    if hg is None:
                        hg = _derive_cached(h_table, gamma, self.n)
                    if not hg:
                        continue
                    exp = mi.sub(target, gamma)
                    term = (f * hg).scale(cbin)
                    s = acc.get(exp, DiffPoly.zero()) + term
                    if s:
                        acc[exp] = s
                    else:
                        acc.pop(exp, None)
        return PsdOp(self.n, acc, out_window)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, DiffPoly):
            return self.mul(PsdOp(self.n, {mi.zero(self.n): other}))
        if isinstance(other, PsdOp):
            return self.mul(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, DiffPoly):
            return PsdOp(self.n, {mi.zero(self.n): other}).mul(self)
        return NotImplemented

    # -- adjoint, residue, split, inverse ------------------------------

    def adjoint(self):
        """Formal adjoint sum (-1)^|alpha| d^alpha f_alpha in coefficients-left form.

        The output window equals the input window; components that are exact
        must close (nonnegative exponent or constant coefficient), otherwise
        a window is required.
        """
        out_window = self.window
        acc = {}
        for alpha, f in self.terms.items():
            sign = -1 if mi.total(alpha) % 2 else 1
            f_table = {mi.zero(self.n): f}
            f_const = f.is_constant()
            if f_const:
                caps = mi.zero(self.n)
            else:
                caps = []
                for i in range(self.n):
                    cap = None
                    if out_window[i] is not None:
                        cap = alpha[i] - out_window[i]
                    if alpha[i] >= 0:
                        cap = alpha[i] if cap is None else min(cap, alpha[i])
                    if cap is None:
                        raise WindowError(
                            f"adjoint needs a window in component {i + 1}: "
                            f"exponent {alpha[i]} < 0 with non-constant coefficient"
                        )
                    caps.append(max(cap, 0))
                caps = tuple(caps)
            for gamma in mi.iter_box(mi.zero(self.n), caps):
                cbin = mi.binomial(alpha, gamma)
                if cbin == 0:
                    continue
                fg = f_table.get(gamma)
                if fg is None:
                    fg = _derive_cached(f_table, gamma, self.n)
                if not fg:
                    continue
                exp = mi.sub(alpha, gamma)
                if not _in_window(exp, out_window):
                    continue
                term = fg.scale(cbin * sign)
                s = acc.get(exp, DiffPoly.zero()) + term
                if s:
                    acc[exp] = s
                else:
                    acc.pop(exp, None)
        return PsdOp(self.n, acc, out_window)

    def res_partial(self):
        """Residue with respect to d: the coefficient at exponent (-1, ..., -1)."""
        minus_one = tuple(-1 for _ in range(self.n))
        if not _in_window(minus_one, self.window):
            raise WindowError(f"window {self.window} does not contain {minus_one}")
        return self.coeff(minus_one)

    def split(self):
        """(plus, minus) parts by the sign of the last exponent component.

        The plus part becomes exact in the split component whenever the
        window covers all of its nonnegative exponents.
        """
        plus = {e: c for e, c in self.terms.items() if e[-1] >= 0}
        minus = {e: c for e, c in self.terms.items() if e[-1] < 0}
        wn = self.window[-1]
        plus_window = list(self.window)
        if wn is None or wn <= 0:
            plus_window[-1] = None
        return (
            PsdOp(self.n, plus, tuple(plus_window)),
            PsdOp(self.n, minus, self.window),
        )

    def plus(self):
        return self.split()[0]

    def minus(self):
        return self.split()[1]

    def in_pminus(self):
        """All stored exponents have a negative last component."""
        return all(e[-1] < 0 for e in self.terms)

    def in_phat(self):
        """All stored exponents are <= (-1, ..., -1)."""
        minus_one = tuple(-1 for _ in range(self.n))
        return all(mi.leq(e, minus_one) for e in self.terms)

    def inverse(self, window=None):
        """Neumann inverse of a unital operator 1 + r with r in the minus part.

        Each power of r lowers the top exponent in the last component by at
        least one, so the series terminates on any finite window there.
        """
        one = mi.zero(self.n)
        if self.coeff(one) != DiffPoly.constant(1):
            raise AnsatzError("inverse requires a unital operator (leading coefficient 1)")
        r = self - PsdOp.one(self.n, self.window)
        if not r.in_pminus():
            raise AnsatzError("inverse requires the remainder to lie in the minus part")
        w = tuple(window) if window is not None else self.window
        if w[-1] is None:
            if r.is_window_zero():
                return PsdOp.one(self.n)
            raise WindowError("inverse needs a finite window in the last component")
        depth = -w[-1] + 1
        acc = PsdOp.one(self.n, w if not self.is_exact() or window is not None else None)
        term = PsdOp.one(self.n)
        neg_r = -r
        for _ in range(max(depth, 1)):
            term = term.mul(neg_r, window=w)
            if term.is_window_zero():
                break
            acc = acc + term
        return acc

    # -- coefficientwise maps ------------------------------------------

    def map_coefficients(self, fn):
        return PsdOp(self.n, {e: fn(c) for e, c in self.terms.items()}, self.window)

    def derive_coefficients(self, direction, rules=None):
        """Apply d/dt_direction to every coefficient (window unchanged)."""
        return self.map_coefficients(lambda c: c.derive(direction, rules))

    def truncate(self, window):
        """Forget terms below ``window``; the result window is the coarser one."""
        w = window_meet(self.window, tuple(window))
        return PsdOp(self.n, {e: c for e, c in self.terms.items() if _in_window(e, w)}, w)

    # -- rendering ------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, key=lambda e: tuple(reversed(e)), reverse=True):
            c = self.terms[exp]
            dmon = "*".join(
                f"d{i + 1}" if k == 1 else f"d{i + 1}^{k}"
                for i, k in enumerate(exp)
                if k != 0
            )
            cs = str(c)
            negated = False
            if len(c.terms) == 1:
                if cs.startswith("-"):
                    negated, cs = True, cs[1:]
                body = cs if not dmon else (dmon if cs == "1" else f"{cs}*{dmon}")
            else:
                body = f"({cs})" if not dmon else f"({cs})*{dmon}"
            if not parts:
                parts.append(f"-{body}" if negated else body)
            else:
                parts.append(f"- {body}" if negated else f"+ {body}")
        return " ".join(parts)

    def to_obj(self):
        """JSON-ready structured dump: dimension, window, support."""
        return {
            "type": "psdop",
            "n": self.n,
            "window": [w for w in self.window],
            "terms": [
                {"exponent": list(e), "coefficient": str(self.terms[e])}
                for e in sorted(self.terms, key=lambda e: tuple(reversed(e)), reverse=True)
            ],
        }


def _derive_cached(table, gamma, n):
    """Free derivative d^gamma of table[(0,...,0)], filling ``table`` on the way."""
    key = gamma
    missing = [key]
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
    return table[key]


def mul_or_window(a, b, window=None):
    """Exact product when the Leibniz sum closes, else fall back to ``window``."""
    try:
        return a.mul(b)
    except WindowError:
        if window is None:
            raise
        return a.mul(b, window=window)


def power_multi(components, alpha, window=None):
    """Ordered product L_1^a1 ... L_n^an for alpha >= 0."""
    alpha = tuple(alpha)
    if not mi.is_nonneg(alpha):
        raise ValueError(f"power exponent must be nonnegative: {alpha!r}")
    comps = tuple(components)
    n = comps[0].n
    if len(comps) != n:
        raise DimensionError(f"expected {n} components, got {len(comps)}")
    mi.check_dim(alpha, n)
    result = PsdOp.one(n)
    for i in range(n):
        for _ in range(alpha[i]):
            result = mul_or_window(result, comps[i], window)
    return result


def commutator(a, b, window=None):
    """[a, b] = ab - ba with window tracking."""
    return a.mul(b, window=window) - b.mul(a, window=window)
