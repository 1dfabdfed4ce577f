"""Exact-rational sparse polynomial rings used as coefficient domains.

Two rings share one dict-based core:

* ``DiffPoly`` -- polynomials in jet variables.  A jet variable is a named
  function symbol together with a finite multiset of derivative directions
  (multi-indices in the positive cone), e.g. ``a_{y}`` is the symbol ``a``
  differentiated once along (0, 1).
* ``TimePolynomial`` -- polynomials in the time variables ``t[alpha]``,
  alpha in the positive cone.

Monomials are stored as sorted tuples of ``(generator, power)`` pairs mapping
to ``Fraction`` coefficients; zero coefficients are never stored, so ``==``
on the dicts is canonical-form equality.  All values are immutable by
convention and every operation returns a fresh object.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from . import multiindex as mi
from .errors import RulesError


class JetVariable(NamedTuple):
    """A derivative of a named coefficient function.

    ``profile`` is a sorted tuple of ``(direction, order)`` pairs with
    positive orders; the empty profile is the bare symbol.
    """

    symbol: str
    profile: tuple = ()

    def derived(self, direction):
        """The jet obtained by one more derivative along ``direction``."""
        prof = dict(self.profile)
        prof[direction] = prof.get(direction, 0) + 1
        return JetVariable(self.symbol, tuple(sorted(prof.items())))

    def order(self):
        return sum(k for _, k in self.profile)

    def __str__(self):
        return render_jet(self)


def jet(symbol, profile=None):
    """Convenience constructor; ``profile`` maps directions to orders."""
    if not profile:
        return JetVariable(symbol)
    items = tuple(sorted((tuple(d), k) for d, k in dict(profile).items() if k))
    return JetVariable(symbol, items)


def _dir_suffix(direction):
    n = len(direction)
    if direction == mi.unit(n, 0):
        return "x"
    if n >= 2 and direction == mi.unit(n, 1):
        return "y"
    return "t[" + ",".join(str(c) for c in direction) + "]"


def render_jet(j):
    if not j.profile:
        return j.symbol
    suffix = "".join(_dir_suffix(d) * k for d, k in j.profile)
    return f"{j.symbol}_{{{suffix}}}"


def _render_tvar(alpha):
    return "t[" + ",".join(str(c) for c in alpha) + "]"


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected an exact rational scalar, got {type(c).__name__}")


def _mono_mul(m1, m2):
    """Merge two sorted (generator, power) tuples."""
    acc = dict(m1)
    for g, p in m2:
        acc[g] = acc.get(g, 0) + p
    return tuple(sorted(acc.items()))


def _mono_degree(m):
    return sum(p for _, p in m)


class _Poly:
    """Shared sparse-polynomial core; subclasses fix the generator domain."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for m, c in (terms or {}).items():
            c = _as_fraction(c)
            if c:
                clean[m] = c
        self.terms = clean

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, c):
        c = _as_fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def from_generator(cls, g, power=1):
        return cls({((g, power),): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return all(m == () for m in self.terms)

    def constant_value(self):
        return self.terms.get((), Fraction(0))

    def degree(self):
        return max((_mono_degree(m) for m in self.terms), default=0)

    def generators(self):
        seen = set()
        for m in self.terms:
            for g, _ in m:
                seen.add(g)
        return seen

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = type(self).constant(other)
        if type(other) is not type(self):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.terms.items()))))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = type(self).constant(other)
        if type(other) is not type(self):
            return NotImplemented
        acc = dict(self.terms)
        for m, c in other.terms.items():
            s = acc.get(m, Fraction(0)) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return type(self)(acc)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = type(self).constant(other)
        if type(other) is not type(self):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _as_fraction(c)
        if not c:
            return type(self).zero()
        return type(self)({m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if type(other) is not type(self):
            return NotImplemented
        acc = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = acc.get(m, Fraction(0)) + c1 * c2
                if s:
                    acc[m] = s
                else:
                    acc.pop(m, None)
        return type(self)(acc)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"polynomial powers must be nonnegative integers, got {k}")
        result = type(self).constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def _sorted_monomials(self):
        return sorted(self.terms, key=lambda m: (-_mono_degree(m), m))

    def _render(self, gen_str):
        if not self.terms:
            return "0"
        parts = []
        for m in self._sorted_monomials():
            c = self.terms[m]
            factors = []
            for g, p in m:
                s = gen_str(g)
                factors.append(s if p == 1 else f"{s}^{p}")
            if not factors:
                body = str(abs(c))
            else:
                body = "*".join(factors)
                if abs(c) != 1:
                    body = f"{abs(c)}*{body}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)


class DiffPoly(_Poly):
    """Differential polynomial: exact-rational polynomial in jet variables."""

    @classmethod
    def sym(cls, name):
        return cls.from_generator(JetVariable(name))

    @classmethod
    def from_jet(cls, j, power=1):
        return cls.from_generator(j, power)

    def jets(self):
        return self.generators()

    def derive(self, direction, rules=None):
        """Derivative along a time direction, extended by the Leibniz rule.

        Free mode (``rules`` is None) bumps jet profiles.  With ``rules`` (a
        mapping ``(symbol, direction) -> DiffPoly``), non-axis directions
        substitute the prescribed flow of each base symbol and push it
        through the jet's own x-derivatives; axis directions always act
        freely, so prescribed flows can never override them.
        """
        direction = tuple(direction)
        if not mi.in_zplus(direction):
            raise ValueError(f"derivation direction must lie in the positive cone: {direction!r}")
        free = rules is None or mi.axis(direction) is not None
        acc = DiffPoly.zero()
        for m, c in self.terms.items():
            for idx, (j, p) in enumerate(m):
                rest = list(m)
                if p == 1:
                    del rest[idx]
                else:
                    rest[idx] = (j, p - 1)
                cofactor = DiffPoly({tuple(rest): c * p})
                acc = acc + cofactor * _derive_jet(j, direction, None if free else rules)
        return acc

    def eval(self, assignment):
        """Exact evaluation; ``assignment`` maps every jet present to a rational."""
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for g, p in m:
                if g not in assignment:
                    raise KeyError(f"no value assigned to jet {render_jet(g)}")
                v *= _as_fraction(assignment[g]) ** p
            total += v
        return total

    def subst(self, mapping):
        """Replace jets by polynomials; jets not in ``mapping`` are kept."""
        acc = DiffPoly.zero()
        for m, c in self.terms.items():
            term = DiffPoly.constant(c)
            for g, p in m:
                repl = mapping.get(g)
                factor = DiffPoly.from_jet(g) if repl is None else repl
                term = term * factor**p
            acc = acc + term
        return acc

    def __str__(self):
        return self._render(render_jet)


def _derive_jet(j, direction, rules):
    if rules is None:
        return DiffPoly.from_jet(j.derived(direction))
    flow = rules.get((j.symbol, direction))
    if flow is None:
        raise RulesError(f"no rule for d/d{_render_tvar(direction)} of symbol {j.symbol!r}")
    out = flow
    for d, k in j.profile:
        if mi.axis(d) is None:
            raise RulesError(
                f"cannot push the {_render_tvar(direction)} flow through the "
                f"non-axis derivative {_dir_suffix(d)} of {j.symbol!r}"
            )
        for _ in range(k):
            out = out.derive(d)
    return out


class TimePolynomial(_Poly):
    """Polynomial in the time variables t[alpha], alpha in the positive cone."""

    @classmethod
    def var(cls, alpha):
        alpha = tuple(alpha)
        if not mi.in_zplus(alpha):
            raise ValueError(f"time index must lie in the positive cone: {alpha!r}")
        return cls.from_generator(alpha)

    def variables(self):
        return self.generators()

    def derive(self, alpha):
        """Partial derivative with respect to t[alpha]."""
        alpha = tuple(alpha)
        acc = {}
        for m, c in self.terms.items():
            for idx, (g, p) in enumerate(m):
                if g != alpha:
                    continue
                rest = list(m)
                if p == 1:
                    del rest[idx]
                else:
                    rest[idx] = (g, p - 1)
                key = tuple(rest)
                s = acc.get(key, Fraction(0)) + c * p
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return TimePolynomial(acc)

    def eval(self, point):
        """Exact evaluation; ``point`` maps each variable present to a rational."""
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for g, p in m:
                if g not in point:
                    raise KeyError(f"no value assigned to {_render_tvar(g)}")
                v *= _as_fraction(point[g]) ** p
            total += v
        return total

    def __str__(self):
        return self._render(_render_tvar)
