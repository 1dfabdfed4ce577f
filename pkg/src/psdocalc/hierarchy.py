"""Dressing, Lax and zero-curvature consistency checks, PDE extraction.

The flows are induced on a *generic dressing ansatz*: a unital operator whose
non-leading coefficients are bare jet symbols.  The flow of each symbol along
a direction alpha is read off from

    d_{t_alpha} phi = -(phi d^alpha phi^{-1})_- phi

by matching coefficients.  Components of the right-hand side at exponents the
ansatz cannot carry are collected in ``FlowRules.unmatched``: they are the
precise reason a truncated check can fail, so the checkers report them.

Axis directions always act as free jet derivations; induced rules for them
are returned for inspection but never override the free action.
"""

from __future__ import annotations

from typing import NamedTuple

from . import multiindex as mi
from .diffpoly import DiffPoly, JetVariable, render_jet
from .errors import AnsatzError, WindowError
from .psdop import PsdOp, commutator, power_multi, window_meet


class LaxTuple(NamedTuple):
    """Dressed components (d_1 + u_1, ..., d_n + u_n)."""

    components: tuple

    @property
    def n(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]


class FlowRules:
    """Prescribed t_alpha-derivatives of dressing symbols.

    ``mapping`` is keyed by ``(symbol, direction)``; ``unmatched`` records
    right-hand-side components the ansatz had no symbol for, keyed by
    ``(direction, exponent)``.
    """

    def __init__(self, n, mapping=None, unmatched=None):
        self.n = n
        self.mapping = dict(mapping or {})
        self.unmatched = dict(unmatched or {})

    def get(self, key):
        return self.mapping.get(key)

    def __contains__(self, key):
        return key in self.mapping

    def directions(self):
        return {d for _, d in self.mapping}

    def merge(self, other):
        m = dict(self.mapping)
        m.update(other.mapping)
        u = dict(self.unmatched)
        u.update(other.unmatched)
        return FlowRules(self.n, m, u)

    def __repr__(self):
        return f"FlowRules({sorted(self.mapping)}, unmatched={sorted(self.unmatched)})"


class Witness(NamedTuple):
    component: int
    exponent: tuple
    lhs: DiffPoly
    rhs: DiffPoly


class CheckResult(NamedTuple):
    ok: bool
    witness: Witness


def _require_unital(phi):
    if phi.coeff(mi.zero(phi.n)) != DiffPoly.constant(1):
        raise AnsatzError("dressing requires a unital operator (leading coefficient 1)")
    rest = phi - PsdOp.one(phi.n, phi.window)
    if not rest.in_pminus():
        raise AnsatzError("dressing requires the remainder to lie in the minus part")


def dress(phi, window=None):
    """Conjugate the partial-derivative tuple: L_i = phi d_i phi^{-1}.

    Each component must come out as d_i plus a minus-part remainder on its
    window; a violation signals that the window is too small.
    """
    _require_unital(phi)
    n = phi.n
    w = tuple(window) if window is not None else phi.window
    nu = _pos_bound(phi)
    deep = _deepen(w, tuple(v + 1 for v in nu))
    phi_inv = phi.inverse(window=deep)
    comps = []
    for i in range(n):
        li = phi.mul(PsdOp.d(n, i), window=deep).mul(phi_inv, window=deep)
        if li.coeff(mi.unit(n, i)) != DiffPoly.constant(1):
            raise WindowError(f"dressed component {i + 1} lost its leading term; window too small")
        rem = li - PsdOp.monomial(n, mi.unit(n, i), 1, li.window)
        if not rem.in_pminus():
            raise WindowError(
                f"dressed component {i + 1} has residual terms outside the minus part; window too small"
            )
        comps.append(li)
    return LaxTuple(tuple(comps))


def _deepen(window, margin):
    """Lower each finite window component by the matching margin."""
    return tuple(
        None if w is None else w - m for w, m in zip(window, margin)
    )


def _pos_bound(phi):
    nu = phi.bound()
    return tuple(max(v, 0) for v in nu)


def _symbol_at(phi, exp):
    c = phi.coeff(exp)
    if len(c.terms) != 1:
        raise AnsatzError(f"coefficient at {exp} is not a single jet symbol: {c}")
    (mono, coeff), = c.terms.items()
    if coeff != 1 or len(mono) != 1 or mono[0][1] != 1 or mono[0][0].profile:
        raise AnsatzError(f"coefficient at {exp} is not a bare jet symbol: {c}")
    return mono[0][0].symbol


def w4_rules(phi, alpha, window=None):
    """Flow rules induced on a generic ansatz by the dressing relation.

    Every non-leading coefficient of ``phi`` must be a bare symbol; the rule
    for it is the matching coefficient of ``-(phi d^alpha phi^{-1})_- phi``.
    Right-hand-side components without a symbol are recorded as unmatched.
    """
    _require_unital(phi)
    alpha = tuple(alpha)
    if not mi.in_zplus(alpha):
        raise ValueError(f"flow direction must lie in the positive cone: {alpha!r}")
    n = phi.n
    w = tuple(window) if window is not None else phi.window
    # the flow of every symbol must be readable, however shallow the window
    zero = mi.zero(n)
    floors = [e for e in phi.terms if e != zero]
    for i in range(n):
        lo = min((e[i] for e in floors), default=0)
        if w[i] is None or w[i] > lo:
            w = tuple(lo if j == i else v for j, v in enumerate(w))
    # reading the flow at depth w needs the dressed power that much deeper
    nu = _pos_bound(phi)
    deep = _deepen(w, tuple(a + 2 * v for a, v in zip(alpha, nu)))
    phi_inv = phi.inverse(window=deep)
    da = PsdOp(n, {alpha: DiffPoly.constant(1)})
    lalpha = phi.mul(da, window=deep).mul(phi_inv, window=deep)
    rhs = -(lalpha.minus().mul(phi, window=w))
    mapping = {}
    unmatched = {}
    zero = mi.zero(n)
    symbol_exps = {e for e in phi.terms if e != zero}
    for e in symbol_exps:
        sym = _symbol_at(phi, e)
        if not all(ww is None or e[i] >= ww for i, ww in enumerate(rhs.window)):
            raise WindowError(f"window too small to read the flow of the symbol at {e}")
        mapping[(sym, alpha)] = rhs.coeff(e)
    for e, c in rhs.terms.items():
        if e not in symbol_exps and c:
            unmatched[(alpha, e)] = c
    return FlowRules(n, mapping, unmatched)


def lax_check(phi, alpha, window=None, rules=None):
    """Verify d_{t_alpha} L_i = [ (L^alpha)_+ , L_i ] on the window.

    The left side differentiates the dressed coefficients with the induced
    evolutionary rules; the right side is the window-tracked commutator.
    Returns the first differing coefficient as a witness on failure.
    """
    alpha = tuple(alpha)
    n = phi.n
    w = tuple(window) if window is not None else phi.window
    if rules is None:
        rules = w4_rules(phi, alpha, window=w)
    nu = _pos_bound(phi)
    deep = _deepen(w, tuple(a + v + 2 for a, v in zip(alpha, nu)))
    lax = dress(phi, window=deep)
    phi_inv = phi.inverse(window=deep)
    da = PsdOp(n, {alpha: DiffPoly.constant(1)})
    lalpha = phi.mul(da, window=deep).mul(phi_inv, window=deep)
    aplus = lalpha.plus()
    for i, li in enumerate(lax.components):
        lhs = li.derive_coefficients(alpha, rules.mapping)
        rhs = commutator(aplus, li, window=deep)
        wit = lhs.diff_witness(rhs, region=w)
        if wit is not None:
            return CheckResult(False, Witness(i + 1, wit[0], wit[1], wit[2]))
    return CheckResult(True, None)


def zs_check(phi, alpha, beta, window=None, rules=None):
    """Verify d_{t_alpha} (L^beta)_+ - d_{t_beta} (L^alpha)_+ = [(L^alpha)_+, (L^beta)_+]."""
    alpha, beta = tuple(alpha), tuple(beta)
    n = phi.n
    w = tuple(window) if window is not None else phi.window
    if rules is None:
        rules = w4_rules(phi, alpha, window=w).merge(w4_rules(phi, beta, window=w))
    nu = _pos_bound(phi)
    deep = _deepen(w, tuple(max(a, b) + v + 2 for a, b, v in zip(alpha, beta, nu)))
    phi_inv = phi.inverse(window=deep)
    def plus_part(direction):
        dd = PsdOp(n, {direction: DiffPoly.constant(1)})
        return phi.mul(dd, window=deep).mul(phi_inv, window=deep).plus()
    ap, bp = plus_part(alpha), plus_part(beta)
    lhs = bp.derive_coefficients(alpha, rules.mapping) - ap.derive_coefficients(beta, rules.mapping)
    rhs = commutator(ap, bp, window=deep)
    wit = lhs.diff_witness(rhs, region=w)
    if wit is not None:
        return CheckResult(False, Witness(0, wit[0], wit[1], wit[2]))
    return CheckResult(True, None)


class PdeEquation(NamedTuple):
    monomial: tuple
    equation: DiffPoly


class PdeSystem:
    """Per-monomial vanishing conditions extracted from an operator identity."""

    def __init__(self, equations):
        eqs = [PdeEquation(tuple(m), p) for m, p in equations if p]
        self.equations = sorted(eqs, key=lambda e: tuple(reversed(e.monomial)), reverse=True)

    def __iter__(self):
        return iter(self.equations)

    def __len__(self):
        return len(self.equations)

    def __eq__(self, other):
        if not isinstance(other, PdeSystem):
            return NotImplemented
        return self.equations == other.equations

    def monomials(self):
        return [e.monomial for e in self.equations]

    def equation_for(self, monomial):
        monomial = tuple(monomial)
        for e in self.equations:
            if e.monomial == monomial:
                return e.equation
        return DiffPoly.zero()

    def jets(self):
        out = set()
        for e in self.equations:
            out |= e.equation.jets()
        return out

    def table(self):
        if not self.equations:
            return "(empty system)"
        mono_strs = []
        for e in self.equations:
            s = "*".join(
                f"d{i + 1}" if k == 1 else f"d{i + 1}^{k}"
                for i, k in enumerate(e.monomial) if k
            ) or "1"
            mono_strs.append(s)
        width = max(len(s) for s in mono_strs)
        lines = [f"{s.ljust(width)} : {e.equation} = 0" for s, e in zip(mono_strs, self.equations)]
        return "\n".join(lines)

    def to_obj(self):
        return {
            "type": "pde-system",
            "equations": [
                {"monomial": list(e.monomial), "equation": str(e.equation)}
                for e in self.equations
            ],
        }


def extract_pdes(a_plus, b_plus, t_alpha, t_beta, window=None):
    """Equations forced by d_{t_alpha} B - d_{t_beta} A = [A, B] on free jets.

    Inputs are the plus parts for the two directions; their coefficients are
    differentiated freely (the named times are independent jet directions),
    and one equation is emitted per nonzero monomial of the defect.
    """
    t_alpha, t_beta = tuple(t_alpha), tuple(t_beta)
    lhs = b_plus.derive_coefficients(t_alpha) - a_plus.derive_coefficients(t_beta)
    delta = lhs - commutator(a_plus, b_plus, window=window)
    return PdeSystem(list(delta.terms.items()))


def reduce_system(system, substitutions):
    """Apply jet substitutions to every equation; zero equations drop out."""
    subs = dict(substitutions)
    out = []
    for e in system:
        q = e.equation.subst(subs)
        if q:
            out.append((e.monomial, q))
    return PdeSystem(out)


def zero_jet_substitutions(system, symbols, direction):
    """Substitutions sending every jet of ``symbols`` carrying a derivative
    along ``direction`` to zero (the usual simplification step)."""
    direction = tuple(direction)
    subs = {}
    for j in system.jets():
        if j.symbol in symbols and any(d == direction for d, _ in j.profile):
            subs[j] = DiffPoly.zero()
    return subs
