"""Miwa-type shifts, residue lemmas, and the tau-to-wave expansion.

The shift operator G(s) substitutes ``t_alpha -> t_alpha - alpha^-1 s^-alpha``
with ``alpha^-1 = 1/(alpha_1 ... alpha_n)``.  That weight is undefined when a
component of alpha vanishes, so shifts are only applied for indices with all
components >= 1; polynomials involving any other time variable are rejected
rather than silently mis-shifted.  Consequences of that restriction (the
kernel-versus-logarithm mismatch for n >= 2) are measured by
``kernel_vs_geometric`` instead of being assumed away.

All series here use total-degree truncation with an explicit degree budget T;
each check states the region on which its result is provably exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from . import multiindex as mi
from .diffpoly import TimePolynomial
from .errors import DimensionError, PoleError, TruncationError, UnsupportedIndexError
from .wave import FREE, GroupTrunc, LaurentSeries, series_inverse


@dataclass(frozen=True)
class TauContext:
    """A tau function with its dimension, active times, and degree budget."""

    n: int
    active: tuple
    degree: int
    tau: TimePolynomial

    def __post_init__(self):
        for a in self.active:
            mi.check_dim(tuple(a), self.n)
        extra = {v for v in self.tau.variables()} - {tuple(a) for a in self.active}
        if extra:
            raise DimensionError(f"tau involves inactive time variables: {sorted(extra)}")


def _inv_weight(alpha):
    w = Fraction(1)
    for a in alpha:
        if a < 1:
            raise UnsupportedIndexError(
                f"shift weight undefined for index {alpha} (zero or negative component)"
            )
        w /= a
    return w


def shift_kernel(n, degree, s_group="s", z_group="z"):
    """The formal sum over alpha >= (1,...,1), |alpha| <= degree of
    alpha^-1 s^-alpha z^alpha."""
    groups = tuple(sorted({z_group, s_group}, key=lambda g: (g != z_group, g)))
    terms = {}
    for alpha in mi.iter_ones_cone(n, degree):
        key = (alpha, mi.neg(alpha)) if groups[0] == z_group else (mi.neg(alpha), alpha)
        terms[key] = _inv_weight(alpha)
    trunc = {z_group: GroupTrunc(None, None, degree), s_group: GroupTrunc(None, -degree, None)}
    return LaurentSeries(n, groups, terms, trunc)


def miwa_shift(p, n, group, degree, sign=-1):
    """Expand p(t -+ alpha^-1 s^-alpha) as a Laurent series in the group.

    Exact for polynomial p up to total group-degree ``-degree``; indices with
    zero components raise UnsupportedIndexError.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    trunc = {group: GroupTrunc(None, -degree, None)}
    zero_e = mi.zero(n)
    out = LaurentSeries.zero(n, (group,), trunc)
    factor_cache = {}
    for mono, c in p.terms.items():
        term = LaurentSeries.constant(n, c, (group,), trunc)
        for alpha, k in mono:
            mi.check_dim(alpha, n)
            base = factor_cache.get(alpha)
            if base is None:
                base = LaurentSeries(
                    n,
                    (group,),
                    {
                        (zero_e,): TimePolynomial.var(alpha),
                        (mi.neg(alpha),): TimePolynomial.constant(sign * _inv_weight(alpha)),
                    },
                    trunc,
                )
                factor_cache[alpha] = base
            for _ in range(k):
                term = term.mul(base, trunc)
        out = out + term
    return out


def miwa_shift_series(f, degree, sign=-1):
    """Apply the shift to every TimePolynomial coefficient of a series.

    The shift group is the series' own (single) group; each coefficient
    expands into that group and multiplies its original monomial.
    """
    if len(f.groups) != 1:
        raise DimensionError("coefficientwise shift expects a single-group series")
    group = f.groups[0]
    trunc = {group: f.trunc[group].meet(GroupTrunc(None, -degree, None))}
    out = LaurentSeries.zero(f.n, f.groups, trunc)
    for (exp,), c in f.terms.items():
        if isinstance(c, Fraction):
            shifted = LaurentSeries.constant(f.n, c, f.groups, trunc)
        else:
            shifted = miwa_shift(c, f.n, group, degree, sign)
        mono = LaurentSeries.monomial(f.n, group, exp)
        out = out + shifted.mul(mono, trunc)
    return out


def geometric_inverse(n, s_group, degree):
    """Multinomial expansion of (1 - sum_r z_r/s_r)^-1 to total z-degree T."""
    groups = tuple(sorted({"z", s_group}, key=lambda g: (g != "z", g)))
    terms = {}
    for total in range(degree + 1):
        for beta in mi.iter_box(mi.zero(n), (total,) * n):
            if mi.total(beta) != total:
                continue
            coeff = Fraction(_multinomial(beta))
            key = (beta, mi.neg(beta)) if groups[0] == "z" else (mi.neg(beta), beta)
            terms[key] = coeff
    trunc = {"z": GroupTrunc(None, None, degree), s_group: GroupTrunc(None, -degree, None)}
    return LaurentSeries(n, groups, terms, trunc)


def _multinomial(beta):
    from math import factorial

    out = factorial(sum(beta))
    for b in beta:
        out //= factorial(b)
    return out


class LemmaResult(NamedTuple):
    lhs: LaurentSeries
    rhs: LaurentSeries
    equal: bool
    discrepancies: list


def _eta_entries(eta):
    """Validate eta = 1 + tail with tail exponents <= (-1,...,-1)."""
    n = eta.n
    if eta.groups != ("z",):
        raise DimensionError("eta must be a pure z-series")
    zero_key = (mi.zero(n),)
    minus_one = tuple(-1 for _ in range(n))
    if eta.coeff(zero_key) != Fraction(1):
        entries = eta.coeff(zero_key)
        if not (hasattr(entries, "is_constant") and entries.is_constant() and entries.constant_value() == 1):
            raise DimensionError("eta must be unital (constant term 1)")
    tail = []
    for (alpha,), c in eta.terms.items():
        if alpha == mi.zero(n):
            continue
        if not mi.leq(alpha, minus_one):
            raise DimensionError(f"eta tail exponent {alpha} is not <= {minus_one}")
        tail.append((alpha, c))
    return tail


def lemma41_check(eta, degree, s_group="s", mode="exact"):
    """Res_z of eta(z) against the geometric series, versus its pairing form.

    The tail term at alpha pairs with the geometric term at beta = -alpha-1,
    which carries the multinomial weight of beta.  ``exact`` mode compares
    the brute-force residue with the weighted pairing sum (an identity for
    every valid eta); ``paper`` mode compares with the unweighted display
    s^1 (eta(s) - 1), which is exact at n = 1 only, and reports the
    discrepant monomials.
    """
    if mode not in ("exact", "paper"):
        raise ValueError("mode must be 'exact' or 'paper'")
    n = eta.n
    tail = _eta_entries(eta)
    for alpha, _ in tail:
        need = mi.total(mi.sub(mi.neg(alpha), mi.ones(n)))
        if need > degree:
            raise TruncationError(
                f"degree budget {degree} misses the pair for tail exponent {alpha} (needs {need})"
            )
    geo = geometric_inverse(n, s_group, degree)
    lhs = eta.mul(geo).residue("z")
    if not isinstance(lhs, LaurentSeries):
        lhs = LaurentSeries.constant(n, lhs, (s_group,))
    rhs_terms = {}
    for alpha, c in tail:
        key = (mi.add(alpha, mi.ones(n)),)
        if mode == "exact":
            beta = mi.sub(mi.neg(alpha), mi.ones(n))
            rhs_terms[key] = c * Fraction(_multinomial(beta))
        else:
            rhs_terms[key] = c
    rhs = LaurentSeries(n, (s_group,), rhs_terms)
    diff = rhs - lhs
    discrepancies = sorted(
        ((key, diff.terms[key]) for key in diff.terms),
        key=lambda kv: (sum(abs(e) for e in kv[0][0]), kv[0]),
    )
    return LemmaResult(lhs, rhs, not discrepancies, discrepancies)


def lemma42_check(eta, degree, mode="constrained", s_group="s", sp_group="sp"):
    """Res_z of eta against two geometric series, versus its regrouped form.

    ``constrained`` compares with the inner sum cut to the finitely many
    pairs beta + gamma = -alpha - 1 the residue actually produces, each
    weighted by its two multinomials (an exact identity).  ``paper``
    compares with the unconstrained, unweighted displayed sum and reports
    the spurious monomials, ordered by total s-degree.
    """
    if mode not in ("constrained", "paper"):
        raise ValueError("mode must be 'constrained' or 'paper'")
    n = eta.n
    tail = _eta_entries(eta)
    for alpha, _ in tail:
        need = mi.total(mi.sub(mi.neg(alpha), mi.ones(n)))
        if need > degree:
            raise TruncationError(
                f"degree budget {degree} misses pairs for tail exponent {alpha} (needs {need})"
            )
    geo_s = geometric_inverse(n, s_group, degree)
    geo_sp = geometric_inverse(n, sp_group, degree)
    lhs = eta.mul(geo_s).mul(geo_sp).residue("z")
    if not isinstance(lhs, LaurentSeries):
        lhs = LaurentSeries.constant(n, lhs, (s_group, sp_group))
    rhs_terms = {}
    for alpha, c in tail:
        top = mi.sub(mi.neg(alpha), mi.ones(n))
        if mode == "constrained":
            gammas = mi.iter_box(mi.zero(n), top)
        else:
            gammas = mi.iter_box(mi.zero(n), (degree,) * n)
        for gamma in gammas:
            if mode == "paper" and mi.total(gamma) > degree:
                continue
            # keys are distinct across (alpha, gamma) pairs: gamma fixes the
            # sp-exponent and alpha then fixes the s-exponent
            key = (mi.add(mi.add(alpha, mi.ones(n)), gamma), mi.neg(gamma))
            if mode == "constrained":
                beta = mi.sub(top, gamma)
                weight = Fraction(_multinomial(beta) * _multinomial(gamma))
                rhs_terms[key] = c * weight
            else:
                rhs_terms[key] = c
    rhs = LaurentSeries(n, (s_group, sp_group), rhs_terms)
    diff = rhs - lhs
    discrepancies = sorted(
        ((key, diff.terms[key]) for key in diff.terms),
        key=lambda kv: (sum(abs(e) for e in kv[0][0]), kv[0]),
    )
    return LemmaResult(lhs, rhs, not discrepancies, discrepancies)


class KernelReport(NamedTuple):
    equal: bool
    first_mismatch: tuple
    mismatches: list


def kernel_vs_geometric(n, degree, s_group="s"):
    """Compare the shift kernel with the logarithm of the geometric series.

    Expands -ln(1 - sum_r z_r/s_r) = sum_m (sum_r z_r/s_r)^m / m to total
    z-degree T and subtracts the alpha >= (1,...,1) kernel.  Exact agreement
    at n = 1; for n >= 2 the report lists the disagreeing monomials (pure
    powers first), graded-lexicographically.
    """
    groups = tuple(sorted({"z", s_group}, key=lambda g: (g != "z", g)))
    trunc = {"z": GroupTrunc(None, None, degree), s_group: GroupTrunc(None, -degree, None)}
    u_terms = {}
    for i in range(n):
        key = (mi.unit(n, i), mi.neg(mi.unit(n, i)))
        u_terms[key] = Fraction(1)
    u = LaurentSeries(n, groups, u_terms, trunc)
    log_side = LaurentSeries.zero(n, groups, trunc)
    power = LaurentSeries.constant(n, Fraction(1), groups, trunc)
    for m in range(1, degree + 1):
        power = power.mul(u, trunc)
        if power.is_zero():
            break
        log_side = log_side + power.scale(Fraction(1, m))
    kernel = shift_kernel(n, degree, s_group)
    diff = log_side - kernel
    mismatches = sorted(
        ((key, log_side.coeff(key), kernel.coeff(key)) for key in diff.terms),
        key=lambda kv: (sum(kv[0][0]), kv[0]),
    )
    first = mismatches[0] if mismatches else None
    return KernelReport(not mismatches, first, mismatches)


def dk_apply(k, f, degree):
    """Apply the annihilation operator for direction k (0-based):

        sum_{alpha >= 1, |alpha| <= T} alpha_k alpha^-1 z^{-alpha-e_k} d_alpha  -  d/dz_k

    with d_alpha acting on TimePolynomial coefficients and d/dz_k on
    exponents.  The result is complete one degree below f's declared cut.
    """
    if f.groups != ("z",):
        raise DimensionError("annihilation operator expects a pure z-series")
    n = f.n
    variables = set()
    for c in f.terms.values():
        if isinstance(c, TimePolynomial):
            variables |= c.variables()
    lo = f.trunc["z"].deg_lo
    cut = GroupTrunc(None, None if lo is None else lo - 1, None)
    out = -f.derive_group("z", k)
    ek = mi.unit(n, k)
    for alpha in sorted(variables):
        if not all(a >= 1 for a in alpha) or mi.total(alpha) > degree:
            continue
        da = f.derive_time(alpha)
        if da.is_zero():
            continue
        weight = Fraction(alpha[k]) * _inv_weight(alpha)
        shift = LaurentSeries.monomial(n, "z", mi.neg(mi.add(alpha, ek)), weight)
        out = out + da.mul(shift, {"z": cut})
    return out.with_trunc(z=cut)


class CheckResult(NamedTuple):
    ok: bool
    witness: object


def dk_annihilation_check(ctx, k):
    """The shift of a tau over indices >= 1 is killed by every annihilation
    operator, up to the sound degree (budget minus the largest shift used)."""
    for a in ctx.active:
        if not all(c >= 1 for c in a):
            raise UnsupportedIndexError(f"active index {a} has a zero component")
    shifted = miwa_shift(ctx.tau, ctx.n, "z", ctx.degree)
    result = dk_apply(k, shifted, ctx.degree)
    max_shift = max((mi.total(a) for a in ctx.tau.variables()), default=0)
    sound = -(ctx.degree - max_shift)
    bad = sorted(key for key in result.terms if sum(key[0]) >= sound)
    if bad:
        key = bad[0]
        return CheckResult(False, (key[0], result.terms[key]))
    return CheckResult(True, None)


def wavehat_from_tau(ctx, point):
    """The wave hat G(z) tau / tau evaluated at a rational time point."""
    point = {tuple(a): Fraction(v) for a, v in point.items()}
    denom = ctx.tau.eval(point)
    if denom == 0:
        raise PoleError(f"tau vanishes at the evaluation point {point}")
    shifted = miwa_shift(ctx.tau, ctx.n, "z", ctx.degree)
    return shifted.eval_times(point).scale(Fraction(1) / denom)


def adjoint_wavehat_from_tau(ctx, point, group="z"):
    """The adjoint wave hat: the inverse shift of tau over tau, evaluated."""
    point = {tuple(a): Fraction(v) for a, v in point.items()}
    denom = ctx.tau.eval(point)
    if denom == 0:
        raise PoleError(f"tau vanishes at the evaluation point {point}")
    shifted = miwa_shift(ctx.tau, ctx.n, group, ctx.degree, sign=1)
    return shifted.eval_times(point).scale(Fraction(1) / denom)


def r1_check_n1(ctx, point):
    """At n = 1, the inverse of the wave hat equals the shifted adjoint hat.

    The left side inverts ``G(s) tau / tau`` as a series at a rational point;
    the right side applies the shift to the adjoint hat ``G^-1(s) tau / tau``
    before evaluating, so the check exercises shift composition, the
    homomorphism property, and series division together.
    """
    if ctx.n != 1:
        raise DimensionError("this identity is exact only in one variable")
    point = {tuple(a): Fraction(v) for a, v in point.items()}
    denom = ctx.tau.eval(point)
    if denom == 0:
        raise PoleError(f"tau vanishes at the evaluation point {point}")
    what_s = miwa_shift(ctx.tau, 1, "s", ctx.degree).eval_times(point).scale(Fraction(1) / denom)
    lhs = series_inverse(what_s, "s")
    numer = miwa_shift_series(miwa_shift(ctx.tau, 1, "s", ctx.degree, sign=1), ctx.degree)
    d_pt = miwa_shift(ctx.tau, 1, "s", ctx.degree).eval_times(point)
    rhs = numer.eval_times(point).mul(series_inverse(d_pt, "s"))
    return LemmaResult(lhs, rhs, lhs == rhs, [])
