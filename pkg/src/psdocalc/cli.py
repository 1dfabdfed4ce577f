"""Command-line surface: one subcommand per engine operation.

Exit codes: 0 on success (or a check that holds), 1 when a checker verified
an inequality (it found a witness or a discrepancy report), 2 on usage,
syntax, or window/truncation errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import multiindex as mi
from .diffpoly import DiffPoly, TimePolynomial
from .errors import ParseError, PsdoCalcError
from .exprparse import EvalContext, parse_value
from .hierarchy import (
    dress,
    extract_pdes,
    lax_check,
    reduce_system,
    w4_rules,
    zero_jet_substitutions,
    zs_check,
)
from .psdop import PsdOp, commutator, power_multi
from .tau import (
    TauContext,
    dk_annihilation_check,
    kernel_vs_geometric,
    lemma41_check,
    lemma42_check,
    miwa_shift,
    r1_check_n1,
    wavehat_from_tau,
)
from .wave import LaurentSeries, bilinear_check, pair_residue_check, res_z

SCHEMA_VERSION = 1


def _parse_window(text, n):
    parts = text.split(",")
    if len(parts) != n:
        raise PsdoCalcError(f"--window needs {n} comma-separated entries")
    out = []
    for p in parts:
        p = p.strip()
        out.append(None if p in ("e", "exact", "*") else int(p))
    return tuple(out)


def _parse_index(text, n):
    try:
        v = parse_value(text, EvalContext(n=n))
    except PsdoCalcError:
        v = None
    if isinstance(v, TimePolynomial) and len(v.terms) == 1:
        ((mono, c),) = v.terms.items()
        if c == 1 and len(mono) == 1 and mono[0][1] == 1:
            return mono[0][0]
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise PsdoCalcError(f"cannot read {text!r} as a time index (use t[i,j] or i,j)")


def _parse_assignments(texts, n):
    point = {}
    for chunk in texts:
        for item in chunk.split(";"):
            if not item.strip():
                continue
            lhs, _, rhs = item.partition("=")
            if not rhs:
                raise PsdoCalcError(f"assignment {item!r} must look like t[..]=value")
            idx = _parse_index(lhs.strip(), n)
            val = parse_value(rhs.strip(), EvalContext(n=n))
            if not isinstance(val, Fraction):
                raise PsdoCalcError(f"assignment value {rhs!r} must be rational")
            point[idx] = val
    return point


class Session:
    def __init__(self, args):
        self.n = args.n
        self.fmt = args.format
        self.window = _parse_window(args.window, args.n) if args.window else None
        self.degree = args.deg
        self.alphabet = tuple(s.strip() for s in args.symbols.split(",")) if args.symbols else None
        defs = {}
        ctx0 = EvalContext(n=self.n, window=self.window, degree=self.degree, alphabet=None)
        for d in args.define or []:
            name, _, body = d.partition("=")
            if not body:
                raise PsdoCalcError(f"--def {d!r} must look like name=expression")
            defs[name.strip()] = parse_value(body, ctx0._replace(definitions=dict(defs)))
        self.defs = defs

    def ctx(self):
        return EvalContext(
            n=self.n,
            window=self.window,
            degree=self.degree,
            definitions=self.defs,
            alphabet=self.alphabet,
        )

    def value(self, text):
        return parse_value(text, self.ctx())

    def operator(self, text):
        v = self.value(text)
        if isinstance(v, (Fraction, DiffPoly)):
            v = PsdOp(self.n, {mi.zero(self.n): v if isinstance(v, DiffPoly) else DiffPoly.constant(v)})
        if not isinstance(v, PsdOp):
            raise PsdoCalcError(f"expected an operator expression, got {type(v).__name__}")
        return v

    def series(self, text):
        v = self.value(text)
        if isinstance(v, (Fraction, DiffPoly, TimePolynomial)):
            v = LaurentSeries.constant(self.n, v)
        if not isinstance(v, LaurentSeries):
            raise PsdoCalcError(f"expected a series expression, got {type(v).__name__}")
        return v

    def timepoly(self, text):
        v = self.value(text)
        if isinstance(v, Fraction):
            v = TimePolynomial.constant(v)
        if not isinstance(v, TimePolynomial):
            raise PsdoCalcError(f"expected a time polynomial, got {type(v).__name__}")
        return v

    def emit(self, command, payload, text_lines, code=0):
        if self.fmt == "json":
            doc = {
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "n": self.n,
                "window": list(self.window) if self.window else None,
                "deg": self.degree,
                "result": payload,
            }
            print(json.dumps(doc, indent=2, default=str))
        else:
            for line in text_lines:
                print(line)
        return code


def _obj(v):
    if isinstance(v, (PsdOp, LaurentSeries)):
        out = v.to_obj()
        out["text"] = str(v)
        return out
    return {"text": str(v)}


def _witness_obj(w):
    if w is None:
        return None
    return {
        "component": w.component,
        "exponent": list(w.exponent),
        "lhs": str(w.lhs),
        "rhs": str(w.rhs),
    }


# -- handlers ----------------------------------------------------------------


def cmd_mul(s, args):
    r = s.operator(args.lhs).mul(s.operator(args.rhs), window=s.window)
    return s.emit("mul", _obj(r), [str(r)])


def cmd_adjoint(s, args):
    op = s.operator(args.expr)
    if s.window is not None:
        op = PsdOp(op.n, op.terms, s.window)
    r = op.adjoint()
    return s.emit("adjoint", _obj(r), [str(r)])


def cmd_res_d(s, args):
    r = s.operator(args.expr).res_partial()
    return s.emit("res-d", _obj(r), [str(r)])


def cmd_res_z(s, args):
    r = res_z(s.series(args.expr))
    return s.emit("res-z", _obj(r), [str(r)])


def cmd_split(s, args):
    plus, minus = s.operator(args.expr).split()
    return s.emit(
        "split",
        {"plus": _obj(plus), "minus": _obj(minus)},
        [f"plus : {plus}", f"minus: {minus}"],
    )


def cmd_inverse(s, args):
    r = s.operator(args.expr).inverse(window=s.window)
    return s.emit("inverse", _obj(r), [str(r)])


def cmd_power(s, args):
    alpha = _parse_index(args.alpha, s.n)
    comps = tuple(s.operator(e) for e in args.components)
    r = power_multi(comps, alpha, window=s.window)
    return s.emit("power", _obj(r), [str(r)])


def cmd_commutator(s, args):
    r = commutator(s.operator(args.lhs), s.operator(args.rhs), window=s.window)
    return s.emit("commutator", _obj(r), [str(r)])


def cmd_dress(s, args):
    lax = dress(s.operator(args.phi), window=s.window)
    lines = [f"L{i + 1} = {c}" for i, c in enumerate(lax.components)]
    return s.emit("dress", {"components": [_obj(c) for c in lax.components]}, lines)


def cmd_w4_rules(s, args):
    alpha = _parse_index(args.alpha, s.n)
    rules = w4_rules(s.operator(args.phi), alpha, window=s.window)
    tname = "t[" + ",".join(map(str, alpha)) + "]"
    lines = [f"d/d{tname} {sym} = {poly}" for (sym, _), poly in sorted(rules.mapping.items())]
    for (a, e), c in sorted(rules.unmatched.items()):
        lines.append(f"unmatched at exponent {e}: {c}")
    payload = {
        "rules": {sym: str(poly) for (sym, _), poly in rules.mapping.items()},
        "unmatched": [{"exponent": list(e), "coefficient": str(c)} for (_, e), c in rules.unmatched.items()],
    }
    return s.emit("w4-rules", payload, lines)


def cmd_lax_check(s, args):
    alpha = _parse_index(args.alpha, s.n)
    r = lax_check(s.operator(args.phi), alpha, window=s.window)
    lines = [f"lax-check alpha={alpha}: {'PASS' if r.ok else 'FAIL'}"]
    if not r.ok:
        w = r.witness
        lines.append(f"witness: component {w.component}, exponent {w.exponent}")
        lines.append(f"  lhs = {w.lhs}")
        lines.append(f"  rhs = {w.rhs}")
    return s.emit("lax-check", {"ok": r.ok, "witness": _witness_obj(r.witness)}, lines, 0 if r.ok else 1)


def cmd_zs_check(s, args):
    alpha = _parse_index(args.alpha, s.n)
    beta = _parse_index(args.beta, s.n)
    r = zs_check(s.operator(args.phi), alpha, beta, window=s.window)
    lines = [f"zs-check alpha={alpha} beta={beta}: {'PASS' if r.ok else 'FAIL'}"]
    if not r.ok:
        w = r.witness
        lines.append(f"witness at exponent {w.exponent}: lhs = {w.lhs}, rhs = {w.rhs}")
    return s.emit("zs-check", {"ok": r.ok, "witness": _witness_obj(r.witness)}, lines, 0 if r.ok else 1)


def _extract(s, args):
    a = s.operator(args.la)
    b = s.operator(args.lb)
    ta = _parse_index(args.ta, s.n)
    tb = _parse_index(args.tb, s.n)
    return extract_pdes(a, b, ta, tb, window=s.window)


def cmd_extract_pdes(s, args):
    system = _extract(s, args)
    return s.emit("extract-pdes", system.to_obj(), [system.table()])


def cmd_reduce(s, args):
    system = _extract(s, args)
    subs = {}
    if args.zero_jets:
        direction = _parse_index(args.zero_dir, s.n) if args.zero_dir else mi.unit(s.n, min(1, s.n - 1))
        symbols = {t.strip() for t in args.zero_jets.split(",")}
        subs.update(zero_jet_substitutions(system, symbols, direction))
    for sub in args.sub or []:
        lhs, _, rhs = sub.partition("=")
        jv = s.value(lhs.strip())
        if not isinstance(jv, DiffPoly) or len(jv.terms) != 1:
            raise PsdoCalcError(f"substitution target {lhs!r} must be a single jet")
        ((mono, c),) = jv.terms.items()
        if c != 1 or len(mono) != 1 or mono[0][1] != 1:
            raise PsdoCalcError(f"substitution target {lhs!r} must be a single jet")
        val = s.value(rhs.strip())
        if isinstance(val, Fraction):
            val = DiffPoly.constant(val)
        subs[mono[0][0]] = val
    reduced = reduce_system(system, subs)
    return s.emit("reduce", reduced.to_obj(), [reduced.table()])


def cmd_pair_residue(s, args):
    r = pair_residue_check(s.operator(args.psi), s.operator(args.eta))
    lines = [
        f"lhs = {r.lhs}",
        f"rhs = {r.rhs}",
        f"pair-residue: {'EQUAL' if r.equal else 'DIFFER'}",
    ]
    payload = {"lhs": str(r.lhs), "rhs": str(r.rhs), "equal": r.equal}
    return s.emit("pair-residue", payload, lines, 0 if r.equal else 1)


def cmd_bilinear(s, args):
    phi = s.operator(args.phi)
    rules = None
    alpha = None
    if args.order > 0:
        alpha = _parse_index(args.alpha, s.n)
        rules = w4_rules(phi, alpha, window=s.window).mapping
    r = bilinear_check(phi, alpha=alpha, order=args.order, rules=rules, window=s.window)
    lines = [f"bilinear order {args.order}: {'PASS' if r.ok else 'FAIL'}"]
    if not r.ok:
        lines.append(f"residue: {r.residue}")
    payload = {"ok": r.ok, "residue": str(r.residue)}
    return s.emit("bilinear", payload, lines, 0 if r.ok else 1)


def cmd_miwa(s, args):
    p = s.timepoly(args.tau)
    sign = -1 if args.sign == "-" else 1
    r = miwa_shift(p, s.n, args.group, s.degree, sign=sign)
    return s.emit("miwa", _obj(r), [str(r)])


def cmd_lemma41(s, args):
    eta = s.series(args.eta)
    r = lemma41_check(eta, s.degree, mode=args.mode)
    lines = [f"lhs = {r.lhs}", f"rhs = {r.rhs}", f"lemma41 [{args.mode}]: {'EQUAL' if r.equal else 'DIFFER'}"]
    for key, c in r.discrepancies:
        lines.append(f"  discrepancy at {key}: {c}")
    payload = {
        "lhs": str(r.lhs),
        "rhs": str(r.rhs),
        "equal": r.equal,
        "discrepancies": [{"exponents": [list(e) for e in k], "coefficient": str(c)} for k, c in r.discrepancies],
    }
    return s.emit("lemma41", payload, lines, 0 if r.equal else 1)


def cmd_lemma42(s, args):
    eta = s.series(args.eta)
    r = lemma42_check(eta, s.degree, mode=args.mode)
    lines = [f"lemma42 [{args.mode}]: {'EQUAL' if r.equal else 'DIFFER'}"]
    for key, c in r.discrepancies[:20]:
        lines.append(f"  discrepancy at {key}: {c}")
    payload = {
        "equal": r.equal,
        "discrepancies": [{"exponents": [list(e) for e in k], "coefficient": str(c)} for k, c in r.discrepancies],
    }
    return s.emit("lemma42", payload, lines, 0 if r.equal else 1)


def cmd_kernel_diff(s, args):
    r = kernel_vs_geometric(s.n, s.degree)
    lines = [f"kernel vs geometric log, degree {s.degree}: {'EQUAL' if r.equal else 'DIFFER'}"]
    if not r.equal:
        key, log_c, ker_c = r.first_mismatch
        lines.append(f"first mismatch at {key}: log side {log_c}, kernel side {ker_c}")
    payload = {
        "equal": r.equal,
        "first_mismatch": None
        if r.equal
        else {
            "exponents": [list(e) for e in r.first_mismatch[0]],
            "log_side": str(r.first_mismatch[1]),
            "kernel_side": str(r.first_mismatch[2]),
        },
        "mismatch_count": len(r.mismatches),
    }
    return s.emit("kernel-diff", payload, lines, 0 if r.equal else 1)


def _tau_context(s, tau):
    active = tuple(sorted(tau.variables()))
    return TauContext(s.n, active, s.degree, tau)


def cmd_dk_check(s, args):
    ctx = _tau_context(s, s.timepoly(args.tau))
    r = dk_annihilation_check(ctx, args.k - 1)
    lines = [f"dk-check k={args.k}: {'PASS' if r.ok else 'FAIL'}"]
    if not r.ok:
        lines.append(f"witness: {r.witness}")
    return s.emit("dk-check", {"ok": r.ok, "witness": str(r.witness)}, lines, 0 if r.ok else 1)


def cmd_tau_what(s, args):
    ctx = _tau_context(s, s.timepoly(args.tau))
    point = _parse_assignments(args.at, s.n)
    r = wavehat_from_tau(ctx, point)
    return s.emit("tau-what", _obj(r), [str(r)])


def cmd_r1_check(s, args):
    ctx = _tau_context(s, s.timepoly(args.tau))
    point = _parse_assignments(args.at, s.n)
    r = r1_check_n1(ctx, point)
    lines = [f"r1-check: {'EQUAL' if r.equal else 'DIFFER'}", f"lhs = {r.lhs}", f"rhs = {r.rhs}"]
    payload = {"equal": r.equal, "lhs": str(r.lhs), "rhs": str(r.rhs)}
    return s.emit("r1-check", payload, lines, 0 if r.equal else 1)


def _add_globals(p, suppress):
    sup = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--n", type=int, help="number of variables (default 1)",
                   **(sup or {"default": 1}))
    p.add_argument("--window", help="default lower window, e.g. '-3,-3' ('exact' entries allowed)",
                   **(sup or {"default": None}))
    p.add_argument("--deg", type=int,
                   help="total-degree budget for series expansions (env PSDOCALC_DEFAULT_DEG)",
                   **(sup or {"default": int(os.environ.get("PSDOCALC_DEFAULT_DEG", "6"))}))
    p.add_argument("--format", choices=("text", "json"), **(sup or {"default": "text"}))
    p.add_argument("--symbols", help="comma-separated symbol alphabet (default: any)",
                   **(sup or {"default": None}))
    p.add_argument("--def", dest="define", action="append", metavar="NAME=EXPR",
                   help="define a named operator or series (repeatable)",
                   **(sup or {"default": None}))


def _sub_parser(sub, name):
    sp = sub.add_parser(name)
    _add_globals(sp, suppress=True)
    return sp


def build_parser():
    p = argparse.ArgumentParser(
        prog="psdocalc",
        description="Symbolic calculus for multivariate pseudodifferential operators.",
    )
    _add_globals(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    sp = _sub_parser(sub, "mul"); sp.add_argument("lhs"); sp.add_argument("rhs"); sp.set_defaults(fn=cmd_mul)
    sp = _sub_parser(sub, "adjoint"); sp.add_argument("expr"); sp.set_defaults(fn=cmd_adjoint)
    sp = _sub_parser(sub, "res-d"); sp.add_argument("expr"); sp.set_defaults(fn=cmd_res_d)
    sp = _sub_parser(sub, "res-z"); sp.add_argument("expr"); sp.set_defaults(fn=cmd_res_z)
    sp = _sub_parser(sub, "split"); sp.add_argument("expr"); sp.set_defaults(fn=cmd_split)
    sp = _sub_parser(sub, "inverse"); sp.add_argument("expr"); sp.set_defaults(fn=cmd_inverse)
    sp = _sub_parser(sub, "power"); sp.add_argument("--alpha", required=True); sp.add_argument("components", nargs="+"); sp.set_defaults(fn=cmd_power)
    sp = _sub_parser(sub, "commutator"); sp.add_argument("lhs"); sp.add_argument("rhs"); sp.set_defaults(fn=cmd_commutator)
    sp = _sub_parser(sub, "dress"); sp.add_argument("phi"); sp.set_defaults(fn=cmd_dress)
    sp = _sub_parser(sub, "w4-rules"); sp.add_argument("--alpha", required=True); sp.add_argument("phi"); sp.set_defaults(fn=cmd_w4_rules)
    sp = _sub_parser(sub, "lax-check"); sp.add_argument("--alpha", required=True); sp.add_argument("phi"); sp.set_defaults(fn=cmd_lax_check)
    sp = _sub_parser(sub, "zs-check"); sp.add_argument("--alpha", required=True); sp.add_argument("--beta", required=True); sp.add_argument("phi"); sp.set_defaults(fn=cmd_zs_check)
    sp = _sub_parser(sub, "extract-pdes")
    for flag in ("--la", "--lb", "--ta", "--tb"):
        sp.add_argument(flag, required=True)
    sp.set_defaults(fn=cmd_extract_pdes)
    sp = _sub_parser(sub, "reduce")
    for flag in ("--la", "--lb", "--ta", "--tb"):
        sp.add_argument(flag, required=True)
    sp.add_argument("--sub", action="append", metavar="JET=EXPR")
    sp.add_argument("--zero-jets", help="comma-separated symbols whose jets along --zero-dir vanish")
    sp.add_argument("--zero-dir", help="direction for --zero-jets (default e2)")
    sp.set_defaults(fn=cmd_reduce)
    sp = _sub_parser(sub, "pair-residue"); sp.add_argument("psi"); sp.add_argument("eta"); sp.set_defaults(fn=cmd_pair_residue)
    sp = _sub_parser(sub, "bilinear"); sp.add_argument("--alpha"); sp.add_argument("--order", type=int, default=0); sp.add_argument("phi"); sp.set_defaults(fn=cmd_bilinear)
    sp = _sub_parser(sub, "miwa"); sp.add_argument("--tau", required=True); sp.add_argument("--group", choices=("s", "z"), default="s"); sp.add_argument("--sign", choices=("+", "-"), default="-"); sp.set_defaults(fn=cmd_miwa)
    sp = _sub_parser(sub, "lemma41"); sp.add_argument("--eta", required=True); sp.add_argument("--mode", choices=("exact", "paper"), default="exact"); sp.set_defaults(fn=cmd_lemma41)
    sp = _sub_parser(sub, "lemma42"); sp.add_argument("--eta", required=True); sp.add_argument("--mode", choices=("constrained", "paper"), default="constrained"); sp.set_defaults(fn=cmd_lemma42)
    sp = _sub_parser(sub, "kernel-diff"); sp.set_defaults(fn=cmd_kernel_diff)
    sp = _sub_parser(sub, "dk-check"); sp.add_argument("--tau", required=True); sp.add_argument("--k", type=int, default=1); sp.set_defaults(fn=cmd_dk_check)
    sp = _sub_parser(sub, "tau-what"); sp.add_argument("--tau", required=True); sp.add_argument("--at", action="append", default=[], metavar="T=VALUE"); sp.set_defaults(fn=cmd_tau_what)
    sp = _sub_parser(sub, "r1-check"); sp.add_argument("--tau", required=True); sp.add_argument("--at", action="append", default=[], metavar="T=VALUE"); sp.set_defaults(fn=cmd_r1_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        session = Session(args)
        return args.fn(session, args)
    except ParseError as e:
        print(f"syntax error: {e}", file=sys.stderr)
        return 2
    except (PsdoCalcError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
