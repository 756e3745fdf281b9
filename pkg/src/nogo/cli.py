"""Command-line front end: ``nogo <subcommand> ...``.

Exit status: 0 when the subcommand's expectation holds, 1 when it does not
(or the engine fails), 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from . import ENGINE_VERSION
from .parsing import ParseError, parse_classical, parse_operator, parse_univariate
from .trace import RewriteTrace, final_output, replay

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class Report:
    subcommand: str
    inputs: Dict[str, Any]
    result: Any
    residual: Optional[str] = None
    residual_is_zero: Optional[bool] = None
    passed: bool = True
    latex: List[str] = field(default_factory=list)

    def as_json(self, trace_path: Optional[str]) -> str:
        obj = {
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "result": self.result,
            "residual": self.residual,
            "residual_is_zero": self.residual_is_zero,
            "trace_path": trace_path,
            "engine_version": ENGINE_VERSION,
        }
        return json.dumps(obj, sort_keys=True, indent=2)

    def as_text(self) -> str:
        lines = [f"{self.subcommand}: {'PASS' if self.passed else 'FAIL'}"]
        for k, v in self.inputs.items():
            lines.append(f"  input {k}: {v}")
        lines += _text_block("result", self.result)
        if self.residual is not None:
            lines.append(f"  residual: {self.residual}")
        return "\n".join(lines)

    def as_latex(self) -> str:
        if self.latex:
            return "\n".join(self.latex)
        return _weyl_latex(str(self.result))


def _text_block(label: str, value, indent: str = "  ") -> List[str]:
    if isinstance(value, dict):
        out = [f"{indent}{label}:"]
        for k, v in value.items():
            out += _text_block(k, v, indent + "  ")
        return out
    if isinstance(value, list):
        out = [f"{indent}{label}:"]
        for v in value:
            out.append(f"{indent}  - {v}")
        return out
    return [f"{indent}{label}: {value}"]


def _weyl_latex(text: str) -> str:
    """LaTeX for the scalar-engine print syntax."""
    s = re.sub(r"\b(q|p)h\b", r"\\hat{\1}", text)
    s = re.sub(r"\^(-?\d+)", r"^{\1}", s)
    s = re.sub(r"\b(\d+)/(\d+)\b", r"\\tfrac{\1}{\2}", s)
    return s.replace("*", " ")


# --------------------------------------------------------------------------
# scalar (phase-space) subcommands


def _scheme(text: str):
    from .weyl import OrderingScheme

    try:
        return OrderingScheme.parse(text)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def cmd_poisson(args, trace) -> Report:
    value = parse_classical(args.expr)
    trace.record("classical", args.expr, value)
    passed = True
    residual = None
    if args.expect is not None:
        diff = value - parse_classical(args.expect)
        residual = str(diff)
        passed = diff.is_zero()
    inputs = {"expr": args.expr}
    if args.expect is not None:
        inputs["expect"] = args.expect
    return Report("poisson", inputs, str(value), residual, None if residual is None else passed, passed)


def cmd_order(args, trace) -> Report:
    from .weyl import apply_ordering

    scheme = _scheme(args.scheme)
    value = apply_ordering(parse_classical(args.expr), scheme)
    trace.record("order", args.expr, value, scheme=scheme.value)
    return Report("order", {"expr": args.expr, "scheme": scheme.value}, str(value))


def cmd_quantize(args, trace) -> Report:
    from .weyl import DegreeExceeded, quantize_u2

    f = parse_classical(args.expr)
    try:
        value = quantize_u2(f)
    except DegreeExceeded as exc:
        return Report("quantize", {"expr": args.expr}, f"not defined: {exc}", passed=False)
    trace.record("quantize", args.expr, value)
    return Report("quantize", {"expr": args.expr}, str(value))


def cmd_commutator(args, trace) -> Report:
    text = f"[{args.a}, {args.b}]"
    value = parse_operator(text)
    trace.record("operator", text, value)
    return Report("commutator", {"a": args.a, "b": args.b}, str(value))


def cmd_axioms(args, trace) -> Report:
    from .weyl import QUANTIZATION_TABLE, U2_BASIS, check_homomorphism, format_monomial_qp, ordering_table

    if args.scheme == "u2":
        table = QUANTIZATION_TABLE
    else:
        table = ordering_table(_scheme(args.scheme))
    report = check_homomorphism(table, U2_BASIS)
    pairs = {}
    for c in report.pairs:
        key = f"{{{format_monomial_qp(c.f)}, {format_monomial_qp(c.g)}}}"
        pairs[key] = "ok" if c.passed else f"defect {c.defect}"
    expect = args.expect or ("fail" if args.scheme == "normal" else "pass")
    holds = report.all_passed and report.generators_ok
    result = {
        "unit": report.unit_ok,
        "generators": report.generators_ok,
        "pairs": pairs,
        "failing_pairs": len(report.failures),
        "conditions_hold": holds,
    }
    return Report("axioms", {"scheme": args.scheme, "expect": expect}, result,
                  passed=holds == (expect == "pass"))


def cmd_gvh_witness(args, trace) -> Report:
    from .weyl import OrderingScheme, apply_ordering, gvh_witness

    scheme = _scheme(args.ordering)
    w = gvh_witness(lambda f: apply_ordering(f, scheme))
    residual = w.residual
    is_constant = residual.is_scalar() and not residual.is_zero()
    # the Weyl extension must fail by a multiple of the identity; any other
    # ordering only has to disagree
    passed = w.classical_residual.is_zero() and not residual.is_zero()
    if scheme is OrderingScheme.WEYL_SYMMETRIC:
        passed = passed and is_constant
    result = {
        "classical_lhs": str(w.classical_lhs),
        "classical_rhs": str(w.classical_rhs),
        "classical_residual": str(w.classical_residual),
        "quantum_lhs": str(w.lhs),
        "quantum_rhs": str(w.rhs),
        "constant": str(w.constant) if is_constant else None,
    }
    latex = [
        r"\tfrac{1}{9}\{q^{3},p^{3}\} - \tfrac{1}{3}\{q^{2}p,qp^{2}\} = " + _weyl_latex(str(w.classical_residual)),
        r"\tfrac{1}{9i}[\hat{q}^{3},\hat{p}^{3}] - \tfrac{1}{3i}[\widehat{q^{2}p},\widehat{qp^{2}}] = "
        + _weyl_latex(str(residual)),
    ]
    return Report("gvh-witness", {"ordering": scheme.value}, result, str(residual),
                  residual.is_zero(), passed, latex)


def cmd_prescription(args, trace) -> Report:
    from .weyl import operator_action, prescription_action

    scheme = _scheme(args.scheme)
    h = parse_classical(args.hamiltonian)
    test = parse_univariate(args.test, "q")
    kernel = prescription_action(scheme, h, test)
    operator = operator_action(scheme, h, test)
    diff = kernel - operator
    result = {"kernel_action": str(kernel), "operator_action": str(operator)}
    inputs = {"hamiltonian": args.hamiltonian, "test": args.test, "scheme": scheme.value}
    return Report("prescription", inputs, result, str(diff), diff.is_zero(), diff.is_zero())


# --------------------------------------------------------------------------
# tensor subcommands


def _decls(args):
    from .tensor.parse import Declarations

    decls = Declarations()
    for line in args.decl or []:
        for part in line.split(";"):
            if part.strip():
                decls.parse_line(part.strip())
    return decls


def _tensor(text: str, decls):
    from .tensor.parse import parse_tensor

    return parse_tensor(text, decls)


def _expr_report(name, inputs, value, residual=None, passed=True) -> Report:
    from .tensor.printing import latex_expr

    latex = [latex_expr(value)]
    res_text = None
    res_zero = None
    if residual is not None:
        res_text, res_zero = str(residual), residual.is_zero()
        if residual is not value:
            latex.append(latex_expr(residual))
    return Report(name, inputs, str(value), res_text, res_zero, passed, latex)


def cmd_canonicalize(args, trace) -> Report:
    from .tensor.canonical import canonicalize

    trace.decls = _decls(args)
    e = _tensor(args.expr, trace.decls)
    value = canonicalize(e, dim=args.dim, flat_commuting=args.flat_commute, trace=trace)
    return _expr_report("canonicalize", {"expr": args.expr}, value)


def cmd_generalize(args, trace) -> Report:
    from .tensor.canonical import canonicalize
    from .tensor.generalize import generalize

    trace.decls = _decls(args)
    e = canonicalize(_tensor(args.expr, trace.decls), flat_commuting=True, trace=trace)
    return _expr_report("generalize", {"expr": args.expr}, generalize(e, trace=trace))


def cmd_commute(args, trace) -> Report:
    from .tensor.derivatives import curved_commute

    trace.decls = _decls(args)
    e = _tensor(args.expr, trace.decls)
    value = curved_commute(e, args.term, args.factor, args.prefix, trace=trace)
    inputs = {"expr": args.expr, "term": args.term, "factor": args.factor, "prefix": args.prefix}
    return _expr_report("commute", inputs, value)


def cmd_wellposed(args, trace) -> Report:
    from .tensor.witnesses import wellposedness_check

    trace.decls = _decls(args)
    a, b = _tensor(args.a, trace.decls), _tensor(args.b, trace.decls)
    rep = wellposedness_check(a, b, dim=args.dim, trace=trace)
    result = {
        "flat_equal": rep.flat_equal,
        "image_a": str(rep.image_a),
        "image_b": str(rep.image_b),
        "consistent": rep.consistent,
    }
    passed = True
    if args.expect == "zero":
        passed = rep.curved_residual.is_zero()
    elif args.expect == "nonzero":
        passed = not rep.curved_residual.is_zero()
    out = _expr_report("wellposed", {"a": args.a, "b": args.b}, rep.curved_residual, rep.curved_residual, passed)
    out.result = result
    return out


def _oracle_values(e, metric_names, seed) -> Dict[str, str]:
    """'zero' / 'nonzero' for ``e`` evaluated on each named sample metric."""
    from .oracle import evaluate_abstract, random_bindings, sample_metrics

    metrics = sample_metrics()
    out = {}
    for name in metric_names:
        g = metrics[name]
        rng = random.Random(seed)
        value = evaluate_abstract(e, random_bindings(e, g, rng), g)
        out[name] = "zero" if value.is_zero() else "nonzero"
    return out


def cmd_gr_witness(args, trace) -> Report:
    from .tensor.canonical import expr_equal
    from .tensor.witnesses import gr_witness, gr_witness_expected

    rep = gr_witness(trace=trace)
    matches = expr_equal(rep.curved_residual, gr_witness_expected())
    oracle = _oracle_values(rep.curved_residual, ["block4", "minkowski4"], args.seed)
    passed = rep.flat_equal and matches and oracle == {"block4": "nonzero", "minkowski4": "zero"}
    result = {
        "flat_equal": rep.flat_equal,
        "residual_matches": str(gr_witness_expected()),
        "matches": matches,
        "oracle": oracle,
    }
    out = _expr_report("gr-witness", {}, rep.curved_residual, rep.curved_residual, passed)
    out.result = result
    return out


def cmd_symmetric_check(args, trace) -> Report:
    from .tensor.witnesses import residual_coefficient, symmetric_map_check, symmetric_map_expected

    rep = symmetric_map_check(trace=trace)
    coeff = residual_coefficient(rep.residual, symmetric_map_expected())
    oracle = _oracle_values(rep.residual, ["block4"], args.seed)
    passed = coeff is not None and abs(coeff) == 1 and oracle["block4"] == "nonzero"
    result = {
        "image": str(rep.image),
        "image_symmetric": rep.image_symmetric,
        "multiple_of": str(symmetric_map_expected()),
        "coefficient": None if coeff is None else str(coeff),
        "scalar_residual": str(rep.scalar_residual),
        "oracle": oracle,
    }
    out = _expr_report("symmetric-check", {}, rep.residual, rep.residual, passed)
    out.result = result
    return out


def cmd_lorentz_check(args, trace) -> Report:
    from .tensor.canonical import expr_equal
    from .tensor.derivatives import derivative_normal_form
    from .tensor.expr import CURVED, FLAT
    from .tensor.witnesses import lorentz_expected, lorentz_gauge_contradiction

    conn = FLAT if args.flat else CURVED
    rep = lorentz_gauge_contradiction(conn, trace=trace)
    result: Dict[str, Any] = {"connection": conn, "steps": [f"{label}: {e}" for label, e in rep.steps]}
    if conn == CURVED:
        matches = expr_equal(rep.residual, derivative_normal_form(lorentz_expected()))
        oracle = _oracle_values(rep.residual, ["block4", "bump2"], args.seed)
        result["leading_term"] = str(lorentz_expected())
        result["matches"] = matches
        result["oracle"] = oracle
        passed = matches and not rep.residual.is_zero() and "nonzero" in oracle.values()
    else:
        passed = rep.residual.is_zero()
    out = _expr_report("lorentz-check", {"connection": conn}, rep.residual, rep.residual, passed)
    out.result = result
    return out


def cmd_flat_conservation(args, trace) -> Report:
    from .tensor.witnesses import flat_divergence_of_divergence, relabeling_derivation

    symbol = "S" if args.control else "F"
    residual = flat_divergence_of_divergence(symbol, trace=trace)
    passed = (not residual.is_zero()) if args.control else residual.is_zero()
    result: Dict[str, Any] = {"field": symbol, "symmetry": "symmetric" if args.control else "antisymmetric"}
    if args.relabel and not args.control:
        d = relabeling_derivation()
        result["derivation"] = [
            f"X = {d.x}",
            f"relabel a<->b, antisymmetry: X = {d.relabeled}",
            f"X + Y without commuting: {d.x_plus_y}",
            f"X - Y after commuting flat derivatives: {d.commuted_difference}",
            f"X = {d.conclusion}",
        ]
    out = _expr_report("flat-conservation", {"control": args.control}, residual, residual, passed)
    out.result = result
    return out


# --------------------------------------------------------------------------
# corpus and oracle


def cmd_corpus(args, trace) -> Report:
    from .corpus import run_corpus

    path = args.path
    if args.action not in ("run", "list"):
        # ``nogo corpus PATH`` is shorthand for ``nogo corpus run PATH``
        path, args.action = args.action, "run"
    t0 = time.perf_counter()
    if args.action == "list":
        from .corpus import corpus_examples

        entries = corpus_examples(path)
        return Report("corpus", {"path": path}, [f"{e['file']}::{e['name']} ({e['op']})" for e in entries])
    results = run_corpus(path)
    entries = {}
    for r in results:
        key = f"{Path(r.entry.source).name}::{r.entry.name}"
        if r.passed:
            entries[key] = "pass"
        else:
            entries[key] = "FAIL " + (r.detail or f"residual {r.residual}")
    failed = sum(not r.passed for r in results)
    result = {"entries": entries, "total": len(results), "failed": failed}
    if not args.deterministic:
        result["seconds"] = round(time.perf_counter() - t0, 3)
    return Report("corpus", {"path": path}, result, passed=failed == 0 and bool(results))


def cmd_oracle(args, trace) -> Report:
    from .oracle import convention_checks, parse_manifest, ricci_scalar, sample_metrics

    if args.manifest:
        with open(args.manifest, encoding="utf-8") as fh:
            metrics = parse_manifest(fh.read())
    else:
        metrics = sample_metrics()
    if args.metric:
        if args.metric not in metrics:
            raise ParseError(f"unknown metric {args.metric!r}; known: {', '.join(metrics)}")
        metrics = {args.metric: metrics[args.metric]}
    result: Dict[str, Any] = {}
    passed = True
    for name, g in metrics.items():
        if args.eval:
            from .oracle import evaluate_abstract, random_bindings

            e = _tensor(args.eval, _decls(args))
            value = evaluate_abstract(e, random_bindings(e, g, random.Random(args.seed)), g)
            result[name] = {"value": str(value).splitlines(), "zero": value.is_zero()}
            continue
        checks = convention_checks(g, args.seed)
        passed = passed and all(checks.values())
        entry: Dict[str, Any] = {k: "ok" if v else "FAIL" for k, v in checks.items()}
        entry["ricci_scalar"] = str(ricci_scalar(g)[()])
        result[name] = entry
    inputs = {"manifest": args.manifest, "metric": args.metric}
    if args.eval:
        inputs["eval"] = args.eval
    return Report("oracle", inputs, result, passed=passed)


# --------------------------------------------------------------------------
# argument parsing


COMMANDS: Dict[str, Callable] = {
    "poisson": cmd_poisson,
    "order": cmd_order,
    "quantize": cmd_quantize,
    "commutator": cmd_commutator,
    "axioms": cmd_axioms,
    "gvh-witness": cmd_gvh_witness,
    "prescription": cmd_prescription,
    "canonicalize": cmd_canonicalize,
    "generalize": cmd_generalize,
    "commute": cmd_commute,
    "wellposed": cmd_wellposed,
    "gr-witness": cmd_gr_witness,
    "symmetric-check": cmd_symmetric_check,
    "lorentz-check": cmd_lorentz_check,
    "flat-conservation": cmd_flat_conservation,
    "corpus": cmd_corpus,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "latex"), default=argparse.SUPPRESS)
    common.add_argument("--trace", metavar="PATH", default=argparse.SUPPRESS,
                        help="write a rewrite-trace certificate")
    common.add_argument("--decl", action="append", metavar="DECL", default=argparse.SUPPRESS,
                        help="symmetry declaration, e.g. 'antisym F {1 2}' (repeatable)")
    common.add_argument("--color", action="store_true", default=argparse.SUPPRESS,
                        help="colour the PASS/FAIL status in text output")

    parser = argparse.ArgumentParser(
        prog="nogo",
        description="Exact checks of phase-space quantization and minimal-substitution maps.",
        parents=[common],
    )
    parser.add_argument("--replay", metavar="CERT", help="re-run a trace certificate and compare every step")
    parser.add_argument("--version", action="version", version=f"nogo {ENGINE_VERSION}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common], description=help_text)

    p = add("poisson", "evaluate a classical expression with Poisson brackets {f, g}")
    p.add_argument("expr")
    p.add_argument("--expect", help="fail unless the value equals this expression")

    p = add("order", "operator ordering of a classical polynomial")
    p.add_argument("expr")
    p.add_argument("--scheme", default="weyl", help="weyl (symmetric) or normal (p to the left)")

    p = add("quantize", "the forced quantization of a polynomial of degree <= 2")
    p.add_argument("expr")

    p = add("commutator", "commutator [a, b] of two operator expressions")
    p.add_argument("a")
    p.add_argument("b")

    p = add("axioms", "check the quantization conditions on {1, q, p, q^2, p^2, qp}")
    p.add_argument("--scheme", choices=("u2", "weyl", "normal"), default="u2")
    p.add_argument("--expect", choices=("pass", "fail"),
                   help="expected outcome (default: fail for normal, pass otherwise)")

    p = add("gvh-witness", "the degree-3 obstruction: two classically equal expressions for q^2 p^2")
    p.add_argument("--ordering", default="weyl")

    p = add("prescription", "compare a kernel prescription with the ordered operator on a test function")
    p.add_argument("hamiltonian")
    p.add_argument("test", help="polynomial in q")
    p.add_argument("--scheme", default="mid", help="mid (Weyl) or right (normal)")

    p = add("canonicalize", "canonical form of a tensor expression")
    p.add_argument("expr")
    p.add_argument("--flat-commute", action="store_true", help="let flat derivatives commute")
    p.add_argument("--dim", type=int, default=4)

    p = add("generalize", "curved image of a flat tensor expression")
    p.add_argument("expr")

    p = add("commute", "swap two adjacent curved derivatives, adding the curvature term")
    p.add_argument("expr")
    p.add_argument("--term", type=int, default=0)
    p.add_argument("--factor", type=int, default=0)
    p.add_argument("--prefix", type=int, default=0, help="position of the outer derivative of the pair")

    p = add("wellposed", "compare the curved images of two flat expressions")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--expect", choices=("zero", "nonzero"), help="expected curved residual")

    for name, text in (
        ("gr-witness", "the order-3 obstruction on D_a D_b T^c"),
        ("symmetric-check", "the symmetrized derivative map on D_a D_b T^c"),
    ):
        p = add(name, text)
        p.add_argument("--seed", type=int, default=0, help="seed for oracle test fields")

    p = add("lorentz-check", "divergence of the current in Lorentz gauge")
    p.add_argument("--flat", action="store_true", help="run the flat-spacetime version")
    p.add_argument("--seed", type=int, default=0)

    p = add("flat-conservation", "D^b D^a F_ab in flat spacetime")
    p.add_argument("--control", action="store_true", help="use a symmetric field (must not vanish)")
    p.add_argument("--relabel", action="store_true", help="show the relabeling argument")

    p = add("corpus", "run or list golden example files")
    p.add_argument("action", nargs="?", default="run", help="run (default), list, or a path")
    p.add_argument("path", nargs="?", help="corpus file or directory (default: bundled)")
    p.add_argument("--deterministic", action="store_true", help="omit timings from the report")

    p = add("oracle", "component-level convention checks on sample metrics")
    p.add_argument("--manifest", help="metric manifest file (default: bundled)")
    p.add_argument("--metric", help="restrict to one metric")
    p.add_argument("--eval", metavar="EXPR", help="evaluate a tensor expression with random fields instead")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _emit(report: Report, fmt: str, trace_path: Optional[str], color: bool) -> None:
    if fmt == "json":
        print(report.as_json(trace_path))
    elif fmt == "latex":
        print(report.as_latex())
    else:
        text = report.as_text()
        if color:
            code = "32" if report.passed else "31"
            head, _, rest = text.partition("\n")
            text = f"\033[{code}m{head}\033[0m" + ("\n" + rest if rest else "")
        print(text)


def _run_replay(path: str) -> Report:
    trace = RewriteTrace.read(path)
    res = replay(trace)
    result = {
        "steps": res.checked,
        "mismatches": [f"step {n} {op}: expected {exp} got {got}" for n, op, exp, got in res.failures],
        "final": final_output(trace),
    }
    return Report("replay", {"certificate": path}, result, passed=res.ok)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = getattr(args, "format", "text")
    trace_path = getattr(args, "trace", None)
    color = getattr(args, "color", False)
    args.decl = getattr(args, "decl", [])
    if args.replay is None and args.subcommand is None:
        parser.print_usage(sys.stderr)
        print("nogo: error: a subcommand or --replay is required", file=sys.stderr)
        return EXIT_USAGE
    trace = RewriteTrace()
    try:
        if args.replay is not None:
            report = _run_replay(args.replay)
        else:
            report = COMMANDS[args.subcommand](args, trace)
    except ParseError as exc:
        print(f"nogo: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nogo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # engine failure: report and exit 1
        print(f"nogo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if trace_path is not None and args.replay is None:
        trace.write(trace_path)
    _emit(report, fmt, trace_path, color)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
