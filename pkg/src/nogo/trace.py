"""Rewrite traces: a replayable, line-oriented record of engine steps.

Certificate layout::

    # nogo rewrite trace v1
    decl antisym F {1 2}
    step 1 canonicalize
    args {"dim": 4, "flat_commuting": false}
    in D[eta,b] F_{a b}
    out ...

Each ``in``/``out`` is the printed expression; replaying parses ``in``,
re-runs the operation and compares the printed result with ``out``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .parsing import ParseError
from .tensor.parse import Declarations

HEADER = "# nogo rewrite trace v1"


@dataclass
class TraceStep:
    op: str
    args: Dict
    inp: str
    out: str


@dataclass
class RewriteTrace:
    decls: Declarations = field(default_factory=Declarations)
    steps: List[TraceStep] = field(default_factory=list)

    def record(self, op: str, inp, out, **args) -> None:
        self.steps.append(TraceStep(op, dict(args), str(inp), str(out)))

    def __len__(self):
        return len(self.steps)

    def serialize(self) -> str:
        lines = [HEADER]
        lines += [f"decl {d}" for d in self.decls.lines()]
        for n, s in enumerate(self.steps, 1):
            lines.append(f"step {n} {s.op}")
            lines.append("args " + json.dumps(s.args, sort_keys=True))
            lines.append("in " + s.inp.replace("\n", " "))
            lines.append("out " + s.out.replace("\n", " "))
        return "\n".join(lines) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.serialize())

    @classmethod
    def parse(cls, text: str) -> "RewriteTrace":
        lines = text.splitlines()
        if not lines or lines[0].strip() != HEADER:
            raise ParseError("not a rewrite trace (missing header)", 1, 1)
        trace = cls()
        k = 1
        while k < len(lines) and lines[k].startswith("decl "):
            trace.decls.parse_line(lines[k][5:].strip(), k + 1)
            k += 1
        while k < len(lines):
            if not lines[k].strip():
                k += 1
                continue
            block = lines[k:k + 4]
            if len(block) < 4:
                raise ParseError("truncated trace step", k + 1, 1)
            head, args, inp, out = block
            parts = head.split()
            if len(parts) != 3 or parts[0] != "step":
                raise ParseError(f"expected 'step N op', found {head!r}", k + 1, 1)
            for n, (line, tag) in enumerate(((args, "args "), (inp, "in "), (out, "out ")), 2):
                if not line.startswith(tag):
                    raise ParseError(f"expected {tag.strip()!r} line", k + n, 1)
            try:
                arg_obj = json.loads(args[5:])
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad args json: {exc}", k + 2, 1) from None
            trace.steps.append(TraceStep(parts[2], arg_obj, inp[3:], out[4:]))
            k += 4
        return trace

    @classmethod
    def read(cls, path: str) -> "RewriteTrace":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())


# --------------------------------------------------------------------------
# replay


def _tensor_ops() -> Dict[str, Callable]:
    from .tensor.canonical import canonicalize
    from .tensor.constraints import apply_constraints, parse_rule
    from .tensor.derivatives import curved_commute, derivative_normal_form
    from .tensor.generalize import generalize

    def canon(e, decls, dim=4, flat_commuting=False):
        return canonicalize(e, dim=dim, flat_commuting=flat_commuting)

    def commute(e, decls, term, factor, prefix):
        return curved_commute(e, term, factor, prefix)

    def normal(e, decls):
        return derivative_normal_form(e)

    def gen(e, decls):
        return generalize(e)

    def constrain(e, decls, rules):
        return apply_constraints(e, [parse_rule(r, decls) for r in rules])

    return {
        "canonicalize": canon,
        "curved_commute": commute,
        "derivative_normal_form": normal,
        "generalize": gen,
        "apply_constraints": constrain,
    }


def _scalar_ops() -> Dict[str, Callable]:
    from .parsing import parse_classical, parse_operator
    from .weyl import OrderingScheme, apply_ordering, quantize_u2

    def order(text, scheme):
        return apply_ordering(parse_classical(text), OrderingScheme.parse(scheme))

    return {
        "classical": lambda text: parse_classical(text),
        "operator": lambda text: parse_operator(text),
        "order": order,
        "quantize": lambda text: quantize_u2(parse_classical(text)),
    }


@dataclass
class ReplayResult:
    checked: int
    failures: List[Tuple[int, str, str, str]]  # (step, op, expected, got)

    @property
    def ok(self) -> bool:
        return not self.failures


def replay(trace: RewriteTrace) -> ReplayResult:
    from .tensor.parse import parse_tensor

    tensor_ops = _tensor_ops()
    scalar_ops = _scalar_ops()
    failures = []
    for n, step in enumerate(trace.steps, 1):
        try:
            if step.op in scalar_ops:
                got = str(scalar_ops[step.op](step.inp, **step.args))
            elif step.op in tensor_ops:
                e = parse_tensor(step.inp, trace.decls)
                got = str(tensor_ops[step.op](e, trace.decls, **step.args))
            else:
                got = f"<unknown operation {step.op}>"
        except Exception as exc:  # a failing step is reported, not raised
            got = f"<error: {exc}>"
        if got != step.out:
            failures.append((n, step.op, step.out, got))
    return ReplayResult(len(trace.steps), failures)


def final_output(trace: RewriteTrace) -> Optional[str]:
    return trace.steps[-1].out if trace.steps else None
