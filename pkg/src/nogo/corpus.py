"""Golden-example files for the tensor engine.

File layout::

    # comment
    antisym F {1 2}
    rule unit: u^a u_a -> -1

    [stanza-name]
    op: generalize
    input: u^a D[eta,a] u^b
    expect: bar(u)^a D[g,a] bar(u)^b
    constraints: unit

Values may continue on indented lines.  Declarations and rules before the
first stanza apply to the whole file.  Operations:

* ``generalize``: the image of ``input`` equals ``expect``
* ``image-zero``: the image of ``input`` reduces to 0
* ``identity``: ``input`` equals ``expect`` (no generalization)
* ``zero`` / ``nonzero``: ``input`` reduces to 0 / does not

Reduction means: constraints, derivative normal form, constraints again.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Sequence

from .parsing import ParseError
from .tensor.canonical import canonicalize
from .tensor.constraints import ConstraintRule, apply_constraints, parse_rule
from .tensor.derivatives import derivative_normal_form
from .tensor.expr import TensorExpr
from .tensor.generalize import generalize
from .tensor.parse import Declarations, is_declaration, parse_tensor

OPS = ("generalize", "image-zero", "identity", "zero", "nonzero")
_KEYS = ("op", "input", "expect", "constraints", "note")


@dataclass
class CorpusEntry:
    name: str
    op: str
    input: str
    expect: Optional[str]
    constraints: List[str]
    source: str
    line: int
    note: str = ""


@dataclass
class CorpusFile:
    path: str
    decls: Declarations
    rules: Dict[str, ConstraintRule]
    entries: List[CorpusEntry] = field(default_factory=list)


def parse_corpus(text: str, path: str = "<corpus>") -> CorpusFile:
    decls = Declarations()
    rules: Dict[str, ConstraintRule] = {}
    raw_rules = []
    entries: List[CorpusEntry] = []
    current: Optional[Dict] = None
    last_key = None

    def finish():
        if current is None:
            return
        missing = [k for k in ("op", "input") if k not in current["fields"]]
        if missing:
            raise ParseError(f"{path}: stanza [{current['name']}] lacks {', '.join(missing)}",
                             current["line"], 1)
        f = current["fields"]
        op = f["op"].strip()
        if op not in OPS:
            raise ParseError(f"{path}: unknown op {op!r} in [{current['name']}]", current["line"], 1)
        if op in ("generalize", "identity") and "expect" not in f:
            raise ParseError(f"{path}: op {op} needs 'expect' in [{current['name']}]", current["line"], 1)
        names = [c.strip() for c in f.get("constraints", "").replace(",", " ").split()]
        entries.append(CorpusEntry(
            current["name"], op, f["input"].strip(), f.get("expect", "").strip() or None,
            names, path, current["line"], f.get("note", "").strip(),
        ))

    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            finish()
            current = {"name": stripped[1:-1].strip(), "line": n, "fields": {}}
            last_key = None
            continue
        if current is None:
            if is_declaration(stripped):
                decls.parse_line(stripped, n)
            elif stripped.startswith("rule "):
                raw_rules.append((stripped[5:], n))
            else:
                raise ParseError(f"{path}: expected a declaration, rule or [stanza]", n, 1)
            continue
        if raw[:1] in (" ", "\t") and last_key is not None:
            current["fields"][last_key] += " " + stripped
            continue
        key, sep, value = stripped.partition(":")
        key = key.strip()
        if not sep or key not in _KEYS:
            raise ParseError(f"{path}: expected one of {', '.join(_KEYS)}", n, 1)
        current["fields"][key] = value.strip()
        last_key = key
    finish()

    for text_rule, n in raw_rules:
        try:
            rule = parse_rule(text_rule, decls)
        except ParseError as exc:
            raise ParseError(f"{path}: {exc.message}", n, exc.column) from None
        rules[rule.name] = rule
    for e in entries:
        for c in e.constraints:
            if c not in rules:
                raise ParseError(f"{path}: stanza [{e.name}] uses unknown rule {c!r}", e.line, 1)
    return CorpusFile(path, decls, rules, entries)


def reduce(e: TensorExpr, rules: Sequence[ConstraintRule]) -> TensorExpr:
    if rules:
        e = apply_constraints(e, rules)
    e = derivative_normal_form(e)
    if rules:
        e = apply_constraints(e, rules)
        e = derivative_normal_form(e)
    return e


@dataclass
class EntryResult:
    entry: CorpusEntry
    passed: bool
    residual: str
    detail: str = ""
    seconds: float = 0.0


def run_entry(cf: CorpusFile, entry: CorpusEntry) -> EntryResult:
    t0 = time.perf_counter()
    rules = [cf.rules[c] for c in entry.constraints]
    try:
        inp = parse_tensor(entry.input, cf.decls)
        if entry.op in ("generalize", "image-zero"):
            inp = generalize(canonicalize(inp, flat_commuting=True))
        if entry.op in ("generalize", "identity"):
            diff = inp - parse_tensor(entry.expect, cf.decls)
        else:
            diff = inp
        residual = reduce(diff, rules)
        zero = residual.is_zero()
        passed = not zero if entry.op == "nonzero" else zero
        return EntryResult(entry, passed, str(residual), seconds=time.perf_counter() - t0)
    except Exception as exc:  # an engine error fails the entry with its message
        return EntryResult(entry, False, "", f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)


def corpus_files(path: Optional[str] = None) -> List[str]:
    """Corpus files under ``path`` (a file or directory); default: bundled."""
    if path is None:
        base = resources.files("nogo").joinpath("data/corpus")
        return sorted(str(p) for p in base.iterdir() if p.name.endswith(".corpus"))
    if os.path.isdir(path):
        return sorted(
            os.path.join(path, f) for f in os.listdir(path) if f.endswith(".corpus")
        )
    return [path]


def load_corpus(path: Optional[str] = None) -> List[CorpusFile]:
    out = []
    for p in corpus_files(path):
        with open(p, encoding="utf-8") as fh:
            out.append(parse_corpus(fh.read(), p))
    return out


def corpus_examples(path: Optional[str] = None) -> List[Dict]:
    """Flat list of {name, op, input, expected} records."""
    return [
        {"name": e.name, "op": e.op, "input": e.input, "expected": e.expect, "file": os.path.basename(cf.path)}
        for cf in load_corpus(path)
        for e in cf.entries
    ]


def run_corpus(path: Optional[str] = None) -> List[EntryResult]:
    return [run_entry(cf, e) for cf in load_corpus(path) for e in cf.entries]
