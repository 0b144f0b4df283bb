"""Command-line front end.

Exit codes: 0 affirmative, 1 negative, 2 indeterminate (budget), 3 usage,
parse or I/O error.  ``--format json`` switches every command to
line-delimited JSON documents carrying a ``schema`` field.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence, TextIO

from besiml import __version__, kernel
from besiml.base import (
    MULTISET,
    SET,
    Budget,
    check_derivation,
    derivation_document,
    derive,
    format_base,
    load_derivation_document,
    parse_base,
)
from besiml.flatten import (
    STANDARD,
    STAR,
    FlattenError,
    bespoke_base,
    extract_proof,
    flat_models,
)
from besiml.harness import DEFAULT_ATOMS, crosscheck, enumerate_sequents
from besiml.nimll import check_proof, load_proof_document, proof_document, prove, prove_ipl
from besiml.outcomes import SCHEMA
from besiml.semantics import (
    EvalBudget,
    ExtensionEnumerator,
    Holds,
    Refuted,
    eval_support,
    judgement,
    replay,
    witness_document,
)
from besiml.syntax import IMLL, IPL, Multiset, SyntaxError_, parse_atoms, parse_sequent

OK, NEGATIVE, INDETERMINATE, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Out:
    def __init__(self, stream: TextIO, fmt: str):
        self.stream = stream
        self.json = fmt == "json"

    def text(self, line: str = ""):
        if not self.json:
            print(line, file=self.stream)

    def doc(self, command: str, **fields):
        if self.json:
            print(json.dumps({"schema": SCHEMA, "command": command, **fields}, sort_keys=True),
                  file=self.stream)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _verdict(status: str) -> int:
    return {"found": OK, "not-found": NEGATIVE}.get(status, INDETERMINATE)


# -- commands ----------------------------------------------------------------


def cmd_prove(a, out: _Out) -> int:
    s = parse_sequent(a.sequent, a.logic)
    r = prove(s, a.budget) if a.logic == IMLL else prove_ipl(s, a.budget)
    code = _verdict(r.status)
    doc = proof_document(r.value) if r.found else None
    if doc is not None and a.emit:
        _write(a.emit, json.dumps(doc, indent=1) + "\n")
    out.text(f"{s}: {r.status} ({r.nodes} nodes)")
    if r.found and not a.quiet:
        out.text(r.value.pretty())
    out.doc("prove", sequent=str(s), logic=a.logic, verdict=r.status, nodes=r.nodes, proof=doc)
    return code


def cmd_check(a, out: _Out) -> int:
    try:
        doc = json.loads(_read(a.path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{a.path} is not JSON: {exc}") from None
    kind = doc.get("kind")
    if kind == "proof":
        p = load_proof_document(doc)
        expected = parse_sequent(a.expect, p.logic) if a.expect else None
        verdict = check_proof(p, expected)
        what = str(p.conclusion)
    elif kind == "derivation":
        base, d = load_derivation_document(doc)
        expected = None
        if a.expect:
            res, goal = _query(a.expect)
            expected = (res, goal)
        verdict = check_derivation(base, d, expected)
        what = d.statement()
    else:
        raise UsageError(f"{a.path}: unknown document kind {kind!r}")
    out.text(f"{kind} of {what}: {'accepted' if verdict else verdict}")
    out.doc("check", kind=kind, accepted=bool(verdict),
            reason=None if verdict else str(verdict))
    return OK if verdict else NEGATIVE


def _query(text: str):
    if "|-" not in text:
        raise UsageError(f"expected 'atoms |- goal', got {text!r}")
    left, right = text.split("|-", 1)
    goal = parse_atoms(right)
    if len(goal) != 1:
        raise UsageError("the goal must be a single atom")
    return parse_atoms(left), goal.items[0]


def cmd_derive(a, out: _Out) -> int:
    base = parse_base(_read(a.base), a.discipline)
    res, goal = _query(a.query)
    r = derive(base, res, goal, Budget(a.max_height, a.budget))
    code = _verdict(r.status)
    doc = derivation_document(base, r.value) if r.found else None
    if doc is not None and a.emit:
        _write(a.emit, json.dumps(doc, indent=1) + "\n")
    out.text(f"{', '.join(res)} |- {goal} in {a.base}: {r.status} ({r.nodes} nodes)")
    if r.found and not a.quiet:
        for rule in r.value.rules_used():
            out.text(f"  {rule}")
    out.doc("derive", query=a.query, verdict=r.status, nodes=r.nodes, derivation=doc)
    return code


def cmd_flatten(a, out: _Out) -> int:
    s = parse_sequent(a.sequent, a.logic)
    m, base, res, goal = bespoke_base(s, a.conjunction)
    fresh = m.fresh_atoms()
    header = f"bespoke base {'M' if a.logic == IMLL else 'N'} for {s}"
    if a.emit_base and a.emit_base != "-":
        _write(a.emit_base, format_base(base, header))
    out.text(f"# flattening of {s}: {len(m.domain)} formulas, {len(fresh)} fresh atoms")
    for line in m.table().splitlines():
        out.text(f"#   {line}")
    out.text(f"# query: {', '.join(res)} |- {goal}")
    if a.emit_base == "-":
        out.text(format_base(base, header).rstrip("\n"))
    code = OK
    verdict = None
    if a.derive:
        r = derive(base, res, goal, models=flat_models(m))
        verdict = r.status
        code = _verdict(r.status)
        out.text(f"# derivability: {r.status}")
        if r.found and not a.quiet:
            proof = extract_proof("M" if a.logic == IMLL else "N", m, r.value)
            out.text(proof.pretty())
    out.doc("flatten", sequent=str(s), logic=a.logic,
            table={str(f): at for f, at in m.forward.items()}, fresh_atoms=fresh,
            base=format_base(base).splitlines(), query={"resources": list(res), "goal": goal},
            derivability=verdict)
    return code


def cmd_support(a, out: _Out) -> int:
    s = parse_sequent(a.sequent, a.logic)
    disc = MULTISET if a.logic == IMLL else SET
    base = parse_base(_read(a.base), disc) if a.base else parse_base("", disc)
    resources = parse_atoms(a.resources) if a.resources else Multiset()
    j = judgement(base, s.conclusion, s.context, resources, a.logic, a.conjunction)
    if a.max_premises < 0 or a.max_rules < 0:
        raise UsageError("enumerator bounds must be non-negative")
    alphabet = ExtensionEnumerator.for_sequent(s, fresh=a.fresh).alphabet
    e = ExtensionEnumerator(tuple(set(alphabet) | base.atoms() | set(resources)),
                            a.max_rules, a.max_premises, a.max_assumptions, a.max_resources)
    budget = EvalBudget(max_extensions=a.max_extensions, max_steps=a.max_steps)
    outcome = eval_support(j, e, budget)
    out.text(f"{j}: {outcome.status}")
    fields = {"judgement": str(j), "verdict": outcome.status}
    if isinstance(outcome, Refuted):
        ok = replay(outcome.witness, e, budget)
        out.text(outcome.witness.describe())
        out.text(f"witness replay: {'ok' if ok else 'FAILED'}")
        fields.update(witness=witness_document(outcome.witness), replayed=ok)
        code = NEGATIVE
    elif isinstance(outcome, Holds):
        out.text(f"reason: {outcome.reason}")
        fields["reason"] = outcome.reason
        code = OK
    else:
        out.text(f"report: {outcome.report}")
        fields["report"] = {k: str(v) for k, v in outcome.report.items()}
        code = INDETERMINATE
    out.doc("support", **fields)
    return code


def cmd_crosscheck(a, out: _Out) -> int:
    if a.atoms < 1 or a.max_connectives < 0 or a.max_context < 0:
        raise UsageError("--atoms must be positive and the size bounds non-negative")
    atoms = DEFAULT_ATOMS if a.atoms == 2 else tuple(f"p{i + 1}" for i in range(a.atoms))
    seqs = list(enumerate_sequents(a.logic, atoms, a.max_connectives, a.max_context))
    if a.sample is not None and a.sample < len(seqs):
        seqs = random.Random(a.seed).sample(seqs, a.sample)
    report = crosscheck(seqs, a.conjunction, a.logic)
    out.text(report.summary())
    for s, left, right in report.disagreements[:20]:
        out.text(f"  disagreement: {s}: prover {left}, base {right}")
    for s in report.indeterminate[:20]:
        out.text(f"  indeterminate: {s}")
    out.doc("crosscheck", logic=a.logic, conjunction=a.conjunction, total=report.total,
            provable=report.provable, agreement=report.agreement,
            disagreements=[list(d) for d in report.disagreements],
            indeterminate=report.indeterminate, seconds=round(report.seconds, 3),
            backend=kernel.BACKEND)
    if report.disagreements:
        return NEGATIVE
    if report.indeterminate:
        return INDETERMINATE
    return OK


# -- parser ------------------------------------------------------------------


def _logic(p):
    p.add_argument("--logic", choices=(IMLL, IPL), default=IMLL)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="besiml", description="Base-extension semantics toolkit for IMLL and IPL.")
    top.add_argument("--format", choices=("human", "json"), default="human")
    top.add_argument("--version", action="version", version=f"besiml {__version__}")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("prove", help="decide a sequent")
    p.add_argument("sequent")
    _logic(p)
    p.add_argument("--emit", metavar="PATH", help="write the proof document here")
    p.add_argument("--budget", type=int, help="search node budget")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="verify a proof or derivation document")
    p.add_argument("path")
    p.add_argument("--expect", help="required conclusion (sequent or 'atoms |- atom')")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("derive", help="derivability in a base file")
    p.add_argument("base", help="base file")
    p.add_argument("query", help="'a, b |- q'")
    p.add_argument("--discipline", choices=(MULTISET, SET), default=MULTISET)
    p.add_argument("--emit", metavar="PATH", help="write the derivation document here")
    p.add_argument("--budget", type=int, help="search node budget")
    p.add_argument("--max-height", type=int)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("flatten", help="flattening map and bespoke base")
    p.add_argument("sequent")
    _logic(p)
    p.add_argument("--conjunction", choices=(STANDARD, STAR), default=STANDARD)
    p.add_argument("--emit-base", nargs="?", const="-", metavar="PATH",
                   help="print the base (or write it to PATH)")
    p.add_argument("--derive", action="store_true", help="also decide the flat query")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_flatten)

    p = sub.add_parser("support", help="evaluate a support judgement")
    p.add_argument("sequent", help="'context |- formula'")
    _logic(p)
    p.add_argument("--base", help="base file (default: the empty base)")
    p.add_argument("--resources", help="IMLL resources, comma separated")
    p.add_argument("--conjunction", choices=(STANDARD, STAR), default=STANDARD)
    p.add_argument("--fresh", type=int, default=1)
    p.add_argument("--max-rules", type=int, default=2)
    p.add_argument("--max-premises", type=int, default=2)
    p.add_argument("--max-assumptions", type=int, default=2)
    p.add_argument("--max-resources", type=int, default=2)
    p.add_argument("--max-extensions", type=int, default=200)
    p.add_argument("--max-steps", type=int, default=200_000)
    p.set_defaults(func=cmd_support)

    p = sub.add_parser("crosscheck", help="prover versus bespoke-base derivability")
    _logic(p)
    p.add_argument("--atoms", type=int, default=2)
    p.add_argument("--max-connectives", type=int, default=3)
    p.add_argument("--max-context", type=int, default=3)
    p.add_argument("--conjunction", choices=(STANDARD, STAR), default=STANDARD)
    p.add_argument("--sample", type=int, help="check a random sample of this size")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_crosscheck)
    return top


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None,
        stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(list(argv) if argv is not None else None)
        if a.command is None:
            raise UsageError("a command is required")
        return a.func(a, _Out(stdout, a.format))
    except (UsageError, SyntaxError_, FlattenError, ValueError) as exc:
        print(f"besiml: error: {exc}", file=stderr)
        return USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
