"""Support in a base, evaluated clause by clause.

Universal clauses ("for every extension X of B ...") are checked against a
bounded enumeration of extensions, so evaluation is three-valued:

* ``Holds``: the judgement follows from decided facts by a sound argument
  (named in ``reason``);
* ``Refuted``: a counter-instance was found; it carries a ``Witness`` that
  ``replay`` re-checks from scratch;
* ``NotRefutedWithinBudget``: neither, within the enumeration bounds.

Only ``Refuted`` and ``Holds`` are claims.  All quantification over atoms
(the schematic ``p`` of the tensor, unit, disjunction and conjunction*
clauses and the falsum clause) ranges over the enumerator's alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Iterator

from besiml.base import MULTISET, SET, AtomicRule, Base, Budget, derive, format_rule
from besiml.flatten import STANDARD, STAR
from besiml.nimll import prove, prove_ipl
from besiml.outcomes import Indeterminate
from besiml.syntax import (
    IMLL,
    IPL,
    And,
    Atom,
    Falsum,
    Formula,
    Imp,
    Lolli,
    Multiset,
    Or,
    Sequent,
    Tensor,
    Unit,
    atoms_of,
    degree,
    enumerate_splits,
)

SUP = "sup"    # resources |= formula
ALL = "all"    # resources |= comma-separated list
INF = "inf"    # context |= formula


@dataclass(frozen=True)
class SupportJudgement:
    """``context |=_base^resources conclusion``.

    ``resources`` is None for IPL.  ``kind`` is SUP for a single formula
    with empty context, ALL for a comma list (``conclusion`` is a tuple) and
    INF for a nonempty context.
    """

    kind: str
    base: Base
    resources: Multiset | None
    context: Multiset
    conclusion: object
    logic: str = IMLL
    conjunction: str = STANDARD

    def __str__(self):
        res = "" if self.resources is None else f"^[{', '.join(self.resources)}]"
        ctx = ", ".join(map(str, self.context))
        goal = ", ".join(map(str, self.conclusion)) if self.kind == ALL else str(self.conclusion)
        lhs = f"{ctx} " if ctx else ""
        return f"{lhs}|={res} {goal}  (base of {len(self.base)} rules)"


def judgement(base: Base, conclusion, context: Iterable[Formula] = (), resources=None,
              logic: str = IMLL, conjunction: str = STANDARD) -> SupportJudgement:
    ctx = Multiset(context)
    if logic == IMLL:
        resources = Multiset(resources or ())
    else:
        resources = None
    if isinstance(conclusion, (list, tuple)):
        if ctx:
            raise ValueError("a comma conclusion takes no context")
        return SupportJudgement(ALL, base, resources, ctx, tuple(conclusion), logic, conjunction)
    kind = INF if ctx else SUP
    return SupportJudgement(kind, base, resources, ctx, conclusion, logic, conjunction)


def validity_judgement(s: Sequent, conjunction: str = STANDARD) -> SupportJudgement:
    """``Gamma |=_{empty}^{[]} phi``: support in every base."""
    disc = MULTISET if s.logic == IMLL else SET
    return judgement(Base((), disc), s.conclusion, s.context, (), s.logic, conjunction)


# ---------------------------------------------------------------------------
# Outcomes


@dataclass(frozen=True)
class Witness:
    """A counter-instance to ``judgement``.

    ``holds`` are judgements that must hold at the instance and ``refuted``
    pairs each failing judgement with its own witness.  ``extension``,
    ``resources`` and ``atom`` record the instantiation of the clause's
    quantifiers (when it has them).
    """

    clause: str
    judgement: SupportJudgement
    extension: Base | None = None
    resources: Multiset | None = None
    atom: str | None = None
    holds: tuple = ()
    refuted: tuple = ()

    def added_rules(self) -> list[AtomicRule]:
        if self.extension is None:
            return []
        return [r for r in self.extension.rules if r not in self.judgement.base]

    def derive_queries(self) -> list[tuple[Base, Multiset, str]]:
        """Atomic derivability facts (all expected to fail) behind the refutation."""
        out = []
        if self.clause == "At":
            j = self.judgement
            out.append((j.base, j.resources or Multiset(), j.conclusion.name))
        for _, w in self.refuted:
            out.extend(w.derive_queries())
        return out

    def describe(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}{self.clause}: {self.judgement} is refuted"]
        if self.extension is not None:
            added = ", ".join(format_rule(r) for r in self.added_rules()) or "none"
            lines.append(f"{pad}  extension adds: {added}")
        if self.resources is not None and self.clause != "At":
            lines.append(f"{pad}  resources U = [{', '.join(self.resources)}]")
        if self.atom is not None:
            lines.append(f"{pad}  atom = {self.atom}")
        for h in self.holds:
            lines.append(f"{pad}  holds: {h}")
        for _, w in self.refuted:
            lines.append(w.describe(indent + 1))
        return "\n".join(lines)


@dataclass(frozen=True)
class Holds:
    reason: str
    status = "holds"


@dataclass(frozen=True)
class Refuted:
    witness: Witness
    status = "refuted"


@dataclass(frozen=True)
class NotRefutedWithinBudget:
    report: dict = field(default_factory=dict)
    status = "not-refuted-within-budget"


# ---------------------------------------------------------------------------
# Enumeration of extensions


@dataclass
class ExtensionEnumerator:
    """Bounded, deterministic stream of base extensions.

    Candidate rules range over ``alphabet`` with at most ``max_premises``
    premises and assumption multisets of at most ``max_assumptions`` atoms;
    an extension adds at most ``max_rules`` candidates to the seed.  The
    stream starts with the seed itself, then one added rule, then two, with
    simpler rules first.
    """

    alphabet: tuple
    max_rules: int = 2
    max_premises: int = 2
    max_assumptions: int = 2
    max_resources: int = 2

    def __post_init__(self):
        self.alphabet = tuple(sorted(set(self.alphabet)))
        if not self.alphabet:
            raise ValueError("the enumerator needs a nonempty alphabet")
        if min(self.max_rules, self.max_premises, self.max_assumptions, self.max_resources) < 0:
            raise ValueError("enumerator bounds must be non-negative")
        self._cands: dict[str, list[AtomicRule]] = {}

    @classmethod
    def for_sequent(cls, s: Sequent, fresh: int = 1, **bounds) -> "ExtensionEnumerator":
        used: set[str] = set()
        for f in s.formulas():
            used |= atoms_of(f)
        return cls(tuple(sorted(used | set(fresh_atoms(used, fresh)))), **bounds)

    def candidates(self, discipline: str) -> list[AtomicRule]:
        if discipline not in self._cands:
            self._cands[discipline] = list(self._gen(discipline))
        return self._cands[discipline]

    def _gen(self, discipline: str) -> Iterator[AtomicRule]:
        a = self.alphabet
        if discipline == SET:
            assumptions = [c for k in range(self.max_assumptions + 1) for c in combinations(a, k)]
        else:
            assumptions = [c for k in range(self.max_assumptions + 1)
                           for c in combinations_with_replacement(a, k)]
        premises = sorted(((x, g) for x in assumptions for g in a), key=lambda pg: (len(pg[0]), pg))
        rules = []
        for n in range(self.max_premises + 1):
            for combo in combinations_with_replacement(range(len(premises)), n):
                prem = [premises[i] for i in combo]
                weight = sum(len(x) for x, _ in prem)
                for concl in a:
                    rules.append((n, weight, combo, concl, prem))
        rules.sort(key=lambda t: t[:4])
        seen = set()
        for _, _, _, concl, prem in rules:
            r = AtomicRule(prem, concl, discipline)
            if r not in seen:
                seen.add(r)
                yield r

    def extensions(self, seed: Base, limit: int | None = None) -> Iterator[Base]:
        cands = [r for r in self.candidates(seed.discipline) if r not in seed]
        emitted = 0
        for k in range(self.max_rules + 1):
            for combo in combinations(range(len(cands)), k):
                if limit is not None and emitted >= limit:
                    return
                emitted += 1
                yield seed.extend(cands[i] for i in combo) if combo else seed

    def resource_multisets(self) -> Iterator[Multiset]:
        for k in range(self.max_resources + 1):
            for combo in combinations_with_replacement(self.alphabet, k):
                yield Multiset(combo)


def fresh_atoms(used: Iterable[str], count: int = 1) -> list[str]:
    used = set(used)
    out = []
    for stem in "rstuvwxyz":
        for i in range(0, 1000):
            name = stem if i == 0 else f"{stem}{i}"
            if name not in used:
                out.append(name)
                used.add(name)
                break
        if len(out) == count:
            return out
    return out


@dataclass(frozen=True)
class EvalBudget:
    """Per-clause extension cap, global step cap, and derivation-search budget."""

    max_extensions: int = 200
    max_steps: int = 200_000
    derive_nodes: int = 20_000


class _OutOfSteps(Exception):
    pass


# ---------------------------------------------------------------------------
# Evaluation


class Evaluator:
    """Evaluates support judgements; results are cached per judgement."""

    def __init__(self, enumerator: ExtensionEnumerator, budget: EvalBudget | None = None,
                 atomic_shortcut: bool = True):
        self.enum = enumerator
        self.budget = budget or EvalBudget()
        self.shortcut = atomic_shortcut
        self.cache: dict[SupportJudgement, object] = {}
        self.steps = 0
        self._derive_budget = Budget(max_nodes=self.budget.derive_nodes)

    # derive wrapper: True / False / None (budget)
    def derives(self, base: Base, res, goal: str):
        self.steps += 1
        if self.steps > self.budget.max_steps:
            raise _OutOfSteps
        r = derive(base, res if res is not None else (), goal, self._derive_budget)
        if r.status == "found":
            return True
        if r.status == "not-found":
            return False
        return None

    def evaluate(self, j: SupportJudgement):
        try:
            return self.eval(j)
        except _OutOfSteps:
            return NotRefutedWithinBudget({"reason": "step budget exhausted", "steps": self.steps})

    def eval(self, j: SupportJudgement):
        hit = self.cache.get(j)
        if hit is not None:
            return hit
        if j.kind == ALL:
            out = self._all(j)
        elif j.kind == INF:
            out = self._inf(j)
        elif j.logic == IMLL:
            out = self._imll(j)
        else:
            out = self._ipl(j)
        self.cache[j] = out
        return out

    # -- helpers -----------------------------------------------------------

    def _sub(self, j: SupportJudgement, base: Base, res, conclusion, context=()):
        return judgement(base, conclusion, context, res, j.logic, j.conjunction)

    def _unknown(self, clause: str, **info):
        return NotRefutedWithinBudget({"clause": clause, **info})

    def _at(self, j: SupportJudgement, base: Base, res, atom: str):
        got = self.derives(base, res, atom)
        if got is True:
            return Holds("At")
        if got is False:
            return Refuted(Witness("At", self._sub(j, base, res, Atom(atom))))
        return self._unknown("At", reason="derivation budget")

    # -- IMLL --------------------------------------------------------------

    def _imll(self, j: SupportJudgement):
        B, P, phi = j.base, j.resources, j.conclusion
        if isinstance(phi, Atom):
            return self._at(j, B, P, phi.name)
        if isinstance(phi, Lolli):
            inner = self._sub(j, B, P, phi.right, [phi.left])
            out = self.eval(inner)
            if isinstance(out, Refuted):
                return Refuted(Witness("-o", j, refuted=((inner, out.witness),)))
            return Holds("-o") if isinstance(out, Holds) else out
        if isinstance(phi, Tensor):
            # a split supporting both components gives the clause at once
            for P1, P2 in enumerate_splits(P, 2):
                a = self.eval(self._sub(j, B, P1, phi.left))
                if not isinstance(a, Holds):
                    continue
                if isinstance(self.eval(self._sub(j, B, P2, phi.right)), Holds):
                    return Holds("* from supported components")
            return self._search_atomic_elim(j, "*", [phi.left, phi.right])
        if isinstance(phi, Unit):
            if not P:
                return Holds("I with no resources")
            return self._search_unit(j)
        raise TypeError(f"not an IMLL formula: {phi!r}")

    def _search_atomic_elim(self, j, clause, parts):
        """Counter-instances of ``for X, U, p: parts |=_X^U p  implies  |=_X^{P;U} p``."""
        B, P = j.base, j.resources
        seen = 0
        for U in self.enum.resource_multisets():
            for X in self.enum.extensions(B, self.budget.max_extensions):
                seen += 1
                for p in self.enum.alphabet:
                    if self.derives(X, P + U, p) is not False:
                        continue
                    prem = self._sub(j, X, U, Atom(p), parts)
                    if isinstance(self.eval(prem), Holds):
                        concl = self._sub(j, X, P + U, Atom(p))
                        w_at = Witness("At", concl)
                        return Refuted(Witness(clause, j, X, U, p, (prem,), ((concl, w_at),)))
        return self._unknown(clause, instances=seen)

    def _search_unit(self, j):
        B, P = j.base, j.resources
        seen = 0
        for U in self.enum.resource_multisets():
            for X in self.enum.extensions(B, self.budget.max_extensions):
                seen += 1
                for p in self.enum.alphabet:
                    if self.derives(X, P + U, p) is not False:
                        continue
                    if self.derives(X, U, p) is True:
                        prem = self._sub(j, X, U, Atom(p))
                        concl = self._sub(j, X, P + U, Atom(p))
                        return Refuted(Witness("I", j, X, U, p, (prem,), ((concl, Witness("At", concl)),)))
        return self._unknown("I", instances=seen)

    # -- IPL ---------------------------------------------------------------

    def _ipl(self, j: SupportJudgement):
        B, phi = j.base, j.conclusion
        if isinstance(phi, Atom):
            return self._at(j, B, None, phi.name)
        if isinstance(phi, Imp):
            inner = self._sub(j, B, None, phi.right, [phi.left])
            out = self.eval(inner)
            if isinstance(out, Refuted):
                return Refuted(Witness("->", j, refuted=((inner, out.witness),)))
            return Holds("->") if isinstance(out, Holds) else out
        if isinstance(phi, And):
            parts = [self._sub(j, B, None, x) for x in (phi.left, phi.right)]
            outs = [self.eval(x) for x in parts]
            if all(isinstance(o, Holds) for o in outs):
                return Holds("/\\ from supported conjuncts")
            if j.conjunction == STANDARD:
                for part, o in zip(parts, outs):
                    if isinstance(o, Refuted):
                        return Refuted(Witness("/\\", j, refuted=((part, o.witness),)))
                return self._unknown("/\\")
            return self._search_ipl_elim(j, "/\\*", [[phi.left, phi.right]])
        if isinstance(phi, Or):
            for x in (phi.left, phi.right):
                if isinstance(self.eval(self._sub(j, B, None, x)), Holds):
                    return Holds("\\/ from a supported disjunct")
            return self._search_ipl_elim(j, "\\/", [[phi.left], [phi.right]])
        if isinstance(phi, Falsum):
            pending = False
            for p in self.enum.alphabet:
                got = self.derives(B, None, p)
                if got is False:
                    sub = self._sub(j, B, None, Atom(p))
                    return Refuted(Witness("_|_", j, atom=p, refuted=((sub, Witness("At", sub)),)))
                pending |= got is None
            if pending:
                return self._unknown("_|_")
            return Holds("_|_ over the alphabet")
        raise TypeError(f"not an IPL formula: {phi!r}")

    def _search_ipl_elim(self, j, clause, contexts):
        """Counter-instances of ``for C, p: (ctx |=_C p for each ctx) implies |=_C p``."""
        seen = 0
        for C in self.enum.extensions(j.base, self.budget.max_extensions):
            seen += 1
            for p in self.enum.alphabet:
                if self.derives(C, None, p) is not False:
                    continue
                prems = [self._sub(j, C, None, Atom(p), ctx) for ctx in contexts]
                if all(isinstance(self.eval(x), Holds) for x in prems):
                    concl = self._sub(j, C, None, Atom(p))
                    return Refuted(Witness(clause, j, C, None, p, tuple(prems),
                                           ((concl, Witness("At", concl)),)))
        return self._unknown(clause, instances=seen)

    # -- comma and (Inf) -----------------------------------------------------

    def _all(self, j: SupportJudgement):
        forms = list(j.conclusion)
        B, P = j.base, j.resources
        if j.logic == IPL:
            outs = [(self._sub(j, B, None, f), None) for f in forms]
            results = [self.eval(x) for x, _ in outs]
            if all(isinstance(o, Holds) for o in results):
                return Holds("comma")
            for (x, _), o in zip(outs, results):
                if isinstance(o, Refuted):
                    return Refuted(Witness("comma", j, refuted=((x, o.witness),)))
            return self._unknown("comma")
        if not forms:
            if not P:
                return Holds("empty comma")
            return Refuted(Witness("comma", j))
        if len(forms) == 1:
            x = self._sub(j, B, P, forms[0])
            o = self.eval(x)
            if isinstance(o, Refuted):
                return Refuted(Witness("comma", j, refuted=((x, o.witness),)))
            return o
        refuted = []
        for split in enumerate_splits(P, len(forms)):
            blocked = None
            all_hold = True
            for f, part in zip(forms, split):
                x = self._sub(j, B, part, f)
                o = self.eval(x)
                if isinstance(o, Refuted):
                    blocked = (x, o.witness)
                    break
                if not isinstance(o, Holds):
                    all_hold = False
            if blocked is None:
                if all_hold:
                    return Holds("comma")
                return self._unknown("comma")
            refuted.append(blocked)
        return Refuted(Witness("comma", j, refuted=tuple(refuted)))

    def _inf(self, j: SupportJudgement):
        B, P, ctx, phi = j.base, j.resources, j.context, j.conclusion
        if (P is None or not P) and list(ctx) == [phi]:
            return Holds("identity")
        if j.logic == IPL:
            if phi in ctx:
                return Holds("identity")
            if isinstance(self.eval(self._sub(j, B, None, phi)), Holds):
                return Holds("conclusion holds in the base (monotonicity)")
        if all(isinstance(f, Atom) for f in ctx) and isinstance(phi, Atom):
            out = self._atomic_inf(j)
            if out is not None:
                return out
        premise_of = (lambda X, U: self._sub(j, X, U, tuple(ctx)))
        seen = 0
        resources = self.enum.resource_multisets() if j.logic == IMLL else [None]
        for U in resources:
            for X in self.enum.extensions(B, self.budget.max_extensions):
                seen += 1
                prem = premise_of(X, U)
                if not isinstance(self.eval(prem), Holds):
                    continue
                concl = self._sub(j, X, None if U is None else P + U, phi)
                o = self.eval(concl)
                if isinstance(o, Refuted):
                    return Refuted(Witness("Inf", j, X, U, None, (prem,), ((concl, o.witness),)))
        return self._unknown("Inf", instances=seen)

    def _atomic_inf(self, j: SupportJudgement):
        """Atomic context and conclusion: decide by derivability.

        A failure is turned into a literal counter-instance (checked by
        derivation search); success is reported as Holds only when the
        atomic-completeness shortcut is enabled.
        """
        B, P, phi = j.base, j.resources, j.conclusion
        atoms = [f.name for f in j.context]
        if j.logic == IMLL:
            got = self.derives(B, list(atoms) + list(P), phi.name)
        else:
            got = self.derives(B, atoms, phi.name)
        if got is None:
            return None
        if got:
            return Holds("atomic completeness") if self.shortcut else None
        # counter-instance 1: axioms for the context atoms, no resources
        disc = B.discipline
        X = B.extend(AtomicRule((), a, disc) for a in sorted(set(atoms)))
        U = Multiset() if j.logic == IMLL else None
        res = P if j.logic == IMLL else None
        if self.derives(X, res, phi.name) is False:
            prem = self._sub(j, X, U, tuple(j.context))
            if isinstance(self.eval(prem), Holds):
                concl = self._sub(j, X, res, phi)
                return Refuted(Witness("Inf", j, X, U, None, (prem,), ((concl, Witness("At", concl)),)))
        if j.logic == IMLL:
            # counter-instance 2: the context atoms as resources
            U = Multiset(atoms)
            prem = self._sub(j, B, U, tuple(j.context))
            if isinstance(self.eval(prem), Holds):
                concl = self._sub(j, B, P + U, phi)
                if self.derives(B, P + U, phi.name) is False:
                    return Refuted(Witness("Inf", j, B, U, None, (prem,), ((concl, Witness("At", concl)),)))
        return None


# ---------------------------------------------------------------------------
# Public operations


def eval_support(j: SupportJudgement, e: ExtensionEnumerator, budget: EvalBudget | None = None,
                 atomic_shortcut: bool = True):
    return Evaluator(e, budget, atomic_shortcut).evaluate(j)


def decide_validity(s: Sequent, budget: int | None = None) -> bool:
    """Validity via provability (soundness and completeness)."""
    r = prove(s, budget) if s.logic == IMLL else prove_ipl(s, budget)
    if r.status == "budget-exhausted":
        raise Indeterminate(f"prover budget exhausted on {s}")
    return r.found


def find_refuting_extension(s: Sequent, e: ExtensionEnumerator | None = None,
                            budget: EvalBudget | None = None, conjunction: str = STANDARD):
    """A replayable witness that ``s`` is not valid, or None within budget."""
    e = e or ExtensionEnumerator.for_sequent(s)
    out = eval_support(validity_judgement(s, conjunction), e, budget)
    if isinstance(out, Refuted):
        return out.witness
    return None


def _instance_ok(w: Witness) -> str | None:
    """Is the witness a genuine instance of its clause?  Reason if not."""
    j = w.judgement
    X, U, p = w.extension, w.resources, w.atom
    if X is not None and not X.issuperset(j.base):
        return "extension is not a superset of the base"
    sub = lambda base, res, concl, ctx=(): judgement(base, concl, ctx, res, j.logic, j.conjunction)
    refuted = [x for x, _ in w.refuted]
    if w.clause == "At":
        return None if j.kind == SUP and isinstance(j.conclusion, Atom) else "At needs an atom"
    phi = j.conclusion
    if w.clause in ("-o", "->"):
        want = [sub(j.base, j.resources, phi.right, [phi.left])]
        return None if refuted == want else "wrong implication instance"
    if w.clause in ("*", "I"):
        if p is None:
            return "missing atom"
        parts = [phi.left, phi.right] if w.clause == "*" else None
        prem = sub(X, U, Atom(p), parts or ())
        concl = sub(X, j.resources + U, Atom(p))
        return None if list(w.holds) == [prem] and refuted == [concl] else "wrong instance"
    if w.clause in ("\\/", "/\\*"):
        ctxs = [[phi.left], [phi.right]] if w.clause == "\\/" else [[phi.left, phi.right]]
        prems = [sub(X, None, Atom(p), c) for c in ctxs]
        concl = sub(X, None, Atom(p))
        return None if list(w.holds) == prems and refuted == [concl] else "wrong instance"
    if w.clause == "/\\":
        return None if len(refuted) == 1 and refuted[0] in (sub(j.base, None, phi.left), sub(j.base, None, phi.right)) else "wrong conjunct"
    if w.clause == "_|_":
        return None if refuted == [sub(j.base, None, Atom(p))] else "wrong atom"
    if w.clause == "Inf":
        prem = sub(X, U, tuple(j.context))
        concl = sub(X, None if U is None else j.resources + U, phi)
        return None if list(w.holds) == [prem] and refuted == [concl] else "wrong instance"
    if w.clause == "comma":
        forms = list(phi)
        if j.logic == IPL:
            return None if len(refuted) == 1 and refuted[0] in [sub(j.base, None, f) for f in forms] else "wrong component"
        if not forms:
            return None if j.resources else "empty comma holds with no resources"
        if len(forms) == 1:
            return None if refuted == [sub(j.base, j.resources, forms[0])] else "wrong component"
        splits = list(enumerate_splits(j.resources, len(forms)))
        if len(splits) != len(refuted):
            return "one refuted component per split is required"
        for split, x in zip(splits, refuted):
            if x not in [sub(j.base, part, f) for f, part in zip(forms, split)]:
                return "refuted component does not belong to its split"
        return None
    return f"unknown clause {w.clause}"


def replay(w: Witness, enumerator: ExtensionEnumerator, budget: EvalBudget | None = None) -> bool:
    """Re-check a witness from scratch: instance shape, premises, failures."""
    ev = Evaluator(enumerator, budget, atomic_shortcut=True)
    try:
        return _replay(w, ev)
    except _OutOfSteps:
        return False


def _replay(w: Witness, ev: Evaluator) -> bool:
    if _instance_ok(w) is not None:
        return False
    j = w.judgement
    if w.clause == "At":
        return ev.derives(j.base, j.resources, j.conclusion.name) is False
    for h in w.holds:
        if not isinstance(ev.eval(h), Holds):
            return False
    for x, sub in w.refuted:
        if sub.judgement != x or not _replay(sub, ev):
            return False
    return True


def witness_document(w: Witness) -> dict:
    """Structured export: added rules, instantiation and derive replay queries."""
    return {
        "clause": w.clause,
        "judgement": str(w.judgement),
        "added_rules": [format_rule(r) for r in w.added_rules()],
        "resources": None if w.resources is None else list(w.resources),
        "atom": w.atom,
        "holds": [str(h) for h in w.holds],
        "refuted": [witness_document(sub) for _, sub in w.refuted],
        "failing_derivations": [
            {"base": [format_rule(r) for r in b.rules], "resources": list(res), "goal": g}
            for b, res, g in (w.derive_queries() if w.clause == "At" else [])
        ],
    }
