"""Atomic rules, bases and derivability in a base.

Two disciplines are supported.  Under the multiset discipline a Ref leaf
states exactly ``[q] |- q`` and the resources of an App node are divided
among its premises.  Under the set discipline Ref accepts any ``S`` with
``q`` in ``S`` and every premise sees the whole of ``S``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Sequence

from besiml import kernel as _kernel
from besiml.outcomes import (
    SCHEMA,
    Accept,
    BudgetExhausted,
    Found,
    NotFound,
    Reject,
    default_node_budget,
)
from besiml.syntax import EMPTY, Multiset, ParseError, check_atom_name

MULTISET = "multiset"
SET = "set"
DISCIPLINES = (MULTISET, SET)


class DisciplineMismatch(ValueError):
    pass


class GraftError(ValueError):
    pass


def _norm_assumptions(assumptions, discipline: str) -> Multiset:
    if discipline == SET:
        return Multiset(set(assumptions))
    return assumptions if isinstance(assumptions, Multiset) else Multiset(assumptions)


class AtomicRule:
    """A rule ``(Q1 > q1, ..., Qn > qn) => q``.

    Premise order is kept for display and for derivation children, but two
    rules with the same premises in a different order are equal.
    """

    __slots__ = ("premises", "conclusion", "discipline", "_key", "_hash")

    def __init__(self, premises: Iterable[tuple[Iterable[str], str]], conclusion: str,
                 discipline: str = MULTISET):
        if discipline not in DISCIPLINES:
            raise ValueError(f"unknown discipline {discipline!r}")
        self.premises = tuple((_norm_assumptions(a, discipline), g) for a, g in premises)
        self.conclusion = conclusion
        self.discipline = discipline
        self._key = (discipline, conclusion,
                     tuple(sorted((a.items, g) for a, g in self.premises)))
        self._hash = hash(self._key)

    @classmethod
    def axiom(cls, conclusion: str, discipline: str = MULTISET) -> "AtomicRule":
        return cls((), conclusion, discipline)

    def __eq__(self, other):
        if isinstance(other, AtomicRule):
            return self._key == other._key
        return NotImplemented

    def __hash__(self):
        return self._hash

    def atoms(self) -> set[str]:
        out = {self.conclusion}
        for a, g in self.premises:
            out.add(g)
            out.update(a)
        return out

    def __str__(self):
        return format_rule(self)

    def __repr__(self):
        return f"AtomicRule({format_rule(self)!r})"


class Base:
    """A finite set of atomic rules sharing one discipline."""

    def __init__(self, rules: Iterable[AtomicRule] = (), discipline: str = MULTISET):
        if discipline not in DISCIPLINES:
            raise ValueError(f"unknown discipline {discipline!r}")
        self.discipline = discipline
        seen: dict[AtomicRule, int] = {}
        for r in rules:
            if r.discipline != discipline:
                raise DisciplineMismatch(f"{r} is a {r.discipline} rule, base is {discipline}")
            if r not in seen:
                seen[r] = len(seen)
        self.rules: tuple[AtomicRule, ...] = tuple(seen)
        self._index = seen
        self.key = frozenset(seen)
        self._hash = hash((discipline, self.key))
        self._encoded = None
        self._weights = None
        self._shapes = None
        self._atoms = None

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __contains__(self, rule):
        return rule in self._index

    def __eq__(self, other):
        if isinstance(other, Base):
            return self.discipline == other.discipline and self.key == other.key
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Base({len(self.rules)} {self.discipline} rules)"

    def index(self, rule: AtomicRule) -> int:
        return self._index[rule]

    def issuperset(self, other: "Base") -> bool:
        return self.discipline == other.discipline and self.key >= other.key

    def extend(self, rules: Iterable[AtomicRule]) -> "Base":
        return Base(list(self.rules) + list(rules), self.discipline)

    def shapes(self) -> tuple:
        """Rules as plain ``(((assumptions, goal), ...), conclusion)`` tuples."""
        if self._shapes is None:
            self._shapes = tuple((tuple((tuple(q), g) for q, g in r.premises), r.conclusion)
                                 for r in self.rules)
        return self._shapes

    def atoms(self) -> set[str]:
        if self._atoms is not None:
            return self._atoms
        out: set[str] = set()
        for r in self.rules:
            out |= r.atoms()
        self._atoms = frozenset(out)
        return self._atoms

    # -- kernel encoding -------------------------------------------------

    def encoding(self):
        """(atom list, atom->int, by_goal, premise table) for the kernels."""
        if self._encoded is None:
            names = sorted(self.atoms())
            ids = {a: i for i, a in enumerate(names)}
            by_goal: dict[int, list[int]] = {}
            prem = []
            for ri, r in enumerate(self.rules):
                by_goal.setdefault(ids[r.conclusion], []).append(ri)
                prem.append(tuple((tuple(sorted(ids[x] for x in a)), ids[g])
                                  for a, g in r.premises))
            self._encoded = (names, ids, by_goal, prem)
        return self._encoded

    def conserved_weights(self) -> list[dict[str, int]]:
        """Integer atom weights preserved by every rule of the base.

        A weight ``w`` is conserved when each rule satisfies
        ``w(q) = sum_i (w(q_i) - w(Q_i))``; then ``S |- q`` is derivable
        (multiset discipline) only if ``w(S) = w(q)``.  Returns a basis of
        the space of conserved weights.
        """
        if self._weights is None:
            self._weights = _nullspace_weights(self)
        return self._weights


def _nullspace_weights(base: Base) -> list[dict[str, int]]:
    names = sorted(base.atoms())
    if not names:
        return []
    col = {a: i for i, a in enumerate(names)}
    rows = set()
    for r in base.rules:
        row = [0] * len(names)
        row[col[r.conclusion]] += 1
        for a, g in r.premises:
            row[col[g]] -= 1
            for x in a:
                row[col[x]] += 1
        if any(row):
            rows.add(tuple(row))
    out = []
    for vec in nullspace(sorted(rows), len(names)):
        scale = reduce(lcm, (f.denominator for f in vec), 1)
        out.append({a: int(f * scale) for a, f in zip(names, vec)})
    return out


def nullspace(rows: Sequence[Sequence[int]], width: int) -> list[list[Fraction]]:
    """Basis of {x : row . x = 0 for every row}, by exact Gauss-Jordan."""
    m = [[Fraction(v) for v in row] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pick = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pick is None:
            continue
        m[r], m[pick] = m[pick], m[r]
        lead = m[r][c]
        m[r] = [v / lead for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    basis = []
    for free in (c for c in range(width) if c not in pivots):
        vec = [Fraction(0)] * width
        vec[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][free]
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class Derivation:
    """A derivation tree; ``rule is None`` marks a Ref leaf.

    ``splits[i]`` is the share of ``resources`` handed to premise ``i``
    (multiset discipline only; empty under the set discipline).
    """

    resources: Multiset
    goal: str
    rule: AtomicRule | None = None
    splits: tuple[Multiset, ...] = ()
    premises: tuple["Derivation", ...] = ()
    discipline: str = MULTISET

    def __post_init__(self):
        if not isinstance(self.resources, Multiset):
            res = self.resources
            if self.discipline == SET:
                res = set(res)
            object.__setattr__(self, "resources", Multiset(res))

    @property
    def is_ref(self) -> bool:
        return self.rule is None

    def premise_statement(self, i: int) -> tuple[Multiset, str]:
        assume, goal = self.rule.premises[i]
        if self.discipline == SET:
            return Multiset(set(self.resources) | set(assume)), goal
        return self.splits[i] + assume, goal

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def rules_used(self) -> list[AtomicRule]:
        """Rules in post-order (children before parents)."""
        out = []
        for p in self.premises:
            out.extend(p.rules_used())
        if self.rule is not None:
            out.append(self.rule)
        return out

    def statement(self) -> str:
        return f"{', '.join(self.resources)} |- {self.goal}"


def ref(atom: str, resources: Iterable[str] | None = None, discipline: str = MULTISET) -> Derivation:
    res = Multiset([atom]) if resources is None else resources
    return Derivation(res, atom, None, (), (), discipline)


def app(rule: AtomicRule, premises: Sequence[Derivation], splits: Sequence[Multiset] | None = None,
        resources: Iterable[str] | None = None) -> Derivation:
    """Build an App node, inferring splits (multiset) or resources (set)."""
    if rule.discipline == SET:
        if resources is None:
            raise ValueError("set-discipline App needs explicit resources")
        return Derivation(Multiset(set(resources)), rule.conclusion, rule, (), tuple(premises), SET)
    if splits is None:
        splits = tuple(p.resources - a for p, (a, _) in zip(premises, rule.premises))
    total = reduce(lambda x, y: x + y, splits, EMPTY)
    return Derivation(total, rule.conclusion, rule, tuple(splits), tuple(premises), MULTISET)


@dataclass(frozen=True)
class Budget:
    max_height: int | None = None
    max_nodes: int | None = None

    def height_for(self, base: Base, resources: Multiset) -> int:
        if self.max_height is not None:
            return self.max_height
        return 2 * (len(base) + len(resources)) + 8

    def nodes(self) -> int:
        return self.max_nodes if self.max_nodes is not None else default_node_budget()


def derive(base: Base, resources: Iterable[str], goal: str, budget: Budget | None = None,
           backend=None, weights: bool = True, models: Iterable = ()):
    """Search for a derivation of ``resources |- goal`` in ``base``.

    Returns ``Found(Derivation)``, ``NotFound`` (no derivation exists) or
    ``BudgetExhausted``.  Search is goal directed; under the multiset
    discipline it deepens the height bound iteratively and prunes repeated
    statements along a branch and statements violating a conserved weight.

    ``models`` are optional valuations (see ``besiml.models``); those that
    respect the base prune every state they refute.  The others are ignored.
    """
    if isinstance(resources, (set, frozenset)) and base.discipline == MULTISET:
        raise DisciplineMismatch("a multiset base needs multiset resources")
    budget = budget or Budget()
    impl = backend or _kernel.impl
    names, ids, by_goal, prem = base.encoding()
    res_ms = Multiset(set(resources)) if base.discipline == SET else Multiset(resources)
    extra = sorted(({goal} | set(res_ms)) - set(ids))
    ids = dict(ids)
    for a in extra:
        ids[a] = len(ids)
    enc = tuple(sorted(ids[a] for a in res_ms))
    g = ids[goal]
    pending = _candidate_models(base, names, res_ms, goal, models)
    if pending is False:
        return NotFound(0)
    wvec = None
    if base.discipline == MULTISET and weights:
        basis = base.conserved_weights()
        wvec = [[w.get(a, 0) for a in names] + [0] * len(extra) for w in basis]
        for j in range(len(extra)):
            unit = [0] * len(ids)
            unit[len(names) + j] = 1
            wvec.append(unit)
        wvec = wvec or None

    def run(nodes, kmodels):
        if base.discipline == MULTISET:
            return impl.search_multiset(by_goal, prem, enc, g, budget.height_for(base, res_ms),
                                        nodes, wvec, kmodels)
        return impl.search_set(by_goal, prem, enc, g, nodes, kmodels)

    # a short unpruned attempt first: it settles most queries without
    # paying for verifying the valuations
    spent = 0
    status, tree, nodes = run(min(_PROBE_NODES, budget.nodes()) if pending else budget.nodes(), None)
    if status == _kernel.EXHAUSTED and pending:
        kmodels = [v.encode(names) for v in pending if v.respects(base)] or None
        spent = nodes
        status, tree, nodes = run(budget.nodes(), kmodels)
    nodes += spent
    if status == _kernel.FOUND:
        rev = {v: k for k, v in ids.items()}
        if base.discipline == MULTISET:
            d = _build_multiset(base, tree, res_ms, goal, rev)
        else:
            d = _build_set(base, tree, set(res_ms), goal)
        return Found(d, nodes)
    if status == _kernel.NOT_FOUND:
        return NotFound(nodes)
    return BudgetExhausted(nodes, "node or height budget exhausted")


_PROBE_NODES = 2000


def _candidate_models(base: Base, names, res: Multiset, goal: str, models):
    """Distinct valuations covering the query, or False when one that
    respects ``base`` already refutes the query.  Respect of the returned
    ones is checked only if they get used."""
    if not models:
        return None
    atoms = base.atoms()
    if goal not in atoms or not set(res) <= atoms:
        return None
    rest, seen = [], set()
    for v in models:
        key = (v.algebra.name, tuple(v.values.get(a) for a in names))
        if key in seen:
            continue
        seen.add(key)
        if v.refutes(res, goal):
            if v.respects(base):
                return False
        else:
            rest.append(v)
    return rest or None


def _build_multiset(base: Base, tree, res: Multiset, goal: str, rev) -> Derivation:
    if tree == _kernel.REF:
        return Derivation(res, goal)
    ri, sp, kids = tree
    rule = base.rules[ri]
    splits = tuple(Multiset(rev[x] for x in part) for part in sp)
    children = tuple(
        _build_multiset(base, kid, splits[i] + rule.premises[i][0], rule.premises[i][1], rev)
        for i, kid in enumerate(kids))
    return Derivation(res, goal, rule, splits, children, MULTISET)


def _build_set(base: Base, tree, res: set, goal: str) -> Derivation:
    if tree == _kernel.REF:
        return Derivation(Multiset(res), goal, discipline=SET)
    ri, kids = tree
    rule = base.rules[ri]
    children = tuple(_build_set(base, kid, res | set(rule.premises[i][0]), rule.premises[i][1])
                     for i, kid in enumerate(kids))
    return Derivation(Multiset(res), goal, rule, (), children, SET)


def check_derivation(base: Base, d: Derivation, expected: tuple[Iterable[str], str] | None = None):
    """Accept iff every node is a correct Ref or App instance over ``base``."""
    if expected is not None:
        res, goal = expected
        want = Multiset(set(res)) if base.discipline == SET else Multiset(res)
        if d.resources != want or d.goal != goal:
            return Reject((), f"derivation concludes {d.statement()}, expected "
                              f"{', '.join(want)} |- {goal}")
    return _check(base, d, ())


def _check(base: Base, d: Derivation, loc: tuple[int, ...]):
    if d.discipline != base.discipline:
        return Reject(loc, "discipline differs from the base")
    if d.rule is None:
        if d.premises or d.splits:
            return Reject(loc, "Ref leaf has premises")
        if base.discipline == MULTISET:
            if d.resources != Multiset([d.goal]):
                return Reject(loc, f"Ref needs exactly [{d.goal}], got {d.resources}")
        elif d.goal not in d.resources:
            return Reject(loc, f"Ref needs {d.goal} among the resources")
        return Accept
    rule = d.rule
    if rule not in base:
        return Reject(loc, f"rule {rule} is not in the base")
    if rule.conclusion != d.goal:
        return Reject(loc, f"rule concludes {rule.conclusion}, node states {d.goal}")
    n = len(rule.premises)
    if len(d.premises) != n:
        return Reject(loc, f"rule has {n} premises, node has {len(d.premises)}")
    if base.discipline == MULTISET:
        if len(d.splits) != n:
            return Reject(loc, "split count differs from premise count")
        total = reduce(lambda x, y: x + y, d.splits, EMPTY)
        if total != d.resources:
            return Reject(loc, f"splits union to {total}, node has {d.resources}")
    elif d.splits:
        return Reject(loc, "set-discipline node carries splits")
    for i, child in enumerate(d.premises):
        res, goal = d.premise_statement(i)
        if child.resources != res or child.goal != goal:
            return Reject(loc + (i,), f"premise {i} should state {', '.join(res)} |- {goal}, "
                                      f"states {child.statement()}")
        verdict = _check(base, child, loc + (i,))
        if not verdict:
            return verdict
    return Accept


def graft(outer: Derivation, hypotheses: Sequence[str], inner: Sequence[Derivation],
          extension: Base | None = None) -> Derivation:
    """Compose derivations along hypotheses (constructive atomic cut).

    ``outer`` derives ``P ; S |- q`` with ``P = hypotheses``; ``inner[i]``
    derives ``T_i |- P[i]``.  The result derives ``T_1 ; ... ; T_n ; S |- q``
    and checks against any base containing the rules of both.
    """
    if outer.discipline != MULTISET:
        raise GraftError("graft is defined for the multiset discipline")
    hypotheses = list(hypotheses)
    if len(hypotheses) != len(inner):
        raise GraftError("one inner derivation per hypothesis is required")
    for p, d in zip(hypotheses, inner):
        if d.goal != p:
            raise GraftError(f"inner derivation concludes {d.goal}, hypothesis is {p}")
    if not outer.resources.contains_all(hypotheses):
        raise GraftError(f"hypotheses {hypotheses} are not among {outer.resources}")
    result = _graft(outer, list(range(len(hypotheses))), hypotheses, inner)
    if extension is not None:
        verdict = check_derivation(extension, result)
        if not verdict:
            raise GraftError(f"grafted derivation does not check: {verdict}")
    return result


def _graft(d: Derivation, hyp: list[int], atoms: list[str], inner) -> Derivation:
    if not hyp:
        return d
    if d.rule is None:
        (i,) = hyp
        return inner[i]
    room = [s.counts() for s in d.splits]
    share: list[list[int]] = [[] for _ in d.splits]
    for i in hyp:
        for j, c in enumerate(room):
            if c[atoms[i]] > 0:
                c[atoms[i]] -= 1
                share[j].append(i)
                break
        else:
            raise GraftError("hypothesis not found in any premise split")
    new_splits, kids = [], []
    for j, child in enumerate(d.premises):
        mine = share[j]
        new_child = _graft(child, mine, atoms, inner)
        kept = d.splits[j] - [atoms[i] for i in mine]
        for i in mine:
            kept = kept + inner[i].resources
        new_splits.append(kept)
        kids.append(new_child)
    total = reduce(lambda x, y: x + y, new_splits, EMPTY)
    return Derivation(total, d.goal, d.rule, tuple(new_splits), tuple(kids), MULTISET)


# ---------------------------------------------------------------------------
# Text format for bases

_RULE_RE = re.compile(r"^\s*(?:\((?P<prem>.*)\))?\s*=>\s*(?P<concl>\S+)\s*$")
_PREM_RE = re.compile(r"^\s*\{(?P<assume>[^{}]*)\}\s*>\s*(?P<goal>\S+)\s*$")


def format_rule(rule: AtomicRule) -> str:
    if not rule.premises:
        return f"=> {rule.conclusion}"
    parts = [f"{{{','.join(a)}}} > {g}" for a, g in rule.premises]
    return f"({', '.join(parts)}) => {rule.conclusion}"


def parse_rule(line: str, discipline: str = MULTISET) -> AtomicRule:
    m = _RULE_RE.match(line)
    if not m:
        raise ParseError(f"cannot parse rule: {line!r}")
    premises = []
    body = m.group("prem")
    if body is not None and body.strip():
        for chunk in _split_premises(body):
            pm = _PREM_RE.match(chunk)
            if not pm:
                raise ParseError(f"cannot parse premise {chunk.strip()!r} in {line!r}")
            assume = [check_atom_name(a.strip()) for a in pm.group("assume").split(",") if a.strip()]
            premises.append((assume, check_atom_name(pm.group("goal"))))
    return AtomicRule(premises, check_atom_name(m.group("concl")), discipline)


def _split_premises(body: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in body:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def parse_base(text: str, discipline: str = MULTISET) -> Base:
    rules = []
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        rules.append(parse_rule(s, discipline))
    return Base(rules, discipline)


def format_base(base: Base, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines += [format_rule(r) for r in base.rules]
    return "\n".join(lines) + "\n"


def read_base(path, discipline: str = MULTISET) -> Base:
    with open(path, encoding="utf-8") as fh:
        return parse_base(fh.read(), discipline)


# ---------------------------------------------------------------------------
# Derivation documents


def derivation_to_dict(base: Base, d: Derivation) -> dict:
    node = {
        "rule": None if d.rule is None else base.index(d.rule),
        "resources": list(d.resources),
        "goal": d.goal,
    }
    if d.discipline == MULTISET and d.rule is not None:
        node["splits"] = [list(s) for s in d.splits]
    node["premises"] = [derivation_to_dict(base, p) for p in d.premises]
    return node


def derivation_from_dict(base: Base, node: dict) -> Derivation:
    ri = node.get("rule")
    if ri is None:
        rule = None
    else:
        if not isinstance(ri, int) or not 0 <= ri < len(base.rules):
            raise ValueError(f"rule index {ri!r} out of range")
        rule = base.rules[ri]
    res = node["resources"]
    res = Multiset(set(res)) if base.discipline == SET else Multiset(res)
    splits = tuple(Multiset(s) for s in node.get("splits", ()))
    kids = tuple(derivation_from_dict(base, p) for p in node.get("premises", ()))
    return Derivation(res, node["goal"], rule, splits, kids, base.discipline)


def derivation_document(base: Base, d: Derivation) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "derivation",
        "discipline": base.discipline,
        "base": [format_rule(r) for r in base.rules],
        "derivation": derivation_to_dict(base, d),
    }


def load_derivation_document(doc: dict) -> tuple[Base, Derivation]:
    if doc.get("kind") != "derivation":
        raise ValueError("not a derivation document")
    discipline = doc.get("discipline", MULTISET)
    base = Base([parse_rule(line, discipline) for line in doc["base"]], discipline)
    return base, derivation_from_dict(base, doc["derivation"])
