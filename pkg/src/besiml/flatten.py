"""Flattening of formulas into atoms, the bespoke bases M (IMLL) and N
(IPL), and extraction of calculus proofs from atomic derivations.

Every non-atomic formula of the closure receives a fresh atom ``#f<i>``;
``#`` cannot occur in user atoms, so the fresh atoms never clash.  Fresh
names follow the canonical order (size, then text) of the closure, which
makes bases and derivations reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from besiml.base import MULTISET, SET, AtomicRule, Base, Derivation
from besiml.nimll import ProofNode, _nj, contract, cut, node, weaken
from besiml.syntax import (
    IMLL,
    IPL,
    RESERVED_PREFIX,
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
    connectives,
    logic_of,
    subformulas,
)

STANDARD = "standard"
STAR = "star"


class FlattenError(ValueError):
    pass


class ExtractionError(ValueError):
    pass


def _canonical(f: Formula):
    return (connectives(f), str(f))


@dataclass(frozen=True)
class FlatteningMap:
    domain: frozenset
    forward: dict = field(hash=False, compare=False)
    inverse: dict = field(hash=False, compare=False)
    logic: str = IMLL

    def flat(self, f: Formula) -> str:
        try:
            return self.forward[f]
        except KeyError:
            raise FlattenError(f"{f} is not in the flattening domain") from None

    def deflat(self, atom: str) -> Formula:
        return self.inverse.get(atom, Atom(atom))

    def image(self) -> set[str]:
        return set(self.inverse)

    def fresh_atoms(self) -> list[str]:
        return [a for a, f in self.inverse.items() if not isinstance(f, Atom)]

    def compounds(self) -> list[Formula]:
        return sorted((f for f in self.domain if not isinstance(f, Atom)), key=_canonical)

    def table(self) -> str:
        rows = sorted(self.forward.items(), key=lambda kv: _canonical(kv[0]))
        return "\n".join(f"{f}\t{a}" for f, a in rows) + "\n"


def make_flattening(xi: Iterable[Formula] | Sequent) -> FlatteningMap:
    """Injective atomization of a subformula-closed set, identity on atoms."""
    domain = frozenset(subformulas(xi)) if isinstance(xi, Sequent) else frozenset(xi)
    if subformulas(domain) != domain:
        raise FlattenError("the domain must be closed under subformulas")
    logics = {logic_of(f) for f in domain} - {None}
    if len(logics) > 1:
        raise FlattenError("the domain mixes IMLL and IPL formulas")
    logic = logics.pop() if logics else IMLL
    forward: dict[Formula, str] = {}
    for f in domain:
        if isinstance(f, Atom):
            if f.name.startswith(RESERVED_PREFIX):
                raise FlattenError(f"atom {f.name} uses the reserved prefix {RESERVED_PREFIX}")
            forward[f] = f.name
    for i, f in enumerate(sorted((f for f in domain if not isinstance(f, Atom)), key=_canonical)):
        forward[f] = f"{RESERVED_PREFIX}f{i}"
    inverse = {a: f for f, a in forward.items()}
    return FlatteningMap(domain, forward, inverse, logic)


def flattening_for(s: Sequent) -> FlatteningMap:
    m = make_flattening(subformulas(s))
    if s.logic != m.logic and m.fresh_atoms():
        raise FlattenError("sequent logic differs from its formulas")
    object.__setattr__(m, "logic", s.logic)
    return m


def apply_flat(m: FlatteningMap, gamma: Iterable[Formula]) -> Multiset:
    return Multiset(m.flat(f) for f in gamma)


def apply_deflat(m: FlatteningMap, atoms: Iterable[str]) -> Multiset:
    return Multiset(m.deflat(a) for a in atoms)


def default_alphabet(m: FlatteningMap) -> list[str]:
    return sorted(m.image())


def _alphabet(m, alphabet):
    out = sorted(set(alphabet)) if alphabet is not None else default_alphabet(m)
    missing = m.image() - set(out)
    if missing:
        raise FlattenError(f"alphabet misses image atoms {sorted(missing)}")
    return out


def build_base_M(m: FlatteningMap, alphabet: Iterable[str] | None = None) -> Base:
    """All instances of the IMLL atomic system over the closure.

    The schematic atom of the tensor and unit eliminations ranges over
    ``alphabet`` (default: the image of the flattening).
    """
    alpha = _alphabet(m, alphabet)
    f = m.flat
    rules = []
    for xi in m.compounds():
        if isinstance(xi, Lolli):
            s, t = xi.left, xi.right
            rules.append(AtomicRule([([f(s)], f(t))], f(xi)))
            rules.append(AtomicRule([([], f(xi)), ([], f(s))], f(t)))
        elif isinstance(xi, Tensor):
            s, t = xi.left, xi.right
            rules.append(AtomicRule([([], f(s)), ([], f(t))], f(xi)))
            for p in alpha:
                rules.append(AtomicRule([([], f(xi)), ([f(s), f(t)], p)], p))
        elif isinstance(xi, Unit):
            rules.append(AtomicRule([], f(xi)))
            for p in alpha:
                rules.append(AtomicRule([([], f(xi)), ([], p)], p))
        else:
            raise FlattenError(f"{xi} is not an IMLL formula")
    return Base(rules, MULTISET)


def build_base_N(m: FlatteningMap, alphabet: Iterable[str] | None = None,
                 conjunction: str = STANDARD) -> Base:
    """All instances of the IPL atomic system over the closure.

    With ``conjunction="star"`` the two projection rules for conjunction
    are replaced by the elimination-shaped rule
    ``({} > (a/\\b)', {a', b'} > p) => p``.
    """
    if conjunction not in (STANDARD, STAR):
        raise ValueError(f"unknown conjunction mode {conjunction!r}")
    alpha = _alphabet(m, alphabet)
    f = m.flat
    rules = []

    def r(prem, concl):
        rules.append(AtomicRule(prem, concl, SET))

    for xi in m.compounds():
        if isinstance(xi, And):
            s, t = xi.left, xi.right
            r([([], f(s)), ([], f(t))], f(xi))
            if conjunction == STANDARD:
                r([([], f(xi))], f(s))
                r([([], f(xi))], f(t))
            else:
                for p in alpha:
                    r([([], f(xi)), ([f(s), f(t)], p)], p)
        elif isinstance(xi, Imp):
            s, t = xi.left, xi.right
            r([([f(s)], f(t))], f(xi))
            r([([], f(s)), ([], f(xi))], f(t))
        elif isinstance(xi, Or):
            s, t = xi.left, xi.right
            r([([], f(s))], f(xi))
            r([([], f(t))], f(xi))
            for p in alpha:
                r([([], f(xi)), ([f(s)], p), ([f(t)], p)], p)
        elif isinstance(xi, Falsum):
            for p in alpha:
                r([([], f(xi))], p)
        else:
            raise FlattenError(f"{xi} is not an IPL formula")
    return Base(rules, SET)


def format_table(m: FlatteningMap) -> str:
    return m.table()


# ---------------------------------------------------------------------------
# Rule classification


def classify_M(m: FlatteningMap, rule: AtomicRule):
    """Identify the IMLL row a rule instantiates.

    Returns ``(label, order)`` where ``order`` lists rule premise indices in
    the premise order of the corresponding calculus rule.
    """
    inv = m.deflat
    prem = rule.premises
    n = len(prem)
    if n == 0:
        if isinstance(inv(rule.conclusion), Unit):
            return "II", ()
    elif n == 1:
        (a, b), = prem
        c = inv(rule.conclusion)
        if isinstance(c, Lolli) and len(a) == 1 and inv(a.items[0]) == c.left and inv(b) == c.right:
            return "-oI", (0,)
    elif n == 2:
        concl = rule.conclusion
        for i, j in ((0, 1), (1, 0)):
            (ai, qi), (aj, qj) = prem[i], prem[j]
            x, y = inv(qi), inv(qj)
            if not ai and not aj:
                if isinstance(x, Lolli) and x.left == y and x.right == inv(concl):
                    return "-oE", (i, j)
                z = inv(concl)
                if isinstance(z, Tensor) and z.left == x and z.right == y:
                    return "*I", (i, j)
                if isinstance(x, Unit) and qj == concl:
                    return "IE", (i, j)
            elif not ai and len(aj) == 2 and isinstance(x, Tensor) and qj == concl:
                if sorted(map(str, (inv(u) for u in aj))) == sorted(map(str, (x.left, x.right))):
                    return "*E", (i, j)
    raise ExtractionError(f"rule {rule} is not generated by the IMLL construction")


def classify_N(m: FlatteningMap, rule: AtomicRule):
    inv = m.deflat
    prem = rule.premises
    n = len(prem)
    concl = rule.conclusion
    z = inv(concl)
    if n == 1:
        (a, q), = prem
        x = inv(q)
        if not a:
            if isinstance(x, And) and z == x.left:
                return "/\\E1", (0,)
            if isinstance(x, And) and z == x.right:
                return "/\\E2", (0,)
            if isinstance(z, Or) and x == z.left:
                return "\\/I1", (0,)
            if isinstance(z, Or) and x == z.right:
                return "\\/I2", (0,)
            if isinstance(x, Falsum):
                return "_|_E", (0,)
        elif len(a) == 1 and isinstance(z, Imp) and inv(a.items[0]) == z.left and x == z.right:
            return "->I", (0,)
    elif n == 2:
        for i, j in ((0, 1), (1, 0)):
            (ai, qi), (aj, qj) = prem[i], prem[j]
            x, y = inv(qi), inv(qj)
            if not ai and not aj:
                if isinstance(x, Imp) and x.left == y and x.right == z:
                    return "->E", (i, j)
                if isinstance(z, And) and z.left == x and z.right == y:
                    return "/\\I", (i, j)
            elif not ai and isinstance(x, And) and qj == concl:
                if {inv(u) for u in aj} == {x.left, x.right}:
                    return "/\\E*", (i, j)
    elif n == 3:
        for i in range(3):
            ai, qi = prem[i]
            x = inv(qi)
            if ai or not isinstance(x, Or):
                continue
            rest = [k for k in range(3) if k != i]
            for j, k in (rest, rest[::-1]):
                (aj, qj), (ak, qk) = prem[j], prem[k]
                if qj != concl or qk != concl or len(aj) != 1 or len(ak) != 1:
                    continue
                if inv(aj.items[0]) == x.left and inv(ak.items[0]) == x.right:
                    return "\\/E", (i, j, k)
    raise ExtractionError(f"rule {rule} is not generated by the IPL construction")


# ---------------------------------------------------------------------------
# Extraction


def extract_proof(tag: str, m: FlatteningMap, d: Derivation) -> ProofNode:
    """Turn a derivation in M (tag "M") or N (tag "N") into a calculus proof
    of ``deflat(resources) |- deflat(goal)``."""
    if tag == "M":
        if d.discipline != MULTISET:
            raise ExtractionError("M derivations use the multiset discipline")
        return _extract_M(m, d)
    if tag == "N":
        if d.discipline != SET:
            raise ExtractionError("N derivations use the set discipline")
        return _extract_N(m, d)
    raise ValueError(f"unknown base tag {tag!r}")


def _extract_M(m: FlatteningMap, d: Derivation) -> ProofNode:
    ctx = apply_deflat(m, d.resources)
    goal = m.deflat(d.goal)
    if d.rule is None:
        return node("ax", ctx, goal)
    label, order = classify_M(m, d.rule)
    kids = [_extract_M(m, d.premises[i]) for i in order]
    return node(label, ctx, goal, kids)


def _extract_N(m: FlatteningMap, d: Derivation) -> ProofNode:
    S = apply_deflat(m, d.resources)
    goal = m.deflat(d.goal)
    if d.rule is None:
        return weaken(_nj("ax", [goal], goal), S - [goal])
    label, order = classify_N(m, d.rule)
    kids = [_extract_N(m, d.premises[i]) for i in order]

    def fit(p: ProofNode, extra) -> ProofNode:
        # p proves S u extra; return a proof of S + extra
        want = S + list(extra)
        return weaken(p, want - p.context)

    if label in ("/\\E1", "/\\E2", "\\/I1", "\\/I2", "_|_E"):
        return _nj(label, S, goal, kids)
    if label == "->I":
        return _nj("->I", S, goal, [fit(kids[0], [goal.left])])
    if label in ("->E", "/\\I"):
        return contract(_nj(label, S + S, goal, kids), S)
    if label == "\\/E":
        major, a, b = kids
        x = major.formula
        return contract(_nj("\\/E", S + S, goal, [major, fit(a, [x.left]), fit(b, [x.right])]), S)
    if label == "/\\E*":
        major, minor = kids
        x = major.formula
        body = fit(minor, [x.left, x.right])
        e1 = _nj("/\\E1", S, x.left, [major])
        e2 = _nj("/\\E2", S, x.right, [major])
        return contract(contract(cut(cut(body, x.left, e1), x.right, e2), S), S)
    raise ExtractionError(f"no extraction for {label}")


# ---------------------------------------------------------------------------
# Convenience for whole sequents


def flat_query(s: Sequent, m: FlatteningMap | None = None):
    m = m or flattening_for(s)
    return m, apply_flat(m, s.context), m.flat(s.conclusion)


def bespoke_base(s: Sequent, conjunction: str = STANDARD):
    """(map, base, flat resources, flat goal) for a sequent."""
    m, res, goal = flat_query(s)
    if s.logic == IMLL:
        base = build_base_M(m)
    else:
        base = build_base_N(m, conjunction=conjunction)
    return m, base, res, goal


def flat_models(m: FlatteningMap, per_algebra: int = 256):
    """Valuations of the flat atoms read through the formulas they name:
    quantales for IMLL, Heyting algebras for IPL.  ``derive`` re-checks each
    against the base before pruning with it."""
    from itertools import islice

    from besiml.models import HEYTING, QUANTALES, formula_valuations

    algebras = QUANTALES if m.logic == IMLL else HEYTING
    originals = sorted(f.name for f in m.domain if isinstance(f, Atom))
    out = []
    for alg in algebras:
        out.extend(islice(formula_valuations(m.forward, originals, [alg]), per_algebra))
    return out


def atoms_in(s: Sequent) -> set[str]:
    out: set[str] = set()
    for f in s.formulas():
        out |= atoms_of(f)
    return out
