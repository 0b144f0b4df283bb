"""Strategies and independent oracles shared by the test modules.

The oracles here deliberately share nothing with the search code: they use
``collections.Counter`` for multisets and plain recursion without memo
tables, loop checks or pruning.
"""

from __future__ import annotations

from collections import Counter
from itertools import product

from hypothesis import strategies as st

from besiml.base import MULTISET, SET, AtomicRule, Base
from besiml.syntax import (
    IMLL,
    IPL,
    And,
    Atom,
    Falsum,
    Imp,
    Lolli,
    Or,
    Sequent,
    Tensor,
    Unit,
)

ATOMS = ("p", "q", "r")


def imll_formulas(atoms=ATOMS, max_leaves=6):
    base = st.one_of(st.sampled_from([Atom(a) for a in atoms]), st.just(Unit()))
    return st.recursive(
        base,
        lambda kids: st.one_of(st.builds(Tensor, kids, kids), st.builds(Lolli, kids, kids)),
        max_leaves=max_leaves,
    )


def ipl_formulas(atoms=ATOMS, max_leaves=6):
    base = st.one_of(st.sampled_from([Atom(a) for a in atoms]), st.just(Falsum()))
    return st.recursive(
        base,
        lambda kids: st.one_of(st.builds(And, kids, kids), st.builds(Or, kids, kids),
                               st.builds(Imp, kids, kids)),
        max_leaves=max_leaves,
    )


def sequents(logic=IMLL, atoms=ATOMS, max_context=3, max_leaves=4):
    forms = imll_formulas(atoms, max_leaves) if logic == IMLL else ipl_formulas(atoms, max_leaves)
    return st.builds(lambda ctx, goal: Sequent(ctx, goal, logic),
                     st.lists(forms, max_size=max_context), forms)


def atom_lists(atoms=ATOMS, max_size=4, min_size=0):
    return st.lists(st.sampled_from(atoms), min_size=min_size, max_size=max_size)


def rules(discipline=MULTISET, atoms=ATOMS, max_premises=2, max_assume=2):
    premise = st.tuples(st.lists(st.sampled_from(atoms), max_size=max_assume), st.sampled_from(atoms))
    return st.builds(lambda prem, concl: AtomicRule(prem, concl, discipline),
                     st.lists(premise, max_size=max_premises), st.sampled_from(atoms))


def bases(discipline=MULTISET, atoms=ATOMS, max_rules=5, min_rules=0, **kw):
    return st.builds(lambda rs: Base(rs, discipline),
                     st.lists(rules(discipline, atoms, **kw), min_size=min_rules, max_size=max_rules))


# ---------------------------------------------------------------------------
# Derivability oracle: bounded naive enumeration


def _counter_splits(c: Counter, k: int):
    keys = sorted(c)
    choices = []
    for a in keys:
        n = c[a]
        opts = [t for t in product(range(n + 1), repeat=k) if sum(t) == n]
        choices.append(opts)
    for combo in product(*choices):
        parts = [Counter() for _ in range(k)]
        for a, t in zip(keys, combo):
            for i in range(k):
                if t[i]:
                    parts[i][a] += t[i]
        yield parts


def naive_derivable(base: Base, resources, goal: str, height: int) -> bool:
    """Is there a derivation of height <= ``height``?  Exponential; tiny inputs only."""
    if base.discipline == MULTISET:
        return _naive_ms(base, Counter(resources), goal, height)
    return _naive_set(base, frozenset(resources), goal, height)


def _naive_ms(base, res: Counter, goal, h):
    res = +res
    if sum(res.values()) == 1 and res[goal] == 1:
        return True
    if h <= 0:
        return False
    for rule in base.rules:
        if rule.conclusion != goal:
            continue
        n = len(rule.premises)
        if n == 0:
            if not res:
                return True
            continue
        for parts in _counter_splits(res, n):
            if all(_naive_ms(base, parts[i] + Counter(rule.premises[i][0]), rule.premises[i][1], h - 1)
                   for i in range(n)):
                return True
    return False


def _naive_set(base, res: frozenset, goal, h):
    if goal in res:
        return True
    if h <= 0:
        return False
    for rule in base.rules:
        if rule.conclusion == goal and all(
                _naive_set(base, res | frozenset(q), g, h - 1) for q, g in rule.premises):
            return True
    return False


def derivable_queries(base: Base, max_res: int = 2, nodes: int = 1500):
    """All (resources, goal, derivation) found among small queries, smallest first."""
    from itertools import combinations_with_replacement

    from besiml.base import Budget, derive

    out = []
    for k in range(max_res + 1):
        for res in combinations_with_replacement(sorted(base.atoms() or ATOMS), k):
            for goal in sorted(base.atoms() or ATOMS):
                r = derive(base, list(res), goal, Budget(max_nodes=nodes))
                if r.found:
                    out.append((list(res), goal, r.value))
    return out


# ---------------------------------------------------------------------------
# IPL oracle: Kripke countermodels on small rooted frames

def _frames():
    """Rooted posets with up to three worlds, as (worlds, above) pairs."""
    yield 1, {0: {0}}
    yield 2, {0: {0, 1}, 1: {1}}
    yield 3, {0: {0, 1, 2}, 1: {1, 2}, 2: {2}}
    yield 3, {0: {0, 1, 2}, 1: {1}, 2: {2}}


def _forces(f, w, above, val):
    if isinstance(f, Atom):
        return w in val[f.name]
    if isinstance(f, Falsum):
        return False
    if isinstance(f, And):
        return _forces(f.left, w, above, val) and _forces(f.right, w, above, val)
    if isinstance(f, Or):
        return _forces(f.left, w, above, val) or _forces(f.right, w, above, val)
    if isinstance(f, Imp):
        return all(not _forces(f.left, v, above, val) or _forces(f.right, v, above, val)
                   for v in above[w])
    raise TypeError(f)


def kripke_countermodel(s: Sequent):
    """A (frame, valuation) where the root forces the context but not the
    conclusion, or None.  Sound refutation: any hit proves unprovability."""
    from besiml.syntax import atoms_of

    names = sorted(set().union(*(atoms_of(f) for f in s.formulas())))
    for n, above in _frames():
        ups = [frozenset(w for w in range(n) if (mask >> w) & 1) for mask in range(1 << n)]
        ups = [u for u in ups if all(above[w] <= u for w in u)]
        for choice in product(ups, repeat=len(names)):
            val = dict(zip(names, choice))
            if all(_forces(g, 0, above, val) for g in s.context) and not _forces(s.conclusion, 0, above, val):
                return above, val
    return None
