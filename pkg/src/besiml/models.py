"""Finite algebraic invariants for pruning derivation search.

A valuation sends atoms to elements of a finite commutative residuated
lattice.  It *respects* a base when every rule is sound for it:

    prod_i ((prod Q_i) -o q_i)  <=  c      for each rule ((Q_i > q_i)_i) => c

and then ``S |- q`` derivable implies ``prod S <= value(q)`` (induction on the
derivation).  A respecting valuation with ``prod S`` not below ``value(q)``
is therefore a certificate that ``S |- q`` is underivable, and the search may
drop such states.  Respect is always checked against the base itself, so a
wrong valuation can cost pruning power but never soundness.

Multiset bases use powerset quantales of small commutative monoids; set
bases use the Heyting algebras of up-sets of small posets (product = meet).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Mapping, Sequence

from besiml.syntax import (
    And,
    Atom,
    Falsum,
    Formula,
    Imp,
    Lolli,
    Or,
    Tensor,
    Unit,
)


@dataclass(frozen=True)
class Algebra:
    """Elements are ``0..size-1``; tables are tuples of tuples."""

    name: str
    mul: tuple
    res: tuple
    leq: tuple
    join: tuple
    unit: int
    bottom: int
    top: int

    @property
    def size(self) -> int:
        return len(self.mul)

    def prod(self, xs: Iterable[int]) -> int:
        return reduce(lambda a, b: self.mul[a][b], xs, self.unit)


def powerset_quantale(name: str, op: Sequence[Sequence[int]], identity: int) -> Algebra:
    """Subsets of a finite commutative monoid, as bitmasks, ordered by inclusion."""
    k = len(op)
    full = (1 << k) - 1
    els = range(1 << k)

    def members(x):
        return [i for i in range(k) if x >> i & 1]

    def mul(x, y):
        out = 0
        for a in members(x):
            for b in members(y):
                out |= 1 << op[a][b]
        return out

    def res(x, y):
        out = 0
        for m in range(k):
            if all(y >> op[m][a] & 1 for a in members(x)):
                out |= 1 << m
        return out

    return Algebra(
        name,
        tuple(tuple(mul(x, y) for y in els) for x in els),
        tuple(tuple(res(x, y) for y in els) for x in els),
        tuple(tuple(x & ~y == 0 for y in els) for x in els),
        tuple(tuple(x | y for y in els) for x in els),
        1 << identity,
        0,
        full,
    )


def upset_heyting(name: str, order: Sequence[tuple[int, int]], points: int) -> Algebra:
    """Up-sets of a finite poset (``order`` lists pairs a <= b), meet as product."""
    le = {(a, a) for a in range(points)} | set(order)
    changed = True
    while changed:
        changed = False
        for a, b in list(le):
            for c, d in list(le):
                if b == c and (a, d) not in le:
                    le.add((a, d))
                    changed = True
    ups = []
    for mask in range(1 << points):
        if all(not (mask >> a & 1) or (mask >> b & 1) for a, b in le):
            ups.append(mask)
    idx = {m: i for i, m in enumerate(ups)}
    full = (1 << points) - 1

    def imp(x, y):
        # largest up-set z with z & x <= y
        best = 0
        for z in ups:
            if z & x & ~y == 0:
                best |= z
        return best

    n = len(ups)
    return Algebra(
        name,
        tuple(tuple(idx[ups[i] & ups[j]] for j in range(n)) for i in range(n)),
        tuple(tuple(idx[imp(ups[i], ups[j])] for j in range(n)) for i in range(n)),
        tuple(tuple(ups[i] & ~ups[j] == 0 for j in range(n)) for i in range(n)),
        tuple(tuple(idx[ups[i] | ups[j]] for j in range(n)) for i in range(n)),
        idx[full],
        idx[0],
        idx[full],
    )


def _cyclic(n):
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def _saturating(n):
    return [[min(a + b, n - 1) for b in range(n)] for a in range(n)]


QUANTALES = (
    powerset_quantale("P(Z2)", _cyclic(2), 0),
    powerset_quantale("P(Z3)", _cyclic(3), 0),
    powerset_quantale("P(sat3)", _saturating(3), 0),
)

HEYTING = (
    upset_heyting("chain3", [(0, 1)], 2),
    upset_heyting("vee", [(0, 1), (0, 2)], 3),
    upset_heyting("chain4", [(0, 1), (1, 2)], 3),
)


@dataclass(frozen=True)
class Valuation:
    algebra: Algebra
    values: Mapping[str, int]

    def value_of(self, atoms: Iterable[str]) -> int:
        mul, vals, acc = self.algebra.mul, self.values, self.algebra.unit
        for a in atoms:
            acc = mul[acc][vals[a]]
        return acc

    def covers(self, atoms: Iterable[str]) -> bool:
        return all(a in self.values for a in atoms)

    def respects(self, base) -> bool:
        alg = self.algebra
        mul, res, leq, vals = alg.mul, alg.res, alg.leq, self.values
        if not self.covers(base.atoms()):
            return False
        for prems, concl in base.shapes():
            body = alg.unit
            for q, g in prems:
                acc = alg.unit
                for a in q:
                    acc = mul[acc][vals[a]]
                body = mul[body][res[acc][vals[g]]]
            if not leq[body][vals[concl]]:
                return False
        return True

    def refutes(self, resources: Iterable[str], goal: str) -> bool:
        """True when ``resources |- goal`` fails in this valuation."""
        res = list(resources)
        if not self.covers(res + [goal]):
            return False
        return not self.algebra.leq[self.value_of(res)][self.values[goal]]

    def encode(self, names: Sequence[str]):
        """Kernel form: (values by atom id, product table, order table, unit)."""
        alg = self.algebra
        return ([self.values[a] for a in names], alg.mul, alg.leq, alg.unit)


def interpret(f: Formula, alg: Algebra, env: Mapping[str, int]) -> int:
    """Compositional value of a formula; connectives read in ``alg``."""
    if isinstance(f, Atom):
        return env[f.name]
    if isinstance(f, (Tensor, And)):
        return alg.mul[interpret(f.left, alg, env)][interpret(f.right, alg, env)]
    if isinstance(f, (Lolli, Imp)):
        return alg.res[interpret(f.left, alg, env)][interpret(f.right, alg, env)]
    if isinstance(f, Or):
        return alg.join[interpret(f.left, alg, env)][interpret(f.right, alg, env)]
    if isinstance(f, Unit):
        return alg.unit
    if isinstance(f, Falsum):
        return alg.bottom
    raise TypeError(f"cannot interpret {f!r}")


def formula_valuations(atom_of: Mapping[Formula, str], originals: Sequence[str],
                       algebras: Sequence[Algebra]) -> Iterable[Valuation]:
    """Valuations reading each flat atom as the value of its formula, for
    every assignment of the original atoms."""
    order = sorted(atom_of, key=lambda f: (degree_of(f), str(f)))
    pos = {f: i for i, f in enumerate(order)}
    names = [atom_of[f] for f in order]
    steps = []
    for f in order:
        if isinstance(f, Atom):
            steps.append(("atom", originals.index(f.name), 0))
        elif isinstance(f, (Tensor, And)):
            steps.append(("mul", pos[f.left], pos[f.right]))
        elif isinstance(f, (Lolli, Imp)):
            steps.append(("res", pos[f.left], pos[f.right]))
        elif isinstance(f, Or):
            steps.append(("join", pos[f.left], pos[f.right]))
        elif isinstance(f, Unit):
            steps.append(("unit", 0, 0))
        elif isinstance(f, Falsum):
            steps.append(("bottom", 0, 0))
        else:
            raise TypeError(f"cannot interpret {f!r}")
    for alg in algebras:
        tables = {"mul": alg.mul, "res": alg.res, "join": alg.join}
        consts = {"unit": alg.unit, "bottom": alg.bottom}
        for choice in product(range(alg.size), repeat=len(originals)):
            val = []
            for op, x, y in steps:
                if op == "atom":
                    val.append(choice[x])
                elif op in consts:
                    val.append(consts[op])
                else:
                    val.append(tables[op][val[x]][val[y]])
            yield Valuation(alg, dict(zip(names, val)))


def degree_of(f: Formula) -> int:
    if isinstance(f, (Tensor, And, Lolli, Imp, Or)):
        return 1 + max(degree_of(f.left), degree_of(f.right))
    return 0
