"""Natural deduction for IMLL (NIMLL) and for IPL (NJ with weakening and
contraction): proof objects, checkers, decision procedures and a naive
oracle.

Search does not run on natural deduction directly.  For IMLL it runs on the
cut-free two-sided sequent calculus, for IPL on the contraction-free
calculus G4ip; both terminate because every premise is strictly smaller.
Found sequent proofs are translated into natural-deduction trees, using an
introduction/elimination detour wherever a left rule has no direct
counterpart.  The checkers know only the natural-deduction rules.

Binary and ternary eliminations list the major premise first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from besiml.outcomes import (
    SCHEMA,
    Accept,
    BudgetExhausted,
    Found,
    NotFound,
    Reject,
    default_node_budget,
)
from besiml.syntax import (
    EMPTY,
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
    enumerate_splits,
    parse_sequent,
    subformulas,
)

IMLL_RULES = ("ax", "-oI", "-oE", "II", "IE", "*I", "*E")
NJ_RULES = ("ax", "->I", "->E", "/\\I", "/\\E1", "/\\E2", "\\/I1", "\\/I2", "\\/E", "_|_E", "w", "c")


@dataclass(frozen=True)
class ProofNode:
    """A natural-deduction node: rule name, concluded sequent, premises."""

    rule: str
    conclusion: Sequent
    premises: tuple["ProofNode", ...] = ()

    @property
    def context(self) -> Multiset:
        return self.conclusion.context

    @property
    def formula(self) -> Formula:
        return self.conclusion.conclusion

    @property
    def logic(self) -> str:
        return self.conclusion.logic

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def rules(self) -> list[str]:
        out = []
        for p in self.premises:
            out.extend(p.rules())
        out.append(self.rule)
        return out

    def pretty(self, indent: int = 0) -> str:
        lines = [f"{'  ' * indent}{self.conclusion}   [{self.rule}]"]
        for p in self.premises:
            lines.append(p.pretty(indent + 1))
        return "\n".join(lines)


NimllProof = ProofNode
NjProof = ProofNode


def node(rule: str, context, conclusion: Formula, premises=(), logic: str = IMLL) -> ProofNode:
    return ProofNode(rule, Sequent(Multiset(context), conclusion, logic), tuple(premises))


# ---------------------------------------------------------------------------
# Checking


def check_proof(p: ProofNode, expected: Sequent | None = None):
    """Accept iff every node is an exact instance of its rule."""
    if expected is not None and p.conclusion != expected:
        return Reject((), f"proof concludes {p.conclusion}, expected {expected}")
    return _check(p, (), p.logic)


def _sum(parts) -> Multiset:
    return reduce(lambda a, b: a + b, parts, EMPTY)


def _check(p: ProofNode, loc, logic):
    if p.logic != logic:
        return Reject(loc, f"node belongs to {p.logic}, proof is {logic}")
    rules = IMLL_RULES if logic == IMLL else NJ_RULES
    if p.rule not in rules:
        return Reject(loc, f"unknown rule {p.rule!r}")
    reason = _local(p)
    if reason:
        return Reject(loc, reason)
    for i, q in enumerate(p.premises):
        verdict = _check(q, loc + (i,), logic)
        if not verdict:
            return verdict
    return Accept


_ARITY = {"ax": 0, "II": 0, "-oI": 1, "->I": 1, "/\\E1": 1, "/\\E2": 1, "\\/I1": 1,
          "\\/I2": 1, "_|_E": 1, "w": 1, "c": 1, "\\/E": 3}


def _local(p: ProofNode) -> str | None:
    """Reason the node is not a rule instance, or None."""
    rule, ctx, phi, prem = p.rule, p.context, p.formula, p.premises
    arity = _ARITY.get(rule, 2)
    if len(prem) != arity:
        return f"{rule} takes {arity} premises, found {len(prem)}"
    c = [q.formula for q in prem]
    g = [q.context for q in prem]
    if rule == "ax":
        if ctx != Multiset([phi]):
            return "ax must conclude phi |- phi"
    elif rule == "II":
        if ctx or not isinstance(phi, Unit):
            return "II must conclude |- I"
    elif rule in ("-oI", "->I"):
        kind = Lolli if rule == "-oI" else Imp
        if not isinstance(phi, kind):
            return f"{rule} must conclude an implication"
        if c[0] != phi.right:
            return "premise conclusion differs from the consequent"
        if g[0] != ctx + [phi.left]:
            return "premise context must be the context plus the antecedent"
    elif rule in ("-oE", "->E"):
        kind = Lolli if rule == "-oE" else Imp
        if not (isinstance(c[0], kind) and c[0].right == phi and c[0].left == c[1]):
            return "major premise must be (minor -o conclusion)"
        if ctx != g[0] + g[1]:
            return "context must be the union of the premise contexts"
    elif rule in ("*I", "/\\I"):
        kind = Tensor if rule == "*I" else And
        if not (isinstance(phi, kind) and c[0] == phi.left and c[1] == phi.right):
            return f"{rule} premises must conclude the two components"
        if ctx != g[0] + g[1]:
            return "context must be the union of the premise contexts"
    elif rule == "*E":
        if not isinstance(c[0], Tensor):
            return "major premise must conclude a tensor"
        if c[1] != phi:
            return "minor premise must conclude the conclusion"
        parts = [c[0].left, c[0].right]
        if not g[1].contains_all(parts):
            return "minor premise must assume both tensor components"
        if ctx != g[0] + (g[1] - parts):
            return "context must be the major context plus the discharged minor context"
    elif rule == "IE":
        if not isinstance(c[0], Unit):
            return "major premise must conclude I"
        if c[1] != phi:
            return "minor premise must conclude the conclusion"
        if ctx != g[0] + g[1]:
            return "context must be the union of the premise contexts"
    elif rule in ("/\\E1", "/\\E2"):
        if not isinstance(c[0], And):
            return "premise must conclude a conjunction"
        if phi != (c[0].left if rule == "/\\E1" else c[0].right):
            return "conclusion must be the selected conjunct"
        if ctx != g[0]:
            return "context must equal the premise context"
    elif rule in ("\\/I1", "\\/I2"):
        if not isinstance(phi, Or):
            return "conclusion must be a disjunction"
        if c[0] != (phi.left if rule == "\\/I1" else phi.right):
            return "premise must conclude the selected disjunct"
        if ctx != g[0]:
            return "context must equal the premise context"
    elif rule == "\\/E":
        if not isinstance(c[0], Or):
            return "major premise must conclude a disjunction"
        if c[1] != phi or c[2] != phi:
            return "minor premises must conclude the conclusion"
        if not (g[1].contains_all([c[0].left]) and g[2].contains_all([c[0].right])):
            return "minor premises must assume the disjuncts"
        side = g[1] - [c[0].left]
        if g[2] - [c[0].right] != side:
            return "minor premises must share their remaining context"
        if ctx != g[0] + side:
            return "context must be the major context plus the shared minor context"
    elif rule == "_|_E":
        if not isinstance(c[0], Falsum):
            return "premise must conclude _|_"
        if ctx != g[0]:
            return "context must equal the premise context"
    elif rule == "w":
        if c[0] != phi:
            return "weakening keeps the conclusion"
        if not ctx.contains_all(g[0]) or len(ctx) == len(g[0]):
            return "weakening must add formulas to the premise context"
    elif rule == "c":
        if c[0] != phi:
            return "contraction keeps the conclusion"
        if not g[0].contains_all(ctx) or len(ctx) == len(g[0]):
            return "contraction must remove formulas from the premise context"
        if not ctx.contains_all(g[0] - ctx):
            return "contraction may only remove duplicated formulas"
    return None


# ---------------------------------------------------------------------------
# IMLL search


class _Abort(Exception):
    pass


def _counter(budget):
    limit = budget if budget is not None else default_node_budget()
    state = [0]

    def tick():
        state[0] += 1
        if state[0] > limit:
            raise _Abort

    return tick, state


def prove(s: Sequent, budget: int | None = None):
    """Decide an IMLL sequent; Found carries a checked NIMLL proof."""
    if s.logic != IMLL:
        raise ValueError("prove expects an IMLL sequent; use prove_ipl for IPL")
    tick, state = _counter(budget)
    memo: dict = {}

    def search(ctx: Multiset, goal: Formula):
        key = (ctx, goal)
        if key in memo:
            return memo[key]
        tick()
        result = _imll_step(ctx, goal, search)
        memo[key] = result
        return result

    try:
        proof = search(s.context, s.conclusion)
    except _Abort:
        return BudgetExhausted(state[0], "IMLL search node budget")
    if proof is None:
        return NotFound(state[0])
    return Found(proof, state[0])


def _imll_step(ctx: Multiset, goal: Formula, search):
    # invertible rules first
    for f in ctx.distinct():
        if isinstance(f, Tensor):
            rest = ctx - [f]
            sub = search(rest + [f.left, f.right], goal)
            if sub is None:
                return None
            return node("*E", ctx, goal, [_ax(f), sub])
        if isinstance(f, Unit):
            rest = ctx - [f]
            sub = search(rest, goal)
            if sub is None:
                return None
            return node("IE", ctx, goal, [_ax(f), sub])
    if isinstance(goal, Lolli):
        sub = search(ctx + [goal.left], goal.right)
        if sub is None:
            return None
        return node("-oI", ctx, goal, [sub])
    if len(ctx) == 1 and ctx.items[0] == goal:
        return _ax(goal)
    if isinstance(goal, Unit) and not ctx:
        return node("II", ctx, goal)
    if isinstance(goal, Tensor):
        for left, right in enumerate_splits(ctx, 2):
            a = search(left, goal.left)
            if a is None:
                continue
            b = search(right, goal.right)
            if b is None:
                continue
            return node("*I", ctx, goal, [a, b])
    for f in ctx.distinct():
        if not isinstance(f, Lolli):
            continue
        rest = ctx - [f]
        for gamma, delta in enumerate_splits(rest, 2):
            minor = search(gamma, f.left)
            if minor is None:
                continue
            cont = search(delta + [f.right], goal)
            if cont is None:
                continue
            # f, gamma |- f.right by -oE, then discharge f.right in cont
            use = node("-oE", gamma + [f], f.right, [_ax(f), minor])
            if cont.rule == "ax":
                return use
            lam = node("-oI", delta, Lolli(f.right, goal), [cont])
            return node("-oE", ctx, goal, [lam, use])
    return None


def _ax(f: Formula, logic: str = IMLL) -> ProofNode:
    return node("ax", [f], f, logic=logic)


# ---------------------------------------------------------------------------
# Naive oracle


def brute_force_prove(s: Sequent, depth: int) -> bool:
    """Is there a NIMLL proof of height <= depth?

    Enumerates every rule application bottom-up and every context split.
    Formulas introduced by elimination rules (major premises) are drawn
    from the subformulas of ``s``, which keeps branching finite.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cand = subformulas(s)
    lollis = [f for f in cand if isinstance(f, Lolli)]
    tensors = [f for f in cand if isinstance(f, Tensor)]
    unit = Unit() if Unit() in cand else None
    fails: dict = {}

    def ok(ctx: Multiset, goal: Formula, d: int) -> bool:
        if d < 1:
            return False
        key = (ctx, goal)
        if fails.get(key, 0) >= d:
            return False
        found = _try(ctx, goal, d)
        if not found:
            fails[key] = d
        return found

    def _try(ctx, goal, d):
        if len(ctx) == 1 and ctx.items[0] == goal:
            return True
        if isinstance(goal, Unit) and not ctx:
            return True
        if d == 1:
            return False
        if isinstance(goal, Lolli) and ok(ctx + [goal.left], goal.right, d - 1):
            return True
        two = list(enumerate_splits(ctx, 2))
        if isinstance(goal, Tensor):
            for a, b in two:
                if ok(a, goal.left, d - 1) and ok(b, goal.right, d - 1):
                    return True
        for f in lollis:
            if f.right != goal:
                continue
            for a, b in two:
                if ok(a, f, d - 1) and ok(b, f.left, d - 1):
                    return True
        if unit is not None:
            for a, b in two:
                if ok(a, unit, d - 1) and ok(b, goal, d - 1):
                    return True
        for f in tensors:
            for a, b in two:
                if ok(a, f, d - 1) and ok(b + [f.left, f.right], goal, d - 1):
                    return True
        return False

    return ok(s.context, s.conclusion, depth)


# ---------------------------------------------------------------------------
# IPL search (G4ip) and translation into NJ


def _nj(rule, context, conclusion, premises=()):
    return node(rule, context, conclusion, premises, IPL)


def weaken(p: ProofNode, extra) -> ProofNode:
    extra = list(extra)
    if not extra:
        return p
    return _nj("w", p.context + extra, p.formula, [p])


def contract(p: ProofNode, dup) -> ProofNode:
    """Remove one copy of each formula in ``dup`` (each must be present twice)."""
    dup = list(dup)
    if not dup:
        return p
    return _nj("c", p.context - dup, p.formula, [p])


def cut(p: ProofNode, hyp: Formula, q: ProofNode) -> ProofNode:
    """From ``G, hyp |- e`` and ``D |- hyp`` build ``G, D |- e`` via ->I/->E."""
    lam = _nj("->I", p.context - [hyp], Imp(hyp, p.formula), [p])
    return _nj("->E", lam.context + q.context, p.formula, [lam, q])


def _nj_ax(f):
    return _ax(f, IPL)


def prove_ipl(s: Sequent, budget: int | None = None):
    """Decide an IPL sequent; Found carries a checked NJ proof."""
    if s.logic != IPL:
        raise ValueError("prove_ipl expects an IPL sequent")
    tick, state = _counter(budget)
    memo: dict = {}

    def search(ctx: Multiset, goal: Formula):
        key = (ctx, goal)
        if key in memo:
            return memo[key]
        tick()
        result = _g4ip_step(ctx, goal, search)
        memo[key] = result
        return result

    try:
        proof = search(s.context, s.conclusion)
    except _Abort:
        return BudgetExhausted(state[0], "IPL search node budget")
    if proof is None:
        return NotFound(state[0])
    return Found(proof, state[0])


def _g4ip_step(ctx: Multiset, goal: Formula, search):
    items = ctx.distinct()
    if goal in ctx:
        return weaken(_nj_ax(goal), ctx - [goal])
    bot = Falsum()
    if bot in ctx:
        return weaken(_nj("_|_E", [bot], goal, [_nj_ax(bot)]), ctx - [bot])
    # invertible left rules
    for f in items:
        rest = ctx - [f]
        if isinstance(f, And):
            sub = search(rest + [f.left, f.right], goal)
            if sub is None:
                return None
            e1 = _nj("/\\E1", [f], f.left, [_nj_ax(f)])
            e2 = _nj("/\\E2", [f], f.right, [_nj_ax(f)])
            return contract(cut(cut(sub, f.left, e1), f.right, e2), [f])
        if isinstance(f, Or):
            a = search(rest + [f.left], goal)
            if a is None:
                return None
            b = search(rest + [f.right], goal)
            if b is None:
                return None
            return _nj("\\/E", ctx, goal, [_nj_ax(f), a, b])
        if isinstance(f, Imp):
            ante = f.left
            if isinstance(ante, Atom) and ante in rest:
                sub = search(rest + [f.right], goal)
                if sub is None:
                    return None
                mp = _nj("->E", [f, ante], f.right, [_nj_ax(f), _nj_ax(ante)])
                return contract(cut(sub, f.right, mp), [ante])
            if isinstance(ante, Falsum):
                sub = search(rest, goal)
                if sub is None:
                    return None
                return weaken(sub, [f])
            if isinstance(ante, And):
                curried = Imp(ante.left, Imp(ante.right, f.right))
                sub = search(rest + [curried], goal)
                if sub is None:
                    return None
                return cut(sub, curried, _curry(f))
            if isinstance(ante, Or):
                ia, ib = Imp(ante.left, f.right), Imp(ante.right, f.right)
                sub = search(rest + [ia, ib], goal)
                if sub is None:
                    return None
                pa, pb = _or_split(f)
                return contract(cut(cut(sub, ia, pa), ib, pb), [f])
    if isinstance(goal, Imp):
        sub = search(ctx + [goal.left], goal.right)
        if sub is None:
            return None
        return _nj("->I", ctx, goal, [sub])
    if isinstance(goal, And):
        a = search(ctx, goal.left)
        if a is None:
            return None
        b = search(ctx, goal.right)
        if b is None:
            return None
        return contract(_nj("/\\I", ctx + ctx, goal, [a, b]), ctx)
    # non-invertible choices
    if isinstance(goal, Or):
        a = search(ctx, goal.left)
        if a is not None:
            return _nj("\\/I1", ctx, goal, [a])
        b = search(ctx, goal.right)
        if b is not None:
            return _nj("\\/I2", ctx, goal, [b])
    for f in items:
        if isinstance(f, Imp) and isinstance(f.left, Imp):
            rest = ctx - [f]
            a, b, c = f.left.left, f.left.right, f.right
            bc = Imp(b, c)
            left = search(rest + [bc], f.left)
            if left is None:
                continue
            right = search(rest + [c], goal)
            if right is None:
                continue
            return _nested_imp(f, rest, left, right)
    return None


def _curry(f: Imp) -> ProofNode:
    """(a /\\ b) -> c  |-  a -> (b -> c)."""
    a, b, c = f.left.left, f.left.right, f.right
    pair = _nj("/\\I", [a, b], f.left, [_nj_ax(a), _nj_ax(b)])
    app_ = _nj("->E", [f, a, b], c, [_nj_ax(f), pair])
    inner = _nj("->I", [f, a], Imp(b, c), [app_])
    return _nj("->I", [f], Imp(a, Imp(b, c)), [inner])


def _or_split(f: Imp) -> tuple[ProofNode, ProofNode]:
    """(a \\/ b) -> c  |-  a -> c   and   |-  b -> c."""
    out = []
    for rule, x in (("\\/I1", f.left.left), ("\\/I2", f.left.right)):
        inj = _nj(rule, [x], f.left, [_nj_ax(x)])
        app_ = _nj("->E", [f, x], f.right, [_nj_ax(f), inj])
        out.append(_nj("->I", [f], Imp(x, f.right), [app_]))
    return out[0], out[1]


def _nested_imp(f: Imp, rest: Multiset, left: ProofNode, right: ProofNode) -> ProofNode:
    """Translate the G4ip rule for (a -> b) -> c on the left."""
    a, b, c = f.left.left, f.left.right, f.right
    # f |- b -> c
    const = _nj("->I", [b], f.left, [weaken(_nj_ax(b), [a])])
    fb = _nj("->E", [f, b], c, [_nj_ax(f), const])
    f_to_bc = _nj("->I", [f], Imp(b, c), [fb])
    # rest, f |- a -> b
    left2 = cut(left, Imp(b, c), f_to_bc)
    # rest, f, f |- c
    get_c = _nj("->E", left2.context + [f], c, [_nj_ax(f), left2])
    whole = cut(right, c, get_c)
    return contract(whole, list(rest) + [f])


# ---------------------------------------------------------------------------
# Serialization


def proof_to_dict(p: ProofNode) -> dict:
    return {
        "rule": p.rule,
        "sequent": str(p.conclusion),
        "premises": [proof_to_dict(q) for q in p.premises],
    }


def proof_from_dict(d: dict, logic: str) -> ProofNode:
    seq = parse_sequent(d["sequent"], logic)
    kids = tuple(proof_from_dict(x, logic) for x in d.get("premises", ()))
    return ProofNode(d["rule"], seq, kids)


def proof_document(p: ProofNode) -> dict:
    return {"schema": SCHEMA, "kind": "proof", "logic": p.logic, "proof": proof_to_dict(p)}


def load_proof_document(doc: dict) -> ProofNode:
    if doc.get("kind") != "proof":
        raise ValueError("not a proof document")
    return proof_from_dict(doc["proof"], doc.get("logic", IMLL))
