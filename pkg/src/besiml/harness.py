"""Enumeration of small sequents and the provability/derivability cross-check.

For each sequent the prover verdict is compared with derivability of the
flattened sequent in its bespoke base.  Each side is computed on its own;
they share only the parser and the data model.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from besiml.base import derive
from besiml.flatten import STANDARD, bespoke_base, flat_models
from besiml.nimll import prove, prove_ipl
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
    connectives,
)

_BINARY = {IMLL: (Tensor, Lolli), IPL: (And, Or, Imp)}
_NULLARY = {IMLL: (Unit,), IPL: (Falsum,)}

DEFAULT_ATOMS = ("p", "q")


def formulas_by_size(logic: str, atoms=DEFAULT_ATOMS, max_connectives: int = 3) -> list[list[Formula]]:
    """``out[k]`` = all formulas with exactly k connectives (constants count one)."""
    out: list[list[Formula]] = [[Atom(a) for a in atoms]]
    for k in range(1, max_connectives + 1):
        level: list[Formula] = []
        if k == 1:
            level.extend(c() for c in _NULLARY[logic])
        for left_size in range(k):
            right_size = k - 1 - left_size
            for op in _BINARY[logic]:
                for a in out[left_size]:
                    for b in out[right_size]:
                        level.append(op(a, b))
        out.append(level)
    return out


def enumerate_sequents(logic: str = IMLL, atoms=DEFAULT_ATOMS, max_connectives: int = 3,
                       max_context: int = 3) -> Iterator[Sequent]:
    """All sequents with at most ``max_connectives`` connectives in total and
    at most ``max_context`` context formulas, each up to context permutation."""
    levels = formulas_by_size(logic, atoms, max_connectives)
    pool = sorted((f for level in levels for f in level), key=lambda f: (connectives(f), str(f)))
    size = [connectives(f) for f in pool]

    def contexts(start: int, room: int, left: int):
        yield ()
        if left == 0:
            return
        for i in range(start, len(pool)):
            if size[i] > room:
                break
            for rest in contexts(i, room - size[i], left - 1):
                yield (pool[i],) + rest

    for ctx in sorted(contexts(0, max_connectives, max_context), key=lambda c: (len(c), c)):
        room = max_connectives - sum(size_of(f) for f in ctx)
        for goal, k in zip(pool, size):
            if k > room:
                break
            yield Sequent(Multiset(ctx), goal, logic)


def size_of(f: Formula) -> int:
    return connectives(f)


@dataclass
class CrossReport:
    logic: str
    conjunction: str = STANDARD
    total: int = 0
    agree: int = 0
    provable: int = 0
    indeterminate: list = field(default_factory=list)
    disagreements: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def agreement(self) -> float:
        decided = self.total - len(self.indeterminate)
        return 100.0 * self.agree / decided if decided else 100.0

    @property
    def ok(self) -> bool:
        return not self.disagreements and not self.indeterminate and self.total > 0

    def summary(self) -> str:
        mode = f" conjunction={self.conjunction}" if self.logic == IPL else ""
        return (f"{self.logic}{mode}: {self.total} sequents, {self.provable} provable, "
                f"{len(self.disagreements)} disagreements, {len(self.indeterminate)} indeterminate, "
                f"agreement {self.agreement:.0f}%, {self.seconds:.1f}s")


def compare(s: Sequent, conjunction: str = STANDARD):
    """(prover verdict, derivability verdict); None marks budget exhaustion."""
    proof = prove(s) if s.logic == IMLL else prove_ipl(s)
    left = None if proof.status == "budget-exhausted" else proof.found
    m, base, res, goal = bespoke_base(s, conjunction)
    d = derive(base, res, goal, models=flat_models(m))
    right = None if d.status == "budget-exhausted" else d.found
    return left, right


def crosscheck(sequents, conjunction: str = STANDARD, logic: str = IMLL,
               progress: Callable[[int], None] | None = None) -> CrossReport:
    report = CrossReport(logic, conjunction)
    t0 = time.perf_counter()
    for i, s in enumerate(sequents):
        left, right = compare(s, conjunction)
        report.total += 1
        if left is None or right is None:
            report.indeterminate.append(str(s))
        elif left == right:
            report.agree += 1
            report.provable += left
        else:
            report.disagreements.append((str(s), left, right))
        if progress is not None:
            progress(i)
    report.seconds = time.perf_counter() - t0
    return report
