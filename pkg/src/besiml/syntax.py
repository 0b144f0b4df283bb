"""Formulas, multisets and sequents for IMLL and IPL, with a parser and printer.

Concrete syntax::

    IMLL   p * q   p -o q   I
    IPL    p /\\ q  p \\/ q  p -> q  _|_

``*`` binds tighter than ``-o``; ``*`` associates to the left and ``-o`` to
the right.  In IPL ``/\\`` binds tighter than ``\\/``, which binds tighter
than ``->``.  Sequents are written ``a, b |- c`` and the context may be
empty (``|- I``).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

IMLL = "imll"
IPL = "ipl"
LOGICS = (IMLL, IPL)

RESERVED_PREFIX = "#"
ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_#]*\Z")


class SyntaxError_(ValueError):
    """Raised for lexical, syntactic and logic-mismatch errors."""

    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.text = text
        self.pos = pos
        if pos is not None:
            message = f"{message} at column {pos + 1}: {text!r}"
        super().__init__(message)


class LexicalError(SyntaxError_):
    pass


class ParseError(SyntaxError_):
    pass


class LogicMismatch(SyntaxError_):
    pass


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    """Base class of all formula nodes.

    Nodes are immutable and hashable.  ``str(f)`` gives the canonical text,
    which is also the sort key used for multisets.
    """

    __slots__ = ()
    logic: str | None = None

    def children(self) -> tuple["Formula", ...]:
        return ()

    def is_atomic(self) -> bool:
        return False

    def __lt__(self, other: "Formula") -> bool:
        return sort_key(self) < sort_key(other)


def _cached_text(self) -> str:
    return self._text


@dataclass(frozen=True, eq=True, repr=False)
class Atom(Formula):
    name: str

    def is_atomic(self) -> bool:
        return True

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class _Binary(Formula):
    left: Formula
    right: Formula
    _text: str = field(init=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_text", render(self))

    def children(self):
        return (self.left, self.right)

    __str__ = _cached_text

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class _Constant(Formula):
    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"{type(self).__name__}()"


class Unit(_Constant):
    logic = IMLL


class Tensor(_Binary):
    logic = IMLL


class Lolli(_Binary):
    logic = IMLL


class Falsum(_Constant):
    logic = IPL


class And(_Binary):
    logic = IPL


class Or(_Binary):
    logic = IPL


class Imp(_Binary):
    logic = IPL


# (symbol, binding power, associativity) per binary connective
_OPS = {
    Tensor: ("*", 3, "left"),
    Lolli: ("-o", 1, "right"),
    And: ("/\\", 3, "left"),
    Or: ("\\/", 2, "left"),
    Imp: ("->", 1, "right"),
}
_CONSTANTS = {Unit: "I", Falsum: "_|_"}


def _power(f: Formula) -> int:
    op = _OPS.get(type(f))
    return op[1] if op else 10


def render(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if type(f) in _CONSTANTS:
        return _CONSTANTS[type(f)]
    sym, power, assoc = _OPS[type(f)]
    left, right = str(f.left), str(f.right)
    lp, rp = _power(f.left), _power(f.right)
    if lp < power or (lp == power and assoc == "right"):
        left = f"({left})"
    if rp < power or (rp == power and assoc == "left"):
        right = f"({right})"
    return f"{left} {sym} {right}"


def sort_key(x) -> str:
    return str(x)


def logic_of(f: Formula) -> str | None:
    """The logic a formula belongs to; ``None`` for a bare atom."""
    if isinstance(f, Atom):
        return None
    if f.logic is not None:
        for c in f.children():
            sub = logic_of(c)
            if sub is not None and sub != f.logic:
                raise LogicMismatch(f"mixed connectives in {f}")
        return f.logic
    return None


def atoms_of(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    out: set[str] = set()
    for c in f.children():
        out |= atoms_of(c)
    return out


def connectives(f: Formula) -> int:
    """Number of connective occurrences, constants (I, _|_) included."""
    if isinstance(f, Atom):
        return 0
    return 1 + sum(connectives(c) for c in f.children())


def degree(f: Formula) -> int:
    """Degree measure used to show the support clauses are well-founded."""
    if isinstance(f, Atom):
        return 1
    if isinstance(f, Unit):
        return 2
    if isinstance(f, (Tensor, Lolli)):
        return degree(f.left) + degree(f.right) + 1
    raise TypeError(f"degree is defined on IMLL formulas, got {f}")


# ---------------------------------------------------------------------------
# Multisets


class Multiset:
    """Immutable finite multiset, stored as a canonically sorted tuple.

    Elements are atom names (``str``) or formulas.  ``a + b`` is multiset
    union, ``a - b`` removes ``b`` (which must be contained in ``a``).
    """

    __slots__ = ("items", "_hash")

    def __init__(self, items: Iterable = ()):
        self.items = tuple(sorted(items, key=sort_key))
        self._hash = hash(self.items)

    @classmethod
    def _from_sorted(cls, items: tuple) -> "Multiset":
        m = cls.__new__(cls)
        m.items = items
        m._hash = hash(items)
        return m

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __contains__(self, x):
        return x in self.items

    def __eq__(self, other):
        if isinstance(other, Multiset):
            return self.items == other.items
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __add__(self, other: "Multiset | Iterable") -> "Multiset":
        return Multiset(self.items + tuple(other))

    def __sub__(self, other: "Multiset | Iterable") -> "Multiset":
        left = list(self.items)
        for x in other:
            try:
                left.remove(x)
            except ValueError:
                raise ValueError(f"{x} not in {self}") from None
        return Multiset._from_sorted(tuple(left))

    def contains_all(self, other: "Multiset | Iterable") -> bool:
        need = Counter(other)
        have = self.counts()
        return all(have[k] >= v for k, v in need.items())

    def counts(self) -> Counter:
        return Counter(self.items)

    def distinct(self) -> list:
        seen = []
        for x in self.items:
            if not seen or seen[-1] != x:
                seen.append(x)
        return seen

    def __repr__(self):
        return "[" + ", ".join(str(x) for x in self.items) + "]"

    __str__ = __repr__


EMPTY = Multiset()


def enumerate_splits(m: Multiset | Iterable, k: int) -> Iterator[tuple[Multiset, ...]]:
    """Yield every ordered k-tuple of multisets whose union is ``m``.

    Each tuple is produced exactly once; earlier parts receive fewer copies
    first, so for ``[p, p]`` and ``k=2`` the order is
    ``([], [p, p]), ([p], [p]), ([p, p], [])``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not isinstance(m, Multiset):
        m = Multiset(m)
    groups = [(x, c) for x, c in _runs(m.items)]
    per_group = [list(_compositions(c, k)) for _, c in groups]
    for choice in product(*per_group):
        parts: list[list] = [[] for _ in range(k)]
        for (x, _), comp in zip(groups, choice):
            for i, n in enumerate(comp):
                parts[i].extend([x] * n)
        yield tuple(Multiset._from_sorted(tuple(p)) for p in parts)


def _runs(items: tuple):
    i = 0
    while i < len(items):
        j = i
        while j < len(items) and items[j] == items[i]:
            j += 1
        yield items[i], j - i
        i = j


def _compositions(n: int, k: int):
    """Weak compositions of n into k ordered parts, first part ascending."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# Sequents


@dataclass(frozen=True)
class Sequent:
    context: Multiset
    conclusion: Formula
    logic: str = IMLL

    def __post_init__(self):
        if not isinstance(self.context, Multiset):
            object.__setattr__(self, "context", Multiset(self.context))
        if self.logic not in LOGICS:
            raise ValueError(f"unknown logic {self.logic!r}")
        for f in (*self.context, self.conclusion):
            tag = logic_of(f)
            if tag is not None and tag != self.logic:
                raise LogicMismatch(f"{f} is not an {self.logic.upper()} formula")

    def formulas(self) -> list[Formula]:
        return [*self.context, self.conclusion]

    def __str__(self):
        ctx = ", ".join(str(f) for f in self.context)
        return f"{ctx} |- {self.conclusion}" if ctx else f"|- {self.conclusion}"


def subformulas(s: Sequent | Formula | Iterable[Formula]) -> frozenset[Formula]:
    """Smallest set containing the given formulas and closed under children."""
    if isinstance(s, Sequent):
        todo = s.formulas()
    elif isinstance(s, Formula):
        todo = [s]
    else:
        todo = list(s)
    seen: set[Formula] = set()
    while todo:
        f = todo.pop()
        if f not in seen:
            seen.add(f)
            todo.extend(f.children())
    return frozenset(seen)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op>-o|->|/\\|\\/|\*|_\|_|\(|\))|(?P<unit>I(?![a-zA-Z0-9_#]))"
    r"|(?P<atom>[a-z#][a-zA-Z0-9_#]*))"
)

_BINARY = {
    IMLL: {"*": (Tensor, 3, "left"), "-o": (Lolli, 1, "right")},
    IPL: {"/\\": (And, 3, "left"), "\\/": (Or, 2, "left"), "->": (Imp, 1, "right")},
}
_FOREIGN = {IMLL: {"/\\", "\\/", "->", "_|_"}, IPL: {"*", "-o", "I"}}


def _tokenize(text: str, allow_reserved: bool):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise LexicalError("unknown token", text, bad)
        start = m.start(m.lastgroup)
        tok = m.group(m.lastgroup)
        if m.lastgroup == "atom" and tok.startswith(RESERVED_PREFIX) and not allow_reserved:
            raise LexicalError("atoms starting with '#' are reserved", text, start)
        out.append((m.lastgroup, tok, start))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, logic: str, allow_reserved: bool):
        self.text = text
        self.logic = logic
        self.toks = _tokenize(text, allow_reserved)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, cls, msg, tok=None):
        pos = tok[2] if tok else len(self.text.rstrip())
        raise cls(msg, self.text, pos)

    def parse(self) -> Formula:
        if not self.toks:
            raise ParseError("empty formula", self.text, 0)
        f = self.expr(0)
        tok = self.peek()
        if tok is not None:
            if tok[1] == ")":
                self.error(ParseError, "unbalanced ')'", tok)
            self.error(ParseError, "unexpected token", tok)
        return f

    def expr(self, min_power: int) -> Formula:
        left = self.primary()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] in "()":
                return left
            if tok[1] in _FOREIGN[self.logic]:
                self.error(LogicMismatch, f"{tok[1]!r} is not an {self.logic.upper()} connective", tok)
            if tok[1] not in _BINARY[self.logic]:
                self.error(ParseError, "unexpected token", tok)
            cls, power, assoc = _BINARY[self.logic][tok[1]]
            if power < min_power:
                return left
            self.i += 1
            right = self.expr(power + 1 if assoc == "left" else power)
            left = cls(left, right)

    def primary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            self.error(ParseError, "unexpected end of input")
        kind, val, _ = tok
        self.i += 1
        if kind == "atom":
            return Atom(val)
        if kind == "unit":
            if self.logic != IMLL:
                self.error(LogicMismatch, "'I' is not an IPL constant", tok)
            return Unit()
        if val == "_|_":
            if self.logic != IPL:
                self.error(LogicMismatch, "'_|_' is not an IMLL constant", tok)
            return Falsum()
        if val == "(":
            inner = self.expr(0)
            close = self.peek()
            if close is None or close[1] != ")":
                self.error(ParseError, "unbalanced '('", close)
            self.i += 1
            return inner
        if val in _FOREIGN[self.logic]:
            self.error(LogicMismatch, f"{val!r} is not an {self.logic.upper()} connective", tok)
        self.error(ParseError, "unexpected token", tok)


def parse_formula(text: str, logic: str = IMLL, allow_reserved: bool = False) -> Formula:
    if logic not in LOGICS:
        raise ValueError(f"unknown logic {logic!r}")
    if not text or not text.strip():
        raise ParseError("empty formula", text or "", 0)
    return _Parser(text, logic, allow_reserved).parse()


def _split_top(text: str, sep: str = ",") -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_sequent(text: str, logic: str = IMLL, allow_reserved: bool = False) -> Sequent:
    if text.count("|-") != 1:
        raise ParseError("a sequent needs exactly one '|-'", text, None)
    lhs, rhs = text.split("|-")
    ctx = []
    if lhs.strip():
        for part in _split_top(lhs):
            if not part.strip():
                raise ParseError("empty context entry", text, None)
            ctx.append(parse_formula(part, logic, allow_reserved))
    return Sequent(Multiset(ctx), parse_formula(rhs, logic, allow_reserved), logic)


def parse_atoms(text: str, allow_reserved: bool = True) -> Multiset:
    """Parse a comma separated list of atoms (braces optional) into a multiset."""
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    names = [t.strip() for t in text.split(",") if t.strip()]
    for n in names:
        check_atom_name(n, allow_reserved)
    return Multiset(names)


def check_atom_name(name: str, allow_reserved: bool = True) -> str:
    ok = ATOM_RE.match(name) or (allow_reserved and name.startswith(RESERVED_PREFIX)
                                 and re.fullmatch(r"#[a-zA-Z0-9_#]+", name))
    if not ok:
        raise LexicalError(f"bad atom name {name!r}")
    return name


def read_sequents(path, logic: str = IMLL) -> list[Sequent]:
    """Read a file of sequents, one per line; '#' lines and blanks are skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            out.append(parse_sequent(line, logic))
    return out


def format_sequent(context: Sequence[Formula] | Multiset, conclusion: Formula) -> str:
    ctx = ", ".join(str(f) for f in Multiset(context))
    return f"{ctx} |- {conclusion}" if ctx else f"|- {conclusion}"
