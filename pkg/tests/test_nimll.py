import pytest
from hypothesis import given, settings

from besiml.harness import enumerate_sequents
from besiml.nimll import (
    ProofNode,
    brute_force_prove,
    check_proof,
    load_proof_document,
    node,
    proof_document,
    prove,
    prove_ipl,
)
from besiml.outcomes import Accept
from besiml.syntax import IMLL, IPL, Multiset, Sequent, parse_formula, parse_sequent

from helpers import imll_formulas, kripke_countermodel, sequents

WORKED = "p1, p2, p1 * p2 -o q, p1 |- q * p1"


def f(text, logic=IMLL):
    return parse_formula(text, logic)


def worked_example_tree():
    """The proof tree printed with the worked example, major premises first."""
    ax = lambda x: node("ax", [f(x)], f(x))
    tensor = node("*I", [f("p1"), f("p2")], f("p1 * p2"), [ax("p1"), ax("p2")])
    app = node("-oE", [f("p1"), f("p2"), f("p1 * p2 -o q")], f("q"), [ax("p1 * p2 -o q"), tensor])
    return node("*I", [f("p1"), f("p2"), f("p1 * p2 -o q"), f("p1")], f("q * p1"), [app, ax("p1")])


def test_single_axiom_accepted():
    assert check_proof(node("ax", [f("p * q")], f("p * q"))) is Accept


def test_worked_example_tree_accepted():
    p = worked_example_tree()
    assert check_proof(p, parse_sequent(WORKED))


def test_worked_example_mutated_conclusion_rejected_at_root():
    p = worked_example_tree()
    bad = ProofNode(p.rule, Sequent(p.context, f("q * p2")), p.premises)
    verdict = check_proof(bad)
    assert not verdict and verdict.location == ()


def test_wrong_context_bookkeeping_rejected():
    ax = lambda x: node("ax", [f(x)], f(x))
    # -oE with a context that drops the minor premise's resources
    bad = node("-oE", [f("p -o q")], f("q"), [ax("p -o q"), ax("p")])
    assert not check_proof(bad)


@pytest.mark.parametrize("text", [WORKED, "|- I", "p * q |- q * p", "I, p |- p", "p |- I * p",
                                  "p -o q, q -o r |- p -o r", "p * (q * r) |- (p * q) * r"])
def test_prove_finds_checked_proofs(text):
    s = parse_sequent(text)
    r = prove(s)
    assert r.found and check_proof(r.value, s)


def test_unit_axiom_is_single_node():
    r = prove(parse_sequent("|- I"))
    assert r.value.rule == "II" and not r.value.premises


@pytest.mark.parametrize("text", ["p |- p * p", "p, q |- p", "p, p |- p", "p |- q", "|- p -o p * p"])
def test_substructural_failures(text):
    assert prove(parse_sequent(text)).status == "not-found"


@pytest.mark.parametrize("text, depth, expected", [
    ("p * q |- p * q", 1, True), ("p |- q", 6, False), ("I, p |- p", 3, True),
    ("p * q |- q * p", 5, True), ("p |- p * p", 8, False)])
def test_brute_force_examples(text, depth, expected):
    assert brute_force_prove(parse_sequent(text), depth) is expected


def test_proof_document_round_trip():
    p = prove(parse_sequent(WORKED)).value
    q = load_proof_document(proof_document(p))
    assert q == p and check_proof(q)


def test_exchange():
    a = prove(parse_sequent("p1, p2, p1 * p2 -o q, p1 |- q * p1")).found
    b = prove(parse_sequent("p1 * p2 -o q, p1, p1, p2 |- q * p1")).found
    assert a and b


@pytest.mark.parametrize("text, expected", [
    ("p /\\ q |- p", True), ("p |- p \\/ q", True), ("|- ((p -> q) -> p) -> p", False),
    ("|- p \\/ (p -> _|_)", False), ("|- ((p \\/ (p -> _|_)) -> _|_) -> _|_", True),
    ("p -> q, q -> r |- p -> r", True), ("_|_ |- q", True), ("p \\/ q |- q \\/ p", True),
    ("p, p -> q |- q /\\ p", True), ("(p -> q) -> q |- p \\/ q", False)])
def test_prove_ipl(text, expected):
    s = parse_sequent(text, IPL)
    r = prove_ipl(s)
    assert r.found is expected
    if expected:
        assert check_proof(r.value, s)
    else:
        assert kripke_countermodel(s) is not None


def test_brute_force_agrees_on_small_sequents():
    seqs = list(enumerate_sequents(IMLL, ("p", "q"), max_connectives=1, max_context=3))
    for s in seqs:
        assert brute_force_prove(s, 10) == prove(s).found, str(s)


@settings(max_examples=80, deadline=None)
@given(sequents(IMLL, max_leaves=3))
def test_prove_agrees_with_oracle(s):
    r = prove(s)
    if r.found:
        assert check_proof(r.value, s)
        assert brute_force_prove(s, r.value.height())
    else:
        assert r.status == "not-found"
        assert not brute_force_prove(s, 6)


@settings(max_examples=80, deadline=None)
@given(sequents(IPL, max_leaves=3, max_context=2))
def test_prove_ipl_against_kripke(s):
    r = prove_ipl(s)
    if r.found:
        assert check_proof(r.value, s)
        assert kripke_countermodel(s) is None
    else:
        assert r.status == "not-found"
        assert kripke_countermodel(s) is not None


@settings(max_examples=40, deadline=None)
@given(imll_formulas(max_leaves=4))
def test_unit_laws(phi):
    assert prove(Sequent(Multiset([parse_formula("I"), phi]), phi)).found
    assert prove(Sequent(Multiset([phi]), parse_formula(f"I * ({phi})"))).found
