import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from besiml.base import AtomicRule, Budget, check_derivation, derive, ref
from besiml.flatten import (
    STAR,
    ExtractionError,
    FlattenError,
    apply_deflat,
    apply_flat,
    build_base_M,
    build_base_N,
    bespoke_base,
    extract_proof,
    flat_models,
    flattening_for,
    make_flattening,
)
from besiml.models import HEYTING, QUANTALES, formula_valuations
from besiml.nimll import check_proof, prove, prove_ipl
from besiml.syntax import IMLL, IPL, Atom, Lolli, Multiset, Sequent, Tensor, Unit, parse_formula, parse_sequent, subformulas

from helpers import imll_formulas, ipl_formulas, sequents

WORKED = parse_sequent("p1, p2, p1 * p2 -o q, p1 |- q * p1")
R = AtomicRule


def f(text, logic=IMLL):
    return parse_formula(text, logic)


def test_worked_example_closure_and_fresh_atoms():
    m = flattening_for(WORKED)
    assert len(m.domain) == 6
    assert len(m.fresh_atoms()) == 3
    assert {m.deflat(a) for a in m.fresh_atoms()} == {f("p1 * p2"), f("p1 * p2 -o q"), f("q * p1")}


def test_unit_closure():
    m = make_flattening([Unit()])
    assert m.fresh_atoms() == ["#f0"]


def test_closure_required():
    with pytest.raises(FlattenError):
        make_flattening([f("p * q")])
    with pytest.raises(FlattenError):
        make_flattening([Atom("#f0")])


def test_flat_and_deflat_pointwise():
    m = flattening_for(WORKED)
    assert apply_deflat(m, apply_flat(m, [f("p1 * p2")])) == Multiset([f("p1 * p2")])
    assert apply_flat(m, [f("p1"), f("p1")]) == Multiset(["p1", "p1"])
    assert apply_deflat(m, ["r"]) == Multiset([Atom("r")])
    with pytest.raises(FlattenError):
        apply_flat(m, [f("p2 * p1")])


def test_unit_base():
    m = make_flattening([Unit()])
    u = m.flat(Unit())
    b = build_base_M(m, [u, "p"])
    assert set(b.rules) == {R([], u), R([([], u), ([], u)], u), R([([], u), ([], "p")], "p")}


def test_worked_example_base_size_and_lolli_elimination():
    m = flattening_for(WORKED)
    b = build_base_M(m)
    # one rule per intro/elim shape plus one tensor/unit elimination per alphabet atom
    assert len(b) == 16
    fl = m.flat
    assert R([([], fl(f("p1 * p2 -o q"))), ([], fl(f("p1 * p2")))], "q") in b


def test_base_N_examples():
    m = make_flattening([f("p /\\ q", IPL), Atom("p"), Atom("q")])
    c = m.flat(f("p /\\ q", IPL))
    assert set(build_base_N(m).rules) == {
        R([([], "p"), ([], "q")], c, "set"), R([([], c)], "p", "set"), R([([], c)], "q", "set")}
    m = make_flattening([f("_|_", IPL)])
    b = build_base_N(m, [m.flat(f("_|_", IPL)), "p"])
    assert len(b) == 2 and all(len(r.premises) == 1 for r in b.rules)
    assert len(build_base_N(make_flattening([Atom("p")]))) == 0


def test_alphabet_must_cover_image():
    m = flattening_for(WORKED)
    with pytest.raises(FlattenError):
        build_base_M(m, ["p1"])


def test_worked_example_derivation_and_extraction():
    m, base, res, goal = bespoke_base(WORKED)
    assert sorted(res.items) == sorted(["p1", "p2", m.flat(f("p1 * p2 -o q")), "p1"])
    d = derive(base, res, goal, models=flat_models(m)).value
    assert check_derivation(base, d, (res, goal))
    fl = m.flat
    used = d.rules_used()
    assert R([([], fl(f("p1"))), ([], fl(f("p2")))], fl(f("p1 * p2"))) in used
    assert R([([], fl(f("p1 * p2 -o q"))), ([], fl(f("p1 * p2")))], "q") in used
    assert R([([], "q"), ([], "p1")], fl(f("q * p1"))) in used
    p = extract_proof("M", m, d)
    assert check_proof(p, WORKED)


def test_extraction_of_leaf_cases():
    m = make_flattening([Unit()])
    u = m.flat(Unit())
    b = build_base_M(m)
    p = extract_proof("M", m, ref(u))
    assert p.rule == "ax" and p.formula == Unit()
    p = extract_proof("M", m, derive(b, [], u).value)
    assert p.rule == "II" and not p.premises


def test_extraction_rejects_foreign_rules():
    from besiml.base import app

    m = make_flattening([Unit()])
    with pytest.raises(ExtractionError):
        extract_proof("M", m, app(R([], "zz"), []))
    with pytest.raises(ExtractionError):
        extract_proof("N", m, ref("p"))


# -- properties ------------------------------------------------------------------

prop = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def closures(logic=IMLL):
    forms = imll_formulas(max_leaves=5) if logic == IMLL else ipl_formulas(max_leaves=5)
    return st.lists(forms, min_size=1, max_size=3).map(subformulas).map(frozenset)


@prop
@given(closures(), st.data())
def test_flattening_round_trip(xi, data):
    m = make_flattening(xi)
    gamma = data.draw(st.lists(st.sampled_from(sorted(xi, key=str)), max_size=5))
    assert apply_deflat(m, apply_flat(m, gamma)) == Multiset(gamma)
    assert len(m.image()) == len(xi)  # injective
    assert all(m.flat(x) == x.name for x in xi if isinstance(x, Atom))


@prop
@given(closures(IPL), st.data())
def test_flattening_round_trip_ipl(xi, data):
    m = make_flattening(xi)
    gamma = data.draw(st.lists(st.sampled_from(sorted(xi, key=str)), max_size=5))
    assert apply_deflat(m, apply_flat(m, gamma)) == Multiset(gamma)


@settings(max_examples=40, deadline=None)
@given(sequents(IMLL, max_leaves=3))
def test_extraction_soundness_M(s):
    m, base, res, goal = bespoke_base(s)
    d = derive(base, res, goal, models=flat_models(m))
    assume(d.status != "budget-exhausted")
    assert d.found == prove(s).found
    if d.found:
        assert check_proof(extract_proof("M", m, d.value), s)


@settings(max_examples=40, deadline=None)
@given(sequents(IPL, max_leaves=3, max_context=2), st.sampled_from(["standard", STAR]))
def test_extraction_soundness_N(s, mode):
    m, base, res, goal = bespoke_base(s, mode)
    d = derive(base, res, goal, models=flat_models(m))
    assert d.found == prove_ipl(s).found
    if d.found:
        p = extract_proof("N", m, d.value)
        assert check_proof(p)
        assert p.formula == s.conclusion and set(p.context) == set(s.context)


@settings(max_examples=30, deadline=None)
@given(closures(), st.sampled_from(QUANTALES))
def test_formula_valuations_respect_M(xi, alg):
    m = make_flattening(xi)
    b = build_base_M(m)
    originals = sorted(x.name for x in xi if isinstance(x, Atom))
    for v in list(formula_valuations(m.forward, originals, [alg]))[:20]:
        assert v.respects(b)


@settings(max_examples=30, deadline=None)
@given(closures(IPL), st.sampled_from(HEYTING), st.sampled_from(["standard", STAR]))
def test_formula_valuations_respect_N(xi, alg, mode):
    m = make_flattening(xi)
    b = build_base_N(m, conjunction=mode)
    originals = sorted(x.name for x in xi if isinstance(x, Atom))
    for v in list(formula_valuations(m.forward, originals, [alg]))[:20]:
        assert v.respects(b)


# -- the flattening lemma as executable biconditionals ------------------------------

LEMMA_BUDGET = Budget(max_nodes=100_000)


def lemma_triples():
    """(closure, S, compound) with S a small multiset over the flat image."""
    @st.composite
    def build(draw):
        forms = draw(st.lists(imll_formulas(("p", "q"), max_leaves=3), min_size=1, max_size=2))
        xi = frozenset(subformulas(forms))
        compounds = sorted((x for x in xi if not isinstance(x, Atom)), key=str)
        assume(compounds)
        m = make_flattening(xi)
        chi = draw(st.sampled_from(compounds))
        s = draw(st.lists(st.sampled_from(sorted(m.image())), max_size=2))
        return m, s, chi
    return build()


def _derives(m, base, res, goal):
    r = derive(base, res, goal, LEMMA_BUDGET, models=flat_models(m))
    assume(r.status != "budget-exhausted")
    return r.found


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
@given(lemma_triples(), st.data())
def test_flattening_lemma(triple, data):
    m, s, chi = triple
    b = build_base_M(m)
    fl = m.flat
    lhs = _derives(m, b, s, fl(chi))
    if isinstance(chi, Lolli):
        # S |- (a -o b)' iff S, a' |- b'
        assert lhs == _derives(m, b, s + [fl(chi.left)], fl(chi.right))
    elif isinstance(chi, Tensor):
        # forward direction at Y = B for a sampled (V, p); backward with V = [], p = chi'
        v = data.draw(st.lists(st.sampled_from(sorted(m.image())), max_size=1))
        p = data.draw(st.sampled_from(sorted(m.image())))
        if lhs and _derives(m, b, v + [fl(chi.left), fl(chi.right)], p):
            assert _derives(m, b, s + v, p)
        assert _derives(m, b, [fl(chi.left), fl(chi.right)], fl(chi))
    else:
        v = data.draw(st.lists(st.sampled_from(sorted(m.image())), max_size=1))
        p = data.draw(st.sampled_from(sorted(m.image())))
        if lhs and _derives(m, b, v, p):
            assert _derives(m, b, s + v, p)
        assert _derives(m, b, [], fl(chi))
