"""Acceptance criteria, one test each.  Every test prints a single
``criterion N [PASS|FAIL]`` line (also collected in the terminal summary)."""

import random
import time
from collections import Counter
from itertools import combinations_with_replacement

import pytest

from besiml.base import AtomicRule, Base, Budget, check_derivation, derive, graft, ref
from besiml.flatten import STANDARD, STAR, bespoke_base, build_base_M, extract_proof, flat_models, make_flattening
from besiml.harness import crosscheck, enumerate_sequents
from besiml.nimll import brute_force_prove, check_proof, prove, prove_ipl
from besiml.semantics import (
    EvalBudget,
    ExtensionEnumerator,
    Refuted,
    decide_validity,
    eval_support,
    find_refuting_extension,
    judgement,
    replay,
)
from besiml.syntax import (
    IMLL,
    IPL,
    Atom,
    Lolli,
    Multiset,
    Sequent,
    Tensor,
    Unit,
    degree,
    parse_formula,
    parse_sequent,
    subformulas,
)

from helpers import naive_derivable
from mutations import mutate_derivation, mutate_proof

WORKED = "p1, p2, p1 * p2 -o q, p1 |- q * p1"
R = AtomicRule


# -- random generators (seeded, independent of hypothesis) -------------------------

def rand_imll(rng, nodes, atoms=("p", "q")):
    """A random IMLL formula with exactly ``nodes`` symbols (2 rounds down to 1)."""
    if nodes <= 2:
        return rng.choice([Atom(a) for a in atoms] + [Unit()])
    left = rng.randint(1, nodes - 2)
    op = rng.choice([Tensor, Lolli])
    return op(rand_imll(rng, left, atoms), rand_imll(rng, nodes - 1 - left, atoms))


def symbols(f):
    return 1 + sum(symbols(c) for c in f.children())


def rand_sequent(rng, max_size=6):
    while True:
        parts = [rand_imll(rng, rng.randint(1, 5)) for _ in range(rng.randint(1, 4))]
        if sum(map(symbols, parts)) <= max_size:
            return Sequent(Multiset(parts[:-1]), parts[-1])


def rand_rule(rng, atoms=("p", "q", "r")):
    prem = [(rng.sample(atoms * 2, rng.randint(0, 2)), rng.choice(atoms)) for _ in range(rng.randint(0, 2))]
    return R(prem, rng.choice(atoms))


def rand_base(rng, lo=1, hi=4):
    return Base([rand_rule(rng) for _ in range(rng.randint(lo, hi))])


def derivable(base, max_res=2, nodes=1500):
    out = []
    atoms = sorted(base.atoms())
    for k in range(max_res + 1):
        for res in combinations_with_replacement(atoms, k):
            for goal in atoms:
                r = derive(base, list(res), goal, Budget(max_nodes=nodes))
                if r.found:
                    out.append((list(res), goal, r.value))
    return out


# -- 1 --------------------------------------------------------------------------------

def test_worked_example_end_to_end(criterion):
    t0 = time.perf_counter()
    s = parse_sequent(WORKED)
    proof = prove(s)
    m, base, res, goal = bespoke_base(s)
    d = derive(base, res, goal, models=flat_models(m))
    f = lambda x: m.flat(parse_formula(x))
    steps = [R([([], "p1"), ([], "p2")], f("p1 * p2")),
             R([([], f("p1 * p2 -o q")), ([], f("p1 * p2"))], "q"),
             R([([], "q"), ([], "p1")], f("q * p1"))]
    used = d.value.rules_used() if d.found else []
    in_order = [r for r in used if r in steps] == steps
    extracted = extract_proof("M", m, d.value) if d.found else None
    seconds = time.perf_counter() - t0
    ok = bool(proof.found and check_proof(proof.value, s) and len(m.fresh_atoms()) == 3
              and sorted(res) == sorted(["p1", "p2", "p1", f("p1 * p2 -o q")])
              and d.found and check_derivation(base, d.value, (res, goal)) and in_order
              and check_proof(extracted, s) and seconds < 5)
    criterion(1, "worked example end-to-end", ok,
              f"{len(base)} rules in M, steps {'in order' if in_order else 'MISSING'}, {seconds:.2f}s")
    assert ok


# -- 2, 3 -------------------------------------------------------------------------------

@pytest.mark.slow
def test_imll_central_equivalence(criterion):
    seqs = list(enumerate_sequents(IMLL, ("p", "q"), 3, 3))
    rep = crosscheck(seqs, logic=IMLL)
    ok = rep.ok and not rep.indeterminate and rep.agreement == 100 and rep.seconds < 300
    criterion(2, "IMLL provability = derivability in M", ok, rep.summary())
    assert ok


@pytest.mark.slow
def test_ipl_route_both_modes(criterion):
    seqs = list(enumerate_sequents(IPL, ("p", "q"), 3, 3))
    reps = [crosscheck(seqs, mode, IPL) for mode in (STANDARD, STAR)]
    seconds = sum(r.seconds for r in reps)
    ok = all(r.ok and not r.indeterminate and r.agreement == 100 for r in reps) and seconds < 600
    criterion(3, "IPL provability = derivability in N (both conjunction modes)", ok,
              "; ".join(r.summary() for r in reps))
    assert ok


# -- 4 ----------------------------------------------------------------------------------

def test_substructurality(criterion):
    cases = {"p |- p * p": False, "p, q |- p": False, "p, p |- p": False,
             "p * q |- q * p": True, "I, p |- p": True, "p |- I * p": True}
    bad = []
    for text, expected in cases.items():
        s = parse_sequent(text)
        r = prove(s)
        if brute_force_prove(s, 10) != expected or r.found != expected or (r.found and not check_proof(r.value, s)):
            bad.append(text)
    criterion(4, "substructural verdicts match the depth-10 oracle", not bad, f"{len(cases) - len(bad)}/{len(cases)}")
    assert not bad


# -- 5 ----------------------------------------------------------------------------------

def test_random_oracle_agreement(criterion):
    rng = random.Random(5)
    seqs = [rand_sequent(rng) for _ in range(200)]
    disagree = [str(s) for s in seqs if prove(s).found != brute_force_prove(s, 10)]
    provable = sum(prove(s).found for s in seqs)
    criterion(5, "prover agrees with the brute-force oracle on 200 random sequents", not disagree,
              f"{len(disagree)} disagreements, {provable} provable")
    assert not disagree


# -- 6 ----------------------------------------------------------------------------------

def _corpus(rng):
    proofs = []
    for text in [WORKED, "p * q |- q * p", "p -o q, q -o r |- p -o r", "I, p |- p", "p |- I * p",
                 "p * (q * r) |- (p * q) * r", "(p * q) -o r |- p -o q -o r", "p, I -o q |- p * q"]:
        s = parse_sequent(text)
        proofs.append((prove(s).value, s))
    for text in ["p /\\ q |- q /\\ p", "p \\/ q |- q \\/ p", "p -> q, q -> r |- p -> r",
                 "(p \\/ q) /\\ r |- (p /\\ r) \\/ (q /\\ r)", "_|_ |- p", "p, p -> q |- q /\\ p"]:
        s = parse_sequent(text, IPL)
        proofs.append((prove_ipl(s).value, s))
    derivations = []
    for text in [WORKED, "p * q |- q * p", "p -o q, p |- q"]:
        m, base, res, goal = bespoke_base(parse_sequent(text))
        derivations.append((base, derive(base, res, goal, models=flat_models(m)).value, (res, goal)))
    for text in ["p /\\ q |- q", "p \\/ q |- q \\/ p"]:
        m, base, res, goal = bespoke_base(parse_sequent(text, IPL))
        derivations.append((base, derive(base, res, goal).value, (res, goal)))
    while len(derivations) < 16:
        base = rand_base(rng, 2, 5)
        found = [q for q in derivable(base) if q[2].size() > 2]
        if found:
            res, goal, d = rng.choice(found)
            derivations.append((base, d, (res, goal)))
    return proofs, derivations


def test_checker_robustness(criterion):
    rng = random.Random(6)
    proofs, derivations = _corpus(rng)
    false_accepts, identities, rejected = [], 0, 0
    for i in range(1000):
        if i % 2 == 0:
            p, s = rng.choice(proofs)
            mutant = mutate_proof(p, rng)
            same = mutant == p
            accepted = bool(check_proof(mutant, s))
        else:
            base, d, (res, goal) = rng.choice(derivations)
            mutant = mutate_derivation(d, base, rng)
            same = mutant == d
            accepted = bool(check_derivation(base, mutant, (res, goal)))
        if same:
            identities += 1
        elif accepted:
            false_accepts.append(mutant)
        else:
            rejected += 1
    criterion(6, "1000 single-node mutations", not false_accepts,
              f"{rejected} rejected, {identities} identity mutations, {len(false_accepts)} false accepts")
    assert not false_accepts


# -- 7 ----------------------------------------------------------------------------------

def _multiset_laws(rng):
    for _ in range(200):
        a, b, c = (Multiset(rng.choices("pqr", k=rng.randint(0, 4))) for _ in range(3))
        if not (a + b == b + a and (a + b) + c == a + (b + c) and (a + b) - b == a
                and Counter(a + b) == Counter(a) + Counter(b) and (a + Multiset()) == a):
            return False
    return True


def _degree_monotone(rng):
    for _ in range(200):
        f = rand_imll(rng, rng.randint(1, 9))
        if any(degree(g) > degree(f) or (g != f and degree(g) >= degree(f)) for g in subformulas(f)):
            return False
    return True


def _monotone_under_supersets(rng):
    done = 0
    while done < 100:
        base = rand_base(rng)
        found = derivable(base)
        if not found:
            continue
        res, goal, d = rng.choice(found)
        bigger = base.extend(rand_rule(rng) for _ in range(rng.randint(1, 3)))
        r = derive(bigger, res, goal, Budget(max_nodes=50_000))
        if not (check_derivation(bigger, d) and r.status in ("found", "budget-exhausted")):
            return False
        done += 1
    return True


def _round_trip(rng):
    for _ in range(100):
        forms = [rand_imll(rng, rng.randint(1, 9)) for _ in range(rng.randint(1, 3))]
        m = make_flattening(subformulas(forms))
        gamma = rng.choices(sorted(m.domain, key=str), k=rng.randint(0, 5))
        flat = [m.flat(x) for x in gamma]
        if [m.deflat(a) for a in flat] != gamma or len(m.image()) != len(m.domain):
            return False
    return True


def _graft_checks(rng):
    done = 0
    while done < 100:
        base = rand_base(rng)
        found = [q for q in derivable(base) if q[0]]
        if not found:
            continue
        res, goal, outer = rng.choice(found)
        hyps = list(Multiset(res).items[: rng.randint(1, len(res))])
        x = base.extend([rand_rule(rng)] + [R([], h) for h in hyps])
        inner = [derive(x, [], h).value for h in hyps]
        out = graft(outer, hyps, inner, x)
        same = graft(outer, hyps, [ref(h) for h in hyps], base)
        if not (check_derivation(x, out) and out.resources == Multiset(res) - hyps
                and check_derivation(base, same) and same.resources == outer.resources
                and naive_derivable(x, list(out.resources), out.goal, out.height())):
            return False
        done += 1
    return True


def _flattening_lemma(rng):
    done = 0
    budget = Budget(max_nodes=100_000)
    while done < 50:
        forms = [rand_imll(rng, rng.randint(3, 5)) for _ in range(rng.randint(1, 2))]
        m = make_flattening(subformulas(forms))
        compounds = m.compounds()
        if not compounds:
            continue
        chi = rng.choice(compounds)
        image = sorted(m.image())
        s = rng.choices(image, k=rng.randint(0, 2))
        b = build_base_M(m)
        models = flat_models(m)
        ask = lambda res, goal: derive(b, res, goal, budget, models=models)
        lhs = ask(s, m.flat(chi))
        if isinstance(chi, Lolli):
            rhs = ask(s + [m.flat(chi.left)], m.flat(chi.right))
            if "budget-exhausted" in (lhs.status, rhs.status):
                continue
            if lhs.found != rhs.found:
                return False
        else:
            v = rng.choices(image, k=rng.randint(0, 1))
            p = rng.choice(image)
            inner = v + ([m.flat(chi.left), m.flat(chi.right)] if isinstance(chi, Tensor) else [])
            prem, concl = ask(inner, p), ask(s + v, p)
            if "budget-exhausted" in (lhs.status, prem.status, concl.status):
                continue
            if lhs.found and prem.found and not concl.found:
                return False
            witness = [m.flat(chi.left), m.flat(chi.right)] if isinstance(chi, Tensor) else []
            if not ask(witness, m.flat(chi)).found:
                return False
        done += 1
    return True


def test_property_suites(criterion):
    rng = random.Random(7)
    suites = {
        "multiset laws": _multiset_laws,
        "degree monotonicity": _degree_monotone,
        "derivability under 100 supersets": _monotone_under_supersets,
        "flattening round-trip on 100 closures": _round_trip,
        "graft outputs check": _graft_checks,
        "flattening lemma on 50 triples": _flattening_lemma,
    }
    results = {name: fn(rng) for name, fn in suites.items()}
    failed = [n for n, ok in results.items() if not ok]
    criterion(7, "property suites", not failed, f"{len(suites) - len(failed)}/{len(suites)} green"
              + (f", failing: {', '.join(failed)}" if failed else ""))
    assert not failed


# -- 8 ----------------------------------------------------------------------------------

@pytest.mark.slow
def test_semantics_soundness(criterion):
    rng = random.Random(8)
    budget = EvalBudget(max_extensions=10, max_steps=3_000, derive_nodes=2_000)
    contradictions, witnesses, replayed, valid_checked = [], 0, 0, 0
    for logic in (IMLL, IPL):
        seqs = list(enumerate_sequents(logic, ("p", "q"), 3, 3))
        verdicts = [decide_validity(s) for s in seqs]
        valid = [s for s, v in zip(seqs, verdicts) if v]
        invalid = [s for s, v in zip(seqs, verdicts) if not v]
        for s in rng.sample(valid, 60):
            e = ExtensionEnumerator.for_sequent(s)
            for base in e.extensions(Base((), "multiset" if logic == IMLL else "set"), 3):
                out = eval_support(judgement(base, s.conclusion, s.context, (), logic), e, budget)
                valid_checked += 1
                if isinstance(out, Refuted):
                    contradictions.append(str(s))
        for s in rng.sample(invalid, 60):
            e = ExtensionEnumerator.for_sequent(s)
            w = find_refuting_extension(s, e, budget)
            if w is not None:
                witnesses += 1
                replayed += replay(w, e, budget)
    ok = not contradictions and replayed == witnesses
    criterion(8, "semantic evaluation never refutes a valid sequent; witnesses replay", ok,
              f"{valid_checked} valid judgements, {len(contradictions)} contradictions, "
              f"{replayed}/{witnesses} witnesses replayed")
    assert ok
