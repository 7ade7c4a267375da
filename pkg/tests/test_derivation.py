import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import ALL, FINITE
from nsts.derivation import (
    DerivationTree,
    Reason,
    answer,
    check_derivation,
    expand,
    find_fault,
    initial_state,
    is_final,
    query_term,
    replay,
    tree_of,
    well_formed,
)
from nsts.parser import parse_program, parse_query, parse_term, query_variables
from nsts.synthesis import GrammarConfig, IoExample, make_synthesis_program
from nsts.terms import BUILTIN, CONJUNCTION, EMPTY, Const, apply, canonical, format_term, rename_apart
from reference import mm_unify

FIG6 = make_synthesis_program(GrammarConfig(("x",), (0, 1), ("add",), 3), [IoExample({"x": 0}, 1)])


def test_initial_state():
    s = initial_state(parse_query("solution(X)"))
    assert [format_term(g) for g in s.resolvent] == ["solution(X)"]
    assert s.subst == EMPTY and s.depth == 0
    assert len(initial_state(parse_query("p(a), q(b)")).resolvent) == 2
    with pytest.raises(ValueError):
        initial_state(())


def test_expand_solution_rule():
    succ = expand(initial_state(parse_query("solution(X)")), FIG6)
    assert len(succ) == 1
    t, s = succ[0]
    assert t.clause_index == 0
    assert [g.functor for g in s.resolvent] == ["term", "verifies"]
    assert s.resolvent[0].args[0] == s.resolvent[1].args[0]


def test_expand_order_and_bindings():
    p = parse_program("p(a). p(b).")
    q = parse_query("p(X)")
    succ = expand(initial_state(q), p)
    x = query_variables(q)[0]
    assert [format_term(apply(s.subst, x)) for _, s in succ] == ["a", "b"]
    assert all(s.depth == 1 and is_final(s) for _, s in succ)


def test_expand_final_state_rejected():
    p = parse_program("p(a).")
    (_, s), = expand(initial_state(parse_query("p(a)")), p)
    assert is_final(s)
    with pytest.raises(ValueError):
        expand(s, p)


def test_is_final():
    assert not is_final(initial_state(parse_query("p(X)")))


def test_answer():
    p = parse_program("p(a).")
    q = parse_query("p(X)")
    (_, s), = expand(initial_state(q), p)
    x = query_variables(q)[0]
    assert answer(s, [x]) == {x: Const("a")}
    (_, g), = expand(initial_state(parse_query("p(a)")), p)
    assert answer(g, []) == EMPTY
    with pytest.raises(ValueError):
        answer(initial_state(q), [x])


def test_check_derivation_examples():
    p = parse_program("p(a).")
    q = parse_term("p(X)")
    assert check_derivation(p, q, DerivationTree(q, 0))
    bad = DerivationTree(parse_term("q(X)"), 0)
    assert not check_derivation(p, parse_term("q(X)"), bad)
    assert find_fault(p, q, DerivationTree(q, 7)).reason is Reason.MALFORMED


def test_check_fig6_term_tree():
    t = parse_term("term(binop(add, var(x), const(1)), s(s(z)))")
    tree = DerivationTree(t, 4, (
        DerivationTree(parse_term("op(add)"), 8),
        DerivationTree(parse_term("term(var(x), s(z))"), 2, (DerivationTree(parse_term("is_var(x)"), 5),)),
        DerivationTree(parse_term("term(const(1), s(z))"), 3, (DerivationTree(parse_term("is_const(1)"), 7),)),
    ))
    assert FIG6.clauses[4].head.functor == "term" and FIG6.clauses[8].head.functor == "op"
    assert check_derivation(FIG6, t, tree)
    # swap a leaf's clause: const(1) is not a variable
    broken = DerivationTree(t, 4, tree.children[:2] + (
        DerivationTree(parse_term("term(const(1), s(z))"), 2, (DerivationTree(parse_term("is_var(1)"), 5),)),))
    f = find_fault(FIG6, t, broken)
    assert f is not None and f.path == (2,) and f.reason is Reason.CLAUSE_HEAD_MISMATCH


def test_external_nodes_checked():
    tree = DerivationTree(parse_term("check(var(x), env(pair(x, 0)), 0)"), BUILTIN)
    assert check_derivation(FIG6, tree.goal, tree)
    wrong = DerivationTree(parse_term("check(var(x), env(pair(x, 0)), 5)"), BUILTIN)
    assert find_fault(FIG6, wrong.goal, wrong).reason is Reason.NO_APPLICABLE_CLAUSE


def test_conjunction_root():
    p = parse_program("p(a). q(a).")
    q = parse_query("p(X), q(X)")
    _, s = expand(initial_state(q), p)[0]
    (_, s), = expand(s, p)
    tree = tree_of(s)
    assert tree.clause_index == CONJUNCTION and tree.depth() == 1
    assert check_derivation(p, query_term(q), tree)
    assert well_formed(DerivationTree(parse_term("p(a)"), 0, (tree,))) is not None


def test_tree_serialization_round_trip():
    scope = {}
    tree = DerivationTree(parse_term("p(X, f(Y))", scope), 1, (DerivationTree(parse_term("q(X)", scope), 0),))
    d = tree.to_dict()
    assert d == {"goal": "p(X, f(Y))", "clause": 1, "children": [{"goal": "q(X)", "clause": 0, "children": []}]}
    back = DerivationTree.from_dict(d)
    assert canonical(back.goal) == canonical(tree.goal)
    assert back.children[0].goal.args[0] == back.goal.args[0]
    with pytest.raises(ValueError):
        DerivationTree.from_dict({"goal": "p(", "clause": 0})
    with pytest.raises(ValueError):
        DerivationTree.from_dict({"goal": "p", "clause": "0"})


def test_well_formed_counts_children():
    p = parse_program("p(X) :- q(X), r(X). q(a). r(a).")
    assert well_formed(DerivationTree(parse_term("p(a)"), 0, (DerivationTree(parse_term("q(a)"), 1),)), p)
    assert well_formed(DerivationTree(parse_term("p(a)"), 0), None) is None


def _ref_successors(s, p):
    """Leftmost goal against every clause with the reference unifier."""
    out = []
    goal = s.resolvent[0]
    for k, c in enumerate(p.clauses):
        if mm_unify(goal, rename_apart(c).head) is not None:
            out.append(k)
    return out


def _walk(p, q, rng, steps=60):
    s = initial_state(q)
    seen = [s]
    for _ in range(steps):
        if is_final(s):
            break
        succ = expand(s, p)
        if not succ:
            break
        s = rng.choice(succ)[1]
        seen.append(s)
    return seen


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(ALL), st.integers(0, 10 ** 6))
def test_expand_matches_reference_and_replays(case, seed):
    p, q = case.program(), case.goals()
    for s in _walk(p, q, random.Random(seed)):
        if is_final(s):
            continue
        succ = expand(s, p)
        if p.external_for(s.resolvent[0]) is None:
            assert [t.clause_index for t, _ in succ] == _ref_successors(s, p)
        for t, s2 in succ:
            assert s2.depth == s.depth + 1
            assert replay(s, t, p) == s2


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(FINITE), st.integers(0, 10 ** 6))
def test_final_states_yield_checkable_trees(case, seed):
    p, q = case.program(), case.goals()
    rng = random.Random(seed)
    for _ in range(5):
        states = _walk(p, q, rng, 200)
        last = states[-1]
        if is_final(last):
            tree = tree_of(last)
            assert check_derivation(p, query_term(q), tree)
            assert canonical(tree.goal) == canonical(apply(last.subst, query_term(q)))


def test_replay_rejects_foreign_transition():
    p = parse_program("p(a). p(b).")
    s = initial_state(parse_query("p(X)"))
    (t, _), _ = expand(s, p)
    other = initial_state(parse_query("p(c)"))
    assert replay(other, t, p) is None
