"""Logic programs shared by the soundness, fairness and independence tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from nsts.parser import parse_program, parse_query
from nsts.synthesis import GrammarConfig, IoExample, check_goal, synthesis_source


@dataclass
class Case:
    name: str
    source: str
    query: str
    finite: bool = True
    # reference depth bound for infinite spaces; finite cases are enumerated fully
    ref_bound: int = 40
    max_answers: Optional[int] = None
    externals: Dict = field(default_factory=dict)
    # depth of the only successful derivation, for the deep instances
    deep: Optional[int] = None

    def program(self):
        return parse_program(self.source, self.externals)

    def goals(self):
        return parse_query(self.query)


def _lst(*xs):
    out = "nil"
    for x in reversed(xs):
        out = f"cons({x}, {out})"
    return out


NAT = """
add(z, N, N).
add(s(M), N, s(K)) :- add(M, N, K).
"""

TYPING = """
typ(G, lit(N), nat).
typ(G, var(X), T) :- lookup(G, X, T).
typ(G, lam(X, E), arr(A, B)) :- typ(bind(X, A, G), E, B).
typ(G, app(E1, E2), B) :- typ(G, E1, arr(A, B)), typ(G, E2, A).
typ(G, E, T) :- typ(G, E, S), sub(S, T).
lookup(bind(X, T, G), X, T).
lookup(bind(Y, S, G), X, T) :- lookup(G, X, T).
sub(nat, int).
sub(int, real).
sub(arr(A1, B1), arr(A2, B2)) :- sub(A2, A1), sub(B1, B2).
"""


def _synth(name, variables, constants, ops, depth, examples, finite=True):
    cfg = GrammarConfig(variables, constants, ops, depth)
    exs = [IoExample(env, out) for env, out in examples]
    return Case(name, synthesis_source(cfg, exs), "solution(X)", finite,
                externals={("check", 3): check_goal})


FINITE = [
    Case("family", """
parent(tom, bob). parent(tom, liz). parent(bob, ann). parent(bob, pat). parent(pat, jim).
grandparent(X, Z) :- parent(X, Y), parent(Y, Z).
""", "grandparent(X, Y)"),
    Case("ancestor_dag", """
par(a, b). par(b, c). par(a, d). par(d, c). par(c, e).
anc(X, Y) :- par(X, Y).
anc(X, Y) :- par(X, Z), anc(Z, Y).
""", "anc(a, Y)"),
    Case("append_split", """
app(nil, L, L).
app(cons(H, T), L, cons(H, R)) :- app(T, L, R).
""", f"app(X, Y, {_lst(1, 2, 3)})"),
    Case("coloring", """
color(red). color(green). color(blue).
diff(X, Y) :- color(X), color(Y), neq(X, Y).
neq(red, green). neq(red, blue). neq(green, red). neq(green, blue). neq(blue, red). neq(blue, green).
map(A, B, C) :- diff(A, B), diff(B, C), diff(A, C).
""", "map(A, B, C)"),
    Case("nat_split", NAT, "add(X, Y, s(s(s(z))))"),
    Case("member_conj", """
mem(X, cons(X, T)).
mem(X, cons(H, T)) :- mem(X, T).
""", f"mem(X, {_lst('a', 'b', 'c')}), mem(X, {_lst('c', 'd', 'a')})"),
    Case("unsat", """
q(a). q(b). r(c).
p(X) :- q(X), r(X).
""", "p(X)"),
    Case("reverse", """
rev(L, R) :- rev3(L, nil, R).
rev3(nil, A, A).
rev3(cons(H, T), A, R) :- rev3(T, cons(H, A), R).
""", f"rev({_lst(1, 2, 3)}, R)"),
    Case("dag_paths", """
edge(a, b). edge(b, d). edge(a, c). edge(c, d). edge(b, c).
path(X, X, cons(X, nil)).
path(X, Y, cons(X, P)) :- edge(X, Z), path(Z, Y, P).
""", "path(a, d, P)"),
    Case("times", NAT + """
times(z, N, z).
times(s(M), N, K) :- times(M, N, J), add(J, N, K).
""", "times(s(s(z)), s(s(s(z))), K)"),
    Case("permutations", """
sel(X, cons(X, T), T).
sel(X, cons(H, T), cons(H, R)) :- sel(X, T, R).
perm(nil, nil).
perm(L, cons(X, P)) :- sel(X, L, R), perm(R, P).
""", f"perm({_lst(1, 2, 3)}, P)"),
    Case("open_answer", """
likes(X, icecream).
likes(bob, tea).
""", "likes(Who, What)"),
    _synth("synth_inc_d2", ("x",), (0, 1), ("add",), 2,
           [({"x": 0}, 1), ({"x": 1}, 2)]),
    _synth("synth_const7", ("x",), (1, 7), ("add",), 2,
           [({"x": 0}, 7), ({"x": 1}, 7)]),
    _synth("synth_identity", ("x",), (0, 1), ("add", "mul"), 2,
           [({"x": 0}, 0), ({"x": 1}, 1)]),
]

# the only successful derivation sits at depth 6-8, next to infinite failing branches
DEEP = [
    Case("deep_nat", """
nat(z).
nat(s(X)) :- nat(X).
eq(X, X).
goal(X) :- nat(X), eq(X, s(s(s(s(s(z)))))).
""", "goal(X)", finite=False, ref_bound=7, max_answers=1, deep=7),
    Case("deep_chain", """
p1(X) :- r(X, z).
p1(X) :- p2(X).
r(X, N) :- r(X, s(N)).
p2(X) :- p3(X).
p3(X) :- p4(X).
p4(X) :- r(X, z).
p4(X) :- p5(X).
p5(X) :- p6(X).
p6(found).
""", "p1(X)", finite=False, ref_bound=6, max_answers=1, deep=6),
    Case("deep_even", """
even(X) :- bad(X, z).
even(z).
even(s(s(X))) :- even(X).
bad(X, N) :- bad(X, s(N)).
""", "even(s(s(s(s(s(s(s(s(s(s(s(s(s(s(z)))))))))))))))", finite=False, ref_bound=8,
         max_answers=1, deep=8),
]

INFINITE = [
    Case("typing_subsumption", TYPING, "typ(nil, app(lam(x, var(x)), lit(3)), real)",
         finite=False, ref_bound=8, max_answers=1),
    Case("typing_arrow", TYPING, "typ(nil, lam(x, var(x)), arr(nat, real))",
         finite=False, ref_bound=8, max_answers=1),
    Case("typing_open", TYPING, "typ(nil, lit(2), T)", finite=False, ref_bound=6, max_answers=3),
    Case("nat_open", NAT, "add(X, Y, Z)", finite=False, ref_bound=6, max_answers=4),
    Case("cyclic_reach", """
edge(a, b). edge(b, a). edge(b, c).
reach(X, Y) :- edge(X, Y).
reach(X, Y) :- edge(X, Z), reach(Z, Y).
""", "reach(a, Y)", finite=False, ref_bound=8, max_answers=3),
    _synth("synth_add_one", ("x",), (0, 1), ("add", "sub"), 3,
           [({"x": 0}, 1), ({"x": 1}, 2), ({"x": 2}, 3)], finite=False),
]
INFINITE[-1].max_answers = 1
INFINITE[-1].ref_bound = 6

ALL = FINITE + DEEP + INFINITE
