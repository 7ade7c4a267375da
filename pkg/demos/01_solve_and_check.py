"""Solving a query and checking the derivations behind each answer.

Run with ``python demos/01_solve_and_check.py``.
"""

# %% A small program and a query
from nsts import NullOracle, SearchConfig, check_derivation, parse_program, parse_query, solve
from nsts.derivation import query_term
from nsts.terms import apply

program = parse_program("""
parent(tom, bob).
parent(bob, ann).
parent(ann, joe).
ancestor(X, Y) :- parent(X, Y).
ancestor(X, Y) :- parent(X, Z), ancestor(Z, Y).
""")
query = parse_query("ancestor(tom, Who)")

# %% Without an oracle the engine is a plain iterative-deepening prover
res = solve(program, query, NullOracle(), SearchConfig(max_answers=None))
print("status:", res.status)
for line in res.answer_lines():
    print(" ", line)

# %% Every answer carries a derivation tree that can be checked on its own
for a in res.answers:
    goal = apply(a.substitution, query_term(query))
    print(a.derivation.size(), "nodes, depth", a.derivation.depth(), "valid:", check_derivation(program, goal, a.derivation))

# %% The stats record the cost of the search
print(res.stats_json(timing=False))
