"""Different oracles change the cost of the search, never its answers.

Run with ``python demos/03_oracles.py``.
"""

# %%
from nsts import (AdversarialOracle, NullOracle, PerfectOracle, ScriptedOracle, SearchConfig,
                  parse_program, parse_query, solve)

program = parse_program("""
edge(a, b). edge(b, c). edge(c, f). edge(f, g). edge(g, d). edge(a, d).
path(X, X).
path(X, Y) :- edge(X, Z), path(Z, Y).
""")
query = parse_query("path(a, d)")
later = parse_query("path(a, Y)")

# %% A perfect oracle replays a known derivation; here the short direct edge
everything = solve(program, query, NullOracle(), SearchConfig(max_answers=None))
target = min((a.derivation for a in everything.answers), key=lambda d: d.size())
oracles = {
    "null": NullOracle(),
    "perfect": PerfectOracle(target),
    "adversarial": AdversarialOracle(program, query, seed=1),
    "scripted": ScriptedOracle(["no idea", "{broken json", target]),
}

# %% The first answer: a good guess saves work, a bad one costs oracle calls but not correctness
for name, o in oracles.items():
    res = solve(program, query, o)
    s = res.stats
    print(f"{name:12} {res.status} nodes={s.nodes_expanded} calls={s.oracle_calls} refutations={s.refutations}")

# %% All answers: the full space is explored either way, so the answer sets coincide
for name, o in {"null": NullOracle(), "perfect": PerfectOracle(target),
                "adversarial": AdversarialOracle(program, later, seed=1)}.items():
    res = solve(program, later, o, SearchConfig(max_answers=None))
    print(f"{name:12} {sorted(res.answer_lines())}")
