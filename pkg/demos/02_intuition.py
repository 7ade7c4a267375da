"""What the engine tells the oracle: intuition segments and update reports.

Run with ``python demos/02_intuition.py``.
"""

# %%
from nsts import AdversarialOracle, SearchConfig, parse_program, parse_query, solve, summarize

program = parse_program("""
p(X) :- q(X), r(X).
q(a). q(b).
r(b).
""")
query = parse_query("p(X)")

# %% An adversarial oracle keeps proposing derivations that fail at the root
res = solve(program, query, AdversarialOracle(program, query, seed=2), SearchConfig(trace=True))
print(res.trace)

# %% The intuition is a tagged, byte-budgeted log; conclusions are what the search proved
print(summarize(res.intuition))
print("\n--- rendered intuition (what an LLM would see) ---\n")
print(res.intuition.render()[-800:])

# %% Recording every transition instead of novel conclusions only
res = solve(program, query, AdversarialOracle(program, query, seed=2), SearchConfig(record="transitions"))
print(len(res.intuition.segments), "segments with record='transitions'")
