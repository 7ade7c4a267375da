"""Propose-and-check with no symbolic search, against the guided search.

Run with ``python demos/05_sequential_baseline.py``.
"""

# %%
from pathlib import Path

from nsts import AdversarialOracle, SearchConfig, run_sequential_baseline, solve
from nsts.synthesis import load_benchmark, make_synthesis_program, synthesis_query

b = load_benchmark(Path(__file__).parent / "benchmarks" / "add_one.json")
program, query = make_synthesis_program(b.grammar, b.examples), synthesis_query()

# %% A chronically wrong oracle: the baseline spends its whole budget and finds nothing
base = run_sequential_baseline(program, query, AdversarialOracle(program, query, seed=1), budget=50)
print("baseline:", base.status, "after", base.stats.oracle_calls, "calls, answers:", base.answer_lines())

# %% The guided search still terminates with an answer and few oracle calls
res = solve(program, query, AdversarialOracle(program, query, seed=1), SearchConfig(oracle_call_budget=16))
print("guided:  ", res.status, "after", res.stats.oracle_calls, "calls, answers:", res.answer_lines())

# %% The same comparison from the command line:
#   nsts compare demos/benchmarks/add_one.json --oracle adversarial --oracle-budget 50
