"""Program synthesis as proof search: find an expression matching I/O examples.

Run with ``python demos/04_synthesis.py``.
"""

# %%
from pathlib import Path

from nsts import NullOracle, PerfectOracle
from nsts.synthesis import answer_exprs, load_benchmark, synthesis_source, synthesize, target_derivation
from nsts.terms import format_term

BENCH = Path(__file__).parent / "benchmarks"

# %% The benchmark becomes an ordinary logic program with an external check/3
b = load_benchmark(BENCH / "add_one.json")
print(synthesis_source(b.grammar, b.examples))

# %% Unguided search versus a guess that already names the target
for name in ("add_one", "pronic", "square_diff"):
    b = load_benchmark(BENCH / f"{name}.json")
    d = target_derivation(b.grammar, b.examples, b.target)
    null = synthesize(b.grammar, b.examples, NullOracle())
    perfect = synthesize(b.grammar, b.examples, PerfectOracle(d))
    print(f"{name}: null found {format_term(answer_exprs(null)[0])} in {null.stats.nodes_expanded} nodes; "
          f"guided found {format_term(answer_exprs(perfect)[0])} in {perfect.stats.nodes_expanded} nodes "
          f"(guess has {d.size()} nodes)")
