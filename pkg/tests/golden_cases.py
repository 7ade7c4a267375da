"""Inputs for the golden prompt renderings; regenerate goldens with ``python tests/golden_cases.py``."""

from pathlib import Path

from nsts.derivation import Reason
from nsts.guess import Contradiction, OracleReport
from nsts.intuition import DualState, Intuition, Tag, record_contradiction, record_novel_conclusion
from nsts.derivation import initial_state
from nsts.oracle import PromptTemplates, numbered_program, query_text, render_report
from nsts.parser import parse_program, parse_query, parse_term

GOLDEN = Path(__file__).parent / "golden"

PROGRAM = parse_program("""
solution(X) :- term(X), verifies(X).
term(var(X)) :- is_var(X).
term(const(X)) :- is_const(X).
term(binop(Op, T1, T2)) :- op(Op), term(T1), term(T2).
is_var(x).
is_const(1).
op(add).
verifies(X) :- check(X, env(pair(x, 2)), 3).
""", {("check", 3): lambda g: False})
QUERY = parse_query("solution(X)")
CONTEXT = "Find an expression in x that adds one."


def init_prompt() -> str:
    t = PromptTemplates.load()
    return t.render_init(numbered_program(PROGRAM), query_text(QUERY), CONTEXT)


def report():
    c = Contradiction((0,), parse_term("term(X)"), Reason.CLAUSE_HEAD_MISMATCH, 2)
    return OracleReport((parse_term("term(var(x))"), parse_term("op(add)")), (c,))


def update_prompt() -> str:
    return render_report(report(), QUERY, PromptTemplates.load())


def intuition_render() -> str:
    d = DualState(initial_state(QUERY), Intuition().add(Tag.INIT, init_prompt()))
    d = record_novel_conclusion(d, parse_term("term(var(x))"))
    d = record_contradiction(d, report().contradictions[0])
    return d.intuition.add(Tag.GUESS, '{"derivation": null, "solution": {"X": "var(x)"}}').render()


RENDERINGS = {"init_prompt.txt": init_prompt, "update_prompt.txt": update_prompt,
              "intuition.txt": intuition_render}

if __name__ == "__main__":
    for name, fn in RENDERINGS.items():
        (GOLDEN / name).write_text(fn(), encoding="utf-8")
