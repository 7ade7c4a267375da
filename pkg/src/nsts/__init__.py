"""Logic programming engine whose search is biased by an external guessing oracle."""

from .derivation import (
    DerivationTree,
    Reason,
    SymbolicState,
    Transition,
    answer,
    check_derivation,
    expand,
    find_fault,
    initial_state,
    is_final,
)
from .guess import Contradiction, Guess, OracleReport, parse_guess
from .intuition import DualState, Intuition, Tag, combine, infer, summarize
from .llm import ConfigError, HttpLLMOracle, LLMConfig, http_llm_oracle
from .oracle import (
    AdversarialOracle,
    NullOracle,
    OracleError,
    PerfectOracle,
    PromptTemplates,
    ScriptedOracle,
    init_intuition,
    update_guess,
)
from .parser import ParseError, parse_program, parse_query, parse_term
from .search import SearchConfig, SolveResult, Status, Strategy, run_sequential_baseline, solve
from .synthesis import GrammarConfig, IoExample, eval_expr, make_synthesis_program, synthesize
from .terms import Clause, Compound, Const, Program, Substitution, Var, apply, format_term, unify

__version__ = "0.1.0"

__all__ = [
    "DerivationTree",
    "Reason",
    "SymbolicState",
    "Transition",
    "answer",
    "check_derivation",
    "expand",
    "find_fault",
    "initial_state",
    "is_final",
    "Contradiction",
    "Guess",
    "OracleReport",
    "parse_guess",
    "DualState",
    "Intuition",
    "Tag",
    "combine",
    "infer",
    "summarize",
    "ConfigError",
    "HttpLLMOracle",
    "LLMConfig",
    "http_llm_oracle",
    "AdversarialOracle",
    "NullOracle",
    "OracleError",
    "PerfectOracle",
    "PromptTemplates",
    "ScriptedOracle",
    "init_intuition",
    "update_guess",
    "ParseError",
    "parse_program",
    "parse_query",
    "parse_term",
    "SearchConfig",
    "SolveResult",
    "Status",
    "Strategy",
    "run_sequential_baseline",
    "solve",
    "GrammarConfig",
    "IoExample",
    "eval_expr",
    "make_synthesis_program",
    "synthesize",
    "Clause",
    "Compound",
    "Const",
    "Program",
    "Substitution",
    "Var",
    "apply",
    "format_term",
    "unify",
]
