"""Enumerative synthesis of arithmetic expressions as a logic program.

The generated program has the shape::

    solution(X) :- term(X), verifies(X).
    term(X) :- term(X, s(s(s(z)))).
    term(var(X), s(N)) :- is_var(X).
    term(const(X), s(N)) :- is_const(X).
    term(binop(Op, T1, T2), s(N)) :- op(Op), term(T1, N), term(T2, N).
    verifies(X) :- io(X, 0), io(X, 1).
    io(X, 0) :- check(X, env(pair(x, 0)), 1).
    ...

The second argument of ``term/2`` is a Peano depth bound, so the candidate
space is finite.  ``check/3`` is an external predicate that evaluates the
expression with :func:`eval_expr`.
"""

from __future__ import annotations

import json
import operator
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .parser import parse_program, parse_term
from .search import SearchConfig, SolveResult, find_derivation, solve
from .terms import Compound, Const, Program, Term, Var, format_term

OPS = {"add": operator.add, "sub": operator.sub, "mul": operator.mul}
_LIMIT = 2 ** 63


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class GrammarConfig:
    variables: Tuple[str, ...] = ()
    constants: Tuple[int, ...] = ()
    ops: Tuple[str, ...] = ("add",)
    max_depth: int = 3

    def __post_init__(self) -> None:
        for name in ("variables", "constants", "ops"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.variables and not self.constants:
            raise ValueError("grammar needs at least one variable or constant")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        bad = [o for o in self.ops if o not in OPS]
        if bad:
            raise ValueError(f"unknown operators {bad}; choose from {sorted(OPS)}")
        for v in self.variables:
            if not v[:1].islower() or not v.isidentifier():
                raise ValueError(f"variable name {v!r} must be a lowercase identifier")


@dataclass(frozen=True)
class IoExample:
    env: Mapping[str, int]
    expected: int


def eval_expr(e: Term, env: Mapping[str, int]) -> int:
    if isinstance(e, Compound):
        if e.functor == "const" and len(e.args) == 1 and isinstance(e.args[0], Const) \
                and isinstance(e.args[0].value, int):
            return e.args[0].value
        if e.functor == "var" and len(e.args) == 1 and isinstance(e.args[0], Const):
            name = e.args[0].value
            if name not in env:
                raise EvaluationError(f"unbound variable {name}")
            return env[name]
        if e.functor == "binop" and len(e.args) == 3 and isinstance(e.args[0], Const) \
                and e.args[0].value in OPS:
            v = OPS[e.args[0].value](eval_expr(e.args[1], env), eval_expr(e.args[2], env))
            if abs(v) >= _LIMIT:
                raise EvaluationError("integer overflow")
            return v
    raise EvaluationError(f"not an expression: {format_term(e)}")


def ast_depth(e: Term) -> int:
    if isinstance(e, Compound) and e.functor == "binop":
        return 1 + max(ast_depth(e.args[1]), ast_depth(e.args[2]))
    return 1


def env_term(env: Mapping[str, int]) -> Term:
    if not env:
        return Const("env")
    return Compound("env", tuple(Compound("pair", (Const(k), Const(v))) for k, v in sorted(env.items())))


def _env_of(t: Term) -> Dict[str, int]:
    if t == Const("env"):
        return {}
    if not isinstance(t, Compound) or t.functor != "env":
        raise EvaluationError("malformed environment")
    out = {}
    for pair in t.args:
        if not (isinstance(pair, Compound) and pair.functor == "pair" and len(pair.args) == 2):
            raise EvaluationError("malformed environment entry")
        k, v = pair.args
        out[k.value] = v.value
    return out


def check_goal(goal: Term) -> bool:
    """External ``check(Expr, Env, Expected)``: does Expr evaluate to Expected under Env?"""
    try:
        expr, env, expected = goal.args
        return eval_expr(expr, _env_of(env)) == expected.value
    except (EvaluationError, AttributeError, ValueError, KeyError, TypeError):
        return False


def peano(n: int) -> str:
    return "s(" * n + "z" + ")" * n


def synthesis_source(cfg: GrammarConfig, examples: Sequence[IoExample]) -> str:
    if not examples:
        raise ValueError("at least one I/O example is required")
    for ex in examples:
        missing = set(cfg.variables) - set(ex.env)
        if missing:
            raise ValueError(f"example environment misses variables {sorted(missing)}")
    lines = [
        "solution(X) :- term(X), verifies(X).",
        f"term(X) :- term(X, {peano(cfg.max_depth)}).",
        "term(var(X), s(N)) :- is_var(X).",
        "term(const(X), s(N)) :- is_const(X).",
        "term(binop(Op, T1, T2), s(N)) :- op(Op), term(T1, N), term(T2, N).",
    ]
    lines += [f"is_var({v})." for v in cfg.variables]
    lines += [f"is_const({c})." for c in cfg.constants]
    lines += [f"op({o})." for o in cfg.ops]
    lines.append("verifies(X) :- " + ", ".join(f"io(X, {i})" for i in range(len(examples))) + ".")
    for i, ex in enumerate(examples):
        lines.append(f"io(X, {i}) :- check(X, {format_term(env_term(ex.env))}, {ex.expected}).")
    return "\n".join(lines) + "\n"


def make_synthesis_program(cfg: GrammarConfig, examples: Sequence[IoExample]) -> Program:
    return parse_program(synthesis_source(cfg, examples), {("check", 3): check_goal})


def synthesis_query() -> Tuple[Term, ...]:
    return (Compound("solution", (Var("X", 0),)),)


def consistent(e: Term, examples: Sequence[IoExample]) -> bool:
    try:
        return all(eval_expr(e, ex.env) == ex.expected for ex in examples)
    except EvaluationError:
        return False


def synthesize(cfg: GrammarConfig, examples: Sequence[IoExample], oracle,
               search_cfg: Optional[SearchConfig] = None) -> SolveResult:
    """Solve ``solution(X)``; every answer is re-checked against the examples."""
    program = make_synthesis_program(cfg, examples)
    res = solve(program, synthesis_query(), oracle, search_cfg)
    for a in res.answers:
        expr = next(iter(a.substitution.values()))
        if not consistent(expr, examples):
            raise AssertionError(f"synthesized {format_term(expr)} violates the examples")
    return res


def answer_exprs(res: SolveResult) -> List[Term]:
    return [next(iter(a.substitution.values())) for a in res.answers]


def target_derivation(cfg: GrammarConfig, examples: Sequence[IoExample], target: Union[str, Term]):
    """Derivation of ``solution(target)``, e.g. to prime a PerfectOracle; None if invalid."""
    if isinstance(target, str):
        target = parse_term(target)
    program = make_synthesis_program(cfg, examples)
    return find_derivation(program, (Compound("solution", (target,)),), max_answers=1)


@dataclass
class Benchmark:
    grammar: GrammarConfig
    examples: List[IoExample]
    target: Optional[str] = None
    name: str = ""


def load_benchmark(source: Union[str, Path, Mapping]) -> Benchmark:
    """Read a benchmark description (a JSON file path or an already-decoded mapping).

    Raises ValueError on anything malformed.
    """
    if isinstance(source, Mapping):
        data = source
        name = str(data.get("name", ""))
    else:
        try:
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ValueError(f"benchmark is not valid JSON: {e}") from e
        name = Path(source).stem
    if not isinstance(data, Mapping):
        raise ValueError("benchmark must be a JSON object")
    try:
        grammar = GrammarConfig(
            variables=tuple(data.get("variables", ())),
            constants=tuple(int(c) for c in data.get("constants", ())),
            ops=tuple(data.get("ops", ())),
            max_depth=int(data["max_depth"]),
        )
        examples = [IoExample({k: int(v) for k, v in ex["env"].items()}, int(ex["expected"]))
                    for ex in data["examples"]]
    except (KeyError, TypeError, AttributeError) as e:
        raise ValueError(f"malformed benchmark: {e!r}") from e
    if not examples:
        raise ValueError("benchmark has no examples")
    target = data.get("target")
    return Benchmark(grammar, examples, target, str(data.get("name", name)))
