"""The oracle boundary: prompt templates, the init/update protocol, and mock oracles.

An oracle is any object with two text-in/text-out methods::

    init(program, query, context) -> reply
    update(intuition, report) -> reply

Replies are parsed with :func:`nsts.guess.parse_guess`.  The mocks here make
every engine path testable without a language model; the HTTP client lives
in :mod:`nsts.llm`.
"""

from __future__ import annotations

import json
import random
import re
from importlib import resources
from pathlib import Path as FsPath
from typing import Dict, Iterable, List, Optional, Protocol, Sequence, Tuple, Union

from .derivation import DerivationTree, query_term
from .guess import Guess, OracleReport, no_guess, parse_guess
from .intuition import DEFAULT_BUDGET, Intuition, Tag, infer, record_guess
from .parser import query_variables
from .terms import CONJUNCTION, Program, Term, Var, VarNamer, format_clause, format_term, unify, rename_apart

_SLOT = re.compile(r"\{(program|query|context|conclusions|contradictions)\}")


class OracleError(RuntimeError):
    """Transport or protocol failure talking to an oracle."""


class IntuitionOracle(Protocol):
    def init(self, program: str, query: str, context: str) -> str: ...

    def update(self, intuition: str, report: str) -> str: ...


class PromptTemplates:
    """The init/update prompt texts with ``{slot}`` placeholders.

    Only the known slot names are substituted, so templates may contain
    literal braces (e.g. JSON examples).
    """

    def __init__(self, init: str, update: str, system: str):
        self.init = init
        self.update = update
        self.system = system

    @classmethod
    def load(cls, directory: Optional[Union[str, FsPath]] = None) -> "PromptTemplates":
        def read(name):
            if directory is not None:
                p = FsPath(directory) / name
                if p.exists():
                    return p.read_text(encoding="utf-8").rstrip("\n")
            return resources.files("nsts").joinpath("prompts", name).read_text(encoding="utf-8").rstrip("\n")

        return cls(read("init.txt"), read("update.txt"), read("system.txt"))

    @staticmethod
    def fill(template: str, **slots: str) -> str:
        return _SLOT.sub(lambda m: slots.get(m.group(1), m.group(0)), template)

    def render_init(self, program: str, query: str, context: str) -> str:
        return self.fill(self.init, program=program, query=query, context=context or "(none given)")

    def render_update(self, conclusions: str, contradictions: str, query: str) -> str:
        return self.fill(self.update, conclusions=conclusions or "(none yet)",
                         contradictions=contradictions or "(none)", query=query)


def numbered_program(p: Program) -> str:
    return "\n".join(f"{i}: {format_clause(c)}" for i, c in enumerate(p.clauses))


def query_text(query: Sequence[Term]) -> str:
    return ", ".join(format_term(g) for g in query)


def render_report(r: OracleReport, query: Sequence[Term], templates: PromptTemplates) -> str:
    conclusions = "\n".join(f"- {format_term(c)}" for c in r.new_conclusions)
    contradictions = "\n".join(f"- {c.describe()}" for c in r.contradictions)
    return templates.render_update(conclusions, contradictions, query_text(query))


def init_intuition(p: Program, query: Sequence[Term], context: str, o: IntuitionOracle,
                   templates: Optional[PromptTemplates] = None,
                   budget: Optional[int] = DEFAULT_BUDGET) -> Tuple[Intuition, Guess]:
    """Seed intuition with the init prompt and take the oracle's first guess."""
    templates = templates or PromptTemplates.load()
    prog, q = numbered_program(p), query_text(query)
    intuition = Intuition(byte_budget=budget).add(Tag.INIT, templates.render_init(prog, q, context))
    qvars = query_variables(query)
    try:
        reply = o.init(prog, q, context)
    except Exception as e:
        g = no_guess("", f"oracle failure: {type(e).__name__}: {e}")
    else:
        g = parse_guess(reply, qvars, p)
    return record_guess(intuition, g, qvars), g


def update_guess(i: Intuition, r: OracleReport, o: IntuitionOracle, query: Sequence[Term],
                 program: Optional[Program] = None,
                 templates: Optional[PromptTemplates] = None) -> Tuple[Intuition, Guess]:
    if not r:
        raise ValueError("update requested with an empty report")
    templates = templates or PromptTemplates.load()
    return infer(i, o, query_variables(query), render_report(r, query, templates), program)


# ---------------------------------------------------------------------------
# Mock oracles


class NullOracle:
    """Never guesses."""

    def init(self, program, query, context):
        return ""

    def update(self, intuition, report):
        return ""


def _reply_text(item, query_vars: Sequence[Var] = ()) -> str:
    if isinstance(item, str):
        return item
    if isinstance(item, Guess):
        return item.to_json(query_vars)
    if isinstance(item, DerivationTree):
        return json.dumps({"solution": None, "derivation": item.to_dict()})
    return json.dumps(item)


class ScriptedOracle:
    """Replies from a fixed script, one entry per call; silent once exhausted.

    Entries may be reply text, Guess or DerivationTree objects, or wire dicts.
    """

    def __init__(self, script: Iterable, query_vars: Sequence[Var] = ()):
        self.script = [_reply_text(x, query_vars) for x in script]
        self.calls = 0

    def _next(self) -> str:
        self.calls += 1
        if self.calls <= len(self.script):
            return self.script[self.calls - 1]
        return ""

    def init(self, program, query, context):
        return self._next()

    def update(self, intuition, report):
        return self._next()


class PerfectOracle:
    """Replays one known (valid) derivation on every call."""

    def __init__(self, derivation: DerivationTree, solution: Optional[Dict[str, str]] = None):
        self.derivation = derivation
        self.reply = json.dumps({"solution": solution, "derivation": derivation.to_dict()})

    def init(self, program, query, context):
        return self.reply

    def update(self, intuition, report):
        return self.reply


class AdversarialOracle:
    """Always proposes well-formed derivations that cite clauses whose heads mismatch.

    Models a chronically hallucinating model: each reply is structurally
    plausible but fails checking at the root.  Replies vary per call and are
    deterministic in ``seed``.
    """

    def __init__(self, program: Program, query: Sequence[Term], seed: int = 0, depth: int = 3):
        self.program = program
        self.query = tuple(query)
        self.seed = seed
        self.depth = depth
        self.calls = 0

    def _mismatching(self, goal: Term) -> List[int]:
        return [k for k, c in enumerate(self.program.clauses)
                if unify(goal, rename_apart(c).head) is None]

    def _node(self, goal: Term, rng: random.Random, level: int) -> DerivationTree:
        bad = self._mismatching(goal)
        clauses = self.program.clauses
        if level >= self.depth:
            facts = [k for k in bad if clauses[k].is_fact] or [k for k, c in enumerate(clauses) if c.is_fact]
            if facts:
                return DerivationTree(goal, rng.choice(facts))
            return DerivationTree(goal, len(clauses) + rng.randrange(3))
        if not bad:
            return DerivationTree(goal, len(clauses) + rng.randrange(3))
        k = rng.choice(bad)
        body = rename_apart(clauses[k]).body
        return DerivationTree(goal, k, tuple(self._node(b, rng, level + 1) for b in body))

    def guess(self) -> DerivationTree:
        self.calls += 1
        rng = random.Random(self.seed * 1_000_003 + self.calls)
        if len(self.query) == 1:
            return self._node(self.query[0], rng, 0)
        return DerivationTree(query_term(self.query), CONJUNCTION,
                              tuple(self._node(g, rng, 0) for g in self.query))

    def _reply(self) -> str:
        names = VarNamer(keep=query_variables(self.query), prefer_names=True)
        return json.dumps({"solution": None, "derivation": self.guess().to_dict(names)})

    def init(self, program, query, context):
        return self._reply()

    def update(self, intuition, report):
        return self._reply()
