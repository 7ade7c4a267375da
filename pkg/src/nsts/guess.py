"""Oracle guesses, refutations of guesses, and the JSON wire format.

Wire schema::

    {"solution": {"<VarName>": "<term text>", ...} | null,
     "derivation": {"goal": "<term text>", "clause": <int>, "children": [...]} | null}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .derivation import DerivationTree, Path, Reason, format_path, well_formed
from .parser import ParseError, parse_term
from .terms import Program, Substitution, Term, Var, VarNamer, canonical, format_term


@dataclass(frozen=True)
class Guess:
    solution: Optional[Substitution] = None
    derivation: Optional[DerivationTree] = None
    raw: str = ""
    diagnostics: Tuple[str, ...] = ()

    @property
    def empty(self) -> bool:
        return self.solution is None and self.derivation is None

    def to_wire(self, query_vars: Sequence[Var] = ()) -> Dict:
        names = VarNamer(keep=query_vars, prefer_names=True)
        sol = None
        if self.solution is not None:
            sol = {names(v): format_term(t, names) for v, t in self.solution.items()}
        der = self.derivation.to_dict(names) if self.derivation is not None else None
        return {"solution": sol, "derivation": der}

    def to_json(self, query_vars: Sequence[Var] = ()) -> str:
        return json.dumps(self.to_wire(query_vars), sort_keys=True)

    def describe(self) -> str:
        if self.empty:
            why = "; ".join(self.diagnostics) or "oracle offered nothing"
            return f"no guess ({why})"
        return self.to_json()


def no_guess(raw: str = "", *diagnostics: str) -> Guess:
    return Guess(None, None, raw, tuple(diagnostics))


NO_GUESS = no_guess()


@dataclass(frozen=True)
class Contradiction:
    refuted_node: Path
    goal: Term
    reason: Reason
    clause_index: Optional[int] = None  # the guessed clause that was refuted

    def key(self):
        return (self.refuted_node, canonical(self.goal), self.reason, self.clause_index)

    def describe(self) -> str:
        where = f"node {format_path(self.refuted_node)} (goal {format_term(self.goal)}"
        if self.clause_index is not None:
            where += f", guessed clause {self.clause_index}"
        where += ")"
        detail = {
            Reason.CLAUSE_HEAD_MISMATCH: "the guessed clause does not apply to the goal reached there",
            Reason.NO_APPLICABLE_CLAUSE: "no clause of the program applies to that goal",
            Reason.EXHAUSTED_UNDER_BOUND: "every continuation below it failed within the current depth bound",
        }.get(self.reason, str(self.reason))
        return f"{where}: {self.reason.value}: {detail}"


@dataclass(frozen=True)
class OracleReport:
    new_conclusions: Tuple[Term, ...] = ()
    contradictions: Tuple[Contradiction, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.new_conclusions or self.contradictions)


def _json_objects(text: str):
    dec = json.JSONDecoder()
    i = text.find("{")
    while i != -1:
        try:
            obj, end = dec.raw_decode(text, i)
        except json.JSONDecodeError:
            i = text.find("{", i + 1)
            continue
        yield obj
        i = text.find("{", end)


def parse_guess(reply: str, query_vars: Sequence[Var], program: Optional[Program] = None) -> Guess:
    """Extract a Guess from free-form oracle text.  Never raises.

    Solution keys are matched to query variables by name.  Derivation goals
    share one variable namespace, separate from the query's.
    """
    if not isinstance(reply, str):
        return no_guess("", "reply is not text")
    block = None
    for obj in _json_objects(reply):
        if isinstance(obj, dict) and ("solution" in obj or "derivation" in obj):
            block = obj
            break
    if block is None:
        return no_guess(reply, "no JSON guess block in reply")
    diags: List[str] = []
    by_name = {v.name: v for v in query_vars}
    solution = None
    raw_sol = block.get("solution")
    if isinstance(raw_sol, dict):
        bindings = {}
        scope: Dict[str, Var] = {}
        for name, text in raw_sol.items():
            v = by_name.get(name)
            if v is None:
                diags.append(f"solution names unknown variable {name!r}")
                continue
            try:
                bindings[v] = parse_term(str(text), scope)
            except ParseError as e:
                diags.append(f"solution for {name}: {e}")
        if bindings:
            solution = Substitution(bindings)
    elif raw_sol is not None:
        diags.append("'solution' must be an object or null")
    derivation = None
    raw_der = block.get("derivation")
    if raw_der is not None:
        try:
            derivation = DerivationTree.from_dict(raw_der)
            problem = well_formed(derivation, program)
            if problem:
                diags.append(f"derivation rejected: {problem}")
                derivation = None
        except (ValueError, RecursionError) as e:
            diags.append(f"derivation rejected: {e}")
    return Guess(solution, derivation, reply, tuple(diags))
