"""Fair, guess-biased search over SLD derivations.

The solver runs the symbolic transition system of :mod:`nsts.derivation`
under iterative deepening on derivation-tree depth, so every finite
derivation is reached eventually whatever the oracle says.  The current
guess only reorders successors (and lets the path that follows it run past
the current bound, see ``SearchConfig.guided_lookahead``); it never prunes.

When the search shows a guessed node cannot be realised, the contradiction
is added to the running intuition and the oracle is asked again, up to
``oracle_call_budget`` calls in total (the first call seeds the intuition).

``run_sequential_baseline`` is the plain propose-and-check loop with no
search at all, kept for comparison.
"""

from __future__ import annotations

import enum
import json
import logging
import time
from collections import deque
from dataclasses import dataclass, replace
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from .derivation import (
    DerivationTree,
    Path,
    Reason,
    SymbolicState,
    Transition,
    answer,
    expand,
    find_fault,
    format_path,
    initial_state,
    query_term,
    tree_of,
)
from .guess import NO_GUESS, Contradiction, Guess, OracleReport
from .intuition import (
    DEFAULT_BUDGET,
    DualState,
    Intuition,
    combine,
    record_contradiction,
    record_novel_conclusion,
    transition_intuition,
)
from .oracle import IntuitionOracle, NullOracle, PromptTemplates, init_intuition, update_guess
from .parser import query_variables
from .terms import (
    CONJUNCTION,
    Program,
    Substitution,
    Term,
    Var,
    VarNamer,
    apply,
    canonical,
    canonical_tuple,
    format_term,
    fresh_ids,
    unify,
)

log = logging.getLogger(__name__)


class Strategy(str, enum.Enum):
    ITERATIVE_DEEPENING = "IterativeDeepening"
    BREADTH_FIRST = "BreadthFirst"


class Status(str, enum.Enum):
    SOLVED = "Solved"
    EXHAUSTED = "ExhaustedFiniteSpace"
    BUDGET_EXCEEDED = "BudgetExceeded"
    DEPTH_OPEN = "DepthOpen"

    def __str__(self) -> str:
        return self.value


@dataclass
class SearchConfig:
    strategy: Strategy = Strategy.ITERATIVE_DEEPENING
    depth_start: int = 4
    depth_step: int = 2
    node_budget: Optional[int] = None
    oracle_call_budget: Optional[int] = 16
    max_answers: Optional[int] = 1  # None: all answers
    seed: int = 0
    max_depth: Optional[int] = None
    # guess-following goals may run past the deepening bound (the guess is finite)
    guided_lookahead: bool = True
    # "conclusions": novel proven goals; "transitions": every step; "none"
    record: str = "conclusions"
    trace: bool = False
    context: str = ""
    intuition_budget: Optional[int] = DEFAULT_BUDGET
    occurs_check: bool = True
    templates: Optional[PromptTemplates] = None

    def __post_init__(self) -> None:
        self.strategy = Strategy(self.strategy)
        for name in ("depth_start", "depth_step", "node_budget", "oracle_call_budget", "max_answers", "max_depth"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if self.record not in ("conclusions", "transitions", "none"):
            raise ValueError(f"unknown record mode {self.record!r}")


@dataclass
class Stats:
    nodes_expanded: int = 0
    transitions_taken: int = 0
    oracle_calls: int = 0
    refutations: int = 0
    wall_time: float = 0.0


class Answer(NamedTuple):
    substitution: Substitution
    derivation: DerivationTree


def format_answer(sub: Substitution, query_vars: Sequence[Var]) -> str:
    names = VarNamer(keep=query_vars)
    parts = [f"{v.name} = {format_term(sub[v], names)}" for v in query_vars if v in sub]
    return ", ".join(parts) if parts else "true"


@dataclass
class SolveResult:
    answers: List[Answer]
    status: Status
    stats: Stats
    trace: Optional[List[str]] = None
    complete: bool = False
    intuition: Optional[Intuition] = None
    query_vars: Tuple[Var, ...] = ()

    def answer_lines(self) -> List[str]:
        return [format_answer(a.substitution, self.query_vars) for a in self.answers]

    def stats_dict(self, timing: bool = True) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "answers": self.answer_lines(),
            "nodes_expanded": self.stats.nodes_expanded,
            "transitions": self.stats.transitions_taken,
            "oracle_calls": self.stats.oracle_calls,
            "refutations": self.stats.refutations,
            "wall_ms": round(self.stats.wall_time * 1000, 3) if timing else None,
        }

    def stats_json(self, timing: bool = True) -> str:
        return json.dumps(self.stats_dict(timing), indent=2)


# ---------------------------------------------------------------------------
# Bias and refutation


def bias_order(succs: Sequence[Tuple[Transition, SymbolicState]], guess: Guess,
               path: Optional[Path]) -> List[Tuple[Transition, SymbolicState]]:
    """Stable reorder of successors toward the guess.

    Successors using the clause the guessed derivation cites at ``path`` go
    first; pass ``path=None`` when the state has left the guessed tree.  A
    guessed solution moves compatible successors ahead of incompatible ones
    as a secondary key.  Nothing is ever dropped.
    """
    if guess.empty:
        return list(succs)
    want = None
    if path is not None and guess.derivation is not None:
        node = guess.derivation.node_at(path)
        want = node.clause_index if node is not None else None
    sol = guess.solution
    if want is None and not sol:
        return list(succs)

    def compatible(state: SymbolicState) -> bool:
        return all(unify(apply(state.subst, v), t) is not None for v, t in sol.items())

    def key(item):
        t, s = item
        return (0 if t.clause_index == want else 1, 0 if not sol or compatible(s) else 1)

    return sorted(succs, key=key)


@dataclass(frozen=True)
class ExpandEvent:
    """A goal on the guessed path was expanded."""

    path: Path
    goal: Term
    clause_indices: Tuple[int, ...]  # clauses of the successors actually produced


@dataclass(frozen=True)
class ExhaustedEvent:
    """Search below a goal on the guessed path finished without success, with cut-offs."""

    path: Path
    goal: Term
    bound: int


def detect_refutation(guess: Guess, event: Union[ExpandEvent, ExhaustedEvent]) -> Optional[Contradiction]:
    if guess.derivation is None:
        return None
    node = guess.derivation.node_at(event.path)
    if node is None:
        return None
    if isinstance(event, ExhaustedEvent):
        return Contradiction(event.path, event.goal, Reason.EXHAUSTED_UNDER_BOUND, node.clause_index)
    if not event.clause_indices:
        return Contradiction(event.path, event.goal, Reason.NO_APPLICABLE_CLAUSE, node.clause_index)
    if node.clause_index not in event.clause_indices:
        return Contradiction(event.path, event.goal, Reason.CLAUSE_HEAD_MISMATCH, node.clause_index)
    return None


def on_refutation(state: DualState, c: Contradiction, o: IntuitionOracle, *, query: Sequence[Term],
                  program: Optional[Program] = None, budget_left: bool = True,
                  conclusions: Sequence[Term] = (),
                  templates: Optional[PromptTemplates] = None) -> Tuple[DualState, Guess]:
    """Record ``c`` and ask for a new guess; with no budget left, drop the guess."""
    state = record_contradiction(state, c)
    if not budget_left:
        return state, NO_GUESS
    intuition, g = update_guess(state.intuition, OracleReport(tuple(conclusions), (c,)), o, query,
                                program, templates)
    return replace(state, intuition=intuition), g


# ---------------------------------------------------------------------------
# Solver


class _Stop(Exception):
    def __init__(self, status: Optional[Status]):
        self.status = status


@dataclass
class _Frame:
    state: SymbolicState
    following: bool
    gen: int
    succs: Any = None
    path: Path = ()
    goal: Optional[Term] = None
    answers0: int = 0
    cut0: int = 0


class _Run:
    def __init__(self, program: Program, query: Sequence[Term], oracle: IntuitionOracle, cfg: SearchConfig):
        self.p = program
        self.query = tuple(query)
        self.qterm = query_term(self.query)
        self.o = oracle
        self.cfg = cfg
        self.qvars = tuple(query_variables(self.query))
        self.templates = cfg.templates or PromptTemplates.load()
        self.stats = Stats()
        self.trace: Optional[List[str]] = [] if cfg.trace else None
        self.answers: List[Answer] = []
        self.answer_keys = set()
        self.fresh = fresh_ids()
        self.initial = initial_state(self.query)
        self.gen = 0
        self.refuted_gen = -1
        self.unguided_noted = False
        self.pending: List[Term] = []
        self.cutoffs = 0

    def emit(self, line: str) -> None:
        if self.trace is not None:
            self.trace.append(line)

    # -- oracle interaction -------------------------------------------------

    def start(self) -> None:
        intuition, self.guess = init_intuition(self.p, self.query, self.cfg.context, self.o,
                                               self.templates, self.cfg.intuition_budget)
        self.stats.oracle_calls = 1
        self.emit("GUESS 1")
        self.dual = DualState(self.initial, intuition)

    def refute(self, c: Optional[Contradiction]) -> None:
        if c is None or self.gen == self.refuted_gen:
            return
        if c.key() in self.dual.seen_contradictions:
            return
        self.refuted_gen = self.gen
        self.stats.refutations += 1
        self.emit(f"REFUTE {format_path(c.refuted_node)} {c.reason.value}")
        budget = self.cfg.oracle_call_budget
        left = budget is None or self.stats.oracle_calls < budget
        self.dual, self.guess = on_refutation(self.dual, c, self.o, query=self.query, program=self.p,
                                              budget_left=left, conclusions=self.pending,
                                              templates=self.templates)
        if left:
            self.stats.oracle_calls += 1
            self.pending = []
            self.emit(f"GUESS {self.stats.oracle_calls}")
        elif not self.unguided_noted:
            self.unguided_noted = True
            self.emit("GUESS none")
        self.gen += 1

    # -- guess tracking -----------------------------------------------------

    def follows(self, s: SymbolicState) -> bool:
        """Has every step of ``s`` taken the clause the current guess cites?"""
        d = self.guess.derivation
        if d is None or (d.clause_index == CONJUNCTION) != s.conjunctive:
            return False
        for st in s.history:
            node = d.node_at(st.path)
            if node is None or node.clause_index != st.clause_index:
                return False
        return bool(s.resolvent) and d.node_at(s.paths[0]) is not None

    def child_frame(self, f: _Frame, t: Transition, s: SymbolicState) -> _Frame:
        if f.gen != self.gen:
            return _Frame(s, False, -1)
        ok = False
        if f.following:
            node = self.guess.derivation.node_at(t.path)
            ok = node is not None and node.clause_index == t.clause_index
            if ok and s.resolvent:
                ok = self.guess.derivation.node_at(s.paths[0]) is not None
        return _Frame(s, ok, self.gen)

    # -- bookkeeping ----------------------------------------------------------

    def observe(self, t: Transition, s: SymbolicState) -> None:
        self.stats.transitions_taken += 1
        self.emit(f"STEP {t.clause_index}")
        mode = self.cfg.record
        if mode == "none":
            return
        if mode == "transitions":
            self.dual = replace(self.dual, intuition=combine(self.dual.intuition, transition_intuition(t)))
        concls = self.completed(t, s)
        if not concls:
            return
        before = self.dual.seen_conclusions
        if mode == "conclusions":
            self.dual = record_novel_conclusion(self.dual, *concls)
        else:
            self.dual = replace(self.dual, seen_conclusions=before | {canonical(c) for c in concls})
        seen = set(before)
        for c in concls:
            key = canonical(c)
            if key not in seen:
                seen.add(key)
                self.pending.append(c)
                self.emit(f"CONCLUDE {format_term(c)}")

    def completed(self, t: Transition, s: SymbolicState) -> List[Term]:
        """Goals whose derivation subtree was closed by transition ``t``."""
        if s.history[-1].body_len:
            return []
        nxt = s.paths[0] if s.resolvent else None
        path = t.path
        done = []
        while True:
            done.append(path)
            if not path or (s.conjunctive and len(path) == 1):
                break
            parent = path[:-1]
            if nxt is not None and nxt[: len(parent)] == parent:
                break
            path = parent
        goals = {st.path: st.goal for st in s.history if st.path in done}
        return [apply(s.subst, goals[q]) for q in done]

    def record_answer(self, s: SymbolicState) -> None:
        tree = tree_of(s)
        fault = find_fault(self.p, self.qterm, tree)
        if fault is not None:
            log.error("search produced an invalid derivation, answer dropped: %s", fault)
            return
        key = canonical_tuple(apply(s.subst, v) for v in self.qvars)
        if key in self.answer_keys:
            return
        self.answer_keys.add(key)
        sub = answer(s, self.qvars)
        self.answers.append(Answer(sub, tree))
        self.emit(f"ANSWER {format_answer(sub, self.qvars)}")
        if self.cfg.max_answers is not None and len(self.answers) >= self.cfg.max_answers:
            raise _Stop(Status.SOLVED)

    def expand_goal(self, f: _Frame) -> List[Tuple[Transition, SymbolicState]]:
        s = f.state
        budget = self.cfg.node_budget
        if budget is not None and self.stats.nodes_expanded >= budget:
            raise _Stop(Status.BUDGET_EXCEEDED)
        succs = expand(s, self.p, self.fresh, self.cfg.occurs_check)
        self.stats.nodes_expanded += 1
        path, goal = s.paths[0], s.resolvent[0]
        self.emit(f"EXPAND {s.node_depth(path)} {format_term(goal)} {len(succs)}")
        if f.following:
            self.refute(detect_refutation(self.guess, ExpandEvent(path, goal, tuple(t.clause_index for t, _ in succs))))
        on_guess = f.following and f.gen == self.gen
        return bias_order(succs, self.guess, path if on_guess else None)

    # -- strategies -----------------------------------------------------------

    def dfs(self, bound: int) -> None:
        self.cutoffs = 0
        stack = [_Frame(self.initial, self.follows(self.initial), self.gen)]
        while stack:
            f = stack[-1]
            if f.succs is None:
                s = f.state
                if not s.resolvent:
                    stack.pop()
                    self.record_answer(s)
                    continue
                if f.gen != self.gen:
                    f.following, f.gen = self.follows(s), self.gen
                f.path, f.goal = s.paths[0], s.resolvent[0]
                lookahead = f.following and self.cfg.guided_lookahead
                if s.node_depth(f.path) > bound and not lookahead:
                    self.cutoffs += 1
                    stack.pop()
                    continue
                f.answers0, f.cut0 = len(self.answers), self.cutoffs
                f.succs = iter(self.expand_goal(f))
            nxt = next(f.succs, None)
            if nxt is None:
                stack.pop()
                if (f.following and f.gen == self.gen and len(self.answers) == f.answers0
                        and self.cutoffs > f.cut0):
                    goal = apply(f.state.subst, f.goal)
                    self.refute(detect_refutation(self.guess, ExhaustedEvent(f.path, goal, bound)))
                continue
            t, s2 = nxt
            self.observe(t, s2)
            stack.append(self.child_frame(f, t, s2))

    def iterative_deepening(self) -> Tuple[Status, bool]:
        bound = self.cfg.depth_start
        max_depth = self.cfg.max_depth
        if max_depth is not None:
            bound = min(bound, max_depth)
        while True:
            self.dfs(bound)
            if self.cutoffs == 0:
                return (Status.SOLVED if self.answers else Status.EXHAUSTED), True
            if max_depth is not None and bound >= max_depth:
                return (Status.SOLVED if self.answers else Status.DEPTH_OPEN), False
            bound += self.cfg.depth_step
            if max_depth is not None:
                bound = min(bound, max_depth)

    def breadth_first(self) -> Tuple[Status, bool]:
        queue = deque([_Frame(self.initial, self.follows(self.initial), self.gen)])
        max_depth = self.cfg.max_depth
        cut = False
        while queue:
            f = queue.popleft()
            s = f.state
            if not s.resolvent:
                self.record_answer(s)
                continue
            if f.gen != self.gen:
                f.following, f.gen = self.follows(s), self.gen
            if max_depth is not None and s.node_depth(s.paths[0]) > max_depth:
                cut = True
                continue
            for t, s2 in self.expand_goal(f):
                self.observe(t, s2)
                queue.append(self.child_frame(f, t, s2))
        if cut:
            return (Status.SOLVED if self.answers else Status.DEPTH_OPEN), False
        return (Status.SOLVED if self.answers else Status.EXHAUSTED), True

    def run(self) -> SolveResult:
        t0 = time.perf_counter()
        self.start()
        complete = False
        try:
            if self.cfg.strategy is Strategy.BREADTH_FIRST:
                status, complete = self.breadth_first()
            else:
                status, complete = self.iterative_deepening()
        except _Stop as stop:
            status = stop.status
            if status is Status.BUDGET_EXCEEDED and self.answers:
                status = Status.SOLVED
        self.stats.wall_time = time.perf_counter() - t0
        return SolveResult(self.answers, status, self.stats, self.trace, complete,
                           self.dual.intuition, self.qvars)


def solve(p: Program, q: Sequence[Term], o: IntuitionOracle, cfg: Optional[SearchConfig] = None) -> SolveResult:
    """Search for answers to the query ``q`` (a sequence of goals) over ``p``.

    Every reported answer carries a derivation tree that has passed
    :func:`nsts.derivation.check_derivation`.
    """
    return _Run(p, q, o, cfg or SearchConfig()).run()


def find_derivation(p: Program, q: Sequence[Term], **cfg) -> Optional[DerivationTree]:
    """First derivation found by an unguided search (handy for priming PerfectOracle)."""
    res = solve(p, q, NullOracle(), SearchConfig(**cfg))
    return res.answers[0].derivation if res.answers else None


# ---------------------------------------------------------------------------
# Sequential baseline


def run_sequential_baseline(p: Program, q: Sequence[Term], o: IntuitionOracle, budget: int,
                            context: str = "", templates: Optional[PromptTemplates] = None,
                            trace: bool = False) -> SolveResult:
    """Propose, check, feed back the failure, repeat; no symbolic search at all.

    Stops when a proposed derivation checks, when the oracle offers no
    derivation, or after ``budget`` oracle calls.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    t0 = time.perf_counter()
    query = tuple(q)
    qterm = query_term(query)
    qvars = tuple(query_variables(query))
    templates = templates or PromptTemplates.load()
    stats = Stats()
    events: Optional[List[str]] = [] if trace else None
    intuition, g = init_intuition(p, query, context, o, templates)
    stats.oracle_calls = 1
    dual = DualState(initial_state(query), intuition)
    answers: List[Answer] = []
    status = Status.BUDGET_EXCEEDED
    while True:
        if events is not None:
            events.append(f"GUESS {stats.oracle_calls}")
        if g.derivation is not None:
            fault = find_fault(p, qterm, g.derivation)
            if fault is None:
                u = unify(qterm, g.derivation.goal)
                sub = Substitution({v: apply(u, v) for v in qvars if apply(u, v) != v})
                answers.append(Answer(sub, g.derivation))
                if events is not None:
                    events.append(f"ANSWER {format_answer(sub, qvars)}")
                status = Status.SOLVED
                break
            reason = fault.reason if fault.reason in (Reason.NO_APPLICABLE_CLAUSE,) else Reason.CLAUSE_HEAD_MISMATCH
            c = Contradiction(fault.path, fault.goal, reason, fault.clause_index)
        elif g.empty:
            break
        else:
            c = Contradiction((), qterm, Reason.NO_APPLICABLE_CLAUSE, None)
        stats.refutations += 1
        if events is not None:
            events.append(f"REFUTE {format_path(c.refuted_node)} {c.reason.value}")
        if stats.oracle_calls >= budget:
            break
        dual = record_contradiction(dual, c)
        intuition, g = update_guess(dual.intuition, OracleReport((), (c,)), o, query, p, templates)
        dual = replace(dual, intuition=intuition)
        stats.oracle_calls += 1
    stats.wall_time = time.perf_counter() - t0
    return SolveResult(answers, status, stats, events, False, dual.intuition, qvars)
