"""SLD resolution as a transition system, plus first-class derivation trees.

A state is a resolvent (pending goals, already instantiated) with the answer
substitution built so far.  Each goal carries its *path*: the position of the
derivation-tree node it will become, as a tuple of child indices from the
root.  For a single-goal query the root is that goal and has path ``()``;
for a multi-goal query the root is a synthetic conjunction node and goal
``i`` has path ``(i,)``.

``check_derivation`` validates a tree by plain recursion over the clauses and
never touches the expansion machinery, so it can audit both the search and
oracle guesses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .parser import parse_term
from .terms import (
    BUILTIN,
    CONJUNCTION,
    EMPTY,
    QUERY_FUNCTOR,
    Clause,
    Compound,
    Program,
    Substitution,
    Term,
    Var,
    VarNamer,
    apply,
    format_clause,
    format_term,
    is_ground,
    rename_apart,
    unify,
)

Path = Tuple[int, ...]


def format_path(path: Path) -> str:
    return "[" + ",".join(str(i) for i in path) + "]"


class Reason(str, enum.Enum):
    NO_APPLICABLE_CLAUSE = "NoApplicableClause"
    EXHAUSTED_UNDER_BOUND = "ExhaustedUnderBound"
    CLAUSE_HEAD_MISMATCH = "ClauseHeadMismatch"
    # only produced when auditing a whole tree
    GOAL_MISMATCH = "GoalMismatch"
    MALFORMED = "Malformed"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Step:
    """One resolution recorded in a state's history."""

    path: Path
    clause_index: int
    goal: Term
    body_len: int


@dataclass(frozen=True)
class SymbolicState:
    resolvent: Tuple[Term, ...]
    subst: Substitution
    depth: int
    paths: Tuple[Path, ...]
    query: Tuple[Term, ...]
    history: Tuple[Step, ...] = ()

    @property
    def conjunctive(self) -> bool:
        return len(self.query) > 1

    def node_depth(self, path: Path) -> int:
        """Depth of the tree node at ``path`` (a single-goal root has depth 1)."""
        return len(path) if self.conjunctive else len(path) + 1


@dataclass(frozen=True)
class Transition:
    clause_index: int
    goal: Term
    mgu: Substitution
    path: Path
    clause: Optional[Clause] = None
    instance: Optional[Clause] = None

    @property
    def label(self) -> str:
        text = format_clause(self.clause) if self.clause is not None else "external predicate"
        return f"derived {format_term(self.goal)} via clause {self.clause_index}: {text}"


def initial_state(query: Sequence[Term]) -> SymbolicState:
    query = tuple(query)
    if not query:
        raise ValueError("empty query")
    paths = ((),) if len(query) == 1 else tuple((i,) for i in range(len(query)))
    return SymbolicState(query, EMPTY, 0, paths, query)


def is_final(s: SymbolicState) -> bool:
    return not s.resolvent


def _successor(s: SymbolicState, u: Substitution, body: Tuple[Term, ...], k: int, goal: Term) -> SymbolicState:
    path = s.paths[0]
    resolvent = tuple(apply(u, b) for b in body) + tuple(apply(u, g) for g in s.resolvent[1:])
    paths = tuple(path + (j,) for j in range(len(body))) + s.paths[1:]
    step = Step(path, k, goal, len(body))
    return SymbolicState(resolvent, u, s.depth + 1, paths, s.query, s.history + (step,))


def _delta(old: Substitution, new: Substitution) -> Substitution:
    return Substitution({v: t for v, t in new.items() if v not in old})


def expand(s: SymbolicState, p: Program, fresh: Optional[Iterator[int]] = None,
           occurs_check: bool = True) -> List[Tuple[Transition, SymbolicState]]:
    """All successors of ``s`` from resolving its leftmost goal, in program order.

    An empty list means this branch fails finitely.
    """
    if not s.resolvent:
        raise ValueError("cannot expand a final state")
    goal, path = s.resolvent[0], s.paths[0]
    ext = p.external_for(goal)
    if ext is not None:
        if is_ground(goal) and ext(goal):
            t = Transition(BUILTIN, goal, EMPTY, path)
            return [(t, _successor(s, s.subst, (), BUILTIN, goal))]
        return []
    out = []
    for k in p.candidates(goal):
        clause = p.clauses[k]
        inst = rename_apart(clause, fresh)
        u = unify(goal, inst.head, s.subst, occurs_check)
        if u is None:
            continue
        t = Transition(k, apply(u, goal), _delta(s.subst, u), path, clause, inst)
        out.append((t, _successor(s, u, inst.body, k, goal)))
    return out


def replay(s: SymbolicState, t: Transition, p: Program) -> Optional[SymbolicState]:
    """Re-apply a recorded transition to ``s``; None if it does not apply."""
    if not s.resolvent or s.paths[0] != t.path:
        return None
    goal = s.resolvent[0]
    if t.clause_index == BUILTIN:
        ext = p.external_for(goal)
        if ext is None or not is_ground(goal) or not ext(goal):
            return None
        return _successor(s, s.subst, (), BUILTIN, goal)
    if not 0 <= t.clause_index < len(p) or t.instance is None:
        return None
    u = unify(goal, t.instance.head, s.subst)
    if u is None or _delta(s.subst, u) != t.mgu:
        return None
    return _successor(s, u, t.instance.body, t.clause_index, goal)


def answer(s: SymbolicState, query_vars: Sequence[Var]) -> Substitution:
    if not is_final(s):
        raise ValueError("answer requested from a non-final state")
    return Substitution({v: apply(s.subst, v) for v in query_vars if apply(s.subst, v) != v})


# ---------------------------------------------------------------------------
# Derivation trees


@dataclass(frozen=True)
class DerivationTree:
    goal: Term
    clause_index: int
    children: Tuple["DerivationTree", ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def depth(self) -> int:
        """Longest root-to-leaf node count; a synthetic conjunction root is not counted."""
        d = 1 + max((c.depth() for c in self.children), default=0)
        return d - 1 if self.clause_index == CONJUNCTION else d

    def node_at(self, path: Path) -> Optional["DerivationTree"]:
        node = self
        for i in path:
            if not 0 <= i < len(node.children):
                return None
            node = node.children[i]
        return node

    def walk(self, path: Path = ()) -> Iterator[Tuple[Path, "DerivationTree"]]:
        yield path, self
        for j, c in enumerate(self.children):
            yield from c.walk(path + (j,))

    def to_dict(self, names=None) -> Dict[str, Any]:
        names = names if names is not None else VarNamer(prefer_names=True)
        return {
            "goal": format_term(self.goal, names),
            "clause": self.clause_index,
            "children": [c.to_dict(names) for c in self.children],
        }

    @classmethod
    def from_dict(cls, data: Any, scope: Optional[Dict[str, Var]] = None) -> "DerivationTree":
        """Inverse of ``to_dict``; variable names are shared across the whole tree.

        Raises ValueError (including ParseError) on anything malformed.
        """
        scope = {} if scope is None else scope
        if not isinstance(data, dict):
            raise ValueError("derivation node must be an object")
        goal, clause, children = data.get("goal"), data.get("clause"), data.get("children", [])
        if not isinstance(goal, str):
            raise ValueError("derivation node needs a 'goal' string")
        if not isinstance(clause, int) or isinstance(clause, bool):
            raise ValueError("derivation node needs an integer 'clause'")
        if not isinstance(children, list):
            raise ValueError("'children' must be a list")
        return cls(parse_term(goal, scope), clause, tuple(cls.from_dict(c, scope) for c in children))

    def __str__(self) -> str:
        lines: List[str] = []

        def show(node, indent):
            lines.append(f"{'  ' * indent}{format_term(node.goal)}  [clause {node.clause_index}]")
            for c in node.children:
                show(c, indent + 1)

        show(self, 0)
        return "\n".join(lines)


def well_formed(d: DerivationTree, p: Optional[Program] = None) -> Optional[str]:
    """Structural problems with ``d`` (None when fine).

    With a program, every in-range clause reference must have exactly one
    child per body goal and external goals must be leaves.
    """
    for path, node in d.walk():
        if node.clause_index == CONJUNCTION:
            if path != ():
                return f"conjunction node below the root at {format_path(path)}"
            continue
        if p is None:
            continue
        if node.clause_index == BUILTIN:
            if node.children:
                return f"external goal with children at {format_path(path)}"
        elif 0 <= node.clause_index < len(p):
            want = len(p.clauses[node.clause_index].body)
            if len(node.children) != want:
                return (f"node {format_path(path)} cites clause {node.clause_index} "
                        f"with {want} body goals but has {len(node.children)} children")
    return None


@dataclass(frozen=True)
class Fault:
    """First problem found while checking a derivation tree."""

    path: Path
    goal: Term
    clause_index: int
    reason: Reason
    message: str

    def __str__(self) -> str:
        return f"{format_path(self.path)} {format_term(self.goal)}: {self.message}"


class _Reject(Exception):
    def __init__(self, fault: Fault):
        self.fault = fault


def find_fault(p: Program, q: Term, d: DerivationTree) -> Optional[Fault]:
    """Check ``d`` as a derivation of an instance of ``q``; return the first fault."""
    if not isinstance(d, DerivationTree):
        return Fault((), q, 0, Reason.MALFORMED, "not a derivation tree")
    try:
        _check(p, d, q, EMPTY, (), root=True)
    except _Reject as r:
        return r.fault
    return None


def check_derivation(p: Program, q: Term, d: DerivationTree) -> bool:
    return find_fault(p, q, d) is None


def _check(p: Program, node: DerivationTree, expected: Term, s: Substitution, path: Path, root: bool = False) -> Substitution:
    def reject(reason, msg, goal=None):
        raise _Reject(Fault(path, goal if goal is not None else node.goal, node.clause_index, reason, msg))

    s = unify(node.goal, expected, s)
    if s is None:
        reject(Reason.GOAL_MISMATCH, f"goal does not match the expected {format_term(expected)}")
    k = node.clause_index
    goal = apply(s, node.goal)
    if k == CONJUNCTION:
        if not root or not isinstance(goal, Compound) or goal.functor != QUERY_FUNCTOR:
            reject(Reason.MALFORMED, "conjunction node is only valid as the root of a multi-goal query")
        if len(node.children) != len(goal.args):
            reject(Reason.MALFORMED, f"conjunction of {len(goal.args)} goals has {len(node.children)} children")
        for j, (child, g) in enumerate(zip(node.children, goal.args)):
            s = _check(p, child, g, s, path + (j,))
        return s
    if k == BUILTIN:
        ext = p.external_for(goal)
        if ext is None:
            reject(Reason.CLAUSE_HEAD_MISMATCH, "goal is not an external predicate")
        if node.children:
            reject(Reason.MALFORMED, "external goal cannot have children")
        if not is_ground(goal) or not ext(goal):
            reject(Reason.NO_APPLICABLE_CLAUSE, "external predicate rejects the goal", goal)
        return s
    if not 0 <= k < len(p):
        reject(Reason.MALFORMED, f"clause index {k} out of range (program has {len(p)} clauses)")
    inst = rename_apart(p.clauses[k])
    s2 = unify(inst.head, goal, s)
    if s2 is None:
        reject(Reason.CLAUSE_HEAD_MISMATCH, f"head of clause {k} ({format_term(p.clauses[k].head)}) does not unify", goal)
    if len(node.children) != len(inst.body):
        reject(Reason.MALFORMED, f"clause {k} has {len(inst.body)} body goals but node has {len(node.children)} children")
    for j, (child, b) in enumerate(zip(node.children, inst.body)):
        s2 = _check(p, child, b, s2, path + (j,))
    return s2


def query_term(query: Sequence[Term]) -> Term:
    """Single term standing for a query: the goal itself, or a conjunction root."""
    query = tuple(query)
    return query[0] if len(query) == 1 else Compound(QUERY_FUNCTOR, query)


def tree_of(s: SymbolicState) -> DerivationTree:
    """Derivation tree recorded by a final state's history."""
    if not is_final(s):
        raise ValueError("derivation requested from a non-final state")
    steps = {st.path: st for st in s.history}

    def build(path):
        st = steps[path]
        kids = tuple(build(path + (j,)) for j in range(st.body_len))
        return DerivationTree(apply(s.subst, st.goal), st.clause_index, kids)

    if s.conjunctive:
        goal = apply(s.subst, query_term(s.query))
        return DerivationTree(goal, CONJUNCTION, tuple(build((i,)) for i in range(len(s.query))))
    return build(())
