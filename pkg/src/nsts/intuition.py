"""Intuition as tagged text, and the dual (symbolic, intuition) state.

The rendering produced by :meth:`Intuition.render` is what oracles receive;
keep it stable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import FrozenSet, Optional, Sequence, Tuple

from .derivation import SymbolicState, Transition, replay
from .guess import Contradiction, Guess, no_guess, parse_guess
from .terms import Program, Term, Var, canonical, format_term

DEFAULT_BUDGET = 32 * 1024


class Tag(str, enum.Enum):
    INIT = "INIT"
    CONCLUSION = "CONCLUSION"
    CONTRADICTION = "CONTRADICTION"
    GUESS = "GUESS"


@dataclass(frozen=True)
class Segment:
    tag: Tag
    text: str

    def render(self) -> str:
        return f"[{self.tag.value}]\n{self.text}"

    @property
    def size(self) -> int:
        # +1 for the separating newline
        return len(self.render().encode("utf-8")) + 1


@dataclass(frozen=True)
class Intuition:
    segments: Tuple[Segment, ...] = ()
    byte_budget: Optional[int] = DEFAULT_BUDGET

    @property
    def size(self) -> int:
        return sum(s.size for s in self.segments)

    def add(self, tag: Tag, text: str) -> "Intuition":
        return combine(self, Intuition((Segment(tag, text),), self.byte_budget))

    def count(self, tag: Tag) -> int:
        return sum(1 for s in self.segments if s.tag is tag)

    def render(self) -> str:
        return "\n".join(s.render() for s in self.segments)

    def __len__(self) -> int:
        return len(self.segments)


def _evict(segs, budget):
    if budget is None:
        return tuple(segs)
    segs = list(segs)
    total = sum(s.size for s in segs)
    for wanted in (Tag.CONCLUSION, None):
        i = 0
        while total > budget and i < len(segs):
            s = segs[i]
            if s.tag is not Tag.INIT and (wanted is None or s.tag is wanted):
                total -= s.size
                del segs[i]
            else:
                i += 1
    return tuple(segs)


def combine(i1: Intuition, i2: Intuition) -> Intuition:
    """Concatenate, then evict down to ``i1``'s budget.

    Oldest CONCLUSION segments go first, then the oldest of the rest; INIT
    segments are never evicted.
    """
    if not i2.segments:
        return i1
    if not i1.segments:
        return Intuition(_evict(i2.segments, i1.byte_budget), i1.byte_budget)
    return Intuition(_evict(i1.segments + i2.segments, i1.byte_budget), i1.byte_budget)


def summarize(i: Intuition) -> str:
    return "\n".join(s.text for s in i.segments)


def transition_intuition(t: Transition) -> Intuition:
    return Intuition((Segment(Tag.CONCLUSION, t.label),), None)


@dataclass(frozen=True)
class DualState:
    symbolic: SymbolicState
    intuition: Intuition = field(default_factory=Intuition)
    seen_conclusions: FrozenSet[str] = frozenset()
    seen_contradictions: FrozenSet[tuple] = frozenset()


def step(d: DualState, t: Transition, succ: SymbolicState, program: Program) -> DualState:
    """Advance symbols and intuition together along one expand result."""
    if replay(d.symbolic, t, program) != succ:
        raise ValueError("transition does not lead from the current state to the given successor")
    return replace(d, symbolic=succ, intuition=combine(d.intuition, transition_intuition(t)))


def record_novel_conclusion(d: DualState, *conclusions: Term) -> DualState:
    """Record proven goals not seen before (up to variable renaming) as one segment."""
    seen = set(d.seen_conclusions)
    fresh = []
    for c in conclusions:
        key = canonical(c)
        if key not in seen:
            seen.add(key)
            fresh.append(c)
    if not fresh:
        return d
    text = "proved " + "; ".join(format_term(c) for c in fresh)
    return replace(d, intuition=d.intuition.add(Tag.CONCLUSION, text), seen_conclusions=frozenset(seen))


def record_contradiction(d: DualState, c: Contradiction) -> DualState:
    key = c.key()
    if key in d.seen_contradictions:
        return d
    return replace(d, intuition=d.intuition.add(Tag.CONTRADICTION, c.describe()),
                   seen_contradictions=d.seen_contradictions | {key})


def record_guess(i: Intuition, g: Guess, query_vars: Sequence[Var] = ()) -> Intuition:
    if g.empty:
        return i.add(Tag.GUESS, g.describe())
    return i.add(Tag.GUESS, g.to_json(query_vars))


def infer(i: Intuition, oracle, query_vars: Sequence[Var], report: str = "",
          program: Optional[Program] = None) -> Tuple[Intuition, Guess]:
    """Ask ``oracle`` for a guess given the running intuition.

    Any oracle failure degrades to an empty guess; the GUESS segment notes why.
    """
    if not any(s.tag is Tag.INIT for s in i.segments):
        raise ValueError("intuition has no INIT segment")
    try:
        reply = oracle.update(i.render(), report)
    except Exception as e:  # transport or oracle bug: never abort the solve
        g = no_guess("", f"oracle failure: {type(e).__name__}: {e}")
    else:
        g = parse_guess(reply, query_vars, program)
    return record_guess(i, g, query_vars), g
