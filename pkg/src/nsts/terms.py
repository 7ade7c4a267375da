"""First-order terms, clauses, programs, substitutions and unification.

Terms are immutable.  Substitutions are kept idempotent: every binding is
applied eagerly to the existing range, so a single lookup resolves a
variable fully.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

_ids = itertools.count(1)


def fresh_ids() -> Iterator[int]:
    """Process-wide id source; every Var id handed out is unique."""
    return _ids


@dataclass(frozen=True)
class Var:
    name: str
    id: int

    def __repr__(self) -> str:
        return f"Var({self.name}#{self.id})"


@dataclass(frozen=True)
class Const:
    value: Union[str, int]

    def __repr__(self) -> str:
        return f"Const({self.value!r})"


@dataclass(frozen=True)
class Compound:
    functor: str
    args: Tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError(f"compound {self.functor!r} needs at least one argument; use Const")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __repr__(self) -> str:
        return f"Compound({self.functor!r}, {list(self.args)!r})"


Term = Union[Var, Const, Compound]


def atom(name: str) -> Const:
    return Const(name)


def compound(functor: str, *args: Term) -> Compound:
    return Compound(functor, tuple(args))


def is_atom(t: Term) -> bool:
    return isinstance(t, Const) and isinstance(t.value, str)


def key_of(t: Term) -> Optional[Tuple[str, int]]:
    """(functor, arity) of a callable term; None for variables and integers."""
    if isinstance(t, Compound):
        return (t.functor, len(t.args))
    if is_atom(t):
        return (t.value, 0)
    return None


def variables(t: Term) -> Iterator[Var]:
    """Variables of ``t`` in left-to-right order of first occurrence."""
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            if u not in seen:
                seen.add(u)
                yield u
        elif isinstance(u, Compound):
            stack.extend(reversed(u.args))


def occurs(v: Var, t: Term) -> bool:
    if isinstance(t, Var):
        return t == v
    if isinstance(t, Compound):
        return any(occurs(v, a) for a in t.args)
    return False


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Compound):
        return all(is_ground(a) for a in t.args)
    return True


# ---------------------------------------------------------------------------
# Substitutions


class Substitution(Mapping[Var, Term]):
    """An idempotent mapping from variables to terms.

    Treated as immutable: ``bind`` and ``unify`` return new instances.
    """

    __slots__ = ("_b",)

    def __init__(self, bindings: Optional[Mapping[Var, Term]] = None):
        self._b: Dict[Var, Term] = dict(bindings) if bindings else {}

    def __getitem__(self, v: Var) -> Term:
        return self._b[v]

    def __iter__(self):
        return iter(self._b)

    def __len__(self) -> int:
        return len(self._b)

    def __repr__(self) -> str:
        inner = ", ".join(f"{format_term(k)}#{k.id} -> {format_term(v)}" for k, v in self._b.items())
        return "{" + inner + "}"

    def __eq__(self, other) -> bool:
        if isinstance(other, Substitution):
            return self._b == other._b
        if isinstance(other, Mapping):
            return self._b == dict(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._b.items()))

    def bind(self, v: Var, t: Term) -> Optional["Substitution"]:
        """Extend with ``v -> t``; None if the occurs check fails."""
        t = apply(self, t)
        if t == v:
            return self
        if occurs(v, t):
            return None
        single = {v: t}
        out = {k: _apply_dict(single, u) for k, u in self._b.items()}
        out[v] = t
        s = Substitution.__new__(Substitution)
        s._b = out
        return s

    def restrict(self, vs: Iterable[Var]) -> "Substitution":
        return Substitution({v: self._b[v] for v in vs if v in self._b})


EMPTY = Substitution()


def _apply_dict(b: Mapping[Var, Term], t: Term) -> Term:
    if isinstance(t, Var):
        return b.get(t, t)
    if isinstance(t, Compound):
        args = tuple(_apply_dict(b, a) for a in t.args)
        if all(x is y for x, y in zip(args, t.args)):
            return t
        return Compound(t.functor, args)
    return t


def apply(s: Mapping[Var, Term], t: Term) -> Term:
    """Replace every bound variable of ``t``; one pass suffices for idempotent ``s``."""
    if not s:
        return t
    b = s._b if isinstance(s, Substitution) else s
    return _apply_dict(b, t)


def unify(t1: Term, t2: Term, s: Substitution = EMPTY, occurs_check: bool = True) -> Optional[Substitution]:
    """Most general unifier of ``t1`` and ``t2`` extending ``s``, or None."""
    b = dict(s._b)
    stack = [(t1, t2)]
    while stack:
        a, c = stack.pop()
        a = _apply_dict(b, a)
        c = _apply_dict(b, c)
        if a == c:
            continue
        if isinstance(c, Var) and not isinstance(a, Var):
            a, c = c, a
        if isinstance(a, Var):
            if occurs_check and occurs(a, c):
                return None
            single = {a: c}
            for k in b:
                b[k] = _apply_dict(single, b[k])
            b[a] = c
            continue
        if isinstance(a, Compound) and isinstance(c, Compound):
            if a.functor != c.functor or len(a.args) != len(c.args):
                return None
            stack.extend(zip(reversed(a.args), reversed(c.args)))
            continue
        return None
    out = Substitution.__new__(Substitution)
    out._b = b
    return out


# ---------------------------------------------------------------------------
# Clauses and programs

External = Callable[[Term], bool]

BUILTIN = -1  # clause index recorded for goals solved by an external predicate
CONJUNCTION = -2  # clause index of the synthetic root of a multi-goal query
QUERY_FUNCTOR = "$query"


@dataclass(frozen=True)
class Clause:
    head: Term
    body: Tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if key_of(self.head) is None:
            raise ValueError(f"clause head must be an atom or compound, got {format_term(self.head)}")
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))

    @property
    def is_fact(self) -> bool:
        return not self.body

    def variables(self) -> Iterator[Var]:
        seen = set()
        for t in (self.head, *self.body):
            for v in variables(t):
                if v not in seen:
                    seen.add(v)
                    yield v

    def __str__(self) -> str:
        return format_clause(self)


@dataclass(frozen=True)
class Program:
    clauses: Tuple[Clause, ...]
    externals: Mapping[Tuple[str, int], External] = field(default_factory=dict)
    index: Mapping[Tuple[str, int], Tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.clauses, tuple):
            object.__setattr__(self, "clauses", tuple(self.clauses))
        idx: Dict[Tuple[str, int], list] = {}
        for i, c in enumerate(self.clauses):
            idx.setdefault(key_of(c.head), []).append(i)
        clash = set(idx) & set(self.externals)
        if clash:
            raise ValueError(f"predicates defined both by clauses and externally: {sorted(clash)}")
        object.__setattr__(self, "index", {k: tuple(v) for k, v in idx.items()})
        object.__setattr__(self, "externals", dict(self.externals))

    def __len__(self) -> int:
        return len(self.clauses)

    def candidates(self, goal: Term) -> Tuple[int, ...]:
        return self.index.get(key_of(goal), ())

    def external_for(self, goal: Term) -> Optional[External]:
        k = key_of(goal)
        return self.externals.get(k) if k is not None else None

    def with_externals(self, **named: External) -> "Program":
        """Register externals given as ``name_arity=fn`` (e.g. ``check_3=fn``)."""
        ext = dict(self.externals)
        for key, fn in named.items():
            name, _, arity = key.rpartition("_")
            ext[(name, int(arity))] = fn
        return Program(self.clauses, ext)

    def __str__(self) -> str:
        return format_program(self)


def rename_apart(c: Clause, fresh: Optional[Iterator[int]] = None) -> Clause:
    """Copy of ``c`` with every variable replaced by a fresh one (names kept)."""
    fresh = fresh if fresh is not None else _ids
    mapping = {v: Var(v.name, next(fresh)) for v in c.variables()}
    if not mapping:
        return c
    return Clause(_apply_dict(mapping, c.head), tuple(_apply_dict(mapping, t) for t in c.body))


# ---------------------------------------------------------------------------
# Printing


def format_term(t: Term, names: Optional[Callable[[Var], str]] = None) -> str:
    if isinstance(t, Var):
        return names(t) if names else t.name
    if isinstance(t, Const):
        return str(t.value)
    return t.functor + "(" + ", ".join(format_term(a, names) for a in t.args) + ")"


def format_clause(c: Clause, names: Optional[Callable[[Var], str]] = None) -> str:
    head = format_term(c.head, names)
    if not c.body:
        return head + "."
    return head + " :- " + ", ".join(format_term(b, names) for b in c.body) + "."


def format_program(p: Program) -> str:
    return "\n".join(format_clause(c) for c in p.clauses) + ("\n" if p.clauses else "")


class VarNamer:
    """Names variables ``_G0, _G1, ...`` in order of first request, keeping ``keep`` names.

    With ``prefer_names`` a variable keeps its source name unless another
    variable already claimed it.
    """

    def __init__(self, keep: Iterable[Var] = (), prefix: str = "_G", prefer_names: bool = False):
        self.prefix = prefix
        self.prefer_names = prefer_names
        self._names: Dict[Var, str] = {}
        taken = set()
        for v in keep:
            self._names[v] = v.name
            taken.add(v.name)
        self._taken = taken
        self._n = 0

    def __call__(self, v: Var) -> str:
        name = self._names.get(v)
        if name is None and self.prefer_names and v.name != "_" and v.name not in self._taken:
            name = self._names[v] = v.name
            self._taken.add(name)
        if name is None:
            while True:
                name = f"{self.prefix}{self._n}"
                self._n += 1
                if name not in self._taken:
                    break
            self._names[v] = name
        return name


def canonical(t: Term) -> str:
    """Text of ``t`` with variables numbered by first occurrence; equal iff variants."""
    return format_term(t, VarNamer(prefix="_V"))


def canonical_tuple(ts: Iterable[Term]) -> str:
    namer = VarNamer(prefix="_V")
    return "|".join(format_term(t, namer) for t in ts)

