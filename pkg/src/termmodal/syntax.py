"""Sorted terms and formulas of two-sorted term-modal logic.

The primitive grammar is::

    term    ::= Var | Con | App(f, term, ...)
    formula ::= t1 = t2 | R(t, ...) | ~phi | phi -> psi | forall x. phi | K[t] phi

Everything else (``&``, ``|``, ``<->``, ``exists``, ``P[t]``, ``!=``) is sugar
that expands into the primitives at construction time, so the evaluator and
the proof kernel only ever see the six formula constructors above.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Iterator, Mapping, Union


class Sort(enum.Enum):
    AGENT = "agent"
    OBJECT = "object"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Sort":
        aliases = {"agent": cls.AGENT, "agt": cls.AGENT, "object": cls.OBJECT, "obj": cls.OBJECT}
        try:
            return aliases[text]
        except KeyError:
            raise ValueError(f"unknown sort {text!r}") from None


class SyntaxError_(Exception):
    """Base class for errors about ill-formed syntax objects."""


class SortError(SyntaxError_):
    pass


class SignatureError(SyntaxError_):
    pass


# --------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Con:
    name: str
    sort: Sort

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple
    sort: Sort

    def __str__(self) -> str:
        return f"{self.fn}({', '.join(map(str, self.args))})"


Term = Union[Var, Con, App]


# --------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple = ()


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Implies:
    ante: "Formula"
    cons: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class K:
    index: Term
    body: "Formula"


Formula = Union[Eq, Atom, Not, Implies, Forall, K]

ATOMIC = (Eq, Atom)


def And(a: Formula, b: Formula) -> Formula:
    return Not(Implies(a, Not(b)))


def Or(a: Formula, b: Formula) -> Formula:
    return Implies(Not(a), b)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def Exists(x: Var, body: Formula) -> Formula:
    return Not(Forall(x, Not(body)))


def Poss(index: Term, body: Formula) -> Formula:
    """The dual modality: P[t] phi is ~K[t]~phi."""
    return Not(K(index, Not(body)))


def Neq(a: Term, b: Term) -> Formula:
    return Not(Eq(a, b))


def conjunction(parts: Iterable[Formula]) -> Formula:
    """Left-associated conjunction of a non-empty sequence."""
    return reduce(And, parts)


def disjunction(parts: Iterable[Formula]) -> Formula:
    """Left-associated disjunction of a non-empty sequence."""
    return reduce(Or, parts)


def split_and(phi: Formula):
    """Return ``(a, b)`` if ``phi`` is the expansion of ``a & b``, else None."""
    if isinstance(phi, Not) and isinstance(phi.body, Implies) and isinstance(phi.body.cons, Not):
        return phi.body.ante, phi.body.cons.body
    return None


# --------------------------------------------------------------------------
# Signature

@dataclass(frozen=True)
class Signature:
    """Finite symbol inventory that terms and formulas are checked against.

    ``functions`` maps a name to its arity vector whose last entry is the
    result sort; ``relations`` maps a name to its (possibly empty) argument
    sorts. Nullary relations play the role of propositional letters.
    """

    agent_count: int
    variables: Mapping[str, Sort] = field(default_factory=dict)
    constants: Mapping[str, Sort] = field(default_factory=dict)
    functions: Mapping[str, tuple] = field(default_factory=dict)
    relations: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.agent_count, int) or self.agent_count < 1:
            raise SignatureError(f"agent count must be a positive integer, got {self.agent_count!r}")
        for attr in ("variables", "constants", "functions", "relations"):
            object.__setattr__(self, attr, dict(getattr(self, attr)))
        object.__setattr__(self, "functions", {k: tuple(v) for k, v in self.functions.items()})
        object.__setattr__(self, "relations", {k: tuple(v) for k, v in self.relations.items()})
        seen: dict[str, str] = {}
        for kind in ("variables", "constants", "functions", "relations"):
            for name in getattr(self, kind):
                if not _IDENT.fullmatch(name):
                    raise SignatureError(f"invalid identifier {name!r}")
                if name in _RESERVED:
                    raise SignatureError(f"{name!r} is a reserved word")
                if name in seen:
                    raise SignatureError(f"symbol {name!r} declared as both {seen[name]} and {kind}")
                seen[name] = kind
        for name, arity in self.functions.items():
            if len(arity) < 1:
                raise SignatureError(f"function {name!r} needs at least a result sort")
            if not all(isinstance(s, Sort) for s in arity):
                raise SignatureError(f"function {name!r} has a non-sort in its arity")
        for name, arity in self.relations.items():
            if not all(isinstance(s, Sort) for s in arity):
                raise SignatureError(f"relation {name!r} has a non-sort in its arity")

    def __hash__(self):
        return hash((self.agent_count, tuple(sorted(self.variables.items(), key=lambda kv: kv[0])),
                     tuple(sorted(self.constants)), tuple(sorted(self.functions)),
                     tuple(sorted(self.relations))))

    def var(self, name: str) -> Var:
        return Var(name, self.variables[name])

    def con(self, name: str) -> Con:
        return Con(name, self.constants[name])

    def app(self, fn: str, *args: Term) -> App:
        return App(fn, tuple(args), self.functions[fn][-1])

    def atom(self, rel: str, *args: Term) -> Atom:
        if rel not in self.relations:
            raise SignatureError(f"undeclared relation {rel!r}")
        return Atom(rel, tuple(args))

    def kind(self, name: str):
        for kind in ("variables", "constants", "functions", "relations"):
            if name in getattr(self, kind):
                return kind
        return None

    def with_agents(self, n: int) -> "Signature":
        return Signature(n, self.variables, self.constants, self.functions, self.relations)

    def restricted_to(self, constants=(), functions=(), relations=()) -> "Signature":
        return Signature(
            self.agent_count,
            self.variables,
            {k: v for k, v in self.constants.items() if k in constants},
            {k: v for k, v in self.functions.items() if k in functions},
            {k: v for k, v in self.relations.items() if k in relations},
        )


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_RESERVED = frozenset({"forall", "exists", "true", "false"})


# --------------------------------------------------------------------------
# Traversal helpers

def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t,))
    if isinstance(t, Con):
        return frozenset()
    return frozenset().union(*(term_vars(a) for a in t.args))


def free_vars(phi) -> frozenset:
    """Free variables, with the index of ``K[t]`` contributing its variables."""
    if isinstance(phi, (Var, Con, App)):
        return term_vars(phi)
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Atom):
        return frozenset().union(*(term_vars(a) for a in phi.args))
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, Implies):
        return free_vars(phi.ante) | free_vars(phi.cons)
    if isinstance(phi, Forall):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, K):
        return term_vars(phi.index) | free_vars(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi) -> frozenset:
    """Every variable occurring in ``phi``, free or bound (binders included)."""
    if isinstance(phi, (Var, Con, App)):
        return term_vars(phi)
    if isinstance(phi, (Eq, Atom)):
        return free_vars(phi)
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if isinstance(phi, Implies):
        return all_vars(phi.ante) | all_vars(phi.cons)
    if isinstance(phi, Forall):
        return all_vars(phi.body) | {phi.var}
    if isinstance(phi, K):
        return term_vars(phi.index) | all_vars(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def terms_of(phi: Formula) -> Iterator[Term]:
    """All top-level term occurrences (atom arguments and modal indices)."""
    if isinstance(phi, Eq):
        yield phi.left
        yield phi.right
    elif isinstance(phi, Atom):
        yield from phi.args
    elif isinstance(phi, Not):
        yield from terms_of(phi.body)
    elif isinstance(phi, Implies):
        yield from terms_of(phi.ante)
        yield from terms_of(phi.cons)
    elif isinstance(phi, Forall):
        yield from terms_of(phi.body)
    elif isinstance(phi, K):
        yield phi.index
        yield from terms_of(phi.body)


def symbols(phi: Formula) -> dict:
    """Non-logical symbols occurring in ``phi``, keyed by kind."""
    out = {"constants": set(), "functions": set(), "relations": set()}

    def visit_term(t):
        for s in subterms(t):
            if isinstance(s, Con):
                out["constants"].add(s.name)
            elif isinstance(s, App):
                out["functions"].add(s.fn)

    for t in terms_of(phi):
        visit_term(t)
    for sub in subformulas(phi):
        if isinstance(sub, Atom):
            out["relations"].add(sub.rel)
    return out


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, (Not, Forall, K)):
        yield from subformulas(phi.body)
    elif isinstance(phi, Implies):
        yield from subformulas(phi.ante)
        yield from subformulas(phi.cons)


def complexity(phi: Formula) -> int:
    if isinstance(phi, ATOMIC):
        return 0
    if isinstance(phi, Implies):
        return max(complexity(phi.ante), complexity(phi.cons)) + 1
    if isinstance(phi, (Not, Forall, K)):
        return complexity(phi.body) + 1
    raise TypeError(f"not a formula: {phi!r}")


# --------------------------------------------------------------------------
# Substitution

_SUFFIX = re.compile(r"_\d+$")


def fresh_var(base: Var, avoid: Iterable) -> Var:
    """Lowest-indexed ``<stem>_<k>`` of the same sort whose name is not in ``avoid``.

    ``avoid`` may hold variables or plain names.
    """
    taken = {v.name if isinstance(v, Var) else v for v in avoid}
    stem = _SUFFIX.sub("", base.name)
    k = 1
    while f"{stem}_{k}" in taken:
        k += 1
    return Var(f"{stem}_{k}", base.sort)


def substitute_term(t: Term, replacement: Term, x: Var) -> Term:
    if isinstance(t, Var):
        return replacement if t == x else t
    if isinstance(t, Con):
        return t
    return App(t.fn, tuple(substitute_term(a, replacement, x) for a in t.args), t.sort)


def substitute(phi: Formula, t: Term, x: Var) -> Formula:
    """Replace every free occurrence of ``x`` in ``phi`` by ``t``.

    A binder that would capture a variable of ``t`` is first renamed to the
    lowest-indexed fresh variable not occurring in ``phi`` or ``t``.
    """
    if t.sort != x.sort:
        raise SortError(f"cannot substitute {t} of sort {t.sort} for {x} of sort {x.sort}")
    avoid = {v.name for v in all_vars(phi) | term_vars(t)}
    return _subst(phi, t, x, term_vars(t), avoid)


def _subst(phi, t, x, tvars, avoid):
    if isinstance(phi, Eq):
        return Eq(substitute_term(phi.left, t, x), substitute_term(phi.right, t, x))
    if isinstance(phi, Atom):
        return Atom(phi.rel, tuple(substitute_term(a, t, x) for a in phi.args))
    if isinstance(phi, Not):
        return Not(_subst(phi.body, t, x, tvars, avoid))
    if isinstance(phi, Implies):
        return Implies(_subst(phi.ante, t, x, tvars, avoid), _subst(phi.cons, t, x, tvars, avoid))
    if isinstance(phi, K):
        return K(substitute_term(phi.index, t, x), _subst(phi.body, t, x, tvars, avoid))
    if isinstance(phi, Forall):
        y = phi.var
        if y == x or x not in free_vars(phi.body):
            return phi
        body = phi.body
        if y in tvars:
            z = fresh_var(y, avoid)
            avoid.add(z.name)
            body = _subst(body, z, y, frozenset((z,)), avoid)
            y = z
        return Forall(y, _subst(body, t, x, tvars, avoid))
    raise TypeError(f"not a formula: {phi!r}")


def free_for(t: Term, x: Var, phi: Formula) -> bool:
    """True iff substituting ``t`` for ``x`` in ``phi`` captures nothing."""
    tvars = term_vars(t)

    def go(f, bound):
        if isinstance(f, ATOMIC):
            return not (x in free_vars(f) and bound & tvars)
        if isinstance(f, Not):
            return go(f.body, bound)
        if isinstance(f, Implies):
            return go(f.ante, bound) and go(f.cons, bound)
        if isinstance(f, K):
            if x in term_vars(f.index) and bound & tvars:
                return False
            return go(f.body, bound)
        if isinstance(f, Forall):
            if f.var == x:
                return True
            return go(f.body, bound | {f.var})
        raise TypeError(f)

    return go(phi, frozenset())


def rename_free(phi: Formula, mapping: Mapping[Var, Var]) -> Formula:
    for old, new in mapping.items():
        phi = substitute(phi, new, old)
    return phi


# --------------------------------------------------------------------------
# Alpha-equivalence

def alpha_equivalent(a: Formula, b: Formula) -> bool:
    """Structural equality up to consistent renaming of bound variables."""
    return _alpha(a, b, {}, {}, 0)


def _alpha_term(s, t, env_a, env_b):
    if isinstance(s, Var) and isinstance(t, Var):
        da, db = env_a.get(s), env_b.get(t)
        if da is None and db is None:
            return s == t
        return da == db and s.sort == t.sort
    if isinstance(s, Con) and isinstance(t, Con):
        return s == t
    if isinstance(s, App) and isinstance(t, App):
        return (s.fn == t.fn and len(s.args) == len(t.args)
                and all(_alpha_term(x, y, env_a, env_b) for x, y in zip(s.args, t.args)))
    return False


def _alpha(a, b, env_a, env_b, depth):
    if type(a) is not type(b):
        return False
    if isinstance(a, Eq):
        return _alpha_term(a.left, b.left, env_a, env_b) and _alpha_term(a.right, b.right, env_a, env_b)
    if isinstance(a, Atom):
        return (a.rel == b.rel and len(a.args) == len(b.args)
                and all(_alpha_term(x, y, env_a, env_b) for x, y in zip(a.args, b.args)))
    if isinstance(a, Not):
        return _alpha(a.body, b.body, env_a, env_b, depth)
    if isinstance(a, Implies):
        return _alpha(a.ante, b.ante, env_a, env_b, depth) and _alpha(a.cons, b.cons, env_a, env_b, depth)
    if isinstance(a, K):
        return _alpha_term(a.index, b.index, env_a, env_b) and _alpha(a.body, b.body, env_a, env_b, depth)
    if isinstance(a, Forall):
        if a.var.sort != b.var.sort:
            return False
        return _alpha(a.body, b.body, {**env_a, a.var: depth}, {**env_b, b.var: depth}, depth + 1)
    raise TypeError(a)


# --------------------------------------------------------------------------
# Well-formedness

@dataclass(frozen=True)
class Diagnostic:
    message: str
    subject: object = None

    def __str__(self) -> str:
        return self.message


class WellFormednessError(SyntaxError_):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _check_term(t: Term, sig: Signature):
    if isinstance(t, Var):
        kind = sig.kind(t.name)
        if kind not in (None, "variables"):
            return Diagnostic(f"variable {t.name} clashes with a declared {kind[:-1]}", t)
        if kind == "variables" and sig.variables[t.name] != t.sort:
            return Diagnostic(f"variable {t.name} used at sort {t.sort}, declared {sig.variables[t.name]}", t)
        return None
    if isinstance(t, Con):
        if t.name not in sig.constants:
            return Diagnostic(f"undeclared constant {t.name}", t)
        if sig.constants[t.name] != t.sort:
            return Diagnostic(f"constant {t.name} used at sort {t.sort}, declared {sig.constants[t.name]}", t)
        return None
    if isinstance(t, App):
        if t.fn not in sig.functions:
            return Diagnostic(f"undeclared function {t.fn}", t)
        arity = sig.functions[t.fn]
        if len(t.args) != len(arity) - 1:
            return Diagnostic(f"function {t.fn} expects {len(arity) - 1} arguments, got {len(t.args)}", t)
        if t.sort != arity[-1]:
            return Diagnostic(f"term {t} carries sort {t.sort} but {t.fn} returns {arity[-1]}", t)
        for i, (arg, want) in enumerate(zip(t.args, arity)):
            d = _check_term(arg, sig)
            if d:
                return d
            if arg.sort != want:
                return Diagnostic(f"argument {i + 1} of {t.fn} must be {want}, got {arg} of sort {arg.sort}", arg)
        return None
    return Diagnostic(f"not a term: {t!r}", t)


def check_well_formed(phi: Formula, sig: Signature):
    """Return ``None`` if ``phi`` is well formed over ``sig``, else a Diagnostic
    naming the first offending subterm or subformula."""
    if isinstance(phi, Eq):
        return _check_term(phi.left, sig) or _check_term(phi.right, sig)
    if isinstance(phi, Atom):
        if phi.rel not in sig.relations:
            return Diagnostic(f"undeclared relation {phi.rel}", phi)
        arity = sig.relations[phi.rel]
        if len(phi.args) != len(arity):
            return Diagnostic(f"relation {phi.rel} expects {len(arity)} arguments, got {len(phi.args)}", phi)
        for i, (arg, want) in enumerate(zip(phi.args, arity)):
            d = _check_term(arg, sig)
            if d:
                return d
            if arg.sort != want:
                return Diagnostic(f"argument {i + 1} of {phi.rel} must be {want}, got {arg} of sort {arg.sort}", arg)
        return None
    if isinstance(phi, Not):
        return check_well_formed(phi.body, sig)
    if isinstance(phi, Implies):
        return check_well_formed(phi.ante, sig) or check_well_formed(phi.cons, sig)
    if isinstance(phi, Forall):
        return _check_term(phi.var, sig) or check_well_formed(phi.body, sig)
    if isinstance(phi, K):
        d = _check_term(phi.index, sig)
        if d:
            return d
        if phi.index.sort != Sort.AGENT:
            return Diagnostic(f"modal index not agent-referring: {phi.index}", phi.index)
        return check_well_formed(phi.body, sig)
    return Diagnostic(f"not a formula: {phi!r}", phi)


def ensure_well_formed(phi: Formula, sig: Signature) -> Formula:
    d = check_well_formed(phi, sig)
    if d:
        raise WellFormednessError(d)
    return phi
