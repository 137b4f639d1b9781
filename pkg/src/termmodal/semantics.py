"""Finite Kripke models with agents in the domain, and the truth recursion.

This is the reference evaluator: a direct transcription of the truth clauses
over explicit Python objects. The batched evaluator in :mod:`termmodal.batch`
is cross-checked against it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

from .syntax import (
    App, Atom, Con, Eq, Forall, Formula, Implies, K, Not, Signature, Sort, Term, Var,
    free_vars, substitute,
)


class ModelError(ValueError):
    """A frame, interpretation or model violates its structural invariants."""


class EvaluationError(ValueError):
    pass


def agent_name(i: int) -> str:
    """Name of the i-th agent element (0-based index, 1-based label)."""
    return f"α{i + 1}"


@dataclass(frozen=True)
class Frame:
    """Worlds, one accessibility relation per agent, and the object domain.

    The agent part of the domain is always ``α1..αn`` where ``n`` is the
    number of accessibility relations.
    """

    worlds: tuple
    access: tuple
    objects: tuple

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "access", tuple(frozenset(tuple(p) for p in r) for r in self.access))
        if not self.worlds:
            raise ModelError("a frame needs at least one world")
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("duplicate world names")
        if not self.access:
            raise ModelError("a frame needs at least one agent")
        if not self.objects:
            raise ModelError("the object domain must be non-empty")
        if len(set(self.objects)) != len(self.objects):
            raise ModelError("duplicate object names")
        clash = set(self.objects) & set(self.agents)
        if clash:
            raise ModelError(f"object names clash with agents: {sorted(clash)}")
        ws = set(self.worlds)
        for i, rel in enumerate(self.access):
            for u, v in rel:
                if u not in ws or v not in ws:
                    raise ModelError(f"accessibility of {agent_name(i)} mentions unknown world in {(u, v)}")

    @property
    def agent_count(self) -> int:
        return len(self.access)

    @property
    def agents(self) -> tuple:
        return tuple(agent_name(i) for i in range(len(self.access)))

    def domain(self, sort: Sort) -> tuple:
        return self.agents if sort == Sort.AGENT else self.objects

    @cached_property
    def world_set(self) -> frozenset:
        return frozenset(self.worlds)

    @cached_property
    def _agent_index(self) -> dict:
        return {a: i for i, a in enumerate(self.agents)}

    def agent_index(self, element: str) -> int:
        return self._agent_index[element]

    @cached_property
    def _successors(self) -> dict:
        succ = {}
        for i, rel in enumerate(self.access):
            table = {w: [] for w in self.worlds}
            for u, v in rel:
                table[u].append(v)
            order = {w: k for k, w in enumerate(self.worlds)}
            for w in table:
                table[w].sort(key=order.__getitem__)
            succ[i] = table
        return succ

    def successors(self, agent: int, world: str) -> list:
        return self._successors[agent][world]


@dataclass(frozen=True)
class Interpretation:
    """Per-world meaning of the non-logical symbols.

    ``constants[c][w]`` is a domain element, ``relations[R][w]`` a frozenset of
    argument tuples (``{()}`` for a true nullary relation) and
    ``functions[f][w]`` a dict from argument tuples to a domain element.
    Equality is never stored: it is the identity at every world.
    """

    constants: Mapping = field(default_factory=dict)
    relations: Mapping = field(default_factory=dict)
    functions: Mapping = field(default_factory=dict)

    __hash__ = None


@dataclass(frozen=True)
class Model:
    signature: Signature
    frame: Frame
    interp: Interpretation

    __hash__ = None

    def __post_init__(self):
        validate_model(self.signature, self.frame, self.interp)

    @property
    def worlds(self) -> tuple:
        return self.frame.worlds


def validate_model(sig: Signature, frame: Frame, interp: Interpretation) -> None:
    if sig.agent_count != frame.agent_count:
        raise ModelError(f"signature declares {sig.agent_count} agents, frame has {frame.agent_count}")
    worlds = set(frame.worlds)

    def check_worlds(kind, name, table):
        if set(table) != worlds:
            missing = sorted(worlds - set(table))
            extra = sorted(set(table) - worlds)
            raise ModelError(f"{kind} {name}: interpretation missing worlds {missing}" if missing
                             else f"{kind} {name}: unknown worlds {extra}")

    for name, sort in sig.constants.items():
        table = interp.constants.get(name)
        if table is None:
            raise ModelError(f"constant {name} is not interpreted")
        check_worlds("constant", name, table)
        dom = frame.domain(sort)
        for w, d in table.items():
            if d not in dom:
                raise ModelError(f"constant {name} at world {w}: {d} is not in the {sort} domain")
    for name, arity in sig.relations.items():
        table = interp.relations.get(name)
        if table is None:
            raise ModelError(f"relation {name} is not interpreted")
        check_worlds("relation", name, table)
        doms = [frame.domain(s) for s in arity]
        for w, ext in table.items():
            for tup in ext:
                if len(tup) != len(arity) or any(d not in dom for d, dom in zip(tup, doms)):
                    raise ModelError(f"relation {name} at world {w}: tuple {tup} does not fit arity "
                                     f"({' '.join(map(str, arity))})")
    for name, arity in sig.functions.items():
        table = interp.functions.get(name)
        if table is None:
            raise ModelError(f"function {name} is not interpreted")
        check_worlds("function", name, table)
        doms = [frame.domain(s) for s in arity[:-1]]
        result = frame.domain(arity[-1])
        inputs = set(itertools.product(*doms))
        for w, graph in table.items():
            if set(graph) != inputs:
                missing = sorted(inputs - set(graph))
                raise ModelError(f"function {name} at world {w} is not total"
                                 + (f": missing {missing[0]}" if missing else ": bad argument tuple"))
            for args, d in graph.items():
                if d not in result:
                    raise ModelError(f"function {name} at world {w}: value {d} for {args} not in the "
                                     f"{arity[-1]} domain")
    for kind, table in (("constant", interp.constants), ("relation", interp.relations),
                        ("function", interp.functions)):
        for name in table:
            if sig.kind(name) != kind + "s":
                raise ModelError(f"interpretation given for undeclared {kind} {name}")


# --------------------------------------------------------------------------
# Truth

def term_extension(t: Term, model: Model, w: str, v: Mapping) -> str:
    if isinstance(t, Var):
        try:
            return v[t]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name}") from None
    if isinstance(t, Con):
        return model.interp.constants[t.name][w]
    if isinstance(t, App):
        args = tuple(term_extension(a, model, w, v) for a in t.args)
        return model.interp.functions[t.fn][w][args]
    raise TypeError(f"not a term: {t!r}")


def evaluate(phi: Formula, model: Model, w: str, v: Mapping | None = None) -> bool:
    """Truth of ``phi`` at world ``w`` of ``model`` under valuation ``v``."""
    if w not in model.frame.world_set:
        raise EvaluationError(f"unknown world {w!r}")
    return _eval(phi, model, w, v or {})


def _eval(phi, model, w, v):
    if isinstance(phi, Eq):
        return term_extension(phi.left, model, w, v) == term_extension(phi.right, model, w, v)
    if isinstance(phi, Atom):
        args = tuple(term_extension(a, model, w, v) for a in phi.args)
        return args in model.interp.relations[phi.rel][w]
    if isinstance(phi, Not):
        return not _eval(phi.body, model, w, v)
    if isinstance(phi, Implies):
        return (not _eval(phi.ante, model, w, v)) or _eval(phi.cons, model, w, v)
    if isinstance(phi, Forall):
        x = phi.var
        return all(_eval(phi.body, model, w, {**v, x: d}) for d in model.frame.domain(x.sort))
    if isinstance(phi, K):
        agent = model.frame.agent_index(term_extension(phi.index, model, w, v))
        return all(_eval(phi.body, model, u, v) for u in model.frame.successors(agent, w))
    raise TypeError(f"not a formula: {phi!r}")


# alias; ``evaluate`` avoids shadowing the builtin
eval_formula = evaluate


def valuations(variables, frame: Frame) -> Iterator[dict]:
    """Every sort-respecting assignment to ``variables`` (sorted by name)."""
    vs = sorted(variables, key=lambda x: (x.name, x.sort.value))
    for values in itertools.product(*(frame.domain(x.sort) for x in vs)):
        yield dict(zip(vs, values))


def valid_at_world(phi: Formula, model: Model, w: str) -> bool:
    return all(evaluate(phi, model, w, v) for v in valuations(free_vars(phi), model.frame))


def valid_in_model(phi: Formula, model: Model) -> bool:
    return all(valid_at_world(phi, model, w) for w in model.worlds)


def is_x_variant(v: Mapping, v2: Mapping, x: Var) -> bool:
    keys = set(v) | set(v2)
    return all(v.get(k) == v2.get(k) for k in keys if k != x)


def principle_of_replacement_check(phi: Formula, x: Var, y: Var, model: Model, w: str,
                                   v: Mapping, v_prime: Mapping) -> bool:
    """Compare ``phi`` under ``v`` with ``phi(y/x)`` under ``v_prime``.

    ``v_prime`` must be an x-variant of ``v`` with ``v(x) == v_prime(y)``.
    """
    if x.sort != y.sort:
        raise ValueError(f"{x} and {y} have different sorts")
    if not is_x_variant(v, v_prime, x):
        raise ValueError("v_prime is not an x-variant of v")
    if v.get(x) != v_prime.get(y):
        raise ValueError("v(x) differs from v_prime(y)")
    return evaluate(phi, model, w, v) == evaluate(substitute(phi, y, x), model, w, v_prime)
