"""Vectorised truth evaluation over many finite structures at once.

A :class:`StructureBatch` packs ``S`` models that share a world count, agent
count and object-domain size into numpy arrays. Evaluating a formula yields a
boolean array of shape ``(S, W, *free-variable-domains)``; quantifiers reduce
over a per-variable axis and ``K[t]`` gathers along the accessibility tensor.

Domain elements are local indices within their sort: agents ``0..n-1``,
objects ``0..D-1``. Equality between terms of different sorts is statically
false because the two domain parts are disjoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .semantics import Frame, Interpretation, Model, agent_name
from .syntax import (
    App, Atom, Con, Eq, Forall, Formula, Implies, K, Not, Signature, Sort, Var,
    all_vars, free_vars, symbols,
)

# Upper bound on elements of the largest intermediate array per chunk.
CHUNK_BUDGET = 1 << 22


class CapExceeded(RuntimeError):
    """The number of structures to enumerate exceeds the configured cap."""


def world_names(count: int) -> tuple:
    return tuple(f"w{i}" for i in range(count))


def object_names(count: int) -> tuple:
    return tuple(f"d{i + 1}" for i in range(count))


@dataclass
class StructureBatch:
    signature: Signature
    worlds: int
    objects: int
    access: np.ndarray                      # bool (S, n, W, W)
    constants: dict = field(default_factory=dict)   # int (S, W)
    relations: dict = field(default_factory=dict)   # bool (S, W, *dims)
    functions: dict = field(default_factory=dict)   # int (S, W, *dims)

    @property
    def size(self) -> int:
        return self.access.shape[0]

    @property
    def agents(self) -> int:
        return self.access.shape[1]

    def sort_size(self, sort: Sort) -> int:
        return self.agents if sort == Sort.AGENT else self.objects

    def element(self, sort: Sort, index: int) -> str:
        return agent_name(index) if sort == Sort.AGENT else object_names(self.objects)[index]

    def frame(self, s: int) -> Frame:
        ws = world_names(self.worlds)
        access = []
        for i in range(self.agents):
            us, vs = np.nonzero(self.access[s, i])
            access.append({(ws[u], ws[v]) for u, v in zip(us, vs)})
        return Frame(ws, access, object_names(self.objects))

    def model(self, s: int) -> Model:
        """Materialise structure ``s`` as an explicit :class:`Model`.

        Symbols of the signature that the batch does not vary get a fixed
        default meaning (first domain element, empty extension).
        """
        sig = self.signature
        frame = self.frame(s)
        ws = frame.worlds
        el = self.element
        cons, rels, funs = {}, {}, {}
        for name, sort in sig.constants.items():
            if name in self.constants:
                cons[name] = {w: el(sort, int(self.constants[name][s, k])) for k, w in enumerate(ws)}
            else:
                cons[name] = {w: el(sort, 0) for w in ws}
        for name, arity in sig.relations.items():
            table = self.relations.get(name)
            rels[name] = {}
            for k, w in enumerate(ws):
                if table is None:
                    rels[name][w] = frozenset()
                    continue
                cells = table[s, k]
                rels[name][w] = frozenset(
                    tuple(el(srt, int(i)) for srt, i in zip(arity, idx))
                    for idx in zip(*np.nonzero(cells))
                ) if arity else (frozenset({()}) if bool(cells) else frozenset())
        for name, arity in sig.functions.items():
            table = self.functions.get(name)
            funs[name] = {}
            for k, w in enumerate(ws):
                graph = {}
                for idx in itertools.product(*(range(self.sort_size(a)) for a in arity[:-1])):
                    val = int(table[(s, k) + idx]) if table is not None else 0
                    graph[tuple(el(a, i) for a, i in zip(arity, idx))] = el(arity[-1], val)
                funs[name][w] = graph
        return Model(sig, frame, Interpretation(cons, rels, funs))


# --------------------------------------------------------------------------
# Evaluation

class _Evaluator:
    def __init__(self, batch: StructureBatch, variables):
        self.b = batch
        self.axes = {v: 2 + i for i, v in enumerate(variables)}
        self.ndim = 2 + len(variables)
        S, W = batch.size, batch.worlds
        pad = (1,) * (self.ndim - 2)
        self.s_idx = np.arange(S).reshape((S, 1) + pad)
        self.w_idx = np.arange(W).reshape((1, W) + pad)
        self.pad = pad

    def term(self, t):
        b = self.b
        if isinstance(t, Var):
            shape = [1] * self.ndim
            shape[self.axes[t]] = b.sort_size(t.sort)
            return np.arange(b.sort_size(t.sort)).reshape(shape)
        if isinstance(t, Con):
            return b.constants[t.name].reshape(b.constants[t.name].shape + self.pad)
        if isinstance(t, App):
            table = b.functions[t.fn]
            return table[(self.s_idx, self.w_idx) + tuple(self.term(a) for a in t.args)]
        raise TypeError(t)

    def formula(self, f):
        b = self.b
        if isinstance(f, Eq):
            if f.left.sort != f.right.sort:
                return np.zeros((1,) * self.ndim, dtype=bool)
            return self.term(f.left) == self.term(f.right)
        if isinstance(f, Atom):
            table = b.relations[f.rel]
            if not f.args:
                return table.reshape(table.shape + self.pad)
            return table[(self.s_idx, self.w_idx) + tuple(self.term(a) for a in f.args)]
        if isinstance(f, Not):
            return ~self.formula(f.body)
        if isinstance(f, Implies):
            return ~self.formula(f.ante) | self.formula(f.cons)
        if isinstance(f, Forall):
            return self.formula(f.body).all(axis=self.axes[f.var], keepdims=True)
        if isinstance(f, K):
            body = self.formula(f.body)
            W = b.worlds
            body = np.broadcast_to(body, (body.shape[0], W) + body.shape[2:])[:, None]
            ext = self.term(f.index)
            out = None
            for i in range(b.agents):
                rel = b.access[:, i].reshape((b.size, W, W) + self.pad)
                known = np.all(~rel | body, axis=2)
                part = (ext == i) & known
                out = part if out is None else out | part
            return out
        raise TypeError(f)


def truth_table(phi: Formula, batch: StructureBatch):
    """Evaluate ``phi`` over every structure, world and free-variable assignment.

    Returns ``(values, free)`` where ``free`` is the list of free variables in
    a fixed order (sorted by name) and ``values`` has shape
    ``(S, W, *[domain size of v for v in free])``.
    """
    variables = sorted(all_vars(phi), key=lambda v: (v.name, v.sort.value))
    free = [v for v in variables if v in free_vars(phi)]
    ev = _Evaluator(batch, variables)
    raw = ev.formula(phi)
    full_shape = (batch.size, batch.worlds) + tuple(
        batch.sort_size(v.sort) if v in free else 1 for v in variables)
    raw = np.broadcast_to(raw, full_shape)
    keep = (batch.size, batch.worlds) + tuple(batch.sort_size(v.sort) for v in free)
    return raw.reshape(keep), free


def chunk_size(phi_or_vars, worlds: int, agents: int, objects: int) -> int:
    variables = all_vars(phi_or_vars) if not isinstance(phi_or_vars, (set, frozenset, list)) else phi_or_vars
    per = worlds * worlds * max(1, prod(agents if v.sort == Sort.AGENT else objects for v in variables))
    return max(1, CHUNK_BUDGET // per)


# --------------------------------------------------------------------------
# Enumeration of relations, frames and interpretations

def all_relations(worlds: int) -> np.ndarray:
    """Every binary relation on ``worlds`` points, as bool (2**(W*W), W, W).

    Relation ``r`` contains pair ``(u, v)`` iff bit ``u*W + v`` of ``r`` is set.
    """
    cells = worlds * worlds
    codes = np.arange(1 << cells, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(cells)) & 1
    return bits.astype(bool).reshape(-1, worlds, worlds)


def reflexive_mask(rels: np.ndarray) -> np.ndarray:
    return np.diagonal(rels, axis1=1, axis2=2).all(axis=1)


def transitive_mask(rels: np.ndarray) -> np.ndarray:
    # (u,v) and (v,w) in R  =>  (u,w) in R
    composed = (rels[:, :, :, None] & rels[:, None, :, :]).any(axis=2)
    return ~(composed & ~rels).any(axis=(1, 2))


def euclidean_mask(rels: np.ndarray) -> np.ndarray:
    # (u,v) and (u,w) in R  =>  (v,w) in R
    needed = (rels[:, :, :, None] & rels[:, :, None, :]).any(axis=1)
    return ~(needed & ~rels).any(axis=(1, 2))


PROPERTY_MASKS = {
    "reflexive": reflexive_mask,
    "transitive": transitive_mask,
    "euclidean": euclidean_mask,
}


def relations_with(worlds: int, properties=()) -> np.ndarray:
    rels = all_relations(worlds)
    for prop in properties:
        rels = rels[PROPERTY_MASKS[prop](rels)]
    return rels


def frame_access(relations_per_agent) -> np.ndarray:
    """Cartesian product of per-agent relation stacks -> bool (F, n, W, W).

    The first agent varies slowest.
    """
    stacks = [np.asarray(r) for r in relations_per_agent]
    counts = [len(r) for r in stacks]
    grids = np.meshgrid(*[np.arange(c) for c in counts], indexing="ij")
    idx = [g.reshape(-1) for g in grids]
    return np.stack([stacks[i][idx[i]] for i in range(len(stacks))], axis=1)


def _options(kind: str, arity: tuple, worlds: int, agents: int, objects: int) -> np.ndarray:
    size = lambda s: agents if s == Sort.AGENT else objects  # noqa: E731
    if kind == "constants":
        k = size(arity[0])
        return np.array(list(itertools.product(range(k), repeat=worlds)), dtype=np.int64).reshape(-1, worlds)
    if kind == "relations":
        dims = tuple(size(s) for s in arity)
        cells = worlds * prod(dims)
        if cells > 24:
            raise CapExceeded(f"relation with {cells} cells is too large to enumerate")
        codes = np.arange(1 << cells, dtype=np.int64)
        bits = ((codes[:, None] >> np.arange(cells)) & 1).astype(bool)
        return bits.reshape((-1, worlds) + dims)
    dims = tuple(size(s) for s in arity[:-1])
    r = size(arity[-1])
    cells = worlds * prod(dims)
    if r ** cells > 1 << 24:
        raise CapExceeded(f"function with {r ** cells} interpretations is too large to enumerate")
    rows = np.array(list(itertools.product(range(r), repeat=cells)), dtype=np.int64)
    return rows.reshape((-1, worlds) + dims)


@dataclass
class Enumeration:
    """All interpretations of a symbol set over a stack of frames.

    Structure ``s`` pairs frame ``s // per_frame`` with interpretation
    ``s % per_frame``; within an interpretation the last symbol varies
    fastest.
    """

    signature: Signature
    worlds: int
    objects: int
    access: np.ndarray
    symbols: list
    options: list

    @property
    def per_frame(self) -> int:
        return prod(len(o) for o in self.options)

    @property
    def size(self) -> int:
        return len(self.access) * self.per_frame

    def batch(self, start: int, stop: int) -> StructureBatch:
        s = np.arange(start, stop, dtype=np.int64)
        per = self.per_frame
        f, i = s // per, s % per
        out = StructureBatch(self.signature, self.worlds, self.objects, self.access[f])
        stride = 1
        for (kind, name), opts in reversed(list(zip(self.symbols, self.options))):
            digit = (i // stride) % len(opts)
            getattr(out, kind)[name] = opts[digit]
            stride *= len(opts)
        return out

    def chunks(self, step: int):
        for start in range(0, self.size, step):
            yield start, self.batch(start, min(self.size, start + step))


def relevant_symbols(formulas, sig: Signature) -> list:
    found = {"constants": set(), "functions": set(), "relations": set()}
    for phi in formulas:
        for kind, names in symbols(phi).items():
            found[kind] |= names
    out = []
    for kind in ("constants", "relations", "functions"):
        for name in sorted(found[kind]):
            out.append((kind, name))
    return out


def enumerate_structures(sig: Signature, access: np.ndarray, worlds: int, objects: int,
                         symbols, max_models: int | None = None) -> Enumeration:
    agents = access.shape[1]
    sig = sig.with_agents(agents) if sig.agent_count != agents else sig
    options = []
    for kind, name in symbols:
        arity = getattr(sig, kind)[name]
        if kind == "constants":
            arity = (arity,)
        options.append(_options(kind, arity, worlds, agents, objects))
    en = Enumeration(sig, worlds, objects, access, list(symbols), options)
    if max_models is not None and en.size > max_models:
        raise CapExceeded(f"{en.size} structures at |W|={worlds}, n={agents}, |objects|={objects} "
                          f"exceeds the cap of {max_models}")
    return en
