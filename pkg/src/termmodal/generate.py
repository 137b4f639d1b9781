"""Seeded random formulas, models and axiom-schema instances.

Used by the test suites and handy for fuzzing. Everything takes an explicit
``random.Random`` so runs are reproducible.
"""

from __future__ import annotations

import itertools
import random

from .proof import axiom_n
from .semantics import Frame, Interpretation, Model
from .syntax import (
    And, App, Atom, Con, Eq, Exists, Forall, Iff, Implies, K, Neq, Not, Or, Poss, Signature, Sort,
    Var, free_for, free_vars, substitute, term_vars,
)


def pool_signature(n: int = 2, size: int = 30) -> Signature:
    """Agent variables ``x0..``, object variables ``o0..``, ``a``, ``c``, ``p`` and ``P``."""
    variables = {f"x{i}": Sort.AGENT for i in range(size)}
    variables.update({f"o{i}": Sort.OBJECT for i in range(size)})
    return Signature(n, variables, {"a": Sort.AGENT, "c": Sort.OBJECT}, {}, {"p": (), "P": (Sort.OBJECT,)})


class FormulaGen:
    """Random well-formed formulas over a signature.

    ``width`` limits how many distinct variables of each sort are drawn,
    which keeps exhaustive validity checks cheap.
    """

    def __init__(self, sig: Signature, rng: random.Random, width: int = 3, sugar: bool = True,
                 fun_depth: int = 1):
        self.sig = sig
        self.rng = rng
        self.sugar = sugar
        self.fun_depth = fun_depth
        by_sort = {s: sorted(n for n, v in sig.variables.items() if v == s) for s in Sort}
        self.vars = {s: [Var(n, s) for n in rng.sample(names, min(width, len(names)))]
                     for s, names in by_sort.items()}
        self.cons = {s: [Con(n, s) for n, v in sorted(sig.constants.items()) if v == s] for s in Sort}

    def term(self, sort: Sort, depth: int | None = None):
        depth = self.fun_depth if depth is None else depth
        rng = self.rng
        funs = [(f, a) for f, a in sorted(self.sig.functions.items()) if a[-1] == sort]
        if depth > 0 and funs and rng.random() < 0.25:
            f, arity = rng.choice(funs)
            return App(f, tuple(self.term(s, depth - 1) for s in arity[:-1]), sort)
        options = self.vars[sort] + self.cons[sort]
        if not options:
            funs0 = [(f, a) for f, a in funs if len(a) == 1]
            if funs0:
                return App(funs0[0][0], (), sort)
            raise ValueError(f"signature has no closed or variable terms of sort {sort}")
        return rng.choice(options)

    def _has_terms(self, sort: Sort) -> bool:
        return bool(self.vars[sort] or self.cons[sort])

    def atom(self):
        rng = self.rng
        choices = []
        for rel, arity in sorted(self.sig.relations.items()):
            if all(self._has_terms(s) for s in arity):
                choices.append(rel)
        if not choices or rng.random() < 0.3:
            s1 = rng.choice([s for s in Sort if self._has_terms(s)])
            s2 = s1 if rng.random() < 0.9 or not self._has_terms(Sort.OBJECT) else rng.choice(list(Sort))
            if not self._has_terms(s2):
                s2 = s1
            return Eq(self.term(s1), self.term(s2))
        rel = rng.choice(choices)
        return Atom(rel, tuple(self.term(s) for s in self.sig.relations[rel]))

    def formula(self, depth: int = 3):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.2:
            return self.atom()
        kinds = ["not", "imp", "forall", "k"]
        if self.sugar:
            kinds += ["and", "or", "iff", "exists", "poss", "neq"]
        kind = rng.choice(kinds)
        sub = lambda: self.formula(depth - 1)  # noqa: E731
        if kind == "not":
            return Not(sub())
        if kind == "imp":
            return Implies(sub(), sub())
        if kind == "and":
            return And(sub(), sub())
        if kind == "or":
            return Or(sub(), sub())
        if kind == "iff":
            return Iff(sub(), sub())
        if kind == "neq":
            s = rng.choice([s for s in Sort if self._has_terms(s)])
            return Neq(self.term(s), self.term(s))
        if kind in ("forall", "exists"):
            sorts = [s for s in Sort if self.vars[s]]
            if not sorts:
                return sub()
            x = rng.choice(self.vars[rng.choice(sorts)])
            return (Forall if kind == "forall" else Exists)(x, sub())
        if not self._has_terms(Sort.AGENT):
            return sub()
        t = self.term(Sort.AGENT)
        return (K if kind == "k" else Poss)(t, sub())


def random_model(sig: Signature, rng: random.Random, max_worlds: int = 3, max_objects: int = 2,
                 density: float = 0.4) -> Model:
    """A random model of ``sig`` (agent count taken from the signature)."""
    n = sig.agent_count
    worlds = [f"w{i}" for i in range(rng.randint(1, max_worlds))]
    objects = [f"d{i + 1}" for i in range(rng.randint(1, max_objects))]
    access = [{(u, v) for u in worlds for v in worlds if rng.random() < density} for _ in range(n)]
    frame = Frame(worlds, access, objects)
    cons = {c: {w: rng.choice(frame.domain(s)) for w in worlds} for c, s in sig.constants.items()}
    rels = {}
    for r, arity in sig.relations.items():
        tuples = list(itertools.product(*(frame.domain(s) for s in arity)))
        rels[r] = {w: frozenset(t for t in tuples if rng.random() < 0.5) for w in worlds}
    funs = {}
    for f, arity in sig.functions.items():
        inputs = list(itertools.product(*(frame.domain(s) for s in arity[:-1])))
        funs[f] = {w: {t: rng.choice(frame.domain(arity[-1])) for t in inputs} for w in worlds}
    return Model(sig, frame, Interpretation(cons, rels, funs))


def random_valuation(variables, frame: Frame, rng: random.Random) -> dict:
    return {v: rng.choice(frame.domain(v.sort)) for v in sorted(variables, key=lambda v: v.name)}


# --------------------------------------------------------------------------
# Axiom-schema instances

class InstanceGen:
    """Random instances of each base axiom schema over a pool signature."""

    def __init__(self, sig: Signature, rng: random.Random, width: int = 2, depth: int = 2):
        self.sig = sig
        self.rng = rng
        self.width = width
        self.depth = depth
        self.agents = [Var(n, s) for n, s in sorted(sig.variables.items()) if s == Sort.AGENT]
        self.objects = [Var(n, s) for n, s in sorted(sig.variables.items()) if s == Sort.OBJECT]

    def gen(self) -> FormulaGen:
        return FormulaGen(self.sig, self.rng, self.width)

    def agent_term(self, g: FormulaGen):
        return g.term(Sort.AGENT)

    def var(self, sort: Sort) -> Var:
        return self.rng.choice(self.agents if sort == Sort.AGENT else self.objects)

    def forall(self):
        while True:
            g = self.gen()
            sort = self.rng.choice(list(Sort))
            x = self.rng.choice(g.vars[sort])
            phi = g.formula(self.depth)
            if x not in free_vars(phi):
                continue
            candidates = [y for y in g.vars[sort] + [self.var(sort)] if free_for(y, x, phi)]
            if candidates:
                y = self.rng.choice(candidates)
                return Implies(Forall(x, phi), substitute(phi, y, x))

    def identity(self):
        rng = self.rng
        sort = rng.choice(list(Sort))
        options = (self.agents if sort == Sort.AGENT else self.objects) + \
            [Con(n, s) for n, s in self.sig.constants.items() if s == sort]
        t = rng.choice(options)
        return Eq(t, t)

    def msd(self):
        x, y = self.var(Sort.AGENT), self.var(Sort.OBJECT)
        return Neq(x, y) if self.rng.random() < 0.5 else Neq(y, x)

    def ps(self):
        while True:
            g = self.gen()
            sort = self.rng.choice(list(Sort))
            x = self.rng.choice(g.vars[sort])
            y = self.rng.choice(g.vars[sort] + [self.var(sort)])
            if x == y:
                continue
            phi = g.formula(self.depth)
            if x not in free_vars(phi):
                continue
            return Implies(Eq(x, y), Implies(phi, _replace_some(phi, x, y, self.rng)))

    def exid(self):
        c = self.rng.choice([Con(n, s) for n, s in sorted(self.sig.constants.items())])
        x = self.var(c.sort)
        return Implies(Eq(c, c), Exists(x, Eq(x, c)))

    def n_axiom(self):
        n = self.sig.agent_count
        names = [v.name for v in self.rng.sample(self.agents, n + 1)]
        return axiom_n(n, names[:n], names[n])

    def k(self):
        g = self.gen()
        t = self.agent_term(g)
        phi, psi = g.formula(self.depth - 1), g.formula(self.depth - 1)
        return Implies(K(t, Implies(phi, psi)), Implies(K(t, phi), K(t, psi)))

    def bf(self):
        while True:
            g = self.gen()
            t = self.agent_term(g)
            sort = self.rng.choice(list(Sort))
            x = self.rng.choice(g.vars[sort])
            if x in term_vars(t):
                continue
            phi = g.formula(self.depth - 1)
            return Implies(Forall(x, K(t, phi)), K(t, Forall(x, phi)))

    def kni(self):
        g = self.gen()
        sort = self.rng.choice(list(Sort))
        x, y = self.var(sort), self.var(self.rng.choice(list(Sort)) if self.rng.random() < 0.2 else sort)
        t = self.agent_term(g)
        return Implies(Neq(x, y), K(t, Neq(x, y)))

    SCHEMAS = {"FORALL": "forall", "ID": "identity", "MSD": "msd", "PS": "ps", "EXID": "exid",
               "N": "n_axiom", "K": "k", "BF": "bf", "KNI": "kni"}

    def instances(self, tag: str, count: int, max_tries: int = 5000) -> list:
        """``count`` distinct instances of schema ``tag``."""
        make = getattr(self, self.SCHEMAS[tag])
        seen, out = set(), []
        for _ in range(max_tries):
            phi = make()
            if phi not in seen:
                seen.add(phi)
                out.append(phi)
                if len(out) == count:
                    return out
        raise RuntimeError(f"only {len(out)} distinct {tag} instances after {max_tries} tries")


def _replace_some(phi, x: Var, y: Var, rng: random.Random):
    """Replace a random non-empty subset of the free, uncaptured occurrences of ``x`` by ``y``."""
    hits = []

    def mark(f, bound, path):
        if isinstance(f, (Eq, Atom)):
            args = (f.left, f.right) if isinstance(f, Eq) else f.args
            for i, t in enumerate(args):
                walk_term(t, bound, path + (i,))
        elif isinstance(f, Not):
            mark(f.body, bound, path + ("b",))
        elif isinstance(f, Implies):
            mark(f.ante, bound, path + ("a",))
            mark(f.cons, bound, path + ("c",))
        elif isinstance(f, K):
            walk_term(f.index, bound, path + ("i",))
            mark(f.body, bound, path + ("b",))
        elif isinstance(f, Forall):
            mark(f.body, bound | {f.var}, path + ("b",))

    def walk_term(t, bound, path):
        if t == x and x not in bound and y not in bound:
            hits.append(path)
        elif isinstance(t, App):
            for i, s in enumerate(t.args):
                walk_term(s, bound, path + (i,))

    mark(phi, frozenset(), ())
    if not hits:
        return phi
    chosen = set(rng.sample(hits, rng.randint(1, len(hits))))

    def rebuild_term(t, path):
        if path in chosen:
            return y
        if isinstance(t, App):
            return App(t.fn, tuple(rebuild_term(s, path + (i,)) for i, s in enumerate(t.args)), t.sort)
        return t

    def rebuild(f, path):
        if isinstance(f, Eq):
            return Eq(rebuild_term(f.left, path + (0,)), rebuild_term(f.right, path + (1,)))
        if isinstance(f, Atom):
            return Atom(f.rel, tuple(rebuild_term(t, path + (i,)) for i, t in enumerate(f.args)))
        if isinstance(f, Not):
            return Not(rebuild(f.body, path + ("b",)))
        if isinstance(f, Implies):
            return Implies(rebuild(f.ante, path + ("a",)), rebuild(f.cons, path + ("c",)))
        if isinstance(f, K):
            return K(rebuild_term(f.index, path + ("i",)), rebuild(f.body, path + ("b",)))
        return Forall(f.var, rebuild(f.body, path + ("b",)))

    return rebuild(phi, ())
