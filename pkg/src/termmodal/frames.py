"""Frame properties, correspondence sweeps and the non-rigid introspection examples."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .batch import (
    CapExceeded, PROPERTY_MASKS, chunk_size, enumerate_structures, frame_access, object_names,
    relations_with, relevant_symbols, truth_table, world_names,
)
from .search import Bounds, Countermodel
from .semantics import Frame, Interpretation, Model, evaluate
from .syntax import Eq, Exists, Forall, Implies, K, Poss, Signature, Sort, Var

log = logging.getLogger(__name__)

PROPERTIES = ("reflexive", "transitive", "euclidean")
AXIOM_PROPERTY = {"T": "reflexive", "4": "transitive", "5": "euclidean"}
# deliberately wrong pairing used as a negative control
FAULTY_PROPERTY = {"T": "transitive", "4": "euclidean", "5": "transitive"}
MAX_REPORTED = 20


def has_property(frame: Frame, agent: int, prop: str) -> bool:
    """Check ``prop`` of agent ``agent``'s relation (0-based) by its definition."""
    rel = frame.access[agent]
    ws = frame.worlds
    if prop == "reflexive":
        return all((w, w) in rel for w in ws)
    if prop == "transitive":
        return all((u, w) in rel for (u, v) in rel for (v2, w) in rel if v == v2)
    if prop == "euclidean":
        return all((v, w) in rel for (u, v) in rel for (u2, w) in rel if u == u2)
    raise ValueError(f"unknown property {prop!r}; choose from {', '.join(PROPERTIES)}")


def in_class(frame: Frame, properties) -> bool:
    return all(has_property(frame, i, p) for i in range(frame.agent_count) for p in properties)


@dataclass(frozen=True)
class FrameClassSpec:
    """Frames within ``bounds`` where every agent's relation has ``properties``."""

    bounds: Bounds = Bounds()
    properties: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "properties", tuple(self.properties))
        for p in self.properties:
            if p not in PROPERTY_MASKS:
                raise ValueError(f"unknown property {p!r}; choose from {', '.join(PROPERTIES)}")

    def levels(self) -> Iterator[tuple]:
        """``(worlds, agents, objects, access)`` groups in enumeration order."""
        b = self.bounds
        for w in range(1, b.max_worlds + 1):
            rels = relations_with(w, self.properties)
            for n in range(b.min_agents, b.max_agents + 1):
                access = frame_access([rels] * n)
                for d in range(1, b.max_objects + 1):
                    yield w, n, d, access


def enumerate_frames(spec: FrameClassSpec | Bounds, max_frames: int | None = None) -> Iterator[Frame]:
    """Every frame of the class exactly once, smallest first.

    Order: worlds, then agent count, then object count, then relations with
    the first agent's relation varying slowest.
    """
    if isinstance(spec, Bounds):
        spec = FrameClassSpec(spec)
    total = 0
    for w, n, d, access in spec.levels():
        total += len(access)
        if max_frames is not None and total > max_frames:
            raise CapExceeded(f"more than {max_frames} frames")
        ws, objs = world_names(w), object_names(d)
        for acc in access:
            yield Frame(ws, [{(ws[u], ws[v]) for u, v in zip(*np.nonzero(r))} for r in acc], objs)


# --------------------------------------------------------------------------
# Reports

@dataclass
class Violator:
    frame_id: int
    frame: Frame
    detail: str
    world: str | None = None
    valuation: dict = field(default_factory=dict)
    model: Model | None = None
    model_id: int | None = None

    def line(self) -> str:
        parts = [f"frame {self.frame_id}"]
        if self.model_id is not None:
            parts.append(f"model {self.model_id}")
        if self.world is not None:
            parts.append(f"world {self.world}")
        if self.valuation:
            parts.append("valuation " + ", ".join(f"{v.name}={d}" for v, d in self.valuation.items()))
        acc = "; ".join(f"α{i + 1}: " + " ".join(f"{u}->{v}" for u, v in sorted(r))
                        for i, r in enumerate(self.frame.access))
        return f"{' '.join(parts)} [{acc}]: {self.detail}"


@dataclass
class SweepReport:
    title: str
    frames: int = 0
    structures: int = 0
    checked: int = 0
    violations: int = 0
    violators: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def summary(self) -> str:
        return (f"{self.title}: {self.frames} frames, {self.structures} models, {self.checked} checks, "
                f"{self.violations} violators")

    def lines(self) -> list:
        out = [v.line() for v in self.violators]
        if self.violations > len(self.violators):
            out.append(f"... {self.violations - len(self.violators)} more violators not listed")
        return out + list(self.notes) + [self.summary()]

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


# --------------------------------------------------------------------------
# Correspondence

P_SIG = Signature(1, {"x": Sort.AGENT}, {}, {}, {"p": ()})
_X = Var("x", Sort.AGENT)
_P = P_SIG.atom("p")


def axiom_instance(tag: str):
    """The extension schema with the schematic formula set to ``p``."""
    if tag == "T":
        return Forall(_X, Implies(K(_X, _P), _P))
    if tag == "4":
        return Forall(_X, Implies(K(_X, _P), K(_X, K(_X, _P))))
    if tag == "5":
        return Forall(_X, Implies(Poss(_X, _P), K(_X, Poss(_X, _P))))
    raise ValueError(f"unknown axiom {tag!r}; choose from T, 4, 5")


def _property_mask(access: np.ndarray, prop: str) -> np.ndarray:
    f, n, w, _ = access.shape
    return PROPERTY_MASKS[prop](access.reshape(f * n, w, w)).reshape(f, n).all(axis=1)


def correspondence_sweep(tag: str, bounds: Bounds = Bounds(max_objects=1, max_agents=1),
                         prop: str | None = None) -> SweepReport:
    """Per frame: does the property hold iff the axiom instance is valid?

    ``prop`` overrides the property paired with ``tag`` (negative controls).
    """
    phi = axiom_instance(tag)
    prop = prop or AXIOM_PROPERTY[tag]
    report = SweepReport(f"correspondence {tag} <-> {prop}")
    symbols = relevant_symbols([phi], P_SIG)
    frame_id = 0
    for w, n, d, access in FrameClassSpec(bounds).levels():
        sig = P_SIG.with_agents(n)
        en = enumerate_structures(sig, access, w, d, symbols)
        report.structures += en.size
        if report.structures > bounds.max_models:
            raise CapExceeded(f"more than {bounds.max_models} models needed")
        per = en.per_frame
        valid = np.ones(len(access), dtype=bool)
        step = max(per, chunk_size(phi, w, n, d) // per * per)
        first_bad = {}
        for start, batch in en.chunks(step):
            values, _ = truth_table(phi, batch)
            ok = values.reshape(values.shape[0], -1).all(axis=1).reshape(-1, per)
            f0 = start // per
            valid[f0:f0 + len(ok)] &= ok.all(axis=1)
            for k in np.flatnonzero(~ok.all(axis=1)):
                if f0 + k not in first_bad:
                    s = int(k * per + np.flatnonzero(~ok[k])[0])
                    first_bad[f0 + int(k)] = (batch, s, values[s])
        holds = _property_mask(access, prop)
        report.frames += len(access)
        report.checked += len(access)
        for k in np.flatnonzero(holds != valid):
            report.violations += 1
            if len(report.violators) >= MAX_REPORTED:
                continue
            batch_frame = _frame_from(access[k], w, d)
            if holds[k]:
                batch, s, vals = first_bad[int(k)]
                world = world_names(w)[int(np.flatnonzero(~vals.reshape(w, -1).all(axis=1))[0])]
                report.violators.append(Violator(frame_id + int(k), batch_frame,
                                                 f"{prop} but the {tag} instance fails", world,
                                                 model=batch.model(s)))
            else:
                report.violators.append(Violator(frame_id + int(k), batch_frame,
                                                 f"not {prop} but the {tag} instance is valid"))
        frame_id += len(access)
    return report


def _frame_from(acc: np.ndarray, w: int, d: int) -> Frame:
    ws = world_names(w)
    return Frame(ws, [{(ws[u], ws[v]) for u, v in zip(*np.nonzero(r))} for r in acc], object_names(d))


# --------------------------------------------------------------------------
# Non-rigid constants and positive introspection

KW_SIG = Signature(2, {"x": Sort.AGENT}, {"a": Sort.AGENT}, {}, {"p": ()})
_A = KW_SIG.con("a")

KNOWING_WHO = Exists(_X, K(_A, Eq(_X, _A)))
FOUR_FOR_A = Implies(K(_A, _P), K(_A, K(_A, _P)))


def hintikka_countermodel() -> tuple:
    """A transitive two-agent model where ``K[a] p -> K[a] K[a] p`` fails at ``w``.

    ``a`` names agent α1 at ``w`` and α2 at ``w'``; α1 sees ``w`` and
    ``w'`` from ``w``, α2 sees ``t`` from ``w'``, and ``p`` fails only at ``t``.
    """
    worlds = ("w", "w'", "t")
    frame = Frame(worlds, [{("w", "w"), ("w", "w'")}, {("w'", "t")}], ("d1",))
    interp = Interpretation(
        constants={"a": {"w": "α1", "w'": "α2", "t": "α2"}},
        relations={"p": {"w": frozenset({()}), "w'": frozenset({()}), "t": frozenset()}},
    )
    return Model(KW_SIG, frame, interp), "w"


def knowing_who_sweep(bounds: Bounds = Bounds(max_objects=1), scope: str = "world",
                      rigid_only: bool = False) -> SweepReport:
    """Transitive frames: wherever ``exists x. K[a](x = a)`` holds, test the 4-instance for ``a``.

    ``scope="world"`` asks for the premise at the world of evaluation only;
    ``scope="model"`` asks for it at every world of the model.
    ``rigid_only`` restricts to models where ``a`` names one agent throughout.
    """
    if scope not in ("world", "model"):
        raise ValueError("scope must be 'world' or 'model'")
    title = f"knowing-who (premise scope: {scope}{', rigid a' if rigid_only else ''})"
    report = SweepReport(title)
    symbols = relevant_symbols([KNOWING_WHO, FOUR_FOR_A], KW_SIG)
    spec = FrameClassSpec(bounds, ("transitive",))
    frame_id = model_id = 0
    for w, n, d, access in spec.levels():
        sig = KW_SIG.with_agents(n)
        en = enumerate_structures(sig, access, w, d, symbols)
        report.structures += en.size
        if report.structures > bounds.max_models:
            raise CapExceeded(f"more than {bounds.max_models} models needed")
        report.frames += len(access)
        step = chunk_size(KNOWING_WHO, w, n, d)
        for start, batch in en.chunks(step):
            premise, _ = truth_table(KNOWING_WHO, batch)
            concl, _ = truth_table(FOUR_FOR_A, batch)
            if scope == "model":
                premise = np.broadcast_to(premise.all(axis=1, keepdims=True), premise.shape)
            if rigid_only:
                consts = batch.constants["a"]
                rigid = (consts == consts[:, :1]).all(axis=1)
                premise = premise & rigid[:, None]
            report.checked += int(premise.sum())
            bad = premise & ~concl
            report.violations += int(bad.sum())
            for s, k in zip(*np.nonzero(bad)):
                if len(report.violators) >= MAX_REPORTED:
                    break
                model = batch.model(int(s))
                world = model.worlds[int(k)]
                if not (evaluate(KNOWING_WHO, model, world) and not evaluate(FOUR_FOR_A, model, world)):
                    raise AssertionError("batched and reference evaluators disagree")
                fid = frame_id + (start + int(s)) // en.per_frame
                report.violators.append(Violator(fid, model.frame, "premise holds, K[a] p -> K[a] K[a] p fails",
                                                 world, model=model, model_id=model_id + start + int(s)))
        frame_id += len(access)
        model_id += en.size
    return report


def smallest_knowing_who_violator(bounds: Bounds = Bounds(max_objects=1), scope: str = "world"):
    """First violator in enumeration order as a :class:`Countermodel`, or None."""
    rep = knowing_who_sweep(bounds, scope)
    if not rep.violators:
        return None
    v = rep.violators[0]
    return Countermodel(v.model, v.world, {})
