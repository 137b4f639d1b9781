"""Exhaustive validity checks and bounded countermodel search.

Only the symbols that actually occur in the formulas under test are varied;
the truth value of a formula does not depend on the meaning of symbols it
does not mention, so this enumerates the same verdicts as sweeping the full
signature at a fraction of the cost. For the same reason a formula with no
object-sorted terms is only checked over one-object domains.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .batch import (
    CapExceeded, chunk_size, enumerate_structures, frame_access, relations_with,
    relevant_symbols, truth_table,
)
from .semantics import Frame, Model, evaluate
from .syntax import Formula, Implies, Signature, Sort, all_vars, conjunction, subterms, terms_of

log = logging.getLogger(__name__)

DEFAULT_MAX_MODELS = 5_000_000


@dataclass(frozen=True)
class Bounds:
    """Size limits for exhaustive enumeration."""

    max_worlds: int = 3
    max_objects: int = 2
    max_agents: int = 2
    min_agents: int = 1
    max_models: int = DEFAULT_MAX_MODELS

    def __post_init__(self):
        if min(self.max_worlds, self.max_objects, self.max_agents, self.min_agents) < 1:
            raise ValueError("bounds must be positive")
        if self.min_agents > self.max_agents:
            raise ValueError("min_agents exceeds max_agents")


@dataclass
class Countermodel:
    model: Model
    world: str
    valuation: dict

    def recheck(self, phi: Formula) -> bool:
        """True iff ``phi`` is false here according to the reference evaluator."""
        return not evaluate(phi, self.model, self.world, self.valuation)


@dataclass(frozen=True)
class Level:
    agents: int
    worlds: int
    objects: int
    access: np.ndarray


def levels(bounds: Bounds, properties=()) -> Iterator[Level]:
    """Frame stacks grouped by size, smallest worlds first, then agents, then objects.

    ``properties`` must hold of every agent's relation.
    """
    for w in range(1, bounds.max_worlds + 1):
        rels = relations_with(w, properties)
        for n in range(bounds.min_agents, bounds.max_agents + 1):
            access = frame_access([rels] * n)
            for d in range(1, bounds.max_objects + 1):
                yield Level(n, w, d, access)


def frames_to_levels(frames: Iterable[Frame]) -> list:
    groups = defaultdict(list)
    for fr in frames:
        n, w = fr.agent_count, len(fr.worlds)
        idx = {name: i for i, name in enumerate(fr.worlds)}
        acc = np.zeros((n, w, w), dtype=bool)
        for i, rel in enumerate(fr.access):
            for u, v in rel:
                acc[i, idx[u], idx[v]] = True
        groups[(n, w, len(fr.objects))].append(acc)
    return [Level(n, w, d, np.stack(accs)) for (n, w, d), accs in sorted(groups.items())]


def mentions_objects(phi: Formula) -> bool:
    """Does any object-sorted term or variable occur in ``phi``?"""
    if any(v.sort == Sort.OBJECT for v in all_vars(phi)):
        return True
    return any(s.sort == Sort.OBJECT for t in terms_of(phi) for s in subterms(t))


def _scan(phi: Formula, sig: Signature, lvls, max_models: int | None):
    """Yield ``(enumeration, start, batch, values, free)`` chunk by chunk."""
    symbols = relevant_symbols([phi], sig)
    objects_matter = mentions_objects(phi)
    total = 0
    for lv in lvls:
        if lv.objects > 1 and not objects_matter:
            continue
        en = enumerate_structures(sig, lv.access, lv.worlds, lv.objects, symbols)
        total += en.size
        if max_models is not None and total > max_models:
            raise CapExceeded(f"more than {max_models} structures needed (reached |W|={lv.worlds}, "
                              f"n={lv.agents}, |objects|={lv.objects})")
        step = chunk_size(all_vars(phi), lv.worlds, lv.agents, lv.objects)
        for start, batch in en.chunks(step):
            values, free = truth_table(phi, batch)
            yield en, start, batch, values, free


def frame_validity(phi: Formula, sig: Signature, level: Level) -> np.ndarray:
    """Per-frame validity of ``phi`` for every frame of ``level`` -> bool (F,)."""
    symbols = relevant_symbols([phi], sig)
    en = enumerate_structures(sig, level.access, level.worlds, level.objects, symbols)
    per = en.per_frame
    ok = np.ones(len(level.access), dtype=bool)
    step = chunk_size(all_vars(phi), level.worlds, level.agents, level.objects)
    step = max(per, step - step % per)
    for start, batch in en.chunks(step):
        values, _ = truth_table(phi, batch)
        flat = values.reshape(values.shape[0], -1).all(axis=1)
        f0 = start // per
        ok[f0:f0 + len(flat) // per] &= flat.reshape(-1, per).all(axis=1)
    return ok


def valid_on_frames(phi: Formula, frames: Iterable[Frame], sig: Signature,
                    max_models: int | None = DEFAULT_MAX_MODELS) -> bool:
    """Valid in every model over every frame in ``frames``."""
    for _, _, _, values, _ in _scan(phi, sig, frames_to_levels(frames), max_models):
        if not values.all():
            return False
    return True


def valid_on_class(phi: Formula, sig: Signature, bounds: Bounds = Bounds(), properties=()) -> bool:
    """Valid over every frame within ``bounds`` whose relations have ``properties``."""
    return find_countermodel(phi, sig, bounds, properties) is None


def find_countermodel(phi: Formula, sig: Signature, bounds: Bounds = Bounds(),
                      properties=()) -> Countermodel | None:
    """First (model, world, valuation) in enumeration order falsifying ``phi``.

    Returns None when the bounds are exhausted. The witness is re-verified
    with the reference evaluator before it is returned.
    """
    for en, start, batch, values, free in _scan(phi, sig, levels(bounds, properties), bounds.max_models):
        if values.all():
            continue
        flat = int(np.flatnonzero(~values.reshape(-1))[0])
        s, w, *var_idx = np.unravel_index(flat, values.shape)
        model = batch.model(int(s))
        valuation = {v: batch.element(v.sort, int(i)) for v, i in zip(free, var_idx)}
        cm = Countermodel(model, model.worlds[int(w)], valuation)
        if not cm.recheck(phi):
            raise AssertionError("batched and reference evaluators disagree on a countermodel")
        log.debug("countermodel at structure %d of level n=%d |W|=%d", start + s, batch.agents, batch.worlds)
        return cm
    return None


def semantic_consequence(gamma: Iterable[Formula], phi: Formula, sig: Signature,
                         bounds: Bounds = Bounds(), properties=(), frames=None) -> bool:
    """Wherever all of ``gamma`` hold (model, world, valuation), ``phi`` holds."""
    gamma = list(gamma)
    target = Implies(conjunction(gamma), phi) if gamma else phi
    if frames is not None:
        return valid_on_frames(target, frames, sig, bounds.max_models)
    return valid_on_class(target, sig, bounds, properties)
