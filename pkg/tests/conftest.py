import random

import pytest
from hypothesis import strategies as st

from termmodal.generate import random_model
from termmodal.syntax import (
    And, App, Atom, Con, Eq, Exists, Forall, Iff, Implies, K, Not, Or, Poss, Signature, Sort, Var,
)

AGT, OBJ = Sort.AGENT, Sort.OBJECT

SIG = Signature(
    2,
    {"x": AGT, "y": AGT, "z": AGT, "u": OBJ, "v": OBJ},
    {"a": AGT, "c": OBJ},
    {"f": (AGT, OBJ), "m": (OBJ, AGT)},
    {"p": (), "q": (), "P": (OBJ,), "R": (AGT, OBJ)},
)

x, y, z = (Var(n, AGT) for n in "xyz")
u, v = Var("u", OBJ), Var("v", OBJ)
a, c = Con("a", AGT), Con("c", OBJ)
p, q = Atom("p"), Atom("q")


def P(t):
    return Atom("P", (t,))


def f(t):
    return App("f", (t,), OBJ)


def m(t):
    return App("m", (t,), AGT)


# --------------------------------------------------------------------------
# Hypothesis strategies over SIG

_base = {AGT: st.sampled_from([x, y, z, a]), OBJ: st.sampled_from([u, v, c])}


def terms(sort, depth=2):
    if depth == 0:
        return _base[sort]
    other = terms(OBJ if sort == AGT else AGT, depth - 1)
    wrap = (lambda t: App("m", (t,), AGT)) if sort == AGT else (lambda t: App("f", (t,), OBJ))
    return st.one_of(_base[sort], _base[sort], other.map(wrap))


sorts = st.sampled_from([AGT, OBJ])
variables = st.sampled_from([x, y, z, u, v])

atoms = st.one_of(
    st.sampled_from([p, q]),
    terms(OBJ).map(P),
    st.tuples(terms(AGT), terms(OBJ)).map(lambda ts: Atom("R", ts)),
    sorts.flatmap(lambda s: st.tuples(terms(s), terms(s)).map(lambda ts: Eq(*ts))),
    st.tuples(terms(AGT), terms(OBJ)).map(lambda ts: Eq(*ts)),
)


def _extend(children):
    return st.one_of(
        children.map(Not),
        st.tuples(children, children).map(lambda ab: Implies(*ab)),
        st.tuples(children, children).map(lambda ab: And(*ab)),
        st.tuples(children, children).map(lambda ab: Or(*ab)),
        st.tuples(children, children).map(lambda ab: Iff(*ab)),
        st.tuples(variables, children).map(lambda vb: Forall(*vb)),
        st.tuples(variables, children).map(lambda vb: Exists(*vb)),
        st.tuples(terms(AGT, 1), children).map(lambda tb: K(*tb)),
        st.tuples(terms(AGT, 1), children).map(lambda tb: Poss(*tb)),
    )


formulas = st.recursive(atoms, _extend, max_leaves=8)

# the primitive fragment only, for properties about the core grammar
small_formulas = st.recursive(
    atoms,
    lambda ch: st.one_of(
        ch.map(Not),
        st.tuples(ch, ch).map(lambda ab: Implies(*ab)),
        st.tuples(variables, ch).map(lambda vb: Forall(*vb)),
        st.tuples(terms(AGT, 1), ch).map(lambda tb: K(*tb)),
    ),
    max_leaves=5,
)


@st.composite
def models(draw, sig=SIG, max_worlds=3, max_objects=2):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_model(sig, random.Random(seed), max_worlds, max_objects)


@pytest.fixture
def sig():
    return SIG


# --------------------------------------------------------------------------
# Acceptance summary: one line per criterion, printed after the run

ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
