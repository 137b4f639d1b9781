"""Hilbert-style proof kernel: axiom recognizers, rule checkers, certificates.

A proof is a list of lines, each a formula with a justification. The kernel
only checks; it never searches for proofs.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass

import numpy as np

from .syntax import (
    And, App, Atom, Con, Eq, Exists, Forall, Formula, Implies, K, Neq, Not, Signature, Sort, Term,
    Var, alpha_equivalent, check_well_formed, conjunction, disjunction, free_for, free_vars,
    split_and, substitute, term_vars,
)

MAX_LETTERS = 20
EXTENSIONS = ("T", "4", "5")


class ProofError(ValueError):
    pass


class TooManyLetters(ProofError):
    pass


class Rule(enum.Enum):
    PC = "PC"
    FORALL = "FORALL"
    ID = "ID"
    MSD = "MSD"
    PS = "PS"
    EXID = "EXID"
    N = "N"
    K = "K"
    BF = "BF"
    KNI = "KNI"
    T = "T"
    FOUR = "4"
    FIVE = "5"
    MP = "MP"
    KG = "KG"
    GEN = "GEN"

    @property
    def is_axiom(self) -> bool:
        return self not in (Rule.MP, Rule.KG, Rule.GEN)


AXIOMS = tuple(r for r in Rule if r.is_axiom)


@dataclass(frozen=True)
class LogicConfig:
    """Agent count plus the enabled extension axioms (any of T, 4, 5)."""

    agent_count: int = 2
    extensions: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "extensions", frozenset(str(e) for e in self.extensions))
        if self.agent_count < 1:
            raise ValueError("agent_count must be at least 1")
        unknown = self.extensions - set(EXTENSIONS)
        if unknown:
            raise ValueError(f"unknown extensions {sorted(unknown)}; choose from T, 4, 5")


@dataclass(frozen=True)
class Justification:
    rule: Rule
    refs: tuple = ()          # 1-based line numbers
    term: Term | None = None  # KG index or GEN variable

    def render(self, sig: Signature | None = None) -> str:
        from .parser import render_term

        parts = [self.rule.value, *map(str, self.refs)]
        if self.rule == Rule.KG:
            parts.append(f"[{render_term(self.term, sig)}]")
        elif self.rule == Rule.GEN:
            parts.append(render_term(self.term, sig))
        return " ".join(parts)

    def __str__(self):
        return self.render()


def axiom(tag) -> Justification:
    return Justification(Rule(tag))


def mp(i: int, j: int) -> Justification:
    """Line ``i`` is the premise, line ``j`` the implication."""
    return Justification(Rule.MP, (i, j))


def kg(i: int, t: Term) -> Justification:
    return Justification(Rule.KG, (i,), t)


def gen(i: int, x: Var) -> Justification:
    return Justification(Rule.GEN, (i,), x)


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Proof:
    lines: tuple

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))

    def __len__(self):
        return len(self.lines)

    @property
    def theorem(self) -> Formula:
        return self.lines[-1].formula

    @property
    def formulas(self) -> list:
        return [ln.formula for ln in self.lines]


@dataclass(frozen=True)
class Verdict:
    ok: bool
    theorem: Formula | None = None
    line: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


# --------------------------------------------------------------------------
# Propositional tautologies

def _abstract(phi, letters: dict):
    if isinstance(phi, Not):
        return ("not", _abstract(phi.body, letters))
    if isinstance(phi, Implies):
        return ("imp", _abstract(phi.ante, letters), _abstract(phi.cons, letters))
    return ("var", letters.setdefault(phi, len(letters)))


def _table(node, cols):
    tag = node[0]
    if tag == "var":
        return cols[node[1]]
    if tag == "not":
        return ~_table(node[1], cols)
    return ~_table(node[1], cols) | _table(node[2], cols)


def is_propositional_tautology_instance(phi: Formula) -> bool:
    """Tautology after replacing maximal non-Boolean subformulas by letters.

    Atoms, equalities, quantified and modal subformulas become letters;
    syntactically identical ones share a letter.
    """
    letters: dict = {}
    shape = _abstract(phi, letters)
    n = len(letters)
    if n > MAX_LETTERS:
        raise TooManyLetters(f"{n} propositional letters exceed the cap of {MAX_LETTERS}")
    rows = np.arange(1 << n, dtype=np.uint32)
    cols = [((rows >> k) & 1).astype(bool) for k in range(n)]
    result = _table(shape, cols)
    return bool(np.all(result))


# --------------------------------------------------------------------------
# Axiom schemas

def axiom_n(n: int, x_names=None, y_name: str = "y") -> Formula:
    """Canonical exact-cardinality sentence for ``n`` agents.

    ``exists x1..xn (x1 != x2 & x1 != x3 & ... & forall y (y = x1 | ... | y = xn))``
    with the distinctness conjuncts over all pairs i<j in lexicographic order.
    """
    names = x_names or [f"x{i}" for i in range(1, n + 1)]
    xs = [Var(name, Sort.AGENT) for name in names]
    y = Var(y_name, Sort.AGENT)
    cover = Forall(y, disjunction([Eq(y, x) for x in xs]))
    distinct = [Neq(a, b) for a, b in itertools.combinations(xs, 2)]
    body = conjunction(distinct + [cover]) if distinct else cover
    for x in reversed(xs):
        body = Exists(x, body)
    return body


def _as_neq(phi):
    if isinstance(phi, Not) and isinstance(phi.body, Eq):
        return phi.body.left, phi.body.right
    return None


def _ps_match(a, b, x: Var, y: Var, bound=frozenset()) -> bool:
    """``b`` is ``a`` with some free occurrences of ``x`` replaced by ``y``."""
    if type(a) is not type(b):
        return False

    def term(s, t):
        if s == t:
            return True
        if isinstance(s, Var):
            return s == x and t == y and x not in bound and y not in bound
        if isinstance(s, App) and isinstance(t, App):
            return s.fn == t.fn and len(s.args) == len(t.args) and all(map(term, s.args, t.args))
        return False

    if isinstance(a, Eq):
        return term(a.left, b.left) and term(a.right, b.right)
    if isinstance(a, Atom):
        return a.rel == b.rel and len(a.args) == len(b.args) and all(map(term, a.args, b.args))
    if isinstance(a, Not):
        return _ps_match(a.body, b.body, x, y, bound)
    if isinstance(a, Implies):
        return _ps_match(a.ante, b.ante, x, y, bound) and _ps_match(a.cons, b.cons, x, y, bound)
    if isinstance(a, K):
        return term(a.index, b.index) and _ps_match(a.body, b.body, x, y, bound)
    if isinstance(a, Forall):
        return a.var == b.var and _ps_match(a.body, b.body, x, y, bound | {a.var})
    return False


def _match_forall(phi) -> bool:
    if not (isinstance(phi, Implies) and isinstance(phi.ante, Forall)):
        return False
    x, body, target = phi.ante.var, phi.ante.body, phi.cons
    if x not in free_vars(body):
        return body == target
    candidates = {v for v in free_vars(target) if v.sort == x.sort} | {x}
    return any(free_for(y, x, body) and substitute(body, y, x) == target for y in candidates)


def _match_ps(phi) -> bool:
    if not (isinstance(phi, Implies) and isinstance(phi.ante, Eq) and isinstance(phi.cons, Implies)):
        return False
    x, y = phi.ante.left, phi.ante.right
    if not (isinstance(x, Var) and isinstance(y, Var)) or x.sort != y.sort:
        return False
    return _ps_match(phi.cons.ante, phi.cons.cons, x, y)


def _match_exid(phi) -> bool:
    if not (isinstance(phi, Implies) and isinstance(phi.ante, Eq)):
        return False
    c = phi.ante.left
    if not isinstance(c, Con) or phi.ante.right != c:
        return False
    cons = phi.cons
    if not (isinstance(cons, Not) and isinstance(cons.body, Forall) and isinstance(cons.body.body, Not)):
        return False
    x = cons.body.var
    return x.sort == c.sort and cons.body.body.body == Eq(x, c)


def _match_k(phi) -> bool:
    if not (isinstance(phi, Implies) and isinstance(phi.ante, K) and isinstance(phi.cons, Implies)):
        return False
    t, inner = phi.ante.index, phi.ante.body
    left, right = phi.cons.ante, phi.cons.cons
    return (isinstance(inner, Implies) and left == K(t, inner.ante) and right == K(t, inner.cons))


def _match_bf(phi) -> bool:
    if not (isinstance(phi, Implies) and isinstance(phi.ante, Forall) and isinstance(phi.cons, K)):
        return False
    x, kt = phi.ante.var, phi.ante.body
    if not isinstance(kt, K) or x in term_vars(kt.index):
        return False
    return phi.cons == K(kt.index, Forall(x, kt.body))


def _match_kni(phi) -> bool:
    if not (isinstance(phi, Implies) and isinstance(phi.cons, K)):
        return False
    pair = _as_neq(phi.ante)
    return (pair is not None and all(isinstance(v, Var) for v in pair)
            and phi.cons.index.sort == Sort.AGENT and phi.cons.body == phi.ante)


def _match_msd(phi) -> bool:
    pair = _as_neq(phi)
    if pair is None or not all(isinstance(v, Var) for v in pair):
        return False
    return {pair[0].sort, pair[1].sort} == {Sort.AGENT, Sort.OBJECT}


def _agent_forall(phi):
    if isinstance(phi, Forall) and phi.var.sort == Sort.AGENT and isinstance(phi.body, Implies):
        return phi.var, phi.body.ante, phi.body.cons
    return None


def _match_t(phi) -> bool:
    m = _agent_forall(phi)
    if not m:
        return False
    x, ante, cons = m
    return isinstance(ante, K) and ante.index == x and ante.body == cons


def _match_4(phi) -> bool:
    m = _agent_forall(phi)
    if not m:
        return False
    x, ante, cons = m
    return isinstance(ante, K) and ante.index == x and cons == K(x, ante)


def _match_5(phi) -> bool:
    m = _agent_forall(phi)
    if not m:
        return False
    x, ante, cons = m
    poss = ante if isinstance(ante, Not) and isinstance(ante.body, K) and isinstance(ante.body.body, Not) else None
    return poss is not None and poss.body.index == x and cons == K(x, poss)


def match_axiom(phi: Formula, which, cfg: LogicConfig) -> bool:
    """Is ``phi`` an instance of the schema tagged ``which``?"""
    rule = which if isinstance(which, Rule) else Rule(str(which).upper())
    if not rule.is_axiom:
        raise ValueError(f"{rule.value} is a rule, not an axiom")
    if rule == Rule.PC:
        try:
            return is_propositional_tautology_instance(phi)
        except TooManyLetters:
            return False
    if rule == Rule.FORALL:
        return _match_forall(phi)
    if rule == Rule.ID:
        return isinstance(phi, Eq) and phi.left == phi.right
    if rule == Rule.MSD:
        return _match_msd(phi)
    if rule == Rule.PS:
        return _match_ps(phi)
    if rule == Rule.EXID:
        return _match_exid(phi)
    if rule == Rule.N:
        return alpha_equivalent(phi, axiom_n(cfg.agent_count))
    if rule == Rule.K:
        return _match_k(phi)
    if rule == Rule.BF:
        return _match_bf(phi)
    if rule == Rule.KNI:
        return _match_kni(phi)
    if rule.value not in cfg.extensions:
        return False
    return {Rule.T: _match_t, Rule.FOUR: _match_4, Rule.FIVE: _match_5}[rule](phi)


# --------------------------------------------------------------------------
# Rules and proofs

def check_rule(line: Formula, j: Justification, earlier) -> Verdict:
    """Check an MP, KG or GEN step against the formulas before it."""
    earlier = list(earlier)
    for r in j.refs:
        if not 1 <= r <= len(earlier):
            return Verdict(False, reason=f"reference {r} does not point to an earlier line")
    if j.rule == Rule.MP:
        if len(j.refs) != 2:
            return Verdict(False, reason="MP needs two line references")
        premise, implication = earlier[j.refs[0] - 1], earlier[j.refs[1] - 1]
        if implication != Implies(premise, line):
            return Verdict(False, reason=f"line {j.refs[1]} is not line {j.refs[0]} -> this line")
        return Verdict(True, line)
    if j.rule == Rule.KG:
        if len(j.refs) != 1 or j.term is None:
            return Verdict(False, reason="KG needs one line reference and an index term")
        if j.term.sort != Sort.AGENT:
            return Verdict(False, reason=f"KG index {j.term} is not agent-referring")
        if line != K(j.term, earlier[j.refs[0] - 1]):
            return Verdict(False, reason=f"line is not K[{j.term}] applied to line {j.refs[0]}")
        return Verdict(True, line)
    if j.rule == Rule.GEN:
        if len(j.refs) != 1 or not isinstance(j.term, Var):
            return Verdict(False, reason="GEN needs one line reference and a variable")
        x, prem = j.term, earlier[j.refs[0] - 1]
        if not isinstance(prem, Implies):
            return Verdict(False, reason=f"line {j.refs[0]} is not an implication")
        if line != Implies(prem.ante, Forall(x, prem.cons)):
            return Verdict(False, reason=f"line does not generalize line {j.refs[0]} over {x}")
        if x in free_vars(prem.ante):
            return Verdict(False, reason=f"{x} free in antecedent")
        return Verdict(True, line)
    raise ValueError(f"{j.rule.value} is an axiom tag, not a rule")


def check_proof(pf: Proof, cfg: LogicConfig, sig: Signature | None = None) -> Verdict:
    """Verify every line; on success the theorem is the last formula."""
    if not pf.lines:
        return Verdict(False, reason="empty proof")
    if sig is not None and sig.agent_count != cfg.agent_count:
        return Verdict(False, reason=f"signature has {sig.agent_count} agents, logic expects {cfg.agent_count}")
    earlier = []
    for k, ln in enumerate(pf.lines, 1):
        if sig is not None:
            d = check_well_formed(ln.formula, sig)
            if d:
                return Verdict(False, line=k, reason=f"line {k}: {d}")
        if any(r >= k or r < 1 for r in ln.just.refs):
            return Verdict(False, line=k, reason=f"line {k}: references must point to earlier lines")
        if ln.just.rule.is_axiom:
            if ln.just.rule.value in EXTENSIONS and ln.just.rule.value not in cfg.extensions:
                return Verdict(False, line=k, reason=f"line {k}: axiom {ln.just.rule.value} not enabled")
            try:
                ok = (is_propositional_tautology_instance(ln.formula) if ln.just.rule == Rule.PC
                      else match_axiom(ln.formula, ln.just.rule, cfg))
            except TooManyLetters as e:
                return Verdict(False, line=k, reason=f"line {k}: {e}")
            if not ok:
                return Verdict(False, line=k, reason=f"line {k}: not an instance of {ln.just.rule.value}")
        else:
            v = check_rule(ln.formula, ln.just, earlier)
            if not v:
                return Verdict(False, line=k, reason=f"line {k}: {v.reason}")
        earlier.append(ln.formula)
    return Verdict(True, pf.theorem)


def _conj_leaves_in(phi, gamma) -> bool:
    if phi in gamma:
        return True
    pair = split_and(phi)
    return pair is not None and all(_conj_leaves_in(p, gamma) for p in pair)


def deducible(gamma, phi: Formula, pf: Proof, cfg: LogicConfig, sig: Signature | None = None) -> Verdict:
    """Check a certificate that ``phi`` follows from finitely many members of ``gamma``.

    The proved theorem must be ``phi`` itself, ``A -> phi`` with ``A`` a
    conjunction whose leaves all lie in ``gamma``, or ``tau -> phi`` with
    ``tau`` a propositional tautology (the empty conjunction).
    """
    gamma = set(gamma)
    v = check_proof(pf, cfg, sig)
    if not v:
        return v
    thm = v.theorem
    if thm == phi:
        return v
    if not isinstance(thm, Implies) or thm.cons != phi:
        return Verdict(False, thm, reason="theorem is not of the form A -> phi")
    if _conj_leaves_in(thm.ante, gamma):
        return v
    try:
        if is_propositional_tautology_instance(thm.ante):
            return v
    except TooManyLetters:
        pass
    return Verdict(False, thm, reason="antecedent is not a conjunction of members of the premise set")


def check_consistency_certificate(gamma, psi: Formula, pf: Proof | None, cfg: LogicConfig,
                                  sig: Signature | None = None) -> Verdict:
    """Confirm inconsistency of ``gamma`` via a deduction of ``psi & ~psi``.

    A failed check means "no verdict", never "consistent".
    """
    if pf is None:
        return Verdict(False, reason="no verdict: no certificate supplied")
    v = deducible(gamma, And(psi, Not(psi)), pf, cfg, sig)
    if not v:
        return Verdict(False, v.theorem, v.line, f"no verdict: {v.reason}")
    return v


# --------------------------------------------------------------------------
# Proof files

_LINE = re.compile(r"^\s*(\d+)\s*\.\s*(.*?)\s*;\s*([^;]*?)\s*$")


def parse_justification(text: str, sig: Signature) -> Justification:
    from .parser import ParseError, parse_term

    words = text.split()
    if not words:
        raise ParseError("missing justification")
    tag = words[0].upper()
    try:
        rule = Rule(tag)
    except ValueError:
        raise ParseError(f"unknown justification {words[0]!r}") from None
    rest = words[1:]

    def ref(word):
        if not word.isdigit():
            raise ParseError(f"expected a line number, got {word!r}")
        return int(word)

    if rule.is_axiom:
        if rest:
            raise ParseError(f"axiom tag {tag} takes no arguments")
        return Justification(rule)
    if rule == Rule.MP:
        if len(rest) != 2:
            raise ParseError("MP takes two line numbers")
        return mp(ref(rest[0]), ref(rest[1]))
    if len(rest) < 2:
        raise ParseError(f"{tag} takes a line number and a {'term' if rule == Rule.KG else 'variable'}")
    i = ref(rest[0])
    arg = " ".join(rest[1:]).strip()
    if arg.startswith("[") and arg.endswith("]"):
        arg = arg[1:-1]
    t = parse_term(arg, sig)
    if rule == Rule.GEN and not isinstance(t, Var):
        raise ParseError(f"GEN needs a variable, got {arg!r}")
    return Justification(rule, (i,), t)


def parse_proof(text: str, sig: Signature) -> Proof:
    """Parse ``<idx>. <formula> ; <justification>`` lines (``#`` comments)."""
    from .parser import ParseError, parse_formula

    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if not m:
            raise ParseError(f"proof line {lineno}: expected '<idx>. <formula> ; <justification>'")
        idx = int(m.group(1))
        if idx != len(lines) + 1:
            raise ParseError(f"proof line {lineno}: expected index {len(lines) + 1}, got {idx}")
        try:
            phi = parse_formula(m.group(2), sig)
            just = parse_justification(m.group(3), sig)
        except ParseError as e:
            raise ParseError(f"proof line {lineno}: {e}") from None
        lines.append(ProofLine(phi, just))
    return Proof(lines)


def parse_proof_file(text: str):
    """Parse signature sections plus a ``[proof]`` section -> ``(Signature, Proof)``."""
    from .parser import SIGNATURE_SECTIONS, ParseError, _parse_signature_sections, _sections

    sections = _sections(text)
    sig = _parse_signature_sections([s for s in sections if s[0] in SIGNATURE_SECTIONS])
    bodies = [body for header, body, _ in sections if header == "proof"]
    unknown = [h for h, _, _ in sections if h not in SIGNATURE_SECTIONS and h != "proof"]
    if unknown:
        raise ParseError(f"unknown section [{unknown[0]}]")
    if len(bodies) != 1:
        raise ParseError("expected exactly one [proof] section")
    return sig, parse_proof(bodies[0], sig)


def render_proof(pf: Proof, sig: Signature | None = None) -> str:
    from .parser import render_formula

    return "\n".join(f"{k}. {render_formula(ln.formula, sig)} ; {ln.just.render(sig)}"
                     for k, ln in enumerate(pf.lines, 1)) + "\n"


def render_proof_file(pf: Proof, sig: Signature) -> str:
    from .parser import render_signature

    return render_signature(sig) + "\n[proof]\n" + render_proof(pf, sig)
