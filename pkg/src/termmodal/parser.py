"""Concrete syntax: formulas, signatures, model files and proof files.

Formula grammar, loosest binding first::

    <->            left associative
    ->             right associative
    |              left associative
    &              left associative
    ~  K[t]  P[t]  forall x.  exists x.      prefix
    R(t, ...)   p   t1 = t2   t1 != t2   ( ... )

Identifiers are resolved against the signature, so variables and constants
are told apart by declaration. A binder or variable occurrence may carry an
explicit sort (``forall z:agent. ...``) when the name is not declared; the
renderer emits such annotations for minted variables so that output always
parses back to the same tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .semantics import Frame, Interpretation, Model, ModelError, agent_name
from .syntax import (
    And, App, Atom, Con, Eq, Exists, Forall, Iff, Implies, K, Neq, Not, Or, Poss, Signature,
    SignatureError, Sort, Var, check_well_formed, split_and,
)


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets ``[start, end)`` into the UTF-8 encoding of the input."""

    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan | None = None, section: str | None = None):
        where = f" at bytes {span.start}-{span.end}" if span else ""
        if section:
            where += f" in [{section}]"
        super().__init__(message + where)
        self.message = message
        self.span = span
        self.section = section


def _span(text: str, start: int, end: int) -> SourceSpan:
    b0 = len(text[:start].encode("utf-8"))
    return SourceSpan(b0, b0 + len(text[start:end].encode("utf-8")))


# --------------------------------------------------------------------------
# Lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><->|->|!=|[~&|=()\[\],.:¬→∧∨↔≠∀∃])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)

_UNICODE_OPS = {"¬": "~", "→": "->", "∧": "&", "∨": "|", "↔": "<->", "≠": "!=", "∀": "forall", "∃": "exists"}


@dataclass(frozen=True)
class Token:
    kind: str      # "op", "ident" or "eof"
    text: str
    start: int
    end: int


def tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", _span(text, pos, pos + 1))
        if m.lastgroup != "ws":
            value = _UNICODE_OPS.get(m.group(), m.group())
            kind = "ident" if value in ("forall", "exists") else m.lastgroup
            out.append(Token(kind, value, m.start(), m.end()))
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


# --------------------------------------------------------------------------
# Formula parser

class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.toks = tokenize(text)
        self.i = 0
        self.scope: list = []   # stack of bound Vars, innermost last

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        end = max(tok.end, tok.start + (1 if tok.start < len(self.text) else 0))
        return ParseError(message, _span(self.text, tok.start, end))

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "eof":
            found = repr(self.tok.text) if self.tok.kind != "eof" else "end of input"
            raise self.error(f"expected {text!r}, found {found}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            found = repr(self.tok.text) if self.tok.kind != "eof" else "end of input"
            raise self.error(f"expected an identifier, found {found}")
        tok = self.tok
        self.i += 1
        return tok

    # grammar
    def parse(self):
        phi = self.iff()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return phi

    def iff(self):
        left = self.implication()
        while self.accept("<->"):
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.accept("|"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.tok
        if self.accept("~"):
            return Not(self.unary())
        if tok.kind == "ident" and tok.text in ("K", "P") and self.peek().text == "[":
            self.i += 2
            index = self.term()
            self.expect("]")
            if index.sort != Sort.AGENT:
                raise ParseError(f"modal index not agent-referring: {index}",
                                 _span(self.text, tok.start, self.toks[self.i - 1].end))
            body = self.unary()
            return K(index, body) if tok.text == "K" else Poss(index, body)
        if tok.kind == "ident" and tok.text in ("forall", "exists"):
            self.i += 1
            binders = [self.binder()]
            while self.tok.kind == "ident":
                binders.append(self.binder())
            self.expect(".")
            self.scope.extend(binders)
            try:
                body = self.unary()
            finally:
                del self.scope[len(self.scope) - len(binders):]
            make = Forall if tok.text == "forall" else Exists
            for x in reversed(binders):
                body = make(x, body)
            return body
        return self.primary()

    def binder(self) -> Var:
        tok = self.ident()
        kind = self.sig.kind(tok.text)
        if kind not in (None, "variables"):
            raise self.error(f"{tok.text} is a declared {kind[:-1]}, not a variable", tok)
        if self.accept(":"):
            return Var(tok.text, self.sort())
        if tok.text in self.sig.variables:
            return self.sig.var(tok.text)
        raise self.error(f"undeclared variable {tok.text} (annotate its sort, e.g. {tok.text}:agent)", tok)

    def sort(self) -> Sort:
        tok = self.ident()
        try:
            return Sort.parse(tok.text)
        except ValueError:
            raise self.error(f"unknown sort {tok.text!r}", tok) from None

    def primary(self):
        tok = self.tok
        if self.accept("("):
            phi = self.iff()
            self.expect(")")
            return phi
        if tok.kind == "ident" and tok.text in self.sig.relations:
            self.i += 1
            arity = self.sig.relations[tok.text]
            args = ()
            if self.tok.text == "(":
                args = self.arguments()
            if len(args) != len(arity):
                raise ParseError(f"relation {tok.text} expects {len(arity)} arguments, got {len(args)}",
                                 _span(self.text, tok.start, self.toks[self.i - 1].end))
            for k, (arg, want) in enumerate(zip(args, arity)):
                if arg.sort != want:
                    raise ParseError(f"argument {k + 1} of {tok.text} must be {want}, got {arg} of sort "
                                     f"{arg.sort}", _span(self.text, tok.start, self.toks[self.i - 1].end))
            return Atom(tok.text, args)
        if tok.kind == "ident":
            left = self.term()
            if self.accept("="):
                return Eq(left, self.term())
            if self.accept("!="):
                return Neq(left, self.term())
            raise self.error(f"expected '=' or '!=' after term {left}")
        if tok.kind == "eof":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok.text!r}")

    def arguments(self) -> tuple:
        self.expect("(")
        args = []
        if not self.accept(")"):
            args.append(self.term())
            while self.accept(","):
                args.append(self.term())
            self.expect(")")
        return tuple(args)

    def _bound(self, name: str):
        for v in reversed(self.scope):
            if v.name == name:
                return v
        return None

    def term(self):
        tok = self.ident()
        name = tok.text
        bound = self._bound(name)
        if self.tok.text == ":" and self.peek().kind == "ident":
            self.i += 1
            sort = self.sort()
            if bound is not None:
                if bound.sort != sort:
                    raise self.error(f"{name} is bound with sort {bound.sort.value}, annotated {sort.value}", tok)
                return bound
            if self.sig.kind(name) not in (None, "variables"):
                raise self.error(f"{name} is a declared {self.sig.kind(name)[:-1]}, not a variable", tok)
            return Var(name, sort)
        if bound is not None:
            return bound
        kind = self.sig.kind(name)
        if kind == "variables":
            return self.sig.var(name)
        if kind == "constants":
            return self.sig.con(name)
        if kind == "functions":
            args = self.arguments()
            arity = self.sig.functions[name]
            if len(args) != len(arity) - 1:
                raise ParseError(f"function {name} expects {len(arity) - 1} arguments, got {len(args)}",
                                 _span(self.text, tok.start, self.toks[self.i - 1].end))
            for k, (arg, want) in enumerate(zip(args, arity)):
                if arg.sort != want:
                    raise ParseError(f"argument {k + 1} of {name} must be {want}, got {arg} of sort {arg.sort}",
                                     _span(self.text, tok.start, self.toks[self.i - 1].end))
            return App(name, args, arity[-1])
        if kind == "relations":
            raise self.error(f"relation {name} used as a term", tok)
        raise self.error(f"undeclared symbol {name}", tok)


def parse_formula(text: str, sig: Signature):
    """Parse ``text`` into a well-formed formula over ``sig``."""
    p = _Parser(text, sig)
    try:
        phi = p.parse()
    except RecursionError:
        raise ParseError("formula nested too deeply", _span(text, 0, len(text))) from None
    d = check_well_formed(phi, sig)
    if d:
        raise ParseError(str(d), _span(text, 0, len(text)))
    return phi


def parse_term(text: str, sig: Signature):
    p = _Parser(text, sig)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return t


# --------------------------------------------------------------------------
# Rendering

IFF, IMP, OR, AND, UNARY, ATOM = range(1, 7)


def render_term(t, sig: Signature | None = None, bound=frozenset()) -> str:
    if isinstance(t, Var):
        if t in bound or sig is None or sig.variables.get(t.name) == t.sort:
            return t.name
        return f"{t.name}:{t.sort}"
    if isinstance(t, Con):
        return t.name
    return f"{t.fn}({', '.join(render_term(a, sig, bound) for a in t.args)})"


def _wrap(s: str, level: int, need: int) -> str:
    return s if level >= need else f"({s})"


def _render(phi, sig, bound):
    """Return ``(text, precedence level)``."""
    if isinstance(phi, Eq):
        return f"{render_term(phi.left, sig, bound)} = {render_term(phi.right, sig, bound)}", ATOM
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.rel, ATOM
        return f"{phi.rel}({', '.join(render_term(a, sig, bound) for a in phi.args)})", ATOM
    if isinstance(phi, Not):
        body = phi.body
        if isinstance(body, Forall) and isinstance(body.body, Not):
            return _binder("exists", body.var, body.body.body, sig, bound)
        if isinstance(body, K) and isinstance(body.body, Not):
            return _prefix(f"P[{render_term(body.index, sig, bound)}]", body.body.body, sig, bound)
        if isinstance(body, Eq):
            return f"{render_term(body.left, sig, bound)} != {render_term(body.right, sig, bound)}", ATOM
        pair = split_and(phi)
        if pair:
            a, b = pair
            if (isinstance(a, Implies) and isinstance(b, Implies)
                    and a.ante == b.cons and a.cons == b.ante):
                left, ll = _render(a.ante, sig, bound)
                right, rl = _render(a.cons, sig, bound)
                return f"{_wrap(left, ll, IFF)} <-> {_wrap(right, rl, IFF + 1)}", IFF
            left, ll = _render(a, sig, bound)
            right, rl = _render(b, sig, bound)
            return f"{_wrap(left, ll, AND)} & {_wrap(right, rl, AND + 1)}", AND
        return _prefix("~", body, sig, bound, space=False)
    if isinstance(phi, Implies):
        if isinstance(phi.ante, Not):
            left, ll = _render(phi.ante.body, sig, bound)
            right, rl = _render(phi.cons, sig, bound)
            return f"{_wrap(left, ll, OR)} | {_wrap(right, rl, OR + 1)}", OR
        left, ll = _render(phi.ante, sig, bound)
        right, rl = _render(phi.cons, sig, bound)
        return f"{_wrap(left, ll, IMP + 1)} -> {_wrap(right, rl, IMP)}", IMP
    if isinstance(phi, Forall):
        return _binder("forall", phi.var, phi.body, sig, bound)
    if isinstance(phi, K):
        return _prefix(f"K[{render_term(phi.index, sig, bound)}]", phi.body, sig, bound)
    raise TypeError(f"cannot render {phi!r}")


def _is_equation(phi) -> bool:
    return isinstance(phi, Eq) or (isinstance(phi, Not) and isinstance(phi.body, Eq))


def _prefix(op, body, sig, bound, space=True):
    text, level = _render(body, sig, bound)
    text = _wrap(text, level, ATOM + 1 if _is_equation(body) else UNARY)
    sep = " " if space and not text.startswith("(") else ""
    return f"{op}{sep}{text}", UNARY


def _binder(word, var, body, sig, bound):
    annotated = sig is not None and sig.variables.get(var.name) != var.sort
    head = f"{word} {var.name}:{var.sort}." if annotated else f"{word} {var.name}."
    text, level = _render(body, sig, bound | {var})
    return f"{head} {_wrap(text, level, ATOM + 1 if _is_equation(body) else UNARY)}", UNARY


def render_formula(phi, sig: Signature | None = None) -> str:
    """Canonical text of ``phi``: sugar restored, minimal parentheses.

    With ``sig`` given, variables that the signature does not declare (or
    declares at another sort) are written with an explicit sort.
    """
    return _render(phi, sig, frozenset())[0]


# --------------------------------------------------------------------------
# Sectioned files

_SECTION = re.compile(r"^\s*\[([^\]]+)\]\s*(.*)$")


def _sections(text: str):
    """Split into ``(header, body, line number)`` triples; ``#`` starts a comment."""
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        m = _SECTION.match(line)
        if m:
            current = [m.group(1).strip(), [], lineno]
            sections.append(current)
            if m.group(2).strip():
                current[1].append(m.group(2).strip())
            continue
        if not line.strip():
            continue
        if current is None:
            raise ParseError(f"line {lineno}: content before the first [section]")
        current[1].append(line.strip())
    return [(h, "\n".join(body), ln) for h, body, ln in sections]


def _items(body: str) -> list:
    return [item.strip() for line in body.split("\n") for item in line.split(";") if item.strip()]


def _sort_list(text: str, section: str) -> tuple:
    try:
        return tuple(Sort.parse(s) for s in text.split())
    except ValueError as e:
        raise ParseError(str(e), section=section) from None


SIGNATURE_SECTIONS = ("sorts", "agents", "vars", "cons", "funs", "rels")


def _parse_signature_sections(sections) -> Signature:
    n = None
    variables, constants, functions, relations = {}, {}, {}, {}
    for header, body, _ in sections:
        if header == "sorts":
            words = set(body.split())
            if words - {"agent", "object", "agt", "obj", "fixed"}:
                raise ParseError(f"unknown sorts {sorted(words)}", section=header)
        elif header == "agents":
            m = re.fullmatch(r"\s*n\s*=\s*(\d+)\s*", body)
            if not m:
                raise ParseError("expected 'n=<int>'", section=header)
            n = int(m.group(1))
        elif header in ("vars", "cons"):
            target = variables if header == "vars" else constants
            for item in body.replace(";", " ").split():
                name, _, sort = item.partition(":")
                if not sort:
                    raise ParseError(f"expected name:sort, got {item!r}", section=header)
                if name in target:
                    raise ParseError(f"{name} declared twice", section=header)
                try:
                    target[name] = Sort.parse(sort)
                except ValueError as e:
                    raise ParseError(str(e), section=header) from None
        elif header == "funs":
            for item in _items(body):
                name, colon, rest = item.partition(":")
                ins, arrow, out = rest.partition("->")
                if not colon or not arrow:
                    raise ParseError(f"expected 'f: <sorts> -> <sort>', got {item!r}", section=header)
                result = _sort_list(out, header)
                if len(result) != 1:
                    raise ParseError(f"function {name.strip()} needs exactly one result sort", section=header)
                functions[name.strip()] = _sort_list(ins, header) + result
        elif header == "rels":
            for item in _items(body):
                name, colon, rest = item.partition(":")
                if not colon:
                    raise ParseError(f"expected 'R: <sorts>', got {item!r}", section=header)
                relations[name.strip()] = _sort_list(rest, header)
    if n is None:
        raise ParseError("missing [agents] section")
    try:
        return Signature(n, variables, constants, functions, relations)
    except SignatureError as e:
        raise ParseError(str(e), section="signature") from None


def parse_signature(text: str) -> Signature:
    return _parse_signature_sections([s for s in _sections(text) if s[0] in SIGNATURE_SECTIONS])


_ELEMENT = r"[^\s,(){}=;]+"


def _parse_set(text: str, arity: int, section: str) -> frozenset:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"expected a set in braces, got {text!r}", section=section)
    inner = text[1:-1].strip()
    if not inner:
        return frozenset()
    if "(" in inner:
        tuples = re.findall(r"\(([^()]*)\)", inner)
        leftover = re.sub(r"\(([^()]*)\)", "", inner).replace(",", "").strip()
        if leftover:
            raise ParseError(f"malformed tuple set {text!r}", section=section)
        out = {tuple(x.strip() for x in t.split(",")) if t.strip() else () for t in tuples}
    else:
        out = {(x.strip(),) for x in inner.split(",")}
    for t in out:
        if len(t) != arity:
            raise ParseError(f"tuple {t} has {len(t)} entries, expected {arity}", section=section)
    return frozenset(out)


def parse_model(text: str):
    """Parse a model file into ``(Signature, Model)``."""
    sections = _sections(text)
    sig = _parse_signature_sections([s for s in sections if s[0] in SIGNATURE_SECTIONS])
    worlds = objects = None
    access = [set() for _ in range(sig.agent_count)]
    interps = {}
    for header, body, _ in sections:
        if header in SIGNATURE_SECTIONS:
            continue
        if header == "worlds":
            worlds = body.split()
        elif header == "dom":
            for item in _items(body):
                key, _, rest = item.partition(":")
                key = key.strip()
                if key == "objects":
                    objects = rest.split()
                elif key.startswith("agents"):
                    listed = rest.split() if rest else []
                    if listed and listed != [agent_name(i) for i in range(sig.agent_count)]:
                        raise ParseError(f"agents must be α1..α{sig.agent_count}", section=header)
                else:
                    raise ParseError(f"unknown domain entry {item!r}", section=header)
        elif header == "acc":
            for line in body.split("\n"):
                who, colon, pairs = line.partition(":")
                who = who.strip()
                names = [agent_name(i) for i in range(sig.agent_count)]
                if not colon or who not in names:
                    raise ParseError(f"expected '<agent>: u->v ...' with agent among {names}, got {line!r}",
                                     section=header)
                for pair in pairs.split():
                    u, arrow, v = pair.partition("->")
                    if not arrow or not u or not v:
                        raise ParseError(f"malformed edge {pair!r}", section=header)
                    access[names.index(who)].add((u, v))
        elif header.startswith("interp"):
            parts = header.split()
            if len(parts) != 2:
                raise ParseError("expected [interp <world>]", section=header)
            if parts[1] in interps:
                raise ParseError(f"world {parts[1]} interpreted twice", section=header)
            interps[parts[1]] = body
        else:
            raise ParseError(f"unknown section [{header}]")
    if worlds is None:
        raise ParseError("missing [worlds] section")
    if objects is None:
        raise ParseError("missing objects in [dom] section")
    try:
        frame = Frame(worlds, access, objects)
    except ModelError as e:
        raise ParseError(str(e), section="acc") from None
    cons = {name: {} for name in sig.constants}
    rels = {name: {} for name in sig.relations}
    funs = {name: {w: {} for w in worlds} for name in sig.functions}
    for w, body in interps.items():
        section = f"interp {w}"
        if w not in frame.world_set:
            raise ParseError(f"unknown world {w}", section=section)
        for item in _items(body):
            lhs, eq, rhs = item.partition("=")
            lhs, rhs = lhs.strip(), rhs.strip()
            if not eq:
                raise ParseError(f"expected 'symbol=value', got {item!r}", section=section)
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)\s*\((.*)\)", lhs)
            if m:
                name = m.group(1)
                if name not in sig.functions:
                    raise ParseError(f"{name} is not a declared function", section=section)
                args = tuple(x.strip() for x in m.group(2).split(",")) if m.group(2).strip() else ()
                funs[name][w][args] = rhs
            elif lhs in sig.constants:
                cons[lhs][w] = rhs
            elif lhs in sig.relations:
                arity = len(sig.relations[lhs])
                if arity == 0:
                    if rhs not in ("true", "false"):
                        raise ParseError(f"{lhs} must be true or false", section=section)
                    rels[lhs][w] = frozenset({()}) if rhs == "true" else frozenset()
                else:
                    rels[lhs][w] = _parse_set(rhs, arity, section)
            else:
                raise ParseError(f"{lhs} is not a declared constant, relation or function", section=section)
    for name in sig.relations:
        for w in worlds:
            if w not in rels[name] and sig.relations[name]:
                rels[name][w] = frozenset()
    try:
        model = Model(sig, frame, Interpretation(cons, rels, funs))
    except ModelError as e:
        raise ParseError(str(e), section="interp") from None
    return sig, model


def render_signature(sig: Signature) -> str:
    lines = ["[sorts] agent object", f"[agents] n={sig.agent_count}"]
    if sig.variables:
        lines.append("[vars] " + " ".join(f"{k}:{v}" for k, v in sig.variables.items()))
    if sig.constants:
        lines.append("[cons] " + " ".join(f"{k}:{v}" for k, v in sig.constants.items()))
    if sig.functions:
        lines.append("[funs] " + " ; ".join(
            f"{k}: {' '.join(map(str, a[:-1]))}{' ' if len(a) > 1 else ''}-> {a[-1]}"
            for k, a in sig.functions.items()))
    if sig.relations:
        lines.append("[rels] " + " ; ".join(
            f"{k}: {' '.join(map(str, a))}".rstrip() for k, a in sig.relations.items()))
    return "\n".join(lines)


def render_model(model: Model) -> str:
    sig, frame, interp = model.signature, model.frame, model.interp
    order = {d: i for i, d in enumerate(frame.agents + frame.objects)}
    wpos = {w: i for i, w in enumerate(frame.worlds)}
    lines = [render_signature(sig), "[worlds] " + " ".join(frame.worlds),
             "[dom] objects: " + " ".join(frame.objects), "[acc]"]
    for i, rel in enumerate(frame.access):
        edges = sorted(rel, key=lambda p: (wpos[p[0]], wpos[p[1]]))
        lines.append(f"{agent_name(i)}: {' '.join(f'{u}->{v}' for u, v in edges)}".rstrip())
    for w in frame.worlds:
        entries = []
        for name in sig.constants:
            entries.append(f"{name}={interp.constants[name][w]}")
        for name, arity in sig.relations.items():
            ext = interp.relations[name][w]
            if not arity:
                entries.append(f"{name}={'true' if ext else 'false'}")
            else:
                tuples = sorted(ext, key=lambda t: [order[d] for d in t])
                if len(arity) == 1:
                    inner = ", ".join(t[0] for t in tuples)
                else:
                    inner = ", ".join(f"({', '.join(t)})" for t in tuples)
                entries.append(f"{name}={{{inner}}}")
        for name in sig.functions:
            graph = interp.functions[name][w]
            for args in sorted(graph, key=lambda t: [order[d] for d in t]):
                entries.append(f"{name}({', '.join(args)})={graph[args]}")
        lines.append(f"[interp {w}]")
        lines.extend(entries)
    return "\n".join(lines) + "\n"


def render(x, sig: Signature | None = None) -> str:
    """Canonical text for a formula, term, signature, model or proof."""
    from .proof import Proof, render_proof

    if isinstance(x, Model):
        return render_model(x)
    if isinstance(x, Signature):
        return render_signature(x)
    if isinstance(x, Proof):
        return render_proof(x, sig)
    if isinstance(x, (Var, Con, App)):
        return render_term(x, sig)
    return render_formula(x, sig)
