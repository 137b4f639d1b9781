"""Command-line interface.

Exit status: 0 holds / proved / exhausted, 1 fails / countermodel found /
violators, 2 usage or parse error, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .batch import CapExceeded
from .frames import FAULTY_PROPERTY, PROPERTIES, correspondence_sweep, knowing_who_sweep
from .parser import ParseError, parse_formula, parse_model, parse_signature, parse_term, render
from .proof import EXTENSIONS, LogicConfig, check_proof, parse_proof_file
from .search import DEFAULT_MAX_MODELS, Bounds, find_countermodel
from .semantics import EvaluationError, ModelError, evaluate, valid_at_world, valid_in_model, valuations
from .syntax import Signature, SignatureError, Sort, SyntaxError_, free_vars

OK, FAIL, USAGE, CAP = 0, 1, 2, 3

DESK_SIGNATURE = Signature(
    2,
    {"x": Sort.AGENT, "y": Sort.AGENT, "z": Sort.AGENT, "u": Sort.OBJECT, "v": Sort.OBJECT},
    {"a": Sort.AGENT, "c": Sort.OBJECT},
    {},
    {"p": (), "q": (), "P": (Sort.OBJECT,)},
)


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _formula_text(arg: str) -> str:
    return _read(arg[1:]).strip() if arg.startswith("@") else arg


def _signature(args) -> Signature:
    if getattr(args, "signature", None):
        return parse_signature(_read(args.signature))
    return DESK_SIGNATURE


def _bounds(args, **defaults) -> Bounds:
    values = {k: getattr(args, k) for k in ("max_worlds", "max_objects", "max_agents", "min_agents", "max_models")}
    values = {k: v if v is not None else defaults.get(k) for k, v in values.items()}
    try:
        return Bounds(**{k: v for k, v in values.items() if v is not None})
    except ValueError as e:
        raise UsageError(str(e)) from None


def _print_lines(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --------------------------------------------------------------------------
# Subcommands

def cmd_eval(args) -> int:
    sig, model = parse_model(_read(args.model))
    phi = parse_formula(_formula_text(args.formula), sig)
    binding = {}
    frees = {v.name: v for v in free_vars(phi)}
    for item in args.bind or []:
        name, eq, value = item.partition("=")
        if not eq or name not in frees:
            raise UsageError(f"--bind {item!r}: expected <free variable>=<element>")
        var = frees[name]
        if value not in model.frame.domain(var.sort):
            raise UsageError(f"--bind {item!r}: {value} is not in the {var.sort} domain")
        binding[var] = value
    if args.world is not None and args.world not in model.frame.world_set:
        raise UsageError(f"unknown world {args.world!r}; worlds are {' '.join(model.worlds)}")
    worlds = [args.world] if args.world is not None else list(model.worlds)
    rest = free_vars(phi) - set(binding)
    if not rest and args.world is not None:
        result = evaluate(phi, model, args.world, binding)
    elif not binding:
        result = valid_at_world(phi, model, args.world) if args.world else valid_in_model(phi, model)
    else:
        result = all(evaluate(phi, model, w, {**binding, **v})
                     for w in worlds for v in valuations(rest, model.frame))
    print("true" if result else "false")
    return OK if result else FAIL


def cmd_check_proof(args) -> int:
    sig, pf = parse_proof_file(_read(args.proof))
    ext = set()
    if args.ext and args.ext.lower() != "none":
        ext = {e.strip() for e in args.ext.split(",") if e.strip()}
        bad = ext - set(EXTENSIONS)
        if bad:
            raise UsageError(f"--ext: unknown extensions {sorted(bad)}; choose from T, 4, 5")
    n = args.n if args.n is not None else sig.agent_count
    if n < 1:
        raise UsageError("--n must be positive")
    verdict = check_proof(pf, LogicConfig(n, frozenset(ext)), sig)
    if verdict:
        print(f"proved: {render(verdict.theorem, sig)}")
        return OK
    print(f"rejected: {verdict.reason}")
    return FAIL


def cmd_countermodel(args) -> int:
    sig = _signature(args)
    phi = parse_formula(_formula_text(args.formula), sig)
    props = _classes(args.cls)
    bounds = _bounds(args)
    cm = find_countermodel(phi, sig, bounds, props)
    if cm is None:
        label = f" ({', '.join(props)} frames)" if props else ""
        print(f"exhausted bounds{label}: no countermodel with |W|<={bounds.max_worlds}, "
              f"|objects|<={bounds.max_objects}, {bounds.min_agents}<=n<={bounds.max_agents}")
        return OK
    print(f"# countermodel: formula false at world {cm.world}")
    if cm.valuation:
        print("# valuation: " + ", ".join(f"{v.name}={d}" for v, d in sorted(cm.valuation.items(),
                                                                          key=lambda kv: kv[0].name)))
    _print_lines(render(cm.model))
    return FAIL


def _classes(values) -> tuple:
    props = []
    for value in values or []:
        for p in value.split(","):
            p = p.strip()
            if p not in PROPERTIES:
                raise UsageError(f"--class: unknown property {p!r}; choose from {', '.join(PROPERTIES)}")
            if p not in props:
                props.append(p)
    return tuple(props)


def cmd_sweep(args) -> int:
    if args.knowing_who:
        bounds = _bounds(args, max_objects=1)
        scopes = ["world", "model"] if args.scope == "both" else [args.scope]
        reports = [knowing_who_sweep(bounds, scope) for scope in scopes]
    else:
        bounds = _bounds(args, max_objects=1, max_agents=1)
        prop = FAULTY_PROPERTY[args.axiom] if args.inject_fault else None
        reports = [correspondence_sweep(args.axiom, bounds, prop)]
    for rep in reports:
        _print_lines(rep.text())
    return OK if all(r.ok for r in reports) else FAIL


def cmd_parse(args) -> int:
    sig = _signature(args)
    text = _formula_text(args.formula)
    if args.term:
        print(render(parse_term(text, sig), sig))
    else:
        print(render(parse_formula(text, sig), sig))
    return OK


# --------------------------------------------------------------------------
# Argument parsing

def _add_bounds(p: argparse.ArgumentParser):
    g = p.add_argument_group("bounds")
    g.add_argument("--max-worlds", type=int, help="largest number of worlds (default 3)")
    g.add_argument("--max-objects", type=int, help="largest object domain (default 2; sweeps 1)")
    g.add_argument("--max-agents", type=int, help="largest agent count (default 2)")
    g.add_argument("--min-agents", type=int, help="smallest agent count (default 1)")
    g.add_argument("--max-models", type=int, help=f"enumeration cap (default {DEFAULT_MAX_MODELS})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termmodal",
        description="Term-modal epistemic logic: evaluate, check proofs, hunt countermodels, sweep frames.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a formula in a model file")
    p.add_argument("model", help="model file")
    p.add_argument("formula", help="formula text, or @path")
    p.add_argument("--world", help="world of evaluation (default: every world)")
    p.add_argument("--bind", action="append", metavar="VAR=ELEMENT", help="fix a free variable (repeatable)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check-proof", help="check a proof file")
    p.add_argument("proof", help="proof file (signature sections plus [proof])")
    p.add_argument("--n", type=int, help="agent count (default: from the signature)")
    p.add_argument("--ext", default="none", help="extension axioms, e.g. T,4,5 or none")
    p.set_defaults(func=cmd_check_proof)

    p = sub.add_parser("countermodel", help="search for a refuting model")
    p.add_argument("formula", help="formula text, or @path")
    p.add_argument("--signature", help="file whose signature sections to use (default: built-in desk signature)")
    p.add_argument("--class", dest="cls", action="append", metavar="PROP",
                   help="restrict to frames whose relations are reflexive, transitive and/or euclidean")
    _add_bounds(p)
    p.set_defaults(func=cmd_countermodel)

    p = sub.add_parser("sweep", help="exhaustive correspondence or knowing-who sweep")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--axiom", choices=list(EXTENSIONS), help="T, 4 or 5 correspondence sweep")
    which.add_argument("--knowing-who", action="store_true", help="positive introspection under the knowing-who premise")
    p.add_argument("--scope", choices=["world", "model", "both"], default="world",
                   help="where the knowing-who premise must hold (default: world)")
    p.add_argument("--inject-fault", action="store_true", help="pair the axiom with the wrong property (test hook)")
    _add_bounds(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("parse", help="print the canonical form of a formula")
    p.add_argument("formula", help="formula text, or @path")
    p.add_argument("--signature", help="file whose signature sections to use")
    p.add_argument("--term", action="store_true", help="parse a term instead of a formula")
    p.set_defaults(func=cmd_parse)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return CAP
    except (UsageError, ParseError, ModelError, EvaluationError, SyntaxError_, SignatureError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
