"""Checked proofs of standard derived theorems, and the derived-rule transformer."""

from __future__ import annotations

from .proof import LogicConfig, Proof, ProofLine, axiom, kg, mp
from .syntax import And, Eq, Implies, K, Signature, Sort, Term, Var, conjunction

X = Var("x", Sort.AGENT)
Y = Var("y", Sort.AGENT)


def library_signature(n: int = 2) -> Signature:
    return Signature(
        n,
        {"x": Sort.AGENT, "y": Sort.AGENT, "z": Sort.AGENT, "u": Sort.OBJECT},
        {"a": Sort.AGENT, "c": Sort.OBJECT},
        {},
        {"p": (), "q": (), "r": (), "P": (Sort.OBJECT,)},
    )


def _proof(*steps) -> Proof:
    return Proof(ProofLine(phi, just) for phi, just in steps)


def ki_proof(t: Term, x: Var = X, y: Var = Y) -> Proof:
    """``(x = y) -> K[t](x = y)``, via substitutivity on the second argument of ``x = x``."""
    same, ident = Eq(x, x), Eq(x, y)
    ps = Implies(ident, Implies(K(t, same), K(t, ident)))
    swapped = Implies(K(t, same), Implies(ident, K(t, ident)))
    return _proof(
        (ps, axiom("PS")),
        (Implies(ps, swapped), axiom("PC")),
        (swapped, mp(1, 2)),
        (same, axiom("ID")),
        (K(t, same), kg(4, t)),
        (Implies(ident, K(t, ident)), mp(5, 3)),
    )


def kd_proof(t: Term, parts) -> Proof:
    """``K[t](p1 & ... & pn) -> (K[t] p1 & ... & K[t] pn)`` for ``n >= 2``."""
    parts = list(parts)
    if len(parts) < 2:
        raise ValueError("K-distribution needs at least two conjuncts")
    whole = conjunction(parts)
    kwhole = K(t, whole)
    steps = []
    projections = []
    for part in parts:
        base = len(steps)
        proj = Implies(whole, part)
        steps += [
            (proj, axiom("PC")),
            (K(t, proj), kg(base + 1, t)),
            (Implies(K(t, proj), Implies(kwhole, K(t, part))), axiom("K")),
            (Implies(kwhole, K(t, part)), mp(base + 2, base + 3)),
        ]
        projections.append(len(steps))
    goal = Implies(kwhole, conjunction([K(t, part) for part in parts]))
    # (A->B1) -> ((A->B2) -> ... -> goal)
    chain = goal
    for k in reversed(projections):
        chain = Implies(steps[k - 1][0], chain)
    steps.append((chain, axiom("PC")))
    for k in projections:
        current = steps[-1][0]
        steps.append((current.cons, mp(k, len(steps))))
    return _proof(*steps)


def derived_rule(pf: Proof, t: Term) -> Proof:
    """From a proof of ``A -> B`` build a proof of ``K[t] A -> K[t] B``."""
    thm = pf.theorem
    if not isinstance(thm, Implies):
        raise ValueError("the input proof must prove an implication")
    n = len(pf)
    k_thm = K(t, thm)
    k_axiom = Implies(k_thm, Implies(K(t, thm.ante), K(t, thm.cons)))
    return Proof(pf.lines + (
        ProofLine(k_thm, kg(n, t)),
        ProofLine(k_axiom, axiom("K")),
        ProofLine(k_axiom.cons, mp(n + 1, n + 2)),
    ))


def tautology_wrap(pf: Proof, tautology) -> Proof:
    """Prove ``tautology -> theorem`` from a proof of ``theorem``."""
    thm = pf.theorem
    n = len(pf)
    weaken = Implies(thm, Implies(tautology, thm))
    return Proof(pf.lines + (
        ProofLine(weaken, axiom("PC")),
        ProofLine(weaken.cons, mp(n, n + 1)),
    ))


def identity_proof(phi) -> Proof:
    """One-line proof of ``phi -> phi``."""
    return _proof((Implies(phi, phi), axiom("PC")))


def library_proofs(cfg: LogicConfig = LogicConfig()) -> dict:
    """Named proofs over :func:`library_signature`; each passes the base kernel."""
    sig = library_signature(cfg.agent_count)
    a, p, q, r = sig.con("a"), sig.atom("p"), sig.atom("q"), sig.atom("r")
    z = sig.var("z")
    out = {
        "KI": ki_proof(a),
        "KI[z]": ki_proof(z),
        "KD2": kd_proof(a, [p, q]),
        "KD3": kd_proof(a, [p, q, r]),
    }
    bases = {
        "p->p": identity_proof(p),
        "p&q->p": _proof((Implies(And(p, q), p), axiom("PC"))),
        "KI": out["KI"],
        "KD2": out["KD2"],
        "p->(q->p)": _proof((Implies(p, Implies(q, p)), axiom("PC"))),
    }
    for name, pf in bases.items():
        out[f"DR[{name}]"] = derived_rule(pf, a)
    return out
