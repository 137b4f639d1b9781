import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from termmodal.generate import InstanceGen, pool_signature
from termmodal.library import ki_proof, library_proofs, library_signature
from termmodal.parser import ParseError, parse_formula, render
from termmodal.proof import (
    MAX_LETTERS, LogicConfig, Proof, ProofLine, Rule, TooManyLetters, axiom, axiom_n, check_consistency_certificate,
    check_proof, check_rule, deducible, gen, is_propositional_tautology_instance, kg, match_axiom, mp,
    parse_proof, parse_proof_file, render_proof_file,
)
from termmodal.syntax import Atom, Eq, Forall, Implies, K, Not, Var

from conftest import OBJ, SIG, a, c, m, p, q, x, y

BASE = LogicConfig()
S5 = LogicConfig(extensions={"T", "4", "5"})


def pf(*steps) -> Proof:
    return Proof(ProofLine(phi, j) for phi, j in steps)


def F(text):
    return parse_formula(text, SIG)


class TestConfig:
    def test_unknown_extension(self):
        with pytest.raises(ValueError):
            LogicConfig(extensions={"B"})

    def test_agent_count(self):
        with pytest.raises(ValueError):
            LogicConfig(agent_count=0)

    def test_rule_kinds(self):
        assert Rule.PC.is_axiom and Rule.FOUR.is_axiom
        assert not any(r.is_axiom for r in (Rule.MP, Rule.KG, Rule.GEN))


class TestTautologies:
    @pytest.mark.parametrize("text", [
        "p -> p", "p | ~p", "(p -> q) -> (~q -> ~p)", "K[a] p -> K[a] p",
        "(forall x. K[x] p) | ~(forall x. K[x] p)", "x = y -> x = y",
        "(p -> (q -> K[a] p)) -> (q -> (p -> K[a] p))",
    ])
    def test_instances(self, text):
        assert is_propositional_tautology_instance(F(text))

    @pytest.mark.parametrize("text", ["p", "p -> q", "x = x", "K[a] p -> p", "K[a](p | ~p)"])
    def test_non_instances(self, text):
        assert not is_propositional_tautology_instance(F(text))

    def test_permutation_tautology_and_a_lookalike(self):
        # (A -> (B -> C)) -> (C -> (A -> B)) fails at A=C=true, B=false
        A, B, C = p, q, Atom("P", (c,))
        lookalike = Implies(Implies(A, Implies(B, C)), Implies(C, Implies(A, B)))
        assert not is_propositional_tautology_instance(lookalike)
        permutation = Implies(Implies(A, Implies(B, C)), Implies(B, Implies(A, C)))
        assert is_propositional_tautology_instance(permutation)

    def test_letter_cap(self):
        letters = [Atom("P", (Var(f"o{i}", OBJ),)) for i in range(MAX_LETTERS + 1)]
        with pytest.raises(TooManyLetters):
            is_propositional_tautology_instance(_chain(letters))
        assert not match_axiom(_chain(letters), "PC", BASE)


def _chain(letters):
    out = letters[-1]
    for le in reversed(letters[:-1]):
        out = Implies(le, out)
    return Implies(out, out)


class TestAxioms:
    @pytest.mark.parametrize("tag,text", [
        ("ID", "c = c"),
        ("ID", "f(x) = f(x)"),
        ("MSD", "x != u"),
        ("MSD", "u != x"),
        ("FORALL", "(forall x. K[x] p) -> K[y] p"),
        ("FORALL", "(forall x. K[x] p) -> K[x] p"),
        ("FORALL", "(forall u. p) -> p"),
        ("PS", "x = y -> K[a](x = x) -> K[a](x = y)"),
        ("PS", "x = y -> (x = x & P(f(x))) -> (x = y & P(f(x)))"),
        ("PS", "u = v -> (forall x. R(x, u)) -> forall x. R(x, v)"),
        ("EXID", "c = c -> exists u. u = c"),
        ("EXID", "a = a -> exists y. y = a"),
        ("K", "K[m(c)](p -> q) -> K[m(c)] p -> K[m(c)] q"),
        ("BF", "(forall u. K[a] P(u)) -> K[a] forall u. P(u)"),
        ("BF", "(forall x. K[y] p) -> K[y] forall x. p"),
        ("KNI", "x != y -> K[z](x != y)"),
        ("KNI", "u != v -> K[m(u)](u != v)"),
        ("N", "exists x1:agent. exists x2:agent. (x1 != x2 & forall y. (y = x1 | y = x2))"),
        ("N", "exists z. exists x. (z != x & forall y. (y = z | y = x))"),
    ])
    def test_accepted(self, tag, text):
        assert match_axiom(F(text), tag, BASE)

    @pytest.mark.parametrize("tag,text", [
        ("ID", "x = y"),
        ("MSD", "x != y"),
        ("MSD", "x = u -> p"),
        ("FORALL", "(forall x. K[x] p) -> K[y] q"),
        ("FORALL", "(forall x. forall y. x = y) -> forall y. y = y"),
        ("FORALL", "(forall x. K[x] p) -> K[a] p"),
        ("PS", "x = u -> p -> p"),
        ("PS", "x = y -> K[a](y = x) -> K[a](x = x)"),
        ("PS", "x = y -> (forall x. x = z) -> forall x. y = z"),
        ("EXID", "c = c -> exists u. u = f(a)"),
        ("K", "K[a](p -> q) -> K[y] p -> K[y] q"),
        ("BF", "(forall x. K[x] p) -> K[x] forall x. p"),
        ("KNI", "x = y -> K[a](x = y)"),
        ("KNI", "a != y -> K[a](a != y)"),
        ("N", "exists z. forall y. y = z"),
        ("N", "exists x. exists z. (x != z & forall y. (y = x | y = z | y = a))"),
    ])
    def test_rejected(self, tag, text):
        assert not match_axiom(F(text), tag, BASE)

    def test_barcan_with_bound_index_variable(self):
        # the quantified variable must not occur in the index
        assert not match_axiom(F("(forall x. K[x] p) -> K[x] forall x. p"), "BF", BASE)
        assert match_axiom(F("(forall x. K[y](x != y)) -> K[y] forall x. x != y"), "BF", BASE)

    def test_n_depends_on_agent_count(self):
        assert match_axiom(axiom_n(3), "N", LogicConfig(agent_count=3))
        assert not match_axiom(axiom_n(3), "N", BASE)
        assert match_axiom(axiom_n(1), "N", LogicConfig(agent_count=1))

    def test_n_shape(self):
        assert render(axiom_n(3), SIG) == (
            "exists x1:agent. exists x2:agent. exists x3:agent. "
            "(x1 != x2 & x1 != x3 & x2 != x3 & forall y. (y = x1 | y = x2 | y = x3))"
        )

    @pytest.mark.parametrize("tag,text", [
        ("T", "forall x. (K[x] p -> p)"),
        ("4", "forall x. (K[x] p -> K[x] K[x] p)"),
        ("5", "forall x. (P[x] p -> K[x] P[x] p)"),
    ])
    def test_extensions_need_enabling(self, tag, text):
        assert not match_axiom(F(text), tag, BASE)
        assert match_axiom(F(text), tag, LogicConfig(extensions={tag}))
        assert match_axiom(F(text), tag, S5)

    def test_four_for_a_constant_is_not_an_instance(self):
        assert not match_axiom(F("K[a] p -> K[a] K[a] p"), "4", S5)

    def test_rule_tags_rejected(self):
        with pytest.raises(ValueError):
            match_axiom(p, "MP", BASE)


class TestRules:
    def test_mp_order(self):
        earlier = [p, Implies(p, q)]
        assert check_rule(q, mp(1, 2), earlier)
        assert not check_rule(q, mp(2, 1), earlier)

    def test_mp_wrong_conclusion(self):
        assert not check_rule(p, mp(1, 2), [p, Implies(p, q)])

    def test_kg(self):
        assert check_rule(K(m(c), p), kg(1, m(c)), [p])
        v = check_rule(K(c, p), kg(1, c), [p])
        assert not v and "not agent-referring" in v.reason

    def test_gen(self):
        earlier = [Implies(p, K(x, q))]
        assert check_rule(Implies(p, Forall(x, K(x, q))), gen(1, x), earlier)

    def test_gen_rejects_free_antecedent(self):
        earlier = [Implies(K(x, p), K(x, p))]
        v = check_rule(Implies(K(x, p), Forall(x, K(x, p))), gen(1, x), earlier)
        assert not v and "x free in antecedent" in v.reason

    def test_bad_reference(self):
        assert not check_rule(q, mp(1, 3), [p, Implies(p, q)])


class TestCheckProof:
    def test_empty(self):
        v = check_proof(Proof(()), BASE)
        assert not v and v.reason == "empty proof"

    def test_ki(self):
        v = check_proof(ki_proof(a), BASE)
        assert v and v.theorem == Implies(Eq(x, y), K(a, Eq(x, y)))
        assert len(ki_proof(a)) == 6

    def test_forward_reference(self):
        v = check_proof(pf((q, mp(1, 2)), (p, axiom("PC"))), BASE)
        assert not v and v.line == 1

    def test_reason_names_line(self):
        v = check_proof(pf((F("p -> p"), axiom("PC")), (F("x = y"), axiom("ID"))), BASE)
        assert not v and v.line == 2 and v.reason.startswith("line 2:")

    def test_extension_gate(self):
        proof = pf((F("forall x. (K[x] p -> p)"), axiom("T")))
        assert not check_proof(proof, BASE)
        assert check_proof(proof, LogicConfig(extensions={"T"}))

    def test_signature_checked(self):
        proof = pf((Eq(Var("w", OBJ), Var("w", OBJ)), axiom("ID")))
        assert check_proof(proof, BASE)
        assert not check_proof(proof, LogicConfig(agent_count=3), SIG)

    @given(st.sampled_from(sorted(library_proofs())), st.sets(st.sampled_from(["T", "4", "5"])))
    def test_monotone_in_extensions(self, name, ext):
        assert check_proof(library_proofs()[name], LogicConfig(extensions=ext))

    def test_generalisation_proof(self):
        # |- p -> forall x. (x = x)
        proof = pf(
            (Eq(x, x), axiom("ID")),
            (F("x = x -> p -> x = x"), axiom("PC")),
            (F("p -> x = x"), mp(1, 2)),
            (F("p -> forall x. (x = x)"), gen(3, x)),
        )
        assert check_proof(proof, BASE)


class TestDeducibility:
    def test_theorem_itself(self):
        assert deducible([], Implies(Eq(x, y), K(a, Eq(x, y))), ki_proof(a), BASE)

    def test_conjunction_of_premises(self):
        proof = pf((F("(p & (p -> q)) -> q"), axiom("PC")))
        assert deducible([p, Implies(p, q)], q, proof, BASE)
        assert not deducible([p], q, proof, BASE)

    def test_tautological_antecedent(self):
        proof = pf((F("(q | ~q) -> p -> p"), axiom("PC")))
        assert deducible([], F("p -> p"), proof, BASE)

    def test_wrong_conclusion(self):
        proof = pf((F("p -> p"), axiom("PC")))
        v = deducible([p], q, proof, BASE)
        assert not v and "A -> phi" in v.reason

    def test_invalid_proof(self):
        assert not deducible([p], p, pf((p, axiom("PC"))), BASE)


class TestConsistency:
    def test_certificate(self):
        proof = pf((F("(p & ~p) -> p & ~p"), axiom("PC")))
        assert check_consistency_certificate([p, Not(p)], p, proof, BASE)

    def test_no_certificate_is_no_verdict(self):
        v = check_consistency_certificate([p], p, None, BASE)
        assert not v and v.reason.startswith("no verdict")

    def test_failed_certificate_is_no_verdict(self):
        proof = pf((F("p -> p"), axiom("PC")))
        v = check_consistency_certificate([p], p, proof, BASE)
        assert not v and v.reason.startswith("no verdict")


class TestProofFiles:
    def test_parse(self):
        text = "1. x = x ; ID\n2. K[a](x = x) ; KG 1 [a]  # comment\n"
        proof = parse_proof(text, SIG)
        assert proof.lines[1].just == kg(1, a)
        assert check_proof(proof, BASE)

    @pytest.mark.parametrize("text,fragment", [
        ("1. p ; XYZ", "unknown justification"),
        ("2. p ; PC", "expected index 1"),
        ("1. p PC", "expected '<idx>."),
        ("1. p ; PC 3", "takes no arguments"),
        ("1. p ; MP 1", "two line numbers"),
        ("1. p ; GEN 1 a", "needs a variable"),
        ("1. K[c] p ; PC", "modal index not agent-referring"),
    ])
    def test_errors(self, text, fragment):
        with pytest.raises(ParseError, match=fragment):
            parse_proof(text, SIG)

    @pytest.mark.parametrize("name", sorted(library_proofs()))
    def test_round_trip(self, name):
        sig = library_signature()
        proof = library_proofs()[name]
        back_sig, back = parse_proof_file(render_proof_file(proof, sig))
        assert back == proof and back_sig == sig

    def test_shipped_files(self):
        from importlib.resources import files

        for name in ("ki.proof", "kd2.proof"):
            sig, proof = parse_proof_file(files("termmodal").joinpath("data", name).read_text("utf-8"))
            assert check_proof(proof, LogicConfig(sig.agent_count), sig)


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(["FORALL", "ID", "MSD", "PS", "EXID", "K", "BF", "KNI"]), st.integers(0, 10**6))
def test_generated_instances_match(tag, seed):
    gen_ = InstanceGen(pool_signature(), random.Random(seed))
    for phi in gen_.instances(tag, 3):
        assert match_axiom(phi, tag, BASE)
