import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termmodal.frames import has_property, hintikka_countermodel
from termmodal.parser import (
    ParseError, parse_formula, parse_model, parse_signature, parse_term, render, tokenize,
)
from termmodal.syntax import (
    Eq, Exists, Forall, Implies, K, Not, Or, Poss, Var, check_well_formed,
)

from conftest import AGT, SIG, P, a, c, f, formulas, m, models, p, q, x, y

COGITO = "forall y. (K[y](p | ~p) -> exists x. K[y](x = y))"

MINIMAL_MODEL = """\
[sorts] agent object
[agents] n=1
[cons] a:agent
[rels] p:
[worlds] w0
[dom] objects: d1
[acc]
α1: w0->w0
[interp w0]
a=α1 ; p=false
"""


class TestFormulas:
    def test_cogito(self):
        phi = parse_formula(COGITO, SIG)
        assert phi == Forall(y, Implies(K(y, Or(p, Not(p))), Exists(x, K(y, Eq(x, y)))))

    def test_axiom_four_for_constant(self):
        assert parse_formula("K[a] p -> K[a] K[a] p", SIG) == Implies(K(a, p), K(a, K(a, p)))

    def test_smallest_atom(self):
        assert parse_formula("x = x", SIG) == Eq(x, x)

    def test_neq_is_sugar(self):
        assert parse_formula("x != y", SIG) == Not(Eq(x, y))

    def test_possibility_is_sugar(self):
        assert parse_formula("P[a] p", SIG) == Poss(a, p)

    def test_implication_right_associative(self):
        assert parse_formula("p -> q -> p", SIG) == Implies(p, Implies(q, p))

    def test_precedence(self):
        assert parse_formula("p | q & p -> q", SIG) == parse_formula("(p | (q & p)) -> q", SIG)
        assert parse_formula("p <-> q -> p", SIG) == parse_formula("p <-> (q -> p)", SIG)
        assert parse_formula("~p & q", SIG) == parse_formula("(~p) & q", SIG)

    def test_prefix_binds_tighter_than_binary(self):
        assert parse_formula("forall x. K[x] p -> p", SIG) == Implies(Forall(x, K(x, p)), p)

    def test_function_terms(self):
        assert parse_formula("K[m(f(a))] P(f(x))", SIG) == K(m(f(a)), P(f(x)))

    def test_multi_binder(self):
        assert parse_formula("forall x y. x = y", SIG) == Forall(x, Forall(y, Eq(x, y)))

    def test_annotated_variable(self):
        w = Var("w", AGT)
        assert parse_formula("forall w:agent. K[w] p", SIG) == Forall(w, K(w, p))
        assert parse_formula("w:agt = x", SIG) == Eq(w, x)

    def test_redundant_annotation_on_bound_variable(self):
        w = Var("w", AGT)
        assert parse_formula("forall w:agent. w:agent = w", SIG) == Forall(w, Eq(w, w))
        with pytest.raises(ParseError, match="bound with sort agent"):
            parse_formula("forall w:agent. w:object = c", SIG)

    def test_binder_cannot_reuse_symbol_name(self):
        with pytest.raises(ParseError, match="declared relation"):
            parse_formula("forall p:agent. p = x", SIG)

    def test_unicode_operators(self):
        assert parse_formula("∀x. (K[x] p → ¬q ∧ p)", SIG) == parse_formula("forall x. (K[x] p -> ~q & p)", SIG)

    def test_k_and_p_are_not_reserved(self):
        from termmodal.syntax import Signature, Sort

        sig = Signature(1, {"K": Sort.AGENT}, {}, {}, {"p": ()})
        assert parse_formula("K[K] p", sig) == K(Var("K", AGT), p)

    def test_term(self):
        assert parse_term("f(m(c))", SIG) == f(m(c))


class TestErrors:
    @pytest.mark.parametrize("text,fragment", [
        ("K[c] p", "modal index not agent-referring"),
        ("P(x)", "must be object"),
        ("p & (q", "expected ')'"),
        ("forall x.", "unexpected end"),
        ("x = ", "expected an identifier"),
        ("b = x", "undeclared symbol b"),
        ("forall w. p", "undeclared variable"),
        ("f(x)", "expected '=' or '!='"),
        ("p q", "unexpected 'q'"),
        ("$", "unexpected character"),
        ("R(x)", "expects 2 arguments"),
        ("P", "expects 1 arguments"),
        ("x = y = z", "unexpected '='"),
    ])
    def test_messages(self, text, fragment):
        with pytest.raises(ParseError) as exc:
            parse_formula(text, SIG)
        assert fragment in str(exc.value)

    def test_span_inside_input(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("p -> K[c] q", SIG)
        span = exc.value.span
        assert span.start == 5 and span.end <= len("p -> K[c] q".encode())

    def test_span_counts_bytes(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("¬ $", SIG)
        assert exc.value.span.start == len("¬ ".encode())

    @settings(max_examples=300)
    @given(st.text(alphabet="xyzpqacuPKRf()[]~&|-<>=!.,: \tforallexists¬∀", max_size=40))
    def test_total(self, text):
        encoded = len(text.encode())
        try:
            phi = parse_formula(text, SIG)
        except ParseError as e:
            if e.span is not None:
                assert 0 <= e.span.start <= e.span.end <= encoded
        else:
            assert check_well_formed(phi, SIG) is None

    def test_deep_nesting_does_not_crash(self):
        with pytest.raises(ParseError):
            parse_formula("~" * 20000 + "p", SIG)


class TestRender:
    @pytest.mark.parametrize("text,canonical", [
        ("~(x = y)", "x != y"),
        (COGITO, COGITO),
        ("K[a]p->K[a]K[a]p", "K[a] p -> K[a] K[a] p"),
        ("(p -> q) -> p", "(p -> q) -> p"),
        ("p -> (q -> p)", "p -> q -> p"),
        ("~(p & q)", "~(p & q)"),
        ("(p | q) & p", "(p | q) & p"),
        ("p & (q & p)", "p & (q & p)"),
        ("~~p", "~~p"),
        ("~K[a]~p", "P[a] p"),
        ("forall x. forall y. x = y", "forall x. forall y. (x = y)"),
        ("exists u. P(u)", "exists u. P(u)"),
        ("(p <-> q) <-> p", "p <-> q <-> p"),
        ("p <-> (q <-> p)", "p <-> (q <-> p)"),
        ("(p -> q) & (q -> p)", "p <-> q"),
        ("forall w:agent. K[w](w = x)", "forall w:agent. K[w](w = x)"),
    ])
    def test_canonical(self, text, canonical):
        assert render(parse_formula(text, SIG), SIG) == canonical

    def test_one_binder_per_forall(self):
        assert render(Forall(x, Forall(y, p)), SIG) == "forall x. forall y. p"

    def test_minted_variables_annotated(self):
        phi = Forall(Var("y_1", AGT), K(Var("y_1", AGT), p))
        text = render(phi, SIG)
        assert text == "forall y_1:agent. K[y_1] p"
        assert parse_formula(text, SIG) == phi

    def test_free_minted_variable_annotated(self):
        w = Var("w", AGT)
        assert render(Eq(w, x), SIG) == "w:agent = x"

    @given(formulas)
    def test_round_trip(self, phi):
        assert parse_formula(render(phi, SIG), SIG) == phi

    @given(formulas)
    def test_deterministic(self, phi):
        assert render(phi, SIG) == render(phi, SIG)


class TestModels:
    def test_minimal(self):
        sig, model = parse_model(MINIMAL_MODEL)
        assert model.worlds == ("w0",)
        assert model.frame.access == (frozenset({("w0", "w0")}),)
        assert sig.agent_count == 1

    def test_hintikka_file_round_trip(self):
        model, _ = hintikka_countermodel()
        sig, back = parse_model(render(model))
        assert back == model
        assert all(has_property(back.frame, i, "transitive") for i in range(2))

    def test_shipped_model_file(self):
        from importlib.resources import files

        sig, model = parse_model(files("termmodal").joinpath("data/hintikka.model").read_text("utf-8"))
        assert all(has_property(model.frame, i, "transitive") for i in range(2))
        assert model == hintikka_countermodel()[0]

    @pytest.mark.parametrize("edit,fragment", [
        (("a=α1", "a=d1"), "not in the agent domain"),
        (("[agents] n=1", "[agents] n=x"), "expected 'n=<int>'"),
        (("α1: w0->w0", "α1: w0->w9"), "unknown world"),
        (("α1: w0->w0", "α3: w0->w0"), "agent among"),
        (("a=α1 ; p=false", "p=false"), "missing worlds"),
        (("p=false", "p=maybe"), "true or false"),
        (("[interp w0]", "[interp w7]"), "unknown world w7"),
        (("[dom] objects: d1", "[dom] objects: α1"), "clash"),
        (("[worlds] w0", "[world] w0"), "unknown section"),
    ])
    def test_rejections(self, edit, fragment):
        with pytest.raises(ParseError) as exc:
            parse_model(MINIMAL_MODEL.replace(*edit))
        assert fragment in str(exc.value)

    def test_functions_and_relations(self):
        text = """\
[agents] n=2
[cons] c:object
[funs] f: agent -> object ; g: -> agent
[rels] R: agent object
[worlds] w0 w1
[dom] objects: d1 d2
[acc]
α1: w0->w1
α2:
[interp w0]
c=d1 ; f(α1)=d2 ; f(α2)=d1 ; g()=α2 ; R={(α1,d2), (α2,d1)}
[interp w1]
c=d2 ; f(α1)=d1 ; f(α2)=d1 ; g()=α1 ; R={}
"""
        sig, model = parse_model(text)
        assert model.interp.functions["f"]["w0"][("α1",)] == "d2"
        assert model.interp.relations["R"]["w0"] == {("α1", "d2"), ("α2", "d1")}
        assert parse_model(render(model))[1] == model

    def test_partial_function_rejected(self):
        text = """\
[agents] n=1
[funs] f: agent -> object
[worlds] w0
[dom] objects: d1
[acc]
α1:
[interp w0]
"""
        with pytest.raises(ParseError, match="not total"):
            parse_model(text)

    @settings(max_examples=50)
    @given(models())
    def test_random_round_trip(self, model):
        sig, back = parse_model(render(model))
        assert back == model and sig == model.signature


def test_signature_round_trip():
    assert parse_signature(render(SIG)) == SIG


def test_tokenize_unicode_keywords():
    assert [t.text for t in tokenize("∀x. ∃y. p")][:4] == ["forall", "x", ".", "exists"]
