import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PARTY, RICH, formulas, parse, terms
from erotetic.semantics import ModalStructure, evaluate
from erotetic.syntax import (
    TOP, And, Eq, Exists, Forall, FormulaSyntaxError, Func, Iff, Implies, Not, Or, Pred, Question, Signature,
    SignatureError, Var, alpha_equal, free_variables, is_rigid_term, match_rigid_instance,
    parse_formula, parse_term, prime, pretty, sharp, substitute, term_variables, unprime,
)

SIG2 = Signature.build({"P": 2, "R": 2}, rigid={"c": 0, "f": 1}, nonrigid={"d": 0})


class TestSignature:
    def test_json_round_trip(self):
        data = {"predicates": {"P": 1}, "functions": {"c": {"arity": 0, "rigid": True},
                                                      "m": {"arity": 1, "rigid": False}}}
        sig = Signature.from_json(data)
        assert sig.to_json() == data
        assert sig.functions["c"].rigid and not sig.functions["m"].rigid

    def test_overlap_rejected(self):
        with pytest.raises(SignatureError):
            Signature.build({"c": 1}, rigid={"c": 0})

    @pytest.mark.parametrize("name", ["P'", "__Q", "1x", ""])
    def test_user_names_rejected(self, name):
        with pytest.raises(SignatureError):
            Signature.from_json({"predicates": {name: 1}})

    def test_doubled(self):
        d = PARTY.doubled()
        assert "P'" in d.predicates and "m'" in d.functions and "j'" not in d.functions


class TestParse:
    def test_atom(self):
        assert parse("P(x)") == Pred("P", (Var("x"),))

    def test_existential_with_two_args(self):
        f = parse_formula("exists x. (P(x,c) & ~P(y,d))", SIG2)
        x, y, c, d = Var("x"), Var("y"), Func("c", ()), Func("d", ())
        assert f == Exists("x", And(Pred("P", (x, c)), Not(Pred("P", (y, d)))))

    def test_only_john(self):
        f = parse("forall x. (P(x) -> x = j)")
        assert pretty(f) == "forall x. (P(x) -> x = j)"

    def test_precedence(self):
        f = parse("p <-> q -> r | s & ~t", Signature.build({n: 0 for n in "pqrst"}))
        p, q, r, s_, t = (Pred(n, ()) for n in "pqrst")
        assert f == Iff(p, Implies(q, Or(r, And(s_, Not(t)))))

    def test_implication_right_assoc(self):
        sig = Signature.build({"p": 0, "q": 0, "r": 0})
        assert parse("p -> q -> r", sig) == parse("p -> (q -> r)", sig)

    @pytest.mark.parametrize("text, col", [("P(x", 4), ("P(x, y)", 1), ("Q(x)", 1), ("P(x) $ P(y)", 6)])
    def test_errors_have_positions(self, text, col):
        with pytest.raises(FormulaSyntaxError) as e:
            parse(text)
        assert f"column {col}" in str(e.value)

    def test_primed_names_reserved(self):
        with pytest.raises(FormulaSyntaxError):
            parse("P'(x)")
        assert pretty(parse("P'(x)", PARTY.doubled(), internal=True)) == "P'(x)"

    @settings(max_examples=300, deadline=None)
    @given(formulas())
    def test_round_trip(self, f):
        assert parse_formula(pretty(f), RICH) == f


class TestFreeVariables:
    def test_examples(self):
        assert free_variables(parse("forall x. P(x)")) == ()
        assert free_variables(parse_formula("exists x. (P(x,c) & ~P(y,d))", SIG2)) == ("y",)
        assert free_variables(parse("x = j")) == ("x",)

    def test_order_is_first_occurrence(self):
        assert free_variables(parse("P(z) & (I(x) | forall z. P(y))")) == ("z", "x", "y")


class TestSubstitute:
    def test_simple(self):
        assert substitute(parse("P(x)"), {"x": Func("c", ())}) == parse("P(c)")
        assert substitute(parse_formula("R(x,d)", SIG2), {"x": Func("c", ())}) == \
            parse_formula("R(c,d)", SIG2)

    def test_capture_avoided(self):
        f = parse_formula("forall y. R(x,y)", SIG2)
        g = substitute(f, {"x": Func("f", (Var("y"),))})
        assert pretty(g) == "forall y0. R(f(y), y0)"

    def test_capture_avoided_semantically(self):
        # naive substitution would produce forall y. R(f(y), y), which differs here
        sig = SIG2
        m = ModalStructure.from_json({
            "worlds": ["w"], "domain": ["a", "b"],
            "interpretation": {"w": {"predicates": {"R": [["a", "a"], ["a", "b"]], "P": []},
                                     "functions": {"d": [[[], "a"]]}}},
            "rigid_functions": {"c": [[[], "a"]], "f": [[["a"], "a"], [["b"], "b"]]}}, sig)
        f = parse_formula("forall y. R(x,y)", sig)
        good = substitute(f, {"x": Func("f", (Var("y"),))})
        naive = Forall("y", Pred("R", (Func("f", (Var("y"),)), Var("y"))))
        # brute force: good holds at y iff R(f(y), z) for every z
        for y in ("a", "b"):
            want = all((y, z) in {("a", "a"), ("a", "b")} for z in ("a", "b"))
            assert evaluate(m, "w", {"y": y}, good) == want
        assert evaluate(m, "w", {"y": "a"}, good) != evaluate(m, "w", {"y": "a"}, naive)

    @settings(max_examples=200, deadline=None)
    @given(formulas(), st.dictionaries(st.sampled_from(["x", "y", "z"]), terms(), max_size=2))
    def test_free_variables_law(self, f, sigma):
        g = substitute(f, sigma)
        fv = free_variables(f)
        expected = {v for v in fv if v not in sigma}
        for v in fv:
            if v in sigma:
                expected |= set(term_variables(sigma[v]))
        assert set(free_variables(g)) == expected


class TestRigidity:
    def test_terms(self):
        assert is_rigid_term(Var("x"), PARTY)
        assert is_rigid_term(Func("c", ()), PARTY)
        assert not is_rigid_term(Func("d", ()), PARTY)
        assert not is_rigid_term(parse_term("m(j)", PARTY), PARTY)

    def test_match_examples(self):
        assert match_rigid_instance(parse_formula("R(c,d)", SIG2), parse_formula("R(x,d)", SIG2),
                                    SIG2) == {"x": Func("c", ())}
        assert match_rigid_instance(parse("P(d)"), parse("P(x)"), PARTY) is None
        assert match_rigid_instance(parse("P(x)"), parse("P(x)"), PARTY) == {"x": Var("x")}

    def test_bound_variables_not_substituted(self):
        pat = parse("forall x. (P(x) -> I(y))")
        assert match_rigid_instance(parse("forall z. (P(z) -> I(c))"), pat, PARTY) == {"y": Func("c", ())}
        assert match_rigid_instance(parse("forall z. (P(c) -> I(c))"), pat, PARTY) is None

    @settings(max_examples=200, deadline=None)
    @given(formulas(), st.dictionaries(st.sampled_from(["x", "y", "z"]), terms(), max_size=3))
    def test_match_law(self, f, sigma):
        cand = substitute(f, sigma)
        found = match_rigid_instance(cand, f, RICH)
        rigid = all(is_rigid_term(t, RICH) for v, t in sigma.items() if v in free_variables(f))
        if rigid:
            assert found is not None
        if found is not None:
            assert alpha_equal(substitute(f, found), cand)
            assert all(is_rigid_term(t, RICH) for t in found.values())


class TestPriming:
    def test_worked_example(self):
        f = parse_formula("exists x. (P(x,c) & ~P(y,d))", SIG2)
        assert pretty(prime(f, SIG2)) == "exists x. (P'(x, c) & ~P'(y, d'))"

    def test_rigid_material_unchanged(self):
        assert prime(parse("x = c"), PARTY) == parse("x = c")
        assert pretty(prime(parse("P(j)"), PARTY)) == "P'(j)"
        assert pretty(prime(parse("L(m(j))"), PARTY)) == "L'(m'(j))"

    def test_already_primed_rejected(self):
        with pytest.raises(ValueError):
            prime(parse("P'(x)", PARTY.doubled(), internal=True), PARTY.doubled())

    def test_sharp(self):
        f = parse_formula("exists x. (P(x,c) & ~P(y,d))", SIG2)
        assert pretty(sharp(Question(f), SIG2)) == \
            "forall y. (exists x. (P(x, c) & ~P(y, d)) <-> exists x. (P'(x, c) & ~P'(y, d')))"
        assert pretty(sharp(Question(parse("P(x)")), PARTY)) == "forall x. (P(x) <-> P'(x))"
        rigid_only = parse("c = j")
        assert sharp(Question(rigid_only), PARTY) == Iff(rigid_only, rigid_only)

    @settings(max_examples=200, deadline=None)
    @given(formulas())
    def test_prime_laws(self, f):
        g = prime(f, RICH)
        assert unprime(g) == f
        names = {n for n in _names(g)}
        assert not names & {"P", "R", "p", "d", "h"}
        assert free_variables(sharp(Question(f), RICH)) == ()

    @settings(max_examples=100, deadline=None)
    @given(formulas(), formulas())
    def test_prime_injective(self, f, g):
        if f != g:
            assert prime(f, RICH) != prime(g, RICH)


def _names(f):
    from erotetic.syntax import symbol_names
    return symbol_names(f)


def test_top_is_node():
    assert pretty(TOP) == "true"
    assert isinstance(parse("true & P(c)"), And)
    assert parse("x = y") == Eq(Var("x"), Var("y"))
