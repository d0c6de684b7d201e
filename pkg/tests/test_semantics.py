import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MONADIC, PARTY, PROP, RICH, brute_partition, formulas, random_structure
from erotetic.semantics import (
    Bounds, EnumerationLimitError, EvaluationError, ModalStructure, Partition, StructureError,
    count_structures, enumerate_structures, evaluate, find_countermodel, holds_globally,
    is_countermodel, question_partition, questions_partition, refines, satisfies,
    two_world_correspondence,
)
from erotetic.syntax import TOP, Question, Signature, parse_formula, sharp

P1 = Signature.build({"P": 1}, rigid={"j": 0})


def model(sig, worlds, domain, preds, funcs=None, rigid=None):
    interp = {w: {"predicates": preds.get(w, {}), "functions": (funcs or {}).get(w, {})} for w in worlds}
    return ModalStructure.from_json({"worlds": worlds, "domain": domain, "interpretation": interp,
                                     "rigid_functions": rigid or {}}, sig)


class TestStructure:
    def test_rigid_invariant_enforced(self):
        with pytest.raises(StructureError):
            model(P1, ["w1", "w2"], ["a", "b"], {},
                  funcs={"w1": {"j": [[[], "a"]]}, "w2": {"j": [[[], "b"]]}})

    def test_partial_function_rejected(self):
        sig = Signature.build({}, nonrigid={"f": 1})
        with pytest.raises(StructureError):
            model(sig, ["w"], ["a", "b"], {}, funcs={"w": {"f": [[["a"], "a"]]}})

    def test_bad_arity_rejected(self):
        with pytest.raises(StructureError):
            model(P1, ["w"], ["a"], {"w": {"P": [["a", "a"]]}}, rigid={"j": [[[], "a"]]})

    def test_json_round_trip(self):
        m = random_structure(PARTY, 3, 2, random.Random(1))
        assert ModalStructure.from_json(m.to_json(), PARTY).to_json() == m.to_json()


class TestEvaluate:
    def test_top(self):
        m = random_structure(PARTY, 2, 2, random.Random(0))
        assert all(evaluate(m, w, {}, TOP) for w in m.worlds)

    def test_singleton_domain(self):
        m = model(P1, ["w1"], ["a"], {"w1": {"P": [["a"]]}}, rigid={"j": [[[], "a"]]})
        assert evaluate(m, "w1", {}, parse_formula("forall x. P(x)", P1))

    def test_only_john(self):
        m = model(P1, ["w"], ["a", "b"], {"w": {"P": [["a"]]}}, rigid={"j": [[[], "a"]]})
        f = parse_formula("forall x. (P(x) -> x = j)", P1)
        assert evaluate(m, "w", {}, f)
        # brute force over both assignments
        assert all((x != "b") for x in ("a", "b") if evaluate(m, "w", {"x": x}, parse_formula("P(x)", P1)))

    def test_unassigned_variable(self):
        m = model(P1, ["w"], ["a"], {"w": {"P": []}}, rigid={"j": [[[], "a"]]})
        with pytest.raises(EvaluationError):
            evaluate(m, "w", {}, parse_formula("P(x)", P1))


class TestGlobal:
    sig = Signature.build({"I": 1, "P": 1})
    chi = parse_formula("forall x. (I(x) <-> P(x))", sig)

    def test_top(self):
        assert holds_globally(random_structure(PARTY, 2, 2, random.Random(3)), TOP)

    def test_same_extensions(self):
        m = model(self.sig, ["w1", "w2"], ["a", "b"],
                  {"w1": {"I": [["a"]], "P": [["a"]]}, "w2": {"I": [], "P": []}})
        assert holds_globally(m, self.chi)

    def test_one_world_differs(self):
        m = model(self.sig, ["w1", "w2"], ["a", "b"],
                  {"w1": {"I": [["a"]], "P": [["a"]]}, "w2": {"I": [["b"]], "P": []}})
        assert not holds_globally(m, self.chi)

    def test_open_context_rejected(self):
        m = model(self.sig, ["w"], ["a"], {"w": {"I": [], "P": []}})
        with pytest.raises(EvaluationError):
            holds_globally(m, parse_formula("P(x)", self.sig))


class TestPartition:
    sig = Signature.build({"P": 1})

    def test_tautology_one_block(self):
        m = random_structure(PARTY, 4, 2, random.Random(5))
        assert question_partition(m, Question(TOP)).blocks == (tuple(m.worlds),)

    def test_two_singletons(self):
        m = model(self.sig, ["w1", "w2"], ["a"], {"w1": {"P": [["a"]]}, "w2": {"P": []}})
        assert str(question_partition(m, Question(parse_formula("P(x)", self.sig)))) == "{w1} | {w2}"

    def test_three_worlds(self):
        m = model(self.sig, ["w1", "w2", "w3"], ["a", "b"],
                  {"w1": {"P": [["a"]]}, "w2": {"P": [["a"]]}, "w3": {"P": [["a"], ["b"]]}})
        p = question_partition(m, Question(parse_formula("P(x)", self.sig)))
        assert p.blocks == (("w1", "w2"), ("w3",))

    def test_propositional_meet(self):
        worlds = ["w1", "w2", "w3", "w4"]
        vals = dict(zip(worlds, itertools.product([False, True], repeat=2)))
        m = model(PROP, worlds, ["a"], {w: {"p": [[]] if p else [], "q": [[]] if q else []}
                                        for w, (p, q) in vals.items()})
        qs = [Question(parse_formula(x, PROP)) for x in ("p", "q")]
        assert questions_partition(m, qs).blocks == tuple((w,) for w in worlds)

    def test_empty_set(self):
        m = random_structure(PROP, 3, 1, random.Random(2))
        assert len(questions_partition(m, []).blocks) == 1

    @settings(max_examples=150, deadline=None)
    @given(st.lists(formulas(), min_size=1, max_size=3), st.integers(0, 10 ** 6),
           st.integers(1, 4), st.integers(1, 2))
    def test_matches_definition(self, bodies, seed, worlds, n):
        m = random_structure(RICH, worlds, n, random.Random(seed))
        qs = [Question(b) for b in bodies]
        p = questions_partition(m, qs)
        assert set(p.pairs()) == brute_partition(m, qs)
        flat = [w for b in p.blocks for w in b]
        assert sorted(flat) == sorted(m.worlds) and all(p.blocks)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(formulas(), max_size=2), st.lists(formulas(), max_size=2),
           st.integers(0, 10 ** 6))
    def test_meet_and_monotonicity(self, a, b, seed):
        m = random_structure(RICH, 4, 2, random.Random(seed))
        qa, qb = [Question(f) for f in a], [Question(f) for f in b]
        pa, pb, pab = (questions_partition(m, x) for x in (qa, qb, qa + qb))
        assert pab == pa.meet(pb)
        assert refines(pab, pa) and refines(pab, pb)


blocks_of = st.lists(st.integers(0, 3), min_size=5, max_size=5).map(
    lambda labels: Partition.from_blocks(
        [[f"w{i}" for i, l in enumerate(labels) if l == k] for k in set(labels)]))


class TestRefines:
    def test_examples(self):
        ident = Partition.from_blocks([["w1"], ["w2"], ["w3"]])
        one = Partition.from_blocks([["w1", "w2", "w3"]])
        mid = Partition.from_blocks([["w1", "w2"], ["w3"]])
        assert refines(ident, mid) and refines(mid, one) and refines(ident, one)
        assert not refines(mid, ident)

    def test_mismatched(self):
        with pytest.raises(ValueError):
            refines(Partition.from_blocks([["w1"]]), Partition.from_blocks([["w2"]]))

    @given(blocks_of, blocks_of, blocks_of)
    def test_order_laws(self, a, b, c):
        assert refines(a, a)
        if refines(a, b) and refines(b, a):
            assert a == b
        if refines(a, b) and refines(b, c):
            assert refines(a, c)
        assert refines(a, b) == (a.pairs() <= b.pairs())


class TestEnumeration:
    def test_single_proposition(self):
        sig = Signature.build({"p": 0})
        assert len(list(enumerate_structures(sig, Bounds(1, 1)))) == 2
        two = list(enumerate_structures(sig, Bounds(2, 1)))
        combos = {tuple(bool(m.interp[w].predicates["p"]) for w in m.worlds) for m in two if len(m.worlds) == 2}
        assert combos == set(itertools.product([False, True], repeat=2))

    def test_count_formula(self):
        # one unary predicate and one rigid constant: for n entities and k
        # worlds there are n rigid choices and (2**n)**k predicate choices
        sig = Signature.build({"P": 1}, rigid={"c": 0})
        expected = sum(n * (2 ** n) ** k for n in (1, 2) for k in (1, 2))
        ms = list(enumerate_structures(sig, Bounds(2, 2)))
        assert len(ms) == expected == count_structures(sig, Bounds(2, 2))
        for m in ms:
            assert len({tuple(sorted(m.interp[w].functions["c"].items())) for w in m.worlds}) == 1

    def test_deterministic(self):
        a = [m.to_json() for m in enumerate_structures(MONADIC, Bounds(2, 2))]
        b = [m.to_json() for m in enumerate_structures(MONADIC, Bounds(2, 2))]
        assert a == b

    def test_cap_reported(self):
        big = Signature.build({"R": 3})
        with pytest.raises(EnumerationLimitError):
            next(enumerate_structures(big, Bounds(2, 3), cap=1000))


class TestCountermodel:
    def test_entailed_has_none(self):
        sig = Signature.build({"P": 1})
        q, t = Question(parse_formula("P(x)", sig)), Question(parse_formula("forall x. P(x)", sig))
        assert find_countermodel([q], TOP, t, Bounds(2, 3), sig) is None

    def test_raining(self):
        sig = Signature.build({"F": 1, "R": 0}, rigid={"j": 0})
        q, t = Question(parse_formula("F(j)", sig)), Question(parse_formula("R", sig))
        cm = find_countermodel([q], TOP, t, Bounds(2, 1), sig)
        assert cm is not None and is_countermodel(cm.structure, cm.pair, [q], TOP, t)
        w, v = cm.pair
        fj = [evaluate(cm.structure, x, {}, q.body) for x in (w, v)]
        r = [evaluate(cm.structure, x, {}, t.body) for x in (w, v)]
        assert fj[0] == fj[1] and r[0] != r[1]

    def test_nonrigid_constant(self):
        sig = Signature.build({"P": 1}, nonrigid={"d": 0})
        q, t = Question(parse_formula("P(x)", sig)), Question(parse_formula("P(d)", sig))
        cm = find_countermodel([q], TOP, t, Bounds(2, 2), sig)
        assert cm is not None
        m = cm.structure
        w, v = cm.pair
        assert m.interp[w].predicates["P"] == m.interp[v].predicates["P"]
        assert m.interp[w].functions["d"] != m.interp[v].functions["d"]

    def test_hand_built_countermodel(self):
        sig = Signature.build({"P": 1}, nonrigid={"d": 0})
        m = model(sig, ["w1", "w2"], ["a", "b"], {"w1": {"P": [["a"]]}, "w2": {"P": [["a"]]}},
                  funcs={"w1": {"d": [[[], "a"]]}, "w2": {"d": [[[], "b"]]}})
        q, t = Question(parse_formula("P(x)", sig)), Question(parse_formula("P(d)", sig))
        assert is_countermodel(m, ("w1", "w2"), [q], TOP, t)

    @settings(max_examples=60, deadline=None)
    @given(formulas(MONADIC, 4), formulas(MONADIC, 4))
    def test_hits_are_two_world(self, a, b):
        q, t = Question(a), Question(b)
        cm = find_countermodel([q], TOP, t, Bounds(3, 2), MONADIC)
        if cm is not None:
            w, v = cm.pair
            restricted = cm.structure.restrict_worlds([w, v])
            assert is_countermodel(restricted, (w, v), [q], TOP, t)


class TestCorrespondence:
    def test_same_world(self):
        m = random_structure(RICH, 2, 2, random.Random(9))
        d = two_world_correspondence(m, "w1", "w1")
        for f in ("P(x)", "R(x, g(y))", "exists x. h(x) = d"):
            assert satisfies(d, sharp(Question(parse_formula(f, RICH)), RICH))

    def test_raining(self):
        sig = Signature.build({"F": 1, "R": 0}, rigid={"j": 0})
        q, t = Question(parse_formula("F(j)", sig)), Question(parse_formula("R", sig))
        cm = find_countermodel([q], TOP, t, Bounds(2, 1), sig)
        d = two_world_correspondence(cm.structure, *cm.pair)
        assert satisfies(d, sharp(q, sig)) and not satisfies(d, sharp(t, sig))

    def test_propositional(self):
        m = model(PROP, ["w1", "w2"], ["a"], {"w1": {"p": [[]], "q": []}, "w2": {"p": [], "q": []}})
        d = two_world_correspondence(m, "w1", "w2")
        assert not satisfies(d, sharp(Question(parse_formula("p", PROP)), PROP))
        assert satisfies(d, sharp(Question(parse_formula("q", PROP)), PROP))

    @settings(max_examples=150, deadline=None)
    @given(formulas(), st.integers(0, 10 ** 6), st.integers(1, 2))
    def test_random(self, f, seed, n):
        m = random_structure(RICH, 2, n, random.Random(seed))
        q = Question(f)
        rel = brute_partition(m, [q])
        for w, v in itertools.product(m.worlds, repeat=2):
            assert ((w, v) in rel) == satisfies(two_world_correspondence(m, w, v), sharp(q, RICH))
