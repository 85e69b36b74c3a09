import pytest

from produpd import (
    TOP,
    ActionDiamond,
    And,
    Announce,
    Atom,
    Bottom,
    Box,
    BudgetExceeded,
    EvalBudget,
    EventModel,
    ExistsProp,
    Global,
    Implies,
    KripkeModel,
    NominalOutsideProductContext,
    Not,
    Nu,
    Nominal,
    PositivityViolation,
    UnknownEvent,
    announcement_event_model,
    extension,
    gfp_oracle,
    holds,
    parse_formula,
    product_update,
)
from produpd.harness import FuzzConfig, random_event_model, random_formula, random_model
from produpd.semantics import Evaluator
from produpd.syntax import LanguageTag

p, q = Atom("p"), Atom("q")


def two_chain():
    return KripkeModel(("w0", "w1"), frozenset({("w0", "w1")}), {"p": frozenset({"w1"})})


class TestExtensionExamples:
    def test_box(self):
        assert extension(two_chain(), Box(p)) == {"w0", "w1"}

    def test_witness_quantifier_names_the_extension(self):
        cfg = FuzzConfig(seed=31, cases=1)
        phi = parse_formula("exists q. (q & U(q -> p))")
        for i in range(20):
            m = random_model(cfg, i)
            assert extension(m, phi) == m.valuation.get("p", frozenset())

    def test_fixpoint_iteration(self):
        m = KripkeModel(
            ("w0", "w1"), frozenset({("w0", "w0"), ("w0", "w1")}), {"q": frozenset({"w0"})}
        )
        body = And(q, Box(p))
        assert extension(m, Nu("p", body)) == frozenset()
        assert gfp_oracle(m, "p", body) == frozenset()

    def test_product_examples(self):
        m = KripkeModel(
            ("w0", "w1"),
            frozenset({("w0", "w1"), ("w1", "w1")}),
            {"p": frozenset({"w0"})},
        )
        a = EventModel(
            ("a0", "a1"),
            frozenset({("a0", "a0"), ("a0", "a1"), ("a1", "a1")}),
            {"a0": p, "a1": TOP},
        )
        assert extension(m, ActionDiamond("a0", p), events=a) == {"w0"}
        # frozen from the brute-force product evaluation below
        assert extension(m, ActionDiamond("a1", Box(p)), events=a) == frozenset()
        # independent route: build the product and evaluate there directly
        prod = product_update(m, a)
        box_ext = extension(prod, Box(p), events=a)
        derived = {
            w
            for w in m.worlds
            if w in extension(m, a.pre["a1"]) and f"({w},a1)" in box_ext
        }
        assert extension(m, ActionDiamond("a1", Box(p)), events=a) == derived


class TestHolds:
    def test_top(self):
        assert holds(two_chain(), "w0", TOP)

    def test_negation(self):
        m = two_chain()
        for w in m.worlds:
            assert holds(m, w, Not(p)) == (not holds(m, w, p))

    def test_global(self):
        m = two_chain()
        assert holds(m, "w0", Global(p)) == (extension(m, p) == set(m.worlds))


class TestGfpOracle:
    def test_var_body_gives_domain(self):
        m = two_chain()
        assert gfp_oracle(m, "p", p) == set(m.worlds)

    def test_false_body(self):
        assert gfp_oracle(two_chain(), "p", Bottom()) == frozenset()

    def test_rejects_negative_body(self):
        with pytest.raises(PositivityViolation):
            gfp_oracle(two_chain(), "p", Not(p))


class TestBooleanStructure:
    def test_duality_and_global_shape(self):
        cfg = FuzzConfig(seed=32, cases=1)
        for i in range(40):
            m = random_model(cfg, i)
            phi = random_formula(cfg, i, LanguageTag.BASE_MSO)
            psi = random_formula(cfg, i, LanguageTag.BASE_MSO, label="formula2")
            worlds = set(m.worlds)
            assert extension(m, Not(phi)) == worlds - extension(m, phi)
            assert extension(m, And(phi, psi)) == extension(m, phi) & extension(m, psi)
            g = extension(m, Global(phi))
            assert g in (frozenset(), frozenset(worlds))
            assert (g == worlds) == (extension(m, phi) == worlds)


class TestFixpointAgreement:
    def test_triple_agreement(self):
        cfg = FuzzConfig(seed=33, cases=1)
        for i in range(50):
            m = random_model(cfg, i)
            body = random_formula(cfg, i, LanguageTag.MU_FRAGMENT)
            var = body.var
            inner = body.body
            iterative = extension(m, Nu(var, inner))
            oracle = gfp_oracle(m, var, inner)
            encoding = extension(
                m, ExistsProp(var, And(Atom(var), Global(Implies(Atom(var), inner))))
            )
            assert iterative == oracle == encoding


class TestDynamicClauses:
    def test_action_clause_consistency(self):
        cfg = FuzzConfig(seed=34, cases=1)
        for i in range(25):
            m = random_model(cfg, i)
            a = random_event_model(cfg, i)
            psi = random_formula(
                cfg, i, LanguageTag.SCOPED_NOMINALS, n_events=len(a.events), max_eps=1
            )
            prod = product_update(m, a)
            for alpha in a.events:
                lhs = extension(m, ActionDiamond(alpha, psi), events=a)
                pre_ext = extension(m, a.pre[alpha])
                body_ext = extension(prod, psi, events=a)
                rhs = {
                    w for w in pre_ext if f"({w},{alpha})" in body_ext
                }
                assert lhs == rhs

    def test_announcement_as_product(self):
        cfg = FuzzConfig(seed=35, cases=1)
        for i in range(25):
            m = random_model(cfg, i)
            announced = random_formula(cfg, i, LanguageTag.BASE_MSO, max_eps=0)
            psi = random_formula(cfg, i, LanguageTag.BASE_MSO, label="psi", max_eps=1)
            direct = extension(m, Announce(announced, psi))
            one_event = announcement_event_model(announced)
            via_product = extension(m, ActionDiamond("a0", psi), events=one_event)
            assert direct == via_product


class TestErrors:
    def test_nominal_needs_tags(self):
        with pytest.raises(NominalOutsideProductContext):
            extension(two_chain(), Nominal(0))

    def test_unknown_event(self):
        a = EventModel(("a0",), frozenset(), {"a0": TOP})
        with pytest.raises(UnknownEvent):
            extension(two_chain(), ActionDiamond("a7", p), events=a)

    def test_no_ambient_event_model(self):
        with pytest.raises(UnknownEvent):
            extension(two_chain(), ActionDiamond("a0", p))

    def test_nominal_index_out_of_range(self):
        m = two_chain()
        a = EventModel(("a0",), frozenset({("a0", "a0")}), {"a0": TOP})
        with pytest.raises(UnknownEvent):
            extension(m, ActionDiamond("a0", Nominal(3)), events=a)

    def test_quantifier_world_budget(self):
        worlds = tuple(f"w{i}" for i in range(5))
        m = KripkeModel(worlds, frozenset(), {})
        budget = EvalBudget(max_worlds_for_quantifier=4)
        with pytest.raises(BudgetExceeded):
            extension(m, ExistsProp("p", p), budget=budget)

    def test_total_enumeration_budget(self):
        m = KripkeModel(("w0", "w1", "w2"), frozenset(), {})
        budget = EvalBudget(max_total_subset_enumerations=10)
        with pytest.raises(BudgetExceeded):
            extension(m, ExistsProp("p", ExistsProp("q", And(p, q))), budget=budget)

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            EvalBudget(max_worlds_for_quantifier=0)


class TestEmptyModels:
    def test_global_vacuous_through_announcement(self):
        m = KripkeModel(("w0",), frozenset(), {})
        # relativising to nothing: the body is evaluated on the empty model
        assert extension(m, Announce(Bottom(), Global(p))) == frozenset()
        assert holds(m, "w0", Not(Announce(Bottom(), TOP)))


class TestEvaluatorSessions:
    def test_env_overrides_act_as_valuations(self):
        m = KripkeModel(("w0", "w1"), frozenset({("w0", "w1")}), {})
        ev = Evaluator(m)
        assert ev.extension_mask(Box(p), {"p": 0b10}) == 0b11
        assert ev.extension_mask(Box(p), {"p": 0b00}) == 0b10

    def test_sessions_reuse_products(self):
        m = two_chain()
        a = EventModel(("a0", "a1"), frozenset(), {"a0": p, "a1": TOP})
        ev = Evaluator(m, events=a)
        ev.extension(ActionDiamond("a0", p))
        ev.extension(ActionDiamond("a1", p))
        assert len(ev._products) == 1
