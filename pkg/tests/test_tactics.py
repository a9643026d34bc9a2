"""Tactics, tacticals, tauto, and the LCF discipline."""

import pytest

from nanoprover.errors import (
    KernelRejection,
    NotProvable,
    NonPropositionalGoal,
    OpenGoals,
    TacticError,
)
from nanoprover.kernel import (
    And,
    Atom,
    BOT,
    CalculusMode,
    Eq,
    Exists,
    Imp,
    Neg,
    Or,
    PROP,
    SchemaAll,
    Var,
    check_derivation,
    elaborate,
    exists_close,
    forall_close,
)
from nanoprover.prelude import add, mul, nat_literal
from nanoprover.surface import parse_formula
from nanoprover.tactics import (
    Call,
    First,
    ProofState,
    RepeatPlus,
    Tactic,
    ThenAll,
    Try,
    apply_tactic,
    eval_tactical,
    init_proof,
    qed,
    register_theorem,
    replay,
    tauto,
)

from .oracles import formula_space, tt_valid

I = CalculusMode.INTUITIONISTIC
C = CalculusMode.CLASSICAL
P, Q = Atom("P"), Atom("Q")


def run(state, *tactics):
    for t in tactics:
        state = apply_tactic(state, t)
    return state


class TestInitProof:
    def test_demorgan_statement(self, env):
        stmt = parse_formula("forall P Q: Prop, ~(P \\/ Q) <-> ~P /\\ ~Q", env)
        st = init_proof(stmt, I, env)
        assert len(st.goals) == 1
        assert st.goals[0].goal == stmt

    def test_bottom_is_legal_to_state(self, env):
        st = init_proof(BOT, I, env)
        assert len(st.goals) == 1

    def test_sum_formula_statement(self, range_env):
        stmt = parse_formula("forall n, 2 * range_sum n = n * (n + 1)", range_env)
        st = init_proof(stmt, I, range_env)
        assert len(st.goals) == 1


class TestApplyTactic:
    def test_destruct_disjunction_two_subgoals(self, env):
        stmt = parse_formula("(~P \\/ ~Q) -> False", env)
        st = run(init_proof(stmt, I, env), Tactic("intro", ("H_or",)))
        st = apply_tactic(st, Tactic("destruct", ("H_or", ("H_P", "H_Q"))))
        assert len(st.goals) == 2
        assert st.goals[0].hyp("H_P") == Neg(P)
        assert st.goals[1].hyp("H_Q") == Neg(Q)

    def test_nnpp_mode_violation(self, env):
        st = init_proof(parse_formula("P \\/ ~P", env), I, env)
        with pytest.raises(TacticError) as e:
            apply_tactic(st, Tactic("nnpp"))
        assert e.value.kind == "ModeViolation"

    def test_exists_witness(self, env):
        # exists x : Type, ~P x from a hypothesis ~P x with x in context.
        penv = env.with_pred("P", ("Type",))
        x = Var("x", "Type")
        p_x = parse_formula("P x", penv, variables={"x": "Type"})
        stmt = forall_close(x, Imp(Neg(p_x), exists_close(x, Neg(p_x))))
        st = init_proof(stmt, I, penv)
        st = run(st, Tactic("intro", ("x",)), Tactic("intro", ("H",)))
        st = apply_tactic(st, Tactic("exists", (x,)))
        assert st.goals[0].goal == Neg(p_x)
        st = apply_tactic(st, Tactic("exact", ("H",)))
        assert st.complete
        qed(st, "exists_demo")

    def test_intro_names_must_be_fresh(self, env):
        st = init_proof(parse_formula("P -> P -> P", env), I, env)
        st = apply_tactic(st, Tactic("intro", ("H",)))
        with pytest.raises(TacticError):
            apply_tactic(st, Tactic("intro", ("H",)))

    def test_cut(self, env):
        st = init_proof(parse_formula("P -> P", env), I, env)
        st = apply_tactic(st, Tactic("cut", (Q,)))
        assert [g.goal for g in st.goals] == \
            [Imp(Q, Imp(P, P)), Q]

    def test_rewrite_with_hypothesis_equation(self, range_env):
        # H : n = m rewrites the goal left-to-right and right-to-left.
        stmt = parse_formula(
            "forall n m: nat, n = m -> n + n = m + m", range_env)
        st = run(init_proof(stmt, I, range_env),
                 Tactic("intros", ("n", "m", "H")))
        st_fwd = apply_tactic(st, Tactic("rewrite", ("->", "H")))
        assert qed(apply_tactic(st_fwd, Tactic("reflexivity")),
                   "rw_fwd").name == "rw_fwd"
        st_bwd = apply_tactic(st, Tactic("rewrite", ("<-", "H")))
        assert qed(apply_tactic(st_bwd, Tactic("reflexivity")),
                   "rw_bwd").name == "rw_bwd"

    def test_rewrite_backwards_with_theorem(self, range_env):
        from nanoprover.tactics import register_theorem

        lemma = parse_formula(
            "forall n: nat, range_sum (n + 1) = range_sum n + (n + 1)",
            range_env)
        st = run(init_proof(lemma, I, range_env), Tactic("intros",))
        st = apply_tactic(st, Tactic("induction", ("n",)))
        st = eval_tactical(st, ThenAll(Call(Tactic("simpl")),
                                       Call(Tactic("reflexivity"))))
        st = run(st, Tactic("simpl"), Tactic("arith"))
        env2 = register_theorem(range_env, qed(st, "range_sum_lemma"))

        # rewrite <- replaces the right-hand side by the left-hand side
        goal = parse_formula(
            "forall n: nat, range_sum n + (n + 1) = range_sum (n + 1)", env2)
        st = run(init_proof(goal, I, env2), Tactic("intros",))
        st = apply_tactic(st, Tactic("rewrite", ("<-", "range_sum_lemma")))
        st = apply_tactic(st, Tactic("reflexivity"))
        qed(st, "shifted")


def _pred1():
    from nanoprover.kernel import ArrowSort
    return ArrowSort(("Type",), PROP)


class TestEvalTactical:
    def test_thenall_boolean_demorgan(self, env):
        stmt = parse_formula(
            "forall a b: bool, negb (a || b) = ((negb a) && (negb b))", env)
        st = run(init_proof(stmt, I, env), Tactic("intros", ("a", "b")))
        st = eval_tactical(st, ThenAll(ThenAll(Call(Tactic("destruct", ("a", ()))),
                                               Call(Tactic("simpl"))),
                                       Call(Tactic("reflexivity"))))
        assert st.complete
        qed(st, "bool_demorgan")

    def test_try_swallows_failure(self, env):
        st = init_proof(parse_formula("forall P: Prop, ~~P -> P", env), I, env)
        st2 = eval_tactical(st, Try(Call(Tactic("tauto"))))
        assert st2.goals == st.goals  # state unchanged

    def test_repeat_plus_requires_one_success(self, env):
        st = init_proof(parse_formula("P -> P", env), I, env)
        with pytest.raises(TacticError):
            eval_tactical(st, RepeatPlus(Call(Tactic("split"))))

    def test_repeat_plus_closes_remaining_subgoals(self, env):
        stmt = parse_formula("(~P \\/ ~Q) -> P -> Q -> False", env)
        st = run(init_proof(stmt, I, env),
                 Tactic("intro", ("H_or",)), Tactic("intro", ("H_P",)),
                 Tactic("intro", ("H_Q",)))
        st = apply_tactic(st, Tactic("destruct", ("H_or", ("H_nP", "H_nQ"))))
        assert len(st.goals) == 2
        st = eval_tactical(st, RepeatPlus(Call(Tactic("contradiction"))))
        assert st.complete
        qed(st, "repeat_demo")

    def test_first_picks_first_applicable(self, env):
        st = init_proof(parse_formula("P \\/ (Q -> Q)", env), I, env)
        st = eval_tactical(st, First((Call(Tactic("split")), Call(Tactic("right")))))
        assert st.goals[0].goal == Imp(Q, Q)

    def test_thenall_equals_manual_application(self, env):
        stmt = parse_formula("(P -> P) /\\ (Q -> Q)", env)
        st0 = init_proof(stmt, I, env)
        st_a = eval_tactical(st0, ThenAll(Call(Tactic("split")),
                                          Call(Tactic("intro", ("h",)))))
        st_b = apply_tactic(st0, Tactic("split"))
        st_b1 = apply_tactic(st_b, Tactic("intro", ("h",)))
        # manually move to the second subgoal: apply to each in order
        from nanoprover.tactics import _step
        st_b2, _ = _step(st_b1, Tactic("intro", ("h",)), st_b1.holes[1].id)
        assert [g.goal for g in st_a.goals] == [g.goal for g in st_b2.goals]


class TestTauto:
    def test_closes_double_negated_em(self, env):
        st = init_proof(parse_formula("~~(P \\/ ~P)", env), I, env)
        st = tauto(st)
        assert st.complete
        qed(st, "dn_em")

    def test_closes_dni(self, env):
        st = init_proof(parse_formula("P -> ~~P", env), I, env)
        assert tauto(st).complete

    def test_peirce_not_provable(self, env):
        st = init_proof(parse_formula("((P -> Q) -> P) -> P", env), I, env)
        with pytest.raises(NotProvable):
            tauto(st)

    def test_trivial_implication(self, env):
        st = init_proof(parse_formula("P -> P", env), I, env)
        assert tauto(st).complete

    def test_non_propositional_goal(self, env):
        st = init_proof(parse_formula("forall n, n = n", env), I, env)
        with pytest.raises(NonPropositionalGoal):
            tauto(st)

    def test_uses_hypotheses(self, env):
        st = init_proof(parse_formula("(P -> Q) -> P -> Q", env), I, env)
        st = run(st, Tactic("intro", ("H",)), Tactic("intro", ("HP",)))
        assert tauto(st).complete

    def test_desk_scale_decision_correctness(self, env):
        # height <= 3 over {P, Q}: provable => valid, and Glivenko both ways.
        from nanoprover import g4ip
        for f in formula_space(("P", "Q"), 3, include_bottom=False):
            e = elaborate(f)
            if g4ip.decide((), e) is not None:
                assert tt_valid(f)
            glv = g4ip.decide((), Imp(Imp(e, BOT), BOT)) is not None
            assert glv == tt_valid(f)


class TestQed:
    def test_open_goals_rejected(self, env):
        st = init_proof(parse_formula("P -> P", env), I, env)
        with pytest.raises(OpenGoals):
            qed(st, "incomplete")

    def test_registered_theorem_usable_by_apply(self, env):
        st = tauto(init_proof(parse_formula("forall P: Prop, P -> P", env), I, env))
        thm = qed(st, "id_thm")
        env2 = register_theorem(env, thm)
        st2 = init_proof(parse_formula("Q -> Q", env2), I, env2)
        st2 = apply_tactic(st2, Tactic("apply", ("id_thm",)))
        assert st2.complete

    def test_classical_theorem_not_usable_intuitionistically(self, env):
        st2 = init_proof(parse_formula("~~Q -> Q", env), I, env)
        with pytest.raises(TacticError) as e:
            apply_tactic(st2, Tactic("apply", ("NNPP",)))
        assert e.value.kind == "ModeViolation"

    def test_nnpp_applies_classically(self, env):
        st = init_proof(parse_formula("~~Q -> Q", env), C, env)
        st = run(st, Tactic("intro", ("H",)), Tactic("apply", ("NNPP",)),
                 Tactic("exact", ("H",)))
        assert st.complete
        qed(st, "dne_via_nnpp")


class TestReplay:
    def test_trace_reproduces_state(self, env):
        stmt = parse_formula("forall P: Prop, ~~(P \\/ ~P)", env)
        st = init_proof(stmt, I, env)
        for t in [Tactic("unfold", ("not",)), Tactic("intros", ("P", "f")),
                  Tactic("apply", ("f",)), Tactic("right"),
                  Tactic("intro", ("P_holds",)), Tactic("apply", ("f",)),
                  Tactic("left"), Tactic("exact", ("P_holds",))]:
            st = apply_tactic(st, t)
        assert replay(stmt, I, env, st.trace) == st
