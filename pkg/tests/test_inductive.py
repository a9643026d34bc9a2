"""Inductive types, fixpoints, evaluation, simpl, and the arithmetic closer."""

import random

import pytest

from nanoprover.errors import (
    DuplicateName,
    NonExhaustiveMatch,
    NonPositiveOccurrence,
    NonStructuralRecursion,
    OverlappingPatterns,
    UnboundSymbol,
)
from nanoprover.inductive import (
    ArithFailure,
    arith_solve,
    define_fixpoint,
    define_inductive,
    eval_term,
    induction_principle,
    nat_value,
    simpl,
    simpl_with_steps,
    value_to_int,
)
from nanoprover.kernel import (
    BVar,
    CalculusMode,
    Clause,
    Ctor,
    Derivation,
    Eq,
    FixpointDef,
    Forall,
    FunApp,
    Imp,
    InductiveDef,
    PredApp,
    Sequent,
    Var,
    check_derivation,
)
from nanoprover.prelude import add, mul, nat_literal

from .conftest import RANGE_SUM_DEF

I = CalculusMode.INTUITIONISTIC


class TestDefineInductive:
    def test_nat_registered(self, env):
        assert env.inductive("nat").constructors == (("O", ()), ("S", ("nat",)))

    def test_bool_registered(self, env):
        assert env.inductive("bool").constructors == (("true", ()), ("false", ()))

    def test_empty_type_registered(self, env):
        assert env.inductive("Empty_set").constructors == ()

    def test_idempotent_redefinition(self, env):
        assert define_inductive(env.inductive("nat"), env) is env or \
            define_inductive(env.inductive("nat"), env) == env

    def test_conflicting_redefinition(self, env):
        with pytest.raises(DuplicateName):
            define_inductive(InductiveDef("nat", (("O", ()),)), env)

    def test_unknown_argument_sort(self, env):
        with pytest.raises(NonPositiveOccurrence):
            define_inductive(InductiveDef("tree", (("leaf", ("mystery",)),)), env)


class TestDefineFixpoint:
    def test_add_registered(self, env):
        assert env.fixpoint("add") is not None

    def test_range_sum(self, range_env):
        assert range_env.fixpoint("range_sum") is not None

    def test_non_structural(self, env):
        bad = FixpointDef("loop", (("n", "nat"),), "nat", 0,
                          (Clause("O", (), Ctor("O")),
                           Clause("S", (("p", "nat"),),
                                  FunApp("loop", (Ctor("S", (Var("p", "nat"),)),)))))
        with pytest.raises(NonStructuralRecursion):
            define_fixpoint(bad, env)

    def test_self_argument_rejected(self, env):
        bad = FixpointDef("f", (("n", "nat"),), "nat", 0,
                          (Clause("O", (), FunApp("f", (Var("n", "nat"),))),
                           Clause("S", (("p", "nat"),), Ctor("O"))))
        with pytest.raises(NonStructuralRecursion):
            define_fixpoint(bad, env)

    def test_non_exhaustive(self, env):
        bad = FixpointDef("g", (("n", "nat"),), "nat", 0,
                          (Clause("O", (), Ctor("O")),))
        with pytest.raises(NonExhaustiveMatch):
            define_fixpoint(bad, env)

    def test_overlapping(self, env):
        bad = FixpointDef("g", (("n", "nat"),), "nat", 0,
                          (Clause("O", (), Ctor("O")),
                           Clause("O", (), Ctor("O")),
                           Clause("S", (("p", "nat"),), Ctor("O"))))
        with pytest.raises(OverlappingPatterns):
            define_fixpoint(bad, env)


class TestEval:
    def test_range_sum_three_is_six(self, range_env):
        v = eval_term(range_env, FunApp("range_sum", (nat_literal(3),)))
        assert value_to_int(v) == 6

    def test_defining_equation_add_zero(self, env):
        for m in (0, 1, 7):
            v = eval_term(env, add(nat_literal(0), nat_literal(m)))
            assert value_to_int(v) == m

    def test_range_sum_ten(self, range_env):
        v = eval_term(range_env, FunApp("range_sum", (nat_literal(10),)))
        assert value_to_int(v) == 55

    def test_unbound_symbol(self, env):
        with pytest.raises(UnboundSymbol):
            eval_term(env, FunApp("mystery", (nat_literal(0),)))
        with pytest.raises(UnboundSymbol):
            eval_term(env, Var("x", "nat"))

    def test_terminates_up_to_1000_and_is_deterministic(self, range_env):
        # Oracle: n (n + 1) / 2 for range_sum; Python ints for add/mul.
        for n in (0, 1, 17, 250, 1000):
            a = value_to_int(eval_term(range_env, FunApp("range_sum", (nat_literal(n),))))
            b = value_to_int(eval_term(range_env, FunApp("range_sum", (nat_literal(n),))))
            assert a == b == n * (n + 1) // 2
        assert value_to_int(eval_term(range_env, add(nat_literal(999), nat_literal(1000)))) == 1999
        assert value_to_int(eval_term(range_env, mul(nat_literal(31), nat_literal(32)))) == 992

    def test_bool_functions(self, env):
        for a in ("true", "false"):
            for b in ("true", "false"):
                v = eval_term(env, FunApp("orb", (Ctor(a), Ctor(b))))
                assert (v.ctor == "true") == ((a == "true") or (b == "true"))
                v = eval_term(env, FunApp("andb", (Ctor(a), Ctor(b))))
                assert (v.ctor == "true") == ((a == "true") and (b == "true"))


class TestInductionPrinciple:
    def test_nat_schema(self, env):
        p = induction_principle(env.inductive("nat"))
        P0 = PredApp("P", (Ctor("O"),))
        step = Forall("n", "nat",
                      Imp(PredApp("P", (BVar(0),)),
                          PredApp("P", (Ctor("S", (BVar(0),)),))))
        concl = Forall("n", "nat", PredApp("P", (BVar(0),)))
        assert p == Imp(P0, Imp(step, concl))

    def test_bool_case_analysis(self, env):
        p = induction_principle(env.inductive("bool"))
        assert p == Imp(PredApp("P", (Ctor("true"),)),
                        Imp(PredApp("P", (Ctor("false"),)),
                            Forall("b", "bool", PredApp("P", (BVar(0),)))))

    def test_empty_vacuous(self, env):
        p = induction_principle(env.inductive("Empty_set"))
        assert p == Forall("e", "Empty_set", PredApp("P", (BVar(0),)))

    def test_soundness_at_desk_scale(self, range_env):
        # 2 * range_sum n = n * (n + 1), confirmed by evaluation for n <= 100.
        for n in range(101):
            lhs = eval_term(range_env, mul(nat_literal(2),
                                           FunApp("range_sum", (nat_literal(n),))))
            rhs = eval_term(range_env, mul(nat_literal(n),
                                           add(nat_literal(n), nat_literal(1))))
            assert value_to_int(lhs) == value_to_int(rhs)


class TestSimpl:
    def test_boolean_head_constructor(self, env):
        b = Var("b", "bool")
        t = FunApp("negb", (FunApp("orb", (Ctor("true"), b)),))
        assert simpl(env, t) == Ctor("false")

    def test_range_sum_successor_clause(self, range_env):
        n = Var("n", "nat")
        t = FunApp("range_sum", (Ctor("S", (n,)),))
        assert simpl(range_env, t) == add(FunApp("range_sum", (n,)), Ctor("S", (n,)))

    def test_variable_is_fixed(self, env):
        n = Var("n", "nat")
        assert simpl(env, n) == n

    def test_rewrites_under_binders(self, range_env):
        n = Var("n", "nat")
        inner = Eq(FunApp("negb", (Ctor("true"),)), Ctor("false"), "bool")
        f = Forall("m", "nat", inner)
        assert simpl(range_env, f) == Forall("m", "nat",
                                             Eq(Ctor("false"), Ctor("false"), "bool"))

    def test_confluence_under_order_shuffle(self, range_env):
        # Rewriting random redexes (not the evaluator's leftmost-innermost
        # choice) must reach the same normal form.
        from nanoprover.inductive import _subst_clause, _replace_term

        def all_redexes(t):
            out = []

            def walk(u):
                match u:
                    case FunApp(name, args):
                        for a in args:
                            walk(a)
                        fx = range_env.fixpoint(name)
                        if fx is None:
                            return
                        scrut = args[fx.match_index]
                        if not isinstance(scrut, Ctor):
                            return
                        clause = next(c for c in fx.clauses if c.ctor == scrut.name)
                        smap = {p: args[i] for i, (p, _) in enumerate(fx.params)
                                if i != fx.match_index}
                        smap.update({b: s for (b, _), s in
                                     zip(clause.binders, scrut.args)})
                        out.append((u, _subst_clause(clause.rhs, smap)))
                    case Ctor(_, args):
                        for a in args:
                            walk(a)
                    case _:
                        pass

            walk(t)
            return out

        rng = random.Random(7)
        n = Var("n", "nat")
        t = mul(nat_literal(2), FunApp("range_sum", (Ctor("S", (Ctor("S", (n,)),)),)))
        reference = simpl(range_env, t)
        for _ in range(25):
            u = t
            while True:
                redexes = all_redexes(u)
                if not redexes:
                    break
                redex, rhs = rng.choice(redexes)
                u = _replace_term(u, redex, rhs)
            assert u == reference

    def test_steps_kernel_check(self, range_env):
        n = Var("n", "nat")
        f = Eq(FunApp("range_sum", (Ctor("S", (n,)),)), mul(nat_literal(2), n), "nat")
        _, steps = simpl_with_steps(range_env, f)
        assert steps
        for st in steps:
            d = Derivation("defeq", st.defeq,
                           Sequent((), Eq(st.lhs, st.rhs, "nat")))
            check_derivation(d, I, range_env)


class TestArithSolve:
    def test_paper_omega_step(self, range_env):
        n = Var("n", "nat")
        r = FunApp("range_sum", (n,))
        one = nat_literal(1)
        hyp = Eq(mul(nat_literal(2), r), mul(n, add(n, one)), "nat")
        goal = Eq(mul(nat_literal(2), add(r, add(n, one))),
                  add(add(mul(n, add(n, one)), add(n, one)), add(n, one)), "nat")
        seq = Sequent((("IH", hyp),), goal)
        d = arith_solve(range_env, [("IH", hyp)], goal, seq)
        check_derivation(d, I, range_env)

    def test_reflexive_goal_zero_combination(self, range_env):
        n = Var("n", "nat")
        goal = Eq(n, n, "nat")
        d = arith_solve(range_env, [], goal, Sequent((), goal))
        check_derivation(d, I, range_env)

    def test_unprovable_goal(self, range_env):
        n = Var("n", "nat")
        goal = Eq(n, add(n, nat_literal(1)), "nat")
        with pytest.raises(ArithFailure):
            arith_solve(range_env, [], goal, Sequent((), goal))

    def test_soundness_spot_check(self, range_env):
        # Success implies both sides agree under random atom assignments.
        rng = random.Random(20260811)
        n = Var("n", "nat")
        r = FunApp("range_sum", (n,))
        one = nat_literal(1)
        hyp = Eq(mul(nat_literal(2), r), mul(n, add(n, one)), "nat")
        goal = Eq(mul(nat_literal(2), add(r, add(n, one))),
                  add(add(mul(n, add(n, one)), add(n, one)), add(n, one)), "nat")
        arith_solve(range_env, [("IH", hyp)], goal, Sequent((("IH", hyp),), goal))
        for _ in range(200):
            nv = rng.randrange(0, 60)
            env_assignment = {"n": nv}
            lhs = _eval_poly(goal.lhs, range_env, env_assignment)
            rhs = _eval_poly(goal.rhs, range_env, env_assignment)
            hl = _eval_poly(hyp.lhs, range_env, env_assignment)
            hr = _eval_poly(hyp.rhs, range_env, env_assignment)
            # under an assignment satisfying the hypothesis, the goal holds
            if hl == hr:
                assert lhs == rhs


def _eval_poly(t, env, assignment):
    match t:
        case Var(n, _):
            return assignment[n]
        case Ctor("O", ()):
            return 0
        case Ctor("S", (x,)):
            return _eval_poly(x, env, assignment) + 1
        case FunApp("add", (a, b)):
            return _eval_poly(a, env, assignment) + _eval_poly(b, env, assignment)
        case FunApp("mul", (a, b)):
            return _eval_poly(a, env, assignment) * _eval_poly(b, env, assignment)
        case FunApp("range_sum", (a,)):
            n = _eval_poly(a, env, assignment)
            return n * (n + 1) // 2
    raise TypeError(t)
