"""Kernel: well-formedness, rule checking, schemas, the Hilbert checker."""

import pytest
from hypothesis import given, settings, strategies as st

from nanoprover.errors import (
    ArityMismatch,
    MissingMetavariable,
    ModeViolation,
    RuleViolation,
    SortMismatch,
    StepFailure,
    UnboundVariable,
)
from nanoprover.kernel import (
    And,
    ArrowSort,
    Atom,
    BOT,
    BVar,
    CalculusMode,
    Ctor,
    Derivation,
    EMPTY_ENV,
    Eq,
    Exists,
    Forall,
    FunApp,
    Imp,
    Neg,
    Or,
    PROP,
    PredApp,
    SchemaAll,
    Sequent,
    Var,
    check_derivation,
    elaborate,
    exists_close,
    forall_close,
    free_vars,
    hilbert_check,
    instantiate_schema,
    open_formula,
    close_formula,
    substitute,
    well_formed,
)
from nanoprover.surface import parse_formula

from .oracles import tt_entails

A, B, P, Q = Atom("A"), Atom("B"), Atom("P"), Atom("Q")
I = CalculusMode.INTUITIONISTIC
C = CalculusMode.CLASSICAL
H = CalculusMode.HILBERT


class TestWellFormed:
    def test_demorgan_ok(self, env):
        well_formed(parse_formula("~(P \\/ Q) <-> ~P /\\ ~Q", env), env)

    def test_unary_pred_ok(self, env):
        f = parse_formula("forall x:Type, P x", env,
                          schema={"P": ArrowSort(("Type",), PROP)})
        well_formed(f, env, schema={"P": ArrowSort(("Type",), PROP)})

    def test_arity_mismatch(self, env):
        bad = PredApp("P", (Var("x", "Type"), Var("y", "Type")))
        with pytest.raises(ArityMismatch):
            well_formed(bad, env, schema={"P": ArrowSort(("Type",), PROP)})

    def test_unbound_constructor(self, env):
        with pytest.raises(UnboundVariable):
            well_formed(Eq(Ctor("Mystery"), Ctor("O"), "nat"), env)

    def test_sort_mismatch(self, env):
        with pytest.raises(SortMismatch):
            well_formed(Eq(Ctor("true"), Ctor("O"), "nat"), env)

    def test_dangling_index(self, env):
        with pytest.raises(UnboundVariable):
            well_formed(Eq(BVar(0), Ctor("O"), "nat"), env)


class TestElaboration:
    def test_neg_is_imp_bottom(self):
        assert elaborate(Neg(A)) == Imp(A, BOT)

    def test_iff_is_two_imps(self):
        assert elaborate(parse_formula("A <-> B")) == And(Imp(A, B), Imp(B, A))

    def test_nested(self):
        assert elaborate(Neg(Neg(A))) == Imp(Imp(A, BOT), BOT)


class TestSubstitute:
    def test_direct_replacement(self, env):
        f = PredApp("P", (Var("x", "nat"),))
        out = substitute(f, Var("x", "nat"), Ctor("S", (Ctor("O"),)))
        assert out == PredApp("P", (Ctor("S", (Ctor("O"),)),))

    def test_bound_occurrence_untouched(self, env):
        x = Var("x", "Type")
        f = forall_close(x, PredApp("P", (x,)))
        assert substitute(f, x, Var("t", "Type")) == f

    def test_capture_avoided_by_namelessness(self):
        # (exists y. y = x)[x := y]  -->  free variables are exactly {y}
        x, y = Var("x", "Type"), Var("y", "Type")
        f = exists_close(Var("w", "Type"), Eq(Var("w", "Type"), x, "Type"), hint="y")
        out = substitute(f, x, y)
        assert free_vars(out) == frozenset({"y"})
        body = out.body
        assert body == Eq(BVar(0), y, "Type")

    def test_sort_precondition(self, env):
        f = Eq(Var("x", "nat"), Ctor("O"), "nat")
        with pytest.raises(SortMismatch):
            substitute(f, Var("x", "nat"), Ctor("true"), env)

    def test_free_var_property(self):
        # free-vars(f[x := t]) is contained in (free-vars(f) - {x}) + free-vars(t)
        x = Var("x", "nat")
        for t, tvars in ((Ctor("O"), frozenset()),
                         (FunApp("add", (Var("z", "nat"), Ctor("O"))), {"z"})):
            f = Eq(FunApp("add", (x, Var("y", "nat"))), x, "nat")
            out = substitute(f, x, t)
            assert free_vars(out) <= (free_vars(f) - {"x"}) | frozenset(tvars)


class TestSchemas:
    def test_a1_instance(self):
        inst = instantiate_schema("A1", {"A": Or(P, Q), "B": Atom("R")})
        assert inst == Imp(Or(P, Q), Imp(Atom("R"), Or(P, Q)))

    def test_em_instance(self):
        assert instantiate_schema("EM", {"A": P}) == Or(P, Neg(P))

    def test_identity_substitution(self):
        inst = instantiate_schema("A1", {"A": A, "B": B})
        assert inst == Imp(A, Imp(B, A))

    def test_swapped_substitution(self):
        inst = instantiate_schema("A1", {"A": B, "B": A})
        assert inst == Imp(B, Imp(A, B))

    def test_missing_metavariable(self):
        with pytest.raises(MissingMetavariable):
            instantiate_schema("A2", {"A": A, "B": B})


def _hyp(label, hyps, f):
    return Derivation("hyp", (label,), Sequent(hyps, f))


class TestCheckDerivation:
    def test_modus_ponens(self):
        hyps = (("h1", A), ("h2", Imp(A, B)))
        d = Derivation("imp_elim", (), Sequent(hyps, B),
                       (_hyp("h2", hyps, Imp(A, B)), _hyp("h1", hyps, A)))
        check_derivation(d, I, EMPTY_ENV)

    def test_hypothesis_leaf(self):
        d = _hyp("h", (("h", A),), A)
        check_derivation(d, I, EMPTY_ENV)

    def test_dne_mode_violation(self):
        hyps = (("h", Neg(Neg(A))),)
        d = Derivation("dne", (), Sequent(hyps, A),
                       (_hyp("h", hyps, Neg(Neg(A))),))
        check_derivation(d, C, EMPTY_ENV)
        with pytest.raises(ModeViolation):
            check_derivation(d, I, EMPTY_ENV)
        with pytest.raises(ModeViolation):
            check_derivation(d, H, EMPTY_ENV)

    def test_wrong_minor_premise(self):
        hyps = (("h1", B), ("h2", Imp(A, B)))
        d = Derivation("imp_elim", (), Sequent(hyps, B),
                       (_hyp("h2", hyps, Imp(A, B)), _hyp("h1", hyps, B)))
        with pytest.raises(RuleViolation):
            check_derivation(d, I, EMPTY_ENV)

    def test_violation_names_node_path(self):
        hyps = (("h", A),)
        bogus = Derivation("hyp", ("zzz",), Sequent(hyps, BOT))
        d = Derivation("bot_elim", (), Sequent(hyps, B),
                       (Derivation("bot_elim", (), Sequent(hyps, BOT), (bogus,)),))
        with pytest.raises(RuleViolation) as e:
            check_derivation(d, I, EMPTY_ENV)
        assert e.value.path == (0, 0)

    def test_eigenvariable_condition(self, env):
        # forall_intro whose eigenvariable occurs in a hypothesis is rejected.
        x = Var("x", "nat")
        body = Eq(BVar(0), BVar(0), "nat")
        goal = Forall("x", "nat", body)
        hyps = (("h", Eq(x, Ctor("O"), "nat")),)
        inner = Derivation("eq_refl", (), Sequent(hyps, Eq(x, x, "nat")))
        d = Derivation("forall_intro", ("x",), Sequent(hyps, goal), (inner,))
        with pytest.raises(RuleViolation):
            check_derivation(d, I, env)
        d_ok = Derivation(
            "forall_intro", ("y",), Sequent((), goal),
            (Derivation("eq_refl", (),
                        Sequent((), Eq(Var("y", "nat"), Var("y", "nat"), "nat"))),))
        check_derivation(d_ok, I, env)

    def test_total_on_garbage_trees(self):
        # Arbitrary rule ids and shapes fail cleanly instead of crashing.
        junk = Derivation("frobnicate", (1, 2), Sequent((), A), ())
        with pytest.raises(RuleViolation):
            check_derivation(junk, I, EMPTY_ENV)
        deep = Derivation("hyp", ("h",), Sequent((), A))
        for _ in range(5000):
            deep = Derivation("bot_elim", (), Sequent((), A), (deep,))
        with pytest.raises(RuleViolation):
            check_derivation(deep, I, EMPTY_ENV)  # no RecursionError

    def test_hilbert_mode_rejects_nj_rules(self):
        d = Derivation("and_intro", (), Sequent((), And(A, A)),
                       (_hyp("h", (("h", A),), A), _hyp("h", (("h", A),), A)))
        with pytest.raises(ModeViolation):
            check_derivation(d, H, EMPTY_ENV)

    def test_mode_monotonicity_on_sample(self):
        # Everything accepted intuitionistically is accepted classically.
        hyps = (("h", And(A, B)),)
        d = Derivation("and_elim_l", (), Sequent(hyps, A),
                       (_hyp("h", hyps, And(A, B)),))
        check_derivation(d, I, EMPTY_ENV)
        check_derivation(d, C, EMPTY_ENV)

    def test_mode_monotonicity_over_corpus(self):
        # Every intuitionistic corpus derivation re-checks unchanged in
        # ClassicalNJ mode.
        from .conftest import replay_theorems

        count = 0
        for name in ("a2_double_negation.npv", "a3_demorgan_coq.npv",
                     "a3_demorgan_bool.npv", "a6_range_sum.npv",
                     "witness.npv"):
            for thm, env, thm_mode in replay_theorems(name, I):
                if thm_mode is I:
                    check_derivation(thm.derivation, I, env)
                    check_derivation(thm.derivation, C, env)
                    count += 1
        assert count >= 4


class TestHilbertCheck:
    def _five_step(self):
        AA = Imp(A, A)
        return [
            instantiate_schema("A2", {"A": A, "B": AA, "C": A}),
            instantiate_schema("A1", {"A": A, "B": AA}),
            Imp(Imp(A, AA), AA),
            instantiate_schema("A1", {"A": A, "B": A}),
            AA,
        ]

    def test_classic_five_step_proof(self):
        hilbert_check(self._five_step(), [], Imp(A, A))

    def test_hypothesis_repetition(self):
        hilbert_check([A], [A], A)

    def test_unjustified_step(self):
        with pytest.raises(StepFailure) as e:
            hilbert_check([B], [A], B)
        assert e.value.index == 0

    def test_wrong_target(self):
        steps = self._five_step()
        with pytest.raises(StepFailure):
            hilbert_check(steps, [], Imp(B, B))

    def test_soundness_via_truth_tables(self):
        # Each accepted step sequence only ever derives tautologies.
        steps = self._five_step()
        hilbert_check(steps, [], Imp(A, A))
        for s in steps:
            assert tt_entails([], s)


class TestCorpusSoundness:
    def test_propositional_corpus_theorems_are_truth_table_valid(self):
        # Every kernel-accepted propositional derivation in the corpus proves
        # a boolean tautology (checked exhaustively over its atoms).
        from nanoprover.kernel import is_propositional
        from .conftest import replay_theorems

        scripts = [("a2_double_negation.npv", I), ("a3_demorgan_coq.npv", I),
                   ("a3_demorgan_isabelle.npv", I), ("peirce.npv", C)]
        checked = 0
        for name, mode in scripts:
            for thm, env, thm_mode in replay_theorems(name, mode):
                body = thm.statement
                while isinstance(body, SchemaAll):
                    body = body.body
                if not is_propositional(body):
                    continue
                check_derivation(thm.derivation, thm_mode, env)
                assert tt_entails([], body), thm.name
                checked += 1
        assert checked >= 5


class TestInvariantSoundness:
    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_classical_derivations_truth_table_sound(self, env, data):
        # Random tauto-style targets: anything the classical pipeline accepts
        # must be truth-table valid (checked exhaustively over its atoms).
        from .oracles import random_formula
        import random as _random

        from nanoprover.translate import classical_auto
        from nanoprover.errors import NotClassicallyValid

        rng = _random.Random(data.draw(st.integers(0, 10_000)))
        f = random_formula(rng, ("P", "Q", "R"), 4)
        try:
            thm = classical_auto(f)
        except NotClassicallyValid:
            assert not tt_entails([], f)
            return
        check_derivation(thm.derivation, C, EMPTY_ENV)
        assert tt_entails([], f)
