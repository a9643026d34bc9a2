"""The standard environment every session starts from.

Provides nat (O, S) with add/mul, bool (true, false) with negb/andb/orb, the
empty set, and the classical lemma NNPP (forall P: Prop, ~~P -> P) whose use
is gated on ClassicalNJ mode.
"""

from __future__ import annotations

from .kernel import (
    ADD_DEF,
    Atom,
    BVar,
    CalculusMode,
    Clause,
    Ctor,
    Derivation,
    Env,
    EMPTY_ENV,
    FixpointDef,
    FunApp,
    Imp,
    InductiveDef,
    MUL_DEF,
    NAT_DEF,
    Neg,
    PROP,
    SchemaAll,
    Sequent,
    TheoremRecord,
    Var,
    check_derivation,
)
from .inductive import define_fixpoint, define_inductive

BOOL_DEF = InductiveDef("bool", (("true", ()), ("false", ())))
EMPTY_SET_DEF = InductiveDef("Empty_set", ())

NEGB_DEF = FixpointDef(
    "negb", (("a", "bool"),), "bool", 0,
    (Clause("true", (), Ctor("false")),
     Clause("false", (), Ctor("true"))),
)
ANDB_DEF = FixpointDef(
    "andb", (("a", "bool"), ("b", "bool")), "bool", 0,
    (Clause("true", (), Var("b", "bool")),
     Clause("false", (), Ctor("false"))),
)
ORB_DEF = FixpointDef(
    "orb", (("a", "bool"), ("b", "bool")), "bool", 0,
    (Clause("true", (), Ctor("true")),
     Clause("false", (), Var("b", "bool"))),
)


def nnpp_derivation() -> Derivation:
    """forall P: Prop, ~~P -> P, by one dne step."""
    p = Atom("P")
    stmt = SchemaAll("P", PROP, Imp(Neg(Neg(p)), p))
    hyps = (("H", Neg(Neg(p))),)
    return Derivation(
        "schema_intro", ("P",), Sequent((), stmt),
        (Derivation(
            "imp_intro", ("H",), Sequent((), Imp(Neg(Neg(p)), p)),
            (Derivation(
                "dne", (), Sequent(hyps, p),
                (Derivation("hyp", ("H",), Sequent(hyps, Neg(Neg(p)))),),
            ),),
        ),),
    )


def standard_env() -> Env:
    env = EMPTY_ENV
    for ind in (NAT_DEF, BOOL_DEF, EMPTY_SET_DEF):
        env = define_inductive(ind, env)
    for fx in (ADD_DEF, MUL_DEF, NEGB_DEF, ANDB_DEF, ORB_DEF):
        env = define_fixpoint(fx, env)
    d = nnpp_derivation()
    check_derivation(d, CalculusMode.CLASSICAL, EMPTY_ENV)
    return env.with_theorem(TheoremRecord("NNPP", d.concl.goal, CalculusMode.CLASSICAL))


def nat_literal(n: int) -> Ctor:
    t = Ctor("O")
    for _ in range(n):
        t = Ctor("S", (t,))
    return t


def add(a, b) -> FunApp:
    return FunApp("add", (a, b))


def mul(a, b) -> FunApp:
    return FunApp("mul", (a, b))
