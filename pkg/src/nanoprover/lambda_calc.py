"""Lambda calculus with simple types and the Curry-Howard bridge.

Terms use de Bruijn indices (binder hints are kept for printing only, and
ignored by alpha_eq).  Reduction is leftmost-outermost, so the fuel bound in
`normalize` is meaningful: it finds the normal form whenever one exists.

Classical proof terms use an opaque family of constants `dn` with
dn_A : ((A -> Empty) -> Empty) -> A; they never reduce.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import (
    AnnotationRequired,
    FuelExhausted,
    ModeViolation,
    NonPropositional,
    TypingError,
    UnsupportedFragment,
)
from .kernel import (
    And,
    Atom,
    Bottom,
    BOT,
    CalculusMode,
    Derivation,
    Formula,
    Imp,
    Or,
    SchemaAll,
    Sequent,
    elaborate,
    is_propositional,
)

# ---------------------------------------------------------------------------
# Simple types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class EmptyT:
    pass


@dataclass(frozen=True)
class SingletonT:
    pass


@dataclass(frozen=True)
class Arrow:
    left: "SimpleType"
    right: "SimpleType"


@dataclass(frozen=True)
class Product:
    left: "SimpleType"
    right: "SimpleType"


@dataclass(frozen=True)
class Sum:
    left: "SimpleType"
    right: "SimpleType"


SimpleType = Union[Base, EmptyT, SingletonT, Arrow, Product, Sum]

EMPTY_T = EmptyT()
UNIT_T = SingletonT()


def type_of_formula(f: Formula) -> SimpleType:
    """atoms -> Base, False -> Empty, -> -> Arrow, /\\ -> Product, \\/ -> Sum."""
    match elaborate(f):
        case Atom(n):
            return Base(n)
        case Bottom():
            return EMPTY_T
        case Imp(l, r):
            return Arrow(type_of_formula(l), type_of_formula(r))
        case And(l, r):
            return Product(type_of_formula(l), type_of_formula(r))
        case Or(l, r):
            return Sum(type_of_formula(l), type_of_formula(r))
    raise NonPropositional(f"formula has no simple-type counterpart: {f}")


def formula_of_type(t: SimpleType) -> Formula:
    match t:
        case Base(n):
            return Atom(n)
        case EmptyT():
            return BOT
        case Arrow(l, r):
            return Imp(formula_of_type(l), formula_of_type(r))
        case Product(l, r):
            return And(formula_of_type(l), formula_of_type(r))
        case Sum(l, r):
            return Or(formula_of_type(l), formula_of_type(r))
    raise TypingError(f"type has no propositional counterpart: {t}")


def pretty_type(t: SimpleType) -> str:
    match t:
        case Base(n):
            return n
        case EmptyT():
            return "0"
        case SingletonT():
            return "1"
        case Arrow(l, r):
            ls = pretty_type(l)
            if isinstance(l, Arrow):
                ls = f"({ls})"
            return f"{ls} -> {pretty_type(r)}"
        case Product(l, r):
            return f"({pretty_type(l)} * {pretty_type(r)})"
        case Sum(l, r):
            return f"({pretty_type(l)} + {pretty_type(r)})"


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LVar:
    index: int


@dataclass(frozen=True)
class Abs:
    hint: str
    ann: SimpleType | None
    body: "LambdaTerm"


@dataclass(frozen=True)
class App:
    fn: "LambdaTerm"
    arg: "LambdaTerm"


@dataclass(frozen=True)
class Pair:
    left: "LambdaTerm"
    right: "LambdaTerm"


@dataclass(frozen=True)
class ProjL:
    body: "LambdaTerm"


@dataclass(frozen=True)
class ProjR:
    body: "LambdaTerm"


@dataclass(frozen=True)
class InL:
    body: "LambdaTerm"
    ann: SimpleType | None = None  # the full sum type


@dataclass(frozen=True)
class InR:
    body: "LambdaTerm"
    ann: SimpleType | None = None


@dataclass(frozen=True)
class Case:
    scrut: "LambdaTerm"
    hint_l: str
    left: "LambdaTerm"
    hint_r: str
    right: "LambdaTerm"


@dataclass(frozen=True)
class Absurd:
    body: "LambdaTerm"
    ann: SimpleType | None = None


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Dn:
    """Classical constant dn_A : ((A -> 0) -> 0) -> A; opaque to reduction."""

    ann: SimpleType


LambdaTerm = Union[LVar, Abs, App, Pair, ProjL, ProjR, InL, InR, Case, Absurd, Unit, Dn]

UNIT = Unit()


def _map_subterms(t: LambdaTerm, fn) -> LambdaTerm:
    match t:
        case LVar() | Unit() | Dn():
            return t
        case Abs(h, a, b):
            return Abs(h, a, fn(b, 1))
        case App(f, a):
            return App(fn(f, 0), fn(a, 0))
        case Pair(l, r):
            return Pair(fn(l, 0), fn(r, 0))
        case ProjL(b):
            return ProjL(fn(b, 0))
        case ProjR(b):
            return ProjR(fn(b, 0))
        case InL(b, a):
            return InL(fn(b, 0), a)
        case InR(b, a):
            return InR(fn(b, 0), a)
        case Case(s, hl, l, hr, r):
            return Case(fn(s, 0), hl, fn(l, 1), hr, fn(r, 1))
        case Absurd(b, a):
            return Absurd(fn(b, 0), a)
    raise TypeError(f"not a lambda term: {t!r}")


def shift(t: LambdaTerm, by: int, cutoff: int = 0) -> LambdaTerm:
    match t:
        case LVar(i):
            return LVar(i + by) if i >= cutoff else t
        case _:
            return _map_subterms(t, lambda s, binds: shift(s, by, cutoff + binds))


def subst(t: LambdaTerm, j: int, repl: LambdaTerm) -> LambdaTerm:
    match t:
        case LVar(i):
            if i == j:
                return repl
            return t
        case _:
            return _map_subterms(t, lambda s, binds: subst(s, j + binds, shift(repl, binds)))


def _beta(body: LambdaTerm, arg: LambdaTerm) -> LambdaTerm:
    return shift(subst(body, 0, shift(arg, 1)), -1)


def well_scoped(t: LambdaTerm, depth: int = 0) -> bool:
    match t:
        case LVar(i):
            return 0 <= i < depth
        case Unit() | Dn():
            return True
        case Abs(_, _, b):
            return well_scoped(b, depth + 1)
        case App(f, a):
            return well_scoped(f, depth) and well_scoped(a, depth)
        case Pair(l, r):
            return well_scoped(l, depth) and well_scoped(r, depth)
        case ProjL(b) | ProjR(b) | InL(b, _) | InR(b, _) | Absurd(b, _):
            return well_scoped(b, depth)
        case Case(s, _, l, _, r):
            return (well_scoped(s, depth) and well_scoped(l, depth + 1)
                    and well_scoped(r, depth + 1))
    return False


class NormalForm(Exception):
    """Raised by beta_step when no redex exists (a result, not an error)."""


def beta_step(t: LambdaTerm) -> LambdaTerm:
    """Perform exactly one leftmost-outermost beta/iota step.

    Raises NormalForm when no redex exists.
    """
    match t:
        case App(Abs(_, _, body), arg):
            return _beta(body, arg)
        case ProjL(Pair(l, _)):
            return l
        case ProjR(Pair(_, r)):
            return r
        case Case(InL(v, _), _, left, _, _):
            return _beta(left, v)
        case Case(InR(v, _), _, right, _, _):
            return _beta(right, v)
    # No head redex: reduce the leftmost subterm that steps.
    children: list[tuple[str, LambdaTerm]] = []
    match t:
        case Abs(h, a, b):
            children = [("body", b)]
        case App(f, a):
            children = [("fn", f), ("arg", a)]
        case Pair(l, r):
            children = [("left", l), ("right", r)]
        case ProjL(b) | ProjR(b) | Absurd(b, _):
            children = [("body", b)]
        case InL(b, _) | InR(b, _):
            children = [("body", b)]
        case Case(s, hl, l, hr, r):
            children = [("scrut", s), ("left", l), ("right", r)]
        case _:
            raise NormalForm()
    for field_name, child in children:
        try:
            stepped = beta_step(child)
        except NormalForm:
            continue
        match t:
            case Abs(h, a, _):
                return Abs(h, a, stepped)
            case App(f, a):
                return App(stepped, a) if field_name == "fn" else App(f, stepped)
            case Pair(l, r):
                return Pair(stepped, r) if field_name == "left" else Pair(l, stepped)
            case ProjL(_):
                return ProjL(stepped)
            case ProjR(_):
                return ProjR(stepped)
            case Absurd(_, ann):
                return Absurd(stepped, ann)
            case InL(_, ann):
                return InL(stepped, ann)
            case InR(_, ann):
                return InR(stepped, ann)
            case Case(s, hl, l, hr, r):
                if field_name == "scrut":
                    return Case(stepped, hl, l, hr, r)
                if field_name == "left":
                    return Case(s, hl, stepped, hr, r)
                return Case(s, hl, l, hr, stepped)
    raise NormalForm()


def normalize(t: LambdaTerm, fuel: int) -> LambdaTerm:
    """Iterate beta_step at most `fuel` times; FuelExhausted if still reducible."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    for _ in range(fuel):
        try:
            t = beta_step(t)
        except NormalForm:
            return t
    try:
        beta_step(t)
    except NormalForm:
        return t
    raise FuelExhausted(f"no normal form within {fuel} steps")


def alpha_eq(t1: LambdaTerm, t2: LambdaTerm) -> bool:
    """Structural equality of the nameless skeletons (hints ignored)."""
    match (t1, t2):
        case (LVar(i), LVar(j)):
            return i == j
        case (Abs(_, a1, b1), Abs(_, a2, b2)):
            return a1 == a2 and alpha_eq(b1, b2)
        case (App(f1, a1), App(f2, a2)):
            return alpha_eq(f1, f2) and alpha_eq(a1, a2)
        case (Pair(l1, r1), Pair(l2, r2)):
            return alpha_eq(l1, l2) and alpha_eq(r1, r2)
        case (ProjL(b1), ProjL(b2)) | (ProjR(b1), ProjR(b2)):
            return alpha_eq(b1, b2)
        case (InL(b1, a1), InL(b2, a2)) | (InR(b1, a1), InR(b2, a2)):
            return a1 == a2 and alpha_eq(b1, b2)
        case (Case(s1, _, l1, _, r1), Case(s2, _, l2, _, r2)):
            return alpha_eq(s1, s2) and alpha_eq(l1, l2) and alpha_eq(r1, r2)
        case (Absurd(b1, a1), Absurd(b2, a2)):
            return a1 == a2 and alpha_eq(b1, b2)
        case (Unit(), Unit()):
            return True
        case (Dn(a1), Dn(a2)):
            return a1 == a2
        case _:
            return False


# ---------------------------------------------------------------------------
# Simple-type inference (bidirectional)
# ---------------------------------------------------------------------------

TypingContext = tuple[tuple[str, SimpleType], ...]


def type_infer(ctx: TypingContext, t: LambdaTerm) -> SimpleType:
    """Unique simple type of `t`, with ctx as the outer binder stack.

    LVar indices address lambda binders first, then ctx entries from its end.
    Annotations are required only where inference would be ambiguous.
    """
    return _infer(tuple(ty for _, ty in ctx), t)


def _lookup(stack: tuple, ctx_types: tuple[SimpleType, ...], i: int):
    if i < len(stack):
        return stack[i]
    j = i - len(stack)
    if j < len(ctx_types):
        return ctx_types[len(ctx_types) - 1 - j]
    raise TypingError(f"unbound variable index {i}")


def _infer(ctx_types: tuple[SimpleType, ...], t: LambdaTerm,
           stack: tuple = ()) -> SimpleType:
    match t:
        case LVar(i):
            return _lookup(stack, ctx_types, i)
        case Abs(h, ann, b):
            if ann is None:
                raise AnnotationRequired(f"binder {h}")
            return Arrow(ann, _infer(ctx_types, b, (ann,) + stack))
        case App(f, a):
            ft = _infer(ctx_types, f, stack)
            match ft:
                case Arrow(at, rt):
                    _check(ctx_types, a, at, stack)
                    return rt
            raise TypingError("applied a non-function", expected="arrow", found=ft)
        case Pair(l, r):
            return Product(_infer(ctx_types, l, stack), _infer(ctx_types, r, stack))
        case ProjL(b):
            bt = _infer(ctx_types, b, stack)
            match bt:
                case Product(l, _):
                    return l
            raise TypingError("projection from a non-product", found=bt)
        case ProjR(b):
            bt = _infer(ctx_types, b, stack)
            match bt:
                case Product(_, r):
                    return r
            raise TypingError("projection from a non-product", found=bt)
        case InL(b, ann) | InR(b, ann):
            if not isinstance(ann, Sum):
                raise AnnotationRequired("injection")
            side = ann.left if isinstance(t, InL) else ann.right
            _check(ctx_types, b, side, stack)
            return ann
        case Case(s, _, l, _, r):
            st = _infer(ctx_types, s, stack)
            match st:
                case Sum(a, b):
                    lt = _infer(ctx_types, l, (a,) + stack)
                    rt = _infer(ctx_types, r, (b,) + stack)
                    if lt != rt:
                        raise TypingError("case branches disagree", expected=lt, found=rt)
                    return lt
            raise TypingError("case on a non-sum", found=st)
        case Absurd(b, ann):
            _check(ctx_types, b, EMPTY_T, stack)
            if ann is None:
                raise AnnotationRequired("absurd")
            return ann
        case Unit():
            return UNIT_T
        case Dn(a):
            return Arrow(Arrow(Arrow(a, EMPTY_T), EMPTY_T), a)
    raise TypeError(f"not a lambda term: {t!r}")


def _check(ctx_types: tuple[SimpleType, ...], t: LambdaTerm, want: SimpleType,
           stack: tuple = ()) -> None:
    match (t, want):
        case (Abs(_, ann, b), Arrow(at, rt)):
            if ann is not None and ann != at:
                raise TypingError("annotation mismatch", expected=at, found=ann)
            _check(ctx_types, b, rt, (at,) + stack)
        case (Pair(l, r), Product(lt, rt)):
            _check(ctx_types, l, lt, stack)
            _check(ctx_types, r, rt, stack)
        case (InL(b, ann), Sum(lt, _)):
            if ann is not None and ann != want:
                raise TypingError("annotation mismatch", expected=want, found=ann)
            _check(ctx_types, b, lt, stack)
        case (InR(b, ann), Sum(_, rt)):
            if ann is not None and ann != want:
                raise TypingError("annotation mismatch", expected=want, found=ann)
            _check(ctx_types, b, rt, stack)
        case (Case(s, _, l, _, r), _):
            st = _infer(ctx_types, s, stack)
            match st:
                case Sum(a, b):
                    _check(ctx_types, l, want, (a,) + stack)
                    _check(ctx_types, r, want, (b,) + stack)
                    return
            raise TypingError("case on a non-sum", found=st)
        case (Absurd(b, ann), _):
            if ann is not None and ann != want:
                raise TypingError("annotation mismatch", expected=want, found=ann)
            _check(ctx_types, b, EMPTY_T, stack)
        case (Unit(), SingletonT()):
            return
        case _:
            got = _infer(ctx_types, t, stack)
            if got != want:
                raise TypingError("type mismatch", expected=want, found=got)


# ---------------------------------------------------------------------------
# Curry-Howard: proof terms <-> kernel derivations
# ---------------------------------------------------------------------------

def _fresh(base: str, used: set[str]) -> str:
    if base and base not in used:
        return base
    i = 0
    base = base or "h"
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def proof_term_check(t: LambdaTerm, phi: Formula, mode: CalculusMode) -> Derivation:
    """Check `t` as a proof of propositional `phi`; emit the kernel derivation.

    In ClassicalNJ mode dn constants are available; anywhere else they raise
    ModeViolation.  The returned derivation always satisfies check_derivation
    in the same mode.
    """
    if mode is CalculusMode.HILBERT:
        raise ModeViolation("proof terms correspond to NJ derivations, not Hilbert proofs")
    if not is_propositional(phi):
        raise NonPropositional(f"not a propositional formula: {phi}")
    goal = elaborate(phi)
    return _build(t, goal, (), mode)


def _build(t: LambdaTerm, goal: Formula, hyps: tuple[tuple[str, Formula], ...],
           mode: CalculusMode) -> Derivation:
    seq = Sequent(hyps, goal)
    used = {lab for lab, _ in hyps}
    match (t, goal):
        case (Abs(h, ann, b), Imp(a, c)):
            if ann is not None and ann != type_of_formula(a):
                raise TypingError("binder annotation mismatch",
                                  expected=type_of_formula(a), found=ann)
            lab = _fresh(h, used)
            sub = _build(b, c, hyps + ((lab, a),), mode)
            return Derivation("imp_intro", (lab,), seq, (sub,))
        case (Pair(l, r), And(a, b)):
            return Derivation("and_intro", (), seq,
                              (_build(l, a, hyps, mode), _build(r, b, hyps, mode)))
        case (InL(b, ann), Or(a, _)):
            if ann is not None and ann != type_of_formula(goal):
                raise TypingError("injection annotation mismatch")
            return Derivation("or_intro_l", (), seq, (_build(b, a, hyps, mode),))
        case (InR(b, ann), Or(_, c)):
            if ann is not None and ann != type_of_formula(goal):
                raise TypingError("injection annotation mismatch")
            return Derivation("or_intro_r", (), seq, (_build(b, c, hyps, mode),))
        case (Case(s, hl, l, hr, r), _):
            ds, sf = _synth(s, hyps, mode)
            match sf:
                case Or(a, b):
                    ll = _fresh(hl, used)
                    dl = _build(l, goal, hyps + ((ll, a),), mode)
                    rl = _fresh(hr, used)
                    dr = _build(r, goal, hyps + ((rl, b),), mode)
                    return Derivation("or_elim", (ll, rl), seq, (ds, dl, dr))
            raise TypingError("case scrutinee is not a disjunction proof", found=sf)
        case (Absurd(b, ann), _):
            if ann is not None and ann != type_of_formula(goal):
                raise TypingError("absurd annotation mismatch")
            return Derivation("bot_elim", (), seq, (_build(b, BOT, hyps, mode),))
        case _:
            d, f = _synth(t, hyps, mode)
            if f != goal:
                raise TypingError("proof term proves a different formula",
                                  expected=goal, found=f)
            return d


def _synth(t: LambdaTerm, hyps: tuple[tuple[str, Formula], ...],
           mode: CalculusMode) -> tuple[Derivation, Formula]:
    match t:
        case LVar(i):
            if i >= len(hyps):
                raise TypingError(f"unbound proof variable {i}")
            lab, f = hyps[len(hyps) - 1 - i]
            return Derivation("hyp", (lab,), Sequent(hyps, f)), f
        case App(Dn(ann), u):
            if mode is not CalculusMode.CLASSICAL:
                raise ModeViolation("dn constants require ClassicalNJ mode")
            a = elaborate(formula_of_type(ann))
            sub = _build(u, Imp(Imp(a, BOT), BOT), hyps, mode)
            return Derivation("dne", (), Sequent(hyps, a), (sub,)), a
        case Dn(_):
            raise UnsupportedFragment("a dn constant must be applied to an argument")
        case App(f, a):
            df, ff = _synth(f, hyps, mode)
            match ff:
                case Imp(l, r):
                    da = _build(a, l, hyps, mode)
                    return Derivation("imp_elim", (), Sequent(hyps, r), (df, da)), r
            raise TypingError("applied a non-implication proof", found=ff)
        case Pair(l, r):
            dl, fl = _synth(l, hyps, mode)
            dr, fr = _synth(r, hyps, mode)
            f = And(fl, fr)
            return Derivation("and_intro", (), Sequent(hyps, f), (dl, dr)), f
        case Case(s, hl, l, hr, r):
            ds, sf = _synth(s, hyps, mode)
            match sf:
                case Or(a, b):
                    used = {lab for lab, _ in hyps}
                    ll = _fresh(hl, used)
                    dl, fl = _synth(l, hyps + ((ll, a),), mode)
                    rl = _fresh(hr, used)
                    dr, fr = _synth(r, hyps + ((rl, b),), mode)
                    if fl != fr:
                        raise TypingError("case branches prove different formulas",
                                          expected=fl, found=fr)
                    return Derivation("or_elim", (ll, rl), Sequent(hyps, fl),
                                      (ds, dl, dr)), fl
            raise TypingError("case scrutinee is not a disjunction proof", found=sf)
        case ProjL(b):
            db, fb = _synth(b, hyps, mode)
            match fb:
                case And(l, _):
                    return Derivation("and_elim_l", (), Sequent(hyps, l), (db,)), l
            raise TypingError("projection from a non-conjunction proof", found=fb)
        case ProjR(b):
            db, fb = _synth(b, hyps, mode)
            match fb:
                case And(_, r):
                    return Derivation("and_elim_r", (), Sequent(hyps, r), (db,)), r
            raise TypingError("projection from a non-conjunction proof", found=fb)
        case Abs(h, ann, b):
            if ann is None:
                raise AnnotationRequired(f"binder {h}")
            a = elaborate(formula_of_type(ann))
            lab = _fresh(h, {l for l, _ in hyps})
            db, fb = _synth(b, hyps + ((lab, a),), mode)
            f = Imp(a, fb)
            return Derivation("imp_intro", (lab,), Sequent(hyps, f), (db,)), f
        case InL(b, ann) | InR(b, ann):
            if ann is None:
                raise AnnotationRequired("injection")
            f = elaborate(formula_of_type(ann))
            match f:
                case Or(_, _):
                    return _build(t, f, hyps, mode), f
            raise TypingError("injection annotation is not a sum", found=ann)
        case Absurd(b, ann):
            if ann is None:
                raise AnnotationRequired("absurd")
            f = elaborate(formula_of_type(ann))
            return _build(t, f, hyps, mode), f
        case Unit():
            raise TypingError("unit has no propositional counterpart")
    raise TypingError(f"cannot infer a formula for {t!r}")


def term_of_derivation(d: Derivation, env=None) -> LambdaTerm:
    """Extract the Curry-Howard proof term of a propositional derivation.

    Leading schema_intro binders (the statement prefix) are stripped; the
    term witnesses the body.  Quantifier, equality, inductive and arithmetic
    nodes raise UnsupportedFragment.
    """
    while d.rule == "schema_intro":
        (d,) = d.prems
    return _term_of(d)


def _term_of(d: Derivation) -> LambdaTerm:
    labels = [lab for lab, _ in d.concl.hyps]

    def var_for(label: str, at: Derivation) -> LambdaTerm:
        labs = [lab for lab, _ in at.concl.hyps]
        try:
            pos = len(labs) - 1 - labs.index(label)
        except ValueError:
            raise UnsupportedFragment(f"hypothesis {label} escapes the term context")
        return LVar(pos)

    def synth_annotated(sub: Derivation) -> LambdaTerm:
        # Subterm will be type-synthesized: a bare binder there needs its type.
        t = _term_of(sub)
        match t:
            case Abs(h, None, body):
                match elaborate(sub.concl.goal):
                    case Imp(a, _):
                        return Abs(h, type_of_formula(a), body)
            case _:
                pass
        return t

    match d.rule:
        case "hyp":
            return var_for(d.params[0], d)
        case "imp_intro":
            (lab,) = d.params
            return Abs(lab, None, _term_of(d.prems[0]))
        case "imp_elim":
            return App(synth_annotated(d.prems[0]), _term_of(d.prems[1]))
        case "and_intro":
            return Pair(_term_of(d.prems[0]), _term_of(d.prems[1]))
        case "and_elim_l":
            return ProjL(synth_annotated(d.prems[0]))
        case "and_elim_r":
            return ProjR(synth_annotated(d.prems[0]))
        case "or_intro_l":
            return InL(_term_of(d.prems[0]), type_of_formula(d.concl.goal))
        case "or_intro_r":
            return InR(_term_of(d.prems[0]), type_of_formula(d.concl.goal))
        case "or_elim":
            (ll, rl) = d.params
            return Case(synth_annotated(d.prems[0]), ll, _term_of(d.prems[1]),
                        rl, _term_of(d.prems[2]))
        case "bot_elim":
            return Absurd(_term_of(d.prems[0]), type_of_formula(d.concl.goal))
        case "dne":
            return App(Dn(type_of_formula(d.concl.goal)), _term_of(d.prems[0]))
        case _:
            raise UnsupportedFragment(f"rule {d.rule} has no proof-term counterpart")


# ---------------------------------------------------------------------------
# Textual syntax: \x. body, juxtaposition, <l, r>, inl/inr, case ... of
# ---------------------------------------------------------------------------

_PUNCT = ["->", "\\", "λ", ".", "(", ")", "<", ">", ",", ":", "|", "=>", "[", "]", "*", "+"]


def _lex(text: str) -> list[str]:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        two = text[i:i + 2]
        if two in ("->", "=>"):
            out.append(two)
            i += 2
            continue
        if c in "\\λ.()<>,:|[]*+":
            out.append(c)
            i += 1
            continue
        if c.isalnum() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(text[i:j])
            i = j
            continue
        raise TypingError(f"unexpected character {c!r} in lambda syntax")
    return out


class _LambdaParser:
    def __init__(self, tokens: list[str], ctx_names: tuple[str, ...]):
        self.toks = tokens
        self.pos = 0
        self.ctx_names = ctx_names

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise TypingError("unexpected end of lambda term")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise TypingError(f"expected {tok!r}, found {got!r}")

    def parse_term(self, stack: tuple[str, ...]) -> LambdaTerm:
        if self.peek() in ("\\", "λ"):
            self.next()
            name = self.next()
            ann = None
            if self.peek() == ":":
                self.next()
                ann = self.parse_type()
            self.expect(".")
            return Abs(name, ann, self.parse_term((name,) + stack))
        return self.parse_app(stack)

    def parse_app(self, stack) -> LambdaTerm:
        t = self.parse_atom(stack)
        while self.peek() is not None and self._starts_atom(self.peek()):
            t = App(t, self.parse_atom(stack))
        return t

    def _starts_atom(self, tok: str) -> bool:
        if tok in (")", ">", ",", "|", "of", "end", ".", ":", "=>", "]"):
            return False
        return tok == "(" or tok == "<" or tok[0].isalnum() or tok[0] == "_"

    def _bracket_ann(self) -> SimpleType | None:
        if self.peek() == "[":
            self.next()
            ann = self.parse_type()
            self.expect("]")
            return ann
        return None

    def parse_atom(self, stack) -> LambdaTerm:
        tok = self.next()
        if tok == "(":
            t = self.parse_term(stack)
            self.expect(")")
            return t
        if tok == "<":
            l = self.parse_term(stack)
            self.expect(",")
            r = self.parse_term(stack)
            self.expect(">")
            return Pair(l, r)
        if tok == "fst":
            return ProjL(self.parse_atom(stack))
        if tok == "snd":
            return ProjR(self.parse_atom(stack))
        if tok == "inl":
            ann = self._bracket_ann()
            return InL(self.parse_atom(stack), ann)
        if tok == "inr":
            ann = self._bracket_ann()
            return InR(self.parse_atom(stack), ann)
        if tok == "absurd":
            ann = self._bracket_ann()
            return Absurd(self.parse_atom(stack), ann)
        if tok == "dn":
            self.expect("[")
            ann = self.parse_type()
            self.expect("]")
            return Dn(ann)
        if tok == "unit":
            return UNIT
        if tok == "case":
            s = self.parse_term(stack)
            self.expect("of")
            self.expect("inl")
            xl = self.next()
            self.expect("=>")
            l = self.parse_term((xl,) + stack)
            self.expect("|")
            self.expect("inr")
            xr = self.next()
            self.expect("=>")
            r = self.parse_term((xr,) + stack)
            self.expect("end")
            return Case(s, xl, l, xr, r)
        # identifier
        if tok in stack:
            return LVar(stack.index(tok))
        if tok in self.ctx_names:
            j = len(self.ctx_names) - 1 - self.ctx_names.index(tok)
            return LVar(len(stack) + j)
        raise TypingError(f"unbound identifier {tok!r} in lambda term")

    def parse_type(self) -> SimpleType:
        t = self.parse_type_sum()
        if self.peek() == "->":
            self.next()
            return Arrow(t, self.parse_type())
        return t

    def parse_type_sum(self) -> SimpleType:
        t = self.parse_type_prod()
        while self.peek() == "+":
            self.next()
            t = Sum(t, self.parse_type_prod())
        return t

    def parse_type_prod(self) -> SimpleType:
        t = self.parse_type_atom()
        while self.peek() == "*":
            self.next()
            t = Product(t, self.parse_type_atom())
        return t

    def parse_type_atom(self) -> SimpleType:
        tok = self.next()
        if tok == "(":
            t = self.parse_type()
            self.expect(")")
            return t
        if tok in ("0", "Empty"):
            return EMPTY_T
        if tok in ("1", "Unit"):
            return UNIT_T
        return Base(tok)


def parse_lambda(text: str, ctx_names: tuple[str, ...] = ()) -> LambdaTerm:
    """Parse the textual lambda syntax; ctx_names resolve free variables."""
    p = _LambdaParser(_lex(text), ctx_names)
    t = p.parse_term(())
    if p.peek() is not None:
        raise TypingError(f"trailing input in lambda term: {p.peek()!r}")
    return t


def pretty_lambda(t: LambdaTerm, stack: tuple[str, ...] = ()) -> str:
    def fresh_hint(h: str) -> str:
        if h not in stack:
            return h or "x"
        i = 0
        while f"{h}{i}" in stack:
            i += 1
        return f"{h}{i}"

    match t:
        case LVar(i):
            return stack[i] if i < len(stack) else f"?{i - len(stack)}"
        case Abs(h, ann, b):
            name = fresh_hint(h)
            a = f":{pretty_type(ann)}" if ann is not None else ""
            return f"\\{name}{a}. {pretty_lambda(b, (name,) + stack)}"
        case App(f, a):
            fs = pretty_lambda(f, stack)
            if isinstance(f, (Abs, Case)):
                fs = f"({fs})"
            as_ = pretty_lambda(a, stack)
            if isinstance(a, (Abs, App, Case)):
                as_ = f"({as_})"
            return f"{fs} {as_}"
        case Pair(l, r):
            return f"<{pretty_lambda(l, stack)}, {pretty_lambda(r, stack)}>"
        case ProjL(b):
            return f"fst ({pretty_lambda(b, stack)})"
        case ProjR(b):
            return f"snd ({pretty_lambda(b, stack)})"
        case InL(b, _):
            return f"inl ({pretty_lambda(b, stack)})"
        case InR(b, _):
            return f"inr ({pretty_lambda(b, stack)})"
        case Case(s, hl, l, hr, r):
            nl, nr = fresh_hint(hl), fresh_hint(hr)
            return (f"case {pretty_lambda(s, stack)} of inl {nl} => "
                    f"{pretty_lambda(l, (nl,) + stack)} | inr {nr} => "
                    f"{pretty_lambda(r, (nr,) + stack)} end")
        case Absurd(b, _):
            return f"absurd ({pretty_lambda(b, stack)})"
        case Unit():
            return "unit"
        case Dn(a):
            return f"dn[{pretty_type(a)}]"
    raise TypeError(f"not a lambda term: {t!r}")
