"""The trusted core: formulas, sequents, inference rules, derivation checking.

Nothing outside this module can mint a theorem.  All values are immutable;
checking is a pure function over them.  Bound first-order variables use
nameless indices (`BVar`) so alpha-equivalence is plain structural equality;
statement-prefix binders over propositions, predicates and function symbols
(`SchemaAll`) bind by name and only ever occur at the top of a statement.

Negation and iff are sugar: `~A` stands for `A -> False` and `A <-> B` for
`(A -> B) /\\ (B -> A)`.  Every comparison performed while checking a
derivation happens on the elaborated (sugar-free) forms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import (
    ArityMismatch,
    MissingMetavariable,
    ModeViolation,
    RuleViolation,
    SortMismatch,
    StepFailure,
    UnboundVariable,
)

# ---------------------------------------------------------------------------
# Sorts
# ---------------------------------------------------------------------------

# Base sorts are plain strings: "Type" (opaque individuals), "Prop" (only as a
# schema-binder kind), and the names of declared inductives ("nat", "bool", ...).
TYPE = "Type"
PROP = "Prop"


@dataclass(frozen=True)
class ArrowSort:
    """Function or predicate kinds, e.g. bool -> bool, Type -> Prop."""

    args: tuple["Sort", ...]
    result: "Sort"

    def __str__(self) -> str:
        parts = [str(a) for a in self.args] + [str(self.result)]
        return " -> ".join(parts)


Sort = Union[str, ArrowSort]


def is_pred_sort(s: Sort) -> bool:
    return isinstance(s, ArrowSort) and s.result == PROP


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True)
class BVar:
    """Reference to an enclosing first-order binder (innermost = 0)."""

    index: int


@dataclass(frozen=True)
class Ctor:
    name: str
    args: tuple["Term", ...] = ()


@dataclass(frozen=True)
class FunApp:
    """Application of a fixpoint or of a schema-bound function symbol."""

    name: str
    args: tuple["Term", ...] = ()


Term = Union[Var, BVar, Ctor, FunApp]


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Neg:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    # The hint is printing metadata only: alpha-equivalence is structural
    # equality of the nameless skeleton, so it does not participate in ==.
    hint: str = field(compare=False)
    sort: Sort = field(compare=True)
    body: "Formula" = field(compare=True)


@dataclass(frozen=True)
class Exists:
    hint: str = field(compare=False)
    sort: Sort = field(compare=True)
    body: "Formula" = field(compare=True)


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term
    sort: Sort


@dataclass(frozen=True)
class PredApp:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class SchemaAll:
    """Statement-prefix binder over a Prop / predicate / function symbol.

    Binds by *name*: occurrences in the body are Atom(name), PredApp(name, ..)
    or FunApp(name, ..) depending on `sort`.
    """

    name: str
    sort: Sort  # PROP or an ArrowSort
    body: "Formula"


Formula = Union[Atom, Bottom, Neg, And, Or, Imp, Iff, Forall, Exists, Eq, PredApp, SchemaAll]

BOT = Bottom()


# ---------------------------------------------------------------------------
# Structural helpers
# ---------------------------------------------------------------------------

def map_terms(f: Formula, fn, depth: int = 0) -> Formula:
    """Rebuild `f`, applying `fn(term, depth)` to every toplevel term in it."""
    match f:
        case Atom() | Bottom():
            return f
        case Neg(b):
            return Neg(map_terms(b, fn, depth))
        case And(l, r):
            return And(map_terms(l, fn, depth), map_terms(r, fn, depth))
        case Or(l, r):
            return Or(map_terms(l, fn, depth), map_terms(r, fn, depth))
        case Imp(l, r):
            return Imp(map_terms(l, fn, depth), map_terms(r, fn, depth))
        case Iff(l, r):
            return Iff(map_terms(l, fn, depth), map_terms(r, fn, depth))
        case Forall(h, s, b):
            return Forall(h, s, map_terms(b, fn, depth + 1))
        case Exists(h, s, b):
            return Exists(h, s, map_terms(b, fn, depth + 1))
        case Eq(l, r, s):
            return Eq(fn(l, depth), fn(r, depth), s)
        case PredApp(n, args):
            return PredApp(n, tuple(fn(a, depth) for a in args))
        case SchemaAll(n, s, b):
            return SchemaAll(n, s, map_terms(b, fn, depth))
    raise TypeError(f"not a formula: {f!r}")


def term_subtree_map(t: Term, fn, depth: int) -> Term:
    """Apply `fn` bottom-up to a term (fn sees each rebuilt node and depth)."""
    match t:
        case Var() | BVar():
            return fn(t, depth)
        case Ctor(n, args):
            return fn(Ctor(n, tuple(term_subtree_map(a, fn, depth) for a in args)), depth)
        case FunApp(n, args):
            return fn(FunApp(n, tuple(term_subtree_map(a, fn, depth) for a in args)), depth)
    raise TypeError(f"not a term: {t!r}")


@lru_cache(maxsize=None)
def elaborate(f: Formula) -> Formula:
    """Strip sugar: ~A => A -> False, A <-> B => (A -> B) /\\ (B -> A)."""
    match f:
        case Neg(b):
            return Imp(elaborate(b), BOT)
        case Iff(l, r):
            le, re = elaborate(l), elaborate(r)
            return And(Imp(le, re), Imp(re, le))
        case Atom() | Bottom() | Eq() | PredApp():
            return f
        case And(l, r):
            return And(elaborate(l), elaborate(r))
        case Or(l, r):
            return Or(elaborate(l), elaborate(r))
        case Imp(l, r):
            return Imp(elaborate(l), elaborate(r))
        case Forall(h, s, b):
            return Forall(h, s, elaborate(b))
        case Exists(h, s, b):
            return Exists(h, s, elaborate(b))
        case SchemaAll(n, s, b):
            return SchemaAll(n, s, elaborate(b))
    raise TypeError(f"not a formula: {f!r}")


def open_term(t: Term, repl: Term, depth: int) -> Term:
    def go(x: Term, d: int) -> Term:
        match x:
            case BVar(k) if k == d:
                return repl
            case Var() | BVar():
                return x
            case Ctor(n, args):
                return Ctor(n, tuple(go(a, d) for a in args))
            case FunApp(n, args):
                return FunApp(n, tuple(go(a, d) for a in args))
        raise TypeError(f"not a term: {x!r}")

    return go(t, depth)


def open_formula(body: Formula, repl: Term) -> Formula:
    """Instantiate the binder that `body` dangles from: BVar(0) := repl.

    `repl` must be locally closed, so no shifting is ever needed.
    """
    return map_terms(body, lambda t, d: open_term(t, repl, d), depth=0)


def close_formula(f: Formula, target: Term) -> Formula:
    """Abstract every occurrence of (locally closed) `target` as BVar(0).

    The result is a one-hole template: open_formula(close_formula(f, t), t) == f.
    """

    def go(t: Term, d: int) -> Term:
        if t == target:
            return BVar(d)
        match t:
            case Var() | BVar():
                return t
            case Ctor(n, args):
                return Ctor(n, tuple(go(a, d) for a in args))
            case FunApp(n, args):
                return FunApp(n, tuple(go(a, d) for a in args))
        raise TypeError(f"not a term: {t!r}")

    return map_terms(f, go, depth=0)


def forall_close(v: Var, f: Formula, hint: str | None = None) -> Formula:
    return Forall(hint or v.name, v.sort, close_formula(f, v))


def exists_close(v: Var, f: Formula, hint: str | None = None) -> Formula:
    return Exists(hint or v.name, v.sort, close_formula(f, v))


def term_free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(n, _):
            return frozenset((n,))
        case BVar():
            return frozenset()
        case Ctor(_, args) | FunApp(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= term_free_vars(a)
            return out
    raise TypeError(f"not a term: {t!r}")


def free_vars(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    map_terms(f, lambda t, d: (out.update(term_free_vars(t)), t)[1], 0)
    return frozenset(out)


def _collect_symbols(f: Formula, atoms: set[str], preds: set[str], funs: set[str]) -> None:
    def term_funs(t: Term) -> None:
        match t:
            case FunApp(n, args):
                funs.add(n)
                for a in args:
                    term_funs(a)
            case Ctor(_, args):
                for a in args:
                    term_funs(a)
            case _:
                pass

    match f:
        case Atom(n):
            atoms.add(n)
        case Bottom():
            pass
        case Neg(b):
            _collect_symbols(b, atoms, preds, funs)
        case And(l, r) | Or(l, r) | Imp(l, r) | Iff(l, r):
            _collect_symbols(l, atoms, preds, funs)
            _collect_symbols(r, atoms, preds, funs)
        case Forall(_, _, b) | Exists(_, _, b) | SchemaAll(_, _, b):
            _collect_symbols(b, atoms, preds, funs)
        case Eq(l, r, _):
            term_funs(l)
            term_funs(r)
        case PredApp(n, args):
            preds.add(n)
            for a in args:
                term_funs(a)


def symbol_occurs(f: Formula, name: str) -> bool:
    """True if `name` occurs as an atom, predicate, function symbol or free var."""
    atoms: set[str] = set()
    preds: set[str] = set()
    funs: set[str] = set()
    _collect_symbols(f, atoms, preds, funs)
    return name in atoms or name in preds or name in funs or name in free_vars(f)


def substitute(f: Formula, x: Var, t: Term, env: "Env | None" = None) -> Formula:
    """Capture-avoiding substitution of `t` for the free variable `x`.

    With the nameless representation no index can ever be captured; binder
    hints are freshened only at pretty-printing time.
    """
    if env is not None:
        ts = sort_of_term(t, env, {})
        if ts is not None and x.sort is not None and ts != x.sort:
            raise SortMismatch(f"cannot substitute {ts} term for {x.sort} variable {x.name}")

    def go(u: Term, d: int) -> Term:
        match u:
            case Var(n, _) if n == x.name:
                return t
            case Var() | BVar():
                return u
            case Ctor(n, args):
                return Ctor(n, tuple(go(a, d) for a in args))
            case FunApp(n, args):
                return FunApp(n, tuple(go(a, d) for a in args))
        raise TypeError(f"not a term: {u!r}")

    return map_terms(f, go, 0)


def subst_atom(f: Formula, name: str, repl: Formula) -> Formula:
    """Uniform substitution of a formula for a schematic atom."""
    match f:
        case Atom(n):
            return repl if n == name else f
        case Bottom() | Eq() | PredApp():
            return f
        case Neg(b):
            return Neg(subst_atom(b, name, repl))
        case And(l, r):
            return And(subst_atom(l, name, repl), subst_atom(r, name, repl))
        case Or(l, r):
            return Or(subst_atom(l, name, repl), subst_atom(r, name, repl))
        case Imp(l, r):
            return Imp(subst_atom(l, name, repl), subst_atom(r, name, repl))
        case Iff(l, r):
            return Iff(subst_atom(l, name, repl), subst_atom(r, name, repl))
        case Forall(h, s, b):
            return Forall(h, s, subst_atom(b, name, repl))
        case Exists(h, s, b):
            return Exists(h, s, subst_atom(b, name, repl))
        case SchemaAll(n, s, b):
            if n == name:  # shadowed
                return f
            return SchemaAll(n, s, subst_atom(b, name, repl))
    raise TypeError(f"not a formula: {f!r}")


def rename_schema_symbol(f: Formula, old: str, new: str, sort: Sort) -> Formula:
    """Rename a schema-bound symbol (atom / pred / fun occurrences by kind)."""
    if old == new:
        return f
    if sort == PROP:
        return subst_atom(f, old, Atom(new))
    as_pred = is_pred_sort(sort)

    def ren_term(t: Term, _d: int = 0) -> Term:
        match t:
            case FunApp(n, args):
                n2 = new if (n == old and not as_pred) else n
                return FunApp(n2, tuple(ren_term(a) for a in args))
            case Ctor(n, args):
                return Ctor(n, tuple(ren_term(a) for a in args))
            case _:
                return t

    def go(g: Formula) -> Formula:
        match g:
            case PredApp(n, args):
                n2 = new if (n == old and as_pred) else n
                return PredApp(n2, tuple(ren_term(a) for a in args))
            case SchemaAll(n, s, b):
                return g if n == old else SchemaAll(n, s, go(b))
            case Neg(b):
                return Neg(go(b))
            case And(l, r):
                return And(go(l), go(r))
            case Or(l, r):
                return Or(go(l), go(r))
            case Imp(l, r):
                return Imp(go(l), go(r))
            case Iff(l, r):
                return Iff(go(l), go(r))
            case Forall(h, s, b):
                return Forall(h, s, go(b))
            case Exists(h, s, b):
                return Exists(h, s, go(b))
            case Eq(l, r, s):
                return Eq(ren_term(l), ren_term(r), s)
            case _:
                return g

    return go(f)


def is_propositional(f: Formula) -> bool:
    """Quantifier-free, equality-free, predicate-free: atoms and connectives."""
    match f:
        case Atom() | Bottom():
            return True
        case Neg(b):
            return is_propositional(b)
        case And(l, r) | Or(l, r) | Imp(l, r) | Iff(l, r):
            return is_propositional(l) and is_propositional(r)
        case _:
            return False


# ---------------------------------------------------------------------------
# Environment: inductive types, fixpoints, registered theorems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InductiveDef:
    name: str
    constructors: tuple[tuple[str, tuple[Sort, ...]], ...]


@dataclass(frozen=True)
class Clause:
    ctor: str
    binders: tuple[tuple[str, Sort], ...]  # one per constructor argument
    rhs: Term


@dataclass(frozen=True)
class FixpointDef:
    name: str
    params: tuple[tuple[str, Sort], ...]
    result: Sort
    match_index: int  # the structurally decreasing parameter
    clauses: tuple[Clause, ...]


class CalculusMode(enum.Enum):
    HILBERT = "Hilbert"
    INTUITIONISTIC = "IntuitionisticNJ"
    CLASSICAL = "ClassicalNJ"


_MODE_RANK = {CalculusMode.HILBERT: 0, CalculusMode.INTUITIONISTIC: 1, CalculusMode.CLASSICAL: 2}


def mode_allows(ambient: CalculusMode, required: CalculusMode) -> bool:
    """A theorem proven in `required` may be used when working in `ambient`."""
    return _MODE_RANK[required] <= _MODE_RANK[ambient]


@dataclass(frozen=True)
class TheoremRecord:
    name: str
    statement: Formula
    mode: CalculusMode


@dataclass(frozen=True)
class Env:
    """Immutable snapshot of declared types, functions, predicates, theorems."""

    inductives: tuple[InductiveDef, ...] = ()
    fixpoints: tuple[FixpointDef, ...] = ()
    preds: tuple[tuple[str, tuple[Sort, ...]], ...] = ()
    theorems: tuple[TheoremRecord, ...] = ()

    def inductive(self, name: str) -> InductiveDef | None:
        for d in self.inductives:
            if d.name == name:
                return d
        return None

    def fixpoint(self, name: str) -> FixpointDef | None:
        for d in self.fixpoints:
            if d.name == name:
                return d
        return None

    def constructor(self, name: str) -> tuple[InductiveDef, tuple[Sort, ...]] | None:
        for d in self.inductives:
            for cname, argsorts in d.constructors:
                if cname == name:
                    return d, argsorts
        return None

    def pred_sig(self, name: str) -> tuple[Sort, ...] | None:
        for n, sig in self.preds:
            if n == name:
                return sig
        return None

    def theorem(self, name: str) -> TheoremRecord | None:
        for t in self.theorems:
            if t.name == name:
                return t
        return None

    def is_sort(self, s: Sort) -> bool:
        if isinstance(s, ArrowSort):
            return all(self.is_sort(a) for a in s.args) and (
                s.result == PROP or self.is_sort(s.result)
            )
        return s == TYPE or self.inductive(s) is not None

    def with_inductive(self, d: InductiveDef) -> "Env":
        return replace(self, inductives=self.inductives + (d,))

    def with_fixpoint(self, d: FixpointDef) -> "Env":
        return replace(self, fixpoints=self.fixpoints + (d,))

    def with_pred(self, name: str, sig: tuple[Sort, ...]) -> "Env":
        return replace(self, preds=self.preds + ((name, sig),))

    def with_theorem(self, t: TheoremRecord) -> "Env":
        return replace(self, theorems=self.theorems + (t,))


EMPTY_ENV = Env()


def sort_of_term(t: Term, env: Env, schema_funs: dict[str, Sort]) -> Sort | None:
    """Best-effort sort of a locally closed term (None when undetermined)."""
    match t:
        case Var(_, s):
            return s
        case BVar():
            return None
        case Ctor(n, _):
            found = env.constructor(n)
            return found[0].name if found else None
        case FunApp(n, _):
            fx = env.fixpoint(n)
            if fx:
                return fx.result
            s = schema_funs.get(n)
            if isinstance(s, ArrowSort):
                return s.result
            return None
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Well-formedness
# ---------------------------------------------------------------------------

def check_term(t: Term, env: Env, binder_sorts: tuple[Sort, ...],
               schema: dict[str, Sort]) -> Sort | None:
    """Check arities/sorts of a term; returns its sort (None if opaque)."""
    match t:
        case Var(n, s):
            if s is not None and not env.is_sort(s) and not isinstance(s, ArrowSort):
                raise SortMismatch(f"unknown sort {s} of variable {n}")
            return s
        case BVar(k):
            if k >= len(binder_sorts):
                raise UnboundVariable(f"dangling bound variable index {k}")
            return binder_sorts[k]
        case Ctor(n, args):
            found = env.constructor(n)
            if found is None:
                raise UnboundVariable(f"unknown constructor {n}")
            ind, argsorts = found
            if len(args) != len(argsorts):
                raise ArityMismatch(f"constructor {n} expects {len(argsorts)} args, got {len(args)}")
            for a, want in zip(args, argsorts):
                got = check_term(a, env, binder_sorts, schema)
                if got is not None and got != want:
                    raise SortMismatch(f"argument of {n}: expected {want}, found {got}")
            return ind.name
        case FunApp(n, args):
            fx = env.fixpoint(n)
            if fx is not None:
                want_sorts = tuple(s for _, s in fx.params)
                result = fx.result
            elif n in schema and isinstance(schema[n], ArrowSort):
                arrow = schema[n]
                want_sorts, result = arrow.args, arrow.result
            else:
                raise UnboundVariable(f"unknown function symbol {n}")
            if len(args) != len(want_sorts):
                raise ArityMismatch(f"{n} expects {len(want_sorts)} args, got {len(args)}")
            for a, want in zip(args, want_sorts):
                got = check_term(a, env, binder_sorts, schema)
                if got is not None and got != want:
                    raise SortMismatch(f"argument of {n}: expected {want}, found {got}")
            return result
    raise TypeError(f"not a term: {t!r}")


def well_formed(f: Formula, env: Env, schema: dict[str, Sort] | None = None,
                binder_sorts: tuple[Sort, ...] = ()) -> None:
    """Raise UnboundVariable / ArityMismatch / SortMismatch on the first bad subterm."""
    schema = dict(schema) if schema else {}

    def go(g: Formula, binders: tuple[Sort, ...], sc: dict[str, Sort]) -> None:
        match g:
            case Atom() | Bottom():
                return
            case Neg(b):
                go(b, binders, sc)
            case And(l, r) | Or(l, r) | Imp(l, r) | Iff(l, r):
                go(l, binders, sc)
                go(r, binders, sc)
            case Forall(_, s, b) | Exists(_, s, b):
                if not env.is_sort(s):
                    raise SortMismatch(f"unknown binder sort {s}")
                go(b, (s,) + binders, sc)
            case Eq(l, r, s):
                ls = check_term(l, env, binders, sc)
                rs = check_term(r, env, binders, sc)
                for side in (ls, rs):
                    if side is not None and side != s:
                        raise SortMismatch(f"equality at sort {s} applied to {side} term")
            case PredApp(n, args):
                sig = env.pred_sig(n)
                if sig is None:
                    s = sc.get(n)
                    if not is_pred_sort(s):
                        raise UnboundVariable(f"unknown predicate {n}")
                    sig = s.args
                if len(args) != len(sig):
                    raise ArityMismatch(f"predicate {n} expects {len(sig)} args, got {len(args)}")
                for a, want in zip(args, sig):
                    got = check_term(a, env, binders, sc)
                    if got is not None and got != want:
                        raise SortMismatch(f"argument of {n}: expected {want}, found {got}")
            case SchemaAll(n, s, b):
                go(b, binders, {**sc, n: s})
            case _:
                raise TypeError(f"not a formula: {g!r}")

    go(f, binder_sorts, schema)


# ---------------------------------------------------------------------------
# Sequents and derivations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sequent:
    hyps: tuple[tuple[str, Formula], ...]
    goal: Formula

    def hyp(self, label: str) -> Formula | None:
        for lab, f in self.hyps:
            if lab == label:
                return f
        return None

    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.hyps)

    def extended(self, label: str, f: Formula) -> "Sequent":
        return Sequent(self.hyps + ((label, f),), self.goal)

    def with_goal(self, g: Formula) -> "Sequent":
        return Sequent(self.hyps, g)


@dataclass(frozen=True)
class Derivation:
    rule: str
    params: tuple
    concl: Sequent
    prems: tuple["Derivation", ...] = ()

    def size(self) -> int:
        n = 0
        stack = [self]
        while stack:
            d = stack.pop()
            n += 1
            stack.extend(d.prems)
        return n


# Rule identifiers accepted per calculus mode.
NJ_RULES = frozenset({
    "hyp", "bot_elim", "imp_intro", "imp_elim",
    "and_intro", "and_elim_l", "and_elim_r",
    "or_intro_l", "or_intro_r", "or_elim",
    "forall_intro", "forall_elim", "exists_intro", "exists_elim",
    "eq_refl", "eq_rewrite", "schema_intro",
    "defeq", "induction", "lin_arith", "thm",
})
HILBERT_RULES = frozenset({"hyp", "axiom", "imp_elim"})
CLASSICAL_ONLY = frozenset({"dne"})


def _elab_seq(s: Sequent) -> Sequent:
    return Sequent(tuple((lab, elaborate(f)) for lab, f in s.hyps), elaborate(s.goal))


def _ctx_eq(a: Sequent, b: Sequent) -> bool:
    return a.hyps == b.hyps


def induction_premises(ind: InductiveDef, template: Formula) -> list[Formula]:
    """One premise per constructor, with IHs for recursive arguments.

    `template` is a one-hole formula (dangling BVar(0)) standing for P.
    """
    premises = []
    for cname, argsorts in ind.constructors:
        xs = [Var(f"{'n' if s == ind.name else 'x'}{i}", s) for i, s in enumerate(argsorts)]
        body: Formula = open_formula(template, Ctor(cname, tuple(xs)))
        for x, s in zip(reversed(xs), reversed(argsorts)):
            if s == ind.name:
                body = Imp(open_formula(template, x), body)
            body = forall_close(x, body)
        premises.append(body)
    return premises


def induction_formula(ind: InductiveDef, template: Formula, hint: str = "n") -> Formula:
    """[| P c1 args...; ... |] ==> forall n. P n, as a nested implication."""
    concl: Formula = Forall(hint, ind.name, template)
    out = concl
    for prem in reversed(induction_premises(ind, template)):
        out = Imp(prem, out)
    return out


# ---------------------------------------------------------------------------
# Polynomial normal forms over nat (trusted: backs eq-free arithmetic steps)
# ---------------------------------------------------------------------------

# A monomial maps atom keys to exponents; a polynomial maps monomials to ints.
Monomial = tuple[tuple[str, int], ...]
Poly = dict[Monomial, Fraction]

_ONE: Monomial = ()


def _poly_const(c) -> Poly:
    return {_ONE: Fraction(c)} if c else {}


def _poly_atom(key: str) -> Poly:
    return {((key, 1),): Fraction(1)}


def _poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        n = out.get(m, Fraction(0)) + c
        if n:
            out[m] = n
        else:
            out.pop(m, None)
    return out


def _poly_neg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            powers: dict[str, int] = dict(m1)
            for k, e in m2:
                powers[k] = powers.get(k, 0) + e
            m = tuple(sorted(powers.items()))
            n = out.get(m, Fraction(0)) + c1 * c2
            if n:
                out[m] = n
            else:
                out.pop(m, None)
    return out


def _poly_scale(a: Poly, c: Fraction) -> Poly:
    return {m: v * c for m, v in a.items()} if c else {}


def term_key(t: Term) -> str:
    """Canonical printable key for an uninterpreted atom."""
    match t:
        case Var(n, _):
            return n
        case BVar(k):
            return f"#{k}"
        case Ctor(n, args) | FunApp(n, args):
            if not args:
                return n
            return f"{n}({','.join(term_key(a) for a in args)})"
    raise TypeError(f"not a term: {t!r}")


def nat_poly(t: Term) -> Poly:
    """Normal form of a nat term; S/O/add/mul are interpreted, the rest opaque."""
    match t:
        case Ctor("O", ()):
            return _poly_const(0)
        case Ctor("S", (x,)):
            return _poly_add(nat_poly(x), _poly_const(1))
        case FunApp("add", (a, b)):
            return _poly_add(nat_poly(a), nat_poly(b))
        case FunApp("mul", (a, b)):
            return _poly_mul(nat_poly(a), nat_poly(b))
        case _:
            return _poly_atom(term_key(t))


def eq_diff_poly(f: Formula) -> Poly | None:
    """LHS - RHS of a nat equality, or None if `f` is not one."""
    match f:
        case Eq(l, r, "nat"):
            return _poly_add(nat_poly(l), _poly_neg(nat_poly(r)))
        case _:
            return None


# Canonical definitions the lin_arith rule interprets.  If an environment
# declares nat/add/mul differently, the rule refuses to fire.
NAT_DEF = InductiveDef("nat", (("O", ()), ("S", ("nat",))))
ADD_DEF = FixpointDef(
    "add", (("n", "nat"), ("m", "nat")), "nat", 0,
    (Clause("O", (), Var("m", "nat")),
     Clause("S", (("n'", "nat"),), Ctor("S", (FunApp("add", (Var("n'", "nat"), Var("m", "nat"))),)))),
)
MUL_DEF = FixpointDef(
    "mul", (("n", "nat"), ("m", "nat")), "nat", 0,
    (Clause("O", (), Ctor("O", ())),
     Clause("S", (("n'", "nat"),),
            FunApp("add", (Var("m", "nat"), FunApp("mul", (Var("n'", "nat"), Var("m", "nat"))))))),
)


def standard_arith_env(env: Env) -> bool:
    """True iff nat, add and mul carry their canonical meanings in `env`."""
    if env.inductive("nat") != NAT_DEF:
        return False
    for want in (ADD_DEF, MUL_DEF):
        have = env.fixpoint(want.name)
        if have is not None and have != want:
            return False
    return True


# ---------------------------------------------------------------------------
# Derivation checking
# ---------------------------------------------------------------------------

def _check_node(d: Derivation, mode: CalculusMode, env: Env, path: tuple[int, ...]) -> None:
    def bad(reason: str):
        raise RuleViolation(path, reason)

    rule = d.rule
    if mode is CalculusMode.HILBERT:
        if rule not in HILBERT_RULES:
            raise ModeViolation(f"rule {rule} is not part of the Hilbert system")
    elif rule in CLASSICAL_ONLY:
        if mode is not CalculusMode.CLASSICAL:
            raise ModeViolation(f"rule {rule} requires ClassicalNJ mode")
    elif rule not in NJ_RULES:
        bad(f"unknown rule {rule}")

    seq = _elab_seq(d.concl)
    labels = seq.labels()
    if len(set(labels)) != len(labels):
        bad("duplicate hypothesis labels")
    prems = tuple(_elab_seq(p.concl) for p in d.prems)

    def need_prems(n: int):
        if len(prems) != n:
            bad(f"{rule} expects {n} premises, got {len(prems)}")

    def same_ctx(p: Sequent):
        if not _ctx_eq(p, seq):
            bad(f"{rule}: premise context differs from conclusion context")

    match rule:
        case "hyp":
            need_prems(0)
            (label,) = d.params
            h = seq.hyp(label)
            if h is None:
                bad(f"no hypothesis labelled {label}")
            if h != seq.goal:
                bad(f"hypothesis {label} does not match the goal")

        case "axiom":
            need_prems(0)
            (schema_id, subst) = d.params
            inst = instantiate_schema(schema_id, dict(subst))
            if elaborate(inst) != seq.goal:
                bad(f"conclusion is not the stated {schema_id} instance")

        case "bot_elim":
            need_prems(1)
            same_ctx(prems[0])
            if prems[0].goal != BOT:
                bad("premise of bot_elim must conclude False")

        case "imp_intro":
            need_prems(1)
            (label,) = d.params
            match seq.goal:
                case Imp(a, b):
                    want = seq.extended(label, a).with_goal(b)
                    if prems[0] != want:
                        bad("imp_intro premise must add the antecedent as last hypothesis")
                case _:
                    bad("imp_intro conclusion must be an implication")

        case "imp_elim":
            need_prems(2)
            same_ctx(prems[0])
            same_ctx(prems[1])
            match prems[0].goal:
                case Imp(a, b):
                    if prems[1].goal != a:
                        bad("minor premise does not match the antecedent")
                    if b != seq.goal:
                        bad("conclusion does not match the consequent")
                case _:
                    bad("major premise of imp_elim must be an implication")

        case "and_intro":
            need_prems(2)
            same_ctx(prems[0])
            same_ctx(prems[1])
            match seq.goal:
                case And(a, b):
                    if prems[0].goal != a or prems[1].goal != b:
                        bad("and_intro premises do not match the conjuncts")
                case _:
                    bad("and_intro conclusion must be a conjunction")

        case "and_elim_l" | "and_elim_r":
            need_prems(1)
            same_ctx(prems[0])
            match prems[0].goal:
                case And(a, b):
                    want = a if rule == "and_elim_l" else b
                    if seq.goal != want:
                        bad("conclusion does not match the selected conjunct")
                case _:
                    bad("premise must be a conjunction")

        case "or_intro_l" | "or_intro_r":
            need_prems(1)
            same_ctx(prems[0])
            match seq.goal:
                case Or(a, b):
                    want = a if rule == "or_intro_l" else b
                    if prems[0].goal != want:
                        bad("premise does not match the selected disjunct")
                case _:
                    bad("conclusion must be a disjunction")

        case "or_elim":
            need_prems(3)
            (lab_l, lab_r) = d.params
            same_ctx(prems[0])
            match prems[0].goal:
                case Or(a, b):
                    if prems[1] != seq.extended(lab_l, a):
                        bad("left branch must add the left disjunct and keep the goal")
                    if prems[2] != seq.extended(lab_r, b):
                        bad("right branch must add the right disjunct and keep the goal")
                case _:
                    bad("major premise of or_elim must be a disjunction")

        case "forall_intro":
            need_prems(1)
            (eigen,) = d.params
            match seq.goal:
                case Forall(_, s, body):
                    v = Var(eigen, s)
                    if prems[0] != seq.with_goal(open_formula(body, v)):
                        bad("premise must be the opened body in the same context")
                    if any(eigen in free_vars(h) for _, h in seq.hyps):
                        bad(f"eigenvariable {eigen} occurs free in the context")
                    if eigen in free_vars(seq.goal):
                        bad(f"eigenvariable {eigen} occurs free in the goal")
                case _:
                    bad("forall_intro conclusion must be universally quantified")

        case "forall_elim":
            need_prems(1)
            (t,) = d.params
            same_ctx(prems[0])
            match prems[0].goal:
                case Forall(_, s, body):
                    ts = sort_of_term(t, env, {})
                    if ts is not None and ts != s:
                        bad(f"instantiation term has sort {ts}, binder wants {s}")
                    if seq.goal != open_formula(body, t):
                        bad("conclusion is not the instantiated body")
                case _:
                    bad("premise of forall_elim must be universally quantified")

        case "exists_intro":
            need_prems(1)
            (w,) = d.params
            same_ctx(prems[0])
            match seq.goal:
                case Exists(_, s, body):
                    ws = sort_of_term(w, env, {})
                    if ws is not None and ws != s:
                        bad(f"witness has sort {ws}, binder wants {s}")
                    if prems[0].goal != open_formula(body, w):
                        bad("premise is not the body at the witness")
                case _:
                    bad("exists_intro conclusion must be existentially quantified")

        case "exists_elim":
            need_prems(2)
            (eigen, label) = d.params
            same_ctx(prems[0])
            match prems[0].goal:
                case Exists(_, s, body):
                    v = Var(eigen, s)
                    if prems[1] != seq.extended(label, open_formula(body, v)):
                        bad("second premise must add the opened body and keep the goal")
                    if any(eigen in free_vars(h) for _, h in seq.hyps):
                        bad(f"eigenvariable {eigen} occurs free in the context")
                    if eigen in free_vars(seq.goal) or eigen in free_vars(prems[0].goal):
                        bad(f"eigenvariable {eigen} escapes its scope")
                case _:
                    bad("major premise of exists_elim must be existential")

        case "eq_refl":
            need_prems(0)
            match seq.goal:
                case Eq(l, r, _):
                    if l != r:
                        bad("eq_refl requires syntactically equal sides")
                case _:
                    bad("eq_refl conclusion must be an equality")

        case "eq_rewrite":
            need_prems(2)
            (template,) = d.params
            same_ctx(prems[0])
            same_ctx(prems[1])
            match prems[0].goal:
                case Eq(a, b, _):
                    if prems[1].goal != elaborate(open_formula(template, a)):
                        bad("body premise does not match template at the lhs")
                    if seq.goal != elaborate(open_formula(template, b)):
                        bad("conclusion does not match template at the rhs")
                case _:
                    bad("first premise of eq_rewrite must be an equality")

        case "dne":
            need_prems(1)
            same_ctx(prems[0])
            if prems[0].goal != Imp(Imp(seq.goal, BOT), BOT):
                bad("premise of dne must be the double negation of the conclusion")

        case "schema_intro":
            need_prems(1)
            (symbol,) = d.params
            match seq.goal:
                case SchemaAll(name, sort, body):
                    if symbol != name and symbol_occurs(body, symbol):
                        bad(f"renaming to {symbol} would capture an existing symbol")
                    opened = elaborate(rename_schema_symbol(body, name, symbol, sort))
                    if prems[0] != seq.with_goal(opened):
                        bad("premise must be the schema body in the same context")
                    if any(symbol_occurs(h, symbol) for _, h in seq.hyps):
                        bad(f"schematic symbol {symbol} occurs in the context")
                case _:
                    bad("schema_intro conclusion must be a schematic binder")

        case "defeq":
            need_prems(0)
            (fn, ctor, subst) = d.params
            fx = env.fixpoint(fn)
            if fx is None:
                bad(f"unknown fixpoint {fn}")
            clause = next((c for c in fx.clauses if c.ctor == ctor), None)
            if clause is None:
                bad(f"{fn} has no clause for constructor {ctor}")
            smap = dict(subst)
            sorts = {n: s for n, s in fx.params if n != fx.params[fx.match_index][0]}
            sorts.update({n: s for n, s in clause.binders})
            if set(smap) != set(sorts):
                bad("defeq substitution must cover exactly the clause variables")
            for n, value in smap.items():
                got = sort_of_term(value, env, {})
                if got is not None and got != sorts[n]:
                    bad(f"defeq instantiates {n} at sort {got}, expected {sorts[n]}")

            def inst(t: Term) -> Term:
                match t:
                    case Var(n, _) if n in smap:
                        return smap[n]
                    case Var() | BVar():
                        return t
                    case Ctor(n, args):
                        return Ctor(n, tuple(inst(a) for a in args))
                    case FunApp(n, args):
                        return FunApp(n, tuple(inst(a) for a in args))

            args = []
            for i, (pname, _) in enumerate(fx.params):
                if i == fx.match_index:
                    args.append(inst(Ctor(ctor, tuple(Var(n, s) for n, s in clause.binders))))
                else:
                    args.append(inst(Var(pname, None)))
            want = Eq(FunApp(fn, tuple(args)), inst(clause.rhs), fx.result)
            if seq.goal != elaborate(want):
                bad("conclusion is not the stated defining-equation instance")

        case "induction":
            need_prems(0)
            (sort_name, template) = d.params
            ind = env.inductive(sort_name)
            if ind is None:
                bad(f"unknown inductive sort {sort_name}")
            if seq.goal != elaborate(induction_formula(ind, template)):
                bad("conclusion is not the induction principle instance")

        case "lin_arith":
            (coeffs,) = d.params
            if len(coeffs) != len(prems):
                bad("one coefficient per premise is required")
            if not standard_arith_env(env):
                bad("lin_arith requires the canonical nat/add/mul definitions")
            goal_poly = eq_diff_poly(seq.goal)
            if goal_poly is None:
                bad("lin_arith conclusion must be a nat equality")
            acc: Poly = {}
            for c, p in zip(coeffs, prems):
                same_ctx(p)
                hp = eq_diff_poly(p.goal)
                if hp is None:
                    bad("lin_arith premises must be nat equalities")
                acc = _poly_add(acc, _poly_scale(hp, Fraction(c)))
            if acc != goal_poly:
                bad("goal is not the stated linear combination of the premises")

        case "thm":
            need_prems(0)
            (name, inst) = d.params
            rec = env.theorem(name)
            if rec is None:
                bad(f"unknown theorem {name}")
            if not mode_allows(mode, rec.mode):
                raise ModeViolation(
                    f"theorem {name} was proven in {rec.mode.value}, not usable in {mode.value}"
                )
            stmt = rec.statement
            imap = dict(inst)
            while isinstance(stmt, SchemaAll):
                if stmt.sort != PROP:
                    bad(f"theorem {name} has a non-Prop schematic binder; cannot instantiate")
                if stmt.name not in imap:
                    bad(f"instantiation missing for schematic {stmt.name}")
                stmt = subst_atom(stmt.body, stmt.name, imap.pop(stmt.name))
            if imap:
                bad(f"superfluous instantiations: {sorted(imap)}")
            if elaborate(stmt) != seq.goal:
                bad(f"conclusion is not the stated instance of theorem {name}")

        case _:
            bad(f"unknown rule {rule}")


def check_derivation(d: Derivation, mode: CalculusMode, env: Env = EMPTY_ENV) -> None:
    """Validate every node of `d`; raises RuleViolation / ModeViolation.

    Purely structural, no search; iterative so arbitrarily deep trees cannot
    hit the recursion limit.
    """
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        _check_node(node, mode, env, path)
        for i, p in enumerate(node.prems):
            stack.append((p, path + (i,)))


# ---------------------------------------------------------------------------
# Axiom schemas and the Hilbert checker
# ---------------------------------------------------------------------------

_A, _B, _C = Atom("A"), Atom("B"), Atom("C")

SCHEMAS: dict[str, tuple[Formula, tuple[str, ...]]] = {
    "A1": (Imp(_A, Imp(_B, _A)), ("A", "B")),
    "A2": (Imp(Imp(_A, Imp(_B, _C)), Imp(Imp(_A, _B), Imp(_A, _C))), ("A", "B", "C")),
    "EM": (Or(_A, Neg(_A)), ("A",)),
    "DNe": (Imp(Neg(Neg(_A)), _A), ("A",)),
}


def instantiate_schema(schema: str, subst: dict[str, Formula]) -> Formula:
    """Close an axiom schema (A1/A2/EM/DNe) under a metavariable substitution."""
    if schema not in SCHEMAS:
        raise MissingMetavariable(f"unknown schema {schema}")
    pattern, metavars = SCHEMAS[schema]
    missing = [m for m in metavars if m not in subst]
    if missing:
        raise MissingMetavariable(f"schema {schema} needs {missing}")
    out = pattern
    # Substitute via placeholders so an identity substitution cannot interfere.
    placeholders = {m: Atom("?schema?" + m) for m in metavars}
    for m, ph in placeholders.items():
        out = subst_atom(out, m, ph)
    for m, ph in placeholders.items():
        out = subst_atom(out, ph.name, subst[m])
    return out


def _match_formula(pattern: Formula, target: Formula, metavars: tuple[str, ...],
                   binding: dict[str, Formula]) -> bool:
    match pattern:
        case Atom(n) if n in metavars:
            if n in binding:
                return binding[n] == target
            binding[n] = target
            return True
        case Imp(pl, pr):
            match target:
                case Imp(tl, tr):
                    return (_match_formula(pl, tl, metavars, binding)
                            and _match_formula(pr, tr, metavars, binding))
            return False
        case _:
            return pattern == target


def is_schema_instance(schema: str, f: Formula) -> bool:
    pattern, metavars = SCHEMAS[schema]
    return _match_formula(elaborate(pattern), elaborate(f), metavars, {})


def hilbert_check(steps: list[Formula], hyps: list[Formula], target: Formula) -> None:
    """Check a flat Hilbert proof: each step is A1/A2, a hypothesis, or MP.

    Raises StepFailure at the first unjustified step, or if the last step is
    not the target.
    """
    if not steps:
        raise StepFailure(0, "empty proof")
    elab_steps = [elaborate(s) for s in steps]
    elab_hyps = {elaborate(h) for h in hyps}
    for i, s in enumerate(elab_steps):
        if s in elab_hyps:
            continue
        if is_schema_instance("A1", s) or is_schema_instance("A2", s):
            continue
        earlier = elab_steps[:i]
        if any(Imp(a, s) in earlier for a in earlier):
            continue
        raise StepFailure(i)
    if elab_steps[-1] != elaborate(target):
        raise StepFailure(len(steps) - 1, "last step is not the target")
