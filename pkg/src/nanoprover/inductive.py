"""Inductive types, structurally recursive functions, evaluation, simplification.

`define_inductive` / `define_fixpoint` are the only sanctioned way to extend an
environment: they run the positivity / exhaustiveness / structural-decrease
checks that the kernel's `defeq` and `induction` leaves then rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DuplicateName,
    NonExhaustiveMatch,
    NonPositiveOccurrence,
    NonStructuralRecursion,
    OverlappingPatterns,
    SortMismatch,
    UnboundSymbol,
)
from .kernel import (
    And,
    Atom,
    BVar,
    Bottom,
    Clause,
    Ctor,
    Derivation,
    Env,
    Eq,
    Exists,
    Forall,
    Formula,
    FunApp,
    FixpointDef,
    Iff,
    Imp,
    InductiveDef,
    Neg,
    Or,
    PredApp,
    SchemaAll,
    Sequent,
    Term,
    Var,
    close_formula,
    eq_diff_poly,
    induction_formula,
    open_formula,
)

SIMPL_FUEL = 100_000


# ---------------------------------------------------------------------------
# Definitions
# ---------------------------------------------------------------------------

def define_inductive(d: InductiveDef, env: Env) -> Env:
    """Register an inductive type, its constructors and induction principle.

    Redefining a name is allowed only when the new definition is structurally
    identical to the registered one (so the paper's listings replay under the
    standard prelude).
    """
    existing = env.inductive(d.name)
    if existing is not None:
        if existing == d:
            return env
        raise DuplicateName(f"inductive {d.name} is already defined differently")
    if env.fixpoint(d.name) is not None:
        raise DuplicateName(f"{d.name} already names a fixpoint")
    cnames = [c for c, _ in d.constructors]
    if len(set(cnames)) != len(cnames):
        raise DuplicateName(f"duplicate constructor in {d.name}")
    for c, _ in d.constructors:
        if env.constructor(c) is not None:
            raise DuplicateName(f"constructor {c} is already defined")
    for c, argsorts in d.constructors:
        for s in argsorts:
            # Strictly positive, first-order: arguments are the type itself or
            # a previously declared sort; no function sorts.
            if s != d.name and not env.is_sort(s):
                raise NonPositiveOccurrence(
                    f"constructor {c}: argument sort {s} is not a declared sort"
                )
    return env.with_inductive(d)


def define_fixpoint(d: FixpointDef, env: Env) -> Env:
    """Register a structurally recursive function and its defining equations."""
    existing = env.fixpoint(d.name)
    if existing is not None:
        if existing == d:
            return env
        raise DuplicateName(f"fixpoint {d.name} is already defined differently")
    if env.inductive(d.name) is not None or env.constructor(d.name) is not None:
        raise DuplicateName(f"{d.name} already names a type or constructor")
    pnames = [n for n, _ in d.params]
    if len(set(pnames)) != len(pnames):
        raise DuplicateName(f"duplicate parameter in {d.name}")
    if not (0 <= d.match_index < len(d.params)):
        raise NonExhaustiveMatch(f"{d.name}: match index out of range")
    msort = d.params[d.match_index][1]
    ind = env.inductive(msort)
    if ind is None:
        raise SortMismatch(f"{d.name} matches on non-inductive sort {msort}")

    covered = [c.ctor for c in d.clauses]
    if len(set(covered)) != len(covered):
        raise OverlappingPatterns(f"{d.name}: repeated constructor pattern")
    want = [c for c, _ in ind.constructors]
    if set(covered) != set(want):
        missing = sorted(set(want) - set(covered))
        raise NonExhaustiveMatch(f"{d.name}: missing patterns for {missing}")

    ctor_args = dict(ind.constructors)
    for cl in d.clauses:
        if len(cl.binders) != len(ctor_args[cl.ctor]):
            raise NonExhaustiveMatch(
                f"{d.name}: pattern for {cl.ctor} binds {len(cl.binders)} "
                f"variables, constructor has {len(ctor_args[cl.ctor])}"
            )
        recursive_ok = {n for (n, s), cs in zip(cl.binders, ctor_args[cl.ctor]) if cs == msort}
        _check_structural(d, cl.rhs, recursive_ok, env)
    return env.with_fixpoint(d)


def _check_structural(d: FixpointDef, t: Term, ok_vars: set[str], env: Env) -> None:
    """Every recursive call's decreasing argument must be a pattern variable."""
    match t:
        case FunApp(n, args):
            if n == d.name:
                if len(args) <= d.match_index:
                    raise NonStructuralRecursion(f"{d.name}: underapplied recursive call")
                dec = args[d.match_index]
                if not (isinstance(dec, Var) and dec.name in ok_vars):
                    raise NonStructuralRecursion(
                        f"{d.name}: recursive call argument is not a strict subterm"
                    )
            elif env.fixpoint(n) is None:
                raise UnboundSymbol(f"{d.name}: unknown function {n}")
            for a in args:
                _check_structural(d, a, ok_vars, env)
        case Ctor(_, args):
            for a in args:
                _check_structural(d, a, ok_vars, env)
        case _:
            pass


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Value:
    """A closed constructor tree."""

    ctor: str
    args: tuple["Value", ...] = ()

    def to_term(self) -> Term:
        # Iterative along unary spines so deep numerals cannot overflow the
        # interpreter stack; branching constructors recurse (they stay small).
        spine = []
        v = self
        while len(v.args) == 1:
            spine.append(v.ctor)
            v = v.args[0]
        t = Ctor(v.ctor, tuple(a.to_term() for a in v.args))
        for c in reversed(spine):
            t = Ctor(c, (t,))
        return t


class NatV(Value):
    """A nat value compressed to an int.

    Unary arithmetic at n = 1000 means hundreds of millions of constructor
    cells; this representation still *decomposes* as S/O for clause matching
    (ctor/args are computed properties), so every fixpoint evaluates by its
    defining equations, one successor at a time, in O(1) per step.
    """

    __slots__ = ("n",)

    def __init__(self, n: int):
        object.__setattr__(self, "n", n)

    @property
    def ctor(self) -> str:  # type: ignore[override]
        return "S" if self.n else "O"

    @property
    def args(self) -> tuple["Value", ...]:  # type: ignore[override]
        return (NatV(self.n - 1),) if self.n else ()

    def __eq__(self, other):
        if isinstance(other, NatV):
            return self.n == other.n
        if isinstance(other, Value):
            return self.ctor == other.ctor and self.args == other.args
        return NotImplemented

    def __hash__(self):
        return hash(("nat", self.n))

    def __repr__(self):
        return f"NatV({self.n})"

    def to_term(self) -> Term:
        t: Term = Ctor("O")
        for _ in range(self.n):
            t = Ctor("S", (t,))
        return t


def nat_value(n: int) -> Value:
    return NatV(n)


def value_to_int(v: Value) -> int:
    if isinstance(v, NatV):
        return v.n
    n = 0
    while v.ctor == "S":
        n += 1
        v = v.args[0]
    if v.ctor != "O":
        raise ValueError(f"not a nat value: {v.ctor}")
    return n


# The evaluator is an explicit-stack machine: values can be hundreds of
# thousands of constructors deep (range_sum 1000), far beyond any sane
# recursion limit.
_EVAL, _BUILD_CTOR, _CALL_FIX = 0, 1, 2


def _machine(env: Env, start: Term, binding: dict[str, Value] | None) -> Value:
    todo: list[tuple] = [(_EVAL, start, binding)]
    results: list[Value] = []
    while todo:
        frame = todo.pop()
        match frame[0]:
            case 0:  # _EVAL
                _, t, bnd = frame
                match t:
                    case Var(n, _):
                        if bnd is None or n not in bnd:
                            raise UnboundSymbol(f"free variable {n} in evaluated term")
                        results.append(bnd[n])
                    case BVar(k):
                        raise UnboundSymbol(f"dangling bound variable {k}")
                    case Ctor(n, args):
                        if env.constructor(n) is None:
                            raise UnboundSymbol(f"unknown constructor {n}")
                        todo.append((_BUILD_CTOR, n, len(args)))
                        for a in reversed(args):
                            todo.append((_EVAL, a, bnd))
                    case FunApp(n, args):
                        fx = env.fixpoint(n)
                        if fx is None:
                            raise UnboundSymbol(f"unknown function {n}")
                        todo.append((_CALL_FIX, fx, len(args)))
                        for a in reversed(args):
                            todo.append((_EVAL, a, bnd))
                    case _:
                        raise TypeError(f"not a term: {t!r}")
            case 1:  # _BUILD_CTOR
                _, name, k = frame
                if name == "O" and k == 0:
                    results.append(NatV(0))
                    continue
                args = tuple(results[len(results) - k:]) if k else ()
                if k:
                    del results[len(results) - k:]
                if name == "S" and isinstance(args[0], NatV):
                    results.append(NatV(args[0].n + 1))
                else:
                    results.append(Value(name, args))
            case 2:  # _CALL_FIX
                _, fx, k = frame
                vals = results[len(results) - k:]
                del results[len(results) - k:]
                # The canonical add/mul agree with integer arithmetic by
                # construction; shortcut them so unary numerals stay O(1).
                if (len(vals) == 2 and isinstance(vals[0], NatV)
                        and isinstance(vals[1], NatV)):
                    from .kernel import ADD_DEF, MUL_DEF
                    if fx == ADD_DEF:
                        results.append(NatV(vals[0].n + vals[1].n))
                        continue
                    if fx == MUL_DEF:
                        results.append(NatV(vals[0].n * vals[1].n))
                        continue
                scrut = vals[fx.match_index]
                clause = next((c for c in fx.clauses if c.ctor == scrut.ctor), None)
                if clause is None:
                    raise UnboundSymbol(
                        f"{fx.name}: no clause for constructor {scrut.ctor}")
                bnd = {}
                for i, (pname, _) in enumerate(fx.params):
                    if i != fx.match_index:
                        bnd[pname] = vals[i]
                for (bname, _), v in zip(clause.binders, scrut.args):
                    bnd[bname] = v
                todo.append((_EVAL, clause.rhs, bnd))
    assert len(results) == 1
    return results[0]


def eval_term(env: Env, expr: Term) -> Value:
    """Full call-by-value evaluation of a closed term.

    Terminates because every registered fixpoint is structurally recursive;
    runs on an explicit stack so half-million-constructor values are fine.
    """
    return _machine(env, expr, None)


def _apply_fixpoint(env: Env, fx: FixpointDef, vals: list[Value]) -> Value:
    """Apply a fixpoint to already-evaluated arguments."""
    binding = {pname: v for (pname, _), v in zip(fx.params, vals)}
    return _machine(env, FunApp(fx.name, tuple(Var(p, s) for p, s in fx.params)),
                    binding)


# ---------------------------------------------------------------------------
# Induction principles
# ---------------------------------------------------------------------------

def induction_principle(d: InductiveDef) -> Formula:
    """The principle as a formula over a generic unary predicate P.

    nat yields  P O -> (forall n. P n -> P (S n)) -> forall n. P n,
    the meta-notation [| ...; ... |] ==> ... reading of the schema.
    """
    template = PredApp("P", (BVar(0),))
    return induction_formula(d, template)


# ---------------------------------------------------------------------------
# Symbolic simplification with defining equations
# ---------------------------------------------------------------------------

def _find_redex(t: Term, env: Env):
    """Leftmost-innermost reducible call: returns (redex, rhs_instance) or None."""
    match t:
        case Ctor(_, args) | FunApp(_, args):
            for a in args:
                found = _find_redex(a, env)
                if found:
                    return found
        case _:
            return None
    match t:
        case FunApp(n, args):
            fx = env.fixpoint(n)
            if fx is None or len(args) != len(fx.params):
                return None
            scrut = args[fx.match_index]
            if not isinstance(scrut, Ctor):
                return None
            clause = next((c for c in fx.clauses if c.ctor == scrut.name), None)
            if clause is None or len(scrut.args) != len(clause.binders):
                return None
            smap: dict[str, Term] = {}
            for i, (pname, _) in enumerate(fx.params):
                if i != fx.match_index:
                    smap[pname] = args[i]
            for (bname, _), sub in zip(clause.binders, scrut.args):
                smap[bname] = sub
            return t, _subst_clause(clause.rhs, smap), (n, scrut.name, smap)
    return None


def _subst_clause(t: Term, smap: dict[str, Term]) -> Term:
    match t:
        case Var(n, _):
            return smap.get(n, t)
        case BVar():
            return t
        case Ctor(n, args):
            return Ctor(n, tuple(_subst_clause(a, smap) for a in args))
        case FunApp(n, args):
            return FunApp(n, tuple(_subst_clause(a, smap) for a in args))
    raise TypeError(f"not a term: {t!r}")


def _replace_term(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    match t:
        case Ctor(n, args):
            return Ctor(n, tuple(_replace_term(a, old, new) for a in args))
        case FunApp(n, args):
            return FunApp(n, tuple(_replace_term(a, old, new) for a in args))
        case _:
            return t


def simpl_term(env: Env, t: Term) -> Term:
    """Rewrite with defining equations until no clause fires."""
    for _ in range(SIMPL_FUEL):
        found = _find_redex(t, env)
        if not found:
            return t
        redex, rhs, _ = found
        t = _replace_term(t, redex, rhs)
    raise RecursionError("simpl fuel exhausted")  # unreachable for checked fixpoints


def simpl_formula(env: Env, f: Formula) -> Formula:
    """Exhaustive rewriting inside a formula, including under binders."""
    match f:
        case Atom() | Bottom():
            return f
        case Neg(b):
            return Neg(simpl_formula(env, b))
        case And(l, r):
            return And(simpl_formula(env, l), simpl_formula(env, r))
        case Or(l, r):
            return Or(simpl_formula(env, l), simpl_formula(env, r))
        case Imp(l, r):
            return Imp(simpl_formula(env, l), simpl_formula(env, r))
        case Iff(l, r):
            return Iff(simpl_formula(env, l), simpl_formula(env, r))
        case Forall(h, s, b):
            return Forall(h, s, simpl_formula(env, b))
        case Exists(h, s, b):
            return Exists(h, s, simpl_formula(env, b))
        case SchemaAll(n, s, b):
            return SchemaAll(n, s, simpl_formula(env, b))
        case Eq(l, r, s):
            return Eq(simpl_term(env, l), simpl_term(env, r), s)
        case PredApp(n, args):
            return PredApp(n, tuple(simpl_term(env, a) for a in args))
    raise TypeError(f"not a formula: {f!r}")


def simpl(env: Env, x):
    """Simplify a Term or a Formula (same kind out)."""
    if isinstance(x, (Var, BVar, Ctor, FunApp)):
        return simpl_term(env, x)
    return simpl_formula(env, x)


@dataclass(frozen=True)
class SimplStep:
    """One top-level rewrite: formula = template@lhs before, template@rhs after."""

    template: Formula  # one-hole template (dangling BVar 0)
    lhs: Term
    rhs: Term
    defeq: tuple  # (fn, ctor, subst-tuple) for the kernel leaf


def simpl_with_steps(env: Env, f: Formula) -> tuple[Formula, list[SimplStep]]:
    """Simplify, recording a kernel-replayable step per rewrite.

    Only redexes *outside* binders are rewritten here: the kernel's Leibniz
    rule rewrites with closed equations.  (Tactic scripts simplify after
    intros, so their goals are binder-free.)
    """
    steps: list[SimplStep] = []
    for _ in range(SIMPL_FUEL):
        found = None
        for t in _toplevel_terms(f):
            found = _find_redex(t, env)
            if found:
                break
        if not found:
            return f, steps
        redex, rhs, (fn, ctor, smap) = found
        template = close_formula(f, redex)
        new_f = open_formula(template, rhs)
        steps.append(SimplStep(template, redex, rhs,
                               (fn, ctor, tuple(sorted(smap.items())))))
        f = new_f
    raise RecursionError("simpl fuel exhausted")


def _toplevel_terms(f: Formula):
    """Terms of `f` not under any first-order binder."""
    match f:
        case Eq(l, r, _):
            yield l
            yield r
        case PredApp(_, args):
            yield from args
        case Neg(b):
            yield from _toplevel_terms(b)
        case And(l, r) | Or(l, r) | Imp(l, r) | Iff(l, r):
            yield from _toplevel_terms(l)
            yield from _toplevel_terms(r)
        case SchemaAll(_, _, b):
            yield from _toplevel_terms(b)
        case _:
            return


# ---------------------------------------------------------------------------
# Linear-arithmetic goal closer over nat equalities
# ---------------------------------------------------------------------------

class ArithFailure(Exception):
    """Goal is not a linear combination of the hypotheses in this fragment."""


def _solve_linear(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve rows * x = rhs exactly; None when inconsistent."""
    n_eq = len(rows)
    n_var = len(rows[0]) if rows else 0
    aug = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    pivot_cols: list[int] = []
    r = 0
    for c in range(n_var):
        pivot = next((i for i in range(r, n_eq) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        scale = aug[r][c]
        aug[r] = [v / scale for v in aug[r]]
        for i in range(n_eq):
            if i != r and aug[i][c] != 0:
                factor = aug[i][c]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
        if r == n_eq:
            break
    for i in range(r, n_eq):
        if all(v == 0 for v in aug[i][:n_var]) and aug[i][n_var] != 0:
            return None
    sol = [Fraction(0)] * n_var
    for row_i, c in enumerate(pivot_cols):
        sol[c] = aug[row_i][n_var]
    return sol


def arith_solve(env: Env, hyps: list[tuple[str, Formula]], goal: Formula,
                seq: Sequent) -> Derivation:
    """Close a nat-equality goal as a linear combination of equality hypotheses.

    Both sides are normalized to multivariate polynomials, treating maximal
    uninterpreted applications as atoms.  On success returns a `lin_arith`
    kernel node whose premises are hypothesis references; the kernel re-checks
    the combination itself.  Raises ArithFailure otherwise.
    """
    goal_poly = eq_diff_poly(goal)
    if goal_poly is None:
        raise ArithFailure("goal is not a nat equality")
    usable = [(lab, f, p) for lab, f in hyps if (p := eq_diff_poly(f)) is not None]

    monomials = sorted(set(goal_poly) | {m for _, _, p in usable for m in p})
    rows = [[p.get(m, Fraction(0)) for _, _, p in usable] for m in monomials]
    rhs = [goal_poly.get(m, Fraction(0)) for m in monomials]
    if usable:
        coeffs = _solve_linear(rows, rhs)
    else:
        coeffs = [] if all(v == 0 for v in rhs) else None
    if coeffs is None:
        raise ArithFailure("not derivable in the linear fragment")

    prems = tuple(
        Derivation("hyp", (lab,), seq.with_goal(f))
        for (lab, f, _), c in zip(usable, coeffs)
    )
    return Derivation("lin_arith", (tuple(coeffs),), seq.with_goal(goal), prems)
