"""Raw surface ASTs and their resolution into kernel formulas and terms.

The parser produces these small trees without consulting any environment;
resolution happens later, against the environment and whatever symbols are in
scope at that point (statement schema binders while parsing, the focused
sequent while executing a tactic argument).  Resolution also performs the
light sort inference that lets `forall n, 2 * range_sum n = n * (n + 1)`
omit the binder sort.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ArityMismatch, SortMismatch, UnboundVariable
from .kernel import (
    And,
    ArrowSort,
    Atom,
    BOT,
    BVar,
    Ctor,
    Env,
    Eq,
    Exists,
    Forall,
    Formula,
    FunApp,
    Iff,
    Imp,
    Neg,
    Or,
    PredApp,
    PROP,
    SchemaAll,
    Sort,
    Term,
    TYPE,
    Var,
    free_vars,
    is_pred_sort,
    map_terms,
)

# --- raw terms ---------------------------------------------------------------

@dataclass(frozen=True)
class RName:
    name: str


@dataclass(frozen=True)
class RNum:
    value: int


@dataclass(frozen=True)
class RApp:
    head: "RTerm"
    args: tuple["RTerm", ...]


@dataclass(frozen=True)
class RBin:
    op: str  # "+", "*", "||", "&&"
    left: "RTerm"
    right: "RTerm"


RTerm = Union[RName, RNum, RApp, RBin]

# --- raw formulas -------------------------------------------------------------

@dataclass(frozen=True)
class RBot:
    pass


@dataclass(frozen=True)
class RNeg:
    body: "RFormula"


@dataclass(frozen=True)
class RConn:
    op: str  # "/\\", "\\/", "->", "<->"
    left: "RFormula"
    right: "RFormula"


@dataclass(frozen=True)
class RQuant:
    kind: str  # "forall" | "exists"
    binders: tuple[tuple[str, "RSort | None"], ...]
    body: "RFormula"


@dataclass(frozen=True)
class RCompare:
    lhs: RTerm
    rhs: RTerm


@dataclass(frozen=True)
class RSpine:
    head: str
    args: tuple[RTerm, ...]


RFormula = Union[RBot, RNeg, RConn, RQuant, RCompare, RSpine]


@dataclass(frozen=True)
class RArrow:
    args: tuple["RSort", ...]
    result: "RSort"


RSort = Union[str, RArrow]

# Built-in infix notation over terms (the paper's Notation lines, prewired).
_BIN_FUNS = {"+": "add", "*": "mul", "||": "orb", "&&": "andb"}
_BIN_SORTS = {"+": "nat", "*": "nat", "||": "bool", "&&": "bool"}


def resolve_sort(rs: RSort) -> Sort:
    if isinstance(rs, RArrow):
        return ArrowSort(tuple(resolve_sort(a) for a in rs.args), resolve_sort(rs.result))
    return rs


class _Slot:
    """A binder whose sort may still be getting inferred."""

    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: Sort | None):
        self.name = name
        self.sort = sort


class Resolver:
    def __init__(self, env: Env, schema: dict[str, Sort] | None = None,
                 variables: dict[str, Sort] | None = None):
        self.env = env
        self.schema = dict(schema or {})
        self.vars = dict(variables or {})
        self.stack: list[_Slot] = []

    # -- terms ---------------------------------------------------------------

    def term_sort(self, t: Term) -> Sort | None:
        match t:
            case Var(_, s):
                return s
            case BVar(k):
                return self.stack[k].sort if k < len(self.stack) else None
            case Ctor(n, _):
                found = self.env.constructor(n)
                return found[0].name if found else None
            case FunApp(n, _):
                fx = self.env.fixpoint(n)
                if fx:
                    return fx.result
                s = self.schema.get(n)
                return s.result if isinstance(s, ArrowSort) else None

    def constrain(self, t: Term, want: Sort, what: str) -> None:
        match t:
            case BVar(k):
                slot = self.stack[k]
                if slot.sort is None:
                    slot.sort = want
                elif slot.sort != want:
                    raise SortMismatch(
                        f"{what}: {slot.name} has sort {slot.sort}, expected {want}")
            case _:
                got = self.term_sort(t)
                if got is not None and got != want:
                    raise SortMismatch(f"{what}: expected {want}, found {got}")

    def term(self, raw: RTerm) -> Term:
        match raw:
            case RNum(v):
                t: Term = Ctor("O")
                for _ in range(v):
                    t = Ctor("S", (t,))
                return t
            case RBin(op, l, r):
                lt, rt = self.term(l), self.term(r)
                want = _BIN_SORTS[op]
                self.constrain(lt, want, f"operand of {op}")
                self.constrain(rt, want, f"operand of {op}")
                return FunApp(_BIN_FUNS[op], (lt, rt))
            case RName(n):
                return self._ident_term(n, ())
            case RApp(RName(n), args):
                return self._ident_term(n, tuple(self.term(a) for a in args))
            case RApp(head, args):
                inner = self.term(head)
                match inner:
                    case FunApp(n, prev):
                        return self._ident_term(n, prev + tuple(self.term(a) for a in args))
                raise ArityMismatch("only named heads can be applied")
        raise TypeError(f"not a raw term: {raw!r}")

    def _ident_term(self, n: str, args: tuple[Term, ...]) -> Term:
        for k, slot in enumerate(self.stack):
            if slot.name == n:
                if args:
                    raise ArityMismatch(f"bound variable {n} cannot be applied")
                return BVar(k)
        found = self.env.constructor(n)
        if found is not None:
            ind, argsorts = found
            if len(args) != len(argsorts):
                raise ArityMismatch(
                    f"constructor {n} expects {len(argsorts)} args, got {len(args)}")
            for a, want in zip(args, argsorts):
                self.constrain(a, want, f"argument of {n}")
            return Ctor(n, args)
        fx = self.env.fixpoint(n)
        if fx is not None:
            if len(args) != len(fx.params):
                raise ArityMismatch(f"{n} expects {len(fx.params)} args, got {len(args)}")
            for a, (_, want) in zip(args, fx.params):
                self.constrain(a, want, f"argument of {n}")
            return FunApp(n, args)
        s = self.schema.get(n)
        if isinstance(s, ArrowSort) and not is_pred_sort(s):
            if len(args) != len(s.args):
                raise ArityMismatch(f"{n} expects {len(s.args)} args, got {len(args)}")
            for a, want in zip(args, s.args):
                self.constrain(a, want, f"argument of {n}")
            return FunApp(n, args)
        if n in self.vars:
            vs = self.vars[n]
            if args:
                if isinstance(vs, ArrowSort):
                    if len(args) != len(vs.args):
                        raise ArityMismatch(f"{n} expects {len(vs.args)} args")
                    for a, want in zip(args, vs.args):
                        self.constrain(a, want, f"argument of {n}")
                    return FunApp(n, args)
                raise ArityMismatch(f"variable {n} cannot be applied")
            return Var(n, vs)
        raise UnboundVariable(f"unknown term identifier {n}")

    # -- formulas -------------------------------------------------------------

    def formula(self, raw: RFormula) -> Formula:
        match raw:
            case RBot():
                return BOT
            case RNeg(b):
                return Neg(self.formula(b))
            case RConn(op, l, r):
                lf, rf = self.formula(l), self.formula(r)
                match op:
                    case "/\\":
                        return And(lf, rf)
                    case "\\/":
                        return Or(lf, rf)
                    case "->":
                        return Imp(lf, rf)
                    case "<->":
                        return Iff(lf, rf)
                raise ValueError(f"unknown connective {op}")
            case RQuant(kind, binders, body):
                return self._quant(kind, list(binders), body, allow_schema=False)
            case RCompare(l, r):
                lt = self.term(l)
                rt = self.term(r)
                s = self.term_sort(lt)
                if s is None:
                    s = self.term_sort(rt)
                if s is None:
                    s = TYPE
                self.constrain(lt, s, "equality")
                self.constrain(rt, s, "equality")
                return Eq(lt, rt, s)
            case RSpine(head, args):
                return self._spine_formula(head, args)
        raise TypeError(f"not a raw formula: {raw!r}")

    def _spine_formula(self, head: str, rargs: tuple[RTerm, ...]) -> Formula:
        sig = self.env.pred_sig(head)
        if sig is None and is_pred_sort(self.schema.get(head)):
            sig = self.schema[head].args  # type: ignore[union-attr]
        if sig is not None:
            if len(rargs) != len(sig):
                raise ArityMismatch(
                    f"predicate {head} expects {len(sig)} args, got {len(rargs)}")
            args = tuple(self.term(a) for a in rargs)
            for a, want in zip(args, sig):
                self.constrain(a, want, f"argument of {head}")
            return PredApp(head, args)
        if rargs:
            raise UnboundVariable(f"unknown predicate {head}")
        if any(slot.name == head for slot in self.stack) or head in self.vars:
            raise SortMismatch(f"term variable {head} used as a formula")
        if self.schema.get(head) not in (None, PROP):
            raise SortMismatch(f"{head} is not of sort Prop")
        return Atom(head)

    def _quant(self, kind: str, binders: list[tuple[str, RSort | None]],
               body: RFormula, allow_schema: bool) -> Formula:
        if not binders:
            match body:
                case RQuant("forall", inner, inner_body) if allow_schema:
                    # a consecutive forall still belongs to the statement prefix
                    return self._quant("forall", list(inner), inner_body, True)
            return self.formula(body)
        name, rsort = binders[0]
        sort = resolve_sort(rsort) if rsort is not None else None
        if sort == PROP or isinstance(sort, ArrowSort):
            if not allow_schema or kind != "forall":
                raise SortMismatch(
                    f"binder {name} : {sort} is only allowed as a statement prefix")
            if name in self.schema:
                raise SortMismatch(f"schematic {name} bound twice")
            self.schema[name] = sort
            try:
                inner = self._quant(kind, binders[1:], body, allow_schema)
            finally:
                del self.schema[name]
            return SchemaAll(name, sort, inner)
        slot = _Slot(name, sort)
        self.stack.insert(0, slot)
        try:
            inner = self._quant(kind, binders[1:], body, allow_schema=False)
        finally:
            self.stack.pop(0)
        if slot.sort is None:
            slot.sort = TYPE
        wrapped = Forall if kind == "forall" else Exists
        return wrapped(name, slot.sort, _shiftless(inner))


def _shiftless(f: Formula) -> Formula:
    """Binder bookkeeping happens via the stack; bodies are already indexed."""
    return f


def resolve_formula(raw: RFormula, env: Env,
                    schema: dict[str, Sort] | None = None,
                    variables: dict[str, Sort] | None = None) -> Formula:
    return Resolver(env, schema, variables).formula(raw)


def resolve_statement(raw: RFormula, env: Env) -> Formula:
    """Resolve a Lemma/Theorem statement; leading foralls may bind schemas."""
    r = Resolver(env)
    match raw:
        case RQuant("forall", binders, body):
            return r._quant("forall", list(binders), body, allow_schema=True)
        case _:
            return r.formula(raw)


def resolve_term(raw: RTerm, env: Env,
                 schema: dict[str, Sort] | None = None,
                 variables: dict[str, Sort] | None = None) -> Term:
    return Resolver(env, schema, variables).term(raw)


# --- scope extraction from a sequent (for tactic arguments) -------------------

def term_vars_with_sorts(t: Term, out: dict[str, Sort]) -> None:
    match t:
        case Var(n, s):
            if n not in out and s is not None:
                out[n] = s
        case Ctor(_, args) | FunApp(_, args):
            for a in args:
                term_vars_with_sorts(a, out)
        case _:
            pass


def formula_scope(f: Formula, env: Env, variables: dict[str, Sort],
                  preds: dict[str, Sort]) -> None:
    """Collect free variables and undeclared predicates/functions of `f`."""
    def on_term(t: Term, _d: int) -> Term:
        term_vars_with_sorts(t, variables)
        _collect_funs(t, env, preds)
        return t

    def walk(g: Formula) -> None:
        match g:
            case PredApp(n, args):
                if env.pred_sig(n) is None and n not in preds:
                    sorts = []
                    r = Resolver(env, preds)
                    for a in args:
                        sorts.append(r.term_sort(a) or TYPE)
                    preds[n] = ArrowSort(tuple(sorts), PROP)
                for a in args:
                    term_vars_with_sorts(a, variables)
                    _collect_funs(a, env, preds)
            case Neg(b):
                walk(b)
            case And(l, r2) | Or(l, r2) | Imp(l, r2) | Iff(l, r2):
                walk(l)
                walk(r2)
            case Forall(_, _, b) | Exists(_, _, b) | SchemaAll(_, _, b):
                walk(b)
            case Eq(l, r2, _):
                on_term(l, 0)
                on_term(r2, 0)
            case _:
                pass

    walk(g=f)


def _collect_funs(t: Term, env: Env, preds: dict[str, Sort]) -> None:
    match t:
        case FunApp(n, args):
            if env.fixpoint(n) is None and n not in preds:
                r = Resolver(env, preds)
                sorts = tuple(r.term_sort(a) or TYPE for a in args)
                preds[n] = ArrowSort(sorts, TYPE)
            for a in args:
                _collect_funs(a, env, preds)
        case Ctor(_, args):
            for a in args:
                _collect_funs(a, env, preds)
        case _:
            pass


def sequent_scope(hyps, goal, env: Env) -> tuple[dict[str, Sort], dict[str, Sort]]:
    """(variables, schema-symbols) visible in a sequent, for resolving args."""
    variables: dict[str, Sort] = {}
    schema: dict[str, Sort] = {}
    for _, h in hyps:
        formula_scope(h, env, variables, schema)
    formula_scope(goal, env, variables, schema)
    return variables, schema
