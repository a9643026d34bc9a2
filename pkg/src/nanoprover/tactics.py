"""The untrusted proof-search layer: tactics, tacticals, and Qed.

A ProofState is an immutable partial derivation whose open leaves are Holes;
tactics replace the focused hole with a fragment containing fresh holes.  At
Qed the assembled tree is handed to the kernel for re-checking, so a bug in
this module can fail a proof but never certify a false one.
"""

from __future__ import annotations

from dataclasses import dataclass, replace, field

from . import g4ip
from .errors import (
    IllFormedStatement,
    KernelRejection,
    NanoproverError,
    NonPropositionalGoal,
    NotProvable,
    OpenGoals,
    TacticError,
)
from .inductive import ArithFailure, arith_solve, simpl_with_steps
from .kernel import (
    And,
    Atom,
    BOT,
    Bottom,
    BVar,
    CalculusMode,
    Ctor,
    Derivation,
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
    Sequent,
    Sort,
    Term,
    TheoremRecord,
    Var,
    check_derivation,
    close_formula,
    elaborate,
    free_vars,
    induction_formula,
    induction_premises,
    map_terms,
    mode_allows,
    open_formula,
    rename_schema_symbol,
    subst_atom,
    symbol_occurs,
    well_formed,
)
from .resolve import Resolver, sequent_scope

# ---------------------------------------------------------------------------
# Tactics and tacticals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tactic:
    """A named proof-state transformer, e.g. Tactic("intro", ("H",))."""

    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return self.name if not self.args else f"{self.name}{self.args!r}"


@dataclass(frozen=True)
class Call:
    tactic: Tactic


@dataclass(frozen=True)
class Seq:
    first: "Tactical"
    second: "Tactical"


@dataclass(frozen=True)
class ThenAll:
    first: "Tactical"
    second: "Tactical"


@dataclass(frozen=True)
class Try:
    body: "Tactical"


@dataclass(frozen=True)
class RepeatPlus:
    body: "Tactical"


@dataclass(frozen=True)
class First:
    alternatives: tuple["Tactical", ...]


Tactical = Call | Seq | ThenAll | Try | RepeatPlus | First

_SOFT_FAILURES = (TacticError, NotProvable, NonPropositionalGoal)


# ---------------------------------------------------------------------------
# Partial derivations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hole:
    id: int
    seq: Sequent


@dataclass(frozen=True)
class PNode:
    rule: str
    params: tuple
    concl: Sequent
    children: tuple  # of PNode | Hole | Derivation


Tree = PNode | Hole | Derivation


def _replace_hole(tree: Tree, hid: int, sub: Tree) -> Tree:
    match tree:
        case Hole(id=i) if i == hid:
            return sub
        case Hole() | Derivation():
            return tree
        case PNode(rule, params, concl, children):
            return PNode(rule, params, concl,
                         tuple(_replace_hole(c, hid, sub) for c in children))
    raise TypeError(f"not a proof tree: {tree!r}")


def _to_derivation(tree: Tree) -> Derivation:
    match tree:
        case Derivation():
            return tree
        case Hole():
            raise OpenGoals("proof tree still has open goals")
        case PNode(rule, params, concl, children):
            return Derivation(rule, params, concl,
                              tuple(_to_derivation(c) for c in children))
    raise TypeError(f"not a proof tree: {tree!r}")


@dataclass(frozen=True)
class Theorem:
    name: str
    statement: Formula
    derivation: Derivation
    mode: CalculusMode


@dataclass(frozen=True)
class ProofState:
    """Immutable: every tactic application returns a new state."""

    root: Tree
    holes: tuple[Hole, ...]  # open goals in order; holes[0] is focused
    mode: CalculusMode
    env: Env
    statement: Formula
    trace: tuple = ()
    counter: int = 0

    @property
    def goals(self) -> tuple[Sequent, ...]:
        return tuple(h.seq for h in self.holes)

    @property
    def complete(self) -> bool:
        return not self.holes


def init_proof(statement: Formula, mode: CalculusMode, env: Env) -> ProofState:
    try:
        well_formed(statement, env)
    except NanoproverError as e:
        raise IllFormedStatement(str(e)) from e
    hole = Hole(0, Sequent((), statement))
    return ProofState(root=hole, holes=(hole,), mode=mode, env=env,
                      statement=statement, trace=(), counter=1)


def qed(state: ProofState, name: str) -> Theorem:
    """Assemble the derivation, kernel-check it, and package the theorem."""
    if state.holes:
        raise OpenGoals(f"{len(state.holes)} goal(s) remain")
    d = _to_derivation(state.root)
    try:
        check_derivation(d, state.mode, state.env)
    except NanoproverError as e:
        raise KernelRejection(f"kernel rejected the assembled proof: {e}") from e
    return Theorem(name, state.statement, d, state.mode)


def register_theorem(env: Env, thm: Theorem) -> Env:
    return env.with_theorem(TheoremRecord(thm.name, thm.statement, thm.mode))


# ---------------------------------------------------------------------------
# Naming
# ---------------------------------------------------------------------------

class _Names:
    def __init__(self, seq: Sequent, env: Env, counter: int):
        self.used = set(seq.labels())
        for _, h in seq.hyps:
            self.used |= set(free_vars(h))
        self.used |= set(free_vars(seq.goal))
        for ind in env.inductives:
            self.used.add(ind.name)
            self.used.update(c for c, _ in ind.constructors)
        self.used.update(f.name for f in env.fixpoints)
        self.used.update(t.name for t in env.theorems)
        self.counter = counter

    def fresh(self, base: str) -> str:
        if base and base not in self.used:
            self.used.add(base)
            return base
        base = base or "H"
        while f"{base}{self.counter}" in self.used:
            self.counter += 1
        name = f"{base}{self.counter}"
        self.counter += 1
        self.used.add(name)
        return name

    def taken(self, name: str) -> bool:
        return name in self.used


def _symbol_in_hyps(seq: Sequent, name: str) -> bool:
    return any(symbol_occurs(f, name) for _, f in seq.hyps)


def _fail(kind: str, msg: str):
    raise TacticError(kind, msg)


def _view(f: Formula) -> Formula:
    """Unfold one layer of sugar for goal-shape dispatch."""
    match f:
        case Neg(b):
            return Imp(b, BOT)
        case Iff(l, r):
            return And(Imp(l, r), Imp(r, l))
        case _:
            return f


def _hole(names: _Names, seq: Sequent) -> Hole:
    h = Hole(names.counter, seq)
    names.counter += 1
    return h


def _sym(eq_d: Tree, hyps) -> PNode:
    """From |- Eq(a, b) build |- Eq(b, a) via Leibniz on Eq(_, a)."""
    match elaborate(eq_d.concl.goal):
        case Eq(a, b, s):
            template = Eq(BVar(0), a, s)
            refl = Derivation("eq_refl", (), Sequent(hyps, Eq(a, a, s)))
            return PNode("eq_rewrite", (template,), Sequent(hyps, Eq(b, a, s)),
                         (eq_d, refl))
    raise TacticError("rewrite", "not an equality derivation")


# ---------------------------------------------------------------------------
# Matching and instantiation for apply / rewrite
# ---------------------------------------------------------------------------

_TMETA = "?m"


def _match_term(pat: Term, tgt: Term, binding: dict) -> bool:
    match pat:
        case Var(n, _) if n.startswith(_TMETA):
            if n in binding:
                return binding[n] == tgt
            binding[n] = tgt
            return True
        case Var() | BVar():
            return pat == tgt
        case Ctor(n, args):
            match tgt:
                case Ctor(n2, args2) if n == n2 and len(args) == len(args2):
                    return all(_match_term(a, b, binding) for a, b in zip(args, args2))
            return False
        case FunApp(n, args):
            match tgt:
                case FunApp(n2, args2) if n == n2 and len(args) == len(args2):
                    return all(_match_term(a, b, binding) for a, b in zip(args, args2))
            return False
    return False


def _match_formula(pat: Formula, tgt: Formula, prop_metas: set[str], binding: dict) -> bool:
    match pat:
        case Atom(n) if n in prop_metas:
            if n in binding:
                return binding[n] == tgt
            binding[n] = tgt
            return True
        case And(l, r) | Or(l, r) | Imp(l, r):
            if type(pat) is not type(tgt):
                return False
            return (_match_formula(l, tgt.left, prop_metas, binding)
                    and _match_formula(r, tgt.right, prop_metas, binding))
        case Eq(l, r, s):
            match tgt:
                case Eq(l2, r2, s2) if s == s2:
                    return _match_term(l, l2, binding) and _match_term(r, r2, binding)
            return False
        case PredApp(n, args):
            match tgt:
                case PredApp(n2, args2) if n == n2 and len(args) == len(args2):
                    return all(_match_term(a, b, binding) for a, b in zip(args, args2))
            return False
        case Forall(_, s, b) | Exists(_, s, b):
            if type(pat) is not type(tgt) or s != tgt.sort:
                return False
            return _match_formula(b, tgt.body, prop_metas, binding)
        case _:
            return pat == tgt


def _subst_meta_term(t: Term, binding: dict) -> Term:
    match t:
        case Var(n, _) if n in binding:
            return binding[n]
        case Ctor(n, args):
            return Ctor(n, tuple(_subst_meta_term(a, binding) for a in args))
        case FunApp(n, args):
            return FunApp(n, tuple(_subst_meta_term(a, binding) for a in args))
        case _:
            return t


def _subst_metas(f: Formula, binding: dict) -> Formula:
    for k, v in binding.items():
        if not isinstance(v, (Var, BVar, Ctor, FunApp)):
            f = subst_atom(f, k, v)
    return map_terms(f, lambda t, _d: _subst_meta_term(t, binding), 0)


@dataclass
class _Source:
    """A fact usable by apply/rewrite: a hypothesis or a registered theorem."""

    hyp_base: Derivation | None  # hyp leaf when the fact is a hypothesis
    quantified: Formula  # elaborated, schema stripped, forall prefix intact
    formula: Formula  # forall prefix opened with term metavariables
    prop_metas: tuple[str, ...]
    term_metas: tuple[tuple[str, Sort], ...]
    thm_name: str | None


def _resolve_source(seq: Sequent, env: Env, mode: CalculusMode, name: str) -> _Source:
    hyp = seq.hyp(name)
    prop_metas: tuple[str, ...] = ()
    if hyp is not None:
        quantified = elaborate(hyp)
        base = Derivation("hyp", (name,), Sequent(seq.hyps, hyp))
        thm_name = None
    else:
        rec = env.theorem(name)
        if rec is None:
            _fail("unknown", f"no hypothesis or theorem named {name}")
        if not mode_allows(mode, rec.mode):
            raise TacticError(
                "ModeViolation",
                f"theorem {name} is {rec.mode.value}; current mode is {mode.value}")
        quantified = elaborate(rec.statement)
        metas = []
        while isinstance(quantified, SchemaAll):
            if quantified.sort != PROP:
                _fail("unsupported", f"{name} quantifies over a non-Prop schema")
            metas.append(quantified.name)
            quantified = quantified.body  # occurrences become metavariables
        prop_metas = tuple(metas)
        base = None
        thm_name = name
    term_metas = []
    f = quantified
    i = 0
    while isinstance(f, Forall):
        mname = f"{_TMETA}{i}"
        i += 1
        term_metas.append((mname, f.sort))
        f = open_formula(f.body, Var(mname, f.sort))
    return _Source(base, quantified, f, prop_metas, tuple(term_metas), thm_name)


def _instantiate_chain(src: _Source, binding: dict, hyps) -> tuple[Tree, Formula]:
    """The fact with schema and forall prefixes instantiated per `binding`."""
    if src.thm_name is None:
        cur_d: Tree = src.hyp_base
        cur_f = src.quantified
    else:
        prop_binding = {m: binding[m] for m in src.prop_metas}
        stmt_inst = _subst_metas(src.quantified, prop_binding)
        inst = tuple((m, binding[m]) for m in src.prop_metas)
        cur_d = Derivation("thm", (src.thm_name, inst), Sequent(hyps, stmt_inst))
        cur_f = stmt_inst
    for mname, _sort in src.term_metas:
        match cur_f:
            case Forall(_, _, body):
                t = binding[mname]
                cur_f = open_formula(body, t)
                cur_d = PNode("forall_elim", (t,), Sequent(hyps, cur_f), (cur_d,))
            case _:
                raise TacticError("apply", "internal: quantifier prefix mismatch")
    return cur_d, cur_f


# ---------------------------------------------------------------------------
# Tactic handlers: each returns (fragment tree, list of new holes)
# ---------------------------------------------------------------------------

def _intro_one(seq: Sequent, names: _Names, name: str | None):
    explicit = name is not None
    match _view(seq.goal):
        case Imp(a, b):
            if explicit and names.taken(name):
                _fail("intro", f"name {name} is already used")
            lab = names.fresh(name or "H")
            sub = _hole(names, Sequent(seq.hyps + ((lab, a),), b))
            return PNode("imp_intro", (lab,), seq, (sub,)), [sub]
        case Forall(hint, sort, body):
            if explicit and names.taken(name):
                _fail("intro", f"name {name} is already used")
            eigen = names.fresh(name or hint)
            sub = _hole(names, seq.with_goal(open_formula(body, Var(eigen, sort))))
            return PNode("forall_intro", (eigen,), seq, (sub,)), [sub]
        case SchemaAll(bound, sort, body):
            sym = name or bound
            if sym != bound and symbol_occurs(body, sym):
                _fail("intro", f"symbol {sym} already occurs in the goal")
            if _symbol_in_hyps(seq, sym) or (explicit and names.taken(sym)):
                _fail("intro", f"symbol {sym} is already used")
            names.used.add(sym)
            opened = rename_schema_symbol(body, bound, sym, sort)
            sub = _hole(names, seq.with_goal(opened))
            return PNode("schema_intro", (sym,), seq, (sub,)), [sub]
    _fail("intro", "nothing to introduce")


def _can_intro(f: Formula) -> bool:
    return isinstance(_view(f), (Imp, Forall, SchemaAll))


def h_intro(seq, env, mode, names, args):
    return _intro_one(seq, names, args[0] if args else None)


def h_intros(seq, env, mode, names, args):
    if args:
        plan = list(args)
        tree, holes = _intro_one(seq, names, plan[0])
        for nm in plan[1:]:
            inner, new_holes = _intro_one(holes[0].seq, names, nm)
            tree = _replace_hole(tree, holes[0].id, inner)
            holes = new_holes
        return tree, holes
    tree, holes = _intro_one(seq, names, None)
    while holes and _can_intro(holes[0].seq.goal):
        inner, new_holes = _intro_one(holes[0].seq, names, None)
        tree = _replace_hole(tree, holes[0].id, inner)
        holes = new_holes
    return tree, holes


def h_apply(seq, env, mode, names, args):
    (name,) = args
    src = _resolve_source(seq, env, mode, name)
    goal = elaborate(seq.goal)
    metas = set(src.prop_metas) | {m for m, _ in src.term_metas}
    k = 0
    cur = src.formula
    while True:
        binding: dict = {}
        if _match_formula(cur, goal, set(src.prop_metas), binding) \
                and metas <= set(binding):
            return _build_apply(seq, src, k, binding, names)
        match cur:
            case Imp(_, b):
                k += 1
                cur = b
            case _:
                break
    _fail("apply", f"{name} does not conclude the goal")


def _build_apply(seq, src: _Source, k: int, binding: dict, names: _Names):
    cur_d, cur_f = _instantiate_chain(src, binding, seq.hyps)
    holes = []
    for _ in range(k):
        match elaborate(cur_f):
            case Imp(a, b):
                sub = _hole(names, Sequent(seq.hyps, a))
                holes.append(sub)
                cur_d = PNode("imp_elim", (), Sequent(seq.hyps, b), (cur_d, sub))
                cur_f = b
            case _:
                _fail("apply", "internal: premise spine mismatch")
    return cur_d, holes


def h_exact(seq, env, mode, names, args):
    (name,) = args
    hyp = seq.hyp(name)
    if hyp is not None:
        if elaborate(hyp) != elaborate(seq.goal):
            _fail("exact", f"hypothesis {name} does not match the goal")
        return Derivation("hyp", (name,), seq), []
    tree, holes = h_apply(seq, env, mode, names, args)
    if holes:
        _fail("exact", f"{name} does not exactly prove the goal")
    return tree, holes


def h_assumption(seq, env, mode, names, args):
    goal = elaborate(seq.goal)
    for lab, f in seq.hyps:
        if elaborate(f) == goal:
            return Derivation("hyp", (lab,), seq), []
    _fail("assumption", "no hypothesis matches the goal")


def h_split(seq, env, mode, names, args):
    match _view(seq.goal):
        case And(a, b):
            h1 = _hole(names, seq.with_goal(a))
            h2 = _hole(names, seq.with_goal(b))
            return PNode("and_intro", (), seq, (h1, h2)), [h1, h2]
    _fail("split", "goal is not a conjunction or iff")


def h_left(seq, env, mode, names, args):
    match _view(seq.goal):
        case Or(a, _):
            h = _hole(names, seq.with_goal(a))
            return PNode("or_intro_l", (), seq, (h,)), [h]
    _fail("left", "goal is not a disjunction")


def h_right(seq, env, mode, names, args):
    match _view(seq.goal):
        case Or(_, b):
            h = _hole(names, seq.with_goal(b))
            return PNode("or_intro_r", (), seq, (h,)), [h]
    _fail("right", "goal is not a disjunction")


def h_constructor(seq, env, mode, names, args):
    match _view(seq.goal):
        case And(_, _):
            return h_split(seq, env, mode, names, ())
        case Or(_, _):
            return h_left(seq, env, mode, names, ())
        case Eq(l, r, _) if l == r:
            return Derivation("eq_refl", (), seq), []
    _fail("constructor", "no constructor applies to this goal")


def h_exfalso(seq, env, mode, names, args):
    h = _hole(names, seq.with_goal(BOT))
    return PNode("bot_elim", (), seq, (h,)), [h]


def h_reflexivity(seq, env, mode, names, args):
    match seq.goal:
        case Eq(l, r, _) if l == r:
            return Derivation("eq_refl", (), seq), []
        case Eq(_, _, _):
            _fail("reflexivity", "sides are not syntactically equal (try simpl first)")
    _fail("reflexivity", "goal is not an equality")


def h_contradiction(seq, env, mode, names, args):
    elab = [(lab, elaborate(f)) for lab, f in seq.hyps]
    for lab, f in elab:
        if f == BOT:
            return PNode("bot_elim", (), seq,
                         (Derivation("hyp", (lab,), Sequent(seq.hyps, seq.hyp(lab))),)), []
    for lab, f in elab:
        match f:
            case Imp(a, Bottom()):
                for lab2, f2 in elab:
                    if f2 == a:
                        falsum = PNode(
                            "imp_elim", (), Sequent(seq.hyps, BOT),
                            (Derivation("hyp", (lab,), Sequent(seq.hyps, seq.hyp(lab))),
                             Derivation("hyp", (lab2,), Sequent(seq.hyps, seq.hyp(lab2)))))
                        return PNode("bot_elim", (), seq, (falsum,)), []
    _fail("contradiction", "no contradictory hypotheses found")


def h_unfold(seq, env, mode, names, args):
    (what,) = args
    if what == "not":
        new_goal = _unfold_not(seq.goal)
    elif what == "iff":
        new_goal = _unfold_iff(seq.goal)
    else:
        _fail("unfold", f"only `not` and `iff` can be unfolded, not {what}")
    h = _hole(names, seq.with_goal(new_goal))
    return h, [h]


def _rebuild(f: Formula, fn) -> Formula:
    match f:
        case Neg(b):
            return Neg(fn(b))
        case And(l, r):
            return And(fn(l), fn(r))
        case Or(l, r):
            return Or(fn(l), fn(r))
        case Imp(l, r):
            return Imp(fn(l), fn(r))
        case Iff(l, r):
            return Iff(fn(l), fn(r))
        case Forall(h, s, b):
            return Forall(h, s, fn(b))
        case Exists(h, s, b):
            return Exists(h, s, fn(b))
        case SchemaAll(n, s, b):
            return SchemaAll(n, s, fn(b))
        case _:
            return f


def _unfold_not(f: Formula) -> Formula:
    match f:
        case Neg(b):
            return Imp(_unfold_not(b), BOT)
        case _:
            return _rebuild(f, _unfold_not)


def _unfold_iff(f: Formula) -> Formula:
    match f:
        case Iff(l, r):
            lf, rf = _unfold_iff(l), _unfold_iff(r)
            return And(Imp(lf, rf), Imp(rf, lf))
        case _:
            return _rebuild(f, _unfold_iff)


def h_destruct(seq, env, mode, names, args):
    target = args[0]
    as_names = args[1] if len(args) > 1 else ()
    hyp = seq.hyp(target)
    if hyp is not None:
        return _destruct_hyp(seq, names, target, hyp, as_names)
    variables, _ = sequent_scope(seq.hyps, seq.goal, env)
    if target in variables:
        return _case_var(seq, env, names, Var(target, variables[target]))
    _fail("destruct", f"{target} is neither a hypothesis nor a variable in scope")


def _destruct_hyp(seq, names: _Names, label, hyp, as_names):
    match _view(hyp):
        case And(a, b):
            n1 = names.fresh(as_names[0] if len(as_names) > 0 else "H")
            n2 = names.fresh(as_names[1] if len(as_names) > 1 else "H")
            hyps1 = seq.hyps + ((n1, a),)
            hyps2 = hyps1 + ((n2, b),)
            sub = _hole(names, Sequent(hyps2, seq.goal))
            proj_l = PNode("and_elim_l", (), Sequent(seq.hyps, a),
                           (Derivation("hyp", (label,), Sequent(seq.hyps, hyp)),))
            proj_r = PNode("and_elim_r", (), Sequent(hyps1, b),
                           (Derivation("hyp", (label,), Sequent(hyps1, hyp)),))
            inner = PNode("imp_elim", (), Sequent(hyps1, seq.goal),
                          (PNode("imp_intro", (n2,), Sequent(hyps1, Imp(b, seq.goal)),
                                 (sub,)),
                           proj_r))
            outer = PNode("imp_elim", (), seq,
                          (PNode("imp_intro", (n1,), Sequent(seq.hyps, Imp(a, seq.goal)),
                                 (inner,)),
                           proj_l))
            return outer, [sub]
        case Or(a, b):
            n1 = names.fresh(as_names[0] if len(as_names) > 0 else "H")
            n2 = names.fresh(as_names[1] if len(as_names) > 1 else "H")
            h1 = _hole(names, Sequent(seq.hyps + ((n1, a),), seq.goal))
            h2 = _hole(names, Sequent(seq.hyps + ((n2, b),), seq.goal))
            node = PNode("or_elim", (n1, n2), seq,
                         (Derivation("hyp", (label,), Sequent(seq.hyps, hyp)), h1, h2))
            return node, [h1, h2]
        case Exists(hint, sort, body):
            vname = names.fresh(as_names[0] if len(as_names) > 0 else hint)
            hname = names.fresh(as_names[1] if len(as_names) > 1 else "H")
            opened = open_formula(body, Var(vname, sort))
            h2 = _hole(names, Sequent(seq.hyps + ((hname, opened),), seq.goal))
            node = PNode("exists_elim", (vname, hname), seq,
                         (Derivation("hyp", (label,), Sequent(seq.hyps, hyp)), h2))
            return node, [h2]
    _fail("destruct", f"hypothesis {label} is not a conjunction, disjunction or existential")


def _case_var(seq, env, names: _Names, var: Var):
    ind = env.inductive(var.sort) if isinstance(var.sort, str) else None
    if ind is None:
        _fail("destruct", f"{var.name} is not of an inductive sort")
    if any(ind.name in c_sorts for _, c_sorts in ind.constructors):
        _fail("destruct", f"{ind.name} is recursive; use induction {var.name} instead")
    return _induction_fragment(seq, env, names, var, ind)


def h_induction(seq, env, mode, names, args):
    (target,) = args
    variables, _ = sequent_scope(seq.hyps, seq.goal, env)
    if target not in variables:
        _fail("induction", f"{target} is not a variable in scope")
    var = Var(target, variables[target])
    ind = env.inductive(var.sort) if isinstance(var.sort, str) else None
    if ind is None:
        _fail("induction", f"{target} is not of an inductive sort")
    return _induction_fragment(seq, env, names, var, ind)


def _induction_fragment(seq, env, names: _Names, var: Var, ind):
    template = close_formula(seq.goal, var)
    principle = induction_formula(ind, template)
    leaf = Derivation("induction", (ind.name, template), Sequent(seq.hyps, principle))
    premises = induction_premises(ind, template)

    cur: Tree = leaf
    cur_f = principle
    holes = []
    for (cname, argsorts), prem in zip(ind.constructors, premises):
        prem_d, prem_holes = _premise_fragment(seq, names, var, ind, argsorts, prem)
        holes.extend(prem_holes)
        match cur_f:
            case Imp(_, rest):
                cur = PNode("imp_elim", (), Sequent(seq.hyps, rest), (cur, prem_d))
                cur_f = rest
            case _:
                _fail("induction", "internal: principle shape mismatch")
    node = PNode("forall_elim", (var,), seq, (cur,))
    return node, holes


def _premise_fragment(seq, names: _Names, var, ind, argsorts, prem: Formula):
    """Fragment proving one constructor premise, with a hole at the case goal."""
    arg_vars = []
    for s in argsorts:
        base = var.name if s == ind.name else (s[0] if isinstance(s, str) else "x")
        arg_vars.append(Var(names.fresh(base), s))
    wrappers: list[tuple] = []  # ("forall", Var) | ("imp", label, Formula)
    f = prem
    for v, s in zip(arg_vars, argsorts):
        match f:
            case Forall(_, _, body):
                f = open_formula(body, v)
                wrappers.append(("forall", v))
            case _:
                _fail("induction", "internal: premise shape mismatch")
        if s == ind.name:
            match f:
                case Imp(ih, rest):
                    lab = names.fresh(f"IH{v.name}")
                    wrappers.append(("imp", lab, ih))
                    f = rest
                case _:
                    _fail("induction", "internal: induction hypothesis shape")
    hyps = seq.hyps
    for w in wrappers:
        if w[0] == "imp":
            hyps = hyps + ((w[1], w[2]),)
    sub = _hole(names, Sequent(hyps, f))
    cur: Tree = sub
    cur_f = f
    cur_hyps = hyps
    for w in reversed(wrappers):
        if w[0] == "imp":
            _, lab, ih = w
            cur_hyps = cur_hyps[:-1]
            cur_f = Imp(ih, cur_f)
            cur = PNode("imp_intro", (lab,), Sequent(cur_hyps, cur_f), (cur,))
        else:
            v = w[1]
            cur_f = Forall(v.name, v.sort, close_formula(cur_f, v))
            cur = PNode("forall_intro", (v.name,), Sequent(cur_hyps, cur_f), (cur,))
    return cur, [sub]


def _resolve_term_arg(raw, seq: Sequent, env: Env, want_sort=None) -> Term:
    if isinstance(raw, (Var, BVar, Ctor, FunApp)):
        return raw
    variables, schema = sequent_scope(seq.hyps, seq.goal, env)
    r = Resolver(env, schema, variables)
    t = r.term(raw)
    if want_sort is not None:
        r.constrain(t, want_sort, "witness")
    return t


def _resolve_formula_arg(raw, seq: Sequent, env: Env) -> Formula:
    if isinstance(raw, (Atom, Bottom, Neg, And, Or, Imp, Iff, Forall, Exists, Eq,
                        PredApp, SchemaAll)):
        return raw
    variables, schema = sequent_scope(seq.hyps, seq.goal, env)
    return Resolver(env, schema, variables).formula(raw)


def h_exists(seq, env, mode, names, args):
    (raw,) = args
    match _view(seq.goal):
        case Exists(_, sort, body):
            witness = _resolve_term_arg(raw, seq, env, sort)
            h = _hole(names, seq.with_goal(open_formula(body, witness)))
            return PNode("exists_intro", (witness,), seq, (h,)), [h]
    _fail("exists", "goal is not an existential")


def h_cut(seq, env, mode, names, args):
    (raw,) = args
    f = _resolve_formula_arg(raw, seq, env)
    h1 = _hole(names, seq.with_goal(Imp(f, seq.goal)))
    h2 = _hole(names, seq.with_goal(f))
    return PNode("imp_elim", (), seq, (h1, h2)), [h1, h2]


def h_classical_contradiction(seq, env, mode, names, args):
    if mode is not CalculusMode.CLASSICAL:
        raise TacticError("ModeViolation",
                          "classical_contradiction requires ClassicalNJ mode")
    lab = names.fresh(args[0] if args else "H")
    goal = seq.goal
    neg = Neg(goal)
    hyps1 = seq.hyps + ((lab, neg),)
    sub = _hole(names, Sequent(hyps1, goal))
    falsum = PNode("imp_elim", (), Sequent(hyps1, BOT),
                   (Derivation("hyp", (lab,), Sequent(hyps1, neg)), sub))
    nn = PNode("imp_intro", (lab,), Sequent(seq.hyps, Imp(neg, BOT)), (falsum,))
    return PNode("dne", (), seq, (nn,)), [sub]


def h_nnpp(seq, env, mode, names, args):
    if mode is not CalculusMode.CLASSICAL:
        raise TacticError("ModeViolation", "nnpp requires ClassicalNJ mode")
    h = _hole(names, seq.with_goal(Neg(Neg(seq.goal))))
    return PNode("dne", (), seq, (h,)), [h]


def h_simpl(seq, env, mode, names, args):
    new_goal, steps = simpl_with_steps(env, seq.goal)
    h = _hole(names, seq.with_goal(new_goal))
    cur: Tree = h
    for st in reversed(steps):
        fn, _ctor, _smap = st.defeq
        sort = env.fixpoint(fn).result
        eq = Derivation("defeq", st.defeq, Sequent(seq.hyps, Eq(st.lhs, st.rhs, sort)))
        before = open_formula(st.template, st.lhs)
        cur = PNode("eq_rewrite", (st.template,), Sequent(seq.hyps, before),
                    (_sym(eq, seq.hyps), cur))
    return cur, [h]


def h_rewrite(seq, env, mode, names, args):
    direction, name = args
    src = _resolve_source(seq, env, mode, name)
    if src.prop_metas:
        _fail("rewrite", f"{name} has propositional schema binders")
    match src.formula:
        case Eq(lhs, rhs, _):
            pass
        case _:
            _fail("rewrite", f"{name} is not an equation")
    pat = lhs if direction == "->" else rhs
    binding: dict = {}
    found = None
    needed = {m for m, _ in src.term_metas}
    for t in _goal_subterms(seq.goal):
        b: dict = {}
        if _match_term(pat, t, b) and needed <= set(b):
            binding, found = b, t
            break
    if found is None:
        side = "left" if direction == "->" else "right"
        _fail("rewrite", f"no instance of {name}'s {side}-hand side in the goal")
    lhs_i = _subst_meta_term(lhs, binding)
    rhs_i = _subst_meta_term(rhs, binding)
    src_i, dst_i = (lhs_i, rhs_i) if direction == "->" else (rhs_i, lhs_i)
    template = close_formula(seq.goal, src_i)
    new_goal = open_formula(template, dst_i)
    eq_d, _ = _instantiate_chain(src, binding, seq.hyps)
    h = _hole(names, seq.with_goal(new_goal))
    if direction == "->":
        node = PNode("eq_rewrite", (template,), seq, (_sym(eq_d, seq.hyps), h))
    else:
        node = PNode("eq_rewrite", (template,), seq, (eq_d, h))
    return node, [h]


def _goal_subterms(f: Formula):
    from .inductive import _toplevel_terms

    def walk(t: Term):
        yield t
        match t:
            case Ctor(_, args) | FunApp(_, args):
                for a in args:
                    yield from walk(a)
            case _:
                return

    for t in _toplevel_terms(f):
        yield from walk(t)


def h_arith(seq, env, mode, names, args):
    try:
        d = arith_solve(env, list(seq.hyps), seq.goal, seq)
    except ArithFailure as e:
        raise TacticError("arith", str(e)) from e
    return d, []


def h_tauto(seq, env, mode, names, args):
    cur_seq = seq
    wrappers: list[tuple[Sequent, str]] = []
    while isinstance(cur_seq.goal, SchemaAll) and cur_seq.goal.sort == PROP:
        g = cur_seq.goal
        sym = g.name
        if _symbol_in_hyps(cur_seq, sym):
            sym = names.fresh(sym)
            if symbol_occurs(g.body, sym):
                _fail("tauto", f"cannot find a fresh name for {g.name}")
        wrappers.append((cur_seq, sym))
        cur_seq = cur_seq.with_goal(rename_schema_symbol(g.body, g.name, sym, PROP))
    elab_goal = elaborate(cur_seq.goal)
    if not g4ip.g4_formula(elab_goal):
        raise NonPropositionalGoal(f"tauto cannot decide this goal")
    usable = tuple((lab, f) for lab, f in cur_seq.hyps
                   if g4ip.g4_formula(elaborate(f)))
    full = tuple((lab, elaborate(f)) for lab, f in cur_seq.hyps)
    searcher = g4ip._Search({lab for lab, _ in full})
    d = searcher.search(full, tuple((lab, elaborate(f)) for lab, f in usable),
                        elab_goal)
    if d is None:
        raise NotProvable("the goal is not intuitionistically provable")
    node: Tree = d
    for outer_seq, sym in reversed(wrappers):
        node = PNode("schema_intro", (sym,), outer_seq, (node,))
    return node, []


_HANDLERS = {
    "intro": h_intro,
    "intros": h_intros,
    "apply": h_apply,
    "exact": h_exact,
    "assumption": h_assumption,
    "split": h_split,
    "left": h_left,
    "right": h_right,
    "constructor": h_constructor,
    "exfalso": h_exfalso,
    "reflexivity": h_reflexivity,
    "contradiction": h_contradiction,
    "unfold": h_unfold,
    "destruct": h_destruct,
    "induction": h_induction,
    "exists": h_exists,
    "cut": h_cut,
    "classical_contradiction": h_classical_contradiction,
    "nnpp": h_nnpp,
    "simpl": h_simpl,
    "rewrite": h_rewrite,
    "arith": h_arith,
    "omega": h_arith,
    "tauto": h_tauto,
}


def _step(state: ProofState, tactic: Tactic, hole_id: int) -> tuple[ProofState, list[int]]:
    hole = next((h for h in state.holes if h.id == hole_id), None)
    if hole is None:
        raise TacticError("focus", "no such open goal")
    handler = _HANDLERS.get(tactic.name)
    if handler is None:
        raise TacticError("unknown", f"unknown tactic {tactic.name}")
    names = _Names(hole.seq, state.env, state.counter)
    try:
        tree, new_holes = handler(hole.seq, state.env, state.mode, names, tactic.args)
    except _SOFT_FAILURES:
        raise
    except NanoproverError as e:
        raise TacticError(type(e).__name__, str(e)) from e
    root = _replace_hole(state.root, hole_id, tree)
    holes: list[Hole] = []
    for h in state.holes:
        if h.id == hole_id:
            holes.extend(new_holes)
        else:
            holes.append(h)
    new_state = replace(state, root=root, holes=tuple(holes), counter=names.counter)
    return new_state, [h.id for h in new_holes]


def apply_tactic(state: ProofState, t: Tactic) -> ProofState:
    """Apply `t` to the first open goal (focused discipline)."""
    if not state.holes:
        raise TacticError("no-goals", "no open goals")
    try:
        new_state, _ = _step(state, t, state.holes[0].id)
    except (NotProvable, NonPropositionalGoal) as e:
        raise TacticError(type(e).__name__, str(e)) from e
    return replace(new_state, trace=state.trace + (("tactic", t),))


def tauto(state: ProofState) -> ProofState:
    """The complete intuitionistic decision procedure on the focused goal.

    Raises NotProvable when the goal is certifiably not intuitionistically
    provable, NonPropositionalGoal when it is outside the decidable fragment.
    """
    if not state.holes:
        raise TacticError("no-goals", "no open goals")
    new_state, _ = _step(state, Tactic("tauto"), state.holes[0].id)
    return replace(new_state, trace=state.trace + (("tactic", Tactic("tauto")),))


# ---------------------------------------------------------------------------
# Tacticals
# ---------------------------------------------------------------------------

def _eval_on(state: ProofState, t: Tactical, hole_id: int) -> tuple[ProofState, list[int]]:
    match t:
        case Call(tac):
            return _step(state, tac, hole_id)
        case Seq(a, b):
            s1, ids1 = _eval_on(state, a, hole_id)
            if not s1.holes:
                return s1, []
            target = s1.holes[0].id
            s2, ids2 = _eval_on(s1, b, target)
            open_ids = {h.id for h in s2.holes}
            rest = [i for i in ids1 if i != target and i in open_ids]
            return s2, ids2 + rest
        case ThenAll(a, b):
            s, ids = _eval_on(state, a, hole_id)
            produced: list[int] = []
            for gid in ids:
                if all(h.id != gid for h in s.holes):
                    continue
                s, ids_b = _eval_on(s, b, gid)
                produced.extend(ids_b)
            return s, produced
        case Try(a):
            try:
                return _eval_on(state, a, hole_id)
            except _SOFT_FAILURES:
                return state, [hole_id]
        case RepeatPlus(a):
            s, ids = _eval_on(state, a, hole_id)
            while s.holes:
                target = next((i for i in ids if any(h.id == i for h in s.holes)),
                              s.holes[0].id)
                try:
                    s2, ids = _eval_on(s, a, target)
                except _SOFT_FAILURES:
                    break
                if s2 == s:
                    break
                s = s2
            open_ids = [h.id for h in s.holes]
            return s, [i for i in ids if i in open_ids]
        case First(alts):
            last: Exception | None = None
            for alt in alts:
                try:
                    return _eval_on(state, alt, hole_id)
                except _SOFT_FAILURES as e:
                    last = e
            raise TacticError("first", f"no alternative applied: {last}")
    raise TypeError(f"not a tactical: {t!r}")


def eval_tactical(state: ProofState, t: Tactical) -> ProofState:
    """Evaluate a tactical against the focused goal.

    Seq runs its second part on the state the first leaves; ThenAll (the `;`
    operator) broadcasts over every subgoal the first produced; Try swallows
    failure; RepeatPlus demands one success then repeats until failure.
    """
    if not state.holes:
        raise TacticError("no-goals", "no open goals")
    try:
        new_state, _ = _eval_on(state, t, state.holes[0].id)
    except (NotProvable, NonPropositionalGoal) as e:
        raise TacticError(type(e).__name__, str(e)) from e
    return replace(new_state, trace=state.trace + (("tactical", t),))


def replay(statement: Formula, mode: CalculusMode, env: Env, trace) -> ProofState:
    """Re-run a trace from the initial statement (bit-for-bit reproducible)."""
    s = init_proof(statement, mode, env)
    for kind, t in trace:
        s = apply_tactic(s, t) if kind == "tactic" else eval_tactical(s, t)
    return s
