"""Script execution and the two proof-navigation models.

A Session owns a parsed Script plus a cache of engine states, one per executed
item.  Linear sessions move the cursor one item at a time and restore cached
predecessors exactly; RandomAccess sessions additionally allow editing an
item, which invalidates and recomputes every state from that item onward.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import NanoproverError, ParseError, SessionError
from .inductive import (
    define_fixpoint,
    define_inductive,
    eval_term,
)
from .kernel import (
    CalculusMode,
    Clause,
    Env,
    FixpointDef,
    InductiveDef,
    Formula,
    Sort,
)
from .prelude import standard_env
from .resolve import Resolver, resolve_sort, resolve_statement
from .surface import (
    AbortItem,
    BulletItem,
    ComputeItem,
    FixpointItem,
    InductiveItem,
    Item,
    ModeItem,
    NotationItem,
    ProofItem,
    QedItem,
    RequireItem,
    Script,
    StatementItem,
    TacticItem,
    parse_script,
    pretty,
    pretty_term,
)
from .tactics import (
    ProofState,
    Theorem,
    eval_tactical,
    init_proof,
    qed,
    register_theorem,
)


@dataclass(frozen=True)
class OpenProof:
    name: str
    kind: str
    state: ProofState
    bullets: tuple[tuple[str, int], ...]  # (marker, goals expected when it closes)


@dataclass(frozen=True)
class EngineState:
    env: Env
    mode: CalculusMode
    proof: OpenProof | None
    theorems: tuple[str, ...]  # registration order
    message: str | None = None  # output of the item that produced this state


def initial_state(mode: CalculusMode = CalculusMode.INTUITIONISTIC,
                  env: Env | None = None) -> EngineState:
    return EngineState(env if env is not None else standard_env(), mode, None, ())


def execute_item(st: EngineState, item: Item) -> EngineState:
    """Run one script item; raises SessionError (wrapping the cause) on failure."""
    try:
        return _execute(st, item)
    except SessionError:
        raise
    except NanoproverError as e:
        raise SessionError(str(e), cause=e) from e


def _execute(st: EngineState, item: Item) -> EngineState:
    match item:
        case RequireItem(_, classical, _):
            if classical and st.proof is None:
                return replace(st, mode=CalculusMode.CLASSICAL, message=None)
            return replace(st, message=None)
        case NotationItem():
            return replace(st, message=None)
        case ModeItem(mode, _):
            if st.proof is not None:
                raise SessionError("cannot switch mode inside a proof")
            return replace(st, mode=mode, message=None)
        case InductiveItem(name, _result, ctors, _):
            d = InductiveDef(name, tuple(
                (c, tuple(resolve_sort(s) for s in sorts)) for c, sorts in ctors))
            env = define_inductive(d, st.env)
            return replace(st, env=env, message=f"{name} is defined")
        case FixpointItem():
            d = _resolve_fixpoint(item, st.env)
            env = define_fixpoint(d, st.env)
            return replace(st, env=env, message=f"{d.name} is defined")
        case ComputeItem(raw, _):
            t = Resolver(st.env).term(raw)
            v = eval_term(st.env, t)
            sort = _value_sort(v, st.env)
            return replace(st, message=f"= {pretty_term(v.to_term())} : {sort}")
        case StatementItem(_kind, name, raw, _):
            if st.proof is not None:
                raise SessionError("previous proof is still open")
            stmt = resolve_statement(raw, st.env)
            ps = init_proof(stmt, st.mode, st.env)
            return replace(st, proof=OpenProof(name, item.kind, ps, ()),
                           message=_render_goals(ps))
        case ProofItem():
            if st.proof is None:
                raise SessionError("Proof. without a statement")
            return replace(st, message=_render_goals(st.proof.state))
        case TacticItem(tactical, _):
            if st.proof is None:
                raise SessionError("tactic outside a proof")
            ps = eval_tactical(st.proof.state, tactical)
            proof = replace(st.proof, state=ps)
            return replace(st, proof=proof, message=_render_goals(ps))
        case BulletItem(marker, _):
            if st.proof is None:
                raise SessionError("bullet outside a proof")
            proof = _apply_bullet(st.proof, marker)
            return replace(st, proof=proof, message=_render_goals(proof.state))
        case QedItem():
            if st.proof is None:
                raise SessionError("Qed without a proof")
            if st.proof.state.holes:
                raise SessionError(
                    f"Qed with {len(st.proof.state.holes)} open goal(s)")
            thm = qed(st.proof.state, st.proof.name)
            env = register_theorem(st.env, thm)
            return replace(st, env=env, proof=None,
                           theorems=st.theorems + (thm.name,),
                           message=f"{thm.name} is defined")
        case AbortItem():
            if st.proof is None:
                raise SessionError("Abort without a proof")
            return replace(st, proof=None, message="proof aborted")
    raise SessionError(f"unknown item {item!r}")


def _apply_bullet(proof: OpenProof, marker: str) -> OpenProof:
    goals = len(proof.state.holes)
    stack = list(proof.bullets)
    # Inner scopes whose goal count is back to the expected level are done.
    while stack and stack[-1][0] != marker and stack[-1][1] == goals:
        stack.pop()
    if stack and stack[-1][0] == marker:
        _, expected = stack[-1]
        if goals > expected:
            raise SessionError(f"bullet {marker}: previous subproof not finished")
        if goals < expected:
            raise SessionError(f"bullet {marker}: subproof scope already closed")
        stack.pop()
    elif any(m == marker for m, _ in stack):
        raise SessionError(f"bullet {marker}: an inner scope is still open")
    if goals == 0:
        raise SessionError(f"bullet {marker}: no goals to focus")
    stack.append((marker, goals - 1))
    return replace(proof, bullets=tuple(stack))


def _resolve_fixpoint(item: FixpointItem, env: Env) -> FixpointDef:
    params = tuple((n, resolve_sort(s)) for n, s in item.params)
    result = resolve_sort(item.result)
    names = [n for n, _ in params]
    if item.match_param not in names:
        raise SessionError(f"match target {item.match_param} is not a parameter")
    match_index = names.index(item.match_param)
    msort = params[match_index][1]
    ind = env.inductive(msort) if isinstance(msort, str) else None
    if ind is None:
        raise SessionError(f"{item.name} matches on non-inductive sort {msort}")
    ctor_sorts = dict(ind.constructors)
    # The new fixpoint must be callable inside its own clauses.
    env_rec = env.with_fixpoint(FixpointDef(item.name, params, result, match_index, ()))
    clauses = []
    for ctor, binders, raw in item.clauses:
        if ctor not in ctor_sorts:
            raise SessionError(f"{ctor} is not a constructor of {msort}")
        bsorts = ctor_sorts[ctor]
        if len(binders) != len(bsorts):
            raise SessionError(f"pattern for {ctor} binds {len(binders)} variables, "
                               f"constructor has {len(bsorts)}")
        variables: dict[str, Sort] = {n: s for n, s in params if n != item.match_param}
        variables.update(dict(zip(binders, bsorts)))
        r = Resolver(env_rec, variables=variables)
        rhs = r.term(raw)
        r.constrain(rhs, result, f"clause for {ctor}")
        clauses.append(Clause(ctor, tuple(zip(binders, bsorts)), rhs))
    return FixpointDef(item.name, params, result, match_index, tuple(clauses))


def _value_sort(v, env: Env) -> str:
    found = env.constructor(v.ctor)
    return found[0].name if found else "?"


def _render_goals(ps: ProofState) -> str:
    if not ps.holes:
        return "No more goals."
    lines = [f"{len(ps.holes)} goal(s)"]
    g = ps.holes[0].seq
    for lab, f in g.hyps:
        lines.append(f"  {lab} : {pretty(f)}")
    lines.append("  ============================")
    lines.append(f"  {pretty(g.goal)}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Sessions
# ---------------------------------------------------------------------------

LINEAR = "Linear"
RANDOM_ACCESS = "RandomAccess"


@dataclass(frozen=True)
class Session:
    script: Script
    navigation: str  # LINEAR | RANDOM_ACCESS
    base_mode: CalculusMode
    states: tuple[EngineState, ...]  # states[i] = after executing i items
    cursor: int

    @property
    def current(self) -> EngineState:
        return self.states[self.cursor]

    @property
    def item_count(self) -> int:
        return len(self.script.items)


def create_session(script_text: str, navigation: str = RANDOM_ACCESS,
                   mode: CalculusMode = CalculusMode.INTUITIONISTIC,
                   env: Env | None = None) -> Session:
    script = parse_script(script_text)  # ParseError propagates
    if navigation not in (LINEAR, RANDOM_ACCESS):
        raise SessionError(f"unknown navigation mode {navigation}")
    return Session(script, navigation, mode, (initial_state(mode, env),), 0)


def session_step(s: Session, cmd: str, index: int | None = None,
                 text: str | None = None) -> Session:
    """forward | backward | run_to(index) | edit(index, text)."""
    match cmd:
        case "forward":
            if s.cursor >= s.item_count:
                raise SessionError("already at the end of the script",
                                   item_index=s.cursor)
            item = s.script.items[s.cursor]
            try:
                nxt = execute_item(s.current, item)
            except SessionError as e:
                raise SessionError(str(e), item_index=s.cursor, cause=e.cause) from e
            states = s.states[:s.cursor + 1] + (nxt,)
            return replace(s, states=states, cursor=s.cursor + 1)
        case "backward":
            if s.cursor == 0:
                raise SessionError("already at the start of the script",
                                   item_index=0)
            return replace(s, cursor=s.cursor - 1)
        case "run_to":
            if index is None or not (0 <= index <= s.item_count):
                raise SessionError(f"run_to index out of range: {index}")
            while s.cursor < index:
                try:
                    s = session_step(s, "forward")
                except SessionError as e:
                    # keep the progress made before the failing item
                    e.partial = s
                    raise
            while s.cursor > index:
                s = session_step(s, "backward")
            return s
        case "edit":
            if s.navigation != RANDOM_ACCESS:
                raise SessionError("editing requires RandomAccess navigation",
                                   item_index=index)
            if index is None or text is None or not (0 <= index < s.item_count):
                raise SessionError(f"edit index out of range: {index}")
            return _edit(s, index, text)
    raise SessionError(f"unknown session command {cmd!r}")


def _edit(s: Session, index: int, text: str) -> Session:
    span = s.script.items[index].span
    new_source = s.script.source[:span.start] + text + s.script.source[span.end:]
    new_script = parse_script(new_source)  # ParseError propagates
    target = min(s.cursor, len(new_script.items))
    keep = min(index, target)
    out = Session(new_script, s.navigation, s.base_mode,
                  s.states[:keep + 1], keep)
    # Recompute downstream states eagerly up to the old cursor position; if
    # the edited script now fails midway, keep the edit with the progress
    # made so far.
    while out.cursor < target:
        try:
            out = session_step(out, "forward")
        except SessionError as e:
            e.partial = out
            raise
    return out


def run_script(script_text: str, mode: CalculusMode = CalculusMode.INTUITIONISTIC,
               env: Env | None = None) -> Session:
    """Batch-run an entire script (the CLI `check` path)."""
    s = create_session(script_text, LINEAR, mode, env)
    while s.cursor < s.item_count:
        s = session_step(s, "forward")
    return s
