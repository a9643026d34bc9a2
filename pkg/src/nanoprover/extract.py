"""Program extraction: verified definitions rendered as functional source text.

Two dialects are emitted, matching the shapes of extracted code the system is
modelled on: a lazy-functional one (`case ... of { ... }` with a type
signature) and a strict-ML one (`let rec ... = function | ...`).  Output is
compared token-wise, never byte-wise, and a re-parse interpreter closes the
loop back to the evaluator.
"""

from __future__ import annotations

import re

from .errors import (
    NonConstructive,
    NotExistential,
    UnknownDefinition,
)
from .kernel import (
    Ctor,
    Derivation,
    Env,
    Exists,
    FixpointDef,
    FunApp,
    InductiveDef,
    SchemaAll,
    Term,
    Var,
)

DIALECTS = ("lazy-functional", "strict-ML")

_CLASSICAL_RULES = {"dne"}


def _hs_type(name: str) -> str:
    return name[0].upper() + name[1:]


def _term_text(t: Term, dialect: str) -> str:
    match t:
        case Var(n, _):
            return n
        case Ctor(n, ()) | FunApp(n, ()):
            return n
        case Ctor(n, args) | FunApp(n, args):
            parts = [n] + [_atom_text(a, dialect) for a in args]
            return " ".join(parts)
    raise TypeError(f"not a term: {t!r}")


def _atom_text(t: Term, dialect: str) -> str:
    s = _term_text(t, dialect)
    return f"({s})" if " " in s else s


def extract_function(env: Env, name: str, dialect: str) -> str:
    """Render a registered fixpoint or inductive in the requested dialect."""
    if dialect not in DIALECTS:
        raise UnknownDefinition(f"unknown dialect {dialect}; pick one of {DIALECTS}")
    fx = env.fixpoint(name)
    if fx is not None:
        return _extract_fixpoint(fx, dialect)
    ind = env.inductive(name)
    if ind is not None:
        return _extract_inductive(ind, dialect)
    raise UnknownDefinition(f"no definition named {name}")


def _extract_fixpoint(fx: FixpointDef, dialect: str) -> str:
    params = [n for n, _ in fx.params]
    scrut = params[fx.match_index]
    if dialect == "lazy-functional":
        sig_parts = [_hs_type(s) for _, s in fx.params] + [_hs_type(fx.result)]
        lines = [f"{fx.name} :: {' -> '.join(sig_parts)}"]
        lines.append(f"{fx.name} {' '.join(params)} =")
        lines.append(f"  case {scrut} of {{")
        clause_lines = []
        for cl in fx.clauses:
            pat = " ".join([cl.ctor] + [b for b, _ in cl.binders])
            clause_lines.append(f"    {pat} -> {_term_text(cl.rhs, dialect)}")
        lines.append(";\n".join(clause_lines) + "}")
        return "\n".join(lines) + "\n"
    # strict-ML
    sig = " -> ".join([str(s) for _, s in fx.params] + [str(fx.result)])
    lines = [f"(** val {fx.name} : {sig} **)", ""]
    other = [p for i, p in enumerate(params) if i != fx.match_index]
    if fx.match_index == len(params) - 1:
        head = f"let rec {fx.name}{''.join(' ' + p for p in other)} = function"
    else:
        head = f"let rec {fx.name}{''.join(' ' + p for p in params)} = match {scrut} with"
    lines.append(head)
    for cl in fx.clauses:
        pat = " ".join([cl.ctor] + [b for b, _ in cl.binders])
        lines.append(f"    | {pat} -> {_term_text(cl.rhs, dialect)}")
    return "\n".join(lines) + "\n"


def _extract_inductive(ind: InductiveDef, dialect: str) -> str:
    if dialect == "lazy-functional":
        ctors = " | ".join(
            " ".join([c] + [_hs_type(s) for s in sorts]) for c, sorts in ind.constructors
        )
        return f"data {_hs_type(ind.name)} = {ctors}\n"
    ctors = " | ".join(
        c + (f" of {' * '.join(str(s) for s in sorts)}" if sorts else "")
        for c, sorts in ind.constructors
    )
    return f"type {ind.name} = {ctors}\n"


# ---------------------------------------------------------------------------
# Token-level comparison and the re-parse interpreter
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\(\*\*|\*\*\)|::|->|[(){};|=]|[^\s(){};|=]+")


def tokens(text: str) -> list[str]:
    """Whitespace-insensitive token stream used for golden comparisons."""
    return _TOKEN_RE.findall(text)


def token_equal(a: str, b: str) -> bool:
    return tokens(a) == tokens(b)


def reparse_clauses(text: str, dialect: str) -> tuple[str, list[tuple[str, list[str], Term]]]:
    """Parse emitted text back into (function name, [(ctor, binders, rhs)]).

    Deliberately independent of the emitter: works on the token stream of the
    dialect grammar, so a systematic emission bug cannot hide.
    """
    toks = tokens(text)
    if dialect == "lazy-functional":
        name = toks[0]
        arrow_body = toks.index("=")  # first = ends the header
        rest = toks[arrow_body + 1:]
        assert rest[0] == "case", "lazy-functional body must be a case"
        assert rest[2] == "of" and rest[3] == "{"
        rest = rest[4:rest.index("}")]
        clause_toks = _split(rest, ";")
    else:
        assert toks[0] == "(**" and "**)" in toks, "strict-ML starts with a val comment"
        rest = toks[toks.index("**)") + 1:]
        assert rest[0] == "let" and rest[1] == "rec"
        name = rest[2]
        fun_kw = rest.index("function") if "function" in rest else rest.index("match")
        rest = rest[fun_kw + 1:]
        if rest and rest[0] == "|":
            rest = rest[1:]
        clause_toks = _split(rest, "|")
    clauses = []
    for ct in clause_toks:
        arrow = ct.index("->")
        pat, rhs = ct[:arrow], ct[arrow + 1:]
        pat = [t for t in pat if t not in "()"]
        ctor, binders = pat[0], pat[1:]
        clauses.append((ctor, binders, _parse_term_tokens(rhs, set(binders))))
    return name, clauses


def _split(toks: list[str], sep: str) -> list[list[str]]:
    out: list[list[str]] = [[]]
    depth = 0
    for t in toks:
        if t == "(":
            depth += 1
        elif t == ")":
            depth -= 1
        if t == sep and depth == 0:
            out.append([])
        else:
            out[-1].append(t)
    return [o for o in out if o]


def _parse_term_tokens(toks: list[str], binders: set[str]) -> Term:
    pos = 0

    def parse_app() -> Term:
        nonlocal pos
        head = parse_atom()
        args = []
        while pos < len(toks) and toks[pos] != ")":
            args.append(parse_atom())
        if args:
            match head:
                case Ctor(n, ()):
                    return Ctor(n, tuple(args))
                case FunApp(n, ()):
                    return FunApp(n, tuple(args))
                case Var(n, _):
                    return FunApp(n, tuple(args))
        return head

    def parse_atom() -> Term:
        nonlocal pos
        t = toks[pos]
        if t == "(":
            pos += 1
            inner = parse_app()
            assert toks[pos] == ")", "unbalanced parens in extracted text"
            pos += 1
            return inner
        pos += 1
        if t in binders:
            return Var(t, None)
        if t[0].isupper() or t in ("true", "false"):
            return Ctor(t, ())
        return FunApp(t, ())

    out = parse_app()
    assert pos == len(toks), "trailing tokens in extracted clause"
    return out


def run_extracted(env: Env, text: str, dialect: str, arg_value):
    """Evaluate a re-parsed single-argument extraction on a Value.

    Interprets only the clauses present in the text, deferring to `env` for
    the helpers they call (add, mul, ...), and returns a Value.
    """
    from .inductive import Value, _apply_fixpoint, eval_term

    name, clauses = reparse_clauses(text, dialect)

    def call(v: Value) -> Value:
        clause = next((c for c in clauses if c[0] == v.ctor), None)
        if clause is None:
            raise UnknownDefinition(f"no clause for constructor {v.ctor}")
        _, binders, rhs = clause
        binding = dict(zip(binders, v.args))
        return ev(rhs, binding)

    def ev(t: Term, binding: dict) -> Value:
        match t:
            case Var(n, _):
                return binding[n]
            case Ctor(n, args):
                return Value(n, tuple(ev(a, binding) for a in args))
            case FunApp(n, args):
                vals = [ev(a, binding) for a in args]
                if n == name:
                    return call(vals[0])
                fx = env.fixpoint(n)
                if fx is None:
                    raise UnknownDefinition(f"extracted code calls unknown {n}")
                return _apply_fixpoint(env, fx, vals)
        raise TypeError(f"not a term: {t!r}")

    return call(arg_value)


# ---------------------------------------------------------------------------
# Witness extraction from constructive existence proofs
# ---------------------------------------------------------------------------

def _uses_classical(d: Derivation, env: Env | None) -> bool:
    from .kernel import CalculusMode

    stack = [d]
    while stack:
        node = stack.pop()
        if node.rule in _CLASSICAL_RULES:
            return True
        if node.rule == "thm" and env is not None:
            rec = env.theorem(node.params[0])
            if rec is not None and rec.mode is CalculusMode.CLASSICAL:
                return True
        stack.extend(node.prems)
    return False


def extract_witness(thm, env: Env | None = None) -> Term:
    """The explicit witness of a constructive existence theorem.

    Peels statement binders and implication intros until the existential
    conclusion; NonConstructive when the proof of the existential is not an
    explicit introduction or relies on classical steps anywhere beneath it
    (passing `env` also flags uses of classical lemmas such as NNPP).
    """
    d: Derivation = thm.derivation
    while d.rule in ("schema_intro", "forall_intro", "imp_intro"):
        (d,) = d.prems
    goal = d.concl.goal
    if not isinstance(goal, Exists):
        raise NotExistential(f"conclusion is not existential: {goal}")
    if d.rule != "exists_intro":
        raise NonConstructive(
            f"the existential is concluded by {d.rule}, not an explicit witness")
    if _uses_classical(d, env):
        raise NonConstructive("the witness derivation uses classical steps")
    return d.params[0]
