"""Surface syntax: lexer, formula/script parsers, and the pretty printer.

One Coq-flavored grammar serves both calculi modes.  ASCII connectives are
canonical; the common Unicode symbols are accepted as aliases.  Comments
`(* ... *)` nest and are preserved as trivia.  Sentences end with a period
followed by whitespace, so qualified names like Coq.Logic.Classical lex as
single identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError
from .kernel import (
    And,
    ArrowSort,
    Atom,
    Bottom,
    BVar,
    CalculusMode,
    Ctor,
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
    Var,
)
from .resolve import (
    RApp,
    RArrow,
    RBin,
    RBot,
    RCompare,
    RConn,
    RFormula,
    RName,
    RNeg,
    RNum,
    RQuant,
    RSort,
    RSpine,
    RTerm,
)
from .tactics import Call, First, RepeatPlus, Seq, Tactic, Tactical, ThenAll, Try

# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_UNICODE_ALIASES = {
    "¬": "~",      # ¬
    "∧": "/\\",    # ∧
    "∨": "\\/",    # ∨
    "→": "->",     # →
    "⟹": "==>",    # ⟹
    "⇒": "==>",    # ⇒
    "↔": "<->",    # ↔
    "⟺": "<->",    # ⟺
    "∀": "forall", # ∀
    "∃": "exists", # ∃
    "⊥": "False",  # ⊥
}

_MULTI = ["[|", "|]", "==>", "<->", "->", "<-", ":=", "=>", "/\\", "\\/", "||", "&&"]
_SINGLE = "~()[]{},;:=|+*-<>"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "num" | "punct" | "eof"
    text: str
    pos: int
    line: int
    col: int


@dataclass(frozen=True)
class Trivia:
    text: str
    pos: int
    end: int


def lex(source: str) -> tuple[list[Token], list[Trivia]]:
    tokens: list[Token] = []
    trivia: list[Trivia] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    def error(msg: str):
        raise ParseError(msg, line, col)

    while i < n:
        c = source[i]
        if c.isspace():
            advance(1)
            continue
        if source.startswith("(*", i):
            start = i
            depth = 0
            j = i
            while j < n:
                if source.startswith("(*", j):
                    depth += 1
                    j += 2
                elif source.startswith("*)", j):
                    depth -= 1
                    j += 2
                    if depth == 0:
                        break
                else:
                    j += 1
            if depth != 0:
                error("unterminated comment")
            trivia.append(Trivia(source[start:j], start, j))
            advance(j - i)
            continue
        if c == '"':
            j = i + 1
            while j < n and source[j] != '"':
                j += 1
            if j >= n:
                error("unterminated string")
            tokens.append(Token("str", source[i + 1:j], i, line, col))
            advance(j + 1 - i)
            continue
        if c in _UNICODE_ALIASES:
            alias = _UNICODE_ALIASES[c]
            kind = "ident" if alias[0].isalpha() else "punct"
            tokens.append(Token(kind, alias, i, line, col))
            advance(1)
            continue
        matched = False
        for m in _MULTI:
            if source.startswith(m, i):
                tokens.append(Token("punct", m, i, line, col))
                advance(len(m))
                matched = True
                break
        if matched:
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("num", source[i:j], i, line, col))
            advance(j - i)
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] in "_'"):
                j += 1
            # Qualified names: a dot directly followed by a letter continues
            # the identifier (Coq.Logic.Classical); a dot before whitespace or
            # EOF is the sentence period.
            while j < n and source[j] == "." and j + 1 < n and (
                    source[j + 1].isalpha() or source[j + 1] == "_"):
                j += 1
                while j < n and (source[j].isalnum() or source[j] in "_'"):
                    j += 1
            tokens.append(Token("ident", source[i:j], i, line, col))
            advance(j - i)
            continue
        if c == ".":
            tokens.append(Token("punct", ".", i, line, col))
            advance(1)
            continue
        if c in _SINGLE or c == "/" or c == "\\":
            tokens.append(Token("punct", c, i, line, col))
            advance(1)
            continue
        error(f"unexpected character {c!r}")
    tokens.append(Token("eof", "", n, line, col))
    return tokens, trivia


# ---------------------------------------------------------------------------
# Parser core
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def at_ident(self, *names: str) -> bool:
        t = self.peek()
        return t.kind == "ident" and (not names or t.text in names)

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            self.error(f"expected {text!r}, found {t.text!r}" if t.kind != "eof"
                       else f"expected {text!r}, found end of input")
        return self.next()

    def error(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- terms -----------------------------------------------------------

    _TERM_STOP = {")", "]", "|]", ",", ";", ".", "=", "==>", "->", "<->", "/\\",
                  "\\/", "|", "=>", "with", "end", "", ":", ":="}

    def term(self) -> RTerm:
        return self.term_orb()

    def term_orb(self) -> RTerm:
        t = self.term_andb()
        while self.at("||"):
            self.next()
            t = RBin("||", t, self.term_andb())
        return t

    def term_andb(self) -> RTerm:
        t = self.term_plus()
        while self.at("&&"):
            self.next()
            t = RBin("&&", t, self.term_plus())
        return t

    def term_plus(self) -> RTerm:
        t = self.term_times()
        while self.at("+"):
            self.next()
            t = RBin("+", t, self.term_times())
        return t

    def term_times(self) -> RTerm:
        t = self.term_app()
        while self.at("*"):
            self.next()
            t = RBin("*", t, self.term_app())
        return t

    def term_app(self) -> RTerm:
        head = self.term_atom()
        args = []
        while self._starts_term_atom():
            args.append(self.term_atom())
        if args:
            return RApp(head, tuple(args))
        return head

    def _starts_term_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("ident", "num"):
            return t.text not in ("with", "end", "of", "as", "in")
        return t.text == "("

    def term_atom(self) -> RTerm:
        t = self.peek()
        if t.kind == "num":
            self.next()
            return RNum(int(t.text))
        if t.kind == "ident":
            self.next()
            return RName(t.text)
        if t.text == "(":
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        self.error(f"expected a term, found {t.text!r}")

    # -- formulas ----------------------------------------------------------

    def formula(self) -> RFormula:
        return self.f_meta()

    def f_meta(self) -> RFormula:
        if self.at("[|"):
            self.next()
            premises = [self.formula()]
            while self.at(";"):
                self.next()
                premises.append(self.formula())
            self.expect("|]")
            self.expect("==>")
            out = self.f_meta()
            for p in reversed(premises):
                out = RConn("->", p, out)
            return out
        f = self.f_iff()
        if self.at("==>"):
            self.next()
            return RConn("->", f, self.f_meta())
        return f

    def f_iff(self) -> RFormula:
        f = self.f_imp()
        while self.at("<->"):
            self.next()
            f = RConn("<->", f, self.f_imp())
        return f

    def f_imp(self) -> RFormula:
        f = self.f_or()
        if self.at("->"):
            self.next()
            return RConn("->", f, self.f_imp())
        return f

    def f_or(self) -> RFormula:
        f = self.f_and()
        if self.at("\\/"):
            self.next()
            return RConn("\\/", f, self.f_or())
        return f

    def f_and(self) -> RFormula:
        f = self.f_neg()
        if self.at("/\\"):
            self.next()
            return RConn("/\\", f, self.f_and())
        return f

    def f_neg(self) -> RFormula:
        if self.at("~"):
            self.next()
            return RNeg(self.f_neg())
        return self.f_primary()

    def f_primary(self) -> RFormula:
        if self.at_ident("forall", "exists"):
            return self.f_quant()
        if self.at_ident("False"):
            self.next()
            return RBot()
        if self.at("("):
            # Could be a parenthesized formula or a parenthesized term
            # (e.g. `(negb a) && ...`); try the formula reading first and
            # fall back to the term grammar on failure or on a trailing
            # term operator.
            save = self.pos
            try:
                self.next()
                inner = self.formula()
                self.expect(")")
                if self.peek().text in ("=", "||", "&&", "+", "*"):
                    raise ParseError("term context", 0, 0)
                return inner
            except ParseError:
                self.pos = save
                return self._term_formula()
        return self._term_formula()

    def _term_formula(self) -> RFormula:
        t = self.term()
        if self.at("="):
            self.next()
            rhs = self.term()
            return RCompare(t, rhs)
        match t:
            case RName(n):
                return RSpine(n, ())
            case RApp(RName(n), args):
                return RSpine(n, args)
        self.error("expected a formula")

    def f_quant(self) -> RFormula:
        kind = self.next().text
        binders: list[tuple[str, RSort | None]] = []
        while True:
            if self.at("("):
                self.next()
                group = []
                while self.at_ident() and not self.at_ident("forall", "exists"):
                    group.append(self.next().text)
                self.expect(":")
                sort = self.sort()
                self.expect(")")
                binders.extend((g, sort) for g in group)
            elif self.at_ident() and not self.at_ident("forall", "exists"):
                group = [self.next().text]
                while self.at_ident():
                    group.append(self.next().text)
                if self.at(":"):
                    self.next()
                    sort = self.sort()
                    binders.extend((g, sort) for g in group)
                else:
                    binders.extend((g, None) for g in group)
            else:
                break
            if self.at(","):
                break
        self.expect(",")
        if not binders:
            self.error("quantifier needs at least one binder")
        return RQuant(kind, tuple(binders), self.formula())

    def sort(self) -> RSort:
        parts = [self._sort_atom()]
        while self.at("->"):
            self.next()
            parts.append(self._sort_atom())
        if len(parts) == 1:
            return parts[0]
        return RArrow(tuple(parts[:-1]), parts[-1])

    def _sort_atom(self) -> RSort:
        if self.at("("):
            self.next()
            s = self.sort()
            self.expect(")")
            return s
        t = self.next()
        if t.kind != "ident":
            self.error("expected a sort name")
        return t.text


def parse_formula_raw(text: str) -> RFormula:
    tokens, _ = lex(text)
    p = _Parser(tokens)
    f = p.formula()
    if p.peek().kind != "eof":
        p.error(f"trailing input: {p.peek().text!r}")
    return f


def parse_formula(text: str, env=None, schema=None, variables=None) -> Formula:
    """Parse and resolve a formula (statement-style schema binders allowed)."""
    from .prelude import standard_env
    from .resolve import resolve_statement, Resolver

    raw = parse_formula_raw(text)
    env = env if env is not None else standard_env()
    if schema or variables:
        return Resolver(env, schema, variables).formula(raw)
    return resolve_statement(raw, env)


def parse_sequent(text: str, env=None) -> Sequent:
    """Parse the meta-notation [| A1; ...; An |] ==> B into a Sequent."""
    from .prelude import standard_env
    from .resolve import resolve_statement

    env = env if env is not None else standard_env()
    tokens, _ = lex(text)
    p = _Parser(tokens)
    premises: list[RFormula] = []
    if p.at("[|"):
        p.next()
        premises.append(p.formula())
        while p.at(";"):
            p.next()
            premises.append(p.formula())
        p.expect("|]")
        p.expect("==>")
    goal = p.formula()
    if p.peek().kind != "eof":
        p.error(f"trailing input: {p.peek().text!r}")
    hyps = tuple((f"H{i + 1}", resolve_statement(raw, env))
                 for i, raw in enumerate(premises))
    return Sequent(hyps, resolve_statement(goal, env))


# ---------------------------------------------------------------------------
# Script items
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    col: int


@dataclass(frozen=True)
class InductiveItem:
    name: str
    result_sort: str
    constructors: tuple[tuple[str, tuple[RSort, ...]], ...]
    span: Span


@dataclass(frozen=True)
class FixpointItem:
    name: str
    params: tuple[tuple[str, RSort], ...]
    result: RSort
    match_param: str
    clauses: tuple[tuple[str, tuple[str, ...], RTerm], ...]  # (ctor, binders, rhs)
    span: Span


@dataclass(frozen=True)
class StatementItem:
    kind: str  # "Lemma" | "Theorem"
    name: str
    formula: RFormula
    span: Span


@dataclass(frozen=True)
class ProofItem:
    span: Span


@dataclass(frozen=True)
class TacticItem:
    tactical: Tactical
    span: Span


@dataclass(frozen=True)
class BulletItem:
    marker: str  # "-", "+", "*", "--", ...
    span: Span


@dataclass(frozen=True)
class QedItem:
    span: Span


@dataclass(frozen=True)
class AbortItem:
    span: Span


@dataclass(frozen=True)
class ComputeItem:
    term: RTerm
    span: Span


@dataclass(frozen=True)
class RequireItem:
    path: str
    classical: bool
    span: Span


@dataclass(frozen=True)
class NotationItem:
    text: str
    span: Span


@dataclass(frozen=True)
class ModeItem:
    mode: CalculusMode
    span: Span


Item = (InductiveItem | FixpointItem | StatementItem | ProofItem | TacticItem
        | BulletItem | QedItem | AbortItem | ComputeItem | RequireItem
        | NotationItem | ModeItem)


@dataclass(frozen=True)
class Script:
    items: tuple[Item, ...]
    trivia: tuple[Trivia, ...]
    source: str


# ---------------------------------------------------------------------------
# Script parser
# ---------------------------------------------------------------------------

_NO_ARG_TACTICS = {
    "split", "left", "right", "assumption", "exfalso", "reflexivity",
    "contradiction", "constructor", "simpl", "tauto", "arith", "omega", "nnpp",
}


class _ScriptParser(_Parser):
    def __init__(self, tokens: list[Token], source: str):
        super().__init__(tokens)
        self.source = source
        self.in_proof = False
        self.has_statement = False

    def span_from(self, start_tok: Token) -> Span:
        end = self.toks[self.pos - 1] if self.pos > 0 else start_tok
        return Span(start_tok.pos, end.pos + len(end.text), start_tok.line, start_tok.col)

    def parse_script(self) -> list[Item]:
        items: list[Item] = []
        while self.peek().kind != "eof":
            items.append(self.item())
        if self.in_proof:
            self.error("unterminated proof: expected Qed or Abort")
        return items

    def item(self) -> Item:
        t = self.peek()
        if t.text in ("-", "+", "*") and self.in_proof:
            start = t
            marker = ""
            while self.at(start.text) and len(marker) < 8:
                marker += self.next().text
            return BulletItem(marker, self.span_from(start))
        if self.in_proof and t.kind != "ident":
            return self.tactic_item()
        if t.kind != "ident":
            self.error(f"expected a command, found {t.text!r}")
        if not self.in_proof:
            match t.text:
                case "Inductive":
                    return self.inductive_item()
                case "Fixpoint":
                    return self.fixpoint_item()
                case "Lemma" | "Theorem" | "Corollary" | "Example":
                    return self.statement_item()
                case "Compute":
                    return self.compute_item()
                case "Require":
                    return self.require_item()
                case "Notation":
                    return self.notation_item()
                case "Mode":
                    return self.mode_item()
            self.error(f"tactic {t.text!r} outside a proof (missing Lemma/Theorem?)")
        else:
            match t.text:
                case "Proof":
                    start = self.next()
                    self.expect(".")
                    return ProofItem(self.span_from(start))
                case "Qed":
                    start = self.next()
                    self.expect(".")
                    self.in_proof = False
                    return QedItem(self.span_from(start))
                case "Abort":
                    start = self.next()
                    self.expect(".")
                    self.in_proof = False
                    return AbortItem(self.span_from(start))
            return self.tactic_item()

    def inductive_item(self) -> InductiveItem:
        start = self.expect("Inductive")
        name = self.next().text
        self.expect(":")
        result = self.next().text
        self.expect(":=")
        ctors: list[tuple[str, tuple[RSort, ...]]] = []
        if self.at("|"):
            self.next()
        while not self.at("."):
            cname = self.next().text
            self.expect(":")
            csort = self.sort()
            args: tuple[RSort, ...]
            match csort:
                case RArrow(cargs, res):
                    if res != name:
                        self.error(f"constructor {cname} must build {name}")
                    args = cargs
                case _:
                    if csort != name:
                        self.error(f"constructor {cname} must build {name}")
                    args = ()
            ctors.append((cname, args))
            if self.at("|"):
                self.next()
        self.expect(".")
        return InductiveItem(name, result, tuple(ctors), self.span_from(start))

    def fixpoint_item(self) -> FixpointItem:
        start = self.expect("Fixpoint")
        name = self.next().text
        params: list[tuple[str, RSort]] = []
        while self.at("("):
            self.next()
            group = []
            while self.at_ident():
                group.append(self.next().text)
            self.expect(":")
            sort = self.sort()
            self.expect(")")
            params.extend((g, sort) for g in group)
        self.expect(":")
        result = self.sort()
        self.expect(":=")
        self.expect("match")
        scrut = self.next().text
        self.expect("with")
        clauses: list[tuple[str, tuple[str, ...], RTerm]] = []
        if self.at("|"):
            self.next()
        while not self.at_ident("end"):
            ctor = self.next().text
            binders = []
            while self.at_ident() and not self.at("=>"):
                binders.append(self.next().text)
            self.expect("=>")
            rhs = self.term()
            clauses.append((ctor, tuple(binders), rhs))
            if self.at("|"):
                self.next()
        self.expect("end")
        if self.at_ident("where"):
            # trailing notation clause, e.g. `where "n + m" := (add n m)`
            while not self.at("."):
                self.next()
        self.expect(".")
        return FixpointItem(name, tuple(params), result, scrut, tuple(clauses),
                            self.span_from(start))

    def statement_item(self) -> StatementItem:
        start = self.next()
        kind = "Theorem" if start.text == "Theorem" else "Lemma"
        name = self.next().text
        self.expect(":")
        raw = self.formula()
        self.expect(".")
        self.in_proof = True
        return StatementItem(kind, name, raw, self.span_from(start))

    def compute_item(self) -> ComputeItem:
        start = self.expect("Compute")
        t = self.term()
        self.expect(".")
        return ComputeItem(t, self.span_from(start))

    def require_item(self) -> RequireItem:
        start = self.expect("Require")
        if self.at_ident("Import", "Export"):
            self.next()
        path = self.next().text
        self.expect(".")
        return RequireItem(path, "Classical" in path, self.span_from(start))

    def notation_item(self) -> NotationItem:
        start = self.expect("Notation")
        depth = 0
        text_toks = []
        while not (self.at(".") and depth == 0):
            tok = self.next()
            if tok.kind == "eof":
                self.error("unterminated Notation")
            if tok.text == "(":
                depth += 1
            elif tok.text == ")":
                depth -= 1
            text_toks.append(tok.text)
        self.expect(".")
        return NotationItem(" ".join(text_toks), self.span_from(start))

    def mode_item(self) -> ModeItem:
        start = self.expect("Mode")
        which = self.next().text.lower()
        self.expect(".")
        if which.startswith("classic"):
            mode = CalculusMode.CLASSICAL
        elif which.startswith("intuition"):
            mode = CalculusMode.INTUITIONISTIC
        elif which.startswith("hilbert"):
            mode = CalculusMode.HILBERT
        else:
            self.error(f"unknown mode {which!r}")
        return ModeItem(mode, self.span_from(start))

    # -- tactic sentences ----------------------------------------------------

    def tactic_item(self) -> TacticItem:
        start = self.peek()
        t = self.tactical()
        self.expect(".")
        return TacticItem(t, self.span_from(start))

    def tactical(self) -> Tactical:
        t = self.tactical_seq()
        while self.at(";"):
            self.next()
            t = ThenAll(t, self.tactical_seq())
        return t

    def tactical_seq(self) -> Tactical:
        t = self.tactical_base()
        while self.at("+"):
            self.next()
            t = RepeatPlus(t)
        return t

    def tactical_base(self) -> Tactical:
        if self.at("("):
            self.next()
            t = self.tactical()
            self.expect(")")
            return t
        if self.at_ident("try"):
            self.next()
            return Try(self.tactical_seq())
        if self.at_ident("first"):
            self.next()
            self.expect("[")
            alts = [self.tactical()]
            while self.at("|"):
                self.next()
                alts.append(self.tactical())
            self.expect("]")
            return First(tuple(alts))
        if self.at_ident("repeat"):
            self.next()
            return RepeatPlus(self.tactical_seq())
        return Call(self.simple_tactic())

    def simple_tactic(self) -> Tactic:
        t = self.peek()
        if t.kind != "ident":
            self.error(f"expected a tactic, found {t.text!r}")
        name = self.next().text
        match name:
            case "intro":
                if self.at_ident():
                    return Tactic("intro", (self.next().text,))
                return Tactic("intro")
            case "intros":
                names = []
                while self.at_ident():
                    names.append(self.next().text)
                return Tactic("intros", tuple(names))
            case "apply" | "exact":
                target = self.next().text
                return Tactic(name, (target,))
            case "unfold":
                what = self.next().text
                return Tactic("unfold", (what,))
            case "destruct":
                target = self.next().text
                as_names: tuple[str, ...] = ()
                if self.at_ident("as"):
                    self.next()
                    self.expect("[")
                    names = []
                    while not self.at("]"):
                        if self.at("|"):
                            self.next()
                            continue
                        names.append(self.next().text)
                    self.expect("]")
                    as_names = tuple(names)
                return Tactic("destruct", (target, as_names))
            case "exists":
                return Tactic("exists", (self.term(),))
            case "rewrite":
                direction = "->"
                if self.at("->") or self.at("<-"):
                    direction = self.next().text
                target = self.next().text
                return Tactic("rewrite", (direction, target))
            case "induction":
                return Tactic("induction", (self.next().text,))
            case "classical_contradiction":
                if self.at_ident():
                    return Tactic("classical_contradiction", (self.next().text,))
                return Tactic("classical_contradiction")
            case "cut":
                self.expect("(")
                raw = self.formula()
                self.expect(")")
                return Tactic("cut", (raw,))
            case _ if name in _NO_ARG_TACTICS:
                return Tactic(name)
        self.error(f"unknown tactic {name!r}")


def parse_script(text: str) -> Script:
    tokens, trivia = lex(text)
    p = _ScriptParser(tokens, text)
    items = p.parse_script()
    return Script(tuple(items), tuple(trivia), text)


# ---------------------------------------------------------------------------
# Pretty printer
# ---------------------------------------------------------------------------

_PREC_IFF = 1
_PREC_IMP = 2
_PREC_OR = 3
_PREC_AND = 4
_PREC_NEG = 5


def _sort_text(s: Sort) -> str:
    return str(s)


def pretty_term(t: Term, name_stack: tuple[str, ...] = ()) -> str:
    return _term_text(t, name_stack, 0)


def _numeral(t: Term) -> int | None:
    n = 0
    while True:
        match t:
            case Ctor("O", ()):
                return n
            case Ctor("S", (inner,)):
                n += 1
                t = inner
            case _:
                return None


_INFIX = {"add": ("+", 1), "mul": ("*", 2), "orb": ("||", 1), "andb": ("&&", 2)}


def _term_text(t: Term, names: tuple[str, ...], prec: int) -> str:
    num = _numeral(t)
    if num is not None:
        return str(num)
    match t:
        case Var(n, _):
            return n
        case BVar(k):
            return names[k] if k < len(names) else f"_{k}"
        case FunApp(fn, (a, b)) if fn in _INFIX:
            sym, p = _INFIX[fn]
            s = f"{_term_text(a, names, p)} {sym} {_term_text(b, names, p + 1)}"
            return f"({s})" if prec > p else s
        case Ctor(n, ()) | FunApp(n, ()):
            return n
        case Ctor(n, args) | FunApp(n, args):
            parts = [n] + [_term_text(a, names, 9) for a in args]
            s = " ".join(parts)
            return f"({s})" if prec >= 9 else s
    raise TypeError(f"not a term: {t!r}")


def _fresh_name(hint: str, used: set[str]) -> str:
    if hint and hint not in used:
        return hint
    base = hint or "x"
    i = 0
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def pretty(x, names: tuple[str, ...] = ()) -> str:
    """Render a Formula (or Term / Sequent / Script) as parseable text."""
    if isinstance(x, (Var, BVar, Ctor, FunApp)):
        return pretty_term(x, names)
    if isinstance(x, Sequent):
        hyps = "; ".join(pretty(f, names) for _, f in x.hyps)
        return f"[| {hyps} |] ==> {pretty(x.goal, names)}" if x.hyps \
            else pretty(x.goal, names)
    if isinstance(x, Script):
        return x.source
    return _formula_text(x, names, 0, _used_names(x, set()))


def _used_names(f: Formula, acc: set[str]) -> set[str]:
    from .kernel import free_vars
    acc |= set(free_vars(f))
    match f:
        case Neg(b):
            _used_names(b, acc)
        case And(l, r) | Or(l, r) | Imp(l, r) | Iff(l, r):
            _used_names(l, acc)
            _used_names(r, acc)
        case Forall(_, _, b) | Exists(_, _, b):
            _used_names(b, acc)
        case SchemaAll(n, _, b):
            acc.add(n)
            _used_names(b, acc)
        case Atom(n):
            acc.add(n)
        case PredApp(n, _):
            acc.add(n)
        case _:
            pass
    return acc


def _formula_text(f: Formula, names: tuple[str, ...], prec: int, used: set[str]) -> str:
    def wrap(s: str, mine: int) -> str:
        return f"({s})" if prec > mine else s

    match f:
        case Atom(n):
            return n
        case Bottom():
            return "False"
        case Neg(b):
            return wrap(f"~{_formula_text(b, names, _PREC_NEG, used)}", _PREC_NEG)
        case And(l, r):
            s = (f"{_formula_text(l, names, _PREC_AND + 1, used)} /\\ "
                 f"{_formula_text(r, names, _PREC_AND, used)}")
            return wrap(s, _PREC_AND)
        case Or(l, r):
            s = (f"{_formula_text(l, names, _PREC_OR + 1, used)} \\/ "
                 f"{_formula_text(r, names, _PREC_OR, used)}")
            return wrap(s, _PREC_OR)
        case Imp(l, r):
            s = (f"{_formula_text(l, names, _PREC_IMP + 1, used)} -> "
                 f"{_formula_text(r, names, _PREC_IMP, used)}")
            return wrap(s, _PREC_IMP)
        case Iff(l, r):
            s = (f"{_formula_text(l, names, _PREC_IFF + 1, used)} <-> "
                 f"{_formula_text(r, names, _PREC_IFF + 1, used)}")
            return wrap(s, _PREC_IFF)
        case Forall(hint, sort, body) | Exists(hint, sort, body):
            kw = "forall" if isinstance(f, Forall) else "exists"
            name = _fresh_name(hint, used)
            inner = _formula_text(body, (name,) + names, 0, used | {name})
            s = f"{kw} {name} : {_sort_text(sort)}, {inner}"
            return f"({s})" if prec > 0 else s
        case SchemaAll(name, sort, body):
            inner = _formula_text(body, names, 0, used | {name})
            binder = f"{name} : {_sort_text(sort)}"
            if isinstance(sort, ArrowSort):
                binder = f"({binder})"
            s = f"forall {binder}, {inner}"
            return f"({s})" if prec > 0 else s
        case Eq(l, r, _):
            s = f"{pretty_term(l, names)} = {pretty_term(r, names)}"
            return f"({s})" if prec > 0 else s
        case PredApp(n, args):
            parts = [n] + [_term_text(a, names, 9) for a in args]
            s = " ".join(parts)
            return f"({s})" if prec > 0 and args else s
    raise TypeError(f"not a formula: {f!r}")
