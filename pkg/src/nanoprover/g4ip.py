"""Contraction-free intuitionistic decision procedure (Dyckhoff's G4ip/LJT).

`decide` terminates on every propositional sequent without loop checking:
every rule application strictly decreases the Vorob'ev-Hudelmaier-Dyckhoff
weight.  On success it returns a natural-deduction derivation the kernel
accepts; on failure the sequent is certifiably not intuitionistically
provable, which is exactly what the Glivenko equivalence test needs.

Consumed principal formulas leave the search multiset but stay in the NJ
contexts (contexts only ever grow), so every emitted node matches the
kernel's rule shapes exactly.  PredApp and Eq formulas are treated as opaque
atoms; quantified formulas are rejected by the caller.
"""

from __future__ import annotations

from .kernel import (
    And,
    Atom,
    BOT,
    Bottom,
    Derivation,
    Eq,
    Formula,
    Imp,
    Or,
    PredApp,
    Sequent,
    elaborate,
)

Ctx = tuple[tuple[str, Formula], ...]
Active = tuple[tuple[str, Formula], ...]


def g4_formula(f: Formula) -> bool:
    """Formulas the procedure decides (elaborated, quantifier-free)."""
    match f:
        case Atom() | Bottom() | Eq() | PredApp():
            return True
        case And(l, r) | Or(l, r) | Imp(l, r):
            return g4_formula(l) and g4_formula(r)
        case _:
            return False


def _atomic(f: Formula) -> bool:
    return isinstance(f, (Atom, PredApp, Eq))


class _Search:
    def __init__(self, used_labels: set[str]):
        self.used = set(used_labels)
        self.n = 0
        self.failed: set[tuple[frozenset, Formula]] = set()

    def fresh(self, base: str = "H") -> str:
        while f"{base}{self.n}" in self.used:
            self.n += 1
        lab = f"{base}{self.n}"
        self.used.add(lab)
        self.n += 1
        return lab

    # -- derivation builders ------------------------------------------------

    def hyp(self, ctx: Ctx, label: str) -> Derivation:
        f = dict(ctx)[label]
        return Derivation("hyp", (label,), Sequent(ctx, f))

    def ex_falso(self, ctx: Ctx, label: str, goal: Formula) -> Derivation:
        return Derivation("bot_elim", (), Sequent(ctx, goal), (self.hyp(ctx, label),))

    def with_hyp(self, ctx: Ctx, goal: Formula, label: str, f: Formula,
                 proof: Derivation, body: Derivation) -> Derivation:
        """Cut: from ctx |- f and ctx,(label:f) |- goal conclude ctx |- goal."""
        return Derivation(
            "imp_elim", (), Sequent(ctx, goal),
            (Derivation("imp_intro", (label,), Sequent(ctx, Imp(f, goal)), (body,)),
             proof),
        )

    def imp_elim(self, ctx: Ctx, major: Derivation, minor: Derivation) -> Derivation:
        goal = major.concl.goal.right  # type: ignore[union-attr]
        return Derivation("imp_elim", (), Sequent(ctx, goal), (major, minor))

    # -- the procedure --------------------------------------------------------

    def search(self, ctx: Ctx, active: Active, goal: Formula) -> Derivation | None:
        key = (frozenset(f for _, f in active), goal)
        if key in self.failed:
            return None
        out = self._search(ctx, active, goal)
        if out is None:
            self.failed.add(key)
        return out

    def _search(self, ctx: Ctx, active: Active, goal: Formula) -> Derivation | None:
        # Axioms: identity and ex falso.
        for lab, f in active:
            if f == goal:
                return self.hyp(ctx, lab)
            if f == BOT:
                return self.ex_falso(ctx, lab, goal)

        # Invertible right rule for implication.
        match goal:
            case Imp(a, b):
                lab = self.fresh()
                ctx1 = ctx + ((lab, a),)
                body = self.search(ctx1, active + ((lab, a),), b)
                if body is None:
                    return None
                return Derivation("imp_intro", (lab,), Sequent(ctx, goal), (body,))

        # Invertible left rules, one principal formula at a time.
        for i, (lab, f) in enumerate(active):
            rest = active[:i] + active[i + 1:]
            match f:
                case And(a, b):
                    la, lb = self.fresh(), self.fresh()
                    ctx1 = ctx + ((la, a),)
                    ctx2 = ctx1 + ((lb, b),)
                    body = self.search(ctx2, rest + ((la, a), (lb, b)), goal)
                    if body is None:
                        return None
                    inner = self.with_hyp(
                        ctx1, goal, lb, b,
                        Derivation("and_elim_r", (), Sequent(ctx1, b),
                                   (self.hyp(ctx1, lab),)),
                        body)
                    return self.with_hyp(
                        ctx, goal, la, a,
                        Derivation("and_elim_l", (), Sequent(ctx, a),
                                   (self.hyp(ctx, lab),)),
                        inner)
                case Or(a, b):
                    la, lb = self.fresh(), self.fresh()
                    dl = self.search(ctx + ((la, a),), rest + ((la, a),), goal)
                    if dl is None:
                        return None
                    dr = self.search(ctx + ((lb, b),), rest + ((lb, b),), goal)
                    if dr is None:
                        return None
                    return Derivation("or_elim", (la, lb), Sequent(ctx, goal),
                                      (self.hyp(ctx, lab), dl, dr))
                case Imp(Bottom(), _):
                    return self.search(ctx, rest, goal)
                case Imp(p, b) if _atomic(p):
                    match_lab = next((l2 for l2, f2 in active if f2 == p), None)
                    if match_lab is None:
                        continue  # not usable yet; may fire after more intros
                    lb = self.fresh()
                    proof_b = self.imp_elim(ctx, self.hyp(ctx, lab),
                                            self.hyp(ctx, match_lab))
                    body = self.search(ctx + ((lb, b),), rest + ((lb, b),), goal)
                    if body is None:
                        return None
                    return self.with_hyp(ctx, goal, lb, b, proof_b, body)
                case Imp(And(c, d), b):
                    # (C /\ D) -> B  becomes  C -> (D -> B)
                    curried = Imp(c, Imp(d, b))
                    lc, ld = self.fresh(), self.fresh()
                    ctx_c = ctx + ((lc, c),)
                    ctx_cd = ctx_c + ((ld, d),)
                    pair = Derivation("and_intro", (), Sequent(ctx_cd, And(c, d)),
                                      (self.hyp(ctx_cd, lc), self.hyp(ctx_cd, ld)))
                    inner_b = self.imp_elim(ctx_cd, self.hyp(ctx_cd, lab), pair)
                    inner_db = Derivation("imp_intro", (ld,), Sequent(ctx_c, Imp(d, b)),
                                          (inner_b,))
                    proof = Derivation("imp_intro", (lc,), Sequent(ctx, curried),
                                       (inner_db,))
                    lk = self.fresh()
                    body = self.search(ctx + ((lk, curried),),
                                       rest + ((lk, curried),), goal)
                    if body is None:
                        return None
                    return self.with_hyp(ctx, goal, lk, curried, proof, body)
                case Imp(Or(c, d), b):
                    # (C \/ D) -> B  becomes  C -> B  and  D -> B
                    cb, db = Imp(c, b), Imp(d, b)
                    lc = self.fresh()
                    ctx_c = ctx + ((lc, c),)
                    proof_cb = Derivation(
                        "imp_intro", (lc,), Sequent(ctx, cb),
                        (self.imp_elim(
                            ctx_c, self.hyp(ctx_c, lab),
                            Derivation("or_intro_l", (), Sequent(ctx_c, Or(c, d)),
                                       (self.hyp(ctx_c, lc),))),))
                    l1 = self.fresh()
                    ctx1 = ctx + ((l1, cb),)
                    ld = self.fresh()
                    ctx_d = ctx1 + ((ld, d),)
                    proof_db = Derivation(
                        "imp_intro", (ld,), Sequent(ctx1, db),
                        (self.imp_elim(
                            ctx_d, self.hyp(ctx_d, lab),
                            Derivation("or_intro_r", (), Sequent(ctx_d, Or(c, d)),
                                       (self.hyp(ctx_d, ld),))),))
                    l2 = self.fresh()
                    body = self.search(ctx1 + ((l2, db),),
                                       rest + ((l1, cb), (l2, db)), goal)
                    if body is None:
                        return None
                    inner = self.with_hyp(ctx1, goal, l2, db, proof_db, body)
                    return self.with_hyp(ctx, goal, l1, cb, proof_cb, inner)
                case _:
                    continue

        # Invertible right rule for conjunction (after left saturation).
        match goal:
            case And(a, b):
                dl = self.search(ctx, active, a)
                if dl is None:
                    return None
                dr = self.search(ctx, active, b)
                if dr is None:
                    return None
                return Derivation("and_intro", (), Sequent(ctx, goal), (dl, dr))

        # Choice points: right disjunction ...
        match goal:
            case Or(a, b):
                dl = self.search(ctx, active, a)
                if dl is not None:
                    return Derivation("or_intro_l", (), Sequent(ctx, goal), (dl,))
                dr = self.search(ctx, active, b)
                if dr is not None:
                    return Derivation("or_intro_r", (), Sequent(ctx, goal), (dr,))

        # ... and the non-invertible nested-implication rule.
        for i, (lab, f) in enumerate(active):
            match f:
                case Imp(Imp(c, d) as cd, b):
                    rest = active[:i] + active[i + 1:]
                    db = Imp(d, b)
                    # proof of D -> B from (C -> D) -> B
                    ld = self.fresh()
                    ctx_d = ctx + ((ld, d),)
                    lc = self.fresh()
                    ctx_dc = ctx_d + ((lc, c),)
                    proof_db = Derivation(
                        "imp_intro", (ld,), Sequent(ctx, db),
                        (self.imp_elim(
                            ctx_d, self.hyp(ctx_d, lab),
                            Derivation("imp_intro", (lc,), Sequent(ctx_d, cd),
                                       (self.hyp(ctx_dc, ld),))),))
                    l1 = self.fresh()
                    ctx1 = ctx + ((l1, db),)
                    d1 = self.search(ctx1, rest + ((l1, db),), cd)
                    if d1 is None:
                        continue
                    proof_b = self.imp_elim(ctx1, self.hyp(ctx1, lab), d1)
                    l2 = self.fresh()
                    d2 = self.search(ctx1 + ((l2, b),), rest + ((l2, b),), goal)
                    if d2 is None:
                        continue
                    inner = self.with_hyp(ctx1, goal, l2, b, proof_b, d2)
                    return self.with_hyp(ctx, goal, l1, db, proof_db, inner)
                case _:
                    continue

        return None


def decide(hyps: Ctx, goal: Formula) -> Derivation | None:
    """Decide the (elaborated, propositional) sequent hyps |- goal.

    Returns an IntuitionisticNJ derivation or None (definitely unprovable).
    """
    hyps = tuple((lab, elaborate(f)) for lab, f in hyps)
    goal = elaborate(goal)
    if not g4_formula(goal) or not all(g4_formula(f) for _, f in hyps):
        raise ValueError("g4ip decides propositional sequents only")
    s = _Search({lab for lab, _ in hyps})
    return s.search(hyps, hyps, goal)
