"""Glivenko's double-negation bridge.

A propositional formula is a classical tautology exactly when its double
negation is intuitionistically provable, so the intuitionistic decision
procedure doubles as a classical propositional prover: one dne step peels the
double negation back off in ClassicalNJ mode.
"""

from __future__ import annotations

import itertools

from . import g4ip
from .errors import NonPropositional, NotClassicallyValid
from .kernel import (
    BOT,
    CalculusMode,
    Derivation,
    Formula,
    Imp,
    Sequent,
    elaborate,
    is_propositional,
)
from .tactics import Theorem


def glivenko_embed(phi: Formula) -> Formula:
    """~~phi in elaborated form: (phi -> False) -> False."""
    if not is_propositional(phi):
        raise NonPropositional(f"not a propositional formula: {phi}")
    e = elaborate(phi)
    return Imp(Imp(e, BOT), BOT)


def glivenko_prove(phi: Formula) -> Derivation:
    """An IntuitionisticNJ derivation of ~~phi, or NotClassicallyValid.

    Failure is a certificate: by Glivenko's theorem, ~~phi is
    intuitionistically provable iff phi is a classical tautology, and the
    underlying procedure is a decision procedure.
    """
    embedded = glivenko_embed(phi)
    d = g4ip.decide((), embedded)
    if d is None:
        raise NotClassicallyValid(f"not a classical tautology: {phi}")
    return d


_AUTO_COUNTER = itertools.count()


def classical_auto(phi: Formula, name: str | None = None) -> Theorem:
    """A ClassicalNJ theorem of phi itself: glivenko_prove plus one dne step."""
    inner = glivenko_prove(phi)
    d = Derivation("dne", (), Sequent((), phi), (inner,))
    if name is None:
        name = f"classical_auto_{next(_AUTO_COUNTER)}"
    return Theorem(name, phi, d, CalculusMode.CLASSICAL)
