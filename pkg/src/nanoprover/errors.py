"""Exception hierarchy shared by every layer of the prover."""

from __future__ import annotations


class NanoproverError(Exception):
    """Base class for all errors raised by this package."""


# --- kernel -----------------------------------------------------------------

class KernelError(NanoproverError):
    pass


class UnboundVariable(KernelError):
    pass


class ArityMismatch(KernelError):
    pass


class SortMismatch(KernelError):
    pass


class MissingMetavariable(KernelError):
    pass


class RuleViolation(KernelError):
    """A derivation node is not a valid instance of its rule.

    `path` locates the offending node: a tuple of premise indices from the root.
    """

    def __init__(self, path: tuple[int, ...], reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"rule violation at node {list(path)}: {reason}")


class ModeViolation(KernelError):
    """A rule (or theorem) reserved for a stronger calculus was used."""


class StepFailure(KernelError):
    """A Hilbert proof step is unjustified; `index` is the first bad step."""

    def __init__(self, index: int, reason: str = "unjustified step"):
        self.index = index
        super().__init__(f"step {index}: {reason}")


# --- inductive definitions ---------------------------------------------------

class DuplicateName(NanoproverError):
    pass


class NonPositiveOccurrence(NanoproverError):
    pass


class NonStructuralRecursion(NanoproverError):
    pass


class NonExhaustiveMatch(NanoproverError):
    pass


class OverlappingPatterns(NanoproverError):
    pass


class UnboundSymbol(NanoproverError):
    pass


class UnknownDefinition(NanoproverError):
    pass


# --- lambda calculus ----------------------------------------------------------

class TypingError(NanoproverError):
    """Simple-type checking failure (`expected` / `found` when known)."""

    def __init__(self, message: str, expected=None, found=None):
        self.expected = expected
        self.found = found
        super().__init__(message)


class AnnotationRequired(TypingError):
    def __init__(self, position: str):
        super().__init__(f"annotation required at {position}")


class FuelExhausted(NanoproverError):
    pass


class UnsupportedFragment(NanoproverError):
    pass


# --- tactics ------------------------------------------------------------------

class TacticError(NanoproverError):
    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class NotProvable(NanoproverError):
    """The G4ip decision procedure refuted the goal (a definite answer)."""


class NonPropositionalGoal(NanoproverError):
    pass


class OpenGoals(NanoproverError):
    pass


class KernelRejection(NanoproverError):
    """qed's re-check failed: indicates a bug in the tactics layer."""


class IllFormedStatement(NanoproverError):
    pass


# --- translation / extraction --------------------------------------------------

class NonPropositional(NanoproverError):
    pass


class NotClassicallyValid(NanoproverError):
    pass


class NotExistential(NanoproverError):
    pass


class NonConstructive(NanoproverError):
    pass


# --- surface / session ----------------------------------------------------------

class ParseError(NanoproverError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class SessionError(NanoproverError):
    def __init__(self, message: str, item_index: int | None = None, cause: Exception | None = None):
        self.item_index = item_index
        self.cause = cause
        # run_to failures carry the partially-advanced session here, so the
        # caller can keep the progress made before the failing item.
        self.partial = None
        super().__init__(message)
