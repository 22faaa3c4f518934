"""Exception hierarchy shared by every stage of the construction."""


class BrambleError(Exception):
    """Base class for all errors raised by this package."""


class GraphFormatError(BrambleError, ValueError):
    pass


class EmptySet(BrambleError, ValueError):
    pass


class NotOpenWalk(BrambleError, ValueError):
    pass


class InvalidWalk(BrambleError, ValueError):
    pass


class SizeMismatch(BrambleError, ValueError):
    pass


class TooLargeForExhaustive(BrambleError):
    pass


class NoLinkage(BrambleError):
    def __init__(self, i, j=None, direction="forward"):
        # a single argument is a ready-made message (used when re-raising with context)
        msg = i if j is None else f"no {direction} linkage of full size for pair ({i}, {j})"
        super().__init__(msg)
        self.i, self.j, self.direction = i, j, direction


class SizeTooSmall(BrambleError, ValueError):
    pass


class TooSparse(BrambleError):
    pass


class HypothesisUnmet(BrambleError):
    pass


class ConstructionGap(BrambleError):
    """A step that the construction guarantees in theory failed to materialise.

    Raised instead of silently returning a weaker object; the CLI maps it to
    exit code 3.
    """


class InvariantBreach(ConstructionGap):
    """An output failed its own postcondition checker."""


class BudgetExhausted(BrambleError):
    pass


class NoTransversal(BrambleError):
    """Exhaustive search proved that no independent transversal exists."""


class PreconditionUnmet(BrambleError):
    pass


class DegenerateOutcome(BrambleError):
    pass


class KTooSmall(BrambleError, ValueError):
    pass


class ClassificationCorrupt(BrambleError):
    pass


class ParamsMismatch(BrambleError, ValueError):
    pass

