"""Exception hierarchy shared by all betashift modules."""


class BetaShiftError(Exception):
    """Base class for every error raised by this package."""


class AmbiguousDigit(BetaShiftError):
    """A greedy digit could not be certified (point sits on or near a cutpoint)."""


class PrecisionExhausted(BetaShiftError):
    """A sign or bound could not be resolved at the maximum allowed precision."""


class FinitenessUndecided(BetaShiftError):
    """Could not certify whether d(1, beta) terminates within the prefix budget."""


class ComparisonUndecided(BetaShiftError):
    """Two digit streams agree beyond the comparison budget."""


class NotParryAdmissible(BetaShiftError):
    """The digit sequence fails the strict-shift (Parry) condition."""


class NotAdmissible(BetaShiftError):
    """The word is not in the language of the beta-shift."""


class NotFound(BetaShiftError):
    """A searched-for witness does not exist within the given budget."""


class CoverTooLarge(BetaShiftError):
    """Cover enumeration exceeded the configured word cap."""


class NotConcatenable(BetaShiftError):
    """Blocks cannot be concatenated without leaving the beta-shift."""


class IllegalMove(BetaShiftError):
    """A Schmidt-game move violates containment or the length ratio.

    ``reason`` is a short machine-readable code, ``move`` the offending move.
    """

    def __init__(self, reason, move=None, detail=""):
        self.reason = reason
        self.move = move
        self.detail = detail
        msg = reason if not detail else f"{reason}: {detail}"
        super().__init__(msg)
