"""Exception hierarchy for the produkt toolkit.

Every contract violation raises a subclass of ProduktError so callers can
catch toolkit errors without swallowing programming mistakes.
"""


class ProduktError(Exception):
    """Base class for all toolkit errors."""


# --- group construction ---

class NotSimpleParameters(ProduktError):
    """Parameters name a group that is not simple (e.g. A4, PSL2(3))."""


class NotPrimePower(ProduktError):
    """Field size is not a prime power, or no irreducible polynomial is known."""


class TooLarge(ProduktError):
    """Group order exceeds the configured cap."""


class IndexOutOfRange(ProduktError, IndexError):
    """Element index outside 0..|G|-1."""


class WrongFamily(ProduktError):
    """Operation only defined for another group family."""


class ParseError(ProduktError, ValueError):
    """Malformed spec string, element literal or subset literal."""


# --- subset engine ---

class ContextMismatch(ProduktError):
    """Operands live over different group contexts."""


class EmptySet(ProduktError):
    """Operation requires a nonempty subset."""


class IdentityMissing(ProduktError):
    """Operation requires the identity to be a member."""


class TooSmall(ProduktError):
    """Subset has fewer members than the operation requires."""


# --- growth lab ---

class NotGenerating(ProduktError):
    """Input set does not generate the whole group."""


class StepLimitExceeded(ProduktError):
    """Iteration hit its step cap; carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class GrowthStall(ProduktError):
    """A product-set step failed to grow strictly; soundness alarm."""


class NoNonSaturatedSteps(ProduktError):
    """Trace has no step usable for a growth-exponent estimate."""


class BadDensity(ProduktError):
    """Density outside (0, 1]."""


class IdentityElement(ProduktError):
    """Operation requires a non-identity element."""


class BudgetExhausted(ProduktError):
    """Seeded search ran out of budget; soundness alarm."""


# --- decomposer ---

class CapExceeded(ProduktError):
    """Search hit its conjugator cap; carries the partial decomposition."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InstanceTooLarge(ProduktError):
    """Exact oracle called beyond its configured size limits."""


class Incomplete(ProduktError):
    """Decomposition does not multiply out to the whole group."""


class NotNormal(ProduktError):
    """Subset is not fixed setwise by conjugation."""


class TrivialSet(ProduktError):
    """Subset is trivial ({} or {1}) where a nontrivial one is required."""


class NotSubgroup(ProduktError):
    """Subset is not closed under product and inverse."""


class TrivialSubgroup(ProduktError):
    """Subgroup has order 1 where a nontrivial one is required."""


class SoundnessAlarm(ProduktError):
    """An invariant that should hold by theory failed on replay."""


# --- constructive pipelines ---

class NotFound(ProduktError):
    """Restricted exhaustive search failed; treated as a soundness alarm."""


class OutOfRange(ProduktError):
    """Numeric argument outside the supported range."""


class NotDoubleTransposition(ProduktError):
    """Element is not a product of two disjoint transpositions."""


class CoverMismatch(ProduktError):
    """Cover does not match the requested degree or target."""


class NotTransvection(ProduktError):
    """Element is not a long root element (rank-1 unipotent)."""


# --- cli / report ---

class DispatchError(ProduktError):
    """Unknown command in an experiment config."""


class UnsupportedFormat(ProduktError):
    """Requested report format is not available."""
