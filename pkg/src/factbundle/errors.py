"""Exception types shared across the toolkit.

Every error raised by factbundle derives from FactBundleError so callers can
catch toolkit failures with a single except clause. Wire-format problems are
always MalformedBundle: a parse failure is indistinguishable from tampering
and is treated as such by the verifier.
"""


class FactBundleError(Exception):
    """Base class for all factbundle errors."""


# --- provenance graph construction ---

class CycleDetected(FactBundleError):
    """The edge set induces a cycle; provenance graphs must be acyclic."""


class DanglingEdge(FactBundleError):
    """An edge endpoint names a node id that does not exist in the graph."""


class DuplicateId(FactBundleError):
    """Two nodes in one graph share an id."""


# --- constraint encoding / evaluation ---

class UnresolvableSubject(FactBundleError):
    """A constraint references a node id missing from the evaluation context.

    Signals a malformed or tampered bundle when raised during verification.
    """


# --- Merkle commitment ---

class EmptyLeafSet(FactBundleError):
    """A Merkle tree needs at least one leaf."""


class IndexOutOfRange(FactBundleError):
    """A leaf or coordinate index is outside the valid range."""


# --- bundle assembly and parsing ---

class ConstraintViolationAtBuild(FactBundleError):
    """The builder's own data fails its coherency constraints; refuse to sign."""


class SigningFailure(FactBundleError):
    """The signing primitive failed."""


class KTooLarge(FactBundleError):
    """More distinct query indices requested than the universe contains."""


class MalformedBundle(FactBundleError):
    """Bundle bytes are truncated, mis-framed, or carry bad magic/version."""


# --- verification policy ---

class DomainError(FactBundleError):
    """A policy parameter is outside its mathematical domain."""


# --- adversarial query simulation ---

class InvalidParams(FactBundleError):
    """World parameters are inconsistent (hidden set too small, too many pairs)."""


class BudgetExhausted(FactBundleError):
    """The search cap was reached before the target advantage was achieved."""


# --- cost accounting ---

class EmptyClaimSet(FactBundleError):
    """Cost accounting needs at least one claim."""


class ZeroHomeCost(FactBundleError):
    """The asymmetry ratio needs a positive home-population cost."""


class UnknownScenario(FactBundleError):
    """The requested case-study scenario is not one of the shipped scripts."""
