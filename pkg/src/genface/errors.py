"""Exception hierarchy shared across the toolkit.

Every error carries a stable ``code`` used by the CLI and the HTTP API when
emitting machine-readable error payloads.
"""

from __future__ import annotations


class GenfaceError(Exception):
    """Base class for all domain errors."""

    code = "E_INTERNAL"

    def to_dict(self) -> dict:
        return {"error": self.code, "detail": str(self)}


# --- svg-model -------------------------------------------------------------

class MalformedSvg(GenfaceError):
    code = "E_MALFORMED_SVG"


class DuplicateId(GenfaceError):
    code = "E_DUPLICATE_ID"


class UnsupportedGeometry(GenfaceError):
    code = "E_UNSUPPORTED_GEOMETRY"


class InvalidTemplate(GenfaceError):
    """Template invariant violation (id pattern, canvas bounds, palette)."""

    code = "E_INVALID_TEMPLATE"


# --- rulebook ---------------------------------------------------------------

class UnknownElement(GenfaceError):
    code = "E_UNKNOWN_ELEMENT"


class TagCollision(GenfaceError):
    """Custom tag name collides with a preset tag."""

    code = "E_TAG_COLLISION"


class TagInUse(GenfaceError):
    """Tag already applied to a different element (placeholders are 1:1)."""

    code = "E_TAG_IN_USE"


class UnknownFactorReference(GenfaceError):
    code = "E_UNKNOWN_FACTOR_REFERENCE"


class DuplicateFactor(GenfaceError):
    code = "E_DUPLICATE_FACTOR"


class EmptyRuleText(GenfaceError):
    code = "E_EMPTY_RULE_TEXT"


class UnknownPhase(GenfaceError):
    code = "E_UNKNOWN_PHASE"


class ImmutableRule(GenfaceError):
    """System-default rules are injected by tagging, never edited directly."""

    code = "E_IMMUTABLE_RULE"


# --- prompt-assembler -------------------------------------------------------

class UntaggedElement(GenfaceError):
    code = "E_UNTAGGED_ELEMENT"


class EmptyTemplate(GenfaceError):
    code = "E_EMPTY_TEMPLATE"


class UnknownFactor(GenfaceError):
    """Context input key is not a declared factor for the phase."""

    code = "E_UNKNOWN_FACTOR"


class NoBaseSelected(GenfaceError):
    code = "E_NO_BASE_SELECTED"


# --- generation-pipeline ----------------------------------------------------

class NoSvgFound(GenfaceError):
    code = "E_NOT_SVG"


class ProviderError(GenfaceError):
    code = "E_PROVIDER"
    retryable = False


class ProviderTimeout(ProviderError):
    code = "E_PROVIDER_TIMEOUT"
    retryable = True


class ProviderRefusal(ProviderError):
    code = "E_PROVIDER_REFUSAL"
    retryable = False


class TransportError(ProviderError):
    code = "E_TRANSPORT"
    retryable = True


class UnknownResult(GenfaceError):
    code = "E_UNKNOWN_RESULT"


class InvalidBase(GenfaceError):
    code = "E_INVALID_BASE"


# --- project-store ----------------------------------------------------------

class NotFound(GenfaceError):
    code = "E_NOT_FOUND"


class SchemaTooNew(GenfaceError):
    code = "E_SCHEMA_TOO_NEW"


class CorruptFile(GenfaceError):
    code = "E_CORRUPT_FILE"


# --- service ----------------------------------------------------------------

class UnknownToken(GenfaceError):
    code = "E_UNKNOWN_TOKEN"


class StaleRevision(GenfaceError):
    code = "E_STALE_REVISION"
