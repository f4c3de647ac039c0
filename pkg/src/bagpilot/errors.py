"""Exception hierarchy shared by all bagpilot modules.

Every exception derives from BagpilotError. Messages are written to be
self-describing because tool failures are surfaced verbatim to the
calling model/operator.
"""


class BagpilotError(Exception):
    """Base class for all domain errors."""


# --- bag container ---

class NotABag(BagpilotError):
    """File does not start with the bag magic line."""


class Truncated(BagpilotError):
    """A record extends past the end of the file."""


class UnsupportedCompression(BagpilotError):
    """Chunk uses a compression codec other than 'none'."""


class CorruptRecord(BagpilotError):
    """A record is missing a mandatory header field or is malformed."""


class UnsortedInput(BagpilotError):
    """Messages handed to the writer are not time-ordered."""


class UnknownConnection(BagpilotError):
    """A message references a connection id with no connection record."""


class IoFailure(BagpilotError):
    """Underlying file I/O failed."""


# --- message codec ---

class DefinitionError(BagpilotError):
    """Message definition text could not be parsed."""


class UnknownFieldType(DefinitionError):
    """A field uses a primitive type name that does not exist."""


class UnresolvedNestedType(DefinitionError):
    """A field references a message type with no definition block."""


class CyclicType(DefinitionError):
    """Message definitions reference each other in a cycle."""


class ShortPayload(BagpilotError):
    """Payload ended before the schema was fully decoded."""


class TrailingBytes(BagpilotError):
    """Payload has bytes left over after the schema was fully decoded."""


class ShapeMismatch(BagpilotError):
    """Value tree does not match the schema during encoding."""


class NoSuchField(BagpilotError):
    """A field path segment does not exist on the value."""


# --- session / retrieval ---

class PathNotFound(BagpilotError):
    """Requested filesystem path does not exist."""


class NoPathConfigured(BagpilotError):
    """No bag path set; the caller must use set_bag_path first."""


class NoBagsInDirectory(BagpilotError):
    """Directory contains no .bag or .jsonl files."""


class UnknownTopic(BagpilotError):
    """Topic not present in the bag."""


class NoMessageWithinTolerance(BagpilotError):
    """No message close enough to the requested timestamp."""


class InvalidRange(BagpilotError):
    """start_time is after end_time."""


class BadCondition(BagpilotError):
    """Search condition is malformed."""


class FieldNotNumeric(BagpilotError):
    """Ordered comparison requested on a non-numeric field."""


# --- analysis ---

class UnsupportedPoseType(BagpilotError):
    """Topic does not carry a pose-bearing message type."""


class FewerThanTwoPoses(BagpilotError):
    """No poses found in the requested window."""


class NoScanNearTime(BagpilotError):
    """No laser scan close enough to the requested timestamp."""


class NoLogTopic(BagpilotError):
    """Bag has no log topic."""


class NoTfTopic(BagpilotError):
    """Bag has no /tf or /tf_static topic."""


class UnsupportedImageEncoding(BagpilotError):
    """Image topic does not carry pre-compressed image data."""


# --- filtering ---

class SameSourceDest(BagpilotError):
    """Filter source and destination are the same file."""


# --- plotting ---

class EmptySeries(BagpilotError):
    """A requested series has no data points."""


class AmbiguousTopic(BagpilotError):
    """A topic alias matches more than one topic."""


# --- synthesis ---

class InvalidScenario(BagpilotError):
    """Scenario description violates its invariants."""


# --- benchmark harness ---

class UnknownRequiredTool(BagpilotError):
    """Task suite references a tool name the server does not expose."""


class MalformedSuite(BagpilotError):
    """Task suite document does not match the expected shape."""


class AgentTransport(BagpilotError):
    """Agent endpoint could not be reached or misbehaved."""
