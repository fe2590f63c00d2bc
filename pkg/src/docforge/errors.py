"""Exception types shared across the toolkit."""


class DocforgeError(Exception):
    """Base class for every error raised by this package."""


# --- tagged-markup frame grammar ---

class MissingFrameError(DocforgeError):
    """The string does not start with a markup tag."""


class UnknownTagError(DocforgeError):
    """The leading tag is not one of the known markup kinds."""


class MismatchedTagError(DocforgeError):
    """The closing tag is absent or does not match the opening tag."""


class TrailingContentError(DocforgeError):
    """Characters appear outside the framed payload."""


class TagInBodyError(DocforgeError):
    """A markup body contains a framing token."""


# --- converters ---

class NoTableError(DocforgeError):
    """The HTML input contains no table element."""


class UnsupportedSpanError(DocforgeError):
    """A table cell uses rowspan/colspan greater than one."""


class MalformedHtmlError(DocforgeError):
    """Tag soup that cannot be parsed into an element tree."""


class UnbalancedBracesError(DocforgeError):
    """LaTeX input with structurally broken brace nesting."""


class DuplicateKeyError(DocforgeError):
    """Two KIE fields share a key after normalization."""


class NotJsonError(DocforgeError):
    """Input expected to be JSON does not parse."""


class SchemaMismatchError(DocforgeError):
    """JSON parses but does not fit the expected schema."""


# --- synthesizers ---

class InvalidConfigError(DocforgeError):
    """A synthesizer config has empty or inverted ranges."""


class EmptyCorpusError(DocforgeError):
    """The formula template corpus is empty."""


class UnknownTaskError(DocforgeError):
    """No prompt pool exists for the requested task."""


# --- validators ---

class CompilerTimeoutError(DocforgeError):
    """The external compiler exceeded its wall-clock budget."""


# --- cot builder ---

class EmptyQuestionError(DocforgeError):
    """A question template was instantiated with an empty question."""


class ClientError(DocforgeError):
    """The annotation client failed after bounded retries."""


class OversizeContextError(DocforgeError):
    """An annotator reply exceeded the configured size cap."""


class UnclearContextError(DocforgeError):
    """An unclear annotation was passed where a grounded one is required."""


# --- metrics ---

class LengthMismatchError(DocforgeError):
    """Aligned prediction/gold lists have different lengths."""


class GoldUnparseableError(DocforgeError):
    """A gold-side input failed to parse; gold must always be valid."""


class TileOutOfRangeError(DocforgeError):
    """An image tile count falls outside the supported range."""


# --- io ---

class IoError(DocforgeError):
    """A file read or write failed."""
