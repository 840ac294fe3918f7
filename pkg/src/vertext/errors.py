"""Exception hierarchy shared by all vertext modules."""


class VertextError(Exception):
    """Base class for every error raised by this package."""


# --- transform ---

class EmptyInput(VertextError):
    """Input text is empty or all whitespace."""


class OversizeInput(VertextError):
    """Word longer than 50 chars or sentence longer than 512 words."""


class SpecOutOfRange(VertextError):
    """A vertical index does not point at a word of the sentence."""


class DuplicateIndex(VertextError):
    """The same vertical index was given more than once."""


class MalformedGrid(VertextError):
    """Rendered text cannot have been produced by the grid layout rules."""


# --- select ---

class WordNotInSentence(VertextError):
    """A selected word has no case-insensitive occurrence in the sentence."""


class WrongCardinality(VertextError):
    """The evaluator did not return the requested number of words."""


class KTooLarge(VertextError):
    """Fewer selectable (non-stopword) words exist than requested."""


# --- llm client ---

class ClientError(VertextError):
    """Base class for chat-completion client failures."""


class AuthError(ClientError):
    """Endpoint rejected the API key."""


class RateLimited(ClientError):
    """Endpoint kept rate-limiting after all retries."""


class CompletionTimeout(ClientError):
    """Request exceeded the configured timeout after all retries."""


class MalformedResponse(ClientError):
    """Endpoint response did not follow the chat-completions shape."""


class CassetteMiss(ClientError):
    """Replay mode found no recorded response for the request key."""


# --- datasets ---

class SchemaMismatch(VertextError):
    """Input file does not match the expected per-dataset schema."""


class BadLabel(VertextError):
    """A row carries a label outside the task's label set."""


class EmptyFile(VertextError):
    """Input file contains no data rows."""


class InsufficientLabel(VertextError):
    """A label bucket is too small for the requested stratified draw."""


# --- eval ---

class EmptyRun(VertextError):
    """Metric requested over zero records."""


class SupersetViolation(VertextError):
    """Sweep selections for k+1 do not contain the selections for k."""


class CellAborted(VertextError):
    """More than 20% of a cell's samples failed; the cell is invalid."""


# --- tokshift ---

class ArtifactInvalid(VertextError):
    """Tokenizer artifact is inconsistent (merge result missing from vocab, ...)."""


class UnsupportedTokenizer(VertextError):
    """Artifact describes a non-BPE tokenizer family."""
