"""Exception hierarchy shared across the simulator."""


class ScsimError(Exception):
    """Base class for every error raised by this package."""


# --- dataset ingest ---------------------------------------------------------

class MissingFile(ScsimError):
    pass


class ParseError(ScsimError):
    """Malformed input row or document.

    ``line`` is the 1-based line (CSV) or entry index (JSON) when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownCompanyInEdge(ScsimError):
    pass


class FeatureOutOfRange(ScsimError):
    pass


class DuplicateEdge(ScsimError):
    pass


class SelfEdge(ScsimError):
    pass


# --- lookups ----------------------------------------------------------------

class TimestampOutOfRange(ScsimError):
    pass


class UnknownCompany(ScsimError):
    pass


class EdgeAbsent(ScsimError):
    pass


# --- metrics ----------------------------------------------------------------

class EmptyNodeSet(ScsimError):
    pass


class UnknownMetric(ScsimError):
    pass


# --- query engine -----------------------------------------------------------

class UnknownFeature(ScsimError):
    pass


# --- regression / horizon / explain ----------------------------------------

class UnknownModel(ScsimError):
    pass


class SeriesTooShort(ScsimError):
    pass


class NonFiniteValue(ScsimError):
    pass


class TooFewSamples(ScsimError):
    pass


class DimensionMismatch(ScsimError):
    pass


# --- evaluation -------------------------------------------------------------

class DegenerateChance(ScsimError):
    """Chance agreement is 1 so the agreement coefficient is undefined."""


class InsufficientHistory(ScsimError):
    pass


# --- agent protocol ---------------------------------------------------------

class SchemaViolation(ScsimError):
    """A policy response does not match the stage's required JSON shape."""


class TransportError(ScsimError):
    pass


class PolicyFailure(ScsimError):
    """A policy could not produce a usable stage output.

    The engine catches this, logs it, and lets the agent no-op the turn.
    """

    def __init__(self, company_id: str, stage: str, message: str):
        super().__init__(f"{company_id} stage {stage}: {message}")
        self.company_id = company_id
        self.stage = stage


# --- session service --------------------------------------------------------

class InvalidConfig(ScsimError):
    pass


class UnknownSession(ScsimError):
    pass


class UnknownNode(ScsimError):
    pass


class InvalidReference(ScsimError):
    pass


class NodeNotSimulated(ScsimError):
    pass


class UnknownView(ScsimError):
    pass
