"""Exception types shared across the package."""


class CredScoreError(Exception):
    """Base class for all package errors."""


# --- record parsing / sources ---

class MalformedRecord(CredScoreError):
    pass


class MissingRequiredField(MalformedRecord):
    pass


class NotFound(CredScoreError):
    pass


class SourceUnavailable(CredScoreError):
    pass


# --- features / scaling ---

class SchemaMismatch(CredScoreError):
    pass


class InsufficientData(CredScoreError):
    pass


# --- labeling ---

class WrongArity(CredScoreError):
    pass


class SkipLabel(CredScoreError):
    pass


class MissingCredibilityLabel(CredScoreError):
    pass


# --- ranking ---

class InvalidCutoff(CredScoreError):
    pass


class NoPairs(CredScoreError):
    pass


# --- model artifact ---

class UnsupportedVersion(CredScoreError):
    pass


class SchemaHashMismatch(CredScoreError):
    pass


# --- service / analytics ---

class ValidationError(CredScoreError):
    pass


class EmptyFeedback(CredScoreError):
    pass


class EmptyData(CredScoreError):
    pass


class EmptySubset(CredScoreError):
    pass
