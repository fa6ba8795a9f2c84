"""
Exception hierarchy for the assessment engine.

Services raise these; the CLI maps them to exit codes:
  1 -> domain / validation failure
  2 -> I/O or schema failure
"""

EXIT_DOMAIN = 1
EXIT_SCHEMA = 2


class AssessmentError(ValueError):
    """Base class for all domain errors."""

    exit_code = EXIT_DOMAIN


class SchemaError(AssessmentError):
    """Document does not match the expected schema."""

    exit_code = EXIT_SCHEMA

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class MalformedIdError(AssessmentError):
    pass


class UnknownQuestionError(AssessmentError):
    def __init__(self, question_id: str, context: str = ""):
        self.question_id = question_id
        suffix = f" ({context})" if context else ""
        super().__init__(f"Unknown question id: {question_id}{suffix}")


class EncodingMismatchError(AssessmentError):
    def __init__(self, question_id: str, message: str):
        self.question_id = question_id
        super().__init__(f"{question_id}: {message}")


class OutOfRangePercentError(AssessmentError):
    pass


class MixedOrganizationError(AssessmentError):
    pass


class EmptyInputError(AssessmentError):
    pass


class InsufficientRespondentsError(AssessmentError):
    pass


class SingleItemConstructError(AssessmentError):
    pass


class ZeroVarianceError(AssessmentError):
    pass


class NotSymmetricError(AssessmentError):
    pass


class NoConvergenceError(AssessmentError):
    pass


class TargetOutOfRangeError(AssessmentError):
    pass
