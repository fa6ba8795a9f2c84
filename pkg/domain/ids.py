"""
Identifier grammar for business practices and questions.

    BP.{dimension}.{level}.{practice}
    Q.{dimension}.{level}.{practice}.{question}

All fields are positive integers without leading zeros. Whitespace is not tolerated.
"""
import re
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field

from domain.errors import MalformedIdError

_FIELD = r"([1-9][0-9]*)"
_PRACTICE_RE = re.compile(r"BP\." + r"\.".join([_FIELD] * 3))
_QUESTION_RE = re.compile(r"Q\." + r"\.".join([_FIELD] * 4))


class PracticeId(BaseModel):
    """Business practice at one maturity level."""

    model_config = ConfigDict(frozen=True)

    dimension: int = Field(..., ge=1)
    level: int = Field(..., ge=1)
    practice: int = Field(..., ge=1)

    def __str__(self) -> str:
        return f"BP.{self.dimension}.{self.level}.{self.practice}"

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        return (self.level, self.dimension, self.practice)


class QuestionId(BaseModel):
    model_config = ConfigDict(frozen=True)

    dimension: int = Field(..., ge=1)
    level: int = Field(..., ge=1)
    practice: int = Field(..., ge=1)
    question: int = Field(..., ge=1)

    def __str__(self) -> str:
        return f"Q.{self.dimension}.{self.level}.{self.practice}.{self.question}"

    @property
    def practice_id(self) -> PracticeId:
        return PracticeId(dimension=self.dimension, level=self.level, practice=self.practice)

    @property
    def sort_key(self) -> Tuple[int, int, int, int]:
        """Canonical order: level, dimension, practice, question."""
        return (self.level, self.dimension, self.practice, self.question)

    def display(self) -> str:
        """Tabular form used in the published result tables, e.g. 'Q 1.1.1.1'."""
        return f"Q {self.dimension}.{self.level}.{self.practice}.{self.question}"


def parse_practice_id(s: str) -> PracticeId:
    """Parse 'BP.d.l.p'. Raises MalformedIdError on any deviation from the grammar."""
    if not isinstance(s, str):
        raise MalformedIdError(f"Practice id must be a string, got {type(s).__name__}")
    match = _PRACTICE_RE.fullmatch(s)
    if not match:
        raise MalformedIdError(f"Malformed practice id: {s!r}")
    dimension, level, practice = (int(g) for g in match.groups())
    return PracticeId(dimension=dimension, level=level, practice=practice)


def parse_question_id(s: str) -> QuestionId:
    """Parse 'Q.d.l.p.q'. Raises MalformedIdError on any deviation from the grammar."""
    if not isinstance(s, str):
        raise MalformedIdError(f"Question id must be a string, got {type(s).__name__}")
    match = _QUESTION_RE.fullmatch(s)
    if not match:
        raise MalformedIdError(f"Malformed question id: {s!r}")
    dimension, level, practice, question = (int(g) for g in match.groups())
    return QuestionId(dimension=dimension, level=level, practice=practice, question=question)
