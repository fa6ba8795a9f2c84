"""Shared fixtures: bundled model, case-study response sets, synthetic builders."""
from pathlib import Path
from typing import Callable, Dict, Optional

import pytest

from domain.ids import QuestionId
from domain.models import Answer, AnswerKind, Encoding, MaturityModel, ResponseSet
from services.ingest_service import read_responses
from services.model_service import load_bundled_model

TESTS_DIR = Path(__file__).resolve().parent
FIXTURES = TESTS_DIR / "fixtures"
GOLDEN = TESTS_DIR / "golden"


@pytest.fixture(scope="session")
def model() -> MaturityModel:
    return load_bundled_model()


@pytest.fixture
def org_a() -> ResponseSet:
    return read_responses(FIXTURES / "org_a.json")


@pytest.fixture
def org_b() -> ResponseSet:
    return read_responses(FIXTURES / "org_b.json")


def build_responses(
    model: MaturityModel,
    value_for: Callable[[QuestionId], Optional[float]],
    organization: str = "X",
    respondent: str = "r1",
    encoding: Encoding = Encoding.VALUE,
) -> ResponseSet:
    """One answer per model question; value_for returning None leaves the question out."""
    answers: Dict[str, Answer] = {}
    for question in model.questions():
        raw = value_for(question.id)
        if raw is None:
            continue
        answers[str(question.id)] = Answer(question=question.id, kind=AnswerKind(encoding.value), raw=raw)
    return ResponseSet(respondent=respondent, organization=organization, encoding=encoding, answers=answers)


def with_answer(responses: ResponseSet, question_id: str, raw) -> ResponseSet:
    answers = dict(responses.answers)
    current = answers[question_id]
    kind = AnswerKind.BLANK if raw is None else AnswerKind(responses.encoding.value)
    answers[question_id] = Answer(question=current.question, kind=kind, raw=raw)
    return responses.model_copy(update={"answers": answers})
