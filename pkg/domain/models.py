"""
Centralized Pydantic models for the assessment engine.

Ids travel as canonical strings ("BP.1.2.3", "Q.1.2.3.4") in every document and
are parsed into PracticeId / QuestionId on load.
"""
from enum import Enum, IntEnum
from typing import Annotated, Dict, List, Optional

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    model_validator,
)

from domain.ids import PracticeId, QuestionId, parse_practice_id, parse_question_id


def _coerce_question_id(value):
    return parse_question_id(value) if isinstance(value, str) else value


def _coerce_practice_id(value):
    return parse_practice_id(value) if isinstance(value, str) else value


QuestionRef = Annotated[
    QuestionId,
    BeforeValidator(_coerce_question_id),
    PlainSerializer(str, return_type=str),
]
PracticeRef = Annotated[
    PracticeId,
    BeforeValidator(_coerce_practice_id),
    PlainSerializer(str, return_type=str),
]


# ============================================================
# Maturity model
# ============================================================

class Dimension(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    name: str


class Practice(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    name: str
    abbrev: str
    dimension: int


class Question(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: QuestionRef
    text: str


class LevelSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    name: str
    description: Optional[str] = None
    # Expected items per practice abbreviation; checked by validate_model when present
    item_counts: Optional[Dict[str, int]] = None
    questions: List[Question] = Field(default_factory=list)

    @property
    def title(self) -> str:
        return self.name.capitalize()


class MaturityModel(BaseModel):
    """Staged instrument: dimensions, practices, levels, questions, pass fraction."""

    model_config = ConfigDict(frozen=True)

    name: str
    pass_fraction: float
    dimensions: List[Dimension]
    practices: List[Practice]
    levels: List[LevelSpec]

    def level(self, index: int) -> LevelSpec:
        for level in self.levels:
            if level.index == index:
                return level
        raise KeyError(f"No level {index} in model {self.name!r}")

    def practice(self, practice_id: int) -> Practice:
        for practice in self.practices:
            if practice.id == practice_id:
                return practice
        raise KeyError(f"No practice {practice_id} in model {self.name!r}")

    def level_label(self, index: int) -> str:
        """'level-3 "Extrapolate"' style label; level 0 means nothing achieved."""
        if index == 0:
            return "level-0 (no level achieved)"
        return f'level-{index} "{self.level(index).title}"'

    @property
    def max_level(self) -> int:
        return max((level.index for level in self.levels), default=0)

    def questions(self) -> List[Question]:
        """All questions in level order, then listing order."""
        return [q for level in self.levels for q in level.questions]

    def question_map(self) -> Dict[str, Question]:
        return {str(q.id): q for q in self.questions()}

    @property
    def question_count(self) -> int:
        return sum(len(level.questions) for level in self.levels)


class Violation(BaseModel):
    """One broken model invariant."""

    code: str
    location: str
    message: str

    def __str__(self) -> str:
        return self.message


# ============================================================
# Responses and scoring
# ============================================================

class ScalePoint(IntEnum):
    """Five-point answer scale offered to respondents."""

    DOESNT_APPLY = 1
    NOT_AGREE = 2
    PARTIALLY_AGREE = 3
    LARGELY_AGREE = 4
    COMPLETE_AGREE = 5


class PerformanceRating(IntEnum):
    NOT_AGREE = 1
    PARTIALLY_AGREE = 2
    LARGELY_AGREE = 3
    COMPLETELY_AGREE = 4

    @property
    def agreed(self) -> bool:
        return self >= PerformanceRating.LARGELY_AGREE


class Encoding(str, Enum):
    SCALE = "scale"
    VALUE = "value"
    PERCENT = "percent"


class AnswerKind(str, Enum):
    SCALE = "scale"
    VALUE = "value"
    PERCENT = "percent"
    BLANK = "blank"


class BlankPolicy(str, Enum):
    RATE_AS_1 = "rate-as-1"
    EXCLUDE = "exclude"


class Answer(BaseModel):
    model_config = ConfigDict(frozen=True)

    question: QuestionRef
    kind: AnswerKind
    raw: Optional[float] = None

    @property
    def is_blank(self) -> bool:
        return self.kind == AnswerKind.BLANK


class ResponseSet(BaseModel):
    """One respondent's answers; absent questions are blanks."""

    respondent: str
    organization: str
    encoding: Encoding
    answers: Dict[str, Answer] = Field(default_factory=dict)
    provenance: Optional[str] = None

    @model_validator(mode="after")
    def _keys_match_answers(self):
        for key, answer in self.answers.items():
            if key != str(answer.question):
                raise ValueError(f"answer key {key} does not match question {answer.question}")
        return self


class LevelScore(BaseModel):
    level: int
    n_questions: int
    n_agreed: int
    pass_threshold: int
    passed: bool


class PracticeProfile(BaseModel):
    level: int
    practice: int
    abbrev: str
    agreed: int
    total: int


class AssessmentResult(BaseModel):
    organization: str
    respondent: str = ""
    blank_policy: BlankPolicy = BlankPolicy.RATE_AS_1
    per_level: List[LevelScore]
    bml: int
    # canonical question id -> rating; blanks dropped under the exclude policy
    per_question_ratings: Dict[str, int]
    per_practice_profile: List[PracticeProfile]

    def level_score(self, level: int) -> LevelScore:
        for score in self.per_level:
            if score.level == level:
                return score
        raise KeyError(f"No score for level {level}")


# ============================================================
# Psychometrics
# ============================================================

class PilotDataset(BaseModel):
    """Respondents x questions grid of rating values (None = blank)."""

    respondents: List[str]
    questions: List[QuestionRef]
    matrix: List[List[Optional[int]]]
    organizations: Optional[List[str]] = None

    @model_validator(mode="after")
    def _rectangular(self):
        if len(self.matrix) != len(self.respondents):
            raise ValueError(
                f"matrix has {len(self.matrix)} rows for {len(self.respondents)} respondents"
            )
        width = len(self.questions)
        for respondent, row in zip(self.respondents, self.matrix):
            if len(row) != width:
                raise ValueError(f"row {respondent} has {len(row)} cells, expected {width}")
            for value in row:
                if value is not None and not 1 <= value <= 4:
                    raise ValueError(f"row {respondent}: rating {value} outside 1..4")
        if self.organizations is not None and len(self.organizations) != len(self.respondents):
            raise ValueError("organizations must tag every respondent")
        return self


class ScreePoint(BaseModel):
    component: int
    eigenvalue: float


class ConstructStats(BaseModel):
    """Reliability and validity statistics for one practice at one level."""

    level: int
    practice: int
    abbrev: str
    k_items: int
    n_respondents: int = 0
    alpha: Optional[float] = None
    first_eigenvalue: Optional[float] = None
    retained_components: Optional[int] = None
    scree: List[ScreePoint] = Field(default_factory=list)
    reliability: Optional[str] = None
    diagnostic: Optional[str] = None

    @property
    def single_item(self) -> bool:
        return self.k_items == 1

    @property
    def computable(self) -> bool:
        return self.alpha is not None


class MtmmMatrix(BaseModel):
    levels: List[int]
    # None where no item pair contributes
    cells: List[List[Optional[float]]]
    # items left out of every average they touch
    diagnostics: List[str] = Field(default_factory=list)


# ============================================================
# Gap analysis
# ============================================================

class PracticeGap(BaseModel):
    practice_id: PracticeRef
    abbrev: str
    agreed: int
    total: int

    @property
    def ratio(self) -> float:
        return self.agreed / self.total if self.total else 1.0


class GapReport(BaseModel):
    organization: str
    current_bml: int
    target_level: int
    pass_threshold: int
    n_agreed: int
    deficit: int
    weakest_practices: List[PracticeGap]
    flip_candidates: List[QuestionRef]

    @property
    def attainable(self) -> bool:
        return len(self.flip_candidates) >= self.deficit


# ============================================================
# Reporting
# ============================================================

class OutputFormat(str, Enum):
    TEXT = "text"
    MARKDOWN = "markdown"
    CSV = "csv"
    JSON = "json"


class ReportBundle(BaseModel):
    assessment: Optional[AssessmentResult] = None
    constructs: Optional[List[ConstructStats]] = None
    mtmm: Optional[MtmmMatrix] = None
    gap: Optional[GapReport] = None
    format: OutputFormat = OutputFormat.TEXT

    @model_validator(mode="after")
    def _has_section(self):
        if not any(
            section is not None
            for section in (self.assessment, self.constructs, self.mtmm, self.gap)
        ):
            raise ValueError("report bundle needs at least one section")
        return self
