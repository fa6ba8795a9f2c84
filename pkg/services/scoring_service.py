"""
Scoring service - performance ratings, pass thresholds and maturity level.

Rating rules:
    scale point 5/4/3/2 -> rating 4/3/2/1, scale point 1 ("Doesn't Apply") -> 4
    percent >= 80 -> 4, [66.7, 80) -> 3, [33.3, 66.7) -> 2, below -> 1
    a statement is agreed when its rating is >= 3

    NA[J]  = number of agreed statements at level J
    PT[J]  = round-half-up(N[J] * pass_fraction)
    BML    = max{J | NA[J] >= PT[J]}, 0 when no level passes
    a level left with no rated questions (all blank under exclude) does not pass
"""
import logging
import math
from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from config import cfg
from domain.errors import (
    EmptyInputError,
    EncodingMismatchError,
    MixedOrganizationError,
    OutOfRangePercentError,
    UnknownQuestionError,
)
from domain.models import (
    Answer,
    AnswerKind,
    AssessmentResult,
    BlankPolicy,
    Encoding,
    LevelScore,
    MaturityModel,
    PerformanceRating,
    PracticeProfile,
    ResponseSet,
    ScalePoint,
)

logger = logging.getLogger(__name__)

_SCALE_TO_RATING = {
    ScalePoint.COMPLETE_AGREE: PerformanceRating.COMPLETELY_AGREE,
    ScalePoint.LARGELY_AGREE: PerformanceRating.LARGELY_AGREE,
    ScalePoint.PARTIALLY_AGREE: PerformanceRating.PARTIALLY_AGREE,
    ScalePoint.NOT_AGREE: PerformanceRating.NOT_AGREE,
    # "Doesn't Apply" counts as full agreement
    ScalePoint.DOESNT_APPLY: PerformanceRating.COMPLETELY_AGREE,
}


def default_blank_policy() -> BlankPolicy:
    return BlankPolicy(cfg.scoring.get("default_blank_policy", BlankPolicy.RATE_AS_1.value))


# ============================================================
# Ratings
# ============================================================

def rate_scale_point(point: ScalePoint) -> PerformanceRating:
    return _SCALE_TO_RATING[ScalePoint(point)]


def rate_percent(pct: float) -> PerformanceRating:
    """Map an extent-of-agreement percentage onto the 1..4 rating using half-open bands."""
    if not isinstance(pct, (int, float)) or not math.isfinite(pct) or not 0 <= pct <= 100:
        raise OutOfRangePercentError(f"Percent {pct!r} outside [0, 100]")
    for band in cfg.scoring["percent_bands"]:
        if pct >= band["min"]:
            return PerformanceRating(band["rating"])
    return PerformanceRating.NOT_AGREE


def rate_answer(
    answer: Answer,
    policy: BlankPolicy = BlankPolicy.RATE_AS_1,
    encoding: Optional[Encoding] = None,
) -> Optional[PerformanceRating]:
    """
    Rate one answer.

    Blank answers rate NOT_AGREE under rate-as-1 and None under exclude.
    When `encoding` is given, a non-blank answer of another kind raises EncodingMismatchError.
    """
    if answer.is_blank:
        return None if policy == BlankPolicy.EXCLUDE else PerformanceRating.NOT_AGREE

    if encoding is not None and answer.kind.value != Encoding(encoding).value:
        raise EncodingMismatchError(
            str(answer.question), f"{answer.kind.value} answer in a {Encoding(encoding).value} response set"
        )

    raw = answer.raw
    if answer.kind == AnswerKind.PERCENT:
        return rate_percent(raw)
    if raw is None or not math.isfinite(raw) or raw != int(raw):
        raise EncodingMismatchError(str(answer.question), f"{answer.kind.value} answer {raw!r} is not an integer")
    if answer.kind == AnswerKind.SCALE:
        if not 1 <= raw <= 5:
            raise EncodingMismatchError(str(answer.question), f"scale point {raw:g} outside 1..5")
        return rate_scale_point(ScalePoint(int(raw)))
    if not 1 <= raw <= 4:
        raise EncodingMismatchError(str(answer.question), f"value {raw:g} outside 1..4")
    return PerformanceRating(int(raw))


def pass_threshold(n_questions: int, pass_fraction: float) -> int:
    """round-half-up(n * fraction); exact rational arithmetic so 0.8 * 12 is 9.6, not 9.600000000000001."""
    product = n_questions * Fraction(str(pass_fraction))
    return math.floor(product + Fraction(1, 2))


# ============================================================
# Assessment
# ============================================================

def check_responses(model: MaturityModel, responses: ResponseSet) -> None:
    """Reject answers to questions the model does not define."""
    known = model.question_map()
    for key in responses.answers:
        if key not in known:
            raise UnknownQuestionError(key, f"respondent {responses.respondent}")


def score_assessment(
    model: MaturityModel,
    responses: ResponseSet,
    policy: Optional[BlankPolicy] = None,
) -> AssessmentResult:
    """Rate every model question, count agreement per level and derive the maturity level."""
    policy = policy or default_blank_policy()
    check_responses(model, responses)

    ratings: Dict[str, int] = {}
    per_level: List[LevelScore] = []
    profile: List[PracticeProfile] = []

    for level in sorted(model.levels, key=lambda lv: lv.index):
        n_questions = 0
        n_agreed = 0
        by_practice: Dict[int, List[int]] = defaultdict(lambda: [0, 0])

        for question in level.questions:
            key = str(question.id)
            answer = responses.answers.get(key) or Answer(question=question.id, kind=AnswerKind.BLANK)
            rating = rate_answer(answer, policy, responses.encoding)
            if rating is None:
                continue
            ratings[key] = int(rating)
            n_questions += 1
            cell = by_practice[question.id.practice]
            cell[1] += 1
            if rating.agreed:
                n_agreed += 1
                cell[0] += 1

        threshold = pass_threshold(n_questions, model.pass_fraction)
        per_level.append(
            LevelScore(
                level=level.index,
                n_questions=n_questions,
                n_agreed=n_agreed,
                pass_threshold=threshold,
                passed=n_questions > 0 and n_agreed >= threshold,
            )
        )
        for practice_id in sorted(by_practice):
            agreed, total = by_practice[practice_id]
            profile.append(
                PracticeProfile(
                    level=level.index,
                    practice=practice_id,
                    abbrev=_abbrev(model, practice_id),
                    agreed=agreed,
                    total=total,
                )
            )

    bml = max((score.level for score in per_level if score.passed), default=0)

    logger.info(
        f"Scored {responses.organization}/{responses.respondent}: "
        f"NA={[s.n_agreed for s in per_level]}, BML={bml}"
    )

    return AssessmentResult(
        organization=responses.organization,
        respondent=responses.respondent,
        blank_policy=policy,
        per_level=per_level,
        bml=bml,
        per_question_ratings=ratings,
        per_practice_profile=profile,
    )


def _abbrev(model: MaturityModel, practice_id: int) -> str:
    try:
        return model.practice(practice_id).abbrev
    except KeyError:
        return str(practice_id)


# ============================================================
# Multi-respondent aggregation
# ============================================================

def lower_median(values: Sequence[int]) -> int:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def aggregate_respondents(
    model: MaturityModel,
    response_sets: Sequence[ResponseSet],
    policy: Optional[BlankPolicy] = None,
) -> ResponseSet:
    """
    Combine one organization's respondents into a single value-encoded response set.

    Per question: lower median of the rated answers. Under rate-as-1 a blank answer
    joins the median as 1; under exclude it is left out. Blank only when every
    respondent left the question blank.
    """
    if not response_sets:
        raise EmptyInputError("No response sets to aggregate")
    organizations = sorted({rs.organization for rs in response_sets})
    if len(organizations) > 1:
        raise MixedOrganizationError(f"Response sets span several organizations: {', '.join(organizations)}")

    policy = policy or default_blank_policy()
    for rs in response_sets:
        check_responses(model, rs)

    answers: Dict[str, Answer] = {}
    for question in model.questions():
        key = str(question.id)
        given = [(rs.answers.get(key), rs.encoding) for rs in response_sets]
        if all(answer is None or answer.is_blank for answer, _ in given):
            continue
        values = []
        for answer, encoding in given:
            answer = answer or Answer(question=question.id, kind=AnswerKind.BLANK)
            rating = rate_answer(answer, policy, encoding)
            if rating is not None:
                values.append(int(rating))
        if values:
            answers[key] = Answer(question=question.id, kind=AnswerKind.VALUE, raw=lower_median(values))

    logger.info(
        f"Aggregated {len(response_sets)} respondent(s) for {organizations[0]}: "
        f"{len(answers)}/{model.question_count} questions answered"
    )

    return ResponseSet(
        respondent="+".join(rs.respondent for rs in response_sets),
        organization=organizations[0],
        encoding=Encoding.VALUE,
        answers=answers,
    )
