"""Ratings, pass thresholds, maturity level and respondent aggregation."""
import pytest

from domain.errors import (
    EmptyInputError,
    EncodingMismatchError,
    MixedOrganizationError,
    OutOfRangePercentError,
    UnknownQuestionError,
)
from domain.ids import parse_question_id
from domain.models import Answer, AnswerKind, BlankPolicy, Encoding, PerformanceRating, ResponseSet, ScalePoint
from services.scoring_service import (
    aggregate_respondents,
    lower_median,
    pass_threshold,
    rate_answer,
    rate_percent,
    rate_scale_point,
    score_assessment,
)
from tests.conftest import build_responses, with_answer


def _agreed(result):
    return [score.n_agreed for score in result.per_level]


# ============================================================
# Rating rules
# ============================================================

@pytest.mark.parametrize(
    "point, rating",
    [
        (ScalePoint.COMPLETE_AGREE, 4),
        (ScalePoint.LARGELY_AGREE, 3),
        (ScalePoint.PARTIALLY_AGREE, 2),
        (ScalePoint.NOT_AGREE, 1),
        (ScalePoint.DOESNT_APPLY, 4),
    ],
)
def test_scale_points(point, rating):
    assert rate_scale_point(point) == rating


@pytest.mark.parametrize(
    "pct, rating",
    [
        (100, 4),
        (80, 4),
        (79.99, 3),
        (66.7, 3),
        (66.69, 2),
        (50, 2),
        (33.3, 2),
        (33.2, 1),
        (0, 1),
    ],
)
def test_percent_bands(pct, rating):
    assert rate_percent(pct) == rating


@pytest.mark.parametrize("pct", [-0.01, 100.01, float("nan"), float("inf")])
def test_percent_out_of_range(pct):
    with pytest.raises(OutOfRangePercentError):
        rate_percent(pct)


def test_agreement_boundary():
    assert not PerformanceRating.PARTIALLY_AGREE.agreed
    assert PerformanceRating.LARGELY_AGREE.agreed


def test_blank_policies():
    blank = Answer(question="Q.1.1.1.1", kind=AnswerKind.BLANK)
    assert rate_answer(blank, BlankPolicy.RATE_AS_1) == PerformanceRating.NOT_AGREE
    assert rate_answer(blank, BlankPolicy.EXCLUDE) is None


@pytest.mark.parametrize(
    "kind, raw",
    [
        (AnswerKind.VALUE, 5),
        (AnswerKind.VALUE, 0),
        (AnswerKind.VALUE, 2.5),
        (AnswerKind.SCALE, 6),
        (AnswerKind.SCALE, 0),
    ],
)
def test_out_of_range_values(kind, raw):
    with pytest.raises(EncodingMismatchError):
        rate_answer(Answer(question="Q.1.1.1.1", kind=kind, raw=raw))


def test_kind_must_match_encoding():
    answer = Answer(question="Q.1.1.1.1", kind=AnswerKind.SCALE, raw=5)
    with pytest.raises(EncodingMismatchError) as excinfo:
        rate_answer(answer, encoding=Encoding.VALUE)
    assert "Q.1.1.1.1" in str(excinfo.value)


# ============================================================
# Pass threshold
# ============================================================

def test_rating_threshold_table():
    assert [pass_threshold(n, 0.8) for n in (12, 18, 22, 23, 18)] == [10, 14, 18, 18, 14]


@pytest.mark.parametrize("n, fraction, expected", [(0, 0.8, 0), (1, 0.5, 1), (3, 0.5, 2), (5, 0.5, 3), (7, 1.0, 7)])
def test_threshold_rounds_half_up(n, fraction, expected):
    assert pass_threshold(n, fraction) == expected


# ============================================================
# Case studies
# ============================================================

def test_case_study_a(model, org_a):
    result = score_assessment(model, org_a)
    assert _agreed(result) == [0, 16, 19, 10, 4]
    assert [s.pass_threshold for s in result.per_level] == [10, 14, 18, 18, 14]
    assert [s.passed for s in result.per_level] == [False, True, True, False, False]
    assert result.bml == 3
    assert result.per_question_ratings["Q.1.1.1.1"] == 1
    assert len(result.per_question_ratings) == 93


def test_case_study_b(model, org_b):
    assert org_b.provenance
    result = score_assessment(model, org_b)
    assert _agreed(result) == [0, 0, 22, 21, 9]
    assert result.bml == 4
    assert model.level_label(result.bml) == 'level-4 "Proactive"'


def test_bml_is_highest_passed_level_not_contiguous_run(model):
    # only level 5 agreed
    responses = build_responses(model, lambda q: 4 if q.level == 5 else 1)
    assert score_assessment(model, responses).bml == 5


def test_nothing_passes(model):
    result = score_assessment(model, build_responses(model, lambda q: 2))
    assert result.bml == 0
    assert model.level_label(result.bml) == "level-0 (no level achieved)"


def test_practice_profile(model, org_a):
    result = score_assessment(model, org_a)
    level4_mo = next(p for p in result.per_practice_profile if p.level == 4 and p.abbrev == "MO")
    assert (level4_mo.agreed, level4_mo.total) == (2, 5)
    assert sum(p.total for p in result.per_practice_profile) == 93


def test_scale_encoding_doesnt_apply_counts_as_agreed(model):
    responses = build_responses(model, lambda q: 1, encoding=Encoding.SCALE)
    result = score_assessment(model, responses)
    assert _agreed(result) == [12, 18, 22, 23, 18]
    assert result.bml == 5


def test_percent_encoding(model):
    responses = build_responses(model, lambda q: 66.7 if q.level <= 2 else 66.6, encoding=Encoding.PERCENT)
    result = score_assessment(model, responses)
    assert _agreed(result) == [12, 18, 0, 0, 0]
    assert result.bml == 2


# ============================================================
# Blanks
# ============================================================

def test_all_blank_rates_as_one(model):
    empty = ResponseSet(respondent="r", organization="X", encoding=Encoding.VALUE)
    result = score_assessment(model, empty)
    assert _agreed(result) == [0, 0, 0, 0, 0]
    assert set(result.per_question_ratings.values()) == {1}


def test_exclude_policy_shrinks_level(model):
    # level 1: 10 agreed, 2 blank -> N=10, PT=8 passes under exclude; 10 of 12 also passes PT=10
    # level 2: 13 agreed, 5 blank -> rate-as-1 fails (13 < 14), exclude passes (13 >= round(10.4)=10)
    def value(q):
        if q.level == 1:
            return None if q.practice == 2 else 4
        if q.level == 2:
            return None if q.practice in (1, 5) else 4
        return 1

    responses = build_responses(model, value)
    strict = score_assessment(model, responses, BlankPolicy.RATE_AS_1)
    lenient = score_assessment(model, responses, BlankPolicy.EXCLUDE)
    assert strict.level_score(2).n_questions == 18
    assert not strict.level_score(2).passed
    assert lenient.level_score(2).n_questions == 13
    assert lenient.level_score(2).pass_threshold == 10
    assert lenient.level_score(2).passed
    assert "Q.1.2.1.1" not in lenient.per_question_ratings
    assert lenient.blank_policy == BlankPolicy.EXCLUDE


def test_fully_excluded_level_does_not_pass(model):
    responses = build_responses(model, lambda q: None if q.level in (1, 5) else 1)
    result = score_assessment(model, responses, BlankPolicy.EXCLUDE)
    assert result.level_score(5).n_questions == 0
    assert result.level_score(5).pass_threshold == 0
    assert not result.level_score(5).passed
    assert result.bml == 0


def test_nearly_empty_response_under_exclude(model):
    # only eight level-2 statements answered, all agreed
    answered = {str(q.id) for q in model.level(2).questions[:8]}
    responses = build_responses(model, lambda q: 4 if str(q) in answered else None)
    result = score_assessment(model, responses, BlankPolicy.EXCLUDE)
    assert _agreed(result) == [0, 8, 0, 0, 0]
    assert [s.passed for s in result.per_level] == [False, True, False, False, False]
    assert result.bml == 2


def test_unknown_question_rejected(model, org_a):
    answers = dict(org_a.answers)
    answers["Q.9.9.9.9"] = Answer(question="Q.9.9.9.9", kind=AnswerKind.VALUE, raw=3)
    with pytest.raises(UnknownQuestionError) as excinfo:
        score_assessment(model, org_a.model_copy(update={"answers": answers}))
    assert "Q.9.9.9.9" in str(excinfo.value)


# ============================================================
# Aggregation
# ============================================================

def test_lower_median():
    assert lower_median([3, 1]) == 1
    assert lower_median([4, 1, 3]) == 3
    assert lower_median([2, 4, 1, 3]) == 2


def test_aggregate_two_respondents(model):
    first = build_responses(model, lambda q: 3, respondent="r1")
    second = with_answer(build_responses(model, lambda q: 3, respondent="r2"), "Q.1.1.1.1", 1)
    combined = aggregate_respondents(model, [first, second])
    assert combined.answers["Q.1.1.1.1"].raw == 1
    assert combined.answers["Q.1.1.2.1"].raw == 3
    assert combined.respondent == "r1+r2"
    assert combined.encoding == Encoding.VALUE


def test_aggregate_counts_individual_blanks_as_one(model):
    first = with_answer(build_responses(model, lambda q: 4, respondent="r1"), "Q.1.1.1.1", None)
    second = build_responses(model, lambda q: 4, respondent="r2")
    combined = aggregate_respondents(model, [first, second])
    # blank rates 1 -> lower median of {1, 4}
    assert combined.answers["Q.1.1.1.1"].raw == 1
    assert score_assessment(model, combined).level_score(1).n_agreed == 11


def test_aggregate_exclude_policy_skips_individual_blanks(model):
    first = with_answer(build_responses(model, lambda q: 4, respondent="r1"), "Q.1.1.1.1", None)
    second = build_responses(model, lambda q: 4, respondent="r2")
    combined = aggregate_respondents(model, [first, second], BlankPolicy.EXCLUDE)
    assert combined.answers["Q.1.1.1.1"].raw == 4


def test_aggregate_missing_key_counts_as_blank(model):
    first = build_responses(model, lambda q: None if str(q) == "Q.1.1.1.1" else 4, respondent="r1")
    second = build_responses(model, lambda q: 4, respondent="r2")
    combined = aggregate_respondents(model, [first, second])
    assert combined.answers["Q.1.1.1.1"].raw == 1


def test_aggregate_all_blank_stays_blank(model):
    first = with_answer(build_responses(model, lambda q: 4, respondent="r1"), "Q.1.1.1.1", None)
    second = with_answer(build_responses(model, lambda q: 4, respondent="r2"), "Q.1.1.1.1", None)
    combined = aggregate_respondents(model, [first, second])
    assert "Q.1.1.1.1" not in combined.answers


def test_aggregate_mixed_encodings(model):
    scale = build_responses(model, lambda q: 1, respondent="r1", encoding=Encoding.SCALE)
    value = build_responses(model, lambda q: 2, respondent="r2")
    combined = aggregate_respondents(model, [scale, value])
    # scale 1 rates 4, value 2 rates 2 -> lower median 2
    assert combined.answers["Q.1.1.1.1"].raw == 2


def test_aggregate_errors(model):
    with pytest.raises(EmptyInputError):
        aggregate_respondents(model, [])
    a = build_responses(model, lambda q: 3, organization="A")
    b = build_responses(model, lambda q: 3, organization="B")
    with pytest.raises(MixedOrganizationError):
        aggregate_respondents(model, [a, b])


def test_single_set_aggregation_preserves_score(model, org_a):
    combined = aggregate_respondents(model, [org_a])
    assert score_assessment(model, combined).per_level == score_assessment(model, org_a).per_level


def test_answer_question_parsed():
    answer = Answer(question="Q.1.2.3.1", kind=AnswerKind.VALUE, raw=3)
    assert answer.question == parse_question_id("Q.1.2.3.1")
