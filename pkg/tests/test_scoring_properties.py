"""Property-based checks of the scoring rules."""
from decimal import ROUND_HALF_UP, Decimal

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from domain.models import Answer, AnswerKind, Encoding, ResponseSet
from services.model_service import load_model, validate_model
from services.scoring_service import rate_percent, score_assessment


@st.composite
def small_models(draw):
    n_levels = draw(st.integers(min_value=1, max_value=4))
    n_practices = draw(st.integers(min_value=1, max_value=3))
    levels = []
    for level in range(1, n_levels + 1):
        questions = []
        for practice in range(1, n_practices + 1):
            for number in range(1, draw(st.integers(min_value=0, max_value=3)) + 1):
                questions.append({"id": f"Q.1.{level}.{practice}.{number}", "text": f"statement {level}.{practice}.{number}"})
        levels.append({"index": level, "name": f"stage{level}", "questions": questions})
    return load_model(
        {
            "name": "generated",
            "pass_fraction": draw(st.sampled_from([0.5, 0.6, 0.75, 0.8, 0.9, 1.0])),
            "dimensions": [{"index": 1, "name": "d"}],
            "practices": [
                {"id": p, "name": f"practice {p}", "abbrev": f"P{p}", "dimension": 1}
                for p in range(1, n_practices + 1)
            ],
            "levels": levels,
        }
    )


@st.composite
def models_with_values(draw):
    model = draw(small_models())
    values = {
        str(q.id): draw(st.one_of(st.none(), st.integers(min_value=1, max_value=4)))
        for q in model.questions()
    }
    return model, values


def _responses(model, values, order=None):
    keys = order or list(values)
    answers = {
        key: Answer(question=key, kind=AnswerKind.VALUE, raw=values[key])
        if values[key] is not None
        else Answer(question=key, kind=AnswerKind.BLANK)
        for key in keys
    }
    return ResponseSet(respondent="r", organization="X", encoding=Encoding.VALUE, answers=answers)


def _brute_force_bml(model, values):
    bml = 0
    for level in model.levels:
        ratings = [values.get(str(q.id)) or 1 for q in level.questions]
        agreed = sum(1 for r in ratings if r >= 3)
        threshold = int((Decimal(len(ratings)) * Decimal(str(model.pass_fraction))).quantize(Decimal(1), rounding=ROUND_HALF_UP))
        if ratings and agreed >= threshold:
            bml = level.index
    return bml


@settings(max_examples=200, deadline=None)
@given(models_with_values())
def test_matches_brute_force(case):
    model, values = case
    assert validate_model(model) == []
    assert score_assessment(model, _responses(model, values)).bml == _brute_force_bml(model, values)


@settings(deadline=None)
@given(models_with_values(), st.randoms(use_true_random=False))
def test_answer_order_is_irrelevant(case, rnd):
    model, values = case
    shuffled = list(values)
    rnd.shuffle(shuffled)
    baseline = score_assessment(model, _responses(model, values))
    permuted = score_assessment(model, _responses(model, values, shuffled))
    assert permuted.per_level == baseline.per_level
    assert permuted.bml == baseline.bml


@settings(deadline=None)
@given(models_with_values(), st.data())
def test_raising_answers_never_lowers_bml(case, data):
    model, values = case
    raised = {}
    for key, value in values.items():
        floor = value or 1
        raised[key] = data.draw(st.integers(min_value=floor, max_value=4))
    before = score_assessment(model, _responses(model, values)).bml
    after = score_assessment(model, _responses(model, raised)).bml
    assert after >= before


@given(
    st.floats(min_value=0, max_value=100, allow_nan=False),
    st.floats(min_value=0, max_value=100, allow_nan=False),
)
def test_percent_rating_monotone_pairs(a, b):
    low, high = sorted((a, b))
    assert rate_percent(low) <= rate_percent(high)


def test_percent_rating_monotone_sweep():
    percents = np.sort(np.random.default_rng(7).uniform(0, 100, 10_000))
    ratings = [int(rate_percent(float(p))) for p in percents]
    assert all(x <= y for x, y in zip(ratings, ratings[1:]))
    assert set(ratings) == {1, 2, 3, 4}
