"""
Gap analysis - what separates an assessed organization from the next maturity level.

Mechanical only: the shortfall in agreed statements at the target level, the
practices with the lowest agreement ratio there, and the non-agreed statements
closest to agreement.
"""
import logging
from typing import Optional

from domain.errors import TargetOutOfRangeError
from domain.ids import PracticeId, parse_question_id
from domain.models import AssessmentResult, GapReport, MaturityModel, PracticeGap

logger = logging.getLogger(__name__)

AUTO = "auto"


def resolve_target(result: AssessmentResult, model: MaturityModel, target: Optional[int] = None) -> int:
    """None / "auto" -> one above the current level, capped at the top level."""
    if target is None or target == AUTO:
        return min(max(result.bml + 1, 1), model.max_level)
    try:
        target = int(target)
    except (TypeError, ValueError):
        raise TargetOutOfRangeError(f"Target level {target!r} is not an integer")
    if not 1 <= target <= model.max_level:
        raise TargetOutOfRangeError(f"Target level {target} outside 1..{model.max_level}")
    return target


def analyze_gap(result: AssessmentResult, model: MaturityModel, target: Optional[int] = None) -> GapReport:
    level_index = resolve_target(result, model, target)
    score = result.level_score(level_index)
    deficit = max(0, score.pass_threshold - score.n_agreed)

    level = model.level(level_index)
    practices = {p.id: p for p in model.practices}
    weakest = []
    for entry in result.per_practice_profile:
        if entry.level != level_index:
            continue
        dimension = practices[entry.practice].dimension if entry.practice in practices else 0
        weakest.append(
            PracticeGap(
                practice_id=PracticeId(dimension=dimension, level=level_index, practice=entry.practice),
                abbrev=entry.abbrev,
                agreed=entry.agreed,
                total=entry.total,
            )
        )
    weakest.sort(key=lambda gap: (gap.ratio, gap.practice_id.practice))

    candidates = []
    if deficit > 0:
        rated = [
            (result.per_question_ratings[str(q.id)], q.id)
            for q in level.questions
            if str(q.id) in result.per_question_ratings
        ]
        candidates = [
            qid
            for rating, qid in sorted(rated, key=lambda pair: (-pair[0], pair[1].sort_key))
            if rating < 3
        ]

    report = GapReport(
        organization=result.organization,
        current_bml=result.bml,
        target_level=level_index,
        pass_threshold=score.pass_threshold,
        n_agreed=score.n_agreed,
        deficit=deficit,
        weakest_practices=weakest,
        flip_candidates=candidates,
    )
    logger.info(
        f"Gap {result.organization} -> level {level_index}: deficit {deficit}, "
        f"{len(candidates)} candidate(s)"
    )
    return report
