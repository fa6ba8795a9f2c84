"""
Subcommands. Each module exposes register(subparsers, parents) and run(args, config) -> exit code.
"""
import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence

from domain.errors import EmptyInputError
from domain.models import AssessmentResult, BlankPolicy, MaturityModel, ResponseSet
from services.ingest_service import read_responses
from services.scoring_service import aggregate_respondents, score_assessment

logger = logging.getLogger(__name__)


def read_response_files(paths: Sequence[str], organization: Optional[str] = None) -> List[ResponseSet]:
    """Read every file; with an organization, keep only that organization's sets."""
    sets = [read_responses(path, default_organization=organization) for path in paths]
    if organization:
        sets = [rs for rs in sets if rs.organization == organization]
    if not sets:
        raise EmptyInputError(f"No responses for organization {organization!r}" if organization else "No response files")
    return sets


def assess(model: MaturityModel, response_sets: Sequence[ResponseSet], policy: BlankPolicy) -> AssessmentResult:
    """Score one organization, aggregating first when several respondents answered."""
    if len(response_sets) == 1:
        return score_assessment(model, response_sets[0], policy)
    combined = aggregate_respondents(model, response_sets, policy)
    return score_assessment(model, combined, policy)


def assess_by_organization(
    model: MaturityModel,
    response_sets: Sequence[ResponseSet],
    policy: BlankPolicy,
) -> List[AssessmentResult]:
    groups: Dict[str, List[ResponseSet]] = defaultdict(list)
    for rs in response_sets:
        groups[rs.organization].append(rs)
    logger.info(f"Assessing {len(groups)} organization(s) from {len(response_sets)} response set(s)")
    return [assess(model, groups[org], policy) for org in sorted(groups)]
