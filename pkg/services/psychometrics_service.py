"""
Psychometrics - instrument reliability and validity from pilot data.

A construct is the set of questions measuring one practice at one level.
  reliability:   coefficient alpha per construct
  validity:      eigenvalues of the item correlation matrix (Kaiser criterion, scree)
  convergence:   level x level matrix of average inter-item correlations (MTMM)

Sample statistics (n - 1 denominator) throughout.
"""
import logging
import math
from collections import defaultdict
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import cfg
from domain.errors import (
    InsufficientRespondentsError,
    NoConvergenceError,
    NotSymmetricError,
    SchemaError,
    SingleItemConstructError,
    UnknownQuestionError,
    ZeroVarianceError,
)
from domain.ids import QuestionId
from domain.models import ConstructStats, MaturityModel, MtmmMatrix, PilotDataset, ScreePoint

logger = logging.getLogger(__name__)


def _as_columns(columns: Sequence[Sequence[float]]) -> np.ndarray:
    data = np.asarray(columns, dtype=float)
    if data.ndim != 2:
        raise ValueError("columns must be equal-length numeric vectors")
    if data.shape[1] < 2:
        raise InsufficientRespondentsError(f"Need at least 2 observations, got {data.shape[1]}")
    return data


# ============================================================
# Core statistics
# ============================================================

def pearson_correlation_matrix(columns: Sequence[Sequence[float]]) -> np.ndarray:
    """
    Pearson correlations between columns (each column = one item across respondents).

    Zero-variance columns have no defined correlation: their whole row and column
    are NaN. Use zero_variance_columns() to find them.
    """
    data = _as_columns(columns)
    centered = data - data.mean(axis=1, keepdims=True)
    std = np.sqrt((centered ** 2).sum(axis=1) / (data.shape[1] - 1))
    degenerate = std == 0
    safe = np.where(degenerate, 1.0, std)
    z = centered / safe[:, None]
    corr = (z @ z.T) / (data.shape[1] - 1)
    corr = np.clip((corr + corr.T) / 2, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    corr[degenerate, :] = np.nan
    corr[:, degenerate] = np.nan
    return corr


def zero_variance_columns(columns: Sequence[Sequence[float]]) -> List[int]:
    data = _as_columns(columns)
    return [i for i, column in enumerate(data) if np.ptp(column) == 0]


def cronbach_alpha(items: Sequence[Sequence[float]]) -> float:
    """alpha = k/(k-1) * (1 - sum(item variances) / variance(total score))."""
    data = _as_columns(items)
    k = data.shape[0]
    if k < 2:
        raise SingleItemConstructError("Coefficient alpha needs at least two items")
    item_vars = data.var(axis=1, ddof=1)
    total_var = data.sum(axis=0).var(ddof=1)
    if total_var == 0:
        raise ZeroVarianceError("Total score has zero variance")
    return float(k / (k - 1) * (1 - item_vars.sum() / total_var))


def symmetric_eigenvalues(matrix) -> List[float]:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, descending."""
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetricError(f"Expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotSymmetricError("Matrix has non-finite entries")
    if not np.allclose(a, a.T, rtol=0, atol=cfg.psychometrics["symmetry_tolerance"]):
        raise NotSymmetricError("Matrix is not symmetric")

    n = a.shape[0]
    tolerance = cfg.psychometrics["jacobi_tolerance"]
    max_sweeps = cfg.psychometrics["jacobi_max_sweeps"]
    off_diagonal = ~np.eye(n, dtype=bool)

    for sweep in range(max_sweeps + 1):
        if n < 2 or np.abs(a[off_diagonal]).max() < tolerance:
            logger.debug(f"Jacobi converged after {sweep} sweep(s) for n={n}")
            return sorted(np.diag(a).tolist(), reverse=True)
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                if theta == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rotation = np.eye(n)
                rotation[p, p] = rotation[q, q] = c
                rotation[p, q] = s
                rotation[q, p] = -s
                a = rotation.T @ a @ rotation
                a[p, q] = a[q, p] = 0.0

    raise NoConvergenceError(f"Jacobi did not converge within {max_sweeps} sweeps")


def reliability_verdict(alpha: Optional[float]) -> Optional[str]:
    if alpha is None:
        return None
    thresholds = cfg.psychometrics["reliability_thresholds"]
    if alpha >= thresholds["satisfactory"]:
        return "satisfactory"
    if alpha >= thresholds["acceptable"]:
        return "acceptable"
    return "unreliable"


# ============================================================
# Constructs
# ============================================================

def _grid(dataset: PilotDataset) -> np.ndarray:
    """respondents x questions float array, NaN for blanks."""
    return np.array(
        [[np.nan if v is None else float(v) for v in row] for row in dataset.matrix],
        dtype=float,
    ).reshape(len(dataset.respondents), len(dataset.questions))


def _check_dataset(dataset: PilotDataset, model: MaturityModel) -> Dict[str, int]:
    if len(dataset.respondents) < 2:
        raise InsufficientRespondentsError(
            f"Pilot data has {len(dataset.respondents)} respondent(s); at least 2 are required"
        )
    known = model.question_map()
    columns = {}
    for col, qid in enumerate(dataset.questions):
        if str(qid) not in known:
            raise UnknownQuestionError(str(qid), "pilot data column")
        columns[str(qid)] = col
    return columns


def constructs_of(model: MaturityModel) -> List[Tuple[int, int, List[QuestionId]]]:
    """(level, practice, question ids) for every practice that has questions at a level."""
    result = []
    for level in sorted(model.levels, key=lambda lv: lv.index):
        by_practice: Dict[int, List[QuestionId]] = defaultdict(list)
        for question in level.questions:
            by_practice[question.id.practice].append(question.id)
        for practice_id in sorted(by_practice):
            result.append((level.index, practice_id, by_practice[practice_id]))
    return result


def analyze_construct(level: int, practice: int, abbrev: str, items: np.ndarray) -> ConstructStats:
    """Statistics for one construct; `items` is respondents x k with NaN blanks."""
    k = items.shape[1]
    stats = ConstructStats(level=level, practice=practice, abbrev=abbrev, k_items=k)
    if k == 1:
        stats.diagnostic = "single-item construct"
        return stats

    complete = items[~np.isnan(items).any(axis=1)]
    stats.n_respondents = complete.shape[0]
    if complete.shape[0] < 2:
        stats.diagnostic = f"{complete.shape[0]} complete respondent(s) after listwise deletion"
        return stats

    columns = complete.T
    flat = zero_variance_columns(columns)
    if flat:
        stats.diagnostic = f"zero-variance item(s) at position {', '.join(str(i + 1) for i in flat)}"
        logger.warning(f"Construct level {level} {abbrev}: {stats.diagnostic}")
        return stats

    try:
        alpha = cronbach_alpha(columns)
    except ZeroVarianceError:
        stats.diagnostic = "zero total-score variance"
        logger.warning(f"Construct level {level} {abbrev}: {stats.diagnostic}")
        return stats
    stats.alpha = alpha
    eigenvalues = symmetric_eigenvalues(pearson_correlation_matrix(columns))
    kaiser = cfg.psychometrics["kaiser_cutoff"]
    stats.first_eigenvalue = eigenvalues[0]
    stats.retained_components = sum(1 for value in eigenvalues if value > kaiser)
    stats.scree = [ScreePoint(component=i, eigenvalue=value) for i, value in enumerate(eigenvalues, start=1)]
    stats.reliability = reliability_verdict(stats.alpha)
    return stats


def construct_validity(dataset: PilotDataset, model: MaturityModel) -> List[ConstructStats]:
    """Alpha, first eigenvalue, Kaiser count and scree data for each (level, practice) construct."""
    columns = _check_dataset(dataset, model)
    grid = _grid(dataset)

    results = []
    for level, practice_id, qids in constructs_of(model):
        present = [columns[str(q)] for q in qids if str(q) in columns]
        if not present:
            logger.info(f"Construct level {level} practice {practice_id} absent from pilot data, skipped")
            continue
        if len(present) != len(qids):
            missing = [str(q) for q in qids if str(q) not in columns]
            raise SchemaError(
                f"Pilot data covers construct level {level} practice {practice_id} only partially "
                f"(missing {', '.join(missing)})",
                location="pilot data header",
            )
        abbrev = model.practice(practice_id).abbrev
        results.append(analyze_construct(level, practice_id, abbrev, grid[:, present]))

    computed = sum(1 for c in results if c.computable)
    logger.info(f"Analyzed {len(results)} constructs ({computed} computable) over {len(dataset.respondents)} respondents")
    return results


# ============================================================
# MTMM
# ============================================================

def _pair_correlation(x: np.ndarray, y: np.ndarray) -> float:
    """Correlation over pairwise-complete respondents; NaN when undefined."""
    mask = ~(np.isnan(x) | np.isnan(y))
    if mask.sum() < 2:
        return float("nan")
    return float(pearson_correlation_matrix([x[mask], y[mask]])[0, 1])


def _mean(values: List[float]) -> Optional[float]:
    finite = [v for v in values if not math.isnan(v)]
    if not finite:
        return None
    return float(np.clip(np.mean(finite), -1.0, 1.0))


def mtmm(dataset: PilotDataset, model: MaturityModel) -> MtmmMatrix:
    """
    Level x level average correlations.

    Diagonal: mean correlation over item pairs inside the same (level, practice) construct.
    Off-diagonal: mean correlation over every item pair crossing the two levels.
    """
    columns = _check_dataset(dataset, model)
    grid = _grid(dataset)

    levels = sorted(level.index for level in model.levels)
    items_by_level: Dict[int, List[int]] = {j: [] for j in levels}
    within: Dict[int, List[float]] = {j: [] for j in levels}

    for level, _, qids in constructs_of(model):
        present = [columns[str(q)] for q in qids if str(q) in columns]
        items_by_level[level].extend(present)
        for a, b in combinations(present, 2):
            within[level].append(_pair_correlation(grid[:, a], grid[:, b]))

    diagnostics = []
    flat = [
        str(dataset.questions[col])
        for col in sorted(c for cols in items_by_level.values() for c in cols)
        if np.unique(grid[~np.isnan(grid[:, col]), col]).size < 2
    ]
    if flat:
        diagnostics.append(f"zero-variance item(s) left out of the averages: {', '.join(flat)}")
        logger.warning(f"MTMM: {diagnostics[-1]}")

    size = len(levels)
    cells: List[List[Optional[float]]] = [[None] * size for _ in range(size)]
    for i, j in enumerate(levels):
        cells[i][i] = _mean(within[j])
        for m in range(i + 1, size):
            k = levels[m]
            value = _mean(
                [
                    _pair_correlation(grid[:, a], grid[:, b])
                    for a, b in product(items_by_level[j], items_by_level[k])
                ]
            )
            cells[i][m] = cells[m][i] = value

    logger.info(f"MTMM computed over {size} levels")
    return MtmmMatrix(levels=levels, cells=cells, diagnostics=diagnostics)
