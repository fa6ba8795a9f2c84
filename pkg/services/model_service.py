"""
Model service - load, validate and serialize staged maturity models.

The bundled business maturity model lives at config/maturity_model.json.
Any model with the same schema (other level/practice/dimension shapes) loads
without code changes.
"""
import json
import logging
from collections import Counter, defaultdict
from pathlib import Path
from typing import Dict, List, Tuple, Union

from pydantic import ValidationError

from config import BUNDLED, BUNDLED_MODEL_PATH
from domain.errors import SchemaError
from domain.models import LevelSpec, MaturityModel, Violation

logger = logging.getLogger(__name__)


def schema_error_from(exc: ValidationError) -> SchemaError:
    """First pydantic error -> SchemaError with a dotted location."""
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    return SchemaError(first.get("msg", "invalid document"), location=location)


def parse_document(source: Union[str, bytes, dict], what: str = "document") -> dict:
    """Decode a JSON document into a dict, raising SchemaError on anything else."""
    if isinstance(source, dict):
        data = source
    else:
        if isinstance(source, bytes):
            source = source.decode("utf-8")
        if not source.strip():
            raise SchemaError(f"empty {what}")
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise SchemaError(e.msg, location=f"line {e.lineno} column {e.colno}") from e
    if not isinstance(data, dict) or not data:
        raise SchemaError(f"{what} must be a non-empty JSON object")
    return data


def _canonical(model: MaturityModel) -> MaturityModel:
    """Sort levels by index and questions by (dimension, practice, question) within each level."""
    levels = [
        level.model_copy(update={"questions": sorted(level.questions, key=lambda q: q.id.sort_key)})
        for level in sorted(model.levels, key=lambda lv: lv.index)
    ]
    return model.model_copy(update={"levels": levels})


def load_model(source: Union[str, bytes, dict]) -> MaturityModel:
    """Parse a model document. Structural problems raise SchemaError; invariants are left to validate_model."""
    data = parse_document(source, what="model document")
    try:
        model = MaturityModel.model_validate(data)
    except ValidationError as e:
        raise schema_error_from(e) from e
    model = _canonical(model)
    logger.info(f"Loaded model '{model.name}': {len(model.levels)} levels, {model.question_count} questions")
    return model


def read_model(path: Union[str, Path]) -> MaturityModel:
    """Load a model from a file path. OSError propagates to the caller."""
    return load_model(Path(path).read_text(encoding="utf-8"))


def load_bundled_model() -> MaturityModel:
    return read_model(BUNDLED_MODEL_PATH)


def resolve_model(path: str) -> MaturityModel:
    """'bundled' or a filesystem path."""
    if path == BUNDLED:
        return load_bundled_model()
    return read_model(path)


def save_model(model: MaturityModel) -> str:
    """Canonical JSON: fixed field order, canonical question order, 2-space indent."""
    payload = _canonical(model).model_dump(mode="json", exclude_none=True)
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def question_counts(model: MaturityModel) -> Dict[Tuple[int, int], int]:
    """(level index, practice id) -> number of questions listed under that level."""
    counts: Dict[Tuple[int, int], int] = Counter()
    for level in model.levels:
        for question in level.questions:
            counts[(level.index, question.id.practice)] += 1
    return counts


# ============================================================
# Validation
# ============================================================

def validate_model(model: MaturityModel) -> List[Violation]:
    """
    Check every structural invariant of a model.

    Returns the list of violations (empty = valid), model-wide checks first,
    then per level in index order, questions in canonical order.
    """
    violations: List[Violation] = []

    def add(code: str, location: str, message: str):
        violations.append(Violation(code=code, location=location, message=message))

    if not 0 < model.pass_fraction <= 1:
        add("pass-fraction", "pass_fraction", f"pass_fraction {model.pass_fraction} outside (0, 1]")

    for index, n in sorted(Counter(d.index for d in model.dimensions).items()):
        if n > 1:
            add("duplicate-dimension", f"dimension {index}", f"duplicate dimension index {index}")
    dimension_ids = {d.index for d in model.dimensions}

    for practice_id, n in sorted(Counter(p.id for p in model.practices).items()):
        if n > 1:
            add("duplicate-practice", f"practice {practice_id}", f"duplicate practice id {practice_id}")
    for practice in sorted(model.practices, key=lambda p: p.id):
        if practice.dimension not in dimension_ids:
            add(
                "undeclared-dimension",
                f"practice {practice.abbrev}",
                f"practice {practice.abbrev} references undeclared dimension {practice.dimension}",
            )
    practices = {p.id: p for p in model.practices}

    indices = sorted(level.index for level in model.levels)
    if indices != list(range(1, len(indices) + 1)):
        add("level-indices", "levels", f"level indices {indices} are not contiguous from 1")

    seen: set = set()
    for level in sorted(model.levels, key=lambda lv: lv.index):
        _validate_level(level, practices, seen, add)

    if violations:
        logger.info(f"Model '{model.name}' has {len(violations)} violation(s)")
    return violations


def _validate_level(level: LevelSpec, practices: dict, seen: set, add) -> None:
    numbers: Dict[int, List[int]] = defaultdict(list)

    for question in sorted(level.questions, key=lambda q: q.id.sort_key):
        qid = question.id
        where = str(qid)
        if qid.level != level.index:
            add("level-mismatch", where, f"question {qid} listed under level {level.index}")
        practice = practices.get(qid.practice)
        if practice is None:
            add("undeclared-practice", where, f"question {qid} references undeclared practice {qid.practice}")
        elif practice.dimension != qid.dimension:
            add(
                "dimension-mismatch",
                where,
                f"question {qid} dimension {qid.dimension} ≠ practice {practice.abbrev} dimension {practice.dimension}",
            )
        if where in seen:
            add("duplicate-question", where, f"duplicate question id {qid}")
        seen.add(where)
        if not question.text.strip():
            add("empty-text", where, f"question {qid} has empty text")
        numbers[qid.practice].append(qid.question)

    for practice_id in sorted(numbers):
        got = sorted(numbers[practice_id])
        if got != list(range(1, len(got) + 1)):
            label = practices[practice_id].abbrev if practice_id in practices else str(practice_id)
            add(
                "non-contiguous",
                f"level {level.index} practice {label}",
                f"level {level.index} practice {label} question numbers {got} not contiguous from 1",
            )

    if level.item_counts is None:
        return
    declared = {p.abbrev for p in practices.values()}
    for abbrev in level.item_counts:
        if abbrev not in declared:
            add(
                "unknown-practice-count",
                f"level {level.index} practice {abbrev}",
                f"level {level.index} item_counts names undeclared practice {abbrev}",
            )
    for practice_id in sorted(practices):
        abbrev = practices[practice_id].abbrev
        expected = level.item_counts.get(abbrev, 0)
        actual = len(numbers.get(practice_id, []))
        if actual != expected:
            add(
                "item-count",
                f"level {level.index} practice {abbrev}",
                f"level {level.index} practice {abbrev} count {actual} ≠ {expected}",
            )
