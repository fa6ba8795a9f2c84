"""
Ingestion - response files (JSON / CSV) and pilot-study rating grids (CSV).

Response JSON:
    {"organization": "A", "respondent": "r1", "encoding": "value",
     "answers": {"Q.1.2.1.1": 3, ...}, "provenance": "..."}
    Absent keys and nulls are blanks.

Response CSV:
    # organization: A          (optional metadata lines)
    # respondent: r1
    # encoding: value
    question_id,answer
    Q.1.2.1.1,3
    Q.1.2.1.2,             <- blank

Pilot CSV:
    respondent[,organization],Q.1.1.1.1,...   one row per respondent, values 1..4 or blank
"""
import csv
import io
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd
from pydantic import ValidationError

from domain.errors import AssessmentError, SchemaError
from domain.ids import parse_question_id
from domain.models import Answer, AnswerKind, BlankPolicy, Encoding, PilotDataset, ResponseSet
from services.model_service import parse_document, schema_error_from
from services.scoring_service import rate_answer

logger = logging.getLogger(__name__)

_CSV_HEADER = ["question_id", "answer"]


def _reject_duplicates(pairs):
    data = {}
    for key, value in pairs:
        if key in data:
            raise SchemaError(f"duplicate key {key!r}")
        data[key] = value
    return data


def _encoding(value, location: str) -> Encoding:
    try:
        return Encoding(value)
    except ValueError:
        raise SchemaError(f"unknown encoding {value!r} (expected scale, value or percent)", location=location)


def coerce_answer(question_id: str, encoding: Encoding, raw) -> Answer:
    """Build an Answer and check the raw value fits the declared encoding."""
    qid = parse_question_id(question_id)
    if raw is None:
        return Answer(question=qid, kind=AnswerKind.BLANK)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise SchemaError(f"answer must be a number or null, got {raw!r}", location=f"answers.{question_id}")
    answer = Answer(question=qid, kind=AnswerKind(encoding.value), raw=raw)
    # range / integrality check lives in the rating rules
    rate_answer(answer, BlankPolicy.RATE_AS_1, encoding)
    return answer


def _build_response_set(
    organization,
    respondent,
    encoding: Encoding,
    raw_answers: Dict[str, object],
    provenance: Optional[str] = None,
) -> ResponseSet:
    if not organization or not isinstance(organization, str):
        raise SchemaError("organization is required", location="organization")
    if not respondent or not isinstance(respondent, str):
        raise SchemaError("respondent is required", location="respondent")
    answers = {}
    for key, raw in raw_answers.items():
        answer = coerce_answer(key, encoding, raw)
        answers[str(answer.question)] = answer
    try:
        return ResponseSet(
            respondent=respondent,
            organization=organization,
            encoding=encoding,
            answers=answers,
            provenance=provenance,
        )
    except ValidationError as e:
        raise schema_error_from(e) from e


# ============================================================
# Response JSON
# ============================================================

def load_response_json(source: Union[str, bytes]) -> ResponseSet:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if not source.strip():
        raise SchemaError("empty response document")
    try:
        data = json.loads(source, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, location=f"line {e.lineno} column {e.colno}") from e
    data = parse_document(data, what="response document")

    answers = data.get("answers", {})
    if not isinstance(answers, dict):
        raise SchemaError("answers must be an object", location="answers")
    return _build_response_set(
        data.get("organization"),
        data.get("respondent"),
        _encoding(data.get("encoding"), "encoding"),
        answers,
        data.get("provenance"),
    )


def response_to_json(responses: ResponseSet) -> str:
    """Inverse of load_response_json; blanks are written as null."""
    payload = {
        "organization": responses.organization,
        "respondent": responses.respondent,
        "encoding": responses.encoding.value,
    }
    if responses.provenance:
        payload["provenance"] = responses.provenance
    payload["answers"] = {
        key: _plain_number(answer.raw)
        for key, answer in sorted(responses.answers.items(), key=lambda kv: kv[1].question.sort_key)
    }
    return json.dumps(payload, indent=2) + "\n"


def _plain_number(raw):
    if raw is None:
        return None
    return int(raw) if float(raw).is_integer() else raw


# ============================================================
# Response CSV
# ============================================================

def load_response_csv(
    source: str,
    organization: Optional[str] = None,
    respondent: Optional[str] = None,
    encoding: Optional[Encoding] = None,
    default_respondent: Optional[str] = None,
    default_organization: Optional[str] = None,
) -> ResponseSet:
    """
    Parse CSV text. Explicit arguments override '# key: value' metadata lines;
    the defaults only fill values the file does not state.
    """
    meta: Dict[str, str] = {}
    body: List[str] = []
    for line in source.splitlines():
        stripped = line.strip()
        if not body and stripped.startswith("#"):
            key, _, value = stripped.lstrip("#").partition(":")
            meta[key.strip().lower()] = value.strip()
        elif stripped or body:
            body.append(line)

    rows = list(csv.reader(body))
    if not rows:
        raise SchemaError("empty response CSV")
    header = [cell.strip() for cell in rows[0]]
    if header != _CSV_HEADER:
        raise SchemaError(f"header must be {','.join(_CSV_HEADER)}, got {','.join(header)}", location="line 1")

    raw_answers: Dict[str, object] = {}
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise SchemaError(f"expected 2 cells, got {len(row)}", location=f"line {line_no}")
        key, cell = row[0].strip(), row[1].strip()
        if key in raw_answers:
            raise SchemaError(f"duplicate question id {key}", location=f"line {line_no}")
        raw_answers[key] = _parse_number(cell, f"line {line_no}")

    return _build_response_set(
        organization or meta.get("organization") or default_organization,
        respondent or meta.get("respondent") or default_respondent,
        encoding or _encoding(meta.get("encoding", Encoding.VALUE.value), "encoding"),
        raw_answers,
        meta.get("provenance"),
    )


def _parse_number(cell: str, location: str):
    if cell == "":
        return None
    try:
        value = float(cell)
    except ValueError:
        raise SchemaError(f"not a number: {cell!r}", location=location)
    return int(value) if value.is_integer() else value


def response_to_csv(responses: ResponseSet) -> str:
    buffer = io.StringIO()
    buffer.write(f"# organization: {responses.organization}\n")
    buffer.write(f"# respondent: {responses.respondent}\n")
    buffer.write(f"# encoding: {responses.encoding.value}\n")
    if responses.provenance:
        buffer.write(f"# provenance: {responses.provenance}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for key, answer in sorted(responses.answers.items(), key=lambda kv: kv[1].question.sort_key):
        raw = _plain_number(answer.raw)
        writer.writerow([key, "" if raw is None else raw])
    return buffer.getvalue()


def read_responses(path: Union[str, Path], default_organization: Optional[str] = None) -> ResponseSet:
    """
    Read a response file; '.csv' selects the CSV reader, anything else JSON.

    default_organization labels CSV files that carry no organization line.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        responses = load_response_csv(text, default_respondent=path.stem, default_organization=default_organization)
    else:
        responses = load_response_json(text)
    logger.info(
        f"Read {len(responses.answers)} answers from {path.name} "
        f"({responses.organization}/{responses.respondent}, {responses.encoding.value})"
    )
    return responses


# ============================================================
# Pilot CSV
# ============================================================

def load_pilot_csv(source: Union[str, Path, io.StringIO]) -> PilotDataset:
    """Read a respondents x questions grid. Header cells are taken verbatim (no de-duplication)."""
    try:
        frame = pd.read_csv(source, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True).fillna("")
    except pd.errors.EmptyDataError:
        raise SchemaError("empty pilot CSV")
    return pilot_from_frame(frame)


def pilot_from_frame(frame: pd.DataFrame) -> PilotDataset:
    if frame.shape[0] < 1:
        raise SchemaError("empty pilot CSV")
    header = [str(cell).strip() for cell in frame.iloc[0]]
    if not header or header[0] != "respondent":
        raise SchemaError("first column must be 'respondent'", location="line 1")
    has_org = len(header) > 1 and header[1] == "organization"
    first_q = 2 if has_org else 1

    questions = []
    for col, cell in enumerate(header[first_q:], start=first_q):
        try:
            questions.append(parse_question_id(cell))
        except AssessmentError as e:
            raise SchemaError(str(e), location=f"line 1 column {col + 1}")
    keys = [str(q) for q in questions]
    if len(set(keys)) != len(keys):
        dupes = sorted({k for k in keys if keys.count(k) > 1})
        raise SchemaError(f"duplicate question columns {', '.join(dupes)}", location="line 1")

    respondents: List[str] = []
    organizations: List[str] = []
    matrix: List[List[Optional[int]]] = []
    for row_no in range(1, frame.shape[0]):
        row = [str(cell).strip() for cell in frame.iloc[row_no]]
        respondents.append(row[0])
        if has_org:
            organizations.append(row[1])
        values: List[Optional[int]] = []
        for col in range(first_q, len(header)):
            cell = row[col] if col < len(row) else ""
            value = _parse_number(cell, f"line {row_no + 1} column {col + 1}")
            if value is not None and (not isinstance(value, int) or not 1 <= value <= 4):
                raise SchemaError(f"rating {cell!r} outside 1..4", location=f"line {row_no + 1} column {col + 1}")
            values.append(value)
        matrix.append(values)

    try:
        dataset = PilotDataset(
            respondents=respondents,
            questions=questions,
            matrix=matrix,
            organizations=organizations if has_org else None,
        )
    except ValidationError as e:
        raise schema_error_from(e) from e
    logger.info(f"Pilot data: {len(respondents)} respondents x {len(questions)} questions")
    return dataset
