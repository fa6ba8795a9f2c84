"""
Report rendering - assessment, psychometric, gap and framework tables.

Every document is built from plain tables (title, header, rows, footnotes) and
rendered as text, GitHub markdown or CSV; JSON mirrors the domain types.
Counts are integers, statistics use a fixed number of decimals with "." as separator.
"""
import csv
import io
import json
import logging
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from config import cfg
from domain.models import (
    AssessmentResult,
    ConstructStats,
    GapReport,
    MaturityModel,
    MtmmMatrix,
    OutputFormat,
    ReportBundle,
)
from services.model_service import question_counts
from services.scoring_service import pass_threshold

logger = logging.getLogger(__name__)

SINGLE_ITEM = "*"
NOT_COMPUTABLE = "n/a"
ABSENT = "-"
_SCREE_DECIMALS = 6


class Table(BaseModel):
    title: str = ""
    header: List[str]
    rows: List[List[str]] = Field(default_factory=list)
    footnotes: List[str] = Field(default_factory=list)


# ============================================================
# Formatting primitives
# ============================================================

def fmt_number(value: Optional[float], decimals: Optional[int] = None) -> str:
    if value is None:
        return ABSENT
    decimals = cfg.reporting["decimals"] if decimals is None else decimals
    text = f"{value:.{decimals}f}"
    if text.startswith("-") and float(text) == 0:
        text = text[1:]
    return text


def _text(table: Table) -> str:
    widths = [len(h) for h in table.header]
    for row in table.rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def line(cells: Sequence[str]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()

    lines = []
    if table.title:
        lines.append(table.title)
    lines.append(line(table.header))
    lines.append(line(["-" * w for w in widths]))
    lines.extend(line(row) for row in table.rows)
    if table.footnotes:
        lines.append("")
        lines.extend(table.footnotes)
    return "\n".join(lines) + "\n"


def _markdown(table: Table) -> str:
    def line(cells: Sequence[str]) -> str:
        return "| " + " | ".join(cells) + " |"

    lines = []
    if table.title:
        lines.extend([f"### {table.title}", ""])
    lines.append(line(table.header))
    lines.append(line(["---"] * len(table.header)))
    lines.extend(line(row) for row in table.rows)
    if table.footnotes:
        lines.append("")
        lines.extend(table.footnotes)
    return "\n".join(lines) + "\n"


def _csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(table.header)
    writer.writerows(table.rows)
    return buffer.getvalue()


def render_tables(tables: Sequence[Table], fmt: OutputFormat) -> str:
    """Text / markdown / csv rendering of several tables, separated by one blank line."""
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.TEXT:
        return "\n".join(_text(t) for t in tables)
    if fmt == OutputFormat.MARKDOWN:
        return "\n".join(_markdown(t) for t in tables)
    if fmt == OutputFormat.CSV:
        return "\r\n".join(_csv(t) for t in tables)
    raise ValueError(f"render_tables does not handle {fmt.value}")


def _json(payload) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _practice_columns(model: MaturityModel):
    return sorted(model.practices, key=lambda p: p.id)


def _levels(model: MaturityModel):
    return sorted(model.levels, key=lambda lv: lv.index)


def _pct(fraction: float) -> str:
    return f"{fraction * 100:g}"


# ============================================================
# Assessment
# ============================================================

def _own_counts(result: AssessmentResult, model: MaturityModel) -> bool:
    """True when blanks were excluded somewhere, so N and PT differ from the model's."""
    return any(
        score.n_questions != len(model.level(score.level).questions)
        or score.pass_threshold != pass_threshold(len(model.level(score.level).questions), model.pass_fraction)
        for score in result.per_level
    )


def summary_table(results: Sequence[AssessmentResult], model: MaturityModel) -> Table:
    own = [_own_counts(r, model) for r in results]
    header = ["Maturity Level", "Total Questions", f"Pass Threshold {_pct(model.pass_fraction)}%"]
    for r, separate in zip(results, own):
        if separate:
            header += [f"N ({r.organization})", f"PT ({r.organization})"]
        header.append(f"NA ({r.organization})")

    rows = []
    for level in _levels(model):
        n = len(level.questions)
        row = [level.title, str(n), str(pass_threshold(n, model.pass_fraction))]
        for r, separate in zip(results, own):
            score = r.level_score(level.index)
            if separate:
                row += [str(score.n_questions), str(score.pass_threshold)]
            row.append(str(score.n_agreed))
        rows.append(row)

    footnotes = []
    if results:
        footnotes.append("NA = number of agreed statements")
        if any(own):
            footnotes.append("N, PT = questions rated and pass threshold after excluding blank answers")
            footnotes.append("A level with no rated questions does not pass")
        footnotes += [f'Organization "{r.organization}": {model.level_label(r.bml)}' for r in results]
    return Table(title="Summary of Assessment Results", header=header, rows=rows, footnotes=footnotes)


def render_summary(results: Sequence[AssessmentResult], model: MaturityModel, fmt: OutputFormat) -> str:
    """One row per level: total questions, pass threshold, agreed count per organization."""
    if OutputFormat(fmt) == OutputFormat.JSON:
        return _json([r.model_dump(mode="json") for r in results])
    return render_tables([summary_table(results, model)], fmt)


def detail_table(result: AssessmentResult, model: MaturityModel) -> Table:
    """Side-by-side (question, value) column pairs, one pair per level."""
    levels = _levels(model)
    header = []
    for level in levels:
        header += [f"{level.title} Level-{level.index}", "Value"]

    depth = max((len(level.questions) for level in levels), default=0)
    rows = []
    for i in range(depth):
        row = []
        for level in levels:
            if i < len(level.questions):
                qid = level.questions[i].id
                rating = result.per_question_ratings.get(str(qid))
                row += [qid.display(), "" if rating is None else str(rating)]
            else:
                row += ["", ""]
        rows.append(row)
    return Table(title=f'Details of Assessment Result of Organization "{result.organization}"', header=header, rows=rows)


def render_detail(result: AssessmentResult, model: MaturityModel, fmt: OutputFormat) -> str:
    if OutputFormat(fmt) == OutputFormat.JSON:
        return _json(result.model_dump(mode="json"))
    return render_tables([detail_table(result, model)], fmt)


def verdict_line(result: AssessmentResult, model: MaturityModel) -> str:
    """'BML: 3 (extrapolate)'."""
    name = model.level(result.bml).name.lower() if result.bml else "none"
    return f"BML: {result.bml} ({name})"


# ============================================================
# Psychometrics
# ============================================================

def _construct_grid(
    title: str,
    constructs: Sequence[ConstructStats],
    model: MaturityModel,
    value,
    footnotes: List[str],
) -> Table:
    practices = _practice_columns(model)
    counts = question_counts(model)
    by_cell: Dict[tuple, ConstructStats] = {(c.level, c.practice): c for c in constructs}

    rows = []
    for level in _levels(model):
        row = [level.title]
        for practice in practices:
            stats = by_cell.get((level.index, practice.id))
            if counts.get((level.index, practice.id), 0) == 1:
                row.append(SINGLE_ITEM)
            elif stats is None:
                row.append(ABSENT)
            elif not stats.computable:
                row.append(NOT_COMPUTABLE)
            else:
                row.append(value(stats))
        rows.append(row)
    header = ["Maturity Level"] + [p.abbrev for p in practices]
    return Table(title=title, header=header, rows=rows, footnotes=footnotes)


def alpha_table(constructs: Sequence[ConstructStats], model: MaturityModel) -> Table:
    thresholds = cfg.psychometrics["reliability_thresholds"]
    footnotes = [
        f"{SINGLE_ITEM} Construct has only one item evaluation of coefficient alpha is not possible",
        f"Reliability: satisfactory >= {thresholds['satisfactory']:.2f}, "
        f"acceptable >= {thresholds['acceptable']:.2f}",
    ]
    weak = [c for c in constructs if c.reliability == "unreliable"]
    if weak:
        footnotes.append(
            "Below acceptable: "
            + ", ".join(f"level {c.level} {c.abbrev} ({fmt_number(c.alpha)})" for c in weak)
        )
    return _construct_grid(
        "Reliability Analysis of Business Practices",
        constructs,
        model,
        lambda c: fmt_number(c.alpha),
        footnotes,
    )


def eigenvalue_table(constructs: Sequence[ConstructStats], model: MaturityModel) -> Table:
    return _construct_grid(
        "Construct Validity of Business Practices",
        constructs,
        model,
        lambda c: fmt_number(c.first_eigenvalue),
        [f"{SINGLE_ITEM} Construct has only one item PCA is not possible"],
    )


def retained_table(constructs: Sequence[ConstructStats], model: MaturityModel) -> Table:
    cutoff = cfg.psychometrics["kaiser_cutoff"]
    return _construct_grid(
        "Retained Components",
        constructs,
        model,
        lambda c: str(c.retained_components),
        [f"Kaiser criterion: components with eigenvalue > {cutoff:g} are retained"],
    )


def mtmm_table(matrix: MtmmMatrix, model: MaturityModel) -> Table:
    """Lower triangle of the level x level matrix."""
    titles = [model.level(j).title for j in matrix.levels]
    rows = []
    for i, title in enumerate(titles):
        row = [title]
        for m in range(len(titles)):
            row.append(fmt_number(matrix.cells[i][m]) if m <= i else "")
        rows.append(row)
    return Table(
        title="Convergent and Discriminant Validity Analysis",
        header=["Maturity Level"] + titles,
        rows=rows,
        footnotes=[
            "Diagonal: average inter-item correlation within the practice constructs of a level",
            "Off-diagonal: average correlation over all item pairs across the two levels",
        ]
        + matrix.diagnostics,
    )


def psych_tables(
    constructs: Optional[Sequence[ConstructStats]],
    matrix: Optional[MtmmMatrix],
    model: MaturityModel,
) -> List[Table]:
    tables = []
    if constructs is not None:
        tables += [
            alpha_table(constructs, model),
            eigenvalue_table(constructs, model),
            retained_table(constructs, model),
        ]
    if matrix is not None:
        tables.append(mtmm_table(matrix, model))
    return tables


def render_psych(
    constructs: Optional[Sequence[ConstructStats]],
    matrix: Optional[MtmmMatrix],
    model: MaturityModel,
    fmt: OutputFormat,
) -> str:
    if OutputFormat(fmt) == OutputFormat.JSON:
        return _json(
            {
                "constructs": None if constructs is None else [c.model_dump(mode="json") for c in constructs],
                "mtmm": None if matrix is None else matrix.model_dump(mode="json"),
            }
        )
    return render_tables(psych_tables(constructs, matrix, model), fmt)


def render_scree_csv(constructs: Sequence[ConstructStats]) -> str:
    """construct,component,eigenvalue rows for every computable construct."""
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["construct", "component", "eigenvalue"])
    for stats in constructs:
        for point in stats.scree:
            writer.writerow(
                [f"L{stats.level}-{stats.abbrev}", point.component, fmt_number(point.eigenvalue, _SCREE_DECIMALS)]
            )
    return buffer.getvalue()


# ============================================================
# Gap analysis
# ============================================================

def gap_tables(gap: GapReport, model: MaturityModel, result: Optional[AssessmentResult] = None) -> List[Table]:
    overview = Table(
        title=f'Gap Analysis for Organization "{gap.organization}"',
        header=["Item", "Value"],
        rows=[
            ["current", model.level_label(gap.current_bml)],
            ["target", model.level_label(gap.target_level)],
            ["pass threshold", str(gap.pass_threshold)],
            ["agreed", str(gap.n_agreed)],
            ["deficit", str(gap.deficit)],
        ],
    )
    weakest = Table(
        title="Weakest Practices",
        header=["Practice", "Abbrev", "Agreed", "Total", "Ratio"],
        rows=[
            [str(p.practice_id), p.abbrev, str(p.agreed), str(p.total), fmt_number(p.ratio)]
            for p in gap.weakest_practices
        ],
    )
    texts = model.question_map()
    ratings = result.per_question_ratings if result is not None else {}
    candidates = Table(
        title="Flip Candidates",
        header=["Question", "Rating", "Statement"],
        rows=[
            [str(qid), str(ratings.get(str(qid), "")), texts[str(qid)].text if str(qid) in texts else ""]
            for qid in gap.flip_candidates
        ],
        footnotes=[f"Agreeing with any {gap.deficit} of these statements reaches the target level"]
        if gap.deficit and gap.attainable
        else [],
    )
    return [overview, weakest, candidates]


def _gap_overview_lines(gap: GapReport, model: MaturityModel, bullet: str) -> str:
    lines = [
        f'Gap Analysis for Organization "{gap.organization}"',
        "",
        f"{bullet}current: {model.level_label(gap.current_bml)}",
        f"{bullet}target: {model.level_label(gap.target_level)}",
        f"{bullet}pass threshold: {gap.pass_threshold}",
        f"{bullet}agreed: {gap.n_agreed}",
        f"{bullet}deficit: {gap.deficit}",
    ]
    if not gap.attainable:
        lines.append(f"{bullet}target not attainable by flipping non-agreed statements")
    return "\n".join(lines) + "\n"


def render_gap(
    gap: GapReport,
    model: MaturityModel,
    fmt: OutputFormat,
    result: Optional[AssessmentResult] = None,
) -> str:
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.JSON:
        return _json(gap.model_dump(mode="json"))
    overview, *rest = gap_tables(gap, model, result)
    if fmt == OutputFormat.CSV:
        return render_tables([overview, *rest], fmt)
    bullet = "- " if fmt == OutputFormat.MARKDOWN else ""
    return "\n".join([_gap_overview_lines(gap, model, bullet), render_tables(rest, fmt)])


# ============================================================
# Framework
# ============================================================

def framework_tables(model: MaturityModel) -> List[Table]:
    practices = _practice_columns(model)
    counts = question_counts(model)

    rows = []
    for level in _levels(model):
        cells = [counts.get((level.index, p.id), 0) for p in practices]
        rows.append([level.title] + [str(c) for c in cells] + [str(sum(cells))])
    totals = [sum(counts.get((level.index, p.id), 0) for level in model.levels) for p in practices]
    rows.append(["Total"] + [str(t) for t in totals] + [str(sum(totals))])
    framework = Table(
        title=f"Framework of {model.name}",
        header=["Maturity Level"] + [p.abbrev for p in practices] + ["Total"],
        rows=rows,
        footnotes=[f"{p.abbrev} = {p.name}" for p in practices],
    )

    threshold = Table(
        title="Rating Threshold",
        header=["Maturity Level", "Total Questions", f"Pass Threshold {_pct(model.pass_fraction)}%"],
        rows=[
            [level.title, str(len(level.questions)), str(pass_threshold(len(level.questions), model.pass_fraction))]
            for level in _levels(model)
        ],
    )
    return [framework, threshold]


def render_framework(model: MaturityModel, fmt: OutputFormat) -> str:
    """Per-level, per-practice question counts plus the pass threshold table."""
    if OutputFormat(fmt) == OutputFormat.JSON:
        return _json(
            {
                "name": model.name,
                "pass_fraction": model.pass_fraction,
                "levels": [
                    {
                        "index": level.index,
                        "name": level.name,
                        "item_counts": {
                            p.abbrev: question_counts(model).get((level.index, p.id), 0)
                            for p in _practice_columns(model)
                        },
                        "total_questions": len(level.questions),
                        "pass_threshold": pass_threshold(len(level.questions), model.pass_fraction),
                    }
                    for level in _levels(model)
                ],
            }
        )
    return render_tables(framework_tables(model), fmt)


# ============================================================
# Bundle
# ============================================================

def render_bundle(bundle: ReportBundle, model: MaturityModel) -> str:
    """Every present section in order: assessment, psychometrics, gap."""
    fmt = bundle.format
    if fmt == OutputFormat.JSON:
        return _json(bundle.model_dump(mode="json", exclude={"format"}, exclude_none=True))

    parts = []
    if bundle.assessment is not None:
        result = bundle.assessment
        parts.append(render_tables([detail_table(result, model), summary_table([result], model)], fmt))
        if fmt == OutputFormat.CSV:
            parts.append(
                render_tables(
                    [Table(header=["organization", "bml", "level"],
                           rows=[[result.organization, str(result.bml), verdict_line(result, model)]])],
                    fmt,
                )
            )
        else:
            parts.append(verdict_line(result, model) + "\n")
    if bundle.constructs is not None or bundle.mtmm is not None:
        parts.append(render_tables(psych_tables(bundle.constructs, bundle.mtmm, model), fmt))
    if bundle.gap is not None:
        parts.append(render_gap(bundle.gap, model, fmt, bundle.assessment))

    separator = "\r\n" if fmt == OutputFormat.CSV else "\n"
    document = separator.join(parts)
    logger.debug(f"Rendered {fmt.value} report ({len(document)} chars)")
    return document
