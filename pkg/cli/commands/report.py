"""report - combined document: framework, multi-organization summary, psychometrics."""
import json
import logging

from cli.commands import assess_by_organization, read_response_files
from cli.commands.psych import scree_path
from cli.models import CliConfig
from domain.errors import EmptyInputError
from domain.models import OutputFormat
from services.ingest_service import load_pilot_csv
from services.psychometrics_service import construct_validity, mtmm
from services.report_service import (
    framework_tables,
    psych_tables,
    render_framework,
    render_scree_csv,
    render_tables,
    summary_table,
)

logger = logging.getLogger(__name__)


def register(subparsers, parents):
    parser = subparsers.add_parser("report", parents=parents, help="Combined report across organizations")
    parser.add_argument("responses", nargs="*", help="Response files of one or more organizations")
    parser.add_argument("--pilot", help="Pilot CSV to include reliability and validity tables")
    parser.add_argument("--framework", action="store_true", help="Include the model framework tables")
    parser.add_argument("--blank-policy", choices=["rate-as-1", "exclude"])
    parser.set_defaults(handler=run)


def run(args, config: CliConfig) -> int:
    if not (args.responses or args.pilot or args.framework):
        raise EmptyInputError("Nothing to report: give response files, --pilot or --framework")

    model = config.load_model()
    payload = {}
    tables = []

    if args.framework:
        tables += framework_tables(model)
        payload["framework"] = json.loads(render_framework(model, OutputFormat.JSON))
    if args.responses:
        results = assess_by_organization(model, read_response_files(args.responses), config.blank_policy)
        tables.append(summary_table(results, model))
        payload["assessments"] = [r.model_dump(mode="json") for r in results]
    constructs = None
    if args.pilot:
        dataset = load_pilot_csv(args.pilot)
        constructs = construct_validity(dataset, model)
        matrix = mtmm(dataset, model)
        tables += psych_tables(constructs, matrix, model)
        payload["constructs"] = [c.model_dump(mode="json") for c in constructs]
        payload["mtmm"] = matrix.model_dump(mode="json")

    if config.output_format == OutputFormat.JSON:
        config.emit(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    else:
        config.emit(render_tables(tables, config.output_format))

    if constructs is not None and config.output_path is not None:
        with open(scree_path(config.output_path), "w", encoding="utf-8", newline="") as f:
            f.write(render_scree_csv(constructs))
    return 0
