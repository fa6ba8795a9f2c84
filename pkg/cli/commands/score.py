"""score - assessment detail, summary and maturity level for one organization."""
import logging

from cli.commands import assess, read_response_files
from cli.models import CliConfig
from domain.errors import MixedOrganizationError
from domain.models import ReportBundle
from services.report_service import render_bundle

logger = logging.getLogger(__name__)


def register(subparsers, parents):
    parser = subparsers.add_parser("score", parents=parents, help="Score response files")
    parser.add_argument("responses", nargs="+", help="Response files (.json or .csv)")
    parser.add_argument("--org", help="Organization to score (also fills CSV files without one)")
    parser.add_argument("--blank-policy", choices=["rate-as-1", "exclude"])
    parser.set_defaults(handler=run)


def run(args, config: CliConfig) -> int:
    model = config.load_model()
    sets = read_response_files(args.responses, args.org)
    organizations = sorted({rs.organization for rs in sets})
    if len(organizations) > 1:
        raise MixedOrganizationError(
            f"Responses span {', '.join(organizations)}; pick one with --org or use 'report'"
        )

    result = assess(model, sets, config.blank_policy)
    config.emit(render_bundle(ReportBundle(assessment=result, format=config.output_format), model))
    return 0
