"""gap - shortfall to a target maturity level."""
import logging

from cli.commands import assess, read_response_files
from cli.models import CliConfig
from domain.errors import MixedOrganizationError
from services.gap_service import AUTO, analyze_gap
from services.report_service import render_gap

logger = logging.getLogger(__name__)


def register(subparsers, parents):
    parser = subparsers.add_parser("gap", parents=parents, help="Gap analysis towards a target level")
    parser.add_argument("responses", nargs="+", help="Response files (.json or .csv)")
    parser.add_argument("--org", help="Organization to analyze")
    parser.add_argument("--target", default=AUTO, help='Target level index, or "auto" (next level)')
    parser.add_argument("--blank-policy", choices=["rate-as-1", "exclude"])
    parser.set_defaults(handler=run)


def run(args, config: CliConfig) -> int:
    model = config.load_model()
    sets = read_response_files(args.responses, args.org)
    organizations = sorted({rs.organization for rs in sets})
    if len(organizations) > 1:
        raise MixedOrganizationError(f"Responses span {', '.join(organizations)}; pick one with --org")

    result = assess(model, sets, config.blank_policy)
    gap = analyze_gap(result, model, args.target)
    config.emit(render_gap(gap, model, config.output_format, result))
    return 0
