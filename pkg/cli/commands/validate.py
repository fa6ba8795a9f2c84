"""validate - check a model document against every structural invariant."""
import json
import logging

from cli.models import CliConfig
from domain.models import OutputFormat
from services.model_service import validate_model

logger = logging.getLogger(__name__)


def register(subparsers, parents):
    parser = subparsers.add_parser("validate", parents=parents, help="Validate a maturity model")
    parser.set_defaults(handler=run)


def run(args, config: CliConfig) -> int:
    model = config.load_model()
    violations = validate_model(model)

    if config.output_format == OutputFormat.JSON:
        config.emit(json.dumps([v.model_dump() for v in violations], indent=2, ensure_ascii=False) + "\n")
    elif violations:
        config.emit("".join(f"{v}\n" for v in violations))
    else:
        config.emit(f"valid: {model.name} ({model.question_count} questions)\n")

    if violations:
        logger.warning(f"{len(violations)} violation(s) in {config.model_path}")
        return 1
    return 0
