"""psych - reliability and validity tables from a pilot rating grid."""
import logging
from pathlib import Path

from cli.models import CliConfig
from config import cfg
from services.ingest_service import load_pilot_csv
from services.psychometrics_service import construct_validity, mtmm
from services.report_service import render_psych, render_scree_csv

logger = logging.getLogger(__name__)


def register(subparsers, parents):
    parser = subparsers.add_parser("psych", parents=parents, help="Psychometric analysis of pilot data")
    parser.add_argument("pilot", help="Pilot CSV: respondent[,organization],Q.d.l.p.q,...")
    parser.set_defaults(handler=run)


def scree_path(output: Path) -> Path:
    return Path(str(output) + cfg.reporting["scree_suffix"])


def run(args, config: CliConfig) -> int:
    model = config.load_model()
    dataset = load_pilot_csv(args.pilot)
    constructs = construct_validity(dataset, model)
    matrix = mtmm(dataset, model)

    config.emit(render_psych(constructs, matrix, model, config.output_format))
    if config.output_path is not None:
        target = scree_path(config.output_path)
        with open(target, "w", encoding="utf-8", newline="") as f:
            f.write(render_scree_csv(constructs))
        logger.info(f"Scree data written to {target}")
    return 0
