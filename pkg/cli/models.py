"""
CLI configuration shared by every subcommand.
"""
import sys
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from config import BUNDLED, cfg
from domain.models import BlankPolicy, MaturityModel, OutputFormat
from services.model_service import resolve_model
from services.scoring_service import default_blank_policy


def _default_format() -> OutputFormat:
    return OutputFormat(cfg.reporting.get("default_format", OutputFormat.TEXT.value))


class CliConfig(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_path: str = Field(BUNDLED, description='Model JSON path or "bundled"')
    output_format: OutputFormat = Field(default_factory=_default_format)
    blank_policy: BlankPolicy = Field(default_factory=default_blank_policy)
    output_path: Optional[Path] = None  # None = stdout

    @classmethod
    def from_args(cls, args) -> "CliConfig":
        values = {
            "model_path": getattr(args, "model", None) or cfg.model_path,
            "output_path": getattr(args, "output", None),
        }
        if getattr(args, "format", None):
            values["output_format"] = args.format
        if getattr(args, "blank_policy", None):
            values["blank_policy"] = args.blank_policy
        return cls(**values)

    def load_model(self) -> MaturityModel:
        return resolve_model(self.model_path)

    def emit(self, document: str) -> None:
        """Write the rendered document to the output path, or stdout."""
        if self.output_path is None:
            sys.stdout.write(document)
            return
        with open(self.output_path, "w", encoding="utf-8", newline="") as f:
            f.write(document)
