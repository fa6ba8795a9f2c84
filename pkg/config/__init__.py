"""
Configuration loader - reads JSON config files + .env for the model path override.
All tuning constants come from JSON. Only MATURITY_MODEL_PATH comes from .env.

Usage:
    from config import cfg
    cfg.psychometrics["kaiser_cutoff"]   # 1.0
    cfg.model_path                       # "bundled" unless MATURITY_MODEL_PATH is set
"""
import json
import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

_CONFIG_DIR = Path(__file__).parent

BUNDLED = "bundled"
BUNDLED_MODEL_PATH = _CONFIG_DIR / "maturity_model.json"


def _load_json(filename: str) -> dict:
    filepath = _CONFIG_DIR / filename
    with open(filepath, "r", encoding="utf-8") as f:
        return json.load(f)


class Config:
    """Central configuration - JSON files + environment variables."""

    def __init__(self):
        self.scoring: dict = _load_json("scoring.json")
        self.psychometrics: dict = _load_json("psychometrics.json")
        self.reporting: dict = _load_json("reporting.json")

    @property
    def model_path(self) -> str:
        """Default model location: env override or the bundled asset."""
        return os.getenv("MATURITY_MODEL_PATH") or BUNDLED

    def reload(self):
        """Reload all JSON config files (for runtime updates)."""
        self.scoring = _load_json("scoring.json")
        self.psychometrics = _load_json("psychometrics.json")
        self.reporting = _load_json("reporting.json")


cfg = Config()
