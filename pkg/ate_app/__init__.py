"""
ATE Prediction App - config-driven pipeline and command-line front end.
"""

from .config import PipelineConfig, load_config
from .main import main
from .pipeline import Pipeline

__all__ = ["Pipeline", "PipelineConfig", "load_config", "main"]
