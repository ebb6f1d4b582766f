"""Experiment drivers, configuration and the command line."""

from .config import ExperimentConfig, load, parse_text, resolve
from .experiments import EXPERIMENTS, ExperimentReport
from .gronwall import GronwallFit, gronwall_fit

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentReport",
    "GronwallFit",
    "gronwall_fit",
    "load",
    "parse_text",
    "resolve",
]
