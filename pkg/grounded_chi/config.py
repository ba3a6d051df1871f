"""
Runtime knobs, read once from the environment.

Every value can be overridden per process by exporting the variable before
the run (the CLI also accepts --budget / --workers for one invocation).
"""
import os
from pathlib import Path

# node budget of the exact coloring search
CHI_BUDGET = int(os.getenv("GROUNDED_CHI_BUDGET", "200000"))

# per-set regrowth attempts of the rejection-sampling generators
GEN_ATTEMPTS = int(os.getenv("GROUNDED_GEN_ATTEMPTS", "400"))

WORKERS = int(os.getenv("GROUNDED_WORKERS", "1"))
LOG_LEVEL = os.getenv("GROUNDED_LOG_LEVEL", "INFO")

DATA_DIR = Path(os.getenv("GROUNDED_DATA_DIR", "data"))
FIXTURES_DIR = DATA_DIR / "fixtures"
REPORTS_DIR = DATA_DIR / "reports"
METRICS_PATH = DATA_DIR / "metrics.json"

# campaign progress is logged every this many instances
PROGRESS_EVERY = 50


def chi_budget():
    """Solver budget, re-read so tests and the CLI can change it at runtime."""
    return int(os.getenv("GROUNDED_CHI_BUDGET", str(CHI_BUDGET)))
