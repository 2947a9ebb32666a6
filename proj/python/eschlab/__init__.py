"""Cahn-Hilliard phase fields on evolving domains and their sharp-interface limits."""

import numpy as np

from ._eschlab import *  # noqa: F401,F403
from ._eschlab import PhaseFieldRun, run_preset as _run_preset

__all__ = [name for name in dir() if not name.startswith("_")]


def run_preset(preset, write_files=True, gnuplot=False):
    """Run every (epsilon, mbar) pair of a preset and its sharp companion."""
    return _run_preset(preset, write_files, gnuplot)


def trace_array(run: PhaseFieldRun) -> np.ndarray:
    """Columns t, energy, mass of a phase-field run."""
    return np.array([(r.t, r.energy, r.mass) for r in run.trace], dtype=float).reshape(-1, 3)
