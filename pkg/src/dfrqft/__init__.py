"""Kernels, singular directions and perturbative expansions for field theory on DFR quantum spacetime."""
from __future__ import annotations

__version__ = "0.1.0"
