"""Radar-assisted multi-armed-bandit beam alignment simulator.

Subpackages cover the pulse waveform, array geometry, propagation scene,
radar signal processing, bandit policies, link metrics, slot-timing
accounting and the Monte Carlo harness.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
