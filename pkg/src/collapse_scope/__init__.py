"""Collapse-model decoherence kernels, Talbot-Lau fringe predictions and parameter bounds."""
from .core import (AMU, HBAR, K_B, M0, M_E, BinaryAmplitude, CollapseParams, CustomGrating, Disk, DomainError,
                   InterferometerSpec, Model, MoleculeSpec, NumericalError, PointCluster, SinusoidalPhase, Sphere,
                   TruncationError, de_broglie_wavenumber, require_valid, validate)

__version__ = "0.1.0"

__all__ = [
    "AMU", "HBAR", "K_B", "M0", "M_E", "BinaryAmplitude", "CollapseParams", "CustomGrating", "Disk",
    "DomainError", "InterferometerSpec", "Model", "MoleculeSpec", "NumericalError", "PointCluster",
    "SinusoidalPhase", "Sphere", "TruncationError", "de_broglie_wavenumber", "require_valid", "validate",
    "__version__",
]
