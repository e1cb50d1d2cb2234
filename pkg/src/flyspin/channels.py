"""Noise models for the flying qubit: imperfect initialization, dephasing, relaxation.

All errors are per-transit, matching how the protocol layer consumes them:
the flying qubit is prepared once, suffers noise once between the two
gates, and is traced out afterwards. Dephasing before the first gate has
no effect on the |u><u| / |d><d| preparation and any channel applied after
the second gate is erased by the trace, so a single inter-gate application
captures the whole transit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import PAULI_I, PAULI_Z, DensityMatrix, KrausChannel


def _check_probability(name: str, value: float) -> float:
    v = float(value)
    if not (0.0 <= v <= 1.0) or not math.isfinite(v):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return v


@dataclass(frozen=True)
class NoiseParams:
    """Per-transit error probabilities for the flying qubit."""

    eps_init: float = 0.0
    eps_z: float = 0.0
    eps_relax: float = 0.0

    def __post_init__(self) -> None:
        for name in ("eps_init", "eps_z", "eps_relax"):
            object.__setattr__(self, name, _check_probability(name, getattr(self, name)))


def imperfect_init(eps_init: float) -> DensityMatrix:
    """Imperfectly initialized flying qubit: (1-eps)|u><u| + eps|d><d|."""
    e = _check_probability("eps_init", eps_init)
    return DensityMatrix(np.diag([1.0 - e, e]).astype(complex))


def dephasing(eps_z: float) -> KrausChannel:
    """Phase-flip channel: Z is applied with probability eps_z.

    Diagonal entries are invariant, off-diagonals shrink by (1 - 2 eps_z).
    """
    e = _check_probability("eps_z", eps_z)
    return KrausChannel([math.sqrt(1.0 - e) * PAULI_I, math.sqrt(e) * PAULI_Z])


def relaxation(eps_relax: float) -> KrausChannel:
    """Single-shot amplitude damping sending up to down with probability eps_relax.

    The up population decays (up is basis index 0 here, so the damping
    matrices are the mirror image of the textbook |1> -> |0> form).
    """
    e = _check_probability("eps_relax", eps_relax)
    keep = np.array([[math.sqrt(1.0 - e), 0.0], [0.0, 1.0]], dtype=complex)
    decay = np.array([[0.0, 0.0], [math.sqrt(e), 0.0]], dtype=complex)
    return KrausChannel([keep, decay])
