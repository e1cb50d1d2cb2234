"""Two-spin scattering gates between a flying and a static spin.

Two levels of modelling are provided. ``forward_unitary`` covers the
reflection-free regime, where the interaction reduces to a two-spin
unitary fixed by the singlet and triplet transmission phases. In that
regime the gate acts as

    U|ud> = e^{i tp} (cos t |ud> + i sin t |du>)
    U|du> = e^{i tp} (i sin t |ud> + cos t |du>)
    U|uu> = e^{i (t+tp)} |uu>,   U|dd> = e^{i (t+tp)} |dd>

with t = (theta_T - theta_S)/2 and tp = (theta_T + theta_S)/2. Parallel
spins only pick up a phase; anti-parallel spins mix without spin flips,
conserving total magnetization.

``full_scatter`` keeps the reflected branch of the outgoing electron as an
extra two-level direction mode (transmitted/reflected), so that heralding
on a charge detection can postselect the transmitted branch exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import DensityMatrix, measure, partial_trace, Projector, embed_operator

_TWO_PI = 2.0 * math.pi

#: direction-mode levels appended by full_scatter
TRANSMITTED = 0
REFLECTED = 1

# projectors onto the singlet and triplet sectors of two spins
_SINGLET = np.zeros((4, 4), dtype=complex)
_SINGLET[1, 1] = _SINGLET[2, 2] = 0.5
_SINGLET[1, 2] = _SINGLET[2, 1] = -0.5
_TRIPLET = np.eye(4, dtype=complex) - _SINGLET


@dataclass(frozen=True)
class ForwardScatterParams:
    """Phase pair of the forward-scattering gate, reduced mod 2*pi."""

    theta: float
    theta_prime: float = 0.0

    def __post_init__(self) -> None:
        for name in ("theta", "theta_prime"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise ValueError(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, float(val) % _TWO_PI)

    @classmethod
    def from_phase_shifts(cls, theta_s: float, theta_t: float) -> "ForwardScatterParams":
        """Build from the singlet/triplet transmission phases."""
        return cls(theta=(theta_t - theta_s) / 2.0, theta_prime=(theta_t + theta_s) / 2.0)


@dataclass(frozen=True)
class FullScatterParams:
    """Complex transmission/reflection amplitudes for the heralded model."""

    t_s: complex
    r_s: complex
    t_t: complex
    r_t: complex

    def __post_init__(self) -> None:
        for label, t, r in (("singlet", self.t_s, self.r_s), ("triplet", self.t_t, self.r_t)):
            total = abs(t) ** 2 + abs(r) ** 2
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"{label} amplitudes not normalized: |t|^2+|r|^2 = {total}")


@dataclass(frozen=True)
class GatePreset:
    name: str
    params: ForwardScatterParams

    def __post_init__(self) -> None:
        required = {"BELL_GATE": math.pi / 4.0, "SWAP_GATE": math.pi / 2.0}
        if self.name not in required:
            raise ValueError(f"unknown preset name {self.name!r}")
        if abs(self.params.theta - required[self.name]) > 1e-12:
            raise ValueError(f"{self.name} requires theta = {required[self.name]}")


#: half-way mixing angle; one pass entangles the flying and static spins maximally
BELL_GATE = GatePreset("BELL_GATE", ForwardScatterParams(math.pi / 4.0))
#: full exchange; one pass swaps the flying and static spins up to phases
SWAP_GATE = GatePreset("SWAP_GATE", ForwardScatterParams(math.pi / 2.0))


def forward_unitary(p: ForwardScatterParams) -> np.ndarray:
    """4x4 unitary on (flying, static) for the reflection-free regime."""
    c = math.cos(p.theta)
    s = math.sin(p.theta)
    ph = np.exp(1j * p.theta_prime)
    ph_par = np.exp(1j * (p.theta + p.theta_prime))
    return np.array(
        [
            [ph_par, 0.0, 0.0, 0.0],
            [0.0, ph * c, 1j * ph * s, 0.0],
            [0.0, 1j * ph * s, ph * c, 0.0],
            [0.0, 0.0, 0.0, ph_par],
        ],
        dtype=complex,
    )


def full_scatter(spin_state: DensityMatrix, p: FullScatterParams) -> DensityMatrix:
    """Scatter with reflection, appending a direction mode as a third qubit.

    The singlet component of the two-spin state acquires the amplitude pair
    (t_s, r_s) on the (transmitted, reflected) levels and the triplet
    components acquire (t_t, r_t). Interference between the transmitted and
    reflected sectors is kept until heralding.
    """
    if spin_state.n != 2:
        raise ValueError("full_scatter expects a (flying, static) two-qubit state")
    dir_s = np.array([[p.t_s], [p.r_s]], dtype=complex)
    dir_t = np.array([[p.t_t], [p.r_t]], dtype=complex)
    iso = np.kron(_SINGLET, dir_s) + np.kron(_TRIPLET, dir_t)
    return DensityMatrix(iso @ spin_state.mat @ iso.conj().T)


def herald_transmission(state: DensityMatrix) -> tuple[float, DensityMatrix | None]:
    """Project the trailing direction mode on "transmitted" and trace it out.

    Returns the Born probability of the herald and the conditional spin
    state. A zero-probability herald is flagged by returning ``None`` for
    the state.
    """
    n = state.n
    if n < 2:
        raise ValueError("state has no spin content besides the direction mode")
    spin_qubits = tuple(range(n - 1))
    proj_t = Projector(embed_operator(np.diag([1.0, 0.0]), (n - 1,), n))
    proj_r = Projector(embed_operator(np.diag([0.0, 1.0]), (n - 1,), n))
    transmitted, _ = measure(state, [proj_t, proj_r])
    if transmitted.state is None:
        return transmitted.probability, None
    return transmitted.probability, partial_trace(transmitted.state, spin_qubits)
