"""Shared test utilities and independent oracles.

The oracles here are built directly from first principles (closed-form
amplitudes, explicit four-qubit circuits) and never call the code paths
they are used to check.
"""

import numpy as np

from flyspin.qcore import (
    DensityMatrix,
    Projector,
    apply_unitary,
    embed_operator,
    measure,
    partial_trace,
)

PSI_PLUS_VEC = np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / np.sqrt(2.0)

# control is the first qubit of the pair; flips the target when the control is down
CNOT_MAT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)


def random_unitary(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    d = 2**n_qubits
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    d = 2**n_qubits
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m))


def random_pure_density(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    d = 2**n_qubits
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


def closed_form_resource(theta1, theta2, eps_init=0.0, eps_z=0.0) -> np.ndarray:
    """Static-pair state after one transit, from the traced transit amplitudes.

    The transit leaves amplitude a = cos(t1)cos(t2) on the flying-up branch
    (statics |dd>) and amplitudes b = i cos(t1)sin(t2) on |du>,
    c = i e^{i t2} sin(t1) on |ud> in the flying-down branch. Tracing the
    flying qubit keeps the b/c coherence and adds |a|^2 to the separable
    weight. Imperfect initialization sends the whole eps branch to |dd>;
    inter-gate dephasing flips the sign of b with probability eps_z
    (equivalently, conjugates by Z on the first static qubit).
    """
    a = np.cos(theta1) * np.cos(theta2)
    b = 1j * np.cos(theta1) * np.sin(theta2)
    c = 1j * np.exp(1j * theta2) * np.sin(theta1)
    chi = np.array([0.0, c, b, 0.0], dtype=complex)  # basis uu, ud, du, dd
    chi_err = np.array([0.0, c, -b, 0.0], dtype=complex)
    rho = (1.0 - eps_init) * (
        (1.0 - eps_z) * np.outer(chi, chi.conj()) + eps_z * np.outer(chi_err, chi_err.conj())
    )
    sep = (1.0 - eps_init) * abs(a) ** 2 + eps_init
    rho[3, 3] += sep
    return rho


def pump_round_oracle(stored_fidelity: float, fresh_fidelity: float):
    """Four-qubit realization of one pump round.

    Two Bell-diagonal pairs (stored on qubits 0,1; fresh on 2,3), bilateral
    CNOT from the fresh pair onto the stored pair, X-basis parity
    measurement of the fresh pair, bit-flip correction of the stored pair.
    Returns {"even": (prob, fidelity), "odd": (prob, fidelity)}.
    """
    psi_m = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)

    def bell_mix(f):
        return f * np.outer(PSI_PLUS_VEC, PSI_PLUS_VEC.conj()) + (1.0 - f) * np.outer(
            psi_m, psi_m.conj()
        )

    rho = DensityMatrix(np.kron(bell_mix(stored_fidelity), bell_mix(fresh_fidelity)))
    rho = apply_unitary(rho, CNOT_MAT, (2, 0))
    rho = apply_unitary(rho, CNOT_MAT, (3, 1))
    projs = []
    for va in (_PLUS, _MINUS):
        for vb in (_PLUS, _MINUS):
            pa = embed_operator(np.outer(va, va.conj()), (2,), 4)
            pb = embed_operator(np.outer(vb, vb.conj()), (3,), 4)
            projs.append(Projector(pa @ pb))
    branches = measure(rho, projs)
    flip = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    result = {}
    for parity, idxs in (("even", (0, 3)), ("odd", (1, 2))):
        prob = sum(branches[i].probability for i in idxs)
        pooled = sum(
            branches[i].probability * partial_trace(branches[i].state, (0, 1)).mat
            for i in idxs
            if branches[i].state is not None
        ) / prob
        corrected = apply_unitary(DensityMatrix(pooled), flip, (1,))
        fid = float(np.real(PSI_PLUS_VEC.conj() @ corrected.mat @ PSI_PLUS_VEC))
        result[parity] = (prob, fid)
    return result
