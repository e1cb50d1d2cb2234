import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from flyspin.qcore import (
    HADAMARD,
    PAULI_X,
    PAULI_Z,
    DensityMatrix,
    KrausChannel,
    Projector,
    PureState,
    apply_channel,
    apply_unitary,
    embed_operator,
    embed_unitary,
    ket,
    measure,
    partial_trace,
    tensor_dm,
)
from flyspin.scattering import ForwardScatterParams, forward_unitary

from helpers import random_density, random_unitary

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def test_embed_identity_is_identity():
    assert_allclose(embed_unitary(np.eye(2), (0,), 3), np.eye(8), atol=1e-15)


def test_embed_z_on_qubit1_of_two():
    # qubit 0 is the most significant bit, so Z on qubit 1 alternates fastest
    assert_allclose(embed_unitary(PAULI_Z, (1,), 2), np.diag([1, -1, 1, -1]), atol=1e-15)


def test_embed_swap_permutes_basis_ket():
    state = ket("udd").density()
    swapped = apply_unitary(state, SWAP, (0, 1))
    assert_allclose(swapped.mat, ket("dud").density().mat, atol=1e-15)


def test_embed_rejects_nonunitary():
    with pytest.raises(ValueError, match="unitary"):
        embed_unitary(np.array([[1, 0], [0, 2]]), (0,), 2)


def test_embed_rejects_bad_targets():
    with pytest.raises(ValueError, match="duplicate"):
        embed_unitary(SWAP, (1, 1), 3)
    with pytest.raises(ValueError, match="range"):
        embed_unitary(PAULI_X, (3,), 2)


def test_embed_times_inverse_is_identity():
    rng = np.random.default_rng(11)
    for k in (1, 2, 3):
        for _ in range(25):
            u = random_unitary(k, rng)
            targets = tuple(rng.permutation(4)[:k])
            full = embed_unitary(u, targets, 4)
            inv = embed_unitary(u.conj().T, targets, 4)
            assert np.max(np.abs(full @ inv - np.eye(16))) < 1e-10


def test_apply_z_twice_is_identity():
    rng = np.random.default_rng(5)
    rho = random_density(2, rng)
    twice = apply_unitary(apply_unitary(rho, PAULI_Z, (1,)), PAULI_Z, (1,))
    assert_allclose(twice.mat, rho.mat, atol=1e-12)


def test_apply_hadamard_to_up():
    plus = apply_unitary(ket("u").density(), HADAMARD, (0,))
    assert_allclose(plus.mat, np.full((2, 2), 0.5), atol=1e-15)


def test_two_gate_populations():
    # flying qubit crosses both static qubits; populations follow the gate angles
    t1, t2 = 0.7, 1.1
    rho = ket("udd").density()
    rho = apply_unitary(rho, forward_unitary(ForwardScatterParams(t1)), (0, 1))
    rho = apply_unitary(rho, forward_unitary(ForwardScatterParams(t2)), (0, 2))
    pops = np.real(np.diag(rho.mat))
    assert abs(pops[0b011] - math.cos(t1) ** 2 * math.cos(t2) ** 2) < 1e-12
    assert abs(pops[0b110] - math.cos(t1) ** 2 * math.sin(t2) ** 2) < 1e-12
    assert abs(pops[0b101] - math.sin(t1) ** 2) < 1e-12


def test_partial_trace_bell_gives_mixed():
    bell = PureState(np.array([0, 1, 1, 0]) / np.sqrt(2)).density()
    reduced = partial_trace(bell, (0,))
    assert_allclose(reduced.mat, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_product_state():
    rng = np.random.default_rng(2)
    rho_a = random_density(1, rng)
    rho_b = random_density(2, rng)
    joint = tensor_dm(rho_a, rho_b)
    assert_allclose(partial_trace(joint, (0,)).mat, rho_a.mat, atol=1e-12)
    assert_allclose(partial_trace(joint, (1, 2)).mat, rho_b.mat, atol=1e-12)


def test_partial_trace_keep_order():
    rng = np.random.default_rng(3)
    rho_a = random_density(1, rng)
    rho_b = random_density(1, rng)
    joint = tensor_dm(rho_a, rho_b)
    swapped = partial_trace(joint, (1, 0))
    assert_allclose(swapped.mat, np.kron(rho_b.mat, rho_a.mat), atol=1e-12)


def test_partial_trace_empty_keep_raises():
    with pytest.raises(ValueError, match="nonempty"):
        partial_trace(ket("ud").density(), ())


def test_partial_trace_commutes_with_disjoint_channel():
    rng = np.random.default_rng(4)
    ch = KrausChannel([np.sqrt(0.7) * np.eye(2), np.sqrt(0.3) * PAULI_X])
    for _ in range(20):
        rho = random_density(3, rng)
        lhs = partial_trace(apply_channel(rho, ch, (0,)), (0, 1))
        rhs = apply_channel(partial_trace(rho, (0, 1)), ch, (0,))
        assert np.max(np.abs(lhs.mat - rhs.mat)) < 1e-12


def test_apply_channel_identity():
    rng = np.random.default_rng(6)
    rho = random_density(2, rng)
    out = apply_channel(rho, KrausChannel([np.eye(2)]), (1,))
    assert_allclose(out.mat, rho.mat, atol=1e-15)


def test_apply_two_qubit_channel():
    # a unitary channel on a qubit pair agrees with applying the unitary
    rng = np.random.default_rng(7)
    rho = random_density(3, rng)
    u = random_unitary(2, rng)
    via_channel = apply_channel(rho, KrausChannel([u]), (0, 2))
    direct = apply_unitary(rho, u, (0, 2))
    assert_allclose(via_channel.mat, direct.mat, atol=1e-12)


def test_full_dephasing_on_plus_gives_mixed():
    plus = apply_unitary(ket("u").density(), HADAMARD, (0,))
    ch = KrausChannel([np.sqrt(0.5) * np.eye(2), np.sqrt(0.5) * PAULI_Z])
    assert_allclose(apply_channel(plus, ch, (0,)).mat, np.eye(2) / 2, atol=1e-15)


def test_partial_dephasing_offdiagonal():
    # direct Kraus arithmetic: off-diagonal of |+><+| shrinks to 1/2 - eps
    eps = 0.089
    plus = np.full((2, 2), 0.5, dtype=complex)
    k0, k1 = np.sqrt(1 - eps) * np.eye(2), np.sqrt(eps) * PAULI_Z
    expected = k0 @ plus @ k0.conj().T + k1 @ plus @ k1.conj().T
    out = apply_channel(DensityMatrix(plus), KrausChannel([k0, k1]), (0,))
    assert_allclose(out.mat, expected, atol=1e-15)
    assert abs(out.mat[0, 1] - (0.5 - eps)) < 1e-12


def test_incomplete_kraus_set_rejected():
    with pytest.raises(ValueError, match="completeness"):
        KrausChannel([np.sqrt(0.5) * np.eye(2)])


def test_measure_up_state():
    projs = [Projector(np.diag([1.0, 0.0])), Projector(np.diag([0.0, 1.0]))]
    up, down = measure(ket("u").density(), projs)
    assert up.probability == pytest.approx(1.0, abs=1e-12)
    assert_allclose(up.state.mat, np.diag([1.0, 0.0]), atol=1e-12)
    assert down.probability == pytest.approx(0.0, abs=1e-12)
    assert down.state is None  # flagged, not renormalized garbage


def test_measure_maximally_mixed():
    projs = [Projector(np.diag([1.0, 0.0])), Projector(np.diag([0.0, 1.0]))]
    branches = measure(DensityMatrix(np.eye(2) / 2), projs)
    for branch, expected in zip(branches, (np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))):
        assert branch.probability == pytest.approx(0.5, abs=1e-12)
        assert_allclose(branch.state.mat, expected, atol=1e-12)


def test_measure_incomplete_set_raises():
    with pytest.raises(ValueError, match="identity"):
        measure(ket("u").density(), [Projector(np.diag([1.0, 0.0]))])


def test_measure_probabilities_sum_to_one_random():
    rng = np.random.default_rng(8)
    for _ in range(20):
        rho = random_density(2, rng)
        u = random_unitary(2, rng)
        projs = [Projector(np.outer(u[:, i], u[:, i].conj())) for i in range(4)]
        total = sum(b.probability for b in measure(rho, projs))
        assert abs(total - 1.0) < 1e-10


def test_operations_preserve_trace_and_hermiticity():
    rng = np.random.default_rng(9)
    rho = random_density(3, rng)
    rho = apply_unitary(rho, random_unitary(2, rng), (0, 2))
    ch = KrausChannel([np.sqrt(0.9) * np.eye(2), np.sqrt(0.1) * PAULI_Z])
    rho = apply_channel(rho, ch, (1,))
    rho = partial_trace(rho, (0, 1))
    assert abs(np.trace(rho.mat) - 1.0) < 1e-10
    assert np.max(np.abs(rho.mat - rho.mat.conj().T)) < 1e-10


def test_density_matrix_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(np.eye(2))
    with pytest.raises(ValueError, match="eigenvalue"):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_pure_state_validation():
    with pytest.raises(ValueError, match="norm"):
        PureState([1.0, 1.0])
    with pytest.raises(ValueError, match="spin string"):
        ket("ux")


def test_register_ceiling():
    with pytest.raises(ValueError, match="ceiling"):
        PureState(np.eye(2**7)[0])
