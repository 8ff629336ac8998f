import numpy as np
import pytest

from laddyn import linalg
from laddyn.errors import ValidationError

from conftest import evolved, random_hermitian, random_state

SY = np.array([[0, -1j], [1j, 0]])


class TestHermitianEig:
    def test_identity_eigenvalues(self):
        eig = linalg.hermitian_eig(np.eye(4))
        np.testing.assert_allclose(eig.eigenvalues, np.ones(4))

    def test_pauli_y_eigenvalues(self):
        eig = linalg.hermitian_eig(SY)
        np.testing.assert_allclose(eig.eigenvalues, [-1.0, 1.0], atol=1e-14)

    def test_random_hermitian_reconstruction(self, rng):
        m = random_hermitian(rng, 16)
        w, v = linalg.hermitian_eig(m)
        recon = (v * w) @ v.conj().T
        assert np.max(np.abs(recon - m)) < 1e-10

    def test_eigenvalues_ascending_and_orthonormal(self, rng):
        m = random_hermitian(rng, 16)
        w, v = linalg.hermitian_eig(m)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs(v.conj().T @ v - np.eye(16))) < 1e-12
        for i in range(16):
            assert np.max(np.abs(m @ v[:, i] - w[i] * v[:, i])) < 1e-10

    def test_eigenvalue_sum_equals_trace(self, rng):
        for n in (2, 4, 16):
            m = random_hermitian(rng, n)
            w, _ = linalg.hermitian_eig(m)
            assert abs(w.sum() - np.trace(m).real) < 1e-10

    def test_non_square_rejected(self):
        with pytest.raises(ValidationError, match="not square"):
            linalg.hermitian_eig(np.zeros((2, 3)))

    def test_non_hermitian_rejected_with_entry(self):
        m = np.eye(3, dtype=complex)
        m[0, 2] = 1e-3
        with pytest.raises(ValidationError, match=r"\(0,2\)"):
            linalg.hermitian_eig(m)


class TestKron:
    def test_identity_times_identity(self):
        np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_pauli_z_times_identity(self):
        sz = np.diag([1.0, -1.0])
        np.testing.assert_array_equal(
            linalg.kron(sz, np.eye(2)), np.diag([1.0, 1.0, -1.0, -1.0])
        )

    def test_against_index_formula(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        k = linalg.kron(a, b)
        for i in range(2):
            for j in range(2):
                for r in range(2):
                    for c in range(2):
                        # fma contraction in the vectorized product can shift an ulp
                        assert abs(k[2 * i + r, 2 * j + c] - a[i, j] * b[r, c]) < 1e-15


class TestPartialTrace:
    def test_initial_state_first_pair_is_bell(self):
        from laddyn import model

        rho = linalg.partial_trace_to_pair(model.initial_state(), 1, 2)
        bell = np.zeros(4, dtype=complex)
        bell[1] = bell[2] = 1 / np.sqrt(2)
        np.testing.assert_allclose(rho, np.outer(bell, bell.conj()), atol=1e-14)
        assert abs(np.trace(rho).real - 1.0) < 1e-12
        assert abs(np.trace(rho @ rho).real - 1.0) < 1e-12  # purity

    def test_initial_state_last_pair_is_vacuum(self):
        from laddyn import model

        rho = linalg.partial_trace_to_pair(model.initial_state(), 3, 4)
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 0] = 1.0
        np.testing.assert_allclose(rho, expected, atol=1e-14)

    def test_evolved_leg_pair_concurrence(self):
        # frozen from the closed-form leg concurrence |sin((mu+nu)t/2)|/2
        # at d=0.6, t=1.0, cross-checked against the full numeric route
        from laddyn import measures

        rho = linalg.partial_trace_to_pair(evolved(0.6, 1.0), 1, 3)
        assert abs(measures.wootters_concurrence(rho) - 0.45962879487657898) < 1e-10

    def test_validation(self):
        from laddyn import model

        psi = model.initial_state()
        with pytest.raises(ValidationError):
            linalg.partial_trace_to_pair(psi, 2, 2)
        with pytest.raises(ValidationError):
            linalg.partial_trace_to_pair(psi, 0, 1)
        with pytest.raises(ValidationError):
            linalg.partial_trace_to_pair(psi, 1, 5)
        with pytest.raises(ValidationError):
            linalg.partial_trace_to_pair(psi * 2.0, 1, 2)

    def test_random_state_gives_valid_density(self, rng):
        for p, q in ((1, 2), (2, 4), (3, 1)):
            rho = linalg.partial_trace_to_pair(random_state(rng), p, q)
            assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
            assert abs(np.trace(rho).real - 1.0) < 1e-12
            w = np.linalg.eigvalsh(rho)
            assert w.min() > -1e-12 and w.max() < 1 + 1e-12

    def test_product_state_recovered_exactly(self, rng):
        # psi = a on the pair, b on the complement: the reduction returns |a><a|
        a = random_state(rng, 4)
        b = random_state(rng, 4)
        cases = {
            (1, 2): np.einsum("i,j->ij", a, b).reshape(16),
            (3, 4): np.einsum("j,i->ij", a, b).reshape(16),
            (1, 3): np.einsum("ik,jl->ijkl", a.reshape(2, 2), b.reshape(2, 2)).reshape(16),
        }
        for (p, q), psi in cases.items():
            rho = linalg.partial_trace_to_pair(psi, p, q)
            assert np.max(np.abs(rho - np.outer(a, a.conj()))) < 1e-12

    def test_pair_order_swaps_subsystems(self, rng):
        psi = random_state(rng)
        r12 = linalg.partial_trace_to_pair(psi, 1, 2)
        r21 = linalg.partial_trace_to_pair(psi, 2, 1)
        swap = np.zeros((4, 4))
        for s1 in range(2):
            for s2 in range(2):
                swap[2 * s2 + s1, 2 * s1 + s2] = 1.0
        np.testing.assert_allclose(r21, swap @ r12 @ swap, atol=1e-14)


def test_basis_index_convention():
    assert linalg.basis_index((1, 0, 0, 0)) == 8
    assert linalg.basis_index((0, 1, 0, 0)) == 4
    assert linalg.basis_index((0, 0, 1, 0)) == 2
    assert linalg.basis_index((0, 0, 0, 1)) == 1
    assert linalg.basis_index((1, 1, 1, 1)) == 15
    assert linalg.ONE_PARTICLE_INDICES == (8, 4, 2, 1)
