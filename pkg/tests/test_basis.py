import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densemeas.basis import (
    coherence_bound,
    compose,
    dct_basis,
    forward_transform,
    identity_basis,
    inverse_transform,
    make_basis,
    random_orthonormal_basis,
    transpose,
    walsh_hadamard_basis,
)
from densemeas.model import make_sparse_signal, orthonormality_residual


def test_identity_small():
    assert identity_basis(1).matrix.tolist() == [[1.0]]
    assert orthonormality_residual(identity_basis(3).matrix) == 0.0


def test_identity_leaves_signal_unchanged():
    s = make_sparse_signal(1000, 10, seed=1)
    assert np.array_equal(forward_transform(identity_basis(1000), s), s.values)


def test_hadamard_two():
    h = walsh_hadamard_basis(2).matrix
    assert np.allclose(h, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=0)


def test_hadamard_four_entries_and_orthonormality():
    h = walsh_hadamard_basis(4).matrix
    assert np.all(np.abs(h) == 0.5)
    assert np.max(np.abs(h.T @ h - np.eye(4))) < 1e-12


def test_hadamard_flat_coherence():
    assert coherence_bound(walsh_hadamard_basis(8)) == pytest.approx(1.0, abs=1e-12)


def test_hadamard_needs_power_of_two():
    with pytest.raises(ValueError):
        walsh_hadamard_basis(6)


def test_random_one_dimensional():
    assert abs(random_orthonormal_basis(1, 9).matrix[0, 0]) == pytest.approx(1.0)


def test_random_orthonormal_and_deterministic():
    a = random_orthonormal_basis(8, 5).matrix
    assert np.max(np.abs(a.T @ a - np.eye(8))) < 1e-9
    assert a.tobytes() == random_orthonormal_basis(8, 5).matrix.tobytes()


def test_compose_identity_neutral():
    b = random_orthonormal_basis(6, 2)
    assert np.array_equal(compose(identity_basis(6), b).matrix, b.matrix)


def test_compose_with_transpose_is_identity():
    b = random_orthonormal_basis(6, 2)
    assert np.max(np.abs(compose(b, transpose(b)).matrix - np.eye(6))) < 1e-9


def test_hadamard_involutory():
    h = walsh_hadamard_basis(4)
    assert np.max(np.abs(compose(h, h).matrix - h.matrix @ h.matrix)) == 0
    assert np.allclose(compose(h, h).matrix, np.eye(4), atol=1e-12)


def test_compose_dimension_mismatch():
    with pytest.raises(ValueError):
        compose(identity_basis(2), identity_basis(3))


def test_coherence_examples():
    assert coherence_bound(identity_basis(4)) == 2.0
    assert coherence_bound(walsh_hadamard_basis(4)) == 1.0
    b = random_orthonormal_basis(16, 3)
    z = coherence_bound(b)
    scan = 0.0
    for row in b.matrix:
        for v in row:
            scan = max(scan, abs(v))
    assert 1.0 <= z <= 4.0
    assert z == pytest.approx(4.0 * scan, rel=1e-15)


def test_inverse_transform_examples():
    v = np.array([0.3, -2.0, 5.0])
    assert np.array_equal(inverse_transform(identity_basis(3), v), v)
    h2 = walsh_hadamard_basis(2)
    assert np.allclose(inverse_transform(h2, np.array([1, 1]) / np.sqrt(2)), [1.0, 0.0], atol=1e-15)


def test_dct_orthonormal():
    assert orthonormality_residual(dct_basis(12).matrix) < 1e-12


def test_make_basis_unknown():
    with pytest.raises(ValueError):
        make_basis("fourier", 4)


@given(st.sampled_from([1, 2, 4, 8, 16]), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_transforms_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    for b in (walsh_hadamard_basis(n), random_orthonormal_basis(n, seed), dct_basis(n)):
        w = forward_transform(b, v)
        assert np.linalg.norm(w) == pytest.approx(np.linalg.norm(v), rel=1e-12)
        assert np.allclose(inverse_transform(b, w), v, atol=1e-12)
