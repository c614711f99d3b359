"""Permanent evaluation and the dense truncated-Fock cross-check."""

import itertools

import numpy as np
import pytest

from conftest import random_label
from symphot import (
    FockVector,
    GramBasis,
    KetState,
    OperatorPolynomial,
    StateValidationError,
    embed_ket,
    expectation_ket,
    gram_matrix,
    inner_product,
    mode_overlap,
    multiply,
    norm_squared,
    normalize,
    oracle_expectation,
    permanent,
    permanent_naive,
)

rng = np.random.default_rng(404)


def test_permanent_base_cases():
    assert permanent(np.zeros((0, 0))) == 1  # empty product convention
    assert np.isclose(permanent(np.array([[3.5]])), 3.5)
    # 2x2: perm [[a,b],[c,d]] = a d + b c = 1*4 + 2*3 = 10
    assert np.isclose(permanent(np.array([[1, 2], [3, 4]])), 10.0)
    # all-ones n x n permanent is n!
    assert np.isclose(permanent(np.ones((3, 3))), 6.0)
    assert np.isclose(permanent(np.eye(4)), 1.0)


def test_permanent_frozen_integer_case():
    m = np.array([[1, 2, 0, 3],
                  [2, 1, 1, 0],
                  [0, 3, 2, 1],
                  [1, 0, 1, 2]], dtype=float)
    # brute-force permutation expansion over S_4
    assert np.isclose(permanent(m), 66.0)


def test_permanent_matches_naive_expansion():
    for n in range(1, 7):
        for _ in range(10):
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            assert abs(permanent(m) - permanent_naive(m)) < 1e-9


def test_permanent_row_expansion_recurrence():
    # perm(M) = sum_j M[0, j] * perm(M minus row 0, column j)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    minors = 0j
    for j in range(4):
        sub = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        minors += m[0, j] * permanent(sub)
    assert abs(permanent(m) - minors) < 1e-10


def test_permanent_input_validation():
    with pytest.raises(StateValidationError):
        permanent(np.ones((2, 3)))
    with pytest.raises(StateValidationError):
        permanent(np.ones((11, 11)))
    with pytest.raises(StateValidationError):
        permanent_naive(np.ones((9, 9)))


def test_gram_basis_orthogonalization():
    labels = [random_label(rng, "a") for _ in range(4)]
    basis = GramBasis(labels)
    g = gram_matrix(labels)
    c = np.asarray(basis.coeffs)
    # the coefficient rows must reproduce the Gram matrix
    assert np.allclose(c @ c.conj().T, g, atol=1e-10)
    with pytest.raises(StateValidationError):
        GramBasis([labels[0], labels[0]])


def test_fock_vector_ladder_arithmetic():
    labels = [random_label(rng, "a") for _ in range(2)]
    basis = GramBasis(labels)
    vac = FockVector.vacuum(basis, n_max=3)
    assert np.isclose(vac.norm_squared(), 1.0)
    one = vac.create_label(labels[0])
    # a(m) adag(m) |0> = |0> for a normalized mode
    back = one.annihilate_label(labels[0])
    assert np.isclose(back.inner(vac), 1.0, atol=1e-12)
    # adag adag |0> has squared norm 2 (boson enhancement)
    two = one.create_label(labels[0])
    assert np.isclose(two.norm_squared(), 2.0, atol=1e-12)
    with pytest.raises(StateValidationError):
        two.create_label(labels[0]).create_label(labels[0])  # exceeds n_max


def test_embedded_gram_matches_symbolic():
    labels = [random_label(rng, "a") for _ in range(3)]
    basis = GramBasis(labels)
    vac = FockVector.vacuum(basis, n_max=2)
    for i, j in itertools.product(range(3), repeat=2):
        vi = vac.create_label(labels[i])
        vj = vac.create_label(labels[j])
        assert np.isclose(vi.inner(vj), mode_overlap(labels[i], labels[j]),
                          atol=1e-12)


def test_embed_ket_preserves_inner_products():
    for _ in range(10):
        labels = [random_label(rng, "a") for _ in range(2)]
        labels.append(random_label(rng, "b"))
        basis = GramBasis(labels)
        psi = KetState.from_modes(labels[0], labels[1])
        phi = KetState.from_modes(labels[0], labels[2])
        ev = embed_ket(psi, basis, n_max=2)
        ew = embed_ket(phi, basis, n_max=2)
        assert np.isclose(ev.inner(ew), inner_product(psi, phi), atol=1e-9)
        assert np.isclose(ev.norm_squared(), norm_squared(psi), atol=1e-9)


def test_oracle_expectation_matches_symbolic():
    for _ in range(10):
        m1 = random_label(rng, "a")
        m2 = random_label(rng, "a")
        basis = GramBasis([m1, m2])
        psi = normalize(KetState.from_modes(m1, m2))
        obs = (multiply(OperatorPolynomial.creation(m1),
                        OperatorPolynomial.annihilation(m2))
               + multiply(OperatorPolynomial.creation(m2),
                          OperatorPolynomial.annihilation(m1)))
        dense = oracle_expectation(psi, obs, basis, n_max=3)
        symbolic = expectation_ket(psi, obs)
        assert np.isclose(dense, symbolic, atol=1e-9)


def test_embed_rejects_insufficient_truncation():
    m = random_label(rng, "a")
    basis = GramBasis([m])
    psi = KetState.from_modes(m, m)
    with pytest.raises(StateValidationError):
        embed_ket(psi, basis, n_max=1)
