"""Kets, density operators, inner products, and expectations."""

import numpy as np
import pytest

from conftest import random_label
from symphot import (
    DensityOperator,
    KetState,
    OperatorPolynomial,
    StateValidationError,
    ZeroNormError,
    expectation,
    expectation_ket,
    inner_product,
    mode_overlap,
    multiply,
    norm_squared,
    normalize,
    partial_trace,
    trace,
)

rng = np.random.default_rng(303)


def _number_monomial(label):
    return multiply(OperatorPolynomial.creation(label),
                    OperatorPolynomial.annihilation(label))


def test_single_photon_norm():
    m = random_label(rng, "a")
    assert np.isclose(norm_squared(KetState.from_modes(m)), 1.0, atol=1e-12)


def test_two_photon_norm_same_path():
    # || adag(m1) adag(m2) |0> ||^2 = 1 + |<m1, m2>|^2
    for _ in range(10):
        m1 = random_label(rng, "a")
        m2 = random_label(rng, "a")
        gamma = mode_overlap(m1, m2)
        nsq = norm_squared(KetState.from_modes(m1, m2))
        assert np.isclose(nsq, 1.0 + abs(gamma) ** 2, atol=1e-12)


def test_two_photon_inner_product_formula():
    # <m1 m2 | n1 n2> = <m1,n1><m2,n2> + <m1,n2><m2,n1>
    for _ in range(20):
        m1, m2, n1, n2 = (random_label(rng, "a") for _ in range(4))
        got = inner_product(KetState.from_modes(m1, m2),
                            KetState.from_modes(n1, n2))
        expected = (mode_overlap(m1, n1) * mode_overlap(m2, n2)
                    + mode_overlap(m1, n2) * mode_overlap(m2, n1))
        assert np.isclose(got, expected, atol=1e-12)


def test_inner_product_conjugate_symmetry():
    a = KetState.from_modes(random_label(rng, "a"), random_label(rng, "b"))
    b = KetState.from_modes(random_label(rng, "a"), random_label(rng, "b"))
    assert np.isclose(inner_product(a, b),
                      np.conj(inner_product(b, a)), atol=1e-12)


def test_ket_rejects_annihilators():
    m = random_label(rng, "a")
    with pytest.raises(StateValidationError):
        KetState(OperatorPolynomial.annihilation(m))


def test_expectation_of_number_monomial():
    m = random_label(rng, "a")
    psi = KetState.from_modes(m)
    assert np.isclose(expectation_ket(psi, _number_monomial(m)), 1.0,
                      atol=1e-12)
    # two photons in the same mode: <adag a> = 2 on the normalized state
    two = normalize(KetState.from_modes(m, m))
    assert np.isclose(expectation_ket(two, _number_monomial(m)), 2.0,
                      atol=1e-12)


def test_expectation_ket_vanishes_off_photon_shell():
    m = random_label(rng, "a")
    psi = KetState.from_modes(m)
    # a single creator has no diagonal matrix element on a number state
    assert expectation_ket(psi, OperatorPolynomial.creation(m)) == 0


def test_normalize_ket_and_zero_norm():
    m1 = random_label(rng, "a")
    m2 = random_label(rng, "a")
    psi = normalize(KetState.from_modes(m1, m2))
    assert np.isclose(norm_squared(psi), 1.0, atol=1e-12)
    with pytest.raises(ZeroNormError):
        normalize(KetState(OperatorPolynomial.zero()))


def test_density_from_ket_trace_and_hermiticity():
    psi = KetState.from_modes(random_label(rng, "a"), random_label(rng, "a"))
    rho = DensityOperator.from_ket(psi)
    assert np.isclose(trace(rho), norm_squared(psi), atol=1e-12)
    assert rho.is_hermitian()


def test_expectation_routes_agree():
    for _ in range(8):
        m1 = random_label(rng, "a")
        m2 = random_label(rng, "a")
        psi = normalize(KetState.from_modes(m1, m2))
        rho = DensityOperator.from_ket(psi)
        obs = _number_monomial(m1) + _number_monomial(m2)
        assert np.isclose(expectation(rho, obs), expectation_ket(psi, obs),
                          atol=1e-12)


def test_normalize_density():
    psi = KetState.from_modes(random_label(rng, "a"))
    rho = normalize(DensityOperator.from_ket(psi).scaled(3.0))
    assert np.isclose(trace(rho), 1.0, atol=1e-12)


def test_partial_trace_of_product_state():
    # tracing out an unentangled path leaves the other factor intact
    ma = random_label(rng, "a")
    mb = random_label(rng, "b")
    rho = DensityOperator.from_ket(KetState.from_modes(ma, mb))
    reduced = partial_trace(rho, ["b"])
    assert "b" not in reduced.paths()
    assert np.isclose(trace(reduced), trace(rho), atol=1e-12)
    assert np.isclose(expectation(reduced, _number_monomial(ma)),
                      expectation(rho, _number_monomial(ma)), atol=1e-12)


def test_partial_trace_absent_path_is_noop():
    ma = random_label(rng, "a")
    rho = DensityOperator.from_ket(KetState.from_modes(ma))
    reduced = partial_trace(rho, ["nowhere"])
    assert np.isclose(trace(reduced), trace(rho), atol=1e-14)


def test_state_introspection():
    ma = random_label(rng, "a")
    mb = random_label(rng, "b")
    psi = KetState.from_modes(ma, mb)
    assert psi.paths() == {"a", "b"}
    assert set(psi.labels()) == {ma, mb}
    assert psi.photon_numbers() == {2}
