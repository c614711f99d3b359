"""Mode labels, envelopes, polarizations, and their inner products."""

import math

import numpy as np
import pytest

from conftest import random_envelope, random_label, random_polarization
from symphot import (
    GaussianEnvelope,
    InvalidEnvelopeError,
    ModeLabel,
    POL_D,
    POL_H,
    POL_L,
    POL_R,
    POL_V,
    Polarization,
    SampledEnvelope,
    envelope_overlap,
    gram_matrix,
    mode_overlap,
    polarization_overlap,
    quadrature_overlap,
)

rng = np.random.default_rng(101)


def test_gaussian_self_overlap_is_one():
    for _ in range(20):
        e = random_envelope(rng)
        assert np.isclose(envelope_overlap(e, e), 1.0, atol=1e-12)


def test_gaussian_overlap_frozen_value():
    a = GaussianEnvelope(sigma=1.0, tau=0.0, omega0=0.0)
    b = GaussianEnvelope(sigma=1.3, tau=0.9, omega0=1.7)
    # 40-digit adaptive quadrature of integral(conj(a(t)) * b(t) dt),
    # cross-checked by composite Simpson on [-18, 18] to 7e-17.
    frozen = 0.084952645752802393 - 0.121660145315088474j
    assert abs(envelope_overlap(a, b) - frozen) < 1e-13


def test_gaussian_overlap_matches_quadrature():
    for _ in range(25):
        a = random_envelope(rng)
        b = random_envelope(rng)
        closed = envelope_overlap(a, b)
        numeric = quadrature_overlap(a, b)
        assert abs(closed - numeric) < 1e-8


def test_overlap_conjugate_symmetry():
    for _ in range(20):
        a = random_envelope(rng)
        b = random_envelope(rng)
        assert np.isclose(envelope_overlap(a, b),
                          np.conj(envelope_overlap(b, a)), atol=1e-12)


def test_overlap_magnitude_bounded():
    # Cauchy-Schwarz for normalized pulses.
    for _ in range(20):
        a = random_envelope(rng)
        b = random_envelope(rng)
        assert abs(envelope_overlap(a, b)) <= 1.0 + 1e-12


def test_equal_width_overlap_magnitude():
    # For equal sigma the magnitude depends only on the detunings:
    # |<a, b>| = exp(-dtau^2/(8 sigma^2) - sigma^2 domega^2 / 2).
    for _ in range(20):
        sigma = 0.5 + 1.5 * rng.random()
        tau = rng.uniform(-2, 2)
        omega = rng.uniform(-3, 3)
        dtau = rng.uniform(-3, 3)
        domega = rng.uniform(-3, 3)
        a = GaussianEnvelope(sigma, tau, omega)
        b = GaussianEnvelope(sigma, tau + dtau, omega + domega)
        expected = math.exp(-dtau ** 2 / (8 * sigma ** 2)
                            - sigma ** 2 * domega ** 2 / 2)
        assert np.isclose(abs(envelope_overlap(a, b)), expected, atol=1e-12)


def test_gaussian_parameter_validation():
    with pytest.raises(InvalidEnvelopeError):
        GaussianEnvelope(sigma=0.0)
    with pytest.raises(InvalidEnvelopeError):
        GaussianEnvelope(sigma=-1.0)
    with pytest.raises(InvalidEnvelopeError):
        GaussianEnvelope(sigma=1e10)
    with pytest.raises(InvalidEnvelopeError):
        GaussianEnvelope(sigma=1.0, tau=math.inf)
    with pytest.raises(InvalidEnvelopeError):
        GaussianEnvelope(sigma=math.nan)


def _sample_gaussian(g, n=65537, span=8.0):
    # dense grid: the stored pulse is linearly interpolated between
    # samples, and that O(dt^2) error must stay below the 1e-8 checks
    lo = g.tau - span * g.sigma
    hi = g.tau + span * g.sigma
    t = np.linspace(lo, hi, n)
    dt = (hi - lo) / (n - 1)
    # stored samples hold the slow modulation; the carrier stays analytic
    slow = g.value(t) * np.exp(-1j * g.omega0 * t)
    return SampledEnvelope(lo, dt, slow, carrier=g.omega0)


def test_sampled_envelope_reproduces_gaussian():
    for _ in range(5):
        g = random_envelope(rng)
        s = _sample_gaussian(g)
        # the constructor discards a global phase, so compare magnitudes
        assert abs(abs(envelope_overlap(s, g)) - 1.0) < 1e-8
        assert abs(abs(envelope_overlap(g, s)) - 1.0) < 1e-8


def test_sampled_envelope_canonicalizes_global_phase():
    g = GaussianEnvelope(sigma=1.0, tau=0.3, omega0=2.0)
    s1 = _sample_gaussian(g)
    t = np.asarray(s1.times())
    rotated = np.asarray(s1.samples) * np.exp(0.7j)
    s2 = SampledEnvelope(s1.t_start, s1.dt, rotated, carrier=s1.carrier)
    assert np.isclose(envelope_overlap(s1, s2), 1.0, atol=1e-12)
    assert t.shape == np.asarray(s2.times()).shape


def test_sampled_envelope_rejects_truncated_support():
    # a window of +-2 sigma chops the pulse: edge samples are far above
    # 1e-6 of the peak
    g = GaussianEnvelope(sigma=1.0)
    t = np.linspace(-2, 2, 401)
    with pytest.raises(InvalidEnvelopeError):
        SampledEnvelope(-2.0, t[1] - t[0], g.value(t))


def test_sampled_envelope_rejects_degenerate_input():
    with pytest.raises(InvalidEnvelopeError):
        SampledEnvelope(0.0, -0.1, np.ones(16))
    with pytest.raises(InvalidEnvelopeError):
        SampledEnvelope(0.0, 0.1, np.array([1.0]))
    with pytest.raises(InvalidEnvelopeError):
        SampledEnvelope(0.0, 0.1, np.zeros(16))


def test_polarization_normalizes():
    p = Polarization(3, 4)
    assert np.isclose(p.ph, 0.6)
    assert np.isclose(p.pv, 0.8)
    assert np.isclose(abs(p.ph) ** 2 + abs(p.pv) ** 2, 1.0, atol=1e-15)
    with pytest.raises(InvalidEnvelopeError):
        Polarization(0, 0)


def test_polarization_overlaps():
    assert polarization_overlap(POL_H, POL_V) == 0
    assert np.isclose(polarization_overlap(POL_D, POL_H), 1 / math.sqrt(2))
    assert np.isclose(polarization_overlap(POL_R, POL_L), 0.0, atol=1e-15)
    for _ in range(10):
        p = random_polarization(rng)
        assert np.isclose(polarization_overlap(p, p), 1.0, atol=1e-12)


def test_mode_overlap_factorizes():
    for _ in range(15):
        a = random_label(rng, "a")
        b = random_label(rng, "a")
        expected = (envelope_overlap(a.envelope, b.envelope)
                    * polarization_overlap(a.polarization, b.polarization))
        assert np.isclose(mode_overlap(a, b), expected, atol=1e-12)


def test_mode_overlap_distinct_paths_is_exact_zero():
    a = random_label(rng, "a")
    b = ModeLabel("b", a.envelope, a.polarization)
    assert mode_overlap(a, b) == 0


def test_gram_matrix_hermitian_unit_diagonal():
    labels = [random_label(rng, "a") for _ in range(4)]
    g = gram_matrix(labels)
    assert np.allclose(g, g.conj().T, atol=1e-12)
    assert np.allclose(np.diag(g), 1.0, atol=1e-12)
    # positive semidefinite up to rounding
    assert np.linalg.eigvalsh(g).min() > -1e-10


def test_mode_label_ordering_is_deterministic():
    labels = [random_label(rng, p) for p in "abc" for _ in range(3)]
    order1 = sorted(labels)
    order2 = sorted(rng.permutation(np.array(labels, dtype=object)).tolist())
    assert order1 == order2
    a = labels[0]
    b = ModeLabel(a.path, a.envelope, a.polarization, a.env_flag)
    assert a == b and hash(a) == hash(b)
