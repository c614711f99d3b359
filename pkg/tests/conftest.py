"""Shared helpers for the test suite: seeded random label factories.

Widths stay in [0.5, 2.0] and detunings within a few sigma so that the
generated modes overlap partially, which is exactly the regime the
contraction engine has to get right.
"""

from symphot import GaussianEnvelope, ModeLabel, Polarization


def random_polarization(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return Polarization(v[0], v[1])


def random_envelope(rng):
    return GaussianEnvelope(
        sigma=0.5 + 1.5 * rng.random(),
        tau=rng.uniform(-2.0, 2.0),
        omega0=rng.uniform(-3.0, 3.0),
    )


def random_label(rng, path):
    return ModeLabel(path, random_envelope(rng), random_polarization(rng))
