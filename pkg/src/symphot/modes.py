"""Mode labels and their inner products.

A single photon is addressed by where it travels (an opaque path token),
its temporal envelope, and its polarization.  Distinct paths are exactly
orthogonal; envelopes and polarizations on the same path may overlap
partially, and every contraction performed by the operator algebra
reduces to the complex inner products defined here.

Two envelope representations are supported.  ``GaussianEnvelope`` is the
analytic workhorse: a normalized Gaussian pulse of rms width ``sigma``
centered at ``tau`` riding a carrier ``exp(+i*omega0*(t - tau))``; the
overlap of two such pulses has a closed form that is checked against
direct quadrature.  ``SampledEnvelope`` holds an arbitrary pulse on a
uniform time grid (used for the output of spectral filters); the carrier
is kept analytic so the stored samples only need to resolve the slow
modulation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidEnvelopeError, PrecisionError

# Quadrature policy: integration windows extend 8 sigma past the pulse
# centers (tail contributions are below exp(-32)), and a result is
# accepted only once doubling the resolution moves it by less than
# _CONVERGENCE_TOL.
_WINDOW_SIGMAS = 8.0
_CONVERGENCE_TOL = 1e-9
_MAX_POINTS = 2 ** 21

# Width bounds: outside these the pulse degenerates toward a delta spike
# or a flat wave, neither of which this representation supports.
_SIGMA_MIN = 1e-9
_SIGMA_MAX = 1e9


@dataclass(frozen=True)
class GaussianEnvelope:
    """Normalized Gaussian pulse ``(2 pi sigma^2)^(-1/4) *
    exp(-(t-tau)^2/(4 sigma^2)) * exp(+i omega0 (t-tau))``.

    Parameters
    ----------
    sigma : float
        RMS temporal width, ``0 < sigma`` and far from the delta/flat limits.
    tau : float
        Arrival time of the pulse peak.
    omega0 : float
        Carrier angular frequency.
    """

    sigma: float
    tau: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        vals = (self.sigma, self.tau, self.omega0)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidEnvelopeError(f"non-finite Gaussian parameters {vals}")
        if not (_SIGMA_MIN < self.sigma < _SIGMA_MAX):
            raise InvalidEnvelopeError(
                f"sigma={self.sigma} is outside ({_SIGMA_MIN}, {_SIGMA_MAX}); "
                "delta-spike and flat-wave limits are not representable"
            )

    def value(self, t):
        """Evaluate the envelope at times ``t`` (scalar or array)."""
        t = np.asarray(t, dtype=float)
        norm = (2.0 * math.pi * self.sigma ** 2) ** -0.25
        arg = t - self.tau
        return norm * np.exp(-(arg ** 2) / (4.0 * self.sigma ** 2) + 1j * self.omega0 * arg)

    def sort_key(self):
        return (0, (self.tau, self.omega0, self.sigma))

    def _window(self):
        pad = _WINDOW_SIGMAS * self.sigma
        return self.tau - pad, self.tau + pad

    def _dt_hint(self):
        return self.sigma / 8.0

    def _carrier(self):
        return self.omega0


def _canonical_phase(samples):
    """Phase of the largest-magnitude sample (the canonicalization factor)."""
    k = int(np.argmax(np.abs(samples)))
    peak = samples[k]
    mag = abs(peak)
    if mag == 0.0:
        raise InvalidEnvelopeError("all-zero sample array")
    return peak / mag


class SampledEnvelope:
    """Pulse given by complex samples on a uniform time grid.

    The physical envelope is ``interp(samples)(t) * exp(+i*carrier*t)``:
    samples hold the slow modulation, the carrier stays analytic.  On
    construction the samples are normalized to unit L2 norm and rotated
    by a global phase so the largest-magnitude sample is real positive
    (a canonical representative of the ray; callers that need the
    discarded phase use :func:`canonicalization_phase` first).

    Raises
    ------
    InvalidEnvelopeError
        If the grid is degenerate, the samples are all zero, or the grid
        does not span the support (edge samples above 1e-6 of the peak).
    """

    __slots__ = ("t_start", "dt", "carrier", "samples", "_bytes", "_hash")

    def __init__(self, t_start, dt, samples, carrier=0.0):
        samples = np.array(samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 4:
            raise InvalidEnvelopeError("need a 1-d array of at least 4 samples")
        if not (math.isfinite(t_start) and math.isfinite(dt) and math.isfinite(carrier)):
            raise InvalidEnvelopeError("non-finite grid parameters")
        if dt <= 0.0:
            raise InvalidEnvelopeError(f"dt={dt} must be positive")
        if not np.all(np.isfinite(samples.view(float))):
            raise InvalidEnvelopeError("non-finite samples")
        norm_sq = float(np.trapezoid(np.abs(samples) ** 2, dx=dt))
        if norm_sq < 1e-300:
            raise InvalidEnvelopeError("samples have (numerically) zero norm")
        samples = samples / math.sqrt(norm_sq)
        samples = samples * np.conj(_canonical_phase(samples))
        peak = float(np.max(np.abs(samples)))
        edge = max(abs(samples[0]), abs(samples[-1]))
        if edge > 1e-6 * peak:
            raise InvalidEnvelopeError(
                f"grid does not span the support: edge/peak = {edge / peak:.2e} > 1e-6"
            )
        samples.setflags(write=False)
        object.__setattr__(self, "t_start", float(t_start))
        object.__setattr__(self, "dt", float(dt))
        object.__setattr__(self, "carrier", float(carrier))
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "_bytes", samples.tobytes())
        object.__setattr__(
            self, "_hash",
            hash((self.t_start, self.dt, self.carrier, samples.size, self._bytes)),
        )

    def __setattr__(self, name, value):
        raise AttributeError("SampledEnvelope is immutable")

    @property
    def t_end(self):
        return self.t_start + self.dt * (self.samples.size - 1)

    def times(self):
        return self.t_start + self.dt * np.arange(self.samples.size)

    def value(self, t):
        """Evaluate by linear interpolation of the slow part; zero outside
        the grid."""
        t = np.asarray(t, dtype=float)
        grid = self.times()
        slow = (np.interp(t, grid, self.samples.real, left=0.0, right=0.0)
                + 1j * np.interp(t, grid, self.samples.imag, left=0.0, right=0.0))
        if self.carrier == 0.0:
            return slow
        return slow * np.exp(1j * self.carrier * t)

    def __eq__(self, other):
        if not isinstance(other, SampledEnvelope):
            return NotImplemented
        return (self.t_start == other.t_start and self.dt == other.dt
                and self.carrier == other.carrier and self._bytes == other._bytes)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (f"SampledEnvelope(t_start={self.t_start}, dt={self.dt}, "
                f"n={self.samples.size}, carrier={self.carrier})")

    def sort_key(self):
        return (1, (self.t_start, self.dt, self.carrier, float(self.samples.size),
                    self._bytes))

    def _window(self):
        return self.t_start, self.t_end

    def _dt_hint(self):
        return self.dt

    def _carrier(self):
        return self.carrier


def canonicalization_phase(samples):
    """Phase factor ``p`` such that constructing a SampledEnvelope from
    ``samples`` stores ``normalized(samples) * conj(p)``.

    A creation operator built on the raw ray therefore equals ``p`` times
    the creation operator on the stored canonical envelope.
    """
    return complex(_canonical_phase(np.asarray(samples, dtype=complex)))


@dataclass(frozen=True)
class Polarization:
    """Normalized Jones vector ``ph |H> + pv |V>``.

    The constructor rescales to unit norm; a zero or non-finite vector is
    rejected.  The global phase is kept as given (it matters relative to
    other terms of a superposition).
    """

    ph: complex
    pv: complex

    def __post_init__(self):
        ph = complex(self.ph)
        pv = complex(self.pv)
        if not all(math.isfinite(v) for v in (ph.real, ph.imag, pv.real, pv.imag)):
            raise InvalidEnvelopeError("non-finite polarization components")
        norm = math.sqrt(abs(ph) ** 2 + abs(pv) ** 2)
        if norm < 1e-154:
            raise InvalidEnvelopeError("zero polarization vector")
        object.__setattr__(self, "ph", ph / norm)
        object.__setattr__(self, "pv", pv / norm)

    def sort_key(self):
        return (self.ph.real, self.ph.imag, self.pv.real, self.pv.imag)


POL_H = Polarization(1.0, 0.0)
POL_V = Polarization(0.0, 1.0)
POL_D = Polarization(1.0, 1.0)          # (H+V)/sqrt(2)
POL_A = Polarization(1.0, -1.0)         # (H-V)/sqrt(2)
POL_R = Polarization(1.0, -1.0j)        # right circular
POL_L = Polarization(1.0, 1.0j)         # left circular


@dataclass(frozen=True)
class ModeLabel:
    """Identity of one optical mode: path token, envelope, polarization,
    and a flag marking environment (loss/filter leakage) modes.

    Labels are immutable, hashable, and totally ordered, so operator
    monomials over them have a unique canonical form.
    """

    path: str
    envelope: GaussianEnvelope | SampledEnvelope
    polarization: Polarization = POL_H
    env_flag: bool = False

    def __post_init__(self):
        # labels are the innermost objects of every dict the engine
        # touches, so their key and hash are computed once
        object.__setattr__(self, "_key", (
            self.path, *self.envelope.sort_key(),
            self.polarization.sort_key(), self.env_flag))
        object.__setattr__(self, "_hash", hash(
            (self.path, self.envelope, self.polarization, self.env_flag)))

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return self._key

    def __lt__(self, other):
        if not isinstance(other, ModeLabel):
            return NotImplemented
        return self._key < other._key

    def with_path(self, path, env_flag=None):
        """Copy of this label relocated to another path."""
        flag = self.env_flag if env_flag is None else env_flag
        return ModeLabel(path, self.envelope, self.polarization, flag)


def gaussian_overlap(a: GaussianEnvelope, b: GaussianEnvelope) -> complex:
    """Closed-form overlap ``Int conj(a)(t) b(t) dt`` of two Gaussian pulses.

    For widths s1, s2 (S^2 = s1^2 + s2^2), delay dtau = tau_a - tau_b and
    detuning dw = w_a - w_b:

        sqrt(2 s1 s2 / S^2)
        * exp(-dtau^2/(4 S^2) - (s1^2 s2^2 / S^2) dw^2)
        * exp(+i dtau (s1^2 w_a + s2^2 w_b) / S^2)
    """
    s1, s2 = a.sigma, b.sigma
    ssq = s1 * s1 + s2 * s2
    dtau = a.tau - b.tau
    dw = a.omega0 - b.omega0
    amp = math.sqrt(2.0 * s1 * s2 / ssq) * math.exp(
        -dtau * dtau / (4.0 * ssq) - (s1 * s1 * s2 * s2 / ssq) * dw * dw
    )
    phase = dtau * (s1 * s1 * a.omega0 + s2 * s2 * b.omega0) / ssq
    return amp * cmath.exp(1j * phase)


def _trap_overlap(a, b, lo, hi, n):
    ts = np.linspace(lo, hi, n + 1)
    fa = a.value(ts)
    fb = b.value(ts)
    return complex(np.trapezoid(np.conj(fa) * fb, dx=(hi - lo) / n))


def quadrature_overlap(a, b) -> complex:
    """Overlap by composite-trapezoid quadrature.

    Serves as the independent numerical check of :func:`gaussian_overlap`
    and as the evaluation route whenever a sampled envelope is involved.
    For analytic integrands the resolution is doubled until two successive
    results agree to 1e-9; sampled data on a shared grid with a shared
    carrier integrates directly (its grid *defines* the function).

    Raises
    ------
    PrecisionError
        If the doubling loop hits the point cap without converging.
    """
    both_sampled = isinstance(a, SampledEnvelope) and isinstance(b, SampledEnvelope)
    if both_sampled and (a.t_start, a.dt, a.samples.size, a.carrier) == (
            b.t_start, b.dt, b.samples.size, b.carrier):
        return complex(np.trapezoid(np.conj(a.samples) * b.samples, dx=a.dt))

    lo = min(a._window()[0], b._window()[0])
    hi = max(a._window()[1], b._window()[1])
    dcarrier = abs(a._carrier() - b._carrier())
    dt_target = min(
        a._dt_hint(),
        b._dt_hint(),
        2.0 * math.pi / (20.0 * (dcarrier + 1e-12)),
        (hi - lo) / 64.0,
    )
    n = 1024
    while n < (hi - lo) / dt_target:
        n *= 2
    val = _trap_overlap(a, b, lo, hi, n)
    while 2 * n <= _MAX_POINTS:
        n *= 2
        refined = _trap_overlap(a, b, lo, hi, n)
        if abs(refined - val) <= _CONVERGENCE_TOL:
            return refined
        val = refined
    raise PrecisionError(
        f"overlap quadrature did not converge to {_CONVERGENCE_TOL} "
        f"within {_MAX_POINTS} points on [{lo}, {hi}]"
    )


def envelope_overlap(a, b) -> complex:
    """Overlap of two envelopes, analytic where possible."""
    if a is b or a == b:
        return 1.0 + 0.0j
    if isinstance(a, GaussianEnvelope) and isinstance(b, GaussianEnvelope):
        return gaussian_overlap(a, b)
    return quadrature_overlap(a, b)


def polarization_overlap(a: Polarization, b: Polarization) -> complex:
    return a.ph.conjugate() * b.ph + a.pv.conjugate() * b.pv


def mode_overlap(a: ModeLabel, b: ModeLabel) -> complex:
    """Full single-mode inner product: path delta times envelope overlap
    times polarization overlap.  The first argument is the conjugated side."""
    if a.path != b.path:
        return 0.0j
    if a == b:
        return 1.0 + 0.0j
    pol = polarization_overlap(a.polarization, b.polarization)
    if pol == 0.0:
        return 0.0j
    return envelope_overlap(a.envelope, b.envelope) * pol


def gram_matrix(labels) -> np.ndarray:
    """Hermitized matrix of pairwise mode overlaps, row side conjugated."""
    labels = list(labels)
    n = len(labels)
    g = np.zeros((n, n), dtype=complex)
    for i in range(n):
        g[i, i] = mode_overlap(labels[i], labels[i])
        for j in range(i + 1, n):
            val = mode_overlap(labels[i], labels[j])
            g[i, j] = val
            g[j, i] = val.conjugate()
    return g
