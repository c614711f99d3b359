"""Optical devices as rewrite rules on ladder operators.

Passive linear elements substitute each creation operator by a linear
combination of creation operators on output labels; the constructor
verifies that the substitution preserves the commutation relations on
the declared mode tuple, which is the single correctness gate for every
device here.  Loss and amplification couple the signal to fresh
environment paths (orthogonal to everything by construction), filters
reshape envelopes or polarizations and leak the complement to the
environment, and photon-number measurements act directly on the factored
density operator.

Matrix convention: ``matrix[i]`` (row ``i``) holds the image of input
mode ``i`` under the annihilator map, ``a(m_i) -> sum_j B_ij a(out_j)``;
creators transform with the conjugate row.  The printed beam-splitter
matrix acts on the annihilator column vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import NormalMonomial, OperatorPolynomial, multiply, substitute
from .errors import (
    CcrViolationError,
    FullyBlockedError,
    StateValidationError,
    ZeroProbabilityError,
)
from .modes import (
    ModeLabel,
    Polarization,
    SampledEnvelope,
    canonicalization_phase,
    gram_matrix,
)
from .states import DensityOperator, KetState, trace

_CCR_TOL = 1e-10
_ENV_NAMESPACE = "~env"


def _sorted_labels(labels: Iterable[ModeLabel]) -> tuple[ModeLabel, ...]:
    return tuple(sorted(set(labels), key=ModeLabel.sort_key))


def environment_paths(state) -> set[str]:
    """Paths of all environment-flagged labels in a ket or density operator."""
    return {m.path for m in state.labels() if m.env_flag}


def _fresh_env_paths(base: str, taken: set[str], count: int) -> list[str]:
    out: list[str] = []
    k = 0
    while len(out) < count:
        cand = f"{base}{k}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        k += 1
    return out


class LinearMap:
    """Number-conserving substitution on a declared tuple of modes.

    Validated on construction: with G_in and G_out the Gram matrices of
    the input and output labels, ``B G_out B^H == G_in`` must hold to
    1e-10, otherwise the map would break a commutator somewhere.
    """

    __slots__ = ("modes", "out_modes", "matrix")

    def __init__(self, modes: Sequence[ModeLabel], matrix,
                 out_modes: Sequence[ModeLabel] | None = None):
        modes = tuple(modes)
        out_modes = modes if out_modes is None else tuple(out_modes)
        if len(set(modes)) != len(modes) or len(set(out_modes)) != len(out_modes):
            raise StateValidationError("duplicate labels in a LinearMap tuple")
        b = np.array(matrix, dtype=complex)
        if b.shape != (len(modes), len(out_modes)):
            raise StateValidationError(
                f"matrix shape {b.shape} does not match "
                f"{len(modes)} inputs x {len(out_modes)} outputs")
        if not np.all(np.isfinite(b.view(float))):
            raise StateValidationError("non-finite matrix entries")
        g_in = gram_matrix(modes)
        g_out = g_in if out_modes == modes else gram_matrix(out_modes)
        resid = b @ g_out @ b.conj().T - g_in
        worst = float(np.max(np.abs(resid))) if resid.size else 0.0
        if worst > _CCR_TOL:
            i, j = np.unravel_index(int(np.argmax(np.abs(resid))), resid.shape)
            raise CcrViolationError(
                f"map violates the commutation relations: "
                f"|[a'(m_{i}), adag'(m_{j})] - <m_{i}, m_{j}>| = {worst:.3e}")
        b.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "out_modes", out_modes)
        object.__setattr__(self, "matrix", b)

    def __setattr__(self, name, value):
        raise AttributeError("LinearMap is immutable")

    def _images(self):
        """(annihilator images, creator images) keyed by input label."""
        ann: dict = {}
        cre: dict = {}
        for i, m in enumerate(self.modes):
            row = self.matrix[i]
            ann[m] = OperatorPolynomial({
                NormalMonomial((), (self.out_modes[j],)): row[j]
                for j in range(len(self.out_modes)) if row[j] != 0.0})
            cre[m] = OperatorPolynomial({
                NormalMonomial((self.out_modes[j],), ()): row[j].conjugate()
                for j in range(len(self.out_modes)) if row[j] != 0.0})
        return ann, cre


def apply_linear(lmap: LinearMap, psi: KetState) -> KetState:
    """Transform a ket through a passive linear device."""
    ann, cre = lmap._images()
    return KetState(substitute(psi.poly, ann, cre))


def transform_observable(lmap: LinearMap, obs: OperatorPolynomial) -> OperatorPolynomial:
    """Heisenberg-side transform of an observable under a linear map."""
    ann, cre = lmap._images()
    return substitute(obs, ann, cre)


def _internal_key(label: ModeLabel):
    # the internal content of a mode is its envelope and polarization;
    # path and environment flag are addressing, handled by the caller
    return (*label.envelope.sort_key(), label.polarization.sort_key())


def _internals_on(paths: set[str], registry) -> list[ModeLabel]:
    """Distinct (envelope, polarization) combinations present on ``paths``,
    returned as representative labels in canonical order."""
    seen: dict = {}
    for m in registry:
        if m.path in paths:
            seen.setdefault(_internal_key(m), m)
    return [seen[k] for k in sorted(seen)]


def beam_splitter(c: complex, s: complex, path_a: str, path_b: str,
                  mode_registry: Iterable[ModeLabel]) -> LinearMap:
    """Two-port splitter ``[[c, s], [-s, c]]`` acting on (path_a, path_b),
    applied blockwise to every envelope/polarization combination present
    on either path.  Output labels reuse the input path tokens."""
    c = complex(c)
    s = complex(s)
    if abs(abs(c) ** 2 + abs(s) ** 2 - 1.0) > _CCR_TOL:
        raise StateValidationError(
            f"|c|^2 + |s|^2 = {abs(c)**2 + abs(s)**2} is not 1")
    if path_a == path_b:
        raise StateValidationError("beam splitter needs two distinct paths")
    registry = list(mode_registry)
    internals = _internals_on({path_a, path_b}, registry)
    if not internals:
        raise StateValidationError(
            f"registry holds no modes on paths {path_a!r}, {path_b!r}")
    # the environment flag belongs to the port, not to whichever
    # representative label happened to be kept for the internal block
    flag_a = any(m.env_flag for m in registry if m.path == path_a)
    flag_b = any(m.env_flag for m in registry if m.path == path_b)
    modes: list[ModeLabel] = []
    for rep in internals:
        modes.append(rep.with_path(path_a, env_flag=flag_a))
        modes.append(rep.with_path(path_b, env_flag=flag_b))
    n = len(internals)
    matrix = np.zeros((2 * n, 2 * n), dtype=complex)
    for k in range(n):
        matrix[2 * k:2 * k + 2, 2 * k:2 * k + 2] = [[c, s], [-s, c]]
    return LinearMap(modes, matrix)


def phase_shifter(phi: float, path: str,
                  mode_registry: Iterable[ModeLabel]) -> LinearMap:
    """Multiply every creator on ``path`` by ``exp(+i phi)``."""
    on_path = _sorted_labels(m for m in mode_registry if m.path == path)
    if not on_path:
        raise StateValidationError(f"registry holds no modes on path {path!r}")
    matrix = np.eye(len(on_path), dtype=complex) * np.exp(-1j * phi)
    return LinearMap(on_path, matrix)


def polarization_rotator(theta: float, path: str,
                         mode_registry: Iterable[ModeLabel]) -> LinearMap:
    """Rotate the polarization of every label on ``path`` by
    ``[[cos t, sin t], [-sin t, cos t]]`` acting on the (pH, pV) column.

    Realized as a label rewrite (identity matrix, rotated output labels),
    which preserves all overlaps because the rotation is real orthogonal.
    """
    on_path = _sorted_labels(m for m in mode_registry if m.path == path)
    if not on_path:
        raise StateValidationError(f"registry holds no modes on path {path!r}")
    ct, st = math.cos(theta), math.sin(theta)
    outs = []
    for m in on_path:
        p = m.polarization
        rotated = Polarization(ct * p.ph + st * p.pv, -st * p.ph + ct * p.pv)
        outs.append(ModeLabel(m.path, m.envelope, rotated, m.env_flag))
    return LinearMap(on_path, np.eye(len(on_path), dtype=complex), outs)


def source_single(psi: KetState, mode: ModeLabel) -> KetState:
    """Prepend one photon in ``mode``: psi -> adag(mode) psi."""
    return KetState(multiply(OperatorPolynomial.creation(mode), psi.poly))


def source_pair(psi: KetState, mode1: ModeLabel, mode2: ModeLabel) -> KetState:
    """Prepend a photon pair: psi -> adag(mode1) adag(mode2) psi."""
    return source_single(source_single(psi, mode2), mode1)


class LossChannel:
    """Uniform transmission ``eta`` on one path.

    One application mints a single fresh environment path and relocates a
    copy of every registry label there, then acts as a beam splitter of
    transmittance ``eta`` between the path and its environment copy; this
    is the unique choice that preserves the commutation relations for
    arbitrarily overlapping modes.  Trace out :func:`environment_paths`
    of the result to obtain the lossy mixed state.
    """

    __slots__ = ("eta", "path", "registry")

    def __init__(self, eta: float, path: str, mode_registry: Iterable[ModeLabel]):
        if not (0.0 <= eta <= 1.0):
            raise StateValidationError(f"eta={eta} is outside [0, 1]")
        registry = _sorted_labels(m for m in mode_registry if m.path == path)
        if not registry:
            raise StateValidationError(f"registry holds no modes on path {path!r}")
        object.__setattr__(self, "eta", float(eta))
        object.__setattr__(self, "path", path)
        object.__setattr__(self, "registry", registry)

    def __setattr__(self, name, value):
        raise AttributeError("LossChannel is immutable")

    def apply(self, psi: KetState) -> KetState:
        missing = [m for m in psi.labels()
                   if m.path == self.path and m not in self.registry]
        if missing:
            raise StateValidationError(
                f"state holds labels on {self.path!r} outside the registry: {missing}")
        taken = {m.path for m in psi.labels()} | {self.path}
        env_path = _fresh_env_paths(
            f"{_ENV_NAMESPACE}:{self.path}:loss:", taken, 1)[0]
        env_labels = [m.with_path(env_path, env_flag=True) for m in self.registry]
        lmap = beam_splitter(math.sqrt(self.eta), math.sqrt(1.0 - self.eta),
                             self.path, env_path,
                             tuple(self.registry) + tuple(env_labels))
        return apply_linear(lmap, psi)


def lossy_channel(eta: float, path: str,
                  mode_registry: Iterable[ModeLabel]) -> LossChannel:
    return LossChannel(eta, path, mode_registry)


class SpectralFilter:
    """Frequency response ``transfer(omega) -> complex``, |T| <= 1."""

    __slots__ = ("transfer",)

    def __init__(self, transfer: Callable):
        if not callable(transfer):
            raise StateValidationError("transfer must be callable")
        object.__setattr__(self, "transfer", transfer)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralFilter is immutable")


class PolarizationFilter:
    """Jones matrix with singular values at most 1."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex)
        if m.shape != (2, 2) or not np.all(np.isfinite(m.view(float))):
            raise StateValidationError("polarization filter needs a finite 2x2 matrix")
        excess = float(np.max(np.linalg.eigvalsh(m.conj().T @ m - np.eye(2))))
        if excess > 1e-10:
            raise StateValidationError(
                f"polarization filter amplifies: max eig(T^H T - 1) = {excess:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("PolarizationFilter is immutable")

    @classmethod
    def polarizer(cls, axis: Polarization) -> "PolarizationFilter":
        """Ideal projector onto one polarization axis."""
        v = np.array([axis.ph, axis.pv], dtype=complex)
        return cls(np.outer(v, v.conj()))


def _fft_grid(envelope):
    """Uniform time grid for the Fourier view of an envelope."""
    if isinstance(envelope, SampledEnvelope):
        return envelope.times(), envelope.dt, envelope.carrier
    lo = envelope.tau - 10.0 * envelope.sigma
    hi = envelope.tau + 10.0 * envelope.sigma
    # dt near sigma/3000: the filtered pulse is stored with linear
    # interpolation between samples, whose O(dt^2) error must stay below
    # the 1e-8 envelope-recovery tolerance.
    n = 2 ** 16
    dt = (hi - lo) / n
    return lo + dt * np.arange(n), dt, envelope.omega0


def _spectral_image(filt: SpectralFilter, label: ModeLabel, env_path: str):
    """Transmission scalar, transmitted label and its phase factor, and the
    environment label for one input mode."""
    ts, dt, carrier = _fft_grid(label.envelope)
    n = ts.size
    f_t = label.envelope.value(ts)
    omegas = 2.0 * math.pi * np.fft.fftfreq(n, d=dt)
    # F(w) = (2 pi)^(-1/2) Int f(t) exp(-i w t) dt, evaluated by DFT with
    # the grid-offset phase restored.
    f_w = dt / math.sqrt(2.0 * math.pi) * np.exp(-1j * omegas * ts[0]) * np.fft.fft(f_t)
    d_omega = 2.0 * math.pi / (n * dt)
    f_w = f_w / math.sqrt(float(np.sum(np.abs(f_w) ** 2) * d_omega))
    t_vals = np.asarray(filt.transfer(omegas), dtype=complex)
    if t_vals.shape != omegas.shape or not np.all(np.isfinite(t_vals.view(float))):
        raise StateValidationError("transfer function returned a bad array")
    if float(np.max(np.abs(t_vals))) > 1.0 + 1e-12:
        raise StateValidationError("transfer function exceeds unit magnitude")
    t_scalar = complex(np.sum(t_vals * np.abs(f_w) ** 2) * d_omega)
    env_label = label.with_path(env_path, env_flag=True)
    if abs(t_scalar) ** 2 < 1e-14:
        return t_scalar, None, 0.0j, env_label
    filtered_w = t_vals * f_w
    # f'(t) = (2 pi)^(-1/2) Int F'(w) exp(+i w t) dw, then demodulated at
    # the carrier so the stored samples hold only the slow modulation.
    f_out = (d_omega / math.sqrt(2.0 * math.pi) * n
             * np.fft.ifft(filtered_w * np.exp(1j * omegas * ts[0])))
    slow = f_out * np.exp(-1j * carrier * ts)
    phase = canonicalization_phase(slow)
    out_env = SampledEnvelope(float(ts[0]), dt, slow, carrier=carrier)
    out_label = ModeLabel(label.path, out_env, label.polarization, label.env_flag)
    return t_scalar, out_label, phase, env_label


def _polar_image(filt: PolarizationFilter, label: ModeLabel, env_path: str):
    vec = np.array([label.polarization.ph, label.polarization.pv], dtype=complex)
    out_vec = filt.matrix @ vec
    t_scalar = complex(math.sqrt(float(np.real(np.vdot(out_vec, out_vec)))))
    env_label = label.with_path(env_path, env_flag=True)
    if abs(t_scalar) ** 2 < 1e-14:
        return t_scalar, None, 0.0j, env_label
    out_pol = Polarization(complex(out_vec[0]), complex(out_vec[1]))
    out_label = ModeLabel(label.path, label.envelope, out_pol, label.env_flag)
    return t_scalar, out_label, 1.0 + 0.0j, env_label


def apply_filter(filt, path: str, psi: KetState, *,
                 require_transmission: bool = False) -> KetState:
    """Pass every mode of ``psi`` on ``path`` through a spectral or
    polarization filter.

    Each input creator is rewritten as ``conj(T_i) adag(m'_i) +
    sqrt(1 - |T_i|^2) adag(env_i)`` with the transmitted label reshaped
    and the complement sent to a fresh environment path per input mode.
    The result still contains the environment modes; trace them out for
    the open-system state or post-select on them for heralding.

    Raises
    ------
    FullyBlockedError
        Only when ``require_transmission`` is set and some mode has
        (numerically) zero transmission.
    """
    if not isinstance(filt, (SpectralFilter, PolarizationFilter)):
        raise StateValidationError(f"not a filter: {filt!r}")
    on_path = [m for m in psi.labels() if m.path == path]
    if not on_path:
        return psi
    taken = {m.path for m in psi.labels()} | {path}
    env_paths = _fresh_env_paths(f"{_ENV_NAMESPACE}:{path}:filter:", taken,
                                 len(on_path))
    cre_images: dict = {}
    ann_images: dict = {}
    for label, env_path in zip(on_path, env_paths):
        if isinstance(filt, SpectralFilter):
            t_scalar, out_label, phase, env_label = _spectral_image(
                filt, label, env_path)
        else:
            t_scalar, out_label, phase, env_label = _polar_image(
                filt, label, env_path)
        if out_label is None and require_transmission:
            raise FullyBlockedError(
                f"filter transmits nothing of {label!r}; "
                "the transmitted component cannot be post-selected")
        terms: dict = {}
        if out_label is not None:
            terms[NormalMonomial((out_label,), ())] = t_scalar.conjugate() * phase
        leak = math.sqrt(max(0.0, 1.0 - abs(t_scalar) ** 2))
        if leak > 0.0:
            terms[NormalMonomial((env_label,), ())] = leak
        image = OperatorPolynomial(terms)
        cre_images[label] = image
        ann_images[label] = image.adjoint()
    return KetState(substitute(psi.poly, ann_images, cre_images))


class BogoliubovMap:
    """Mode map that may mix creators and annihilators,
    ``a(m_i) -> sum_j U_ij a(m_j) + sum_j V_ij adag(m_j)``.

    Applied on the observable side only.  Validated on construction:
    ``U G U^H - V G V^H == G`` over the declared mode tuple, to 1e-10.
    """

    __slots__ = ("modes", "u", "v")

    def __init__(self, modes: Sequence[ModeLabel], u, v):
        modes = tuple(modes)
        if len(set(modes)) != len(modes):
            raise StateValidationError("duplicate labels in a BogoliubovMap")
        n = len(modes)
        u = np.array(u, dtype=complex)
        v = np.array(v, dtype=complex)
        if u.shape != (n, n) or v.shape != (n, n):
            raise StateValidationError(
                f"U/V must be {n}x{n}, got {u.shape} and {v.shape}")
        if not (np.all(np.isfinite(u.view(float))) and np.all(np.isfinite(v.view(float)))):
            raise StateValidationError("non-finite matrix entries")
        g = gram_matrix(modes)
        resid = u @ g @ u.conj().T - v @ g @ v.conj().T - g
        worst = float(np.max(np.abs(resid))) if resid.size else 0.0
        if worst > _CCR_TOL:
            i, j = np.unravel_index(int(np.argmax(np.abs(resid))), resid.shape)
            raise CcrViolationError(
                f"map violates the commutation relations at modes ({i}, {j}): "
                f"deviation {worst:.3e}")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def __setattr__(self, name, value):
        raise AttributeError("BogoliubovMap is immutable")

    @classmethod
    def from_linear(cls, lmap: LinearMap) -> "BogoliubovMap":
        if lmap.out_modes != lmap.modes:
            raise StateValidationError(
                "only endomorphic linear maps convert to Bogoliubov form")
        return cls(lmap.modes, lmap.matrix, np.zeros_like(lmap.matrix))


def amplifier(gain: float, path: str,
              mode_registry: Iterable[ModeLabel]) -> BogoliubovMap:
    """Phase-insensitive amplifier of power gain ``G >= 1`` on one path.

    Each mode squeezes against its copy on a single fresh environment
    path: ``U = sqrt(G) 1``, ``V = sqrt(G-1) X`` with ``X`` swapping the
    signal and environment blocks.
    """
    if not gain >= 1.0:
        raise StateValidationError(f"gain={gain} must be >= 1")
    on_path = _sorted_labels(m for m in mode_registry if m.path == path)
    if not on_path:
        raise StateValidationError(f"registry holds no modes on path {path!r}")
    taken = {m.path for m in mode_registry} | {path}
    env_path = _fresh_env_paths(f"{_ENV_NAMESPACE}:{path}:amp:", taken, 1)[0]
    env_labels = tuple(m.with_path(env_path, env_flag=True) for m in on_path)
    n = len(on_path)
    u = math.sqrt(gain) * np.eye(2 * n, dtype=complex)
    swap = np.zeros((2 * n, 2 * n), dtype=complex)
    swap[:n, n:] = np.eye(n)
    swap[n:, :n] = np.eye(n)
    v = math.sqrt(gain - 1.0) * swap
    return BogoliubovMap(tuple(on_path) + env_labels, u, v)


def apply_bogoliubov_observable(bmap: BogoliubovMap,
                                obs: OperatorPolynomial) -> OperatorPolynomial:
    """Heisenberg transform of an observable under a Bogoliubov map."""
    ann: dict = {}
    cre: dict = {}
    for i, m in enumerate(bmap.modes):
        terms: dict = {}
        for j, out in enumerate(bmap.modes):
            if bmap.u[i, j] != 0.0:
                terms[NormalMonomial((), (out,))] = bmap.u[i, j]
            if bmap.v[i, j] != 0.0:
                terms[NormalMonomial((out,), ())] = bmap.v[i, j]
        img = OperatorPolynomial(terms)
        ann[m] = img
        cre[m] = img.adjoint()
    return substitute(obs, ann, cre)


@dataclass(frozen=True)
class PovmOutcome:
    """Photon-counting outcome on one path: an exact count or a
    threshold click/no-click."""

    path: str
    kind: str
    n: int | None = None

    def __post_init__(self):
        if self.kind not in ("number", "threshold_on", "threshold_off"):
            raise StateValidationError(f"unknown outcome kind {self.kind!r}")
        if self.kind == "number":
            if self.n is None or self.n < 0:
                raise StateValidationError("number outcome needs n >= 0")
        elif self.n is not None:
            raise StateValidationError("threshold outcomes carry no count")

    @classmethod
    def number(cls, path: str, n: int) -> "PovmOutcome":
        return cls(path, "number", n)

    @classmethod
    def threshold_on(cls, path: str) -> "PovmOutcome":
        return cls(path, "threshold_on")

    @classmethod
    def threshold_off(cls, path: str) -> "PovmOutcome":
        return cls(path, "threshold_off")

    def _keeps(self, count: int) -> bool:
        if self.kind == "number":
            return count == self.n
        if self.kind == "threshold_on":
            return count >= 1
        return count == 0


def _project(rho: DensityOperator, outcome: PovmOutcome) -> DensityOperator:
    kept = {}
    for (ci, cj), c in rho.factors.items():
        ni = sum(1 for m in ci if m.path == outcome.path)
        nj = sum(1 for m in cj if m.path == outcome.path)
        if outcome._keeps(ni) and outcome._keeps(nj):
            kept[(ci, cj)] = c
    return DensityOperator(kept)


def outcome_probability(rho: DensityOperator, outcome: PovmOutcome) -> float:
    """Probability of the outcome on a (normalized) state."""
    return trace(_project(rho, outcome)).real


def measure(rho: DensityOperator, outcome: PovmOutcome):
    """Project onto a photon-counting outcome.

    Counting per path is exact even for overlapping modes (the per-path
    photon number of a creation monomial is its label count), so the
    projector keeps exactly the factor pairs whose creation lists hold a
    matching count on both sides.

    Returns
    -------
    (probability, post_state)

    Raises
    ------
    ZeroProbabilityError
        If the outcome probability falls below 1e-14.
    """
    projected = _project(rho, outcome)
    p = trace(projected).real
    if p < 1e-14:
        raise ZeroProbabilityError(
            f"outcome {outcome} has probability {p:.3e}; no post-state exists")
    return p, projected.scaled(1.0 / p)
