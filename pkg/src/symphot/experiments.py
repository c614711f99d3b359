"""Two-photon interference experiments.

The coincidence observable used here counts photons per path without
caring which overlapping wave packets carry them.  For a family of
labels m_1..m_n on one path with Gram matrix G, the number operator is
the dual-frame sum ``sum_ab (G^-1)_ab adag(m_a) a(m_b)``; the inverse
weights are what make the count basis-independent when the labels are
not orthogonal (a plain diagonal sum would double-count shared support).
A pseudo-inverse keeps the weights finite when labels become linearly
dependent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import (
    NormalMonomial,
    OperatorPolynomial,
    multiply,
)
from .devices import apply_linear, beam_splitter
from .errors import StateValidationError, SymphotError
from .modes import (
    GaussianEnvelope,
    ModeLabel,
    POL_H,
    Polarization,
    envelope_overlap,
    gram_matrix,
    polarization_overlap,
)
from .states import KetState, expectation_ket, norm_squared

#: The two symbolic routes to a coincidence probability must agree this well.
ROUTE_AGREEMENT_TOL = 1e-12

_SQRT_HALF = 2.0 ** -0.5


def number_operator(labels: Sequence[ModeLabel]) -> OperatorPolynomial:
    """Total photon number on one path spanned by possibly overlapping labels."""
    labels = tuple(sorted(set(labels), key=ModeLabel.sort_key))
    if not labels:
        raise StateValidationError("number operator needs at least one label")
    paths = {m.path for m in labels}
    if len(paths) > 1:
        raise StateValidationError(
            f"number operator spans several paths: {sorted(paths)}")
    weights = np.linalg.pinv(gram_matrix(labels), rcond=1e-12, hermitian=True)
    terms = {}
    for a, ma in enumerate(labels):
        for b, mb in enumerate(labels):
            w = complex(weights[a, b])
            if w != 0.0:
                terms[NormalMonomial((ma,), (mb,))] = w
    return OperatorPolynomial(terms)


def coincidence_operator(
        modes_by_path: Mapping[str, Sequence[ModeLabel]]) -> OperatorPolynomial:
    """Product of per-path number operators, one factor per detector."""
    if not modes_by_path:
        raise StateValidationError("coincidence operator needs at least one path")
    result = None
    for path in sorted(modes_by_path):
        labels = modes_by_path[path]
        if not labels:
            raise StateValidationError(f"no labels supplied for path {path!r}")
        if any(m.path != path for m in labels):
            raise StateValidationError(
                f"labels under key {path!r} live on other paths")
        n_op = number_operator(labels)
        result = n_op if result is None else multiply(result, n_op)
    return result


def run_hom(mode1: ModeLabel, mode2: ModeLabel) -> float:
    """Coincidence probability for one photon in each input of a balanced
    splitter.

    Computed twice and cross-checked: once as the expectation of the
    two-detector coincidence operator, once as the squared norm of the
    one-photon-per-output component of the state.  Disagreement beyond
    1e-12 means the algebra is inconsistent, so it raises instead of
    returning either number.
    """
    if mode1.path == mode2.path:
        raise StateValidationError("the two photons must enter distinct paths")
    psi = KetState.from_modes(mode1, mode2)
    splitter = beam_splitter(_SQRT_HALF, _SQRT_HALF, mode1.path, mode2.path,
                             psi.labels())
    out = apply_linear(splitter, psi)

    by_path: dict[str, list[ModeLabel]] = {mode1.path: [], mode2.path: []}
    for label in out.labels():
        by_path[label.path].append(label)
    coincidence = coincidence_operator(by_path)
    via_observable = expectation_ket(out, coincidence).real

    kept = {
        mono: c for mono, c in out.poly.terms.items()
        if mono.creation_count(mode1.path) == 1
        and mono.creation_count(mode2.path) == 1
    }
    via_projection = norm_squared(KetState(OperatorPolynomial(kept)))

    if abs(via_observable - via_projection) > ROUTE_AGREEMENT_TOL:
        raise SymphotError(
            f"coincidence routes disagree: observable {via_observable!r} vs "
            f"projection {via_projection!r}")
    if not -1e-12 <= via_observable <= 0.5 + 1e-12:
        raise SymphotError(
            f"coincidence probability {via_observable!r} outside [0, 1/2]")
    return float(via_observable)


@dataclass(frozen=True)
class HomConfig:
    """Grid scan of a two-photon dip over arrival-time and carrier detuning.

    Photon 1 is a Gaussian pulse of width ``sigma1`` at time 0 and carrier
    ``omega0``; photon 2 has width ``sigma2``, arrives ``dtau`` later, and
    is detuned by ``domega``.
    """

    sigma1: float
    sigma2: float
    omega0: float
    dtau_values: tuple[float, ...]
    domega_values: tuple[float, ...]
    pol1: Polarization = POL_H
    pol2: Polarization = POL_H
    path1: str = "a"
    path2: str = "b"

    def __post_init__(self):
        if not self.dtau_values or not self.domega_values:
            raise StateValidationError("detuning grids must be non-empty")
        if self.path1 == self.path2:
            raise StateValidationError("input paths must differ")


@dataclass(frozen=True, eq=False)
class HomResult:
    """Coincidence probabilities over the detuning grid.

    Arrays are indexed ``[i_dtau, i_domega]``.  ``gamma_sq`` holds the
    squared magnitude of the full mode overlap (envelope times
    polarization), from which the analytic dip is ``(1 - gamma_sq) / 2``.
    """

    config: HomConfig
    p_coinc: np.ndarray = field(repr=False)
    gamma_sq: np.ndarray = field(repr=False)

    def analytic_coincidence(self) -> np.ndarray:
        return 0.5 * (1.0 - self.gamma_sq)


def sweep_hom(config: HomConfig) -> HomResult:
    """Run the dip scan over the full detuning grid."""
    env1 = GaussianEnvelope(config.sigma1, tau=0.0, omega0=config.omega0)
    mode1 = ModeLabel(config.path1, env1, config.pol1)
    shape = (len(config.dtau_values), len(config.domega_values))
    p_coinc = np.zeros(shape)
    gamma_sq = np.zeros(shape)
    pol_ov = polarization_overlap(config.pol1, config.pol2)
    for i, dtau in enumerate(config.dtau_values):
        for j, domega in enumerate(config.domega_values):
            env2 = GaussianEnvelope(config.sigma2, tau=dtau,
                                    omega0=config.omega0 + domega)
            mode2 = ModeLabel(config.path2, env2, config.pol2)
            gamma = envelope_overlap(env1, env2) * pol_ov
            gamma_sq[i, j] = abs(gamma) ** 2
            p_coinc[i, j] = run_hom(mode1, mode2)
    return HomResult(config, p_coinc, gamma_sq)
