"""Symbolic operator algebra for continuous-mode quantum photonics.

States and observables are normally ordered polynomials in creation and
annihilation operators addressed by mode labels (path, temporal
envelope, polarization).  Labels on one path may overlap partially; all
physics reduces to their complex inner products via the commutation
relation ``[a(x), adag(y)] = <x, y>``.  Devices act as validated rewrite
rules on the operators, and every number the engine produces can be
cross-checked against a brute-force truncated-Fock embedding.
"""

from .algebra import (
    LadderOperator,
    NormalMonomial,
    OperatorPolynomial,
    adjoint,
    annihilate,
    create,
    multiply,
    normal_order,
    substitute,
    vacuum_expectation,
)
from .devices import (
    BogoliubovMap,
    LinearMap,
    LossChannel,
    PolarizationFilter,
    PovmOutcome,
    SpectralFilter,
    amplifier,
    apply_bogoliubov_observable,
    apply_filter,
    apply_linear,
    beam_splitter,
    environment_paths,
    lossy_channel,
    measure,
    outcome_probability,
    phase_shifter,
    polarization_rotator,
    source_pair,
    source_single,
    transform_observable,
)
from .errors import (
    CapacityError,
    CcrViolationError,
    FullyBlockedError,
    InvalidEnvelopeError,
    PrecisionError,
    StateValidationError,
    SymphotError,
    ZeroNormError,
    ZeroProbabilityError,
)
from .experiments import (
    HomConfig,
    HomResult,
    coincidence_operator,
    number_operator,
    run_hom,
    sweep_hom,
)
from .modes import (
    POL_A,
    POL_D,
    POL_H,
    POL_L,
    POL_R,
    POL_V,
    GaussianEnvelope,
    ModeLabel,
    Polarization,
    SampledEnvelope,
    envelope_overlap,
    gaussian_overlap,
    gram_matrix,
    mode_overlap,
    polarization_overlap,
    quadrature_overlap,
)
from .oracle import (
    FockVector,
    GramBasis,
    embed_ket,
    oracle_expectation,
    permanent,
    permanent_naive,
)
from .selfcheck import SuiteReport, format_report, run_selfcheck
from .states import (
    DensityOperator,
    KetState,
    expectation,
    expectation_ket,
    inner_product,
    norm_squared,
    normalize,
    partial_trace,
    trace,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
