"""Pure and mixed states over the mode algebra.

A ket is a creation-only polynomial applied to the vacuum.  A density
operator is kept in factored form: a complex-weighted set of outer
products of creation monomials,

    rho = sum_{I,J} c_{I,J}  adag(I)|0><0| adag(J)^dagger,

so traces, partial traces over environment paths, and operator
expectations all reduce to vacuum expectations of finite words, which the
rewrite engine evaluates exactly.
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterable, Mapping

from .algebra import (
    ContractionCache,
    LadderOperator,
    NormalMonomial,
    OperatorPolynomial,
    PRUNE_TOL,
)
from .errors import StateValidationError, ZeroNormError
from .modes import ModeLabel

#: Squared norms / traces below this are treated as zero.
ZERO_NORM_TOL = 1e-14


def _ann_word(labels):
    return tuple(LadderOperator(False, m) for m in labels)


def _cre_word(labels):
    return tuple(LadderOperator(True, m) for m in labels)


class KetState:
    """A creation-only polynomial applied to the vacuum."""

    __slots__ = ("poly",)

    def __init__(self, poly: OperatorPolynomial):
        for mono in poly.terms:
            if mono.annihilations:
                raise StateValidationError(
                    f"ket polynomial contains an annihilator term: {mono!r}")
        object.__setattr__(self, "poly", poly)

    def __setattr__(self, name, value):
        raise AttributeError("KetState is immutable")

    @classmethod
    def vacuum(cls) -> "KetState":
        return cls(OperatorPolynomial.identity())

    @classmethod
    def from_modes(cls, *modes: ModeLabel) -> "KetState":
        """The product state ``adag(m1)..adag(mn)|0>`` (unnormalized for
        repeated or overlapping modes)."""
        return cls(OperatorPolynomial({NormalMonomial(modes, ()): 1.0}))

    def labels(self) -> tuple[ModeLabel, ...]:
        seen = set()
        for mono in self.poly.terms:
            seen.update(mono.creations)
        return tuple(sorted(seen, key=ModeLabel.sort_key))

    def paths(self) -> set[str]:
        return {m.path for m in self.labels()}

    def photon_numbers(self) -> set[int]:
        return {len(mono.creations) for mono in self.poly.terms}

    def __eq__(self, other):
        if not isinstance(other, KetState):
            return NotImplemented
        return self.poly == other.poly

    def __repr__(self):
        return f"KetState({self.poly!r})"


class DensityOperator:
    """Factored mixed state; see the module docstring for the form."""

    __slots__ = ("_factors",)

    def __init__(self, factors: Mapping[tuple, complex]):
        data = {}
        for (ci, cj), c in factors.items():
            key = (tuple(sorted(ci, key=ModeLabel.sort_key)),
                   tuple(sorted(cj, key=ModeLabel.sort_key)))
            val = data.get(key, 0.0) + complex(c)
            data[key] = val
        object.__setattr__(
            self, "_factors",
            {k: v for k, v in data.items() if abs(v) >= PRUNE_TOL})

    def __setattr__(self, name, value):
        raise AttributeError("DensityOperator is immutable")

    @classmethod
    def from_ket(cls, psi: KetState) -> "DensityOperator":
        terms = list(psi.poly.terms.items())
        data = {}
        for mi, ci in terms:
            for mj, cj in terms:
                key = (mi.creations, mj.creations)
                data[key] = data.get(key, 0.0) + ci * cj.conjugate()
        return cls(data)

    @property
    def factors(self) -> Mapping[tuple, complex]:
        return MappingProxyType(self._factors)

    def labels(self) -> tuple[ModeLabel, ...]:
        seen = set()
        for (ci, cj) in self._factors:
            seen.update(ci)
            seen.update(cj)
        return tuple(sorted(seen, key=ModeLabel.sort_key))

    def paths(self) -> set[str]:
        return {m.path for m in self.labels()}

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        for (ci, cj), c in self._factors.items():
            if abs(c - self._factors.get((cj, ci), 0.0).conjugate()) > tol:
                return False
        return True

    def scaled(self, scalar: complex) -> "DensityOperator":
        return DensityOperator(
            {k: scalar * v for k, v in self._factors.items()})

    def __eq__(self, other):
        if not isinstance(other, DensityOperator):
            return NotImplemented
        return self._factors == other._factors

    def __repr__(self):
        return f"DensityOperator({len(self._factors)} factors)"


def inner_product(a: KetState, b: KetState) -> complex:
    """<a|b>, contracting every creation-monomial pair against the vacuum."""
    cache = ContractionCache()
    total = 0.0 + 0.0j
    for ma, ca in a.poly.terms.items():
        bra = _ann_word(ma.creations)
        for mb, cb in b.poly.terms.items():
            total += ca.conjugate() * cb * cache.vacuum_expectation(
                bra + _cre_word(mb.creations))
    return total


def norm_squared(psi: KetState) -> float:
    return inner_product(psi, psi).real


def trace(rho: DensityOperator) -> complex:
    cache = ContractionCache()
    total = 0.0 + 0.0j
    for (ci, cj), c in rho.factors.items():
        if len(ci) != len(cj):
            continue  # photon-number mismatch contracts to zero
        total += c * cache.vacuum_expectation(_ann_word(cj) + _cre_word(ci))
    return total


def partial_trace(rho: DensityOperator, env_paths: Iterable[str]) -> DensityOperator:
    """Trace out every mode living on one of ``env_paths``.

    Distinct paths are exactly orthogonal, so each factor splits into a
    kept part and an environment part whose vacuum contraction supplies a
    scalar weight.  Paths absent from the state act trivially.
    """
    env = set(env_paths)
    cache = ContractionCache()
    out: dict = {}
    for (ci, cj), c in rho.factors.items():
        keep_i = tuple(m for m in ci if m.path not in env)
        env_i = tuple(m for m in ci if m.path in env)
        keep_j = tuple(m for m in cj if m.path not in env)
        env_j = tuple(m for m in cj if m.path in env)
        if len(env_i) != len(env_j):
            continue
        if env_i or env_j:
            weight = cache.vacuum_expectation(_ann_word(env_j) + _cre_word(env_i))
            if weight == 0.0:
                continue
        else:
            weight = 1.0
        key = (keep_i, keep_j)
        out[key] = out.get(key, 0.0) + c * weight
    return DensityOperator(out)


def expectation(rho: DensityOperator, obs: OperatorPolynomial) -> complex:
    """Tr(rho O) = sum_{I,J} c_{I,J} <0| adag(J)^dag O adag(I) |0>.

    Identity observables reduce to the same contraction as :func:`trace`.
    """
    cache = ContractionCache()
    total = 0.0 + 0.0j
    for (ci, cj), c in rho.factors.items():
        bra = _ann_word(cj)
        ket = _cre_word(ci)
        for mono, d in obs.terms.items():
            word = bra + mono.word() + ket
            total += c * d * cache.vacuum_expectation(word)
    return total


def _path_counts(labels) -> dict:
    counts: dict = {}
    for m in labels:
        counts[m.path] = counts.get(m.path, 0) + 1
    return counts


def expectation_ket(psi: KetState, obs: OperatorPolynomial) -> complex:
    """<psi| O |psi> without forming the density operator."""
    cache = ContractionCache()
    total = 0.0 + 0.0j
    terms = [(mono, c, _ann_word(mono.creations), _cre_word(mono.creations),
              _path_counts(mono.creations)) for mono, c in psi.poly.terms.items()]
    for mono, d in obs.terms.items():
        mid = mono.word()
        cre_counts = _path_counts(mono.creations)
        ann_counts = _path_counts(mono.annihilations)
        for mj, cj, bra, _, bra_counts in terms:
            # photons per path must balance between the annihilating side
            # (bra + O's annihilators) and the creating side, or the
            # contraction vanishes identically
            need = {p: bra_counts.get(p, 0) + ann_counts.get(p, 0) - cre_counts.get(p, 0)
                    for p in set(bra_counts) | set(ann_counts) | set(cre_counts)}
            if any(v < 0 for v in need.values()):
                continue
            need = {p: v for p, v in need.items() if v}
            for mi, ci, _, ket, ket_counts in terms:
                if ket_counts != need:
                    continue
                word = bra + mid + ket
                total += cj.conjugate() * d * ci * cache.vacuum_expectation(word)
    return total


def normalize(state):
    """Scale a ket to unit norm or a density operator to unit trace.

    Raises
    ------
    ZeroNormError
        If the squared norm (or trace) is below 1e-14.
    """
    if isinstance(state, KetState):
        nsq = norm_squared(state)
        if nsq < ZERO_NORM_TOL:
            raise ZeroNormError(f"squared norm {nsq:.3e} is below {ZERO_NORM_TOL}")
        return KetState((1.0 / nsq ** 0.5) * state.poly)
    if isinstance(state, DensityOperator):
        tr = trace(state).real
        if tr < ZERO_NORM_TOL:
            raise ZeroNormError(f"trace {tr:.3e} is below {ZERO_NORM_TOL}")
        return state.scaled(1.0 / tr)
    raise StateValidationError(f"cannot normalize object of type {type(state)!r}")
