"""Brute-force reference computations.

Everything here is deliberately independent of the rewrite engine: Gram
matrices are orthonormalized by pivoted Cholesky, states are embedded as
dense amplitude arrays over a truncated Fock space of the orthonormal
directions, and ladder operators act by explicit sqrt(n) bookkeeping.
The only approximation is the per-direction photon-number truncation,
which is exact once it reaches the photon content of the state, so any
disagreement with the symbolic engine is a bug, not numerics.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .algebra import NormalMonomial, OperatorPolynomial
from .errors import StateValidationError
from .modes import ModeLabel, gram_matrix
from .states import DensityOperator, KetState

#: Rank-truncation tolerance for pivoted Cholesky.
RANK_TOL = 1e-10

#: Gram matrices must be PSD up to this eigenvalue floor.
PSD_FLOOR = -1e-9

_PERMANENT_MAX = 10
_EMBED_MAX_ENTRIES = 2 ** 22


def permanent(matrix) -> complex:
    """Permanent by Ryser's inclusion-exclusion formula (n <= 10)."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StateValidationError(f"permanent needs a square matrix, got {a.shape}")
    n = a.shape[0]
    if n > _PERMANENT_MAX:
        raise StateValidationError(f"permanent limited to n <= {_PERMANENT_MAX}")
    if n == 0:
        return 1.0 + 0.0j
    total = 0.0 + 0.0j
    for subset in range(1, 1 << n):
        cols = [j for j in range(n) if (subset >> j) & 1]
        rows = a[:, cols].sum(axis=1)
        sign = -1.0 if (len(cols) % 2) else 1.0
        total += sign * complex(np.prod(rows))
    return total if n % 2 == 0 else -total


def permanent_naive(matrix) -> complex:
    """Permanent by raw permutation expansion; cross-check for tiny n."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StateValidationError(f"permanent needs a square matrix, got {a.shape}")
    n = a.shape[0]
    if n > 8:
        raise StateValidationError("naive permanent limited to n <= 8")
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        prod = 1.0 + 0.0j
        for i, j in enumerate(perm):
            prod *= a[i, j]
        total += prod
    return total


def _pivoted_cholesky(g: np.ndarray, tol: float):
    """Factor a PSD matrix as P-permuted L L^H, truncated at rank where the
    residual diagonal falls to ``tol``.  Returns (coeffs, rank) with coeffs
    in the original row order."""
    n = g.shape[0]
    order = list(range(n))
    low = np.zeros((n, n), dtype=complex)
    resid = np.real(np.diag(g)).astype(float).copy()
    rank = 0
    for k in range(n):
        rel = max(resid[order[i]] for i in range(k, n))
        if rel <= tol:
            break
        pick = k + max(range(n - k), key=lambda i: resid[order[k + i]])
        order[k], order[pick] = order[pick], order[k]
        row = order[k]
        pivot = math.sqrt(resid[row])
        low[row, k] = pivot
        for i in range(k + 1, n):
            other = order[i]
            val = (g[other, row] - np.dot(low[other, :k], low[row, :k].conj())) / pivot
            low[other, k] = val
            resid[other] -= abs(val) ** 2
        rank = k + 1
    return low[:, :rank], rank


class GramBasis:
    """Orthonormalization of a set of (possibly overlapping) mode labels.

    ``coeffs[i]`` expresses label ``i`` over ``rank`` orthonormal
    directions, with ``coeffs @ coeffs.conj().T`` reproducing the Gram
    matrix; near-duplicate labels collapse onto shared directions.
    """

    __slots__ = ("labels", "gram", "coeffs", "rank", "_index")

    def __init__(self, labels, *, tol: float = RANK_TOL):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise StateValidationError("duplicate labels in GramBasis")
        g = gram_matrix(labels)
        if len(labels):
            low = float(np.min(np.linalg.eigvalsh(g)))
            if low < PSD_FLOOR:
                raise StateValidationError(
                    f"Gram matrix is not PSD: min eigenvalue {low:.3e}")
        coeffs, rank = _pivoted_cholesky(g, tol)
        g.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "_index", {m: i for i, m in enumerate(labels)})

    def __setattr__(self, name, value):
        raise AttributeError("GramBasis is immutable")

    def index(self, label: ModeLabel) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise StateValidationError(f"label not in basis: {label!r}") from None


class FockVector:
    """Dense amplitudes over occupation numbers of the orthonormal
    directions, each truncated at ``n_max`` photons."""

    __slots__ = ("basis", "n_max", "array")

    def __init__(self, basis: GramBasis, n_max: int, array: np.ndarray):
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "n_max", int(n_max))
        object.__setattr__(self, "array", array)

    def __setattr__(self, name, value):
        raise AttributeError("FockVector is immutable")

    @classmethod
    def vacuum(cls, basis: GramBasis, n_max: int) -> "FockVector":
        if n_max < 0:
            raise StateValidationError("n_max must be non-negative")
        dims = (n_max + 1,) * basis.rank
        if math.prod(dims) > _EMBED_MAX_ENTRIES:
            raise StateValidationError(
                f"embedding of {basis.rank} directions at n_max={n_max} is too large")
        arr = np.zeros(dims, dtype=complex)
        arr[(0,) * basis.rank] = 1.0
        return cls(basis, n_max, arr)

    def _ladder(self, k: int, raise_op: bool) -> "FockVector":
        a = np.moveaxis(self.array, k, 0)
        out = np.zeros_like(a)
        roots = np.sqrt(np.arange(1, self.n_max + 1))
        shape = (-1,) + (1,) * (a.ndim - 1)
        if raise_op:
            if np.any(a[-1] != 0):
                raise StateValidationError(
                    f"truncation n_max={self.n_max} overflowed on direction {k}")
            out[1:] = roots.reshape(shape) * a[:-1]
        else:
            out[:-1] = roots.reshape(shape) * a[1:]
        return FockVector(self.basis, self.n_max, np.moveaxis(out, 0, k))

    def create_direction(self, k: int) -> "FockVector":
        return self._ladder(k, True)

    def annihilate_direction(self, k: int) -> "FockVector":
        return self._ladder(k, False)

    def create_label(self, label: ModeLabel) -> "FockVector":
        # adag(m_i) = sum_k conj(C_ik) edag_k so that
        # <emb(m_i), emb(m_j)> = sum_k C_ik conj(C_jk) = G_ij.
        row = self.basis.coeffs[self.basis.index(label)]
        total = np.zeros_like(self.array)
        for k, c in enumerate(row):
            if c != 0.0:
                total = total + c.conjugate() * self._ladder(k, True).array
        return FockVector(self.basis, self.n_max, total)

    def annihilate_label(self, label: ModeLabel) -> "FockVector":
        row = self.basis.coeffs[self.basis.index(label)]
        total = np.zeros_like(self.array)
        for k, c in enumerate(row):
            if c != 0.0:
                total = total + c * self._ladder(k, False).array
        return FockVector(self.basis, self.n_max, total)

    def plus(self, other: "FockVector", weight: complex = 1.0) -> "FockVector":
        return FockVector(self.basis, self.n_max, self.array + weight * other.array)

    def inner(self, other: "FockVector") -> complex:
        return complex(np.vdot(self.array, other.array))

    def norm_squared(self) -> float:
        return float(np.vdot(self.array, self.array).real)


def embed_ket(psi: KetState, basis: GramBasis, n_max: int) -> FockVector:
    """Dense embedding of a ket; exact whenever ``n_max`` reaches the
    photon content of the state."""
    photons = max(psi.photon_numbers(), default=0)
    if n_max < photons:
        raise StateValidationError(
            f"n_max={n_max} below the state's photon number {photons}")
    total = None
    for mono, coeff in psi.poly.terms.items():
        vec = FockVector.vacuum(basis, n_max)
        for label in mono.creations:
            vec = vec.create_label(label)
        arr = coeff * vec.array
        total = arr if total is None else total + arr
    if total is None:
        total = np.zeros(((n_max + 1,) * basis.rank), dtype=complex)
    return FockVector(basis, n_max, total)


def _apply_monomial(vec: FockVector, mono: NormalMonomial) -> FockVector:
    out = vec
    for label in reversed(mono.annihilations):
        out = out.annihilate_label(label)
    for label in reversed(mono.creations):
        out = out.create_label(label)
    return out


def _apply_poly(vec: FockVector, obs: OperatorPolynomial) -> FockVector:
    total = np.zeros_like(vec.array)
    for mono, coeff in obs.terms.items():
        total = total + coeff * _apply_monomial(vec, mono).array
    return FockVector(vec.basis, vec.n_max, total)


def oracle_expectation(state, obs: OperatorPolynomial, basis: GramBasis,
                       n_max: int) -> complex:
    """<O> evaluated entirely in the dense embedding."""
    if isinstance(state, KetState):
        vec = embed_ket(state, basis, n_max)
        return vec.inner(_apply_poly(vec, obs))
    if isinstance(state, DensityOperator):
        total = 0.0 + 0.0j
        cache: dict = {}

        def embedded(creations):
            hit = cache.get(creations)
            if hit is None:
                hit = embed_ket(KetState.from_modes(*creations), basis, n_max)
                cache[creations] = hit
            return hit

        for (ci, cj), c in state.factors.items():
            ket = embedded(ci)
            bra = embedded(cj)
            total += c * bra.inner(_apply_poly(ket, obs))
        return total
    raise StateValidationError(f"cannot embed object of type {type(state)!r}")
