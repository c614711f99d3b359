"""Normally ordered polynomials over the mode ladder algebra.

The only nontrivial relation is the exchange of an annihilator past a
creator,

    a(x) adag(y) = adag(y) a(x) + <x, y> 1,

with ``<x, y>`` the mode overlap conjugated on the annihilated side;
operators of equal kind commute.  Every product therefore rewrites into a
sum of monomials that carry all creators (sorted) left of all
annihilators (sorted), and a polynomial is a sparse complex-weighted set
of such monomials.  Vacuum expectation values read off the identity
coefficient, which is how the whole engine evaluates probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from operator import attrgetter
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import CapacityError
from .modes import ModeLabel, mode_overlap

_LABEL_KEY = attrgetter("_key")
_OP_KEY = attrgetter("mode._key")

#: Coefficients below this magnitude are dropped when a polynomial is built.
PRUNE_TOL = 1e-12

#: Default cap on the number of stored monomials.
TERM_CAP = 10 ** 6


@dataclass(frozen=True)
class LadderOperator:
    """A single creation (``creates=True``) or annihilation operator."""

    creates: bool
    mode: ModeLabel

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.creates, self.mode)))

    def __hash__(self):
        return self._hash

    @property
    def kind(self) -> str:
        return "create" if self.creates else "annihilate"

    def adjoint(self) -> "LadderOperator":
        return LadderOperator(not self.creates, self.mode)

    def __repr__(self):
        sym = "adag" if self.creates else "a"
        return f"{sym}({self.mode.path})"


def create(mode: ModeLabel) -> LadderOperator:
    return LadderOperator(True, mode)


def annihilate(mode: ModeLabel) -> LadderOperator:
    return LadderOperator(False, mode)


#: A word is a finite product of ladder operators, leftmost first.
OperatorWord = tuple[LadderOperator, ...]


@dataclass(frozen=True, init=False)
class NormalMonomial:
    """Product ``adag(i1)..adag(ik) a(j1)..a(jl)`` in canonical label order.

    Both operator groups commute internally, so the constructor sorts each
    list; two monomials are equal exactly when they are the same operator.
    """

    creations: tuple[ModeLabel, ...]
    annihilations: tuple[ModeLabel, ...]

    def __init__(self, creations=(), annihilations=()):
        object.__setattr__(
            self, "creations", tuple(sorted(creations, key=_LABEL_KEY)))
        object.__setattr__(
            self, "annihilations", tuple(sorted(annihilations, key=_LABEL_KEY)))
        object.__setattr__(
            self, "_hash", hash((self.creations, self.annihilations)))

    def __hash__(self):
        return self._hash

    def adjoint(self) -> "NormalMonomial":
        return NormalMonomial(self.annihilations, self.creations)

    def word(self) -> OperatorWord:
        return tuple(LadderOperator(True, m) for m in self.creations) + tuple(
            LadderOperator(False, m) for m in self.annihilations)

    def creation_count(self, path: str) -> int:
        return sum(1 for m in self.creations if m.path == path)

    def annihilation_count(self, path: str) -> int:
        return sum(1 for m in self.annihilations if m.path == path)

    @property
    def is_identity(self) -> bool:
        return not self.creations and not self.annihilations

    def __repr__(self):
        if self.is_identity:
            return "1"
        parts = [f"adag({m.path})" for m in self.creations]
        parts += [f"a({m.path})" for m in self.annihilations]
        return " ".join(parts)


IDENTITY_MONOMIAL = NormalMonomial()


def _finalize(terms: dict, term_cap: int) -> dict:
    out = {m: c for m, c in terms.items() if abs(c) >= PRUNE_TOL}
    if len(out) > term_cap:
        raise CapacityError(f"polynomial has {len(out)} terms, cap is {term_cap}")
    return out


class OperatorPolynomial:
    """Immutable sparse sum of normally ordered monomials."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[NormalMonomial, complex] | None = None,
                 *, term_cap: int = TERM_CAP):
        data = {} if terms is None else {m: complex(c) for m, c in terms.items()}
        object.__setattr__(self, "_terms", _finalize(data, term_cap))

    def __setattr__(self, name, value):
        raise AttributeError("OperatorPolynomial is immutable")

    @classmethod
    def zero(cls) -> "OperatorPolynomial":
        return cls()

    @classmethod
    def identity(cls) -> "OperatorPolynomial":
        return cls({IDENTITY_MONOMIAL: 1.0})

    @classmethod
    def creation(cls, mode: ModeLabel) -> "OperatorPolynomial":
        return cls({NormalMonomial((mode,), ()): 1.0})

    @classmethod
    def annihilation(cls, mode: ModeLabel) -> "OperatorPolynomial":
        return cls({NormalMonomial((), (mode,)): 1.0})

    @property
    def terms(self) -> Mapping[NormalMonomial, complex]:
        return MappingProxyType(self._terms)

    def coefficient(self, monomial: NormalMonomial) -> complex:
        return self._terms.get(monomial, 0.0 + 0.0j)

    @property
    def num_terms(self) -> int:
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __add__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0.0) + c
        return OperatorPolynomial(out)

    def __sub__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, OperatorPolynomial):
            return multiply(self, other)
        return OperatorPolynomial({m: c * other for m, c in self._terms.items()})

    def __rmul__(self, scalar):
        return OperatorPolynomial({m: c * scalar for m, c in self._terms.items()})

    def scaled(self, scalar: complex) -> "OperatorPolynomial":
        return scalar * self

    def adjoint(self) -> "OperatorPolynomial":
        return OperatorPolynomial(
            {m.adjoint(): c.conjugate() for m, c in self._terms.items()})

    def allclose(self, other: "OperatorPolynomial", atol: float = 1e-10) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coefficient(k) - other.coefficient(k)) <= atol
                   for k in keys)

    def __repr__(self):
        if not self._terms:
            return "0"
        bits = [f"({c:.6g})*{m!r}" for m, c in list(self._terms.items())[:8]]
        more = "" if self.num_terms <= 8 else f" ... ({self.num_terms} terms)"
        return " + ".join(bits) + more


def _sort_runs(word: OperatorWord) -> OperatorWord:
    """Canonicalize a word by sorting each maximal run of same-kind
    operators (they commute), improving memo hits without changing the
    operator."""
    out = []
    i = 0
    n = len(word)
    while i < n:
        j = i
        while j < n and word[j].creates == word[i].creates:
            j += 1
        run = sorted(word[i:j], key=_OP_KEY)
        out.extend(run)
        i = j
    return tuple(out)


def _order_word(word: OperatorWord, memo: dict, term_cap: int) -> dict:
    word = _sort_runs(word)
    hit = memo.get(word)
    if hit is not None:
        return hit
    for k in range(len(word) - 1):
        if not word[k].creates and word[k + 1].creates:
            x = word[k].mode
            y = word[k + 1].mode
            swapped = word[:k] + (word[k + 1], word[k]) + word[k + 2:]
            result = dict(_order_word(swapped, memo, term_cap))
            ov = mode_overlap(x, y)
            if ov != 0.0:
                for mono, c in _order_word(word[:k] + word[k + 2:], memo,
                                           term_cap).items():
                    result[mono] = result.get(mono, 0.0) + ov * c
            if len(result) > term_cap:
                raise CapacityError(
                    f"normal ordering produced {len(result)} terms, cap is {term_cap}")
            memo[word] = result
            return result
    # No annihilator stands left of a creator: the word is already normal.
    creations = tuple(op.mode for op in word if op.creates)
    annihilations = tuple(op.mode for op in word if not op.creates)
    result = {NormalMonomial(creations, annihilations): 1.0 + 0.0j}
    memo[word] = result
    return result


def normal_order(word: Iterable[LadderOperator], *,
                 term_cap: int = TERM_CAP) -> OperatorPolynomial:
    """Rewrite an operator word into its normally ordered polynomial."""
    return OperatorPolynomial(_order_word(tuple(word), {}, term_cap),
                              term_cap=term_cap)


def multiply(p: OperatorPolynomial, q: OperatorPolynomial, *,
             term_cap: int = TERM_CAP) -> OperatorPolynomial:
    """Operator product of two normally ordered polynomials."""
    memo: dict = {}
    out: dict = {}
    for mp, cp in p.terms.items():
        wp = mp.word()
        for mq, cq in q.terms.items():
            weight = cp * cq
            for mono, c in _order_word(wp + mq.word(), memo, term_cap).items():
                out[mono] = out.get(mono, 0.0) + weight * c
        if len(out) > 4 * term_cap:
            raise CapacityError(f"product exceeded {4 * term_cap} working terms")
    return OperatorPolynomial(out, term_cap=term_cap)


def adjoint(p: OperatorPolynomial) -> OperatorPolynomial:
    """Hermitian adjoint; exact (no reordering is needed)."""
    return p.adjoint()


def vacuum_expectation(p: OperatorPolynomial) -> complex:
    """<0| p |0> for a normally ordered polynomial: every monomial with
    operators kills the vacuum on one side, so only the identity term
    survives."""
    return p.coefficient(IDENTITY_MONOMIAL)


def _wick(word: OperatorWord, memo: dict, overlaps: dict) -> complex:
    """<0| word |0> by direct pairing: each annihilator contracts with one
    creator standing to its right, and the expectation is the sum over
    complete pairings of the products of overlaps.  Equivalent to the
    identity coefficient of the normal ordering, but it never materializes
    the non-contracted terms."""
    if not word:
        return 1.0 + 0.0j
    hit = memo.get(word)
    if hit is not None:
        return hit
    first = word[0]
    if first.creates:
        # <0| adag(x) ... |0> vanishes: the bra side kills the creator.
        memo[word] = 0.0j
        return 0.0j
    x = first.mode
    rest = word[1:]
    total = 0.0 + 0.0j
    for j, op in enumerate(rest):
        if op.creates:
            pair = (x, op.mode)
            ov = overlaps.get(pair)
            if ov is None:
                ov = mode_overlap(x, op.mode)
                overlaps[pair] = ov
            if ov != 0.0:
                total += ov * _wick(rest[:j] + rest[j + 1:], memo, overlaps)
    memo[word] = total
    return total


def vacuum_expectation_word(word: Iterable[LadderOperator]) -> complex:
    """<0| word |0> without materializing the full polynomial result."""
    return _wick(_sort_runs(tuple(word)), {}, {})


class ContractionCache:
    """Reusable memo for families of related vacuum expectations.

    Evaluating a trace or an operator expectation contracts many words
    that share large sub-words; routing them through one cache makes the
    rewrite engine effectively incremental.
    """

    def __init__(self, term_cap: int = TERM_CAP):
        self._memo: dict = {}
        self._overlaps: dict = {}
        self._term_cap = term_cap

    def vacuum_expectation(self, word: Iterable[LadderOperator]) -> complex:
        return _wick(_sort_runs(tuple(word)), self._memo, self._overlaps)


def substitute(p: OperatorPolynomial,
               ann_images: Mapping[ModeLabel, OperatorPolynomial],
               create_images: Mapping[ModeLabel, OperatorPolynomial], *,
               term_cap: int = TERM_CAP) -> OperatorPolynomial:
    """Simultaneously replace every ladder operator by its image polynomial.

    ``ann_images[m]`` substitutes ``a(m)``, ``create_images[m]``
    substitutes ``adag(m)``; unmapped modes stay themselves.  The images
    are multiplied in the monomial's operator order and the result is
    re-normal-ordered, so device maps that mix creators and annihilators
    are handled uniformly.
    """
    out = OperatorPolynomial.zero()
    cache_c: dict = {}
    cache_a: dict = {}
    for mono, coeff in p.terms.items():
        factor = OperatorPolynomial.identity()
        for m in mono.creations:
            img = cache_c.get(m)
            if img is None:
                img = create_images.get(m, OperatorPolynomial.creation(m))
                cache_c[m] = img
            factor = multiply(factor, img, term_cap=term_cap)
        for m in mono.annihilations:
            img = cache_a.get(m)
            if img is None:
                img = ann_images.get(m, OperatorPolynomial.annihilation(m))
                cache_a[m] = img
            factor = multiply(factor, img, term_cap=term_cap)
        out = out + coeff * factor
    return out
