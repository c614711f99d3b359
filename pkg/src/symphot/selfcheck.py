"""Seeded randomized cross-checks between the rewrite engine and the
brute-force references.

Each suite draws its cases from its own deterministic stream (seeded by
the user seed plus the suite's position), measures the worst deviation
against an independent computation, and reports pass/fail against a
fixed tolerance.  Reports are plain data so the CLI and the test suite
can share them; formatting is deterministic byte for byte for a given
seed and case count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    NormalMonomial,
    OperatorPolynomial,
    adjoint,
    annihilate,
    create,
    multiply,
    normal_order,
    vacuum_expectation_word,
)
from .devices import (
    LinearMap,
    PovmOutcome,
    apply_linear,
    beam_splitter,
    outcome_probability,
)
from .errors import CcrViolationError, StateValidationError
from .modes import (
    GaussianEnvelope,
    ModeLabel,
    Polarization,
    gram_matrix,
    mode_overlap,
)
from .oracle import GramBasis, embed_ket, oracle_expectation, permanent
from .states import DensityOperator, KetState, expectation_ket, inner_product, normalize


@dataclass(frozen=True)
class SuiteReport:
    """Outcome of one randomized suite."""

    name: str
    cases: int
    max_error: float
    tolerance: float
    failures: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.failures and self.max_error <= self.tolerance


def _random_polarization(rng) -> Polarization:
    while True:
        v = rng.normal(size=4)
        if np.dot(v, v) > 1e-6:
            return Polarization(complex(v[0], v[1]), complex(v[2], v[3]))


def _random_label(rng, path: str) -> ModeLabel:
    env = GaussianEnvelope(sigma=0.5 + 1.5 * rng.random(),
                           tau=rng.uniform(-2.0, 2.0),
                           omega0=rng.uniform(-3.0, 3.0))
    return ModeLabel(path, env, _random_polarization(rng))


def _suite_permanent(rng, cases: int, failures: list[str]) -> float:
    """Vacuum expectation of a(x_1)..a(x_n) adag(m_1)..adag(m_n) against the
    permanent of the overlap matrix G_ij = <x_i, m_j>; mismatched operator
    counts must contract to exactly zero."""
    worst = 0.0
    for case in range(cases):
        n = 1 + case % 5
        cre_labels = [_random_label(rng, "p") for _ in range(n)]
        ann_labels = [_random_label(rng, "p") for _ in range(n)]
        if case % 5 == 4:
            word = tuple(annihilate(m) for m in ann_labels[:-1]) \
                + tuple(create(m) for m in cre_labels)
            val = vacuum_expectation_word(word)
            err = abs(val)
            if err != 0.0:
                failures.append(
                    f"case {case}: mismatched counts gave {val!r}, not 0")
        else:
            word = tuple(annihilate(m) for m in ann_labels) \
                + tuple(create(m) for m in cre_labels)
            overlaps = np.array([[mode_overlap(x, m) for m in cre_labels]
                                 for x in ann_labels])
            err = abs(vacuum_expectation_word(word) - permanent(overlaps))
        worst = max(worst, err)
    return worst


def _random_ket(rng, pool: list[ModeLabel]) -> KetState:
    terms = {}
    for _ in range(1 + int(rng.integers(2))):
        k = 1 + int(rng.integers(3))
        picks = tuple(pool[int(i)] for i in rng.integers(len(pool), size=k))
        mono = NormalMonomial(picks, ())
        terms[mono] = terms.get(mono, 0.0) + complex(rng.normal(), rng.normal())
    return normalize(KetState(OperatorPolynomial(terms)))


def _suite_oracle(rng, cases: int, failures: list[str]) -> float:
    """Inner products, splitter outputs, and quadratic expectations against
    the dense truncated-Fock embedding."""
    worst = 0.0
    for case in range(cases):
        pool = [_random_label(rng, "A") for _ in range(2)] \
            + [_random_label(rng, "B")]
        basis = GramBasis(pool)
        psi = _random_ket(rng, pool)
        kind = case % 3
        if kind == 0:
            phi = _random_ket(rng, pool)
            sym = inner_product(phi, psi)
            ref = embed_ket(phi, basis, 3).inner(embed_ket(psi, basis, 3))
            err = abs(sym - ref)
        elif kind == 1:
            x, y = (pool[int(i)] for i in rng.integers(len(pool), size=2))
            obs = OperatorPolynomial({NormalMonomial((x,), (y,)): 1.0}) \
                + OperatorPolynomial({NormalMonomial((y,), (x,)): 1.0})
            err = abs(expectation_ket(psi, obs)
                      - oracle_expectation(psi, obs, basis, 3))
        else:
            theta = rng.uniform(0.2, 1.4)
            splitter = beam_splitter(np.cos(theta), np.sin(theta), "A", "B", pool)
            out = apply_linear(splitter, psi)
            sym = inner_product(out, out)
            out_basis = GramBasis(sorted(set(pool) | set(out.labels()),
                                         key=ModeLabel.sort_key))
            ref = embed_ket(out, out_basis, 3).norm_squared()
            err = abs(sym - ref)
        if err > 1e-6:
            failures.append(f"case {case}: kind {kind} deviates by {err:.3e}")
        worst = max(worst, err)
    return worst


def _random_poly(rng, pool: list[ModeLabel]) -> OperatorPolynomial:
    total = OperatorPolynomial.zero()
    for _ in range(1 + int(rng.integers(3))):
        word = []
        for _ in range(int(rng.integers(1, 4))):
            m = pool[int(rng.integers(len(pool)))]
            word.append(create(m) if rng.random() < 0.5 else annihilate(m))
        coeff = complex(rng.normal(), rng.normal())
        total = total + normal_order(tuple(word)).scaled(coeff)
    return total


def _poly_diff(p: OperatorPolynomial, q: OperatorPolynomial) -> float:
    keys = set(p.terms) | set(q.terms)
    return max((abs(p.coefficient(k) - q.coefficient(k)) for k in keys),
               default=0.0)


def _suite_adjoint(rng, cases: int, failures: list[str]) -> float:
    """adjoint(adjoint(p)) == p and adjoint(p q) == adjoint(q) adjoint(p)."""
    worst = 0.0
    for case in range(cases):
        pool = [_random_label(rng, "A") for _ in range(2)]
        p = _random_poly(rng, pool)
        q = _random_poly(rng, pool)
        err = _poly_diff(adjoint(adjoint(p)), p)
        err = max(err, _poly_diff(adjoint(multiply(p, q)),
                                  multiply(adjoint(q), adjoint(p))))
        if err > 1e-9:
            failures.append(f"case {case}: adjoint identity off by {err:.3e}")
        worst = max(worst, err)
    return worst


def _suite_normal_order(rng, cases: int, failures: list[str]) -> float:
    """Re-ordering an already normal-ordered monomial must be the identity."""
    worst = 0.0
    for case in range(cases):
        pool = [_random_label(rng, "A") for _ in range(2)]
        p = _random_poly(rng, pool)
        err = 0.0
        for mono in p.terms:
            again = normal_order(mono.word())
            err = max(err, _poly_diff(
                again, OperatorPolynomial({mono: 1.0})))
        if err != 0.0:
            failures.append(f"case {case}: reordering moved terms by {err:.3e}")
        worst = max(worst, err)
    return worst


def _suite_povm(rng, cases: int, failures: list[str]) -> float:
    """Number outcomes 0..3 and on/off on one path must exhaust probability."""
    worst = 0.0
    for case in range(cases):
        pool = [_random_label(rng, "A") for _ in range(2)] \
            + [_random_label(rng, "B")]
        rho = DensityOperator.from_ket(_random_ket(rng, pool))
        path = "A" if case % 2 == 0 else "B"
        total = sum(outcome_probability(rho, PovmOutcome.number(path, n))
                    for n in range(4))
        err = abs(total - 1.0)
        on_off = outcome_probability(rho, PovmOutcome.threshold_on(path)) \
            + outcome_probability(rho, PovmOutcome.threshold_off(path))
        err = max(err, abs(on_off - 1.0))
        if err > 1e-9:
            failures.append(f"case {case}: completeness off by {err:.3e}")
        worst = max(worst, err)
    return worst


def _suite_gram(rng, cases: int, failures: list[str]) -> float:
    """Gram matrices must be PSD and reproduced by their Cholesky factors."""
    worst = 0.0
    for case in range(cases):
        labels = [_random_label(rng, "A") for _ in range(2 + case % 3)]
        if case % 4 == 3:
            # near-duplicate labels drive the Gram matrix close to singular
            base = labels[0]
            env = base.envelope
            labels[1] = ModeLabel("A", GaussianEnvelope(
                env.sigma, env.tau + 1e-8, env.omega0), base.polarization)
        g = gram_matrix(labels)
        low_eig = float(np.min(np.linalg.eigvalsh(g)))
        if low_eig < -1e-9:
            failures.append(f"case {case}: Gram eigenvalue {low_eig:.3e} < 0")
        basis = GramBasis(labels)
        recon = basis.coeffs @ basis.coeffs.conj().T
        err = float(np.max(np.abs(recon - g)))
        if err > 1e-8:
            failures.append(f"case {case}: Cholesky reconstruction off {err:.3e}")
        worst = max(worst, err)
    return worst


def _suite_ccr(rng, cases: int, failures: list[str]) -> float:
    """Gram-compatible mixings must construct; a scaled row must be rejected."""
    worst = 0.0
    for case in range(cases):
        while True:
            labels = [_random_label(rng, "A") for _ in range(2 + case % 2)]
            g = gram_matrix(labels)
            if float(np.min(np.linalg.eigvalsh(g))) > 0.05:
                break
        n = len(labels)
        q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        eigvals, eigvecs = np.linalg.eigh(g)
        g_half = eigvecs @ np.diag(np.sqrt(eigvals)) @ eigvecs.conj().T
        g_inv_half = eigvecs @ np.diag(eigvals ** -0.5) @ eigvecs.conj().T
        b = g_half @ q @ g_inv_half
        try:
            lmap = LinearMap(labels, b)
        except CcrViolationError as exc:
            failures.append(f"case {case}: valid map rejected: {exc}")
            continue
        resid = lmap.matrix @ g @ lmap.matrix.conj().T - g
        worst = max(worst, float(np.max(np.abs(resid))))
        bad = b.copy()
        bad[0, :] *= 1.02
        try:
            LinearMap(labels, bad)
        except CcrViolationError:
            pass
        else:
            failures.append(f"case {case}: scaled-row map was accepted")
    return worst


#: (name, runner, tolerance), in report order.
SUITES = (
    ("permanent-identity", _suite_permanent, 1e-9),
    ("oracle-equivalence", _suite_oracle, 1e-9),
    ("adjoint-identities", _suite_adjoint, 1e-12),
    ("normal-order-idempotence", _suite_normal_order, 0.0),
    ("povm-completeness", _suite_povm, 1e-10),
    ("gram-psd", _suite_gram, 1e-8),
    ("ccr-preservation", _suite_ccr, 1e-10),
)


def run_selfcheck(seed: int = 0, cases: int = 100) -> list[SuiteReport]:
    """Run every suite with ``cases`` cases; ``cases == 0`` runs nothing."""
    if cases < 0:
        raise StateValidationError("cases must be non-negative")
    reports = []
    if cases == 0:
        return reports
    for index, (name, runner, tol) in enumerate(SUITES):
        rng = np.random.default_rng([seed, index])
        failures: list[str] = []
        worst = runner(rng, cases, failures)
        reports.append(SuiteReport(name, cases, worst, tol,
                                   tuple(failures[:5])))
    return reports


def format_report(reports: list[SuiteReport], seed: int) -> str:
    """Stable text rendering, one line per suite plus failure details."""
    lines = []
    for rep in reports:
        status = "ok" if rep.ok else "FAIL"
        lines.append(f"{rep.name:<26} cases={rep.cases:<5d} "
                     f"max_error={rep.max_error:.3e} "
                     f"tol={rep.tolerance:.0e} {status}")
        for detail in rep.failures:
            lines.append(f"    seed={seed} {detail}")
    return "\n".join(lines)
