"""Three-level domination verifier: semigroup, resolvent, and form checks.

A bundle form is dominated by a scalar form when the pointwise fiber norm
of anything the bundle semigroup produces stays below what the scalar
semigroup produces from the pointwise norms. The three checks here probe
that statement at the semigroup, resolvent, and form level on parameter
grids and random samples; the theory says the three verdicts must agree,
and the verifier reports worst-case slacks and witnesses either way.

Deterministic probes (coordinate sections, and disjointly supported edge
pairs for the form level) are always added to the random samples: known
violations concentrate there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundles import HermitianBundle, pair
from .errors import DimensionMismatch
from .forms import FormOperator, assemble_magnetic_form, assemble_scalar_form
from .graphs import WeightedGraph

DEFAULT_T_GRID = (0.01, 0.1, 1.0, 10.0)
DEFAULT_ALPHA_GRID = (0.5, 1.0, 10.0)
DOMINATION_TOL = 1e-9
HYPOTHESIS_TOL = 1e-10


@dataclass(frozen=True)
class Verdict:
    """Outcome of one domination check.

    `slack` is the minimum of (dominating side - dominated side) over all
    sampled comparisons; the check passes when it stays above -tolerance.
    A witness is recorded only on failure.
    """

    passed: bool
    slack: float
    witness_vector: np.ndarray | None = None
    witness_param: float | None = None
    witness_vertex: int | None = None
    detail: dict = field(default_factory=dict)

    def to_report(self) -> dict:
        out = {
            "passed": self.passed,
            "slack": self.slack,
            "witness_vertex": self.witness_vertex,
            "witness_param": self.witness_param,
            "witness_vector": None
            if self.witness_vector is None
            else np.asarray(self.witness_vector),
        }
        out.update(self.detail)
        return out


def _as_rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _check_compatible(A: FormOperator, B: FormOperator):
    if B.d != 1:
        raise DimensionMismatch("the dominating form must be scalar")
    if A.n != B.n:
        raise DimensionMismatch(
            f"vertex counts differ: {A.n} (bundle side) vs {B.n} (scalar side)"
        )


def _sample_sections(n: int, d: int, count: int, rng) -> np.ndarray:
    """(count, n, d) complex Gaussian sections."""
    return rng.standard_normal((count, n, d)) + 1j * rng.standard_normal((count, n, d))


def _basis_sections(n: int, d: int) -> np.ndarray:
    """Coordinate probes: the section e_x (first fiber vector) for every x."""
    out = np.zeros((n, n, d), dtype=complex)
    for x in range(n):
        out[x, x, 0] = 1.0
    return out


def _flatten_batch(sections: np.ndarray) -> np.ndarray:
    """(k, n, d) -> (n*d, k) column-major batch for FormOperator methods."""
    k = sections.shape[0]
    return sections.reshape(k, -1).T


def _pointwise_verdict(A, B, params, samples, apply_A, apply_B, tol) -> Verdict:
    """Shared sweep for the semigroup- and resolvent-level checks."""
    n, d = A.n, A.d
    flat = _flatten_batch(samples)
    abs_samples = np.linalg.norm(samples, axis=2).T  # (n, k)

    best = np.inf
    witness = (None, None, None)
    for p in params:
        lhs = np.linalg.norm(
            apply_A(p, flat).reshape(n, d, -1), axis=1
        )  # (n, k) fiber norms
        rhs = apply_B(p, abs_samples).real
        slack = rhs - lhs
        idx = np.unravel_index(np.argmin(slack), slack.shape)
        if slack[idx] < best:
            best = float(slack[idx])
            witness = (samples[idx[1]], float(p), int(idx[0]))
    passed = best >= -tol
    return Verdict(
        passed,
        best,
        None if passed else witness[0],
        None if passed else witness[1],
        None if passed else witness[2],
    )


def check_semigroup_domination(
    A: FormOperator,
    B: FormOperator,
    t_list=DEFAULT_T_GRID,
    samples=100,
    rng=None,
    tol: float = DOMINATION_TOL,
) -> Verdict:
    """Pointwise check |e^{-tA}u|(x) <= (e^{-tB}|u|)(x) over grids and samples."""
    _check_compatible(A, B)
    rng = _as_rng(rng)
    if isinstance(samples, (int, np.integer)):
        samples = _sample_sections(A.n, A.d, int(samples), rng)
    else:
        samples = np.asarray(samples, dtype=complex)
    samples = np.concatenate([samples, _basis_sections(A.n, A.d)])
    return _pointwise_verdict(
        A, B, t_list, samples, A.semigroup, B.semigroup, tol
    )


def check_resolvent_domination(
    A: FormOperator,
    B: FormOperator,
    alpha_list=DEFAULT_ALPHA_GRID,
    samples=100,
    rng=None,
    tol: float = DOMINATION_TOL,
) -> Verdict:
    """Pointwise check |(A+a)^-1 u|(x) <= ((B+a)^-1 |u|)(x) over grids and samples."""
    _check_compatible(A, B)
    rng = _as_rng(rng)
    if isinstance(samples, (int, np.integer)):
        samples = _sample_sections(A.n, A.d, int(samples), rng)
    else:
        samples = np.asarray(samples, dtype=complex)
    samples = np.concatenate([samples, _basis_sections(A.n, A.d)])
    return _pointwise_verdict(
        A, B, alpha_list, samples, A.resolvent, B.resolvent, tol
    )


def check_form_domination(
    A: FormOperator,
    B: FormOperator,
    bundle: HermitianBundle,
    samples=100,
    rng=None,
    tol: float = DOMINATION_TOL,
) -> Verdict:
    """Form-level domination in three sub-checks.

    (1) pointwise norms of samples land in the scalar form's domain
        (automatic on finite graphs; the largest energy is recorded);
    (2) for 0 <= g <= |u| the phase-aligned section of magnitude g obeys
        the energy budget Q_A(aligned) <= Q_B(g) + Q_A(u);
    (3) Re Q_A(f1, f2) >= Q_B(|f1|, |f2|) on phase-aligned pairs, including
        disjointly supported coordinate pairs on every edge.
    """
    _check_compatible(A, B)
    rng = _as_rng(rng)
    count = int(samples) if isinstance(samples, (int, np.integer)) else len(samples)
    if isinstance(samples, (int, np.integer)):
        sections = _sample_sections(A.n, A.d, count, rng)
    else:
        sections = np.asarray(samples, dtype=complex)

    max_energy = 0.0
    budget_slack = np.inf
    budget_witness = None
    aligned_slack = np.inf
    aligned_witness = (None, None)

    for u in sections:
        flat_u = u.reshape(-1)
        mags = np.linalg.norm(u, axis=1)
        max_energy = max(max_energy, B.quad(mags))

        g = rng.random(A.n) * mags
        f2 = pair(u, g, bundle)
        slack = B.quad(g) + A.quad(flat_u) - A.quad(f2.reshape(-1))
        if slack < budget_slack:
            budget_slack = float(slack)
            budget_witness = u

        g_free = np.abs(rng.standard_normal(A.n))
        f2 = pair(u, g_free, bundle)
        slack = (
            A.evaluate(flat_u, f2.reshape(-1)).real
            - B.evaluate(mags, g_free).real
        )
        if slack < aligned_slack:
            aligned_slack = float(slack)
            aligned_witness = (u, None)

    # Disjointly supported nonnegative pairs are paired by definition and
    # concentrate the violations of failing instances.
    graph = bundle.graph
    for (x, y) in graph.edges:
        f1 = np.zeros((A.n, A.d), dtype=complex)
        f2 = np.zeros((A.n, A.d), dtype=complex)
        f1[x, 0] = 1.0
        f2[y, 0] = 1.0
        ex = np.zeros(A.n)
        ey = np.zeros(A.n)
        ex[x] = 1.0
        ey[y] = 1.0
        slack = (
            A.evaluate(f1.reshape(-1), f2.reshape(-1)).real
            - B.evaluate(ex, ey).real
        )
        if slack < aligned_slack:
            aligned_slack = float(slack)
            aligned_witness = (f1, int(y))

    overall = min(budget_slack, aligned_slack)
    passed = overall >= -tol
    if budget_slack <= aligned_slack:
        witness, witness_vertex = budget_witness, None
    else:
        witness, witness_vertex = aligned_witness
    return Verdict(
        passed,
        float(overall),
        None if passed else witness,
        None,
        None if passed else witness_vertex,
        detail={
            "max_dominating_energy": max_energy,
            "energy_budget_slack": budget_slack,
            "paired_inequality_slack": aligned_slack,
        },
    )


def sgn_inequality_check(d: int, trials: int, rng=None) -> float:
    """Worst slack of the radial-rescaling inequality on random fiber pairs.

    For a, b in C^d and 0 <= alpha <= |a|, 0 <= beta <= |b|, the rescaled
    vectors a~ = alpha a/|a| (zero if a = 0) and b~ analogously satisfy
    |a~ - b~|^2 <= |alpha - beta|^2 + |a - b|^2. Returns the minimum of
    (right side - left side); nonnegative up to rounding when the
    inequality holds. Zero-vector branches are included in the sampling.
    """
    if trials < 1:
        raise DimensionMismatch("trials must be >= 1")
    rng = _as_rng(rng)
    worst = np.inf
    for k in range(trials):
        a = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        b = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        if k % 7 == 3:
            a = np.zeros(d, dtype=complex)
        if k % 11 == 5:
            b = np.zeros(d, dtype=complex)
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        alpha = rng.random() * na
        beta = rng.random() * nb
        ta = (alpha / na) * a if na > 0 else np.zeros(d, dtype=complex)
        tb = (beta / nb) * b if nb > 0 else np.zeros(d, dtype=complex)
        lhs = np.linalg.norm(ta - tb) ** 2
        rhs = (alpha - beta) ** 2 + np.linalg.norm(a - b) ** 2
        worst = min(worst, float(rhs - lhs))
    return worst


@dataclass(frozen=True)
class DominationReport:
    """Joint outcome of the hypothesis check and the three-level verifier."""

    hypothesis_ok: bool
    hypothesis_margins: np.ndarray  # min eig of W(x) - c(x) I per vertex
    form: Verdict
    resolvent: Verdict
    semigroup: Verdict
    metadata: dict

    @property
    def verdicts_agree(self) -> bool:
        outcomes = {self.form.passed, self.resolvent.passed, self.semigroup.passed}
        return len(outcomes) == 1

    @property
    def consistent(self) -> bool:
        all_pass = self.form.passed and self.resolvent.passed and self.semigroup.passed
        if self.hypothesis_ok and not all_pass:
            return False
        return self.verdicts_agree

    def to_report(self) -> dict:
        return {
            "hypothesis": {
                "passed": self.hypothesis_ok,
                "margins": self.hypothesis_margins,
                "min_margin": float(self.hypothesis_margins.min()),
            },
            "form": self.form.to_report(),
            "resolvent": self.resolvent.to_report(),
            "semigroup": self.semigroup.to_report(),
            "consistent": self.consistent,
            "verdicts_agree": self.verdicts_agree,
            "metadata": self.metadata,
        }


def hypothesis_margins(G: WeightedGraph, bundle: HermitianBundle) -> np.ndarray:
    """Per-vertex min eigenvalue of the Hermitian part of W(x) - c(x) I."""
    out = np.empty(G.n)
    eye = np.eye(bundle.rank)
    for x in range(G.n):
        w = bundle.endo[x] - G.killing[x] * eye
        out[x] = np.linalg.eigvalsh((w + w.conj().T) / 2).min()
    return out


def diamagnetic_report(
    G: WeightedGraph,
    bundle: HermitianBundle,
    t_list=DEFAULT_T_GRID,
    alpha_list=DEFAULT_ALPHA_GRID,
    samples: int = 100,
    seed: int = 42,
    tol: float = DOMINATION_TOL,
) -> DominationReport:
    """Run the hypothesis check and all three domination checks.

    The hypothesis <W(x)v, v> >= c(x)|v|^2 per vertex is sufficient for
    the bundle form to be dominated by the scalar form, so a passing
    hypothesis with any failing verdict marks the report inconsistent.
    """
    margins = hypothesis_margins(G, bundle)
    hyp_ok = bool((margins >= -HYPOTHESIS_TOL).all())

    A = assemble_magnetic_form(G, bundle)
    B = assemble_scalar_form(G)
    rng = np.random.default_rng(seed)
    sem = check_semigroup_domination(A, B, t_list, samples, rng, tol)
    res = check_resolvent_domination(A, B, alpha_list, samples, rng, tol)
    frm = check_form_domination(A, B, bundle, samples, rng, tol)

    metadata = {
        "seed": seed,
        "t_grid": list(t_list),
        "alpha_grid": list(alpha_list),
        "samples": samples,
        "tolerance": tol,
    }
    return DominationReport(hyp_ok, margins, frm, res, sem, metadata)
