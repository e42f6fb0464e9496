"""Order operations in the weighted orthant of l2(X, m).

Positive/negative parts, the orthogonal positive-negative decomposition,
lattice sup/inf via the absolute-value identity, and the exact metric
projection onto the set of pairs (section, bound) whose pointwise fiber
norm is dominated by the bound. All operations are pure; the vertex
measure only enters through inner products, never through the clamps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import HermitianBundle, pair, symmetrize
from .errors import ComplexInput, DimensionMismatch, PreconditionViolated
from .graphs import WeightedGraph


@dataclass(frozen=True)
class ConeContext:
    """Carries the graph whose measure defines the l2(m) inner product."""

    graph: WeightedGraph

    def inner(self, u, v):
        """m-weighted inner product of scalar functions, conjugate in v."""
        u = np.asarray(u)
        v = np.asarray(v)
        return np.sum(self.graph.measure * u * np.conj(v))

    def norm(self, u):
        return float(np.sqrt(np.abs(self.inner(u, u))))

    def section_inner(self, u, v):
        """m-weighted inner product of (n, d) sections, conjugate in v."""
        u = np.asarray(u)
        v = np.asarray(v)
        return np.sum(self.graph.measure[:, None] * u * np.conj(v))

    def section_norm(self, u):
        return float(np.sqrt(np.abs(self.section_inner(u, u))))

    def product_inner(self, pair_a, pair_b):
        """Inner product on (section, scalar function) pairs."""
        return self.section_inner(pair_a[0], pair_b[0]) + self.inner(
            pair_a[1], pair_b[1]
        )


def _require_real(g) -> np.ndarray:
    arr = np.asarray(g)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ComplexInput("input must be real-valued")
        arr = arr.real
    return np.asarray(arr, dtype=float)


def positive_part(g) -> np.ndarray:
    """Componentwise max(g, 0)."""
    return np.maximum(_require_real(g), 0.0)


def negative_part(g) -> np.ndarray:
    """Componentwise max(-g, 0), so that g = positive_part - negative_part."""
    return np.maximum(-_require_real(g), 0.0)


def absolute_part(g) -> np.ndarray:
    """|g| = positive_part(g) + negative_part(g)."""
    g = _require_real(g)
    return np.maximum(g, 0.0) + np.maximum(-g, 0.0)


def moreau_decompose(g, ctx: ConeContext):
    """Split g into orthogonal nonnegative parts (h1, h2) with g = h1 - h2.

    h1 is the metric projection of g onto the nonnegative orthant of
    l2(X, m) and h2 the projection of -g; the two have disjoint supports,
    so <h1, h2>_m vanishes exactly.
    """
    g = _require_real(g)
    if g.shape != (ctx.graph.n,):
        raise DimensionMismatch(
            f"function has shape {g.shape}, expected ({ctx.graph.n},)"
        )
    return np.maximum(g, 0.0), np.maximum(-g, 0.0)


def lattice_sup(f, g) -> np.ndarray:
    """Lattice supremum (f + g + |f - g|) / 2, the componentwise max."""
    f = _require_real(f)
    g = _require_real(g)
    if f.shape != g.shape:
        raise DimensionMismatch(f"shapes differ: {f.shape} vs {g.shape}")
    return 0.5 * (f + g + np.abs(f - g))


def lattice_inf(f, g) -> np.ndarray:
    """Lattice infimum (f + g - |f - g|) / 2, the componentwise min."""
    f = _require_real(f)
    g = _require_real(g)
    if f.shape != g.shape:
        raise DimensionMismatch(f"shapes differ: {f.shape} vs {g.shape}")
    return 0.5 * (f + g - np.abs(f - g))


def project_domination_set(f1, g, B: HermitianBundle, ctx: ConeContext):
    """Metric projection of (f1, g) onto {(u, v) : |u(x)| <= v(x) for all x}.

    Uses the exact lattice formula: the projected section is half the
    section paired to (min(S(f1), g) + S(f1))^+, and the projected bound
    is half of (max(S(f1), g) + g)^+. The constraint and the squared distance
    both decompose over vertices, so the measure drops out.
    """
    g = _require_real(g)
    f1 = B.check_section(f1)
    s = symmetrize(f1, B)
    magnitudes = positive_part(lattice_inf(s, g) + s)
    f_hat = 0.5 * pair(f1, magnitudes, B)
    g_hat = 0.5 * positive_part(lattice_sup(s, g) + g)
    return f_hat, g_hat


def project_domination_set_halfsum(f1, g, B: HermitianBundle, ctx: ConeContext):
    """Projection onto the same set for 0 <= g <= S(f1): half-sum shortcut.

    On this input class the projection is ((f1 + f2)/2, (S(f1) + g)/2) with
    f2 paired to g. Raises PreconditionViolated outside the class.
    """
    g = _require_real(g)
    f1 = B.check_section(f1)
    s = symmetrize(f1, B)
    if (g < 0).any():
        worst = int(np.argmin(g))
        raise PreconditionViolated(f"g must be nonnegative; g({worst}) = {g[worst]}")
    if (g > s).any():
        worst = int(np.argmax(g - s))
        raise PreconditionViolated(
            f"g must be dominated by S(f1); at vertex {worst}: "
            f"g = {g[worst]} > {s[worst]}"
        )
    f2 = pair(f1, g, B)
    return 0.5 * (f1 + f2), 0.5 * (s + g)
