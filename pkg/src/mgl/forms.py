"""Assembly of scalar and magnetic energy forms as Hermitian matrices.

A FormOperator couples the form matrix L (so that Q(u, v) = <Lu, v> in the
unweighted pairing) with the diagonal measure matrix M. The generator in
the m-weighted inner product is A = M^-1 L; it is diagonalized through the
honest Hermitian matrix M^-1/2 L M^-1/2 whose spectral decomposition is
computed eagerly and cached, since every downstream operation (semigroups,
resolvents, limit checks) reuses it. Instances are immutable.
"""

from __future__ import annotations

import numpy as np

from .bundles import HermitianBundle, validate_bundle
from .errors import (
    AlphaInSpectrum,
    BundleInvalid,
    DimensionMismatch,
    EigSolverFailure,
    NegativeTime,
)
from .graphs import WeightedGraph


class FormOperator:
    """Hermitian form matrix with cached measure-symmetrized eigensystem.

    Parameters
    ----------
    L : (N, N) array, Hermitian up to rounding; symmetrized on ingest
    measure : (n,) strictly positive vertex measures
    d : fiber dimension, with N = n * d (1 for scalar forms)
    graph : optional back-reference to the underlying graph
    """

    __slots__ = (
        "L",
        "measure",
        "d",
        "n",
        "dim",
        "graph",
        "m_diag",
        "m_sqrt",
        "m_isqrt",
        "a_sym",
        "eigenvalues",
        "eigenvectors",
        "lower_bound",
    )

    def __init__(self, L, measure, d=1, graph=None):
        L = np.asarray(L)
        if L.ndim != 2 or L.shape[0] != L.shape[1]:
            raise DimensionMismatch(f"form matrix must be square, got {L.shape}")
        measure = np.asarray(measure, dtype=float)
        if measure.ndim != 1 or (measure <= 0).any():
            raise DimensionMismatch("measure must be a strictly positive vector")
        if L.shape[0] != measure.size * d:
            raise DimensionMismatch(
                f"matrix size {L.shape[0]} != n*d = {measure.size * d}"
            )

        # Averaging with the adjoint makes L exactly Hermitian.
        self.L = (L + L.conj().T) / 2
        self.L.setflags(write=False)
        self.measure = measure
        self.d = int(d)
        self.n = measure.size
        self.dim = L.shape[0]
        self.graph = graph

        self.m_diag = np.repeat(measure, d)
        self.m_sqrt = np.sqrt(self.m_diag)
        self.m_isqrt = 1.0 / self.m_sqrt
        self.a_sym = self.m_isqrt[:, None] * self.L * self.m_isqrt[None, :]
        self.a_sym = (self.a_sym + self.a_sym.conj().T) / 2
        self.a_sym.setflags(write=False)

        try:
            w, U = np.linalg.eigh(self.a_sym)
        except np.linalg.LinAlgError as exc:
            raise EigSolverFailure(f"eigendecomposition failed: {exc}") from exc
        self.eigenvalues = w
        self.eigenvalues.setflags(write=False)
        self.eigenvectors = U
        self.eigenvectors.setflags(write=False)
        self.lower_bound = float(w[0])

    # -- form evaluation ---------------------------------------------------

    def _check_vector(self, u):
        u = np.asarray(u)
        if u.shape[0] != self.dim:
            raise DimensionMismatch(
                f"vector has leading dimension {u.shape[0]}, expected {self.dim}"
            )
        return u

    def evaluate(self, u, v):
        """Q(u, v) = <Lu, v>: linear in u, conjugate-linear in v."""
        u = self._check_vector(u)
        v = self._check_vector(v)
        return complex(np.vdot(v, self.L @ u))

    def quad(self, u) -> float:
        """Real quadratic value Q(u, u)."""
        return self.evaluate(u, u).real

    def apply_generator(self, u):
        """A u with A = M^-1 L, the generator in the m-inner product."""
        u = self._check_vector(u)
        return (self.L @ u) / (
            self.m_diag if u.ndim == 1 else self.m_diag[:, None]
        )

    # -- spectral calculus ---------------------------------------------------

    def _apply_function(self, scalars, u):
        """M^-1/2 U diag(scalars) U* M^1/2 u for (stacks of) vectors u."""
        U = self.eigenvectors
        if u.ndim == 1:
            y = U.conj().T @ (self.m_sqrt * u)
            return self.m_isqrt * (U @ (scalars * y))
        y = U.conj().T @ (self.m_sqrt[:, None] * u)
        return self.m_isqrt[:, None] * (U @ (scalars[:, None] * y))

    def _function_matrix(self, scalars):
        U = self.eigenvectors
        core = (U * scalars[None, :]) @ U.conj().T
        return self.m_isqrt[:, None] * core * self.m_sqrt[None, :]

    def semigroup(self, t, u):
        """e^{-tA} u via the cached spectral decomposition; identity at t = 0."""
        if t < 0:
            raise NegativeTime(f"semigroup time must be nonnegative, got {t}")
        u = self._check_vector(u)
        if t == 0:
            return np.array(u, copy=True)
        return self._apply_function(np.exp(-t * self.eigenvalues), u)

    def semigroup_matrix(self, t):
        if t < 0:
            raise NegativeTime(f"semigroup time must be nonnegative, got {t}")
        if t == 0:
            return np.eye(self.dim, dtype=self.L.dtype)
        return self._function_matrix(np.exp(-t * self.eigenvalues))

    def _check_alpha(self, alpha):
        if alpha <= -self.lower_bound + 1e-12:
            raise AlphaInSpectrum(
                f"alpha = {alpha} is not strictly above -lambda_min = "
                f"{-self.lower_bound}"
            )

    def resolvent(self, alpha, u):
        """(A + alpha)^-1 u for alpha strictly inside the resolvent set."""
        self._check_alpha(alpha)
        u = self._check_vector(u)
        return self._apply_function(1.0 / (self.eigenvalues + alpha), u)

    def resolvent_matrix(self, alpha):
        self._check_alpha(alpha)
        return self._function_matrix(1.0 / (self.eigenvalues + alpha))

    # -- m-weighted geometry -------------------------------------------------

    def inner(self, u, v):
        """m-weighted inner product on the flat space, conjugate in v."""
        return complex(np.sum(self.m_diag * np.asarray(u) * np.conj(v)))

    def norm(self, u):
        return float(np.sqrt(abs(self.inner(u, u).real)))

    def block_norms(self, u):
        """Pointwise fiber norms |u(x)| of a flattened section."""
        u = self._check_vector(u)
        return np.linalg.norm(np.asarray(u).reshape(self.n, self.d), axis=1)

    def __repr__(self):
        return f"FormOperator(dim={self.dim}, d={self.d}, lambda={self.lower_bound:.3g})"


def assemble_scalar_form(G: WeightedGraph) -> FormOperator:
    """Form matrix of the scalar energy with killing term.

    Q(u, v) = 1/2 sum_{x,y} b(x,y)(u(x)-u(y))(conj v(x)-conj v(y))
              + sum_x c(x) u(x) conj v(x),
    realized as L = diag(row sums + c) - (weight matrix).
    """
    L = np.diag(G.row_sums + G.killing) - G.adjacency_matrix()
    return FormOperator(L, G.measure, d=1, graph=G)


def assemble_magnetic_form(G: WeightedGraph, B: HermitianBundle) -> FormOperator:
    """Block form matrix of the bundle energy with endomorphism term.

    Diagonal blocks are (sum_y b(x,y)) I + W(x); the block at (x, y) is
    -b(x,y) Phi_{x,y}. The quadratic form equals
    1/2 sum_{x,y} b(x,y) |u(x) - Phi_{x,y} u(y)|^2 + sum_x <W(x)u(x), u(x)>.
    """
    if B.graph is not G:
        raise DimensionMismatch("bundle is defined over a different graph")
    report = validate_bundle(B)
    if not report.ok:
        edge, defect = report.worst_edge()
        raise BundleInvalid(
            f"bundle failed validation (worst unitarity defect {defect:.3g} at "
            f"edge {edge}; min endo eigenvalue {report.endo_min_eigs.min():.3g})"
        )

    n, d = G.n, B.rank
    L = np.zeros((n * d, n * d), dtype=complex)
    for x in range(n):
        sl = slice(x * d, (x + 1) * d)
        L[sl, sl] = G.row_sums[x] * np.eye(d) + B.endo[x]
    for (x, y), b in G.edges.items():
        phi = B.phi(x, y)
        L[x * d : (x + 1) * d, y * d : (y + 1) * d] = -b * phi
        L[y * d : (y + 1) * d, x * d : (x + 1) * d] = -b * phi.conj().T
    return FormOperator(L, G.measure, d=d, graph=G)


def evaluate_form(F: FormOperator, u, v) -> complex:
    """Sesquilinear form value Q(u, v); conjugate-symmetric in (u, v)."""
    return F.evaluate(u, v)


def generator(F: FormOperator):
    """The generator's spectral data in the m-weighted inner product.

    Returns a read-only view with ascending real eigenvalues, the
    orthonormal eigenbasis of the symmetrized matrix, and the action
    u -> M^-1 L u satisfying Q(u, v) = <Au, v>_m.
    """
    return _Generator(F)


class _Generator:
    __slots__ = ("form",)

    def __init__(self, form: FormOperator):
        self.form = form

    @property
    def eigenvalues(self):
        return self.form.eigenvalues

    @property
    def basis(self):
        return self.form.eigenvectors

    @property
    def symmetrized(self):
        return self.form.a_sym

    @property
    def lower_bound(self):
        return self.form.lower_bound

    def matrix(self):
        return self.form.L / self.form.m_diag[:, None]

    def apply(self, u):
        return self.form.apply_generator(u)

    def reconstruction_defect(self) -> float:
        """Max-norm distance between U diag(mu) U* and the symmetrized matrix."""
        U, w = self.form.eigenvectors, self.form.eigenvalues
        return float(np.abs((U * w[None, :]) @ U.conj().T - self.form.a_sym).max())


def flatten_section(u) -> np.ndarray:
    """(n, d) section -> flat (n*d,) vector in vertex-major block order."""
    u = np.asarray(u)
    if u.ndim != 2:
        raise DimensionMismatch(f"expected an (n, d) section, got shape {u.shape}")
    return u.reshape(-1)


def unflatten_section(v, d: int) -> np.ndarray:
    v = np.asarray(v)
    if v.ndim != 1 or v.size % d:
        raise DimensionMismatch(f"cannot reshape size {v.size} into blocks of {d}")
    return v.reshape(-1, d)
