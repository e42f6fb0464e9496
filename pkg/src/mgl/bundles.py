"""Hermitian vector bundles over a weighted graph.

A bundle of rank d attaches the fiber C^d to every vertex, a unitary
connection matrix to every edge with positive weight, and a positive
endomorphism W(x) to every vertex. Sections are (n, d) complex arrays.
The connection is stored once per unordered edge for the orientation
(x, y) with x < y; the reverse direction is the adjoint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType

import numpy as np

from .errors import DimensionMismatch, NegativeG, SchemaError
from .graphs import WeightedGraph, _as_subset, restrict_neumann

UNITARY_TOL = 1e-10
ENDO_TOL = 1e-10


class HermitianBundle:
    """Rank-d Hermitian bundle: unitary edge maps plus vertex endomorphisms."""

    __slots__ = ("graph", "rank", "connection", "endo")

    def __init__(self, graph: WeightedGraph, rank: int, connection=None, endo=None):
        if rank <= 0:
            raise DimensionMismatch(f"rank must be positive, got {rank}")
        self.graph = graph
        self.rank = int(rank)

        conn = {}
        for (x, y), mat in dict(connection or {}).items():
            x, y = int(x), int(y)
            key = (x, y) if x < y else (y, x)
            if key not in graph.edges:
                raise DimensionMismatch(
                    f"connection given on non-edge {key} (b=0 there)"
                )
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != (rank, rank):
                raise DimensionMismatch(
                    f"connection matrix at edge {key} has shape {mat.shape}, "
                    f"expected ({rank},{rank})"
                )
            stored = (mat if key == (x, y) else mat.conj().T).copy()
            stored.setflags(write=False)
            conn[key] = stored
        self.connection = MappingProxyType(conn)

        if endo is None:
            endo = np.zeros((graph.n, rank, rank), dtype=complex)
        else:
            endo = np.asarray(endo, dtype=complex).copy()
            if endo.shape != (graph.n, rank, rank):
                raise DimensionMismatch(
                    f"endo field has shape {endo.shape}, expected "
                    f"({graph.n},{rank},{rank})"
                )
        endo.setflags(write=False)
        self.endo = endo

    def phi(self, x, y):
        """Connection matrix mapping the fiber at y into the fiber at x."""
        key = (x, y) if x < y else (y, x)
        mat = self.connection.get(key)
        if mat is None:
            return np.eye(self.rank, dtype=complex)
        return mat if x < y else mat.conj().T

    def check_section(self, u):
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.graph.n, self.rank):
            raise DimensionMismatch(
                f"section has shape {u.shape}, expected ({self.graph.n},{self.rank})"
            )
        return u

    def __repr__(self):
        return f"HermitianBundle(n={self.graph.n}, rank={self.rank})"


def trivial_bundle(graph: WeightedGraph, rank: int = 1) -> HermitianBundle:
    """Identity connection, zero endomorphism."""
    return HermitianBundle(graph, rank)


@dataclass(frozen=True)
class BundleValidation:
    """Per-edge unitarity defects and per-vertex endomorphism diagnostics."""

    ok: bool
    edge_defects: dict          # (x, y) -> ||Phi* Phi - I||_max
    endo_min_eigs: np.ndarray   # min eigenvalue of the Hermitian part of W(x)
    endo_herm_defects: np.ndarray  # ||W(x) - W(x)*||_max

    def worst_edge(self):
        if not self.edge_defects:
            return None, 0.0
        edge = max(self.edge_defects, key=self.edge_defects.get)
        return edge, self.edge_defects[edge]


def validate_bundle(B: HermitianBundle) -> BundleValidation:
    """Diagnose unitarity of the connection and positivity of the endomorphism.

    Returns a failing report rather than raising, so callers can print the
    per-edge and per-vertex defects.
    """
    eye = np.eye(B.rank)
    edge_defects = {}
    for (x, y) in B.graph.edges:
        phi = B.phi(x, y)
        edge_defects[(x, y)] = float(
            np.abs(phi.conj().T @ phi - eye).max()
        )

    n = B.graph.n
    herm_defects = np.zeros(n)
    min_eigs = np.zeros(n)
    for x in range(n):
        w = B.endo[x]
        herm_defects[x] = np.abs(w - w.conj().T).max()
        min_eigs[x] = np.linalg.eigvalsh((w + w.conj().T) / 2).min()

    ok = (
        all(d <= UNITARY_TOL for d in edge_defects.values())
        and (min_eigs >= -ENDO_TOL).all()
        and (herm_defects <= ENDO_TOL).all()
    )
    return BundleValidation(bool(ok), edge_defects, min_eigs, herm_defects)


def symmetrize(u, B: HermitianBundle) -> np.ndarray:
    """Pointwise fiber norm of a section: (Su)(x) = |u(x)|.

    Preserves the l2(m) norm: ||Su||_m equals the section norm of u.
    """
    u = B.check_section(u)
    return np.linalg.norm(u, axis=1)


def pair(f1, g, B: HermitianBundle) -> np.ndarray:
    """The section with magnitude g phase-aligned to f1.

    Blockwise g(x) * f1(x)/|f1(x)|; where f1 vanishes the direction falls
    back to the first standard basis vector of the fiber, so the result
    always satisfies S(result) = g and <f1, result> = <S f1, g>.
    """
    f1 = B.check_section(f1)
    g = np.asarray(g, dtype=float)
    if g.shape != (B.graph.n,):
        raise DimensionMismatch(f"g has shape {g.shape}, expected ({B.graph.n},)")
    if (g < 0).any():
        worst = int(np.argmin(g))
        raise NegativeG(f"g must be nonnegative; g({worst}) = {g[worst]}")

    norms = np.linalg.norm(f1, axis=1)
    out = np.zeros_like(f1)
    nz = norms > 0
    out[nz] = (g[nz] / norms[nz])[:, None] * f1[nz]
    out[~nz, 0] = g[~nz]
    return out


@dataclass(frozen=True)
class PairedCheck:
    ok: bool
    worst_vertex: int
    worst_defect: float


def check_paired(f1, f2, tol: float = 1e-10) -> PairedCheck:
    """Check the pointwise phase-alignment condition <f1(x), f2(x)> = |f1(x)||f2(x)|.

    The defect at x is |f1(x)||f2(x)| - Re<f1(x), f2(x)>, which is nonnegative
    by Cauchy-Schwarz and zero exactly on paired sections.
    """
    f1 = np.asarray(f1, dtype=complex)
    f2 = np.asarray(f2, dtype=complex)
    if f1.shape != f2.shape or f1.ndim != 2:
        raise DimensionMismatch(f"sections have shapes {f1.shape} vs {f2.shape}")
    inner = np.einsum("xj,xj->x", f1, f2.conj())
    prods = np.linalg.norm(f1, axis=1) * np.linalg.norm(f2, axis=1)
    defects = prods - inner.real
    worst = int(np.argmax(defects))
    return PairedCheck(bool(defects[worst] <= tol), worst, float(defects[worst]))


def restrict_bundle(B: HermitianBundle, omega, fold_boundary: bool = False):
    """Restrict a bundle to a vertex subset of its graph.

    With fold_boundary=True the weights of edges leaving the subset are
    added (times the identity) to the endomorphism, which is what makes the
    restricted magnetic form agree with the host form on zero-extensions.
    """
    G = B.graph
    omega = _as_subset(G, omega)
    members = omega.members
    pos = {int(v): i for i, v in enumerate(members)}

    connection = {
        (pos[x], pos[y]): mat
        for (x, y), mat in B.connection.items()
        if x in pos and y in pos
    }
    endo = B.endo[members].copy()
    if fold_boundary:
        boundary = G.adjacency_matrix()[np.ix_(members, omega.complement())].sum(axis=1)
        endo += boundary[:, None, None] * np.eye(B.rank)

    sub = restrict_neumann(G, omega)
    return HermitianBundle(sub, B.rank, connection, endo)


def load_bundle(graph: WeightedGraph, source) -> HermitianBundle:
    """Build a HermitianBundle from a bundle-spec JSON document.

    Format::

        {"rank": int,
         "connection": [{"u": int, "v": int, "matrix": [[[re, im], ...], ...]}],
         "endo": [matrix; n]}

    Omitted connection entries default to the identity; an omitted endo
    field defaults to zero matrices. Complex entries are [re, im] pairs.
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise SchemaError(f"cannot read bundle spec: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"bundle spec is not valid JSON: {exc}") from exc
    else:
        doc = source

    if not isinstance(doc, dict):
        raise SchemaError("bundle spec must be a JSON object")
    unknown = set(doc) - {"rank", "connection", "endo"}
    if unknown:
        raise SchemaError(f"bundle spec has unknown keys: {sorted(unknown)}")
    rank = doc.get("rank")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank <= 0:
        raise SchemaError("bundle spec requires a positive integer 'rank'")

    def parse_matrix(raw, where):
        try:
            mat = np.asarray(
                [[complex(cell[0], cell[1]) for cell in row] for row in raw]
            )
        except (TypeError, IndexError, ValueError) as exc:
            raise SchemaError(f"{where}: matrix entries must be [re, im] pairs") from exc
        if mat.shape != (rank, rank):
            raise SchemaError(f"{where}: matrix must be {rank}x{rank}")
        return mat

    connection = {}
    raw_conn = doc.get("connection", [])
    if not isinstance(raw_conn, list):
        raise SchemaError("'connection' must be a list")
    for i, entry in enumerate(raw_conn):
        if not isinstance(entry, dict) or not {"u", "v", "matrix"} <= set(entry):
            raise SchemaError(f"connection #{i} must have keys u, v, matrix")
        u, v = entry["u"], entry["v"]
        if not isinstance(u, int) or not isinstance(v, int):
            raise SchemaError(f"connection #{i}: u and v must be integers")
        connection[(u, v)] = parse_matrix(entry["matrix"], f"connection #{i}")

    endo = None
    if "endo" in doc:
        raw_endo = doc["endo"]
        if not isinstance(raw_endo, list) or len(raw_endo) != graph.n:
            raise SchemaError(f"'endo' must be a list of length n={graph.n}")
        endo = np.stack(
            [parse_matrix(raw, f"endo #{x}") for x, raw in enumerate(raw_endo)]
        )

    try:
        return HermitianBundle(graph, rank, connection, endo)
    except DimensionMismatch as exc:
        raise SchemaError(str(exc)) from exc
