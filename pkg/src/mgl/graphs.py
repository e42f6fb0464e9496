"""Finite weighted graphs: vertex measure, symmetric edge weights, killing term.

A graph is the data (n, b, c, m) with b symmetric and zero on the diagonal,
c >= 0 and m > 0. Edge weights are stored once per unordered pair, so the
symmetry axiom holds by construction rather than by check. All objects are
immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import json
from pathlib import Path
from types import MappingProxyType

import numpy as np

from .errors import InvariantError, SchemaError


class WeightedGraph:
    """Immutable weighted graph on vertices 0..n-1.

    Attributes
    ----------
    n : vertex count
    edges : dict mapping (x, y) with x < y to the positive weight b(x, y)
    killing : length-n array of nonnegative killing values c
    measure : length-n array of strictly positive vertex measures m
    row_sums : cached length-n array of sum_y b(x, y)
    """

    __slots__ = ("n", "edges", "killing", "measure", "row_sums", "_adjacency")

    def __init__(self, n, edges, killing=None, measure=None):
        if not isinstance(n, (int, np.integer)) or n <= 0:
            raise InvariantError(f"vertex count must be a positive integer, got {n!r}")
        self.n = int(n)

        clean = {}
        for (x, y), b in dict(edges).items():
            x, y = int(x), int(y)
            b = float(b)
            if not (0 <= x < self.n and 0 <= y < self.n):
                raise InvariantError(f"edge ({x},{y}) out of range for n={self.n}")
            if x == y:
                raise InvariantError(f"axiom (b1) violated: loop weight at vertex {x}")
            if not np.isfinite(b) or b < 0:
                raise InvariantError(
                    f"edge-weight nonnegativity violated at edge ({x},{y}): b={b}"
                )
            if b == 0.0:
                continue
            key = (x, y) if x < y else (y, x)
            if key in clean and clean[key] != b:
                raise InvariantError(
                    f"axiom (b2) violated: conflicting weights for edge {key}"
                )
            clean[key] = b
        self.edges = MappingProxyType(clean)

        self.killing = self._vertex_array(killing, default=0.0, name="killing")
        self.measure = self._vertex_array(measure, default=1.0, name="measure")
        for x, c in enumerate(self.killing):
            if not np.isfinite(c) or c < 0:
                raise InvariantError(
                    f"killing nonnegativity violated at vertex {x}: c={c}"
                )
        for x, m in enumerate(self.measure):
            if not np.isfinite(m) or m <= 0:
                raise InvariantError(f"measure positivity violated at vertex {x}: m={m}")

        adj = np.zeros((self.n, self.n))
        for (x, y), b in self.edges.items():
            adj[x, y] = b
            adj[y, x] = b
        self._adjacency = adj
        self._adjacency.setflags(write=False)
        self.row_sums = adj.sum(axis=1)
        self.row_sums.setflags(write=False)

    def _vertex_array(self, values, default, name):
        if values is None:
            arr = np.full(self.n, default)
        else:
            arr = np.asarray(values, dtype=float).copy()
            if arr.shape != (self.n,):
                raise InvariantError(
                    f"{name} must have length n={self.n}, got shape {arr.shape}"
                )
        arr.setflags(write=False)
        return arr

    def adjacency_matrix(self):
        """Dense symmetric matrix of edge weights (read-only view)."""
        return self._adjacency

    def weight(self, x, y):
        """b(x, y); zero on the diagonal and on non-edges."""
        if x == y:
            return 0.0
        key = (x, y) if x < y else (y, x)
        return self.edges.get(key, 0.0)

    def neighbors(self, x):
        """Vertices y with b(x, y) > 0, ascending."""
        return np.flatnonzero(self._adjacency[x] > 0)

    def weighted_degree(self, x):
        """Deg(x) = (sum_y b(x, y) + c(x)) / m(x)."""
        return (self.row_sums[x] + self.killing[x]) / self.measure[x]

    def weighted_degrees(self):
        return (self.row_sums + self.killing) / self.measure

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, edges={len(self.edges)})"


class VertexSubset:
    """A nonempty, sorted, duplicate-free set of vertices of a parent graph."""

    __slots__ = ("parent", "members")

    def __init__(self, parent: WeightedGraph, members):
        members = np.asarray(list(members), dtype=int)
        if members.size == 0:
            raise InvariantError("vertex subset must be nonempty")
        if np.unique(members).size != members.size:
            raise InvariantError("vertex subset contains duplicates")
        if members.min() < 0 or members.max() >= parent.n:
            raise InvariantError(
                f"vertex subset out of range for graph with n={parent.n}"
            )
        self.parent = parent
        self.members = np.sort(members)
        self.members.setflags(write=False)

    def __len__(self):
        return len(self.members)

    def complement(self):
        mask = np.ones(self.parent.n, dtype=bool)
        mask[self.members] = False
        return np.flatnonzero(mask)


def _as_subset(G: WeightedGraph, omega) -> VertexSubset:
    if isinstance(omega, VertexSubset):
        if omega.parent is not G:
            raise InvariantError("vertex subset belongs to a different graph")
        return omega
    return VertexSubset(G, omega)


def load_graph(source) -> WeightedGraph:
    """Build a validated WeightedGraph from a graph-spec JSON document.

    `source` may be a dict already parsed from JSON, or a path to a JSON
    file. The document format is::

        {"n": int,
         "edges": [{"u": int, "v": int, "b": float}, ...],
         "killing": [float; n],   # optional, default 0
         "measure": [float; n]}   # optional, default 1

    Raises SchemaError for malformed documents and InvariantError (naming
    the violated axiom) for well-formed documents describing invalid graphs.
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise SchemaError(f"cannot read graph spec: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"graph spec is not valid JSON: {exc}") from exc
    else:
        doc = source

    if not isinstance(doc, dict):
        raise SchemaError("graph spec must be a JSON object")
    unknown = set(doc) - {"n", "edges", "killing", "measure"}
    if unknown:
        raise SchemaError(f"graph spec has unknown keys: {sorted(unknown)}")
    if "n" not in doc or not isinstance(doc["n"], int) or isinstance(doc["n"], bool):
        raise SchemaError("graph spec requires an integer 'n'")
    n = doc["n"]
    if n <= 0:
        raise SchemaError("'n' must be positive")

    raw_edges = doc.get("edges", [])
    if not isinstance(raw_edges, list):
        raise SchemaError("'edges' must be a list")
    edges = {}
    seen = set()
    for i, entry in enumerate(raw_edges):
        if not isinstance(entry, dict) or not {"u", "v", "b"} <= set(entry):
            raise SchemaError(f"edge #{i} must be an object with keys u, v, b")
        u, v, b = entry["u"], entry["v"], entry["b"]
        if not isinstance(u, int) or not isinstance(v, int):
            raise SchemaError(f"edge #{i}: u and v must be integers")
        if not isinstance(b, (int, float)) or isinstance(b, bool):
            raise SchemaError(f"edge #{i}: b must be a number")
        if not (0 <= u < n and 0 <= v < n):
            raise SchemaError(f"edge #{i}: endpoints ({u},{v}) out of range")
        if u == v:
            # A loop is an axiom violation, not a formatting problem.
            raise InvariantError(f"axiom (b1) violated: loop edge at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            if edges.get(key) != float(b):
                raise InvariantError(
                    f"axiom (b2) violated: conflicting weights for edge {key}"
                )
            raise SchemaError(f"duplicate edge {key} in edge list")
        seen.add(key)
        edges[key] = float(b)
        if float(b) < 0:
            raise InvariantError(
                f"edge-weight nonnegativity violated at edge {key}: b={b}"
            )

    for field in ("killing", "measure"):
        if field in doc:
            vals = doc[field]
            if not isinstance(vals, list) or len(vals) != n:
                raise SchemaError(f"'{field}' must be a list of length n={n}")
            if not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in vals
            ):
                raise SchemaError(f"'{field}' entries must be numbers")

    return WeightedGraph(n, edges, doc.get("killing"), doc.get("measure"))


def weighted_degree(G: WeightedGraph, x: int) -> float:
    """Deg(x) = (sum_y b(x, y) + c(x)) / m(x)."""
    if not 0 <= x < G.n:
        raise InvariantError(f"vertex {x} out of range")
    return G.weighted_degree(x)


def restrict_dirichlet(G: WeightedGraph, omega) -> WeightedGraph:
    """Restrict to a vertex subset, folding boundary edges into the killing term.

    The result's quadratic form on functions over the subset equals the host
    form evaluated on zero-extensions: edges leaving the subset contribute
    c_new(x) = c(x) + sum_{y outside} b(x, y).
    """
    omega = _as_subset(G, omega)
    members = omega.members
    pos = {int(v): i for i, v in enumerate(members)}
    adj = G.adjacency_matrix()

    edges = {
        (pos[x], pos[y]): b
        for (x, y), b in G.edges.items()
        if x in pos and y in pos
    }
    boundary = adj[np.ix_(members, omega.complement())].sum(axis=1)
    killing = G.killing[members] + boundary
    return WeightedGraph(len(members), edges, killing, G.measure[members])


def restrict_neumann(G: WeightedGraph, omega) -> WeightedGraph:
    """Restrict to a vertex subset, dropping boundary edges (induced subgraph)."""
    omega = _as_subset(G, omega)
    members = omega.members
    pos = {int(v): i for i, v in enumerate(members)}
    edges = {
        (pos[x], pos[y]): b
        for (x, y), b in G.edges.items()
        if x in pos and y in pos
    }
    return WeightedGraph(len(members), edges, G.killing[members], G.measure[members])
