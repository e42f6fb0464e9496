"""Shared graph and bundle fixtures for the whole test suite."""

from __future__ import annotations

import numpy as np

from mgl import HermitianBundle, WeightedGraph, trivial_bundle


def p2():
    return WeightedGraph(2, {(0, 1): 1.0})


def p3():
    return WeightedGraph(3, {(0, 1): 1.0, (1, 2): 1.0})


def single_vertex(c=2.0):
    return WeightedGraph(1, {}, killing=[c])


def triangle():
    return WeightedGraph(3, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0})


def star5():
    return WeightedGraph(5, {(0, k): 1.0 for k in range(1, 5)})


def path8_weighted():
    rng = np.random.default_rng(808)
    edges = {(i, i + 1): 0.2 + rng.random() for i in range(7)}
    return WeightedGraph(8, edges, killing=rng.random(8), measure=0.5 + rng.random(8))


def two_components():
    edges = {(0, 1): 1.0, (1, 2): 0.5, (0, 2): 2.0, (3, 4): 1.5, (4, 5): 0.7}
    return WeightedGraph(6, edges)


def random_graph(n=12, density=0.25, seed=1234, with_killing=True):
    rng = np.random.default_rng(seed)
    edges = {(i, i + 1): 0.1 + rng.random() for i in range(n - 1)}
    for x in range(n):
        for y in range(x + 2, n):
            if rng.random() < density:
                edges[(x, y)] = 0.1 + rng.random()
    killing = rng.random(n) if with_killing else None
    return WeightedGraph(n, edges, killing, 0.5 + rng.random(n))


def fixture_graphs():
    """The graph fixture set exercised by the cross-cutting property tests."""
    return {
        "p2": p2(),
        "p3": p3(),
        "single_c2": single_vertex(2.0),
        "triangle": triangle(),
        "star5": star5(),
        "path8": path8_weighted(),
        "random12": random_graph(),
        "two_components": two_components(),
    }


def zero_killing_graphs():
    return {
        name: g
        for name, g in fixture_graphs().items()
        if not g.killing.any()
    }


def random_unitary(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_section(n, d, rng):
    return rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))


def random_bundle(G, d, rng, psd_scale=0.3):
    """Random unitary connection with endomorphism c*I + PSD noise."""
    conn = {e: random_unitary(d, rng) for e in G.edges}
    endo = np.empty((G.n, d, d), dtype=complex)
    for x in range(G.n):
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        endo[x] = G.killing[x] * np.eye(d) + psd_scale * (z @ z.conj().T)
    return HermitianBundle(G, d, conn, endo)


def phase_bundle(G, theta):
    """Rank-1 bundle with the constant phase e^{i theta} on every edge."""
    conn = {e: np.array([[np.exp(1j * theta)]]) for e in G.edges}
    return HermitianBundle(G, 1, conn)


def diamagnetic_instance(seed, n_max=60, d_max=3, density=0.1):
    """Seeded random graph + bundle satisfying W(x) >= c(x) I pointwise."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    edges = {(i, i + 1): 0.1 + rng.random() for i in range(n - 1)}
    for x in range(n):
        for y in range(x + 2, n):
            if rng.random() < density:
                edges[(x, y)] = 0.1 + rng.random()
    G = WeightedGraph(n, edges, rng.random(n), 0.5 + rng.random(n))
    return G, random_bundle(G, d, rng)


def doubled_pair(seed, n_max=12):
    """Counterexample pair: bundle form over doubled weights vs scalar form.

    Returns (G_doubled, bundle over it, G_original); the bundle form over
    the doubled graph is not dominated by the scalar form of the original.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max + 1))
    edges = {(i, i + 1): 0.1 + rng.random() for i in range(n - 1)}
    for x in range(n):
        for y in range(x + 2, n):
            if rng.random() < 0.2:
                edges[(x, y)] = 0.1 + rng.random()
    m = 0.5 + rng.random(n)
    G = WeightedGraph(n, edges, None, m)
    G2 = WeightedGraph(n, {e: 2 * b for e, b in edges.items()}, None, m)
    return G2, trivial_bundle(G2), G


def path50_graph(q=0.8):
    """Regression fixture: 50-vertex path with geometrically decaying weights.

    A uniform path keeps the Dirichlet/Neumann resolvent gap constant along
    prefix exhaustions (the boundary perturbation has fixed strength), so
    the regression fixture decays the weights to make the gap shrink.
    """
    return WeightedGraph(50, {(i, i + 1): q**i for i in range(49)})


def path50_bundle(G, seed=42):
    rng = np.random.default_rng(seed)
    conn = {
        e: np.array([[np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))]]) for e in G.edges
    }
    return HermitianBundle(G, 1, conn)


# JSON documents for CLI tests.

P2_GRAPH_DOC = {"n": 2, "edges": [{"u": 0, "v": 1, "b": 1.0}]}

P2_ANTIPODAL_BUNDLE_DOC = {
    "rank": 1,
    "connection": [{"u": 0, "v": 1, "matrix": [[[-1.0, 0.0]]]}],
}


def diamagnetic_docs(seed=11, n=14, d=2):
    """Graph/bundle spec documents for a diamagnetic CLI fixture."""
    rng = np.random.default_rng(seed)
    edges = [
        {"u": i, "v": i + 1, "b": float(0.1 + rng.random())} for i in range(n - 1)
    ]
    killing = [float(v) for v in rng.random(n)]
    measure = [float(v) for v in 0.5 + rng.random(n)]
    graph_doc = {"n": n, "edges": edges, "killing": killing, "measure": measure}

    def mat_to_doc(mat):
        return [[[float(z.real), float(z.imag)] for z in row] for row in mat]

    connection = [
        {"u": e["u"], "v": e["v"], "matrix": mat_to_doc(random_unitary(d, rng))}
        for e in edges
    ]
    endo = []
    for x in range(n):
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        endo.append(mat_to_doc(killing[x] * np.eye(d) + 0.3 * (z @ z.conj().T)))
    bundle_doc = {"rank": d, "connection": connection, "endo": endo}
    return graph_doc, bundle_doc
