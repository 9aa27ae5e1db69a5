"""Synthetic labeled graphs: spatial survey-style targets and random instances."""

import math

import numpy as np
from scipy.spatial import cKDTree

from .graph import CATEGORICAL, CATEGORICAL_SET, FeatureSchema, Graph, NUMERIC

SURVEY_SCHEMA = FeatureSchema(
    ("richness", "disturbance", "medicinal", "economical", "forest_type"),
    (NUMERIC, NUMERIC, NUMERIC, NUMERIC, CATEGORICAL),
)

MIXED_SCHEMA = FeatureSchema(("level", "kind", "tags"),
                             (NUMERIC, CATEGORICAL, CATEGORICAL_SET))


def _geometric_patch(rng, n_nodes, n_edges):
    """Closest-pair geometric graph on the unit square: (points, edge list)."""
    pts = rng.random((n_nodes, 2))
    tree = cKDTree(pts)
    radius = 1.5 * math.sqrt(2.0 * n_edges / (math.pi * n_nodes * n_nodes))
    pairs = tree.query_pairs(radius, output_type="ndarray")
    while len(pairs) < n_edges:
        radius *= 1.4
        pairs = tree.query_pairs(radius, output_type="ndarray")
    dists = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
    keep = pairs[np.argsort(dists, kind="stable")[:n_edges]]
    edges = sorted((int(u), int(v)) if u < v else (int(v), int(u)) for u, v in keep)
    return pts, edges


def spatial_graph(n_nodes=1434, n_edges=15069, seed=7, replicas=16):
    """Survey-style target: replicated geometric plots with correlated features.

    One closest-pair geometric patch is surveyed once and then stamped out
    `replicas` times (disjoint copies with identical structure and feature
    values), the way repeated plots of the same terrain profile recur across
    a region. The node and edge remainders become a small extra plot that
    replays a connected motif of the patch. Every connected subgraph of the
    result therefore recurs, value-exact, at least `replicas` times, which is
    what gives retrieval benchmarks on this graph a meaningful answer set.

    Features per node: four small-integer numeric fields varying smoothly
    over the patch (with sparse unit bumps) and a categorical terrain type
    drawn from 27 values on coarse spatial blocks (with sparse flips).
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    base_n = n_nodes // replicas
    base_m = n_edges // replicas
    extra_n = n_nodes - base_n * replicas
    extra_m = n_edges - base_m * replicas
    if base_n < 2 or base_m < 1:
        raise ValueError("patch too small; lower the replica count")
    if extra_m > 0 and extra_n < 2:
        raise ValueError("edge remainder needs at least two remainder nodes")

    rng = np.random.default_rng(seed)
    pts, base_edges = _geometric_patch(rng, base_n, base_m)

    x = pts[:, 0]
    y = pts[:, 1]
    fields = [
        0.5 * (1.0 + np.sin(5.3 * x + 2.1 * y)),
        0.5 * (1.0 + np.cos(3.7 * x - 4.9 * y + 1.0)),
        0.5 * (1.0 + np.sin(22.0 * x * y)),
        0.5 * (1.0 + np.cos(6.1 * y - 1.7 * x)),
    ]
    scales = (6.0, 5.0, 4.0, 3.0)
    offsets = (3.0, 2.0, 2.0, 1.0)
    numeric = []
    for f, sc, off in zip(fields, scales, offsets):
        vals = np.rint(off + sc * f)
        bump = rng.random(base_n) < 0.05
        vals[bump] += 1.0
        numeric.append(np.maximum(vals, 0.0))

    gx = np.minimum((x * 9).astype(int), 8)
    gy = np.minimum((y * 3).astype(int), 2)
    types = gx * 3 + gy
    flip = rng.random(base_n) < 0.03
    types[flip] = rng.integers(0, 27, int(flip.sum()))

    base_feats = [(float(numeric[0][u]), float(numeric[1][u]),
                   float(numeric[2][u]), float(numeric[3][u]),
                   f"T{int(types[u]):02d}") for u in range(base_n)]

    feats = []
    edges = []
    for r in range(replicas):
        off = r * base_n
        feats.extend(base_feats)
        edges.extend((off + u, off + v) for u, v in base_edges)

    if extra_n > 0:
        motif_nodes, motif_edges = _patch_motif(base_edges, base_n,
                                                extra_n, extra_m)
        off = replicas * base_n
        pos = {u: off + i for i, u in enumerate(motif_nodes)}
        feats.extend(base_feats[u] for u in motif_nodes)
        edges.extend(sorted((min(pos[u], pos[v]), max(pos[u], pos[v]))
                            for u, v in motif_edges))

    return Graph(False, SURVEY_SCHEMA, feats, sorted(edges))


def _patch_motif(base_edges, base_n, want_nodes, want_edges):
    """A connected sub-motif of the patch with exact node and edge counts.

    Breadth-first node collection from successive roots until the induced
    subgraph carries enough edges; the edge subset keeps a spanning tree
    first so the motif stays connected.
    """
    adj = [[] for _ in range(base_n)]
    for u, v in base_edges:
        adj[u].append(v)
        adj[v].append(u)
    for root in range(base_n):
        seen = [root]
        members = {root}
        i = 0
        while len(seen) < want_nodes and i < len(seen):
            for w in sorted(adj[seen[i]]):
                if w not in members and len(seen) < want_nodes:
                    members.add(w)
                    seen.append(w)
            i += 1
        if len(seen) < want_nodes:
            continue
        induced = [(u, v) for u, v in base_edges if u in members and v in members]
        if len(induced) < want_edges:
            continue
        # spanning tree first, then densify in patch order
        picked = []
        reached = {seen[0]}
        rest = []
        for u, v in induced:
            if (u in reached) != (v in reached):
                picked.append((u, v))
                reached.update((u, v))
            else:
                rest.append((u, v))
        # a single pass can miss tree edges when both ends were unreached;
        # loop until the tree stops growing
        changed = True
        while len(reached) < want_nodes and changed:
            changed = False
            for u, v in list(rest):
                if (u in reached) != (v in reached):
                    picked.append((u, v))
                    reached.update((u, v))
                    rest.remove((u, v))
                    changed = True
        if len(reached) < want_nodes:
            continue
        picked.extend(rest[:want_edges - len(picked)])
        if len(picked) == want_edges:
            return seen, picked
    raise ValueError("patch has no motif with the requested size")


def grow_query(g, n_edges, rng, max_tries=32):
    """Connected query subgraph grown from a uniform seed edge.

    Each step adds one uniform unused edge incident to the current node set;
    node features, original ids, and edge directions are copied from the
    target. Retries from fresh seeds if a component runs out of edges.
    """
    if not 1 <= n_edges <= g.n_edges:
        raise ValueError("query size out of range")
    chosen = set()
    for _ in range(max_tries):
        start = int(rng.integers(g.n_edges))
        chosen = {start}
        nodes = set(g.edges[start])
        while len(chosen) < n_edges:
            cands = sorted({e for u in nodes for e in g.incident[u]} - chosen)
            if not cands:
                break
            e = cands[int(rng.integers(len(cands)))]
            chosen.add(e)
            nodes.update(g.edges[e])
        if len(chosen) == n_edges:
            break
    nodes = sorted({u for e in chosen for u in g.edges[e]})
    remap = {u: i for i, u in enumerate(nodes)}
    edges = [(remap[u], remap[v]) for u, v in (g.edges[e] for e in sorted(chosen))]
    feats = [g.node_features[u] for u in nodes]
    ids = [g.node_ids[u] for u in nodes]
    return Graph(g.directed, g.schema, feats, edges, ids)


def random_graph(rng, n_nodes, n_edges, schema=MIXED_SCHEMA, directed=False,
                 numeric_values=(0.0, 1.0, 2.0, 3.0, 5.0, 8.0),
                 symbols=("a", "b", "c", "d")):
    """Uniform random simple graph with random feature values."""
    if directed:
        pairs = [(u, v) for u in range(n_nodes) for v in range(n_nodes) if u != v]
    else:
        pairs = [(u, v) for u in range(n_nodes) for v in range(u + 1, n_nodes)]
    if n_edges > len(pairs):
        raise ValueError("too many edges for the node count")
    idx = rng.choice(len(pairs), size=n_edges, replace=False)
    edges = sorted(pairs[int(i)] for i in idx)

    def value(kind):
        if kind == NUMERIC:
            return float(numeric_values[int(rng.integers(len(numeric_values)))])
        if kind == CATEGORICAL:
            return symbols[int(rng.integers(len(symbols)))]
        picks = rng.random(len(symbols)) < 0.4
        return tuple(s for s, p in zip(symbols, picks) if p)

    feats = [tuple(value(k) for k in schema.kinds) for _ in range(n_nodes)]
    return Graph(directed, schema, feats, edges)
