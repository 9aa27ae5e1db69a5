"""Hierarchical bounding-box index over edge association vectors.

The tree recursively partitions the target's edges on the highest-variance
association dimension; every node keeps the minimum bounding rectangle (MBR)
of its edges' association vectors, so the best edge similarity under a node
can be bounded without visiting it. Leaves additionally carry per-edge
neighborhood summaries, bucketed histograms of the association values around
an edge, used to order seed candidates.

Index files start with the magic bytes CGQ1, a format version, and a length
prefix; the payload is a compressed JSON document covering the target graph,
binner, null model, and tree in pre-order, so a saved index reloads to a
structurally identical object.
"""

import json
import struct
import zlib
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .context import Binner, NullModel, estimate_null_model
from .graph import CATEGORICAL_SET, FeatureSchema, Graph, NUMERIC
from .similarity import association_vectors

MAGIC = b"CGQ1"
FORMAT_VERSION = 1


class IndexFileError(ValueError):
    """Raised for unreadable, truncated, or mismatched index files."""


@dataclass(frozen=True)
class MBR:
    """Componentwise bounds of a set of association vectors."""

    lo: tuple
    hi: tuple


def mbr_of(vectors):
    """Tight componentwise min/max box of one or more vectors."""
    it = iter(vectors)
    first = next(it)
    lo = list(first)
    hi = list(first)
    for vec in it:
        for i, x in enumerate(vec):
            if x < lo[i]:
                lo[i] = x
            elif x > hi[i]:
                hi[i] = x
    return MBR(tuple(lo), tuple(hi))


def mbr_similarity(s_q, weights, mbr):
    """Upper bound on edge_similarity(s_q, s, weights) over all s in the box.

    Componentwise: 1 if s_q[i] falls inside [lo, hi], otherwise the Gamma
    ratio against the nearer box face. Dominates every contained vector's
    edge similarity.
    """
    lo = mbr.lo
    hi = mbr.hi
    total = 0.0
    for i, w in enumerate(weights):
        x = s_q[i]
        if x < lo[i]:
            total += w * (x / lo[i])
        elif x > hi[i]:
            total += w * (hi[i] / x)
        else:
            total += w
    if total > 1.0:
        return 1.0
    if total < 0.0:
        return 0.0
    return total


class TreeNode:
    """One tree node: an MBR plus either children or a tuple of edge ids."""

    __slots__ = ("mbr", "children", "entries")

    def __init__(self, mbr, children=None, entries=None):
        self.mbr = mbr
        self.children = children
        self.entries = entries

    @property
    def is_leaf(self):
        return self.children is None

    def height(self):
        if self.is_leaf:
            return 1
        return 1 + max(child.height() for child in self.children)

    def count_nodes(self):
        if self.is_leaf:
            return 1
        return 1 + sum(child.count_nodes() for child in self.children)

    def __eq__(self, other):
        if not isinstance(other, TreeNode):
            return NotImplemented
        return (self.mbr == other.mbr and self.entries == other.entries
                and self.children == other.children)


def construct_tree(assoc, edge_ids, branching=4, leaf_threshold=100):
    """Build the hierarchy over the given edges.

    Splits on the dimension of maximum association variance (lowest index on
    ties), orders edges by (value, edge id), and hands floor(m/children) edges
    to each child with the remainder on the last. A node becomes a leaf when
    it holds fewer than leaf_threshold edges or a single distinct vector.
    """
    if branching < 2:
        raise ValueError("branching must be >= 2")
    if leaf_threshold < 1:
        raise ValueError("leaf_threshold must be >= 1")

    def build(ids):
        box = mbr_of(assoc[e] for e in ids)
        if len(ids) < leaf_threshold or box.lo == box.hi:
            return TreeNode(box, entries=tuple(ids))
        var = np.asarray([assoc[e] for e in ids]).var(axis=0)
        dim = int(np.argmax(var))
        order = sorted(ids, key=lambda e: (assoc[e][dim], e))
        fanout = min(branching, len(ids))
        chunk = len(ids) // fanout
        children = []
        for c in range(fanout):
            start = c * chunk
            stop = (c + 1) * chunk if c < fanout - 1 else len(ids)
            children.append(build(order[start:stop]))
        return TreeNode(box, children=tuple(children))

    return build(list(edge_ids))


_BUCKET_EDGES = {}


def bucket_index(value, buckets):
    """0-based histogram bucket of an association value in [0, 1].

    Bucket j covers (j/buckets, (j+1)/buckets]; zero lands in bucket 0.
    Comparison against exact bucket boundaries avoids multiply-then-ceil
    rounding surprises at values like 0.9.
    """
    if value <= 0.0:
        return 0
    edges = _BUCKET_EDGES.get(buckets)
    if edges is None:
        edges = [j / buckets for j in range(1, buckets + 1)]
        _BUCKET_EDGES[buckets] = edges
    return min(bisect_left(edges, value), buckets - 1)


def neighborhood_summary(g, e, buckets=10, radius=1, assoc=None):
    """Per-feature histogram of association values on the edges around e."""
    if assoc is None:
        assoc = association_vectors(g)
    d = len(g.schema)
    hist = [[0] * buckets for _ in range(d)]
    for other in g.neighborhood_edges(e, radius):
        vec = assoc[other]
        for i in range(d):
            hist[i][bucket_index(vec[i], buckets)] += 1
    return tuple(tuple(row) for row in hist)


def neighborhood_similarity(summary_q, summary_t, weights):
    """Weighted fraction of the query's occupied buckets the target covers.

    Per feature: among buckets where the query count is positive, the share
    whose target count is at least the query count; 1 when the query has no
    occupied bucket. Used to order seed candidates, not as a bound.
    """
    total = 0.0
    for i, w in enumerate(weights):
        occupied = 0
        covered = 0
        t_row = summary_t[i]
        for j, qc in enumerate(summary_q[i]):
            if qc > 0:
                occupied += 1
                if t_row[j] >= qc:
                    covered += 1
        total += w if occupied == 0 else w * (covered / occupied)
    if total > 1.0:
        return 1.0
    if total < 0.0:
        return 0.0
    return total


@dataclass
class IndexParams:
    branching: int = 4
    leaf_threshold: int = 100
    buckets: int = 10
    bins: int = 10
    radius: int = 1


class EdgeIndex:
    """Searchable bundle: target graph, null model, association data, tree."""

    def __init__(self, graph, params, binner, null_model, assoc, summaries, root):
        self.graph = graph
        self.params = params
        self.binner = binner
        self.null_model = null_model
        self.assoc = assoc
        self.summaries = summaries
        self.root = root

    def stats(self):
        leaves = []

        def walk(node, depth):
            if node.is_leaf:
                leaves.append((depth, len(node.entries)))
            else:
                for child in node.children:
                    walk(child, depth + 1)

        walk(self.root, 1)
        return {
            "nodes": self.graph.n_nodes,
            "edges": self.graph.n_edges,
            "directed": self.graph.directed,
            "features": len(self.graph.schema),
            "tree_nodes": self.root.count_nodes(),
            "tree_height": self.root.height(),
            "leaves": len(leaves),
            "max_leaf_size": max(size for _, size in leaves),
            "branching": self.params.branching,
            "leaf_threshold": self.params.leaf_threshold,
            "buckets": self.params.buckets,
            "bins": self.params.bins,
            "radius": self.params.radius,
        }


def build_index(g, branching=4, leaf_threshold=100, buckets=10, bins=10, radius=1):
    """Build the full index of a target graph."""
    if g.n_edges == 0:
        raise ValueError("cannot index a graph without edges")
    params = IndexParams(branching, leaf_threshold, buckets, bins, radius)
    null_model = estimate_null_model(g, bins=bins)
    binner = null_model.binner
    assoc = association_vectors(g)
    summaries = [neighborhood_summary(g, e, buckets, radius, assoc)
                 for e in range(g.n_edges)]
    root = construct_tree(assoc, range(g.n_edges), branching, leaf_threshold)
    return EdgeIndex(g, params, binner, null_model, assoc, summaries, root)


def _encode_key(key):
    return [list(part) if isinstance(part, tuple) else part for part in key]


def _decode_key(parts, kind):
    if kind == CATEGORICAL_SET:
        return tuple(tuple(p) for p in parts)
    if kind == NUMERIC:
        return tuple(int(p) for p in parts)
    return tuple(parts)


def _encode_node(node):
    doc = {"lo": list(node.mbr.lo), "hi": list(node.mbr.hi)}
    if node.is_leaf:
        doc["entries"] = list(node.entries)
    else:
        doc["children"] = [_encode_node(child) for child in node.children]
    return doc


def _decode_node(doc):
    box = MBR(tuple(doc["lo"]), tuple(doc["hi"]))
    if "entries" in doc:
        return TreeNode(box, entries=tuple(doc["entries"]))
    return TreeNode(box, children=tuple(_decode_node(c) for c in doc["children"]))


def _encode_feature_value(value, kind):
    return list(value) if kind == CATEGORICAL_SET else value


def _decode_feature_value(value, kind):
    return tuple(value) if kind == CATEGORICAL_SET else value


def save_index(index, path):
    """Write the index as a magic/version/length-prefixed compressed document."""
    g = index.graph
    kinds = g.schema.kinds
    tables = []
    for i, table in enumerate(index.null_model.tables):
        rows = [[_encode_key(key), table[key]] for key in sorted(table)]
        tables.append(rows)
    payload = {
        "directed": g.directed,
        "schema": {"names": list(g.schema.names), "kinds": list(kinds)},
        "node_ids": list(g.node_ids),
        "node_features": [[_encode_feature_value(v, k) for v, k in zip(row, kinds)]
                          for row in g.node_features],
        "edges": [list(e) for e in g.edges],
        "params": {"branching": index.params.branching,
                   "leaf_threshold": index.params.leaf_threshold,
                   "buckets": index.params.buckets,
                   "bins": index.params.bins,
                   "radius": index.params.radius},
        "binner": [list(c) if c is not None else None for c in index.binner.cuts],
        "null_model": {"floor": index.null_model.floor,
                       "edge_count": index.null_model.edge_count,
                       "tables": tables},
        "assoc": [list(vec) for vec in index.assoc],
        "summaries": [[list(row) for row in summary] for summary in index.summaries],
        "tree": _encode_node(index.root),
    }
    blob = zlib.compress(json.dumps(payload, sort_keys=True,
                                    separators=(",", ":")).encode("utf-8"), 6)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQ", FORMAT_VERSION, len(blob)))
        fh.write(blob)


def load_index(path):
    """Read an index file written by save_index."""
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC) + 12)
        if len(head) < len(MAGIC) + 12 or head[: len(MAGIC)] != MAGIC:
            raise IndexFileError(f"{path}: not an index file")
        version, length = struct.unpack("<IQ", head[len(MAGIC):])
        if version != FORMAT_VERSION:
            raise IndexFileError(f"{path}: unsupported format version {version}")
        blob = fh.read(length)
        if len(blob) != length or fh.read(1):
            raise IndexFileError(f"{path}: truncated or trailing data")
    try:
        payload = json.loads(zlib.decompress(blob).decode("utf-8"))
    except (zlib.error, json.JSONDecodeError) as exc:
        raise IndexFileError(f"{path}: corrupt payload ({exc})") from None

    schema = FeatureSchema(tuple(payload["schema"]["names"]),
                           tuple(payload["schema"]["kinds"]))
    kinds = schema.kinds
    feats = [tuple(_decode_feature_value(v, k) for v, k in zip(row, kinds))
             for row in payload["node_features"]]
    g = Graph(payload["directed"], schema, feats,
              [tuple(e) for e in payload["edges"]], payload["node_ids"])
    p = payload["params"]
    params = IndexParams(p["branching"], p["leaf_threshold"], p["buckets"],
                         p["bins"], p["radius"])
    binner = Binner([tuple(c) if c is not None else None for c in payload["binner"]])
    nm_doc = payload["null_model"]
    tables = tuple({_decode_key(key, kinds[i]): prob for key, prob in rows}
                   for i, rows in enumerate(nm_doc["tables"]))
    null_model = NullModel(binner, tables, nm_doc["floor"], nm_doc["edge_count"])
    assoc = [tuple(vec) for vec in payload["assoc"]]
    summaries = [tuple(tuple(row) for row in summary) for summary in payload["summaries"]]
    root = _decode_node(payload["tree"])
    return EdgeIndex(g, params, binner, null_model, assoc, summaries, root)
