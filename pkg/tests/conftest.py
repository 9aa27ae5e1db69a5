"""Shared fixtures: a pair of collaboration triangles and random instances.

The two triangles are the running example used across the similarity and
index tests: three researchers from one lab with close citation counts,
queried against a second lab where one pair shares a research area.
"""

import numpy as np
import pytest

from contextgraph.graph import CATEGORICAL, NUMERIC, FeatureSchema, Graph
from contextgraph.synth import grow_query, random_graph

COLLAB_SCHEMA = FeatureSchema(("organization", "area", "h_index"),
                              (CATEGORICAL, CATEGORICAL, NUMERIC))


@pytest.fixture
def collab_schema():
    return COLLAB_SCHEMA


@pytest.fixture
def collab_query():
    """Triangle: same organization, three areas, h-index 112/125/133."""
    return Graph(False, COLLAB_SCHEMA,
                 [("org_w", "ai", 112.0),
                  ("org_w", "ml", 125.0),
                  ("org_w", "db", 133.0)],
                 [(0, 1), (0, 2), (2, 1)],
                 node_ids=("a1", "a2", "a3"))


@pytest.fixture
def collab_target():
    """Triangle: same organization, one shared area, h-index 48/50/43."""
    return Graph(False, COLLAB_SCHEMA,
                 [("org_e", "db", 48.0),
                  ("org_e", "dm", 50.0),
                  ("org_e", "dm", 43.0)],
                 [(0, 1), (0, 2), (2, 1)],
                 node_ids=("b1", "b2", "b3"))


def make_instance(rng, min_nodes=8, max_nodes=28, directed=None,
                  query_edges=3):
    """One random target graph plus a query grown out of it."""
    if directed is None:
        directed = bool(rng.integers(0, 2))
    n = int(rng.integers(min_nodes, max_nodes + 1))
    cap = n * (n - 1) // 2
    m = int(min(rng.integers(n, 2 * n + 1), cap))
    g = random_graph(rng, n, m, directed=directed)
    q = grow_query(g, query_edges, rng)
    return g, q
