"""
Edge similarity, mapping scores, and why the bounds are safe
============================================================

Association vectors record which features an edge's endpoints conserve.
Comparing two edges compares their vectors component by component under the
context weights; comparing against a bounding box instead gives a number
that provably never undershoots any edge inside the box, which is the whole
pruning story of the search index.
"""

import numpy as np

from contextgraph import (CATEGORICAL, NUMERIC, FeatureSchema, Graph,
                          Mapping, association_vector, association_vectors,
                          contextual_graph_similarity, edge_similarity,
                          mbr_of, mbr_similarity, mcs_upper_bound)

schema = FeatureSchema(("organization", "area", "h_index"),
                       (CATEGORICAL, CATEGORICAL, NUMERIC))
west = Graph(False, schema,
             [("org_w", "ai", 112.0), ("org_w", "ml", 125.0),
              ("org_w", "db", 133.0)],
             [(0, 1), (0, 2), (2, 1)])
east = Graph(False, schema,
             [("org_e", "db", 48.0), ("org_e", "dm", 50.0),
              ("org_e", "dm", 43.0)],
             [(0, 1), (0, 2), (2, 1)])

sq = association_vector(west, 0)
st = association_vector(east, 0)
print("query edge 0 association:", tuple(round(x, 2) for x in sq))
print("target edge 0 association:", tuple(round(x, 2) for x in st))

w = (0.40, 0.02, 0.58)
print("edge similarity:", edge_similarity(sq, st, w))
# both edges conserve nothing on `area`; counting that agreement is the
# default, discounting it is the strict-zero convention
print("  strict zero:  ", edge_similarity(sq, st, w, strict_zero=True))

# a full mapping scores the sum of its matched pairs
m = Mapping({0: 0, 1: 1, 2: 2}, {(0, 0), (1, 1), (2, 2)})
score = contextual_graph_similarity(m, west, east, w)
print("\ntriangle-onto-triangle score:", round(score, 5), "of", west.n_edges)

# a partial mapping's upper bound assumes every unmatched edge scores 1
partial = Mapping({0: 0, 1: 1}, {(0, 0)})
ps = contextual_graph_similarity(partial, west, east, w)
print("1-pair state score", round(ps, 5),
      "bound", round(mcs_upper_bound(ps, 1, west.n_edges), 5))

# box similarity dominates every vector inside the box, zeros included
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(2000):
    vecs = rng.random((4, 3))
    vecs[rng.random((4, 3)) < 0.2] = 0.0
    box = mbr_of([tuple(v) for v in vecs])
    outside = tuple(rng.random(3))
    bound = mbr_similarity(outside, w, box)
    for v in vecs:
        worst = max(worst, edge_similarity(outside, tuple(v), w) - bound)
print("\nmax (edge sim - box bound) over 8000 contained vectors:", worst)

aw = association_vectors(west)
print("box of the query's own edges:", mbr_of(aw))
