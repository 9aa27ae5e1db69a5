"""Intent refinement from multiple isomorphic query exemplars.

Giving several example subgraphs instead of one narrows what the user means:
features whose node values repeat identically across the exemplars (exact
match) or whose association components repeat edgewise (exact relation)
become hard requirements, while the remaining features keep renormalized
chi-square weights. Scoring aggregates the per-exemplar contextual
similarities by min or mean, with weights learned per exemplar or averaged.
"""

from dataclasses import dataclass

from .context import weight_vector
from .graph import GraphLoadError
from .index import mbr_similarity
from .search import SearchParams, _search
from .similarity import (association_vectors, contextual_graph_similarity,
                         edge_similarity, Mapping)


class ExemplarError(ValueError):
    """Raised when exemplars are not isomorphic under the given bijections."""


class ExemplarSet:
    """Two or more isomorphic exemplars linked by node bijections.

    bijections[i] maps node ids of the first exemplar onto exemplar i+1;
    every edge of the first exemplar must land on an edge of each other
    exemplar (respecting direction), and edge counts must agree, so the
    correspondence is a full isomorphism. Correspondences between any two
    exemplars follow by composition.
    """

    def __init__(self, graphs, bijections):
        if len(graphs) < 2:
            raise ExemplarError("need at least two exemplars")
        if len(bijections) != len(graphs) - 1:
            raise ExemplarError("need one bijection per exemplar after the first")
        first = graphs[0]
        for g in graphs[1:]:
            if g.schema != first.schema:
                raise ExemplarError("exemplars must share one feature schema")
            if g.directed != first.directed:
                raise ExemplarError("exemplars must agree on directedness")
            if g.n_nodes != first.n_nodes or g.n_edges != first.n_edges:
                raise ExemplarError("exemplars must have equal node and edge counts")

        node_maps = [{u: u for u in range(first.n_nodes)}]
        edge_maps = [list(range(first.n_edges))]
        for i, bij in enumerate(bijections, start=1):
            g = graphs[i]
            if sorted(bij) != list(range(first.n_nodes)):
                raise ExemplarError(f"exemplar {i + 1}: bijection domain must cover "
                                    "the first exemplar's nodes")
            if sorted(bij.values()) != list(range(g.n_nodes)):
                raise ExemplarError(f"exemplar {i + 1}: bijection image must cover "
                                    "its nodes exactly once")
            emap = []
            for u, v in first.edges:
                te = g.edge_between(bij[u], bij[v])
                if te is None:
                    raise ExemplarError(f"exemplar {i + 1}: edge ({u}, {v}) of the "
                                        "first exemplar has no image")
                emap.append(te)
            node_maps.append(dict(bij))
            edge_maps.append(emap)
        self.graphs = list(graphs)
        self.node_maps = node_maps
        self.edge_maps = edge_maps

    def __len__(self):
        return len(self.graphs)

    def pairwise(self, i, j):
        """Node bijection from exemplar i to exemplar j by composition."""
        inv = {v: u for u, v in self.node_maps[i].items()}
        return {v: self.node_maps[j][inv[v]] for v in self.node_maps[i].values()}

    def translate(self, m, i):
        """Re-express a mapping of the first exemplar in exemplar i's ids."""
        nmap = self.node_maps[i]
        emap = self.edge_maps[i]
        return Mapping({nmap[qn]: tn for qn, tn in m.node_map.items()},
                       {(emap[qe], te) for qe, te in m.edge_pairs})


def exemplar_weights(es, nm):
    """Per-exemplar context weight vectors under one target null model."""
    return [weight_vector(g, nm) for g in es.graphs]


def averaged_weights(weight_list):
    """Componentwise mean of weight vectors; stays normalized."""
    u = len(weight_list)
    return tuple(sum(w[i] for w in weight_list) / u
                 for i in range(len(weight_list[0])))


def exemplar_similarity(m, es, g_t, nm, weight_mode="individual",
                        agg_mode="min", strict_zero=False):
    """Aggregate contextual similarity of one mapping across all exemplars.

    weight_mode selects per-exemplar weights or their average; agg_mode
    selects min (every exemplar must be matched well) or mean.
    """
    per = exemplar_weights(es, nm)
    if weight_mode == "averaged":
        shared = averaged_weights(per)
        per = [shared] * len(es)
    elif weight_mode != "individual":
        raise ValueError(f"unknown weight_mode {weight_mode!r}")
    scores = [contextual_graph_similarity(es.translate(m, i), es.graphs[i],
                                          g_t, per[i], strict_zero)
              for i in range(len(es))]
    if agg_mode == "min":
        return min(scores)
    if agg_mode == "mean":
        return sum(scores) / len(scores)
    raise ValueError(f"unknown agg_mode {agg_mode!r}")


def detect_exact_match_features(es):
    """Features whose node values are identical across exemplars under the
    bijections."""
    first = es.graphs[0]
    out = []
    for f in range(len(first.schema)):
        ok = True
        for i in range(1, len(es)):
            g = es.graphs[i]
            nmap = es.node_maps[i]
            for v in range(first.n_nodes):
                if first.node_features[v][f] != g.node_features[nmap[v]][f]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(f)
    return tuple(out)


def detect_exact_relation_features(es):
    """Features whose association components agree edgewise across exemplars."""
    assoc = [association_vectors(g) for g in es.graphs]
    first = es.graphs[0]
    out = []
    for f in range(len(first.schema)):
        ok = True
        for i in range(1, len(es)):
            emap = es.edge_maps[i]
            for e in range(first.n_edges):
                if assoc[0][e][f] != assoc[i][emap[e]][f]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(f)
    return tuple(out)


@dataclass
class HybridContext:
    """Split of the feature set into hard filters and weighted context.

    weights spans all features with zeros on the filtered ones; the rest
    carry the renormalized mean of the per-exemplar chi-square weights.
    """

    exact_match: tuple
    exact_relation: tuple
    weights: tuple


def hybrid_context(es, nm):
    """Detect filter features and reweight the remaining context features."""
    em = detect_exact_match_features(es)
    er = detect_exact_relation_features(es)
    excluded = set(em) | set(er)
    per = exemplar_weights(es, nm)
    d = len(es.graphs[0].schema)
    sums = [sum(w[f] for w in per) for f in range(d)]
    total = sum(s for f, s in enumerate(sums) if f not in excluded)
    free = [f for f in range(d) if f not in excluded]
    if not free:
        weights = tuple(0.0 for _ in range(d))
    elif total == 0.0:
        weights = tuple(0.0 if f in excluded else 1.0 / len(free) for f in range(d))
    else:
        weights = tuple(0.0 if f in excluded else sums[f] / total for f in range(d))
    return HybridContext(em, er, weights)


class _ExemplarScorer:
    """Engine scorer: per-exemplar score vectors aggregated by min or mean.

    Both aggregators commute with adding a constant, so score + remaining
    edges stays a sound upper bound and the index phases prune safely.
    """

    def __init__(self, es, index, weight_mode="individual", agg_mode="min",
                 use_filters=True):
        if agg_mode not in ("min", "mean"):
            raise ValueError(f"unknown agg_mode {agg_mode!r}")
        per = exemplar_weights(es, index.null_model)
        if weight_mode == "averaged":
            per = [averaged_weights(per)] * len(es)
        elif weight_mode != "individual":
            raise ValueError(f"unknown weight_mode {weight_mode!r}")
        self.es = es
        self.u = len(es)
        self.per_weights = per
        self.agg_min = agg_mode == "min"
        hc = hybrid_context(es, index.null_model)
        self.order_weights = (hc.weights if sum(hc.weights) > 0.0
                              else averaged_weights(per))
        self.filter_em = hc.exact_match if use_filters else ()
        self.filter_er = hc.exact_relation if use_filters else ()
        self.hybrid = hc
        self.q_assoc = [association_vectors(g) for g in es.graphs]
        self.t_assoc = index.assoc
        self.t_graph = index.graph
        self.m_q = es.graphs[0].n_edges
        self._cs = {}

    def _agg(self, values):
        if self.agg_min:
            return min(values)
        return sum(values) / self.u

    def pair_vec(self, qe, te):
        key = (qe, te)
        vec = self._cs.get(key)
        if vec is None:
            vec = tuple(edge_similarity(self.q_assoc[i][self.es.edge_maps[i][qe]],
                                        self.t_assoc[te], self.per_weights[i])
                        for i in range(self.u))
            self._cs[key] = vec
        return vec

    def state_score(self, nmap, sig):
        sums = [0.0] * self.u
        for qe, te in sig:
            vec = self.pair_vec(qe, te)
            for i in range(self.u):
                sums[i] += vec[i]
        return self._agg(sums)

    def state_bound(self, score, n_pairs, n_nodes):
        return score + (self.m_q - n_pairs)

    def mbr_value(self, qe, mbr):
        return self._agg([mbr_similarity(self.q_assoc[i][self.es.edge_maps[i][qe]],
                                         self.per_weights[i], mbr)
                          for i in range(self.u)])

    def seed_bound(self, value):
        return value + (self.m_q - 1)

    def edge_admissible(self, qe, te):
        s_q = self.q_assoc[0][qe]
        s_t = self.t_assoc[te]
        for f in self.filter_er:
            if s_q[f] != s_t[f]:
                return False
        return True

    def orientation_admissible(self, qe, te, ori):
        if not self.filter_em:
            return True
        first = self.es.graphs[0]
        for qn, tn in ori:
            fq = first.node_features[qn]
            ft = self.t_graph.node_features[tn]
            for f in self.filter_em:
                if fq[f] != ft[f]:
                    return False
        return True


def intent_topk(es, index, params=None, weight_mode="individual",
                agg_mode="min", use_filters=True, audit=None):
    """Top-k matches of an exemplar set against an indexed target.

    The first exemplar drives the growth; scores aggregate all exemplars.
    With use_filters the exact-match / exact-relation features restrict which
    target edges may seed the search.
    """
    if params is None:
        params = SearchParams()
    if params.k < 1:
        raise ValueError("k must be >= 1")
    scorer = _ExemplarScorer(es, index, weight_mode, agg_mode, use_filters)
    return _search(es.graphs[0], index, scorer, params.beam_width,
                   k=params.k, audit=audit)


def load_bijections(path, graphs):
    """Parse a bijection file into dense node maps.

    Each non-comment line reads `<exemplar><TAB><id-in-first><TAB><id-there>`
    with 1-based exemplar numbers starting at 2; node ids are the original
    ids from the exemplars' node files.
    """
    per = [{} for _ in graphs]
    first_ids = {nid: u for u, nid in enumerate(graphs[0].node_ids)}
    other_ids = [{nid: u for u, nid in enumerate(g.node_ids)} for g in graphs]
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh.read().splitlines(), start=1):
            line = line.strip()
            if line == "" or line.startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != 3:
                raise GraphLoadError(f"{path}:{lineno}: expected "
                                     "'exemplar<TAB>first-id<TAB>exemplar-id'")
            try:
                which = int(cells[0])
            except ValueError:
                raise GraphLoadError(f"{path}:{lineno}: bad exemplar number "
                                     f"{cells[0]!r}") from None
            if not 2 <= which <= len(graphs):
                raise GraphLoadError(f"{path}:{lineno}: exemplar number {which} "
                                     f"out of range 2..{len(graphs)}")
            if cells[1] not in first_ids:
                raise GraphLoadError(f"{path}:{lineno}: unknown node id {cells[1]!r} "
                                     "in the first exemplar")
            if cells[2] not in other_ids[which - 1]:
                raise GraphLoadError(f"{path}:{lineno}: unknown node id {cells[2]!r} "
                                     f"in exemplar {which}")
            src = first_ids[cells[1]]
            dst = other_ids[which - 1][cells[2]]
            if src in per[which - 1]:
                raise GraphLoadError(f"{path}:{lineno}: node {cells[1]!r} mapped twice "
                                     f"for exemplar {which}")
            per[which - 1][src] = dst
    return per[1:]
