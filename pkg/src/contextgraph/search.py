"""Top-k and range retrieval of contextually similar connected subgraphs.

Two engines share one search universe: every connected mapping between query
and target that admits no further valid extension (a maximal common subgraph,
deduplicated by its sorted edge-pair signature).

enumerate_mcs / naive_topk grow a mapping from every (query edge, target
edge) seed and enumerate the universe exhaustively; they are the reference.

topk_search / range_search answer exactly the same question through the edge
index: query edges are taken in order of their similarity bound against the
tree root (phase 1), the tree is descended best-first with bound-checked
pruning (phase 2), and leaf entries are consumed in beam batches ordered by
neighborhood similarity, each seed grown through a bound-ordered priority
queue (phase 3). Every discarded state is covered by an upper bound that
cannot beat the current answer threshold, so the returned score multiset
equals the naive one.
"""

import math
import time
from bisect import bisect_left
from dataclasses import dataclass
from heapq import heappop, heappush, heapreplace
from itertools import count

from .context import weight_vector
from .index import mbr_similarity, neighborhood_similarity, neighborhood_summary
from .similarity import (Mapping, ScoredMatch, association_vectors,
                         edge_similarity, traditional_graph_similarity,
                         traditional_node_similarity)


class SearchTimeout(Exception):
    """Raised when an enumeration exceeds its deadline."""


@dataclass
class SearchParams:
    k: int = 10
    beam_width: int = 50
    scorer: str = "contextual"


class SearchAudit:
    """Optional log of prune decisions and threshold evolution.

    Every pruned state is recorded with its bound and the answer threshold at
    the time of the prune; bound <= threshold for each entry certifies that no
    prune could have removed a result that belongs in the answer set.
    """

    def __init__(self):
        self.prunes = []
        self.least_trace = []
        self.expanded = 0
        self.offers = 0


def _check_compatible(q, g):
    if q.schema != g.schema:
        raise ValueError("query and target must share one feature schema")
    if q.directed != g.directed:
        raise ValueError("query and target must agree on directedness")


def _seed_orientations(q, g, qe, te):
    """Node assignments mapping query edge qe onto target edge te."""
    u, v = q.edges[qe]
    a, b = g.edges[te]
    if g.directed:
        return (((u, a), (v, b)),)
    return (((u, a), (v, b)), ((u, b), (v, a)))


def _extensions(q, g, nmap, pairs):
    """All single-pair extensions of a connected mapping.

    Returns sorted (query edge, target edge, new node assignments) triples.
    A query edge qualifies when at least one endpoint is mapped; the target
    edge must be unused, direction-consistent, and respect injectivity.
    """
    out = []
    used_te = {te for _, te in pairs}
    used_qe = {qe for qe, _ in pairs}
    mapped_targets = set(nmap.values())
    directed = g.directed
    for qe in range(q.n_edges):
        if qe in used_qe:
            continue
        u, v = q.edges[qe]
        mu = nmap.get(u)
        mv = nmap.get(v)
        if mu is None and mv is None:
            continue
        if mu is not None and mv is not None:
            te = g.edge_between(mu, mv)
            if te is not None and te not in used_te:
                out.append((qe, te, ()))
            continue
        if mu is not None:
            anchor_q, free_q, anchor_t = u, v, mu
        else:
            anchor_q, free_q, anchor_t = v, u, mv
        for te in g.incident[anchor_t]:
            if te in used_te:
                continue
            a, b = g.edges[te]
            if directed:
                if anchor_q == u:
                    if a != anchor_t:
                        continue
                    cand = b
                else:
                    if b != anchor_t:
                        continue
                    cand = a
            else:
                cand = b if a == anchor_t else a
            if cand in mapped_targets:
                continue
            out.append((qe, te, ((free_q, cand),)))
    out.sort()
    return out


def enumerate_mcs(q, g, deadline=None):
    """Every maximal connected mapping, deduplicated by signature.

    Exhaustive depth-first growth from all compatible seeds with global
    state deduplication. Raises SearchTimeout past the optional monotonic
    deadline. Results come back in signature order.
    """
    _check_compatible(q, g)
    found = {}
    visited = set()
    stack = []
    for qe in range(q.n_edges):
        for te in range(g.n_edges):
            for ori in _seed_orientations(q, g, qe, te):
                stack.append((dict(ori), frozenset(((qe, te),)), ((qe, te),)))
    ticks = 0
    while stack:
        ticks += 1
        if deadline is not None and ticks % 1024 == 1 and time.monotonic() > deadline:
            raise SearchTimeout("enumeration exceeded its deadline")
        nmap, pairs, sig = stack.pop()
        exts = _extensions(q, g, nmap, pairs)
        if not exts:
            if sig not in found:
                found[sig] = Mapping(nmap, pairs)
            continue
        for qe2, te2, new in exts:
            if new:
                nm2 = dict(nmap)
                nm2.update(new)
            else:
                nm2 = nmap
            pairs2 = pairs | {(qe2, te2)}
            sig2 = tuple(sorted(pairs2))
            key = (tuple(sorted(nm2.items())), sig2)
            if key in visited:
                continue
            visited.add(key)
            stack.append((nm2, pairs2, sig2))
    return [found[sig] for sig in sorted(found)]


def _contextual_score_fn(q, g, weights):
    qa = association_vectors(q)
    ta = association_vectors(g)
    cache = {}

    def score(mapping):
        total = 0.0
        for pair in sorted(mapping.edge_pairs):
            cs = cache.get(pair)
            if cs is None:
                cs = edge_similarity(qa[pair[0]], ta[pair[1]], weights)
                cache[pair] = cs
            total += cs
        return total

    return score


def _resolve_weights(q, g, weights, null_model, bins):
    if weights is not None:
        return tuple(weights)
    if null_model is None:
        from .context import estimate_null_model
        null_model = estimate_null_model(g, bins=bins)
    return weight_vector(q, null_model)


def _rank_all(q, g, scorer, weights, null_model, bins, deadline):
    maps = enumerate_mcs(q, g, deadline)
    if scorer == "contextual":
        w = _resolve_weights(q, g, weights, null_model, bins)
        score = _contextual_score_fn(q, g, w)
    elif scorer == "traditional":
        score = lambda m: traditional_graph_similarity(m, q, g)
    else:
        raise ValueError(f"unknown scorer {scorer!r}")
    ranked = sorted(((score(m), m) for m in maps),
                    key=lambda t: (-t[0], t[1].signature()))
    return ranked


def naive_topk(q, g, k, scorer="contextual", weights=None, null_model=None,
               bins=10, deadline=None):
    """Reference top-k: exhaustive enumeration, then rank and cut.

    Ties break on the canonical signature. The score of each match is the
    canonical pairwise sum, identical bit-for-bit to the indexed engine's.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = _rank_all(q, g, scorer, weights, null_model, bins, deadline)
    return [ScoredMatch(m, s) for s, m in ranked[:k]]


def naive_range(q, g, r, scorer="contextual", weights=None, null_model=None,
                bins=10, deadline=None):
    """Reference range query: every maximal mapping scoring at least r."""
    ranked = _rank_all(q, g, scorer, weights, null_model, bins, deadline)
    return [ScoredMatch(m, s) for s, m in ranked if s >= r]


class _ContextualScorer:
    """Chi-square-weighted contextual similarity with tight index bounds."""

    def __init__(self, q, index, weights):
        self.weights = tuple(weights)
        self.order_weights = self.weights
        self.q_assoc = association_vectors(q)
        self.t_assoc = index.assoc
        self.m_q = q.n_edges
        self._cs = {}

    def pair_score(self, qe, te):
        key = (qe, te)
        cs = self._cs.get(key)
        if cs is None:
            cs = edge_similarity(self.q_assoc[qe], self.t_assoc[te], self.weights)
            self._cs[key] = cs
        return cs

    def state_score(self, nmap, sig):
        # canonical order: summed along the sorted signature, so the same
        # mapping always produces the same float as the reference engine
        cache = self._cs
        total = 0.0
        for pair in sig:
            cs = cache.get(pair)
            if cs is None:
                cs = edge_similarity(self.q_assoc[pair[0]],
                                     self.t_assoc[pair[1]], self.weights)
                cache[pair] = cs
            total += cs
        return total

    def state_bound(self, score, n_pairs, n_nodes):
        return score + (self.m_q - n_pairs)

    def mbr_value(self, qe, mbr):
        return mbr_similarity(self.q_assoc[qe], self.weights, mbr)

    def seed_bound(self, value):
        return value + (self.m_q - 1)

    def edge_admissible(self, qe, te):
        return True

    def orientation_admissible(self, qe, te, ori):
        return True


class _TraditionalScorer:
    """Context-free node+edge score; index phases order on uniform weights
    and never prune on seed bounds (no box bound exists for node terms)."""

    def __init__(self, q, index):
        d = len(q.schema)
        self.order_weights = tuple(1.0 / d for _ in range(d))
        self.q = q
        self.g = index.graph
        self.q_assoc = association_vectors(q)
        self.m_q = q.n_edges
        self.n_q = q.n_nodes
        self._ts = {}

    def state_score(self, nmap, sig):
        total = 0.0
        for qn in sorted(nmap):
            key = (qn, nmap[qn])
            ts = self._ts.get(key)
            if ts is None:
                ts = traditional_node_similarity(self.q.node_features[qn],
                                                 self.g.node_features[key[1]],
                                                 self.q.schema)
                self._ts[key] = ts
            total += ts
        return total + len(sig)

    def state_bound(self, score, n_pairs, n_nodes):
        return score + (self.m_q - n_pairs) + (self.n_q - n_nodes)

    def mbr_value(self, qe, mbr):
        return mbr_similarity(self.q_assoc[qe], self.order_weights, mbr)

    def seed_bound(self, value):
        return math.inf

    def edge_admissible(self, qe, te):
        return True

    def orientation_admissible(self, qe, te, ori):
        return True


class _TopK:
    """Bounded answer set ordered by (score desc, discovery asc)."""

    def __init__(self, k):
        self.k = k
        self.heap = []

    def least(self):
        if len(self.heap) < self.k:
            return -math.inf
        return self.heap[0][0]

    def offer(self, score, sig, nmap, disc):
        entry = (score, -disc, disc, sig, nmap)
        if len(self.heap) < self.k:
            heappush(self.heap, entry)
        elif score > self.heap[0][0]:
            heapreplace(self.heap, entry)

    def ranked(self):
        order = sorted(self.heap, key=lambda t: (-t[0], t[2]))
        return [ScoredMatch(Mapping(nmap, sig), score)
                for score, _, disc, sig, nmap in order]


class _Threshold:
    """Unbounded answer set keeping everything at or above r."""

    def __init__(self, r):
        self.r = r
        self.items = []

    def least(self):
        return self.r

    def offer(self, score, sig, nmap, disc):
        if score >= self.r:
            self.items.append((score, sig, nmap))

    def ranked(self):
        order = sorted(self.items, key=lambda t: (-t[0], t[1]))
        return [ScoredMatch(Mapping(nmap, sig), score) for score, sig, nmap in order]


def _search(q, index, scorer, beam_width, k=None, r=None, audit=None):
    """Shared three-phase engine; exactly one of k / r is set."""
    g = index.graph
    _check_compatible(q, g)
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    m_q = q.n_edges
    if m_q == 0 or g.n_edges == 0:
        return []

    if r is None:
        ans = _TopK(k)
        cut = lambda bound: bound <= ans.least()
    else:
        ans = _Threshold(r)
        cut = lambda bound: bound < r

    def prune(kind, bound):
        if audit is not None:
            audit.prunes.append((kind, bound, ans.least()))

    params = index.params
    q_summaries = [neighborhood_summary(q, e, params.buckets, params.radius)
                   for e in range(m_q)]
    order_w = scorer.order_weights
    summaries = index.summaries

    visited = set()
    found = set()
    tick = count()
    disc = count(1)

    def grow(pq):
        # a connected mapping with two or more pairs is fully determined by
        # its signature (shared endpoints force every node assignment), so
        # the signature alone is a sound visited key past the seed level
        while pq:
            negb, _, _, score, nmap, pairs, sig = heappop(pq)
            if cut(-negb):
                prune("growth-queue", -negb)
                break
            if audit is not None:
                audit.expanded += 1
            exts = _extensions(q, g, nmap, pairs)
            if not exts:
                if sig not in found:
                    found.add(sig)
                    ans.offer(score, sig, nmap, next(disc))
                    if audit is not None:
                        audit.offers += 1
                        audit.least_trace.append(ans.least())
                continue
            for qe2, te2, new in exts:
                pair = (qe2, te2)
                pos = bisect_left(sig, pair)
                sig2 = sig[:pos] + (pair,) + sig[pos:]
                if sig2 in visited:
                    continue
                visited.add(sig2)
                if new:
                    nm2 = dict(nmap)
                    nm2.update(new)
                else:
                    nm2 = nmap
                pairs2 = pairs | {pair}
                score2 = scorer.state_score(nm2, sig2)
                bound2 = scorer.state_bound(score2, len(sig2), len(nm2))
                if cut(bound2):
                    prune("growth", bound2)
                    continue
                # equal bounds pop deepest-first: finishing a mapping early
                # raises the answer threshold and shrinks the frontier
                heappush(pq, (-bound2, m_q - len(sig2), next(tick),
                              score2, nm2, pairs2, sig2))

    def handle_leaf(qe, node, leaf_value):
        # order the leaf's entries once for this query edge, best first;
        # neighborhood similarity ties break toward edges whose endpoint
        # values equal the query edge's exactly, since those complete to
        # top-scoring mappings fastest and tighten the answer threshold
        qu, qv = q.edges[qe]
        fu = q.node_features[qu]
        fv = q.node_features[qv]
        scored = []
        for te in node.entries:
            if not scorer.edge_admissible(qe, te):
                continue
            ns = neighborhood_similarity(q_summaries[qe], summaries[te], order_w)
            a, b = g.edges[te]
            fa = g.node_features[a]
            fb = g.node_features[b]
            exact = (fa == fu and fb == fv) or (
                not g.directed and fa == fv and fb == fu)
            scored.append((-ns, 0 if exact else 1, te))
        scored.sort()
        pos = 0
        while pos < len(scored):
            bound = scorer.seed_bound(leaf_value)
            if cut(bound):
                prune("leaf-remainder", bound)
                return
            batch = scored[pos:pos + beam_width]
            pos += len(batch)
            pq = []
            for _, _, te in batch:
                for ori in _seed_orientations(q, g, qe, te):
                    if not scorer.orientation_admissible(qe, te, ori):
                        continue
                    nmap = dict(ori)
                    sig = ((qe, te),)
                    key = (sig, ori)
                    if key in visited:
                        continue
                    visited.add(key)
                    score = scorer.state_score(nmap, sig)
                    bound = scorer.state_bound(score, 1, len(nmap))
                    if cut(bound):
                        prune("seed", bound)
                        continue
                    heappush(pq, (-bound, m_q - 1, next(tick), score, nmap,
                                  frozenset(sig), sig))
            grow(pq)

    root = index.root
    root_values = [scorer.mbr_value(e, root.mbr) for e in range(m_q)]
    for qe in sorted(range(m_q), key=lambda e: (-root_values[e], e)):
        bound = scorer.seed_bound(root_values[qe])
        if cut(bound):
            prune("query-edge", bound)
            break
        # equal-value tree nodes pop tightest box first: a narrow box that
        # still reaches the top value holds the most specific candidates
        root_w = sum(h - l for l, h in zip(root.mbr.lo, root.mbr.hi))
        cands = [(-root_values[qe], root_w, next(tick), root)]
        while cands:
            negval, _, _, node = heappop(cands)
            bound = scorer.seed_bound(-negval)
            if cut(bound):
                prune("tree-node", bound)
                break
            if node.is_leaf:
                handle_leaf(qe, node, -negval)
                continue
            for child in node.children:
                width = sum(h - l for l, h in zip(child.mbr.lo, child.mbr.hi))
                heappush(cands, (-scorer.mbr_value(qe, child.mbr),
                                 width, next(tick), child))
    return ans.ranked()


def _build_scorer(q, index, params, weights):
    if params.scorer == "contextual":
        if weights is None:
            weights = weight_vector(q, index.null_model)
        return _ContextualScorer(q, index, weights)
    if params.scorer == "traditional":
        return _TraditionalScorer(q, index)
    raise ValueError(f"unknown scorer {params.scorer!r}")


def topk_search(q, index, params=None, weights=None, audit=None):
    """Exact top-k maximal common subgraphs of q in the indexed target.

    Returns ScoredMatch objects ranked by (score desc, discovery asc); the
    score multiset always equals naive_topk's on the same inputs.
    """
    if params is None:
        params = SearchParams()
    if params.k < 1:
        raise ValueError("k must be >= 1")
    scorer = _build_scorer(q, index, params, weights)
    return _search(q, index, scorer, params.beam_width, k=params.k, audit=audit)


def range_search(q, index, r, params=None, weights=None, audit=None):
    """Every maximal common subgraph scoring at least r, ranked."""
    if params is None:
        params = SearchParams()
    if not math.isfinite(r):
        raise ValueError("r must be finite")
    scorer = _build_scorer(q, index, params, weights)
    return _search(q, index, scorer, params.beam_width, r=r, audit=audit)
