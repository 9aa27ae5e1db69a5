"""Command line interface.

Subcommands: build-index, query, range, oracle, intent, bench, stats.
Results go to stdout as JSON-lines (default) or TSV; diagnostics go to
stderr; the exit status is 0 exactly when the command succeeded.
"""

import argparse
import json
import statistics
import sys
import time

import numpy as np

from .context import weight_vector
from .exemplar import ExemplarSet, intent_topk, load_bijections, _ExemplarScorer
from .graph import GraphLoadError, load_graph, load_schema
from .index import IndexFileError, build_index, load_index, save_index
from .search import (SearchParams, SearchTimeout, naive_range, naive_topk,
                     range_search, topk_search)
from .synth import grow_query

ORACLE_EDGE_CAP = 5000


class CliError(Exception):
    """User-facing failure with a clean message and exit status 1."""


class _Writer:
    """Serializes result records as JSON-lines or TSV rows."""

    def __init__(self, fmt, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout
        self._columns = None

    def emit(self, record):
        if self.fmt == "jsonl":
            print(json.dumps(record, sort_keys=True), file=self.out)
            return
        kind = record.get("record")
        if kind in ("header", "stats"):
            print("# " + json.dumps(record, sort_keys=True), file=self.out)
            self._columns = None
            return
        body = {k: v for k, v in record.items() if k != "record"}
        if self._columns is None:
            self._columns = sorted(body)
            print("# columns: " + "\t".join(self._columns), file=self.out)
        cells = []
        for col in self._columns:
            val = body.get(col)
            if isinstance(val, float):
                cells.append(repr(val))
            elif isinstance(val, (dict, list)):
                cells.append(json.dumps(val, sort_keys=True))
            else:
                cells.append(str(val))
        print("\t".join(cells), file=self.out)


def _add_target_args(p):
    p.add_argument("--schema", help="schema JSON for the target graph")
    p.add_argument("--nodes", help="target nodes TSV")
    p.add_argument("--edges", help="target edges TSV")
    p.add_argument("--index", help="prebuilt index file")


def _add_build_args(p):
    p.add_argument("--branching", type=int, default=4)
    p.add_argument("--leaf-threshold", type=int, default=100)
    p.add_argument("--buckets", type=int, default=10)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--radius", type=int, default=1)


def _add_search_args(p):
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--beam-width", type=int, default=50)
    p.add_argument("--scorer", choices=("contextual", "traditional"),
                   default="contextual")


def _add_format_arg(p):
    p.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")


def _load_query(nodes_path, edges_path, schema, directed):
    if not nodes_path or not edges_path:
        raise CliError("a query needs --query-nodes and --query-edges")
    return load_graph(nodes_path, edges_path, schema, directed)


def _resolve_index(args, need_files_ok=True):
    """Load a prebuilt index, or build one in memory from target files."""
    has_files = args.schema or args.nodes or args.edges
    if args.index and has_files:
        raise CliError("give either --index or --schema/--nodes/--edges, not both")
    if args.index:
        return load_index(args.index)
    if not (args.schema and args.nodes and args.edges):
        raise CliError("need --index or all of --schema, --nodes, --edges")
    schema, directed = load_schema(args.schema)
    g = load_graph(args.nodes, args.edges, schema, directed)
    return build_index(g, args.branching, args.leaf_threshold, args.buckets,
                       args.bins, args.radius)


def _null_model_doc(index):
    nm = index.null_model
    schema = index.graph.schema
    feats = []
    for i, (name, kind) in enumerate(zip(schema.names, schema.kinds)):
        pairs = [{"value": [list(p) if isinstance(p, tuple) else p for p in key],
                  "p": nm.tables[i][key]} for key in sorted(nm.tables[i])]
        cuts = nm.binner.cuts[i]
        feats.append({"name": name, "kind": kind,
                      "cuts": list(cuts) if cuts is not None else None,
                      "pairs": pairs})
    return {"floor": nm.floor, "edge_count": nm.edge_count, "features": feats}


def _dump_null_model(index, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_null_model_doc(index), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"null model written to {path}", file=sys.stderr)


def _match_record(match, rank, g, q):
    node_map = {q.node_ids[qn]: g.node_ids[tn]
                for qn, tn in sorted(match.mapping.node_map.items())}
    return {"record": "match", "rank": rank, "score": match.score,
            "edges_matched": len(match.mapping.edge_pairs),
            "node_map": node_map,
            "edge_pairs": [list(p) for p in match.mapping.signature()]}


def cmd_build_index(args):
    if not (args.schema and args.nodes and args.edges):
        raise CliError("build-index needs --schema, --nodes, and --edges")
    if not args.index:
        raise CliError("build-index needs --index for the output path")
    schema, directed = load_schema(args.schema)
    t0 = time.perf_counter()
    g = load_graph(args.nodes, args.edges, schema, directed)
    index = build_index(g, args.branching, args.leaf_threshold, args.buckets,
                        args.bins, args.radius)
    built = time.perf_counter() - t0
    save_index(index, args.index)
    if args.dump_null_model:
        _dump_null_model(index, args.dump_null_model)
    writer = _Writer(args.format)
    record = {"record": "stats", "build_seconds": built, "path": args.index}
    record.update(index.stats())
    writer.emit(record)
    return 0


def cmd_query(args):
    index = _resolve_index(args)
    g = index.graph
    q = _load_query(args.query_nodes, args.query_edges, g.schema, g.directed)
    params = SearchParams(k=args.k, beam_width=args.beam_width, scorer=args.scorer)
    weights = weight_vector(q, index.null_model)
    t0 = time.perf_counter()
    matches = topk_search(q, index, params)
    elapsed = time.perf_counter() - t0
    writer = _Writer(args.format)
    writer.emit({"record": "header", "command": "query", "k": args.k,
                 "scorer": args.scorer, "beam_width": args.beam_width,
                 "weights": list(weights), "query_nodes": q.n_nodes,
                 "query_edges": q.n_edges, "seconds": elapsed})
    for rank, match in enumerate(matches, start=1):
        writer.emit(_match_record(match, rank, g, q))
    return 0


def cmd_range(args):
    index = _resolve_index(args)
    g = index.graph
    q = _load_query(args.query_nodes, args.query_edges, g.schema, g.directed)
    params = SearchParams(beam_width=args.beam_width, scorer=args.scorer)
    weights = weight_vector(q, index.null_model)
    t0 = time.perf_counter()
    matches = range_search(q, index, args.r, params)
    elapsed = time.perf_counter() - t0
    writer = _Writer(args.format)
    writer.emit({"record": "header", "command": "range", "r": args.r,
                 "scorer": args.scorer, "beam_width": args.beam_width,
                 "weights": list(weights), "query_nodes": q.n_nodes,
                 "query_edges": q.n_edges, "matches": len(matches),
                 "seconds": elapsed})
    for rank, match in enumerate(matches, start=1):
        writer.emit(_match_record(match, rank, g, q))
    return 0


def cmd_oracle(args):
    index = None
    if args.index:
        index = _resolve_index(args)
        g = index.graph
    else:
        if not (args.schema and args.nodes and args.edges):
            raise CliError("oracle needs --index or target files")
        schema, directed = load_schema(args.schema)
        g = load_graph(args.nodes, args.edges, schema, directed)
    if g.n_edges > ORACLE_EDGE_CAP and not args.force:
        raise CliError(f"target has {g.n_edges} edges; the exhaustive oracle "
                       f"refuses more than {ORACLE_EDGE_CAP} without --force")
    q = _load_query(args.query_nodes, args.query_edges, g.schema, g.directed)
    null_model = index.null_model if index is not None else None
    t0 = time.perf_counter()
    if args.r is not None:
        matches = naive_range(q, g, args.r, scorer=args.scorer,
                              null_model=null_model, bins=args.bins)
    else:
        matches = naive_topk(q, g, args.k, scorer=args.scorer,
                             null_model=null_model, bins=args.bins)
    elapsed = time.perf_counter() - t0
    writer = _Writer(args.format)
    writer.emit({"record": "header", "command": "oracle", "k": args.k,
                 "r": args.r, "scorer": args.scorer, "matches": len(matches),
                 "query_nodes": q.n_nodes, "query_edges": q.n_edges,
                 "seconds": elapsed})
    for rank, match in enumerate(matches, start=1):
        writer.emit(_match_record(match, rank, g, q))
    return 0


def cmd_intent(args):
    index = _resolve_index(args)
    g = index.graph
    if len(args.query_nodes or ()) < 2 or len(args.query_edges or ()) < 2:
        raise CliError("intent needs at least two --query-nodes/--query-edges pairs")
    if len(args.query_nodes) != len(args.query_edges):
        raise CliError("--query-nodes and --query-edges counts differ")
    if not args.bijection:
        raise CliError("intent needs --bijection")
    exemplars = [load_graph(n, e, g.schema, g.directed)
                 for n, e in zip(args.query_nodes, args.query_edges)]
    bijections = load_bijections(args.bijection, exemplars)
    es = ExemplarSet(exemplars, bijections)
    params = SearchParams(k=args.k, beam_width=args.beam_width)
    use_filters = not args.no_filters
    scorer = _ExemplarScorer(es, index, args.weight_mode, args.agg_mode,
                             use_filters)
    t0 = time.perf_counter()
    matches = intent_topk(es, index, params, args.weight_mode, args.agg_mode,
                          use_filters)
    elapsed = time.perf_counter() - t0
    names = g.schema.names
    writer = _Writer(args.format)
    writer.emit({"record": "header", "command": "intent", "k": args.k,
                 "exemplars": len(es), "weight_mode": args.weight_mode,
                 "agg_mode": args.agg_mode, "filters": use_filters,
                 "exact_match": [names[f] for f in scorer.hybrid.exact_match],
                 "exact_relation": [names[f] for f in scorer.hybrid.exact_relation],
                 "hybrid_weights": list(scorer.hybrid.weights),
                 "seconds": elapsed})
    q = es.graphs[0]
    for rank, match in enumerate(matches, start=1):
        writer.emit(_match_record(match, rank, g, q))
    return 0


_BENCH_STATE = {}


def _bench_one(q):
    t0 = time.perf_counter()
    topk_search(q, _BENCH_STATE["index"], _BENCH_STATE["params"])
    return time.perf_counter() - t0


def cmd_bench(args):
    index = _resolve_index(args)
    g = index.graph
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s != ""]
    except ValueError:
        raise CliError(f"bad --sizes {args.sizes!r}") from None
    if not sizes or min(sizes) < 1:
        raise CliError("--sizes needs positive integers")
    params = SearchParams(k=args.k, beam_width=args.beam_width, scorer=args.scorer)
    rng = np.random.default_rng(args.seed)
    writer = _Writer(args.format)
    writer.emit({"record": "header", "command": "bench", "sizes": sizes,
                 "queries": args.queries, "k": args.k, "seed": args.seed,
                 "beam_width": args.beam_width, "with_oracle": args.with_oracle,
                 "jobs": args.jobs})
    for size in sizes:
        queries = [grow_query(g, size, rng) for _ in range(args.queries)]
        if args.jobs > 1:
            import multiprocessing
            from concurrent.futures import ProcessPoolExecutor
            _BENCH_STATE["index"] = index
            _BENCH_STATE["params"] = params
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(max_workers=args.jobs, mp_context=ctx) as ex:
                times = list(ex.map(_bench_one, queries))
        else:
            times = []
            for q in queries:
                t0 = time.perf_counter()
                topk_search(q, index, params)
                times.append(time.perf_counter() - t0)
        row = {"record": "row", "size": size, "queries": len(queries),
               "mean_s": statistics.fmean(times),
               "median_s": statistics.median(times)}
        if args.with_oracle:
            oracle_times = []
            capped = 0
            for q in queries:
                t0 = time.perf_counter()
                try:
                    naive_topk(q, g, args.k, null_model=index.null_model,
                               deadline=time.monotonic() + args.oracle_budget)
                    oracle_times.append(time.perf_counter() - t0)
                except SearchTimeout:
                    oracle_times.append(time.perf_counter() - t0)
                    capped += 1
            row["oracle_mean_s"] = statistics.fmean(oracle_times)
            row["oracle_capped"] = capped
            row["speedup"] = row["oracle_mean_s"] / row["mean_s"]
            row["speedup_is_lower_bound"] = capped > 0
        writer.emit(row)
    return 0


def cmd_stats(args):
    index = _resolve_index(args)
    if args.dump_null_model:
        _dump_null_model(index, args.dump_null_model)
    writer = _Writer(args.format)
    record = {"record": "stats"}
    record.update(index.stats())
    writer.emit(record)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="contextgraph",
        description="Context-aware top-k common subgraph search")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-index", help="build and save a target index")
    _add_target_args(p)
    _add_build_args(p)
    _add_format_arg(p)
    p.add_argument("--dump-null-model", metavar="PATH",
                   help="also write the null model as JSON")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("query", help="top-k search against an indexed target")
    _add_target_args(p)
    _add_build_args(p)
    _add_search_args(p)
    _add_format_arg(p)
    p.add_argument("--query-nodes")
    p.add_argument("--query-edges")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("range", help="all matches scoring at least --r")
    _add_target_args(p)
    _add_build_args(p)
    _add_search_args(p)
    _add_format_arg(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--query-nodes")
    p.add_argument("--query-edges")
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("oracle", help="exhaustive reference search (slow)")
    _add_target_args(p)
    _add_search_args(p)
    _add_format_arg(p)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--force", action="store_true",
                   help="run even on large targets")
    p.add_argument("--query-nodes")
    p.add_argument("--query-edges")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("intent", help="search with multiple query exemplars")
    _add_target_args(p)
    _add_build_args(p)
    _add_format_arg(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--beam-width", type=int, default=50)
    p.add_argument("--query-nodes", action="append")
    p.add_argument("--query-edges", action="append")
    p.add_argument("--bijection")
    p.add_argument("--weight-mode", choices=("individual", "averaged"),
                   default="individual")
    p.add_argument("--agg-mode", choices=("min", "mean"), default="min")
    p.add_argument("--no-filters", action="store_true",
                   help="score without exact-match/exact-relation filters")
    p.set_defaults(func=cmd_intent)

    p = sub.add_parser("bench", help="latency benchmark over grown queries")
    _add_target_args(p)
    _add_build_args(p)
    _add_search_args(p)
    _add_format_arg(p)
    p.add_argument("--sizes", default="4,6,8", help="comma-separated query sizes")
    p.add_argument("--queries", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--oracle-budget", type=float, default=10.0,
                   help="seconds per oracle run before reporting a lower bound")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="describe an index")
    _add_target_args(p)
    _add_build_args(p)
    _add_format_arg(p)
    p.add_argument("--dump-null-model", metavar="PATH")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (CliError, GraphLoadError, IndexFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SearchTimeout:
        print("error: search exceeded its deadline", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
