"""Command line interface: subcommands, formats, exit codes."""

import json

import numpy as np
import pytest

from contextgraph.cli import main
from contextgraph.graph import save_graph, save_schema
from contextgraph.index import MAGIC, load_index
from contextgraph.synth import grow_query, random_graph


def write_instance(tmp_path, seed=0, n_nodes=20, n_edges=34, query_edges=3):
    """Target + query file trio ready for the CLI."""
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n_nodes, n_edges)
    q = grow_query(g, query_edges, rng)
    paths = {
        "schema": tmp_path / "schema.json",
        "nodes": tmp_path / "nodes.tsv",
        "edges": tmp_path / "edges.tsv",
        "query_nodes": tmp_path / "q_nodes.tsv",
        "query_edges": tmp_path / "q_edges.tsv",
        "index": tmp_path / "target.cgq",
    }
    save_schema(g.schema, g.directed, paths["schema"])
    save_graph(g, paths["nodes"], paths["edges"])
    save_graph(q, paths["query_nodes"], paths["query_edges"])
    return paths, g, q


def records(capsys):
    out = capsys.readouterr().out
    return [json.loads(line) for line in out.splitlines() if line]


def run(argv):
    return main([str(a) for a in argv])


class TestBuildIndex:
    def test_writes_index_and_stats(self, tmp_path, capsys):
        paths, g, _ = write_instance(tmp_path)
        code = run(["build-index", "--schema", paths["schema"],
                    "--nodes", paths["nodes"], "--edges", paths["edges"],
                    "--index", paths["index"]])
        assert code == 0
        assert paths["index"].read_bytes()[:4] == MAGIC
        (stats,) = records(capsys)
        assert stats["record"] == "stats"
        assert stats["edges"] == g.n_edges
        assert stats["build_seconds"] >= 0

    def test_rebuild_is_byte_identical(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path)
        other = tmp_path / "again.cgq"
        run(["build-index", "--schema", paths["schema"], "--nodes",
             paths["nodes"], "--edges", paths["edges"], "--index", paths["index"]])
        run(["build-index", "--schema", paths["schema"], "--nodes",
             paths["nodes"], "--edges", paths["edges"], "--index", other])
        assert paths["index"].read_bytes() == other.read_bytes()

    def test_dump_null_model(self, tmp_path, capsys):
        paths, g, _ = write_instance(tmp_path)
        dump = tmp_path / "null.json"
        code = run(["build-index", "--schema", paths["schema"], "--nodes",
                    paths["nodes"], "--edges", paths["edges"],
                    "--index", paths["index"], "--dump-null-model", dump])
        assert code == 0
        doc = json.loads(dump.read_text())
        assert doc["edge_count"] == g.n_edges
        assert doc["floor"] == pytest.approx(1 / (2 * g.n_edges))
        assert len(doc["features"]) == len(g.schema)
        for feat in doc["features"]:
            assert sum(p["p"] for p in feat["pairs"]) == pytest.approx(1.0)

    def test_missing_inputs_fail(self, tmp_path, capsys):
        code = run(["build-index", "--index", tmp_path / "x.cgq"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestQuery:
    def build(self, paths):
        run(["build-index", "--schema", paths["schema"], "--nodes",
             paths["nodes"], "--edges", paths["edges"], "--index", paths["index"]])

    def test_from_index(self, tmp_path, capsys):
        paths, g, q = write_instance(tmp_path)
        self.build(paths)
        capsys.readouterr()
        code = run(["query", "--index", paths["index"],
                    "--query-nodes", paths["query_nodes"],
                    "--query-edges", paths["query_edges"], "--k", 5])
        assert code == 0
        recs = records(capsys)
        header, matches = recs[0], recs[1:]
        assert header["record"] == "header"
        assert header["k"] == 5
        assert sum(header["weights"]) == pytest.approx(1.0)
        assert 1 <= len(matches) <= 5
        assert [m["rank"] for m in matches] == list(range(1, len(matches) + 1))
        scores = [m["score"] for m in matches]
        assert scores == sorted(scores, reverse=True)
        # node maps speak original ids
        for m in matches:
            for qid, tid in m["node_map"].items():
                assert qid in q.node_ids
                assert tid in g.node_ids

    def test_files_only_equals_index_path(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path)
        self.build(paths)
        capsys.readouterr()
        run(["query", "--index", paths["index"],
             "--query-nodes", paths["query_nodes"],
             "--query-edges", paths["query_edges"]])
        via_index = records(capsys)
        run(["query", "--schema", paths["schema"], "--nodes", paths["nodes"],
             "--edges", paths["edges"],
             "--query-nodes", paths["query_nodes"],
             "--query-edges", paths["query_edges"]])
        via_files = records(capsys)
        strip = lambda recs: [{k: v for k, v in r.items() if k != "seconds"}
                              for r in recs]
        assert strip(via_index) == strip(via_files)

    def test_index_and_files_conflict(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path)
        self.build(paths)
        capsys.readouterr()
        code = run(["query", "--index", paths["index"], "--schema",
                    paths["schema"], "--query-nodes", paths["query_nodes"],
                    "--query-edges", paths["query_edges"]])
        assert code == 1
        assert "not both" in capsys.readouterr().err

    def test_missing_query_files(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path)
        self.build(paths)
        capsys.readouterr()
        code = run(["query", "--index", paths["index"]])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_tsv_format(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path)
        self.build(paths)
        capsys.readouterr()
        code = run(["query", "--index", paths["index"],
                    "--query-nodes", paths["query_nodes"],
                    "--query-edges", paths["query_edges"], "--format", "tsv"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("# ")
        assert lines[1].startswith("# columns: ")
        columns = lines[1].split(": ", 1)[1].split("\t")
        row = dict(zip(columns, lines[2].split("\t")))
        assert float(row["score"]) > 0
        assert int(row["rank"]) == 1


class TestOracle:
    def test_agrees_with_indexed_query(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path, seed=3)
        run(["build-index", "--schema", paths["schema"], "--nodes",
             paths["nodes"], "--edges", paths["edges"], "--index", paths["index"]])
        capsys.readouterr()
        run(["query", "--index", paths["index"], "--query-nodes",
             paths["query_nodes"], "--query-edges", paths["query_edges"]])
        fast = records(capsys)[1:]
        code = run(["oracle", "--index", paths["index"], "--query-nodes",
                    paths["query_nodes"], "--query-edges", paths["query_edges"]])
        assert code == 0
        slow = records(capsys)[1:]
        assert [m["score"] for m in fast] == [m["score"] for m in slow]

    def test_range_mode(self, tmp_path, capsys):
        paths, _, q = write_instance(tmp_path, seed=4)
        code = run(["oracle", "--schema", paths["schema"], "--nodes",
                    paths["nodes"], "--edges", paths["edges"], "--query-nodes",
                    paths["query_nodes"], "--query-edges", paths["query_edges"],
                    "--r", q.n_edges - 0.5])
        assert code == 0
        recs = records(capsys)
        assert all(m["score"] >= q.n_edges - 0.5 for m in recs[1:])

    def test_refuses_large_target(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path, seed=5, n_nodes=150,
                                     n_edges=5001, query_edges=1)
        code = run(["oracle", "--schema", paths["schema"], "--nodes",
                    paths["nodes"], "--edges", paths["edges"], "--query-nodes",
                    paths["query_nodes"], "--query-edges", paths["query_edges"]])
        assert code == 1
        assert "refuses" in capsys.readouterr().err

    def test_force_overrides_refusal(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path, seed=5, n_nodes=150,
                                     n_edges=5001, query_edges=1)
        code = run(["oracle", "--schema", paths["schema"], "--nodes",
                    paths["nodes"], "--edges", paths["edges"], "--query-nodes",
                    paths["query_nodes"], "--query-edges", paths["query_edges"],
                    "--force", "--k", 3])
        assert code == 0
        assert len(records(capsys)) == 4


class TestRange:
    def test_threshold_filter(self, tmp_path, capsys):
        paths, _, q = write_instance(tmp_path, seed=6)
        run(["build-index", "--schema", paths["schema"], "--nodes",
             paths["nodes"], "--edges", paths["edges"], "--index", paths["index"]])
        capsys.readouterr()
        code = run(["range", "--index", paths["index"], "--query-nodes",
                    paths["query_nodes"], "--query-edges", paths["query_edges"],
                    "--r", q.n_edges - 0.25])
        assert code == 0
        recs = records(capsys)
        assert recs[0]["r"] == pytest.approx(q.n_edges - 0.25)
        assert recs[0]["matches"] == len(recs) - 1
        assert all(m["score"] >= q.n_edges - 0.25 for m in recs[1:])

    def test_r_is_required(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path)
        code = run(["range", "--schema", paths["schema"], "--nodes",
                    paths["nodes"], "--edges", paths["edges"], "--query-nodes",
                    paths["query_nodes"], "--query-edges", paths["query_edges"]])
        assert code == 2


class TestIntent:
    def test_two_exemplars(self, tmp_path, capsys):
        paths, g, q = write_instance(tmp_path, seed=7)
        run(["build-index", "--schema", paths["schema"], "--nodes",
             paths["nodes"], "--edges", paths["edges"], "--index", paths["index"]])
        # second exemplar: the same query under renamed ids
        qn2 = tmp_path / "q2_nodes.tsv"
        qe2 = tmp_path / "q2_edges.tsv"
        renamed = q.node_ids
        text = (paths["query_nodes"].read_text())
        for nid in renamed:
            text = text.replace(f"\n{nid}\t", f"\nx{nid}\t")
        qn2.write_text(text, encoding="utf-8")
        qe2.write_text("\n".join("\t".join(f"x{p}" for p in line.split("\t"))
                                 for line in paths["query_edges"].read_text().splitlines())
                       + "\n", encoding="utf-8")
        bij = tmp_path / "bij.tsv"
        bij.write_text("".join(f"2\t{nid}\tx{nid}\n" for nid in renamed),
                       encoding="utf-8")
        capsys.readouterr()
        code = run(["intent", "--index", paths["index"],
                    "--query-nodes", paths["query_nodes"], "--query-edges",
                    paths["query_edges"], "--query-nodes", qn2,
                    "--query-edges", qe2, "--bijection", bij, "--k", 4,
                    "--agg-mode", "mean"])
        assert code == 0
        recs = records(capsys)
        header = recs[0]
        assert header["exemplars"] == 2
        assert header["agg_mode"] == "mean"
        assert set(header["exact_match"]) == set(g.schema.names)
        assert len(recs) > 1
        assert recs[1]["score"] == pytest.approx(q.n_edges)

    def test_needs_two_exemplars(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path)
        code = run(["intent", "--schema", paths["schema"], "--nodes",
                    paths["nodes"], "--edges", paths["edges"],
                    "--query-nodes", paths["query_nodes"],
                    "--query-edges", paths["query_edges"]])
        assert code == 1
        assert "two" in capsys.readouterr().err


class TestBench:
    def test_rows_with_oracle(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path, seed=8)
        code = run(["bench", "--schema", paths["schema"], "--nodes",
                    paths["nodes"], "--edges", paths["edges"], "--sizes", "2,3",
                    "--queries", "2", "--with-oracle", "--oracle-budget", "20"])
        assert code == 0
        recs = records(capsys)
        assert recs[0]["record"] == "header"
        rows = [r for r in recs if r["record"] == "row"]
        assert [r["size"] for r in rows] == [2, 3]
        for row in rows:
            assert row["queries"] == 2
            assert row["mean_s"] > 0
            assert row["speedup"] > 0
            assert row["oracle_capped"] == 0

    def test_bad_sizes(self, tmp_path, capsys):
        paths, _, _ = write_instance(tmp_path)
        code = run(["bench", "--schema", paths["schema"], "--nodes",
                    paths["nodes"], "--edges", paths["edges"], "--sizes", "a,b"])
        assert code == 1


class TestStats:
    def test_from_index(self, tmp_path, capsys):
        paths, g, _ = write_instance(tmp_path, seed=9)
        run(["build-index", "--schema", paths["schema"], "--nodes",
             paths["nodes"], "--edges", paths["edges"], "--index", paths["index"]])
        capsys.readouterr()
        code = run(["stats", "--index", paths["index"]])
        assert code == 0
        (stats,) = records(capsys)
        assert stats["edges"] == g.n_edges
        assert stats["tree_height"] >= 1

    def test_unknown_command_exits_two(self, capsys):
        assert run(["transmogrify"]) == 2

    def test_unreadable_index(self, tmp_path, capsys):
        bad = tmp_path / "bad.cgq"
        bad.write_bytes(b"not an index")
        code = run(["stats", "--index", bad])
        assert code == 1
        assert "error:" in capsys.readouterr().err
