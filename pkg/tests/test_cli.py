import json
import math
import os

import pytest

from cdengine.cli import main
from cdengine.tsvio import read_columns, read_tsv

from synth import write_edges_tsv, write_nodes_tsv, write_taxonomy_tsv

CHAIN_DOCS = [{"id": "A", "year": 1950}, {"id": "B", "year": 1951},
              {"id": "C", "year": 1952}]
CHAIN_EDGES = [("B", "A"), ("C", "B")]


@pytest.fixture
def chain_files(tmp_path):
    nodes = tmp_path / "nodes.tsv"
    edges = tmp_path / "edges.tsv"
    write_nodes_tsv(nodes, CHAIN_DOCS)
    write_edges_tsv(edges, CHAIN_EDGES)
    return nodes, edges


def _run(*argv):
    return main([str(a) for a in argv])


def test_cd_on_chain_fixture(chain_files, tmp_path):
    nodes, edges = chain_files
    out = tmp_path / "out"
    assert _run("cd", "--nodes", nodes, "--edges", edges, "--out", out,
                "--window", "5") == 0
    header, rows = read_tsv(out / "cd.tsv")
    assert header == ["doc_id", "year", "field_sub", "N_i", "N_j", "N_k", "N_b", "cd_value"]
    values = {r[0]: r[7] for r in rows}
    assert values == {"A": "1.0", "B": "1.0", "C": ""}  # empty cell = undefined


def test_cd_variants_columns(chain_files, tmp_path):
    nodes, edges = chain_files
    out = tmp_path / "out"
    assert _run("cd", "--nodes", nodes, "--edges", edges, "--out", out,
                "--variants") == 0
    header, rows = read_tsv(out / "cd.tsv")
    assert header[-3:] == ["di_1_no_k", "di_star", "no_refs"]
    by_id = {r[0]: r for r in rows}
    assert by_id["A"][-1] == "1"  # A has no references


def test_validate_duplicate_edge(tmp_path):
    nodes = tmp_path / "nodes.tsv"
    edges = tmp_path / "edges.tsv"
    write_nodes_tsv(nodes, CHAIN_DOCS)
    write_edges_tsv(edges, [("B", "A"), ("B", "A")])
    out = tmp_path / "out"
    assert _run("validate", "--nodes", nodes, "--edges", edges, "--out", out) == 0
    _, rows = read_tsv(out / "validation.tsv")
    checks = {r[0]: int(r[1]) for r in rows}
    assert checks["duplicate_edges"] == 1
    assert checks["n_edges"] == 1


def test_missing_nodes_file_data_error(tmp_path):
    assert _run("cd", "--nodes", tmp_path / "absent.tsv",
                "--edges", tmp_path / "absent2.tsv", "--out", tmp_path / "o") == 2


def test_unknown_subcommand_usage_error():
    assert _run("frobnicate") == 1


def test_no_subcommand_usage_error():
    assert _run() == 1


def test_bad_window_usage_error(chain_files, tmp_path):
    nodes, edges = chain_files
    assert _run("cd", "--nodes", nodes, "--edges", edges,
                "--out", tmp_path / "o", "--window", "soon") == 1


def test_bad_subsample_usage_error(chain_files, tmp_path):
    nodes, edges = chain_files
    assert _run("null", "--nodes", nodes, "--edges", edges,
                "--out", tmp_path / "o", "--subsample", "1.5") == 1


def test_bad_flag_choice_usage_error(chain_files, tmp_path):
    nodes, edges = chain_files
    assert _run("normalize", "--nodes", nodes, "--edges", edges,
                "--out", tmp_path / "o", "--normalize", "bogus") == 1


def test_header_comments_and_seed(chain_files, tmp_path):
    nodes, edges = chain_files
    out = tmp_path / "out"
    assert _run("cd", "--nodes", nodes, "--edges", edges, "--out", out,
                "--seed", "42") == 0
    lines = (out / "cd.tsv").read_text().splitlines()
    assert lines[0] == "# command: cd"
    assert lines[1].startswith("# config_hash: ")
    assert lines[2] == "# seed: 42"


def test_env_seed_overrides_flag(chain_files, tmp_path, monkeypatch):
    nodes, edges = chain_files
    out = tmp_path / "out"
    monkeypatch.setenv("CDENGINE_SEED", "777")
    assert _run("cd", "--nodes", nodes, "--edges", edges, "--out", out,
                "--seed", "42") == 0
    assert "# seed: 777" in (out / "cd.tsv").read_text().splitlines()[2]


def test_manifest_written(chain_files, tmp_path):
    nodes, edges = chain_files
    out = tmp_path / "out"
    assert _run("cd", "--nodes", nodes, "--edges", edges, "--out", out) == 0
    manifest = json.loads((out / "manifest_cd.json").read_text())
    assert manifest["command"] == "cd"
    assert manifest["row_counts"]["cd.tsv"] == 3
    assert "cdengine" in manifest["versions"]
    assert manifest["field_area_map"] == {"F": "F"}


def test_reproducibility_byte_identical(chain_files, tmp_path):
    nodes, edges = chain_files
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        assert _run("cd", "--nodes", nodes, "--edges", edges, "--out", out,
                    "--seed", "9") == 0
    for name in os.listdir(out1):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_ingest_cache_then_reuse(chain_files, tmp_path):
    nodes, edges = chain_files
    out = tmp_path / "out"
    assert _run("ingest", "--nodes", nodes, "--edges", edges, "--out", out) == 0
    assert (out / "corpus.cdc").exists()
    header, rows = read_tsv(out / "field_year.tsv")
    assert header[0] == "level"
    # the cache can stand in for the nodes file
    out2 = tmp_path / "out2"
    assert _run("cd", "--nodes", out / "corpus.cdc", "--out", out2) == 0
    _, rows2 = read_tsv(out2 / "cd.tsv")
    assert len(rows2) == 3


def test_normalize_command_emits_both_columns(tmp_path):
    docs = [{"id": "f", "year": 2000}, {"id": "r", "year": 1995},
            {"id": "w", "year": 2001}, {"id": "k", "year": 2002}]
    edges = [("f", "r"), ("w", "f"), ("k", "r")]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, edges)
    out = tmp_path / "out"
    assert _run("normalize", "--nodes", nodes_p, "--edges", edges_p, "--out", out) == 0
    header, _ = read_tsv(out / "normalize.tsv")
    assert header[-2:] == ["cd_paper_norm", "cd_fy_norm"]
    cols = read_columns(out / "normalize.tsv")
    i = cols["doc_id"].index("f")
    # f: ni=1, nj=0, nk=1, nb=1 -> raw 1/2; paper norm clamps nk to 0 -> 1.0
    assert cols["cd_value"][i] == pytest.approx(0.5)
    assert cols["cd_paper_norm"][i] == pytest.approx(1.0)


def test_null_command_outputs(tmp_path):
    docs = [{"id": f"t{i}", "year": 1995} for i in range(6)]
    docs += [{"id": f"c{i}", "year": 2000 + i % 3} for i in range(12)]
    edges = []
    for i in range(12):
        edges.append((f"c{i}", f"t{i % 6}"))
        edges.append((f"c{i}", f"t{(i + 1) % 6}"))
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, edges)
    out = tmp_path / "out"
    assert _run("null", "--nodes", nodes_p, "--edges", edges_p, "--out", out,
                "--replicas", "3", "--swap-multiplier", "10") == 0
    header, rows = read_tsv(out / "zscores.tsv")
    assert header == ["doc_id", "observed", "null_mean", "null_sd", "z"]
    assert len(rows) == 18
    header, _ = read_tsv(out / "yearly_z.tsv")
    assert header == ["year", "mean_z", "n"]


def test_atypical_command_outputs(tmp_path):
    docs = [{"id": f"t{i}", "year": 1995, "venue": f"V{i % 3}"} for i in range(9)]
    docs += [{"id": f"c{i}", "year": 2001} for i in range(10)]
    edges = []
    for i in range(10):
        edges += [(f"c{i}", f"t{(i + j) % 9}") for j in range(3)]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, edges)
    out = tmp_path / "out"
    assert _run("atypical", "--nodes", nodes_p, "--edges", edges_p, "--out", out,
                "--replicas", "3") == 0
    assert (out / "atypical_docs.tsv").exists()
    assert (out / "atypical_cdf.tsv").exists()
    manifest = json.loads((out / "manifest_atypical.json").read_text())
    assert "coverage" in manifest


def test_knowledge_command_outputs(tmp_path):
    docs = [{"id": "t1", "year": 1990, "title": "alpha beta", "authors": ["x"]},
            {"id": "t2", "year": 1990, "title": "beta gamma", "authors": ["y"]},
            {"id": "a", "year": 2000, "title": "alpha gamma", "authors": ["x"]}]
    edges = [("a", "t1"), ("a", "t2")]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, edges)
    out = tmp_path / "out"
    assert _run("knowledge", "--nodes", nodes_p, "--edges", edges_p, "--out", out) == 0
    cols = read_columns(out / "knowledge.tsv")
    i = cols["doc_id"].index("a")
    assert cols["self_cite_ratio"][i] == pytest.approx(0.5)
    assert cols["mean_age_cited"][i] == pytest.approx(10.0)
    assert (out / "knowledge_fy.tsv").exists()


def test_text_command_outputs(tmp_path):
    docs = [{"id": f"d{i}", "year": 1950 + i,
             "title": f"measure the signal {i}"} for i in range(4)]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, [])
    lex = tmp_path / "pos.tsv"
    lex.write_text("measure\tverb\nsignal\tnoun\n", encoding="utf-8")
    out = tmp_path / "out"
    assert _run("text", "--nodes", nodes_p, "--edges", edges_p, "--out", out,
                "--pos-lexicon", lex) == 0
    assert (out / "ttr.tsv").exists()
    assert (out / "pair_novelty.tsv").exists()
    _, verb_rows = read_tsv(out / "verbs.tsv")
    assert any(r[3] == "measure" for r in verb_rows)


def test_buckets_command(tmp_path, chain_files):
    nodes, edges = chain_files
    out = tmp_path / "out"
    assert _run("buckets", "--nodes", nodes, "--edges", edges, "--out", out,
                "--window", "all") == 0
    header, rows = read_tsv(out / "buckets.tsv")
    assert header == ["year", "interval", "count"]
    counts = {(r[0], r[1]): int(r[2]) for r in rows}
    assert counts[("1950", "(0.75,1]")] == 1


def test_regress_and_shapley_commands(tmp_path):
    data = tmp_path / "data.tsv"
    lines = ["y\tx1\tx2"]
    rng_vals = [(i, (i * 7) % 5, (i * 3) % 4) for i in range(12)]
    for i, a, b in rng_vals:
        lines.append(f"{2.0 * a + 0.5 * b + (i % 3)}\t{a}\t{b}")
    data.write_text("\n".join(lines) + "\n", encoding="utf-8")

    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"outcome": "y", "covariates": ["x1", "x2"]}),
                    encoding="utf-8")
    out = tmp_path / "fit"
    assert _run("regress", str(data), "--spec", spec, "--out", out) == 0
    header, rows = read_tsv(out / "fit.tsv")
    assert header == ["term", "coefficient", "se", "p"]
    assert [r[0] for r in rows] == ["const", "x1", "x2"]

    sspec = tmp_path / "sspec.json"
    sspec.write_text(json.dumps({"outcome": "y",
                                 "groups": {"G1": ["x1"], "G2": ["x2"]}}),
                     encoding="utf-8")
    out2 = tmp_path / "shap"
    assert _run("shapley", str(data), "--spec", sspec, "--out", out2) == 0
    header, rows = read_tsv(out2 / "shapley.tsv")
    assert header == ["group", "share"]
    manifest = json.loads((out2 / "manifest_shapley.json").read_text())
    assert manifest["total_share"] == pytest.approx(
        sum(float(r[1]) for r in rows))


def test_report_exclusion_and_cross_field_mean(tmp_path):
    docs = [
        {"id": "fa1", "year": 2000, "field": "SA"},
        {"id": "fa2", "year": 2000, "field": "SA"},
        {"id": "fb1", "year": 2000, "field": "SB"},
        {"id": "ra", "year": 1995, "field": "SA"},
        {"id": "wa", "year": 2001, "field": "SA"},
        {"id": "wb", "year": 2001, "field": "SB"},
        {"id": "wc", "year": 2002, "field": "SB"},
    ]
    # fa1 scores 1.0; fb1 scores 1.0 then another citer drops it lower; fa2 undefined
    edges = [("fa1", "ra"), ("wa", "fa1"),
             ("fb1", "ra"), ("wb", "fb1"), ("wc", "fb1"), ("wc", "ra")]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, edges)
    write_taxonomy_tsv(tmp_path / "tax.tsv", {"SA": "A", "SB": "B"})
    out = tmp_path / "out"
    assert _run("cd", "--nodes", nodes_p, "--edges", edges_p,
                "--taxonomy", tmp_path / "tax.tsv", "--out", out) == 0
    assert _run("report", "--out", out) == 0
    cols = read_columns(out / "report.tsv")
    rows = {(m, f, y): (mean, n) for m, f, y, mean, n in zip(
        cols["metric"], cols["field_area"], cols["year"], cols["mean"], cols["n"])}
    mean_a, n_a = rows[("cd_value", "A", 2000)]
    assert n_a == 1  # fa2 undefined, excluded from the mean
    mean_b, _ = rows[("cd_value", "B", 2000)]
    all_mean, n_fields = rows[("cd_value", "(all)", 2000)]
    assert n_fields == 2
    assert all_mean == pytest.approx((mean_a + mean_b) / 2)


def test_report_without_inputs_is_data_error(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert _run("report", "--out", empty) == 2


def test_j_rule_and_no_k_flags(tmp_path):
    # enumeration fixture: focal with refs {r1, r2}; w1 -> focal;
    # w2 -> focal + r1; w3 -> r2, so default counts are (1, 1, 1)
    docs = [{"id": "focal", "year": 2000}, {"id": "r1", "year": 1995},
            {"id": "r2", "year": 1996}, {"id": "w1", "year": 2001},
            {"id": "w2", "year": 2002}, {"id": "w3", "year": 2003}]
    edges = [("focal", "r1"), ("focal", "r2"), ("w1", "focal"),
             ("w2", "focal"), ("w2", "r1"), ("w3", "r2")]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, edges)

    def run_cd(out, *extra):
        assert _run("cd", "--nodes", nodes_p, "--edges", edges_p, "--out", out,
                    "--window", "all", *extra) == 0
        cols = read_columns(out / "cd.tsv")
        i = cols["doc_id"].index("focal")
        return cols["N_i"][i], cols["N_j"][i], cols["N_k"][i], cols["cd_value"][i]

    assert run_cd(tmp_path / "a") == (1, 1, 1, 0.0)
    assert run_cd(tmp_path / "b", "--j-rule", "2") == (2, 0, 0, 1.0)
    assert run_cd(tmp_path / "c", "--j-rule", "all") == (2, 0, 0, 1.0)
    ni, nj, nk, value = run_cd(tmp_path / "d", "--no-k")
    assert (ni, nj, nk) == (1, 1, 1)
    assert value == 0.0  # (1-1)/(1+1)


def test_jsonl_nodes_via_cli(tmp_path):
    jsonl = tmp_path / "nodes.jsonl"
    jsonl.write_text(
        '{"doc_id": "A", "kind": "paper", "year": 1950, "field_sub": "F"}\n'
        '{"doc_id": "B", "kind": "paper", "year": 1951, "field_sub": "F"}\n',
        encoding="utf-8")
    edges = tmp_path / "edges.tsv"
    write_edges_tsv(edges, [("B", "A")])
    out = tmp_path / "out"
    assert _run("cd", "--nodes", jsonl, "--edges", edges, "--out", out) == 0
    _, rows = read_tsv(out / "cd.tsv")
    assert len(rows) == 2


def test_dangling_edge_via_cli_is_data_error(tmp_path):
    nodes, edges = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes, CHAIN_DOCS)
    write_edges_tsv(edges, [("ghost", "A")])
    assert _run("cd", "--nodes", nodes, "--edges", edges, "--out", tmp_path / "o") == 2


def test_unknown_subfield_via_cli_is_data_error(tmp_path):
    nodes, edges = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes, CHAIN_DOCS)
    write_edges_tsv(edges, CHAIN_EDGES)
    write_taxonomy_tsv(tmp_path / "tax.tsv", {"OTHER": "AREA"})
    assert _run("cd", "--nodes", nodes, "--edges", edges,
                "--taxonomy", tmp_path / "tax.tsv", "--out", tmp_path / "o") == 2


def test_normalize_fy_at_sub_level(tmp_path):
    docs = [{"id": "f", "year": 2000, "field": "S1"},
            {"id": "r", "year": 1995, "field": "S1"},
            {"id": "w", "year": 2001, "field": "S2"},
            {"id": "k", "year": 2002, "field": "S2"}]
    edges = [("f", "r"), ("w", "f"), ("k", "r")]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, edges)
    out = tmp_path / "out"
    assert _run("normalize", "--nodes", nodes_p, "--edges", edges_p, "--out", out,
                "--normalize", "fy", "--field-level", "sub") == 0
    header, _ = read_tsv(out / "normalize.tsv")
    assert header[-1] == "cd_fy_norm"
    assert "cd_paper_norm" not in header
    cols = read_columns(out / "normalize.tsv")
    i = cols["doc_id"].index("f")
    # (S1, 2000) cohort is only f with 1 ref: subtrahend 1, nk 1 -> nk' 0
    assert cols["cd_value"][i] == pytest.approx(0.5)
    assert cols["cd_fy_norm"][i] == pytest.approx(1.0)


def test_text_abstract_scope(tmp_path):
    docs = [{"id": f"d{i}", "year": 2000, "title": "short title",
             "abstract": "alpha beta gamma delta"} for i in range(3)]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, [])
    out = tmp_path / "out"
    assert _run("text", "--nodes", nodes_p, "--edges", edges_p, "--out", out,
                "--scope", "abstract") == 0
    cols = read_columns(out / "ttr.tsv")
    assert cols["ttr"][0] == pytest.approx(4 / 12)


def test_regress_predictions_output(tmp_path):
    data = tmp_path / "data.tsv"
    lines = ["y\tyear\tctrl"]
    for i in range(12):
        year = 2000 + i % 3
        ctrl = float(i)
        lines.append(f"{0.1 * (year - 2000) + 0.05 * ctrl + (i % 2) * 0.01}\t{year}\t{ctrl}")
    data.write_text("\n".join(lines) + "\n", encoding="utf-8")
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "outcome": "y", "covariates": ["ctrl"], "fixed_effects": ["year"],
        "predict_year_group": "year"}), encoding="utf-8")
    out = tmp_path / "fit"
    assert _run("regress", str(data), "--spec", spec, "--out", out) == 0
    header, rows = read_tsv(out / "predictions.tsv")
    assert header == ["level", "predicted"]
    assert [r[0] for r in rows] == ["2000", "2001", "2002"]


def test_null_run_determinism(tmp_path):
    docs = [{"id": f"t{i}", "year": 1995} for i in range(5)]
    docs += [{"id": f"c{i}", "year": 2000 + i % 2} for i in range(10)]
    edges = [(f"c{i}", f"t{i % 5}") for i in range(10)]
    edges += [(f"c{i}", f"t{(i + 2) % 5}") for i in range(10)]
    nodes_p, edges_p = tmp_path / "n.tsv", tmp_path / "e.tsv"
    write_nodes_tsv(nodes_p, docs)
    write_edges_tsv(edges_p, edges)
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        assert _run("null", "--nodes", nodes_p, "--edges", edges_p, "--out", out,
                    "--replicas", "3", "--swap-multiplier", "5", "--seed", "11") == 0
    assert (out1 / "zscores.tsv").read_bytes() == (out2 / "zscores.tsv").read_bytes()
    assert (out1 / "yearly_z.tsv").read_bytes() == (out2 / "yearly_z.tsv").read_bytes()


def test_report_does_not_double_count_across_sources(chain_files, tmp_path):
    nodes, edges = chain_files
    out = tmp_path / "out"
    assert _run("cd", "--nodes", nodes, "--edges", edges, "--out", out) == 0
    assert _run("normalize", "--nodes", nodes, "--edges", edges, "--out", out) == 0
    assert _run("report", "--out", out) == 0
    cols = read_columns(out / "report.tsv")
    for metric, year, n in zip(cols["metric"], cols["year"], cols["n"]):
        if metric == "cd_value" and year == 1950:
            assert n == 1  # A alone, counted once despite two source files
