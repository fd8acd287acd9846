import csv
import json
import os

import pytest

from citeclass.cli import main


def run(args):
    return main(args)


@pytest.fixture()
def pipeline_dir(tmp_path):
    """syngen + ingest + both classify runs in a temp directory."""
    syn = tmp_path / "syn"
    out = tmp_path / "out"
    assert run(["syngen", "--out", str(syn), "--n-docs", "400",
                "--n-journals", "40", "--seed", "42"]) == 0
    assert run(["ingest", "--scheme", str(syn / "scheme.csv"),
                "--journals", str(syn / "journals.jsonl"),
                "--documents", str(syn / "documents.jsonl"),
                "--out", str(out)]) == 0
    assert run(["classify", "--system", "asjc-frac", "--out", str(out)]) == 0
    assert run(["classify", "--system", "u1f08", "--out", str(out)]) == 0
    return out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_syngen_writes_corpus_files(tmp_path):
    out = tmp_path / "syn"
    assert run(["syngen", "--out", str(out), "--n-docs", "50",
                "--n-journals", "10", "--seed", "1"]) == 0
    assert (out / "scheme.csv").exists()
    assert (out / "journals.jsonl").exists()
    assert (out / "documents.jsonl").exists()


def test_ingest_writes_canonical_corpus(pipeline_dir):
    out = pipeline_dir
    assert (out / "corpus" / "scheme.csv").exists()
    assert (out / "corpus" / "journals.jsonl").exists()
    assert (out / "corpus" / "documents.jsonl").exists()
    stats = json.loads((out / "corpus_stats.json").read_text())
    assert stats["n_documents"] == 400
    report = json.loads((out / "validation_report.json").read_text())
    assert report["status"] == "ok"


def test_ingest_missing_input_exits_2(tmp_path):
    rc = run(["ingest", "--scheme", str(tmp_path / "nope.csv"),
              "--journals", str(tmp_path / "j.jsonl"),
              "--documents", str(tmp_path / "d.jsonl"),
              "--out", str(tmp_path / "out")])
    assert rc == 2


def test_ingest_invalid_corpus_exits_1(tmp_path):
    scheme = tmp_path / "scheme.csv"
    scheme.write_text(
        "code,name,area_code,area_name,is_misc,is_multidisciplinary\n"
        "PH01,Mechanics,PH,Physics,false,false\n"
    )
    (tmp_path / "j.jsonl").write_text('{"journal_id":"J1","asjc_codes":["PH01"]}\n')
    (tmp_path / "d.jsonl").write_text(
        '{"doc_id":"D1","journal_id":"NOPE","year":2015,"doc_type":"article","references":[]}\n'
    )
    out = tmp_path / "out"
    rc = run(["ingest", "--scheme", str(scheme), "--journals", str(tmp_path / "j.jsonl"),
              "--documents", str(tmp_path / "d.jsonl"), "--out", str(out)])
    assert rc == 1
    report = json.loads((out / "validation_report.json").read_text())
    assert report["status"] == "invalid"
    assert report["errors"]


def test_classify_requires_ingest(tmp_path):
    rc = run(["classify", "--system", "asjc-frac", "--out", str(tmp_path / "fresh")])
    assert rc == 1


def test_u1_requires_asjc_first(pipeline_dir, tmp_path):
    # removing the journal-based assignments breaks the citer-origin run
    out = pipeline_dir
    os.remove(out / "assignments_asjc-frac.jsonl")
    assert run(["classify", "--system", "u1f08", "--out", str(out)]) == 1


def test_unknown_system_exits_2(pipeline_dir):
    assert run(["classify", "--system", "wat", "--out", str(pipeline_dir)]) == 2


def test_assignment_files_sorted_and_normalized(pipeline_dir):
    out = pipeline_dir
    prev = None
    with open(out / "assignments_u1-f-0.8.jsonl") as fh:
        for line in fh:
            rec = json.loads(line)
            assert rec["system"] == "U1-F-0.8"
            assert abs(sum(rec["weights"].values()) - 1.0) <= 1e-9
            if prev is not None:
                assert rec["doc_id"] > prev
            prev = rec["doc_id"]


def test_compare_outputs(pipeline_dir):
    out = pipeline_dir
    assert run(["compare", "--out", str(out)]) == 0
    for name in (
        "flows_category.csv", "flows_area.csv",
        "class_stats_category.csv", "class_stats_area.csv",
        "fig1_low_reference_share.csv", "fig2_area_common_unique.csv",
        "fig4_area_exchange_pct.csv", "fig5_area_single_assignment.csv",
        "fig6_category_size_histogram.csv",
        "table1_top_links_area.csv", "table2_flow_summary_category.csv",
        "table3_top_links_category.csv", "table4_weight_summary_category.csv",
    ):
        assert (out / name).exists(), name
    rows = read_csv(out / "table2_flow_summary_category.csv")
    assert rows[0] == ["metric", "n", "mean", "std", "cv_pct"]
    metrics = [r[0] for r in rows[1:]]
    assert metrics == ["size_asjc_frac", "size_u1_f08", "incoming", "outgoing",
                       "pct_incoming", "pct_outgoing"]
    # equal mean incoming and outgoing
    by_name = {r[0]: r for r in rows[1:]}
    assert by_name["incoming"][2] == by_name["outgoing"][2]


def test_compare_missing_assignments_exits_1(pipeline_dir):
    out = pipeline_dir
    os.remove(out / "assignments_u1-f-0.8.jsonl")
    assert run(["compare", "--out", str(out)]) == 1


def test_indicators_outputs(pipeline_dir):
    out = pipeline_dir
    assert run(["indicators", "--out", str(out)]) == 0
    for name in (
        "indicators.csv", "baselines_asjc-frac.csv", "baselines_u1-f-0.8.csv",
        "ni_diagnostics.json", "fig7_ni_diff_by_year.csv", "fig8_ni_std_by_area.csv",
        "fig9_excellence_overlap_p10.csv", "fig10_excellence_overlap_p01.csv",
    ):
        assert (out / name).exists(), name
    rows = read_csv(out / "indicators.csv")
    assert rows[0] == ["doc_id", "system", "ni", "exc10", "exc1"]
    # two rows per document, grouped
    assert len(rows) - 1 == 2 * 400
    assert rows[1][1] == "ASJC-FRAC" and rows[2][1] == "U1-F-0.8"
    assert rows[1][0] == rows[2][0]


def test_network_outputs_and_formats(pipeline_dir):
    out = pipeline_dir
    assert run(["compare", "--out", str(out)]) == 0
    assert run(["network", "--out", str(out), "--level", "area"]) == 0
    data = json.loads((out / "fig3_network.json").read_text())
    assert set(data) == {"nodes", "edges"}
    for node in data["nodes"]:
        assert {"id", "size", "community", "x", "y"} <= set(node)
    assert run(["network", "--out", str(out), "--level", "area",
                "--format", "graphml"]) == 0
    assert (out / "fig3_network.graphml").exists()


def test_network_requires_compare(pipeline_dir):
    assert run(["network", "--out", str(pipeline_dir), "--level", "area"]) == 1


def test_network_bad_format_exits_2(pipeline_dir):
    out = pipeline_dir
    run(["compare", "--out", str(out)])
    assert run(["network", "--out", str(out), "--format", "bogus"]) == 2


def test_report_summarizes(pipeline_dir):
    out = pipeline_dir
    assert run(["report", "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["n_documents"] == 400
    assert rep["low_reference_share"]


def test_manifest_covers_all_artifacts(pipeline_dir):
    out = pipeline_dir
    run(["compare", "--out", str(out)])
    run(["indicators", "--out", str(out)])
    run(["network", "--out", str(out), "--level", "area"])
    manifest = json.loads((out / "manifest.json").read_text())
    expected = {f"figure_{i}" for i in range(1, 11)} | {f"table_{i}" for i in range(1, 5)}
    assert set(manifest) == expected
    for name in manifest.values():
        assert (out / name).exists(), name


def test_config_file_sets_defaults(tmp_path):
    syn = tmp_path / "syn"
    cfgp = tmp_path / "run.cfg"
    cfgp.write_text("n_docs = 60\nn_journals = 12\nseed = 5\n")
    assert run(["syngen", "--config", str(cfgp), "--out", str(syn)]) == 0
    n = sum(1 for _ in open(syn / "documents.jsonl"))
    assert n == 60


def test_cli_flag_overrides_config(tmp_path):
    syn = tmp_path / "syn"
    cfgp = tmp_path / "run.cfg"
    cfgp.write_text("n_docs = 60\n")
    assert run(["syngen", "--config", str(cfgp), "--out", str(syn),
                "--n-docs", "25", "--n-journals", "8", "--seed", "5"]) == 0
    n = sum(1 for _ in open(syn / "documents.jsonl"))
    assert n == 25


def test_unknown_config_key_exits_2(tmp_path):
    cfgp = tmp_path / "run.cfg"
    cfgp.write_text("does_not_exist = 1\n")
    assert run(["syngen", "--config", str(cfgp), "--out", str(tmp_path / "x")]) == 2


def test_malformed_config_exits_2(tmp_path):
    cfgp = tmp_path / "run.cfg"
    cfgp.write_text("just some text without equals\n")
    assert run(["syngen", "--config", str(cfgp), "--out", str(tmp_path / "x")]) == 2


def test_global_flags_accepted_before_subcommand(tmp_path):
    syn = tmp_path / "syn"
    assert run(["--out", str(syn), "--seed", "3", "syngen",
                "--n-docs", "30", "--n-journals", "8"]) == 0
    assert (syn / "documents.jsonl").exists()


def test_pipeline_rerun_is_byte_identical(tmp_path):
    syn = tmp_path / "syn"
    run(["syngen", "--out", str(syn), "--n-docs", "150", "--n-journals", "20",
         "--seed", "17"])
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        run(["ingest", "--scheme", str(syn / "scheme.csv"),
             "--journals", str(syn / "journals.jsonl"),
             "--documents", str(syn / "documents.jsonl"), "--out", str(out)])
        run(["classify", "--system", "asjc-frac", "--out", str(out)])
        run(["classify", "--system", "u1f08", "--out", str(out)])
        run(["compare", "--out", str(out)])
        run(["indicators", "--out", str(out)])
        run(["network", "--out", str(out), "--level", "area"])
        run(["report", "--out", str(out)])
        outs.append(out)
    r1, r2 = outs
    names1 = sorted(p.relative_to(r1) for p in r1.rglob("*") if p.is_file())
    names2 = sorted(p.relative_to(r2) for p in r2.rglob("*") if p.is_file())
    assert names1 == names2
    for rel in names1:
        assert (r1 / rel).read_bytes() == (r2 / rel).read_bytes(), rel
