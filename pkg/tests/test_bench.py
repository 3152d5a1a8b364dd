import json

import numpy as np
import pytest

from jqpie.bench import (SweepConfig, aggregate_histogram, emit_report, ingest_dataset,
                         main, rows_to_csv, run_sweep, summarize)
from jqpie.imagio import GrayscaleImage, write_pgm
from jqpie.jpegcore import sparsity_stats

from conftest import gradient_image, random_image


def make_dataset(tmp_path, rng, names=("a.pgm", "b.pgm", "c.pgm"), size=16):
    directory = tmp_path / "data"
    directory.mkdir()
    for name in names:
        write_pgm(random_image(rng, size, size), directory / name)
    return directory


def test_ingest_orders_lexicographically(tmp_path, rng):
    directory = make_dataset(tmp_path, rng, names=("c.pgm", "a.pgm", "b.pgm"))
    labels = [label for label, _ in ingest_dataset(directory)]
    assert labels == ["a.pgm", "b.pgm", "c.pgm"]


def test_ingest_skips_non_images(tmp_path, rng, caplog):
    directory = make_dataset(tmp_path, rng)
    (directory / "junk.txt").write_text("not an image")
    (directory / "broken.pgm").write_bytes(b"P5\n9 9\n255\nxx")
    with caplog.at_level("WARNING"):
        images = ingest_dataset(directory)
    assert len(images) == 3
    assert sum("skipping" in r.message for r in caplog.records) == 2


def test_ingest_empty_directory_errors(tmp_path):
    empty = tmp_path / "void"
    empty.mkdir()
    with pytest.raises(ValueError):
        ingest_dataset(empty)


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(inputs=("x",), r_set=())
    with pytest.raises(ValueError):
        SweepConfig(inputs=("x",), scale=0.0)
    with pytest.raises(ValueError):
        SweepConfig(inputs=("x",), methods=("warp",))


def test_sweep_rows_schema_and_values(tmp_path, rng):
    directory = make_dataset(tmp_path, rng, names=("one.pgm",))
    cfg = SweepConfig(inputs=(str(directory),), methods=("jqpie", "qf_jqpie"),
                      r_set=(5, 6))
    rows = run_sweep(cfg)
    assert len(rows) == 4   # 1 image x 2 methods x 2 levels
    combos = {(r["method"], r["r"]) for r in rows}
    assert combos == {("jqpie", 5), ("jqpie", 6), ("qf_jqpie", 5), ("qf_jqpie", 6)}
    by_key = {(r["method"], r["r"]): r for r in rows}
    # quantized pipeline at r=6 reproduces the baseline decode exactly
    assert abs(by_key[("jqpie", 6)]["delta_psnr"]) <= 1e-6
    assert by_key[("qf_jqpie", 6)]["success_prob"] == 1.0
    assert by_key[("jqpie", 5)]["cx_reduction_pct"] == 50.0
    assert by_key[("jqpie", 4) if ("jqpie", 4) in by_key else ("jqpie", 5)]
    for row in rows:
        assert row["error"] == ""
        assert np.isfinite(row["delta_psnr"])


def test_sweep_reduction_percentages(tmp_path, rng):
    directory = make_dataset(tmp_path, rng, names=("one.pgm",))
    cfg = SweepConfig(inputs=(str(directory),), methods=("qf_jqpie",), r_set=(2, 4, 5))
    by_r = {row["r"]: row for row in run_sweep(cfg)}
    assert by_r[5]["cx_reduction_pct"] == 50.0
    assert by_r[4]["cx_reduction_pct"] == 75.0
    assert by_r[2]["cx_reduction_pct"] == 93.75


def test_sweep_records_error_rows(tmp_path):
    directory = tmp_path / "data"
    directory.mkdir()
    write_pgm(GrayscaleImage(np.full((8, 8), 1.0)), directory / "flat.pgm")
    cfg = SweepConfig(inputs=(str(directory),), methods=("jqpie",), r_set=(2,),
                      scale=100.0)   # quantizes everything to zero
    rows = run_sweep(cfg)
    assert len(rows) == 1
    assert "zero" in rows[0]["error"]


def test_sweep_deterministic_csv(tmp_path, rng):
    directory = make_dataset(tmp_path, rng)
    cfg = SweepConfig(inputs=(str(directory),), methods=("qf_jqpie",), r_set=(4, 6))
    first = rows_to_csv(run_sweep(cfg))
    second = rows_to_csv(run_sweep(cfg))
    assert first == second
    header = first.splitlines()[0].split(",")
    assert header[:4] == ["image", "method", "r", "S"]


def test_sweep_parallel_matches_serial(tmp_path, rng):
    directory = make_dataset(tmp_path, rng)
    serial = SweepConfig(inputs=(str(directory),), methods=("qf_jqpie",), r_set=(5,))
    parallel = SweepConfig(inputs=(str(directory),), methods=("qf_jqpie",), r_set=(5,),
                           jobs=2)
    assert rows_to_csv(run_sweep(serial)) == rows_to_csv(run_sweep(parallel))


def test_emit_report_files(tmp_path, rng):
    directory = make_dataset(tmp_path, rng, names=("p.pgm", "q.pgm"))
    cfg = SweepConfig(inputs=(str(directory),), methods=("qf_jqpie",), r_set=(6,))
    images = ingest_dataset(directory)
    rows = run_sweep(cfg)
    summary = summarize(rows, images, cfg.scale)
    histogram = aggregate_histogram(images, cfg.scale)
    written = emit_report(rows, summary, histogram, tmp_path / "out" / "report")
    csv_text = written[0].read_text()
    assert len(csv_text.splitlines()) == 1 + len(rows)
    payload = json.loads(written[1].read_text())
    assert payload["tolerance"]["qf_jqpie,r=6"]["within_psnr_tolerance"] == 1.0
    assert payload["error_rows"] == 0
    hist_lines = written[2].read_text().splitlines()
    assert len(hist_lines) == 1 + 64


def test_emit_report_requires_rows(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], {}, None, tmp_path / "x")


def test_histogram_matches_sparsity_convention(tmp_path, rng):
    img = random_image(rng, 16, 16)
    hist = aggregate_histogram([("i", img)], 1.0)
    stats = sparsity_stats(img, 1.0)
    assert np.allclose(hist, stats.histogram)
    assert np.sum(hist) == pytest.approx(stats.nonzero_count / stats.block_count)


def test_summary_cr_ranges_by_category(tmp_path, rng):
    root = tmp_path / "set"
    (root / "textures").mkdir(parents=True)
    (root / "aerials").mkdir()
    write_pgm(random_image(rng, 16, 16), root / "textures" / "t.pgm")
    write_pgm(gradient_image(16, 16), root / "aerials" / "a.pgm")
    images = ingest_dataset(root)
    summary = summarize([], images, 1.0)
    assert set(summary["compression_ratio"]) == {"textures", "aerials"}
    for entry in summary["compression_ratio"].values():
        assert entry["min"] <= entry["max"]


# --- CLI ------------------------------------------------------------------------

def test_cli_stats(tmp_path, rng, capsys):
    directory = make_dataset(tmp_path, rng, names=("z.pgm",))
    assert main(["stats", str(directory)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "z.pgm" in payload
    assert payload["z.pgm"]["compression_ratio"] > 1.0


def test_cli_simulate_writes_outputs(tmp_path, rng):
    img_path = tmp_path / "img.pgm"
    write_pgm(random_image(rng, 16, 16), img_path)
    out_base = tmp_path / "result"
    code = main(["simulate", str(img_path), "--method", "jqpie", "--r", "4",
                 "--out", str(out_base)])
    assert code == 0
    payload = json.loads(out_base.with_suffix(".json").read_text())
    assert 0 < payload["success_probability"] <= 1
    assert payload["quality"]["psnr"] > 0
    assert out_base.with_suffix(".pgm").exists()


def test_cli_sweep_and_exit_codes(tmp_path, rng):
    directory = make_dataset(tmp_path, rng, names=("ok.pgm",))
    out = tmp_path / "sweep" / "rows"
    code = main(["sweep", str(directory), "--method", "qf_jqpie", "--r", "5",
                 "--r", "6", "--out", str(out)])
    assert code == 0
    assert out.with_suffix(".csv").exists()
    # an all-flat image at huge scale yields error rows -> nonzero exit
    bad_dir = tmp_path / "bad"
    bad_dir.mkdir()
    write_pgm(GrayscaleImage(np.full((8, 8), 1.0)), bad_dir / "flat.pgm")
    out2 = tmp_path / "sweep" / "rows2"
    code2 = main(["sweep", str(bad_dir), "--method", "jqpie", "--r", "2",
                  "--scale", "100", "--out", str(out2)])
    assert code2 == 1
    code3 = main(["sweep", str(bad_dir), "--method", "jqpie", "--r", "2",
                  "--scale", "100", "--out", str(out2), "--keep-going"])
    assert code3 == 0


def test_cli_resources(tmp_path, capsys):
    assert main(["resources", "--height", "256", "--width", "256",
                 "--method", "jqpie"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["r=5"]["state_prep_cx_reduction_pct"] == pytest.approx(50.0, abs=0.1)
    assert payload["r=4"]["state_prep_cx_reduction_pct"] == pytest.approx(75.0, abs=0.1)
    assert main(["resources", "--height", "100", "--width", "256"]) == 2


def test_cli_export_circuit_roundtrips(tmp_path, rng):
    from jqpie.qcircuit import parse_qasm
    img_path = tmp_path / "img.pgm"
    write_pgm(random_image(rng, 8, 8), img_path)
    out = tmp_path / "circuit.qasm"
    code = main(["export-circuit", str(img_path), "--method", "qf_jqpie",
                 "--r", "3", "--out", str(out)])
    assert code == 0
    circuit = parse_qasm(out.read_text())
    assert circuit.n_qubits == 6
    assert len(circuit.gates) > 0


def test_cli_error_reporting(tmp_path, capsys):
    assert main(["stats", str(tmp_path / "missing-dir")]) == 2
    assert "error" in capsys.readouterr().err
