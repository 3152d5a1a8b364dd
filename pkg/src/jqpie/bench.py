"""Experiment harness and command-line interface.

Subcommands:

  stats           compression ratio and zigzag occupancy histogram
  simulate        run one image through one pipeline, report JSON (+PGM)
  sweep           (image x method x r) grid -> CSV rows + JSON summary
  resources       closed-form resource table for a register configuration
  export-circuit  fully lowered pipeline circuit as OpenQASM 3

Sweep outputs are deterministic: images are processed in lexicographic
order, CSV floats are fixed at six decimals, and rows are merged in input
order even when a worker pool is used. A failing (image, method, r)
combination becomes an error row and the run continues; the exit status
reports whether any error rows were produced unless --keep-going downgrades
them.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics
from .imagio import GrayscaleImage, ImageFormatError, load_image, pad_to_pow2, write_pgm
from .jpegcore import classical_reference_decode, sparsity_stats
from .pipeline import run_jqpie, run_qf_jqpie, run_qpie_direct
from .qcircuit import export_qasm
from .synth import DATA_QUBITS, closed_form_resources

log = logging.getLogger("jqpie.bench")

METHODS = ("jqpie", "qf_jqpie")

CSV_COLUMNS = ("image", "method", "r", "S", "psnr", "ssim", "delta_psnr",
               "delta_ssim", "success_prob", "cx_total", "depth_total",
               "cx_reduction_pct", "error")

#: Quality tolerances relative to the classical baseline.
PSNR_TOLERANCE_DB = -0.5
SSIM_TOLERANCE = -0.01

_IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm", ".png")


@dataclass(frozen=True)
class SweepConfig:
    inputs: tuple[str, ...]
    methods: tuple[str, ...] = METHODS
    r_set: tuple[int, ...] = (2, 3, 4, 5, 6)
    scale: float = 1.0
    norm_mode: str = "global"
    backend: str = "operator"
    ssim_mode: str = "global"
    jobs: int = 1
    allow_png: bool = False

    def __post_init__(self):
        if not self.r_set:
            raise ValueError("r_set must be non-empty")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods: {bad}")


def ingest_dataset(directory, allow_png: bool = False) -> list[tuple[str, GrayscaleImage]]:
    """Load every readable image under a directory, lexicographically.

    Labels are paths relative to the directory. Unreadable or non-image
    files are skipped with a warning; an empty result is an error.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"not a directory: {directory}")
    images = []
    skipped = 0
    for path in sorted(p for p in directory.rglob("*") if p.is_file()):
        if path.suffix.lower() not in _IMAGE_SUFFIXES:
            skipped += 1
            log.warning("skipping non-image file %s", path)
            continue
        try:
            images.append((str(path.relative_to(directory)), load_image(path, allow_png)))
        except ImageFormatError as exc:
            skipped += 1
            log.warning("skipping %s: %s", path, exc)
    if not images:
        raise ValueError(f"no readable images in {directory}")
    if skipped:
        log.info("ingested %d images, skipped %d files", len(images), skipped)
    return images


def _collect_inputs(cfg: SweepConfig) -> list[tuple[str, GrayscaleImage]]:
    images = []
    for entry in cfg.inputs:
        path = Path(entry)
        if path.is_dir():
            images.extend(ingest_dataset(path, cfg.allow_png))
        else:
            images.append((path.name, load_image(path, cfg.allow_png)))
    return images


def _fmt(value: float) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6f}"


def _model_reduction_pct(r: int) -> float:
    """State-prep cost reduction implied by the truncation level alone."""
    return 100.0 * (1.0 - 2.0 ** -(DATA_QUBITS - r))


def _sweep_one_image(args) -> list[dict]:
    label, img, cfg = args
    rows = []
    try:
        baseline = classical_reference_decode(img, "jpeg", scale=cfg.scale)
        baseline_id = f"jpeg S={cfg.scale:g}"
    except Exception as exc:   # degenerate image: every combination errors
        for method in cfg.methods:
            for r in cfg.r_set:
                rows.append({"image": label, "method": method, "r": r,
                             "S": cfg.scale, "error": f"baseline failed: {exc}"})
        return rows
    for method in cfg.methods:
        for r in sorted(cfg.r_set):
            row = {"image": label, "method": method, "r": r, "S": cfg.scale, "error": ""}
            try:
                if method == "jqpie":
                    result = run_jqpie(img, r, scale=cfg.scale, backend=cfg.backend,
                                       norm_mode=cfg.norm_mode)
                else:
                    result = run_qf_jqpie(img, r, backend=cfg.backend,
                                          norm_mode=cfg.norm_mode)
                report = metrics.quality_report(img, result.reconstructed, baseline,
                                                baseline_id, ssim_mode=cfg.ssim_mode)
                row.update({
                    "psnr": report.psnr,
                    "ssim": report.ssim,
                    "delta_psnr": report.delta_psnr,
                    "delta_ssim": report.delta_ssim,
                    "success_prob": result.success_probability,
                    "cx_total": result.resources.cx_count,
                    "depth_total": result.resources.depth,
                    "cx_reduction_pct": _model_reduction_pct(r),
                })
            except Exception as exc:
                row["error"] = str(exc)
            rows.append(row)
    return rows


def run_sweep(cfg: SweepConfig) -> list[dict]:
    """One row per (image, method, r); failures become error rows."""
    images = _collect_inputs(cfg)
    tasks = [(label, img, cfg) for label, img in images]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            per_image = list(pool.map(_sweep_one_image, tasks))
    else:
        per_image = [_sweep_one_image(t) for t in tasks]
    return [row for rows in per_image for row in rows]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row["image"], row["method"], row["r"], f"{row['S']:g}",
            _fmt(row.get("psnr")), _fmt(row.get("ssim")),
            _fmt(row.get("delta_psnr")), _fmt(row.get("delta_ssim")),
            _fmt(row.get("success_prob")),
            row.get("cx_total", ""), row.get("depth_total", ""),
            _fmt(row.get("cx_reduction_pct")), row["error"],
        ])
    return buf.getvalue()


def _category_of(label: str) -> str:
    parts = Path(label).parts
    return parts[0] if len(parts) > 1 else "root"


def summarize(rows: list[dict], images: list[tuple[str, GrayscaleImage]],
              scale: float) -> dict:
    """JSON summary: per-category compression-ratio ranges and the fraction
    of images within the quality tolerances for each (method, r)."""
    cr_by_category: dict[str, list[float]] = {}
    for label, img in images:
        try:
            stats = sparsity_stats(img, scale)
        except ValueError:
            continue
        cr_by_category.setdefault(_category_of(label), []).append(stats.compression_ratio)
    summary = {
        "compression_ratio": {
            cat: {"min": min(v), "max": max(v), "count": len(v)}
            for cat, v in sorted(cr_by_category.items())
        },
        "tolerance": {},
        "error_rows": sum(1 for r in rows if r["error"]),
        "total_rows": len(rows),
    }
    combos: dict[tuple[str, int], list[dict]] = {}
    for row in rows:
        if not row["error"]:
            combos.setdefault((row["method"], row["r"]), []).append(row)
    for (method, r), group in sorted(combos.items()):
        ok_psnr = sum(1 for g in group if g["delta_psnr"] >= PSNR_TOLERANCE_DB)
        ok_ssim = sum(1 for g in group if g["delta_ssim"] >= SSIM_TOLERANCE)
        summary["tolerance"][f"{method},r={r}"] = {
            "count": len(group),
            "within_psnr_tolerance": ok_psnr / len(group),
            "within_ssim_tolerance": ok_ssim / len(group),
        }
    return summary


def emit_report(rows: list[dict], summary: dict, histogram: np.ndarray | None,
                out_base) -> list[Path]:
    """Write CSV rows, JSON summary, and optional histogram data."""
    if not rows:
        raise ValueError("no rows to report")
    out_base = Path(out_base)
    out_base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = out_base.with_suffix(".csv")
    csv_path.write_text(rows_to_csv(rows))
    written.append(csv_path)
    json_path = out_base.with_suffix(".json")
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(json_path)
    if histogram is not None:
        hist_path = out_base.parent / (out_base.name + "_histogram.csv")
        lines = ["zigzag_index,nonzero_fraction"]
        lines += [f"{k},{v:.6f}" for k, v in enumerate(histogram)]
        hist_path.write_text("\n".join(lines) + "\n")
        written.append(hist_path)
    return written


def aggregate_histogram(images: list[tuple[str, GrayscaleImage]], scale: float) -> np.ndarray:
    """Block-weighted zigzag occupancy aggregated over a set of images."""
    total = np.zeros(64)
    blocks = 0
    for _, img in images:
        try:
            stats = sparsity_stats(img, scale)
        except ValueError:
            continue
        total += stats.histogram * stats.block_count
        blocks += stats.block_count
    if blocks == 0:
        raise ValueError("no nonzero coefficients anywhere in the dataset")
    return total / blocks


# --- CLI -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jqpie",
        description="Hybrid classical-quantum image preparation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scale", "-S", type=float, default=1.0,
                       help="quantization scale S (default 1)")
        p.add_argument("--png", action="store_true", help="enable PNG ingestion")

    p_stats = sub.add_parser("stats", help="compression ratio and zigzag histogram")
    p_stats.add_argument("input", help="image file or dataset directory")
    p_stats.add_argument("--out", help="output base path (writes <out>.json and histogram)")
    add_common(p_stats)

    p_sim = sub.add_parser("simulate", help="run one image through one pipeline")
    p_sim.add_argument("input", help="image file")
    p_sim.add_argument("--method", choices=METHODS + ("qpie",), default="qf_jqpie")
    p_sim.add_argument("--r", type=int, default=5, help="truncation level (2..6)")
    p_sim.add_argument("--backend", choices=("operator", "gate_exact"), default="operator")
    p_sim.add_argument("--norm-mode", choices=("global", "per_block"), default="global")
    p_sim.add_argument("--out", help="base path for JSON report and PGM reconstruction")
    add_common(p_sim)

    p_sweep = sub.add_parser("sweep", help="parameter sweep over (image, method, r)")
    p_sweep.add_argument("inputs", nargs="+", help="image files or directories")
    p_sweep.add_argument("--method", action="append", choices=METHODS, dest="methods",
                         help="restrict to a method (repeatable; default both)")
    p_sweep.add_argument("--r", type=int, action="append", dest="r_set",
                         help="truncation level (repeatable; default 2..6)")
    p_sweep.add_argument("--backend", choices=("operator", "gate_exact"), default="operator")
    p_sweep.add_argument("--norm-mode", choices=("global", "per_block"), default="global")
    p_sweep.add_argument("--ssim-mode", choices=("global", "windowed"), default="global")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel image workers")
    p_sweep.add_argument("--out", required=True, help="output base path")
    p_sweep.add_argument("--keep-going", action="store_true",
                         help="exit 0 even if some rows are error rows")
    add_common(p_sweep)

    p_res = sub.add_parser("resources", help="closed-form resource table")
    p_res.add_argument("--height", type=int, default=256, help="padded image height")
    p_res.add_argument("--width", type=int, default=256, help="padded image width")
    p_res.add_argument("--method", choices=METHODS + ("qpie",), default="jqpie")
    p_res.add_argument("--out", help="write the table as JSON instead of stdout")

    p_exp = sub.add_parser("export-circuit", help="emit a lowered pipeline circuit as QASM")
    p_exp.add_argument("input", help="image file")
    p_exp.add_argument("--method", choices=METHODS, default="qf_jqpie")
    p_exp.add_argument("--r", type=int, default=5)
    p_exp.add_argument("--out", required=True, help="QASM output path")
    add_common(p_exp)

    return parser


def _cmd_stats(args) -> int:
    path = Path(args.input)
    if path.is_dir():
        images = ingest_dataset(path, args.png)
    else:
        images = [(path.name, load_image(path, args.png))]
    payload = {}
    for label, img in images:
        stats = sparsity_stats(img, args.scale)
        payload[label] = {
            "nonzero_coefficients": stats.nonzero_count,
            "pixel_count": stats.pixel_count,
            "compression_ratio": stats.compression_ratio,
        }
    histogram = aggregate_histogram(images, args.scale)
    if args.out:
        out_base = Path(args.out)
        out_base.parent.mkdir(parents=True, exist_ok=True)
        out_base.with_suffix(".json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        lines = ["zigzag_index,nonzero_fraction"]
        lines += [f"{k},{v:.6f}" for k, v in enumerate(histogram)]
        (out_base.parent / (out_base.name + "_histogram.csv")).write_text("\n".join(lines) + "\n")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_simulate(args) -> int:
    img = load_image(args.input, args.png)
    if args.method == "jqpie":
        result = run_jqpie(img, args.r, scale=args.scale, backend=args.backend,
                           norm_mode=args.norm_mode)
    elif args.method == "qf_jqpie":
        result = run_qf_jqpie(img, args.r, backend=args.backend, norm_mode=args.norm_mode)
    else:
        result = run_qpie_direct(pad_to_pow2(img), backend=args.backend)
    baseline = classical_reference_decode(img, "jpeg", scale=args.scale)
    report = metrics.quality_report(img, result.reconstructed, baseline,
                                    f"jpeg S={args.scale:g}")
    payload = result.to_json()
    payload["quality"] = report.to_json()
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        out_base = Path(args.out)
        out_base.parent.mkdir(parents=True, exist_ok=True)
        out_base.with_suffix(".json").write_text(text + "\n")
        write_pgm(result.reconstructed, out_base.with_suffix(".pgm"))
    else:
        print(text)
    return 0


def _cmd_sweep(args) -> int:
    cfg = SweepConfig(
        inputs=tuple(args.inputs),
        methods=tuple(args.methods) if args.methods else METHODS,
        r_set=tuple(sorted(set(args.r_set))) if args.r_set else (2, 3, 4, 5, 6),
        scale=args.scale,
        norm_mode=args.norm_mode,
        backend=args.backend,
        ssim_mode=args.ssim_mode,
        jobs=args.jobs,
        allow_png=args.png,
    )
    images = _collect_inputs(cfg)
    rows = run_sweep(cfg)
    summary = summarize(rows, images, cfg.scale)
    try:
        histogram = aggregate_histogram(images, cfg.scale)
    except ValueError:
        histogram = None   # every image degenerate: rows still carry the errors
    written = emit_report(rows, summary, histogram, args.out)
    for path in written:
        log.info("wrote %s", path)
    errors = summary["error_rows"]
    if errors:
        print(f"{errors} error row(s); see {written[0]}", file=sys.stderr)
        return 0 if args.keep_going else 1
    return 0


def _cmd_resources(args) -> int:
    h = int(math.log2(args.height))
    w = int(math.log2(args.width))
    if 2 ** h != args.height or 2 ** w != args.width:
        print("height and width must be powers of two", file=sys.stderr)
        return 2
    table = {}
    for r in (2, 3, 4, 5, 6):
        report = closed_form_resources(h, w, r, method=args.method)
        entry = report.to_json()
        baseline = closed_form_resources(h, w, 6, method=args.method)
        prep = report.breakdown["state_prep"].cx
        prep6 = baseline.breakdown["state_prep"].cx
        entry["state_prep_cx_reduction_pct"] = 100.0 * (1.0 - prep / prep6)
        table[f"r={r}"] = entry
    text = json.dumps(table, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_export_circuit(args) -> int:
    from .pipeline import _decompression_circuit, _normalize_rows, _prepare_state
    from .imagio import pad_and_partition
    from .jpegcore import QuantTable, truncate_zigzag, zigzag_coefficients
    from .qcircuit import compose

    img = load_image(args.input, args.png)
    padded = pad_to_pow2(img)
    h = int(math.log2(padded.height))
    w = int(math.log2(padded.width))
    grid = pad_and_partition(padded)
    table = QuantTable(args.scale) if args.method == "jqpie" else None
    zz = truncate_zigzag(zigzag_coefficients(grid, table=table), args.r)
    amp_matrix, _, _ = _normalize_rows(zz, "global")
    _, prep = _prepare_state(amp_matrix, h, w, args.r,
                             ancilla=table is not None,
                             backend="gate_exact", direct_load=False)
    circuit = compose(prep, _decompression_circuit(h, w, args.r, table, "gate_exact"))
    Path(args.out).write_text(export_qasm(circuit))
    print(f"wrote {args.out}: {circuit.n_qubits} qubits, {len(circuit.gates)} gates")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    handlers = {
        "stats": _cmd_stats,
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "resources": _cmd_resources,
        "export-circuit": _cmd_export_circuit,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, ImageFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
