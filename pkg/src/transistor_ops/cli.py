"""Command-line surface for the analysis pipeline.

Subcommands mirror the pipeline stages: ``count`` (per-layer basic
operations), ``tos`` (transistor-operation lowering), ``ingest`` (power
traces to energy samples), ``fit`` (workload-to-energy regression),
``estimate`` (predict energies), ``sweep`` (width x activation familes),
``compare`` (scorecard against measurements) and ``tradeoff`` (energy
versus loss selection).

Every command is deterministic given its inputs; tables are CSV with a
header row. Numeric output uses 6 significant digits unless ``--raw``
asks for full precision. Exit codes: 0 success, 2 input or parse error,
3 unsupported configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

from .basic_ops import BasicOpCounts, UnsupportedError, count_model
from .circuits import (
    CostTable,
    DEFAULT_COST_TABLE,
    ToProfile,
    analyze,
    load_cost_table,
)
from .energy import (
    ColumnAdapter,
    DegenerateFitError,
    EnergySample,
    TraceError,
    error_metrics,
    fit,
    integrate_power,
    load_adapter,
    read_energy_samples,
    read_linear_model,
    read_power_trace,
    tradeoff_select,
    trimmed_mean,
    write_energy_samples,
    write_linear_model,
)
from .flops import flops_model
from .model import (
    Activation,
    AnalysisLevel,
    FLOAT_FORMATS,
    ModelSpec,
    ParseError,
    ValidationError,
    model_family,
    parse_model_file,
)
from .oracle import default_inputs, default_weights, run_training_step

COST_TABLE_ENV = "TOS_COST_TABLE"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3


def _fmt(value: float, raw: bool) -> str:
    return repr(float(value)) if raw else format(float(value), ".6g")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_model(path: str, fmt_key: str | None) -> ModelSpec:
    model = parse_model_file(path)
    if fmt_key:
        model = model.with_float_format(FLOAT_FORMATS[fmt_key])
    return model


def _load_table(path: str | None) -> CostTable:
    if path is None:
        path = os.environ.get(COST_TABLE_ENV) or None
    if path is None:
        return DEFAULT_COST_TABLE
    return load_cost_table(path)


def _parse_widths(text: str) -> list[int]:
    text = text.strip()
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            widths = list(range(lo, hi + 1))
        else:
            widths = [int(text)]
    except ValueError:
        raise ValueError(f"cannot parse width range {text!r}; "
                         f"expected 'a..b' or a single integer") from None
    if not widths:
        raise ValueError(f"width range {text!r} is empty")
    return widths


def _parse_activations(text: str) -> list[Activation]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise ValueError("activation list is empty")
    return [Activation(name) for name in names]


def _csv_table(rows: list[list[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerows(rows)
    return out.getvalue()


def _counts_row(counts: BasicOpCounts) -> list[str]:
    return [str(n) for n in counts.as_tuple()]


def cmd_count(args) -> int:
    model = _load_model(args.model, None)
    level = AnalysisLevel(args.level)
    report = count_model(model, level)
    rows = [["scope", "layer", "phase", "n_add", "n_sub", "n_mul", "n_div", "n_root"]]
    for index, profile in enumerate(report.layers, start=1):
        rows.append(["per_instance", str(index), "forward"] + _counts_row(profile.forward))
    if level.includes_backprop:
        for index, profile in enumerate(report.layers, start=1):
            rows.append(["per_instance", str(index), "backprop"] + _counts_row(profile.backprop))
        for index, profile in enumerate(report.layers, start=1):
            rows.append(["per_batch", str(index), "update"] + _counts_row(profile.update_per_batch))
    if level.includes_loss:
        rows.append(["per_instance", "all", "loss"] + _counts_row(report.loss))
    rows.append(["per_instance", "all", "total"] + _counts_row(report.per_instance))
    rows.append(["per_run", "all", "total"] + _counts_row(report.per_run))
    _emit(_csv_table(rows), args.out)
    return EXIT_OK


def cmd_tos(args) -> int:
    model = _load_model(args.model, args.format)
    level = AnalysisLevel(args.level)
    table = _load_table(args.cost_table)
    profile = analyze(model, level, table)
    raw = args.raw
    rows = [["scope", "quantity", "value"]]
    for index, value in enumerate(profile.layer_forward, start=1):
        rows.append(["per_instance", f"layer_{index}_forward", _fmt(value, raw)])
    if level.includes_backprop:
        for index, value in enumerate(profile.layer_backprop, start=1):
            rows.append(["per_instance", f"layer_{index}_backprop", _fmt(value, raw)])
    rows.append(["per_instance", "forward_total", _fmt(profile.per_instance.forward, raw)])
    rows.append(["per_instance", "backprop_total", _fmt(profile.per_instance.backprop, raw)])
    rows.append(["per_instance", "loss", _fmt(profile.per_instance.loss, raw)])
    rows.append(["per_instance", "total", _fmt(profile.per_instance.total, raw)])
    rows.append(["per_batch", "update", _fmt(profile.update_per_batch, raw)])
    for name, value in (("forward_total", profile.per_run.forward),
                        ("backprop_total", profile.per_run.backprop),
                        ("loss", profile.per_run.loss),
                        ("update_total", profile.per_run.update),
                        ("total", profile.per_run.total)):
        rows.append(["per_run", name, _fmt(value, raw)])
    rows.append(["per_step", "total", _fmt(profile.per_step.total, raw)])
    rows.append(["all", "nonlinear_share", _fmt(profile.nonlinear_share, raw)])
    _emit(_csv_table(rows), args.out)
    return EXIT_OK


def _trace_identity(path: str) -> tuple[str, str]:
    stem = Path(path).stem
    if "__" in stem:
        model_id, run_id = stem.split("__", 1)
        return model_id, run_id
    return stem, "run0"


def cmd_ingest(args) -> int:
    adapter: ColumnAdapter | None = None
    if args.adapter:
        adapter = load_adapter(args.adapter)
    samples = []
    for path in args.traces:
        model_id, run_id = _trace_identity(path)
        try:
            trace = read_power_trace(path, adapter)
        except TraceError as e:
            raise TraceError(f"{path}: {e}") from None
        samples.append(EnergySample(model_id, run_id, integrate_power(trace)))
    samples.sort(key=lambda s: (s.model_id, s.run_id))
    by_model: dict[str, list[float]] = {}
    for s in samples:
        by_model.setdefault(s.model_id, []).append(s.joules)
    aggregated = [
        EnergySample(model_id, "trimmed_mean", trimmed_mean(values, args.trim_k))
        for model_id, values in sorted(by_model.items())
    ]
    _emit(write_energy_samples(samples + aggregated), args.out)
    return EXIT_OK


def _read_fit_pairs(path: str) -> list[tuple[float, float]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["tos", "joules"]:
            raise ParseError(f"{path}: fit input must have header 'tos,joules'")
        pairs = []
        for row_index, row in enumerate(reader, start=2):
            try:
                pairs.append((float(row["tos"]), float(row["joules"])))
            except (TypeError, ValueError):
                raise ParseError(f"{path}: row {row_index}: cannot parse pair") from None
    return pairs


def cmd_fit(args) -> int:
    pairs = _read_fit_pairs(args.pairs)
    model = fit(pairs)
    _emit(write_linear_model(model), args.out)
    return EXIT_OK


def _scaled_tos(profile: ToProfile, scale: str) -> float:
    if scale == "instance":
        return profile.per_instance.total
    if scale == "step":
        return profile.per_step.total
    return profile.per_run.total


def cmd_estimate(args) -> int:
    with open(args.fitted, "r", encoding="utf-8") as fh:
        lr = read_linear_model(fh.read())
    level = AnalysisLevel(args.level)
    table = _load_table(args.cost_table)
    rows = [["model_id", "tos", "predicted_j"]]
    entries: list[tuple[str, float]] = []
    if args.tos_file:
        with open(args.tos_file, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["model_id", "tos"]:
                raise ParseError(f"{args.tos_file}: expected header 'model_id,tos'")
            for row_index, row in enumerate(reader, start=2):
                try:
                    entries.append((row["model_id"], float(row["tos"])))
                except (TypeError, ValueError):
                    raise ParseError(f"{args.tos_file}: row {row_index}: "
                                     f"cannot parse") from None
    if not entries and not args.models:
        raise ValueError("estimate needs model files or --tos-file")
    for path in args.models:
        model = _load_model(path, args.format)
        profile = analyze(model, level, table)
        entries.append((model.name, _scaled_tos(profile, args.scale)))
    for model_id, tos in entries:
        rows.append([model_id, _fmt(tos, args.raw), _fmt(lr.predict(tos), args.raw)])
    _emit(_csv_table(rows), args.out)
    return EXIT_OK


def _sweep_svg(points: dict[str, list[tuple[float, float]]]) -> str:
    """Minimal polyline rendering of workload versus width."""
    width, height, margin = 640, 400, 50
    xs = [x for series in points.values() for x, _ in series]
    ys = [y for series in points.values() for _, y in series]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(x: float) -> float:
        return margin + (x - x_lo) / x_span * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - y_lo) / y_span * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
    ]
    for i, (label, series) in enumerate(sorted(points.items())):
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in series)
        color = colors[i % len(colors)]
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{width - margin + 4}" '
                     f'y="{sy(series[-1][1]):.2f}" font-size="12" '
                     f'fill="{color}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_sweep(args) -> int:
    base = _load_model(args.base, args.format)
    widths = _parse_widths(args.widths)
    activations = _parse_activations(args.activations)
    level = AnalysisLevel(args.level)
    table = _load_table(args.cost_table)
    lr = None
    if args.fitted_model:
        with open(args.fitted_model, "r", encoding="utf-8") as fh:
            lr = read_linear_model(fh.read())
    family = model_family(base, widths, activations)
    rows = [["width", "activation", "tos", "macs", "flops", "predicted_j"]]
    svg_points: dict[str, list[tuple[float, float]]] = {}
    index = 0
    for width in widths:
        for act in activations:
            member = family[index]
            index += 1
            profile = analyze(member, level, table)
            tos = _scaled_tos(profile, args.scale)
            fl = flops_model(member, level)
            if args.scale == "instance":
                macs, flops = float(fl.per_instance.macs), float(fl.per_instance.flops)
            elif args.scale == "step":
                macs = fl.per_run.macs / fl.steps_per_run
                flops = fl.per_step_flops
            else:
                macs, flops = float(fl.per_run.macs), float(fl.per_run.flops)
            predicted = _fmt(lr.predict(tos), args.raw) if lr else ""
            rows.append([str(width), act.value, _fmt(tos, args.raw),
                         _fmt(macs, args.raw), _fmt(flops, args.raw), predicted])
            svg_points.setdefault(act.value, []).append((float(width), tos))
    _emit(_csv_table(rows), args.out)
    if args.svg:
        Path(args.svg).write_text(_sweep_svg(svg_points), encoding="utf-8")
    return EXIT_OK


def _read_predictions(path: str, value_column: str) -> dict[str, float]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "model_id" not in reader.fieldnames \
                or value_column not in reader.fieldnames:
            raise ParseError(f"{path}: expected columns model_id,{value_column}")
        out: dict[str, float] = {}
        for row_index, row in enumerate(reader, start=2):
            try:
                out[row["model_id"]] = float(row[value_column])
            except (TypeError, ValueError):
                raise ParseError(f"{path}: row {row_index}: cannot parse") from None
    return out


def cmd_compare(args) -> int:
    pred_tos = _read_predictions(args.predictions_tos, "predicted_j")
    pred_flops = _read_predictions(args.predictions_flops, "predicted_j")
    with open(args.actual, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "model_id" not in reader.fieldnames \
                or "joules" not in reader.fieldnames:
            raise ParseError(f"{args.actual}: expected columns model_id,joules")
        actual: list[tuple[str, float]] = []
        for row_index, row in enumerate(reader, start=2):
            try:
                actual.append((row["model_id"], float(row["joules"])))
            except (TypeError, ValueError):
                raise ParseError(f"{args.actual}: row {row_index}: cannot parse") from None
    ids = [model_id for model_id, _ in actual]
    if len(pred_tos) != len(ids) or len(pred_flops) != len(ids):
        raise ValueError(f"prediction/actual length mismatch: "
                         f"{len(pred_tos)} vs {len(pred_flops)} vs {len(ids)}")
    for model_id in ids:
        if model_id not in pred_tos or model_id not in pred_flops:
            raise ValueError(f"model {model_id!r} missing from a prediction file")

    actual_values = [a for _, a in actual]
    tos_values = [pred_tos[i] for i in ids]
    flops_values = [pred_flops[i] for i in ids]
    tos_report = error_metrics(tos_values, actual_values)
    flops_report = error_metrics(flops_values, actual_values)

    raw = args.raw
    rows = [["model_id", "actual_j", "tos_predicted_j", "tos_precision_pct",
             "flops_predicted_j", "flops_precision_pct"]]
    for i, model_id in enumerate(ids):
        rows.append([model_id, _fmt(actual_values[i], raw),
                     _fmt(tos_values[i], raw), _fmt(tos_report.precision[i], raw),
                     _fmt(flops_values[i], raw), _fmt(flops_report.precision[i], raw)])
    summary = [["method", "precision_min_pct", "precision_max_pct",
                "avg_abs_error_j", "max_signed_error_j"]]
    for name, report in (("tos", tos_report), ("flops", flops_report)):
        summary.append([name, _fmt(min(report.precision), raw),
                        _fmt(max(report.precision), raw),
                        _fmt(report.avg_error, raw), _fmt(report.max_error, raw)])
    _emit(_csv_table(rows) + "\n" + _csv_table(summary), args.out)
    return EXIT_OK


def cmd_tradeoff(args) -> int:
    with open(args.candidates, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["model_id", "energy_j", "loss"]
        if reader.fieldnames != expected:
            raise ParseError(f"{args.candidates}: expected header "
                             f"{','.join(expected)}")
        candidates = []
        for row_index, row in enumerate(reader, start=2):
            try:
                candidates.append((row["model_id"], float(row["energy_j"]),
                                   float(row["loss"])))
            except (TypeError, ValueError):
                raise ParseError(f"{args.candidates}: row {row_index}: "
                                 f"cannot parse") from None
    selected = tradeoff_select(candidates, args.alpha)
    sys.stdout.write(selected + "\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    model = _load_model(args.model, None)
    weights = default_weights(model, args.seed)
    inputs = default_inputs(model, args.seed)
    targets = [0.5] * model.layers[-1].output_units
    tally = run_training_step(model, inputs, targets, weights=weights)
    rows = [["segment", "n_add", "n_sub", "n_mul", "n_div", "n_root"]]
    rows.append(["forward"] + _counts_row(tally.forward))
    rows.append(["loss"] + _counts_row(tally.loss))
    for index, counts in enumerate(tally.backprop_layers, start=1):
        rows.append([f"backprop_layer_{index}"] + _counts_row(counts))
    rows.append(["backprop"] + _counts_row(tally.backprop))
    rows.append(["update"] + _counts_row(tally.update))
    _emit(_csv_table(rows), args.out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tos-analyzer",
        description="Transistor-operation workload and energy scaling analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, cost_table=False, fmt=False, raw=False, scale=False):
        p.add_argument("--level", choices=[l.value for l in AnalysisLevel],
                       default=AnalysisLevel.INFERENCE.value,
                       help="run steps to count (default: inference)")
        p.add_argument("--out", help="write the output table to this file")
        if fmt:
            p.add_argument("--format", choices=sorted(FLOAT_FORMATS),
                           help="override the model file's float format")
        if cost_table:
            p.add_argument("--cost-table",
                           help=f"cost-table file (default: ${COST_TABLE_ENV} "
                                f"or built-in defaults)")
        if raw:
            p.add_argument("--raw", action="store_true",
                           help="print full-precision values")
        if scale:
            p.add_argument("--scale", choices=["instance", "step", "run"],
                           default="instance",
                           help="workload scale for emitted values")

    p = sub.add_parser("count", help="per-layer basic-operation census")
    p.add_argument("model")
    add_common(p)
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("tos", help="transistor-operation workload report")
    p.add_argument("model")
    add_common(p, cost_table=True, fmt=True, raw=True)
    p.set_defaults(handler=cmd_tos)

    p = sub.add_parser("ingest", help="integrate power traces into energy samples")
    p.add_argument("traces", nargs="+")
    p.add_argument("--adapter", help="column-mapping config for vendor trace layouts")
    p.add_argument("--trim-k", type=int, default=5,
                   help="drop the k largest and smallest runs per model (default 5)")
    p.add_argument("--out", help="write the sample table to this file")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("fit", help="fit the workload-to-energy line")
    p.add_argument("pairs", help="CSV with header tos,joules")
    p.add_argument("--out", help="write the fitted model file here")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("estimate", help="predict energies from a fitted model")
    p.add_argument("models", nargs="*")
    p.add_argument("--fitted", required=True, help="fitted model file")
    p.add_argument("--tos-file", help="CSV of precomputed workloads (model_id,tos)")
    add_common(p, cost_table=True, fmt=True, raw=True, scale=True)
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("sweep", help="width x activation family sweep")
    p.add_argument("base")
    p.add_argument("--widths", required=True, help="width range, e.g. 4..13")
    p.add_argument("--activations", default="sigmoid,tanh,gelu",
                   help="comma-separated activation names")
    p.add_argument("--fitted-model", help="optional fitted model for energy estimates")
    p.add_argument("--svg", help="also render a polyline chart to this file")
    add_common(p, cost_table=True, fmt=True, raw=True, scale=True)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("compare", help="score two prediction sets against measurements")
    p.add_argument("predictions_tos")
    p.add_argument("predictions_flops")
    p.add_argument("actual")
    p.add_argument("--out", help="write the report to this file")
    p.add_argument("--raw", action="store_true", help="print full-precision values")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("tradeoff", help="select a model by energy/loss trade-off")
    p.add_argument("candidates", help="CSV with header model_id,energy_j,loss")
    p.add_argument("--alpha", type=float, required=True,
                   help="energy weight in [0, 1]")
    p.set_defaults(handler=cmd_tradeoff)

    # Debugging aid: run the instrumented scalar executor on a model file.
    p = sub.add_parser("oracle")
    p.add_argument("model")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UnsupportedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ParseError, ValidationError, TraceError, DegenerateFitError,
            ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())
