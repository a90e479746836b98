"""Command-line entry point: synthesis, analysis, calibration, batch reporting.

Exit codes: 0 on success, 2 on usage or geometry errors, 3 on analysis
failures (unparseable trace, missing call pattern, failed calibration).
"""

from __future__ import annotations

import argparse
import glob as globlib
import json
import sys
from pathlib import Path
from typing import Optional

from gemmtap.dim_inverter import (
    AnalysisError,
    CalibrationError,
    analyze,
    calibration_at_from_samples,
    props_from_dict,
)
from gemmtap.gemm_model import (
    BlockingConstants,
    ConvGeometry,
    DegenerateConvolutionError,
    conv_to_gemm,
)
from gemmtap.noise_filter import FilterConfig
from gemmtap.synth import (
    ObfuscationPlan,
    TimingModel,
    apply_obfuscation,
    executor_from_sidecar,
    ground_truth_sidecar,
    load_sidecar,
    sidecar_path,
    synthesize,
)
from gemmtap.trace_io import ProbeConfig, TraceParseError, read_probe_log, write_probe_log

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ANALYSIS = 3


def _parse_constants(text: str) -> BlockingConstants:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected P,Q,UNROLL")
    try:
        p, q, unroll = (int(x) for x in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("constants must be integers") from None
    return BlockingConstants(p=p, q=q, unroll=unroll)


def _add_filter_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--threshold", type=int, default=100, help="cache-hit latency threshold, cycles")
    sub.add_argument("--window", type=int, default=10, help="duplicate filter window, slots")
    sub.add_argument("--rule2-scale", type=float, default=0.5,
                     help="itcopy interval rule cut as a fraction of the mean interval")
    sub.add_argument("--no-rule2", action="store_true", help="disable the itcopy interval rule")


def _filter_cfg(args: argparse.Namespace) -> FilterConfig:
    return FilterConfig(
        duplicate_window=args.window,
        itcopy_interval_rule=not args.no_rule2,
        itcopy_interval_scale=args.rule2_scale,
    )


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        geom = ConvGeometry(
            kernel=args.kernel,
            stride=args.stride,
            padding=args.pad,
            in_channels=args.channels,
            out_channels=args.out_channels,
        )
        dims = conv_to_gemm(geom, args.id)
    except (ValueError, DegenerateConvolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    plan = ObfuscationPlan(dummy_rows=args.dummy_rows, dummy_cols=args.dummy_cols)
    observed = apply_obfuscation(dims, plan)
    tm = TimingModel(
        unit=args.unit,
        jitter_sigma=args.jitter,
        duplicate_prob=args.dup,
        drop_prob=args.drop,
        spurious_rate=args.spurious,
    )
    samples = synthesize(observed, args.constants, tm, seed=args.seed)
    out = Path(args.out)
    write_probe_log(samples, out)
    sidecar = ground_truth_sidecar(observed, geom, args.id, args.seed, tm, args.constants, plan)
    sidecar_path(out).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(samples)} rows) and {sidecar_path(out)}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    geom = ConvGeometry(
        kernel=1,  # kernel is what the analysis estimates; only stride/pad/channels are used
        stride=args.stride,
        padding=args.pad,
        in_channels=args.channels,
    )
    probe_cfg = ProbeConfig(hit_threshold=args.threshold)
    filter_cfg = _filter_cfg(args)

    try:
        if args.props:
            props = props_from_dict(json.loads(Path(args.props).read_text(encoding="utf-8")))
            report = analyze(
                props=props, geom=geom, consts=args.constants,
                probe_cfg=probe_cfg, filter_cfg=filter_cfg, at_l1=args.at_l1,
            )
        else:
            samples = read_probe_log(Path(args.trace))
            at_l1: Optional[float] = args.at_l1
            executor = None
            if at_l1 is None and args.calib_trace:
                at_l1 = calibration_at_from_samples(
                    read_probe_log(Path(args.calib_trace)), probe_cfg, filter_cfg
                )
            elif at_l1 is None:
                sc = Path(args.sidecar) if args.sidecar else sidecar_path(args.trace)
                if sc.exists() and not args.no_sidecar:
                    executor = executor_from_sidecar(load_sidecar(sc))
            report = analyze(
                samples, geom=geom, consts=args.constants,
                probe_cfg=probe_cfg, filter_cfg=filter_cfg, at_l1=at_l1, executor=executor,
            )
    except (AnalysisError, CalibrationError, TraceParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS

    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    probe_cfg = ProbeConfig(hit_threshold=args.threshold)
    filter_cfg = _filter_cfg(args)
    try:
        samples = read_probe_log(Path(args.trace))
        at_l1 = calibration_at_from_samples(samples, probe_cfg, filter_cfg)
    except (CalibrationError, TraceParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    print(json.dumps({"at_l1": at_l1}))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    paths = sorted(globlib.glob(args.glob))
    rows: list[dict] = []
    hits = 0
    evaluated = 0
    for path in paths:
        row: dict = {"trace": path}
        sc = Path(args.truth) / (Path(path).stem + ".json") if args.truth else sidecar_path(path)
        if not sc.exists():
            row["error"] = "missing sidecar"
            rows.append(row)
            continue
        doc = load_sidecar(sc)
        g = doc["geometry"]
        geom = ConvGeometry(
            kernel=g["kernel"], stride=g["stride"], padding=g["padding"],
            in_channels=g["in_channels"], out_channels=g.get("out_channels", 64),
        )
        consts = BlockingConstants(**doc.get("constants", {}))
        try:
            report = analyze(
                read_probe_log(Path(path)),
                geom=geom, consts=consts,
                executor=executor_from_sidecar(doc),
            )
        except (AnalysisError, CalibrationError, TraceParseError) as exc:
            row["error"] = str(exc)
            rows.append(row)
            continue
        truth = int(doc["id"])
        est = report.estimate.id_rounded
        row.update({
            "truth_id": truth,
            "estimated_id": est,
            "id_raw": report.estimate.id_raw,
            "abs_error": abs(est - truth),
            "hit": abs(est - truth) <= args.within,
        })
        evaluated += 1
        hits += row["hit"]
        rows.append(row)

    summary = {
        "traces": len(paths),
        "evaluated": evaluated,
        "hits_within": args.within,
        "hit_rate": (hits / evaluated) if evaluated else None,
    }
    doc = {"rows": rows, "summary": summary}
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

    header = f"{'trace':<40} {'truth':>6} {'est':>6} {'raw':>9} {'|err|':>6}  ok"
    print(header)
    print("-" * len(header))
    for row in rows:
        if "error" in row:
            print(f"{row['trace']:<40} {row['error']}")
        else:
            print(
                f"{row['trace']:<40} {row['truth_id']:>6} {row['estimated_id']:>6} "
                f"{row['id_raw']:>9.1f} {row['abs_error']:>6}  {'y' if row['hit'] else 'n'}"
            )
    if evaluated:
        print(f"hit rate (within +/-{args.within}): {hits}/{evaluated} = {hits / evaluated:.3f}")
    else:
        print("no traces evaluated")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gemmtap",
        description="Recover a conv layer's input size from cache-probe traces of a blocked GEMM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic probe trace plus ground-truth sidecar")
    p_synth.add_argument("--id", type=int, required=True, help="input image side")
    p_synth.add_argument("--kernel", type=int, required=True)
    p_synth.add_argument("--stride", type=int, required=True)
    p_synth.add_argument("--pad", type=int, required=True)
    p_synth.add_argument("--channels", type=int, default=3)
    p_synth.add_argument("--out-channels", type=int, default=64)
    p_synth.add_argument("--out", default="trace.csv")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--unit", type=float, default=4.0, help="probe slots per unit of GEMM work")
    p_synth.add_argument("--jitter", type=float, default=0.0, help="relative duration sigma")
    p_synth.add_argument("--dup", type=float, default=0.0, help="duplicate observation probability")
    p_synth.add_argument("--drop", type=float, default=0.0, help="dropped observation probability")
    p_synth.add_argument("--spurious", type=float, default=0.0, help="stray hits per 1000 slots")
    p_synth.add_argument("--dummy-rows", type=int, default=0, help="defender-padded GEMM rows")
    p_synth.add_argument("--dummy-cols", type=int, default=0, help="defender-padded GEMM columns")
    p_synth.add_argument("--constants", type=_parse_constants, default=BlockingConstants(),
                         help="P,Q,UNROLL (default 320,320,4)")
    p_synth.set_defaults(func=cmd_synth)

    p_an = sub.add_parser("analyze", help="estimate dimensions from a trace or loop properties")
    src = p_an.add_mutually_exclusive_group(required=True)
    src.add_argument("--trace", help="probe log CSV")
    src.add_argument("--props", help="loop properties JSON {L1,L2,L3: {N, ST, AT}}")
    p_an.add_argument("--stride", type=int, required=True)
    p_an.add_argument("--pad", type=int, required=True)
    p_an.add_argument("--channels", type=int, default=3)
    p_an.add_argument("--constants", type=_parse_constants, default=BlockingConstants(),
                      help="P,Q,UNROLL (default 320,320,4)")
    _add_filter_flags(p_an)
    p_an.add_argument("--at-l1", type=float, default=None,
                      help="calibrated AT_L1 when the trace has a single L1 chunk")
    p_an.add_argument("--calib-trace", help="probe log of a k=4Q calibration run")
    p_an.add_argument("--sidecar", help="synthetic sidecar JSON to drive in-process calibration")
    p_an.add_argument("--no-sidecar", action="store_true",
                      help="ignore an auto-discovered sidecar next to the trace")
    p_an.add_argument("--out", help="write the report JSON here instead of stdout")
    p_an.set_defaults(func=cmd_analyze)

    p_cal = sub.add_parser("calibrate", help="compute AT_L1 from a k=4Q calibration trace")
    p_cal.add_argument("--trace", required=True)
    _add_filter_flags(p_cal)
    p_cal.set_defaults(func=cmd_calibrate)

    p_rep = sub.add_parser("report", help="batch accuracy report over traces with sidecars")
    p_rep.add_argument("--glob", required=True, help="glob pattern of trace CSVs")
    p_rep.add_argument("--truth", help="directory of sidecar JSONs (default: next to each trace)")
    p_rep.add_argument("--within", type=int, default=1, help="hit when |estimate - truth| <= this")
    p_rep.add_argument("--out", help="write machine-readable JSON here")
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
