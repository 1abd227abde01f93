"""Command-line entry point: generate, partition, color, verify, bench.

Exit codes: 0 success, 1 verification failure, 2 usage or input-format
error, 3 algorithmic failure (no rule could make progress).  Failures
emit a machine-readable JSON object on stderr.

The verifier re-derives every check from the raw files: it parses the
graph through the shared reader but re-implements the layering and
properness scans locally, sharing no code path with the producers.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

from .ampc import (
    FailedToProgress,
    PipelineConfig,
    guess_arboricity_pipeline,
    partition_pipeline,
    pipeline_report,
)
from .coloring import (
    ColoringResult,
    coloring_summary,
    coloring_to_text,
    color_pipeline_1,
    color_pipeline_2,
    color_pipeline_3,
    color_pipeline_large_alpha,
    derand_color,
    is_proper,
    linial_parameters,
    predicted_linial_palette,
)
from .graph import (
    GraphFormatError,
    generate_forest_union,
    read_edge_list,
    write_certificate,
    write_edge_list,
)
from .partition import partition_to_text

PIPELINES = ("p1", "p2", "p3", "large-poly", "large-linear", "derand")


def _fail(code, kind, message, extra=None):
    payload = {"error": kind, "message": message}
    if extra:
        payload["detail"] = extra
    print(json.dumps(payload), file=sys.stderr)
    return code


def _emit(report, fmt):
    if fmt == "json":
        print(json.dumps(report, indent=2, default=str))
    else:
        flat = {
            k: v for k, v in report.items() if not isinstance(v, (list, dict))
        }
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(flat))
        writer.writeheader()
        writer.writerow(flat)
        print(buf.getvalue(), end="")


def _config_from(args, beta, alpha=None):
    return PipelineConfig(
        beta=beta,
        delta=args.delta,
        c=args.c,
        epsilon=args.epsilon,
        x_override=args.x,
        alpha_hint=alpha,
    )


def cmd_generate(args):
    g, cert = generate_forest_union(args.n, args.alpha, args.seed)
    write_edge_list(g, args.out)
    write_certificate(cert, args.out + ".cert")
    print(
        json.dumps(
            {"n": g.n, "m": g.m, "alpha": cert.value, "out": args.out},
            indent=2,
        )
    )
    return 0


def cmd_partition(args):
    g = read_edge_list(args.infile)
    if args.beta is not None:
        cfg = _config_from(args, args.beta, args.alpha)
        result = partition_pipeline(g, cfg)
    elif args.alpha is not None:
        beta = math.ceil((2 + args.epsilon) * args.alpha)
        cfg = _config_from(args, beta, args.alpha)
        result = partition_pipeline(g, cfg)
    else:
        cfg = _config_from(args, beta=1)
        outcome = guess_arboricity_pipeline(g, cfg)
        result = outcome.result
        cfg = _config_from(
            args,
            beta=math.ceil((2 + args.epsilon) * outcome.alpha_estimate),
            alpha=outcome.alpha_estimate,
        )
    report = pipeline_report(g, cfg, result)
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(partition_to_text(result.partition))
    _emit(report, args.format)
    return 0 if report["valid"] else 1


def _palette_bound(pipeline, g, args, result):
    a = args.alpha
    eps = args.epsilon
    if pipeline in ("p3", "large-linear"):
        return math.ceil((2 + eps) * a) + 1
    if pipeline == "p1":
        beta = max(1, math.ceil(a ** (1 + eps)))
        if a**eps > math.log2(max(2, g.n)):
            q, _ = linial_parameters(max(1, g.n), beta)
            return q * q
        return predicted_linial_palette(g.n, beta)
    if pipeline == "p2":
        return predicted_linial_palette(g.n, math.ceil((2 + eps) * a))
    if pipeline == "large-poly":
        beta = max(1, math.ceil(a ** (1 + eps)))
        x = max(2, math.ceil(a**eps))
        layers = result.partition.size if result.partition else 1
        return max(1, layers * 2 * x * beta)
    return result.coloring.palette  # derand: 2 x Delta by construction


def cmd_color(args):
    g = read_edge_list(args.infile)
    pipeline = args.pipeline
    if pipeline == "derand":
        x = args.x if args.x is not None else 2
        result = derand_color(g, x, args.delta)
        result = ColoringResult(
            coloring=result.coloring,
            pipeline="derand",
            rounds_charged=result.rounds_charged,
            phases=[{"phase": "derand", "x": x}],
        )
    else:
        if args.alpha is None:
            return _fail(2, "USAGE", f"pipeline {pipeline} requires --alpha")
        cfg = _config_from(args, beta=1, alpha=args.alpha)
        if pipeline == "p1":
            result = color_pipeline_1(g, cfg)
        elif pipeline == "p2":
            result = color_pipeline_2(g, cfg)
        elif pipeline == "p3":
            result = color_pipeline_3(g, cfg)
        elif pipeline == "large-poly":
            result = color_pipeline_large_alpha(g, cfg, "POLY")
        else:
            result = color_pipeline_large_alpha(g, cfg, "LINEAR")
    summary = coloring_summary(g, result)
    if pipeline == "derand":
        bound = result.coloring.palette
    else:
        bound = _palette_bound(pipeline, g, args, result)
    summary["palette_bound"] = bound
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(coloring_to_text(result.coloring, g.n))
    _emit(summary, args.format)
    return 0 if summary["proper"] and summary["palette"] <= bound else 1


def _verify_partition_file(g, path, beta):
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    layers = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"bad partition line: {ln!r}")
        v = int(parts[0])
        layers[v] = math.inf if parts[1] == "inf" else int(parts[1])
    if set(layers) != set(range(g.n)):
        raise GraphFormatError("partition file does not cover 0..n-1")
    violations = []
    for v in range(g.n):
        lv = layers[v]
        if lv == math.inf:
            continue
        over = sum(1 for u in g.adjacency[v] if layers[u] >= lv)
        if over > beta:
            violations.append({"node": v, "count": over})
    infinities = sum(1 for v in layers.values() if v == math.inf)
    return {
        "partition_valid": not violations,
        "partition_full": infinities == 0,
        "violations": violations[:10],
        "infinity_count": infinities,
        "size": len({v for v in layers.values() if v != math.inf}),
    }


def _verify_coloring_file(g, path, palette):
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    colors = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"bad coloring line: {ln!r}")
        colors[int(parts[0])] = int(parts[1])
    if set(colors) != set(range(g.n)):
        raise GraphFormatError("coloring file does not cover 0..n-1")
    bad = [
        {"edge": [u, v], "color": colors[u]}
        for u, v in g.edges
        if colors[u] == colors[v]
    ]
    report = {"coloring_proper": not bad, "monochromatic": bad[:10]}
    if palette is not None:
        used = max(colors.values(), default=0) + 1 if colors else 1
        report["palette_ok"] = used <= palette
        report["palette_used"] = used
    return report


def cmd_verify(args):
    g = read_edge_list(args.infile)
    if args.partition is None and args.coloring is None:
        return _fail(2, "USAGE", "nothing to verify, give --partition or --coloring")
    report = {"n": g.n, "m": g.m}
    ok = True
    if args.partition is not None:
        if args.beta is None:
            return _fail(2, "USAGE", "--partition needs --beta")
        sub = _verify_partition_file(g, args.partition, args.beta)
        report.update(sub)
        ok = ok and sub["partition_valid"] and sub["partition_full"]
    if args.coloring is not None:
        sub = _verify_coloring_file(g, args.coloring, args.palette)
        report.update(sub)
        ok = ok and sub["coloring_proper"] and sub.get("palette_ok", True)
    report["ok"] = ok
    _emit(report, args.format)
    return 0 if ok else 1


def cmd_bench(args):
    ns = [int(tok) for tok in args.ns.split(",") if tok]
    alphas = [int(tok) for tok in args.alphas.split(",") if tok]
    pipelines = [tok for tok in args.pipelines.split(",") if tok]
    for p in pipelines:
        if p not in PIPELINES + ("partition",):
            return _fail(2, "USAGE", f"unknown pipeline {p!r}")
    fieldnames = [
        "n",
        "alpha",
        "beta",
        "x",
        "pipeline",
        "rounds",
        "size",
        "palette",
        "max_reads",
        "wall_ms",
        "valid",
    ]
    rows = []
    for n in ns:
        for alpha in alphas:
            g, _cert = generate_forest_union(n, alpha, args.seed)
            for pipeline in pipelines:
                beta = math.ceil((2 + args.epsilon) * alpha)
                cfg = _config_from(args, beta=beta, alpha=alpha)
                t0 = time.perf_counter()
                if pipeline == "partition":
                    result = partition_pipeline(g, cfg)
                    wall = (time.perf_counter() - t0) * 1e3
                    rows.append(
                        {
                            "n": n,
                            "alpha": alpha,
                            "beta": beta,
                            "x": cfg.resolve_x(n),
                            "pipeline": pipeline,
                            "rounds": result.ledger.rounds,
                            "size": result.partition.size,
                            "palette": "",
                            "max_reads": result.ledger.max_machine_reads,
                            "wall_ms": f"{wall:.1f}",
                            "valid": result.partition.is_full,
                        }
                    )
                    continue
                if pipeline == "derand":
                    x = args.x if args.x is not None else 2
                    res = derand_color(g, x, args.delta)
                    wall = (time.perf_counter() - t0) * 1e3
                    rows.append(
                        {
                            "n": n,
                            "alpha": alpha,
                            "beta": "",
                            "x": x,
                            "pipeline": pipeline,
                            "rounds": res.rounds_charged,
                            "size": "",
                            "palette": res.coloring.palette,
                            "max_reads": "",
                            "wall_ms": f"{wall:.1f}",
                            "valid": is_proper(g, res.coloring),
                        }
                    )
                    continue
                runner = {
                    "p1": color_pipeline_1,
                    "p2": color_pipeline_2,
                    "p3": color_pipeline_3,
                    "large-poly": lambda gg, cc: color_pipeline_large_alpha(
                        gg, cc, "POLY"
                    ),
                    "large-linear": lambda gg, cc: color_pipeline_large_alpha(
                        gg, cc, "LINEAR"
                    ),
                }[pipeline]
                res = runner(g, cfg)
                wall = (time.perf_counter() - t0) * 1e3
                part_reads = ""
                for ph in res.phases:
                    if ph.get("phase") == "partition":
                        part_reads = ph.get("reads", "")
                rows.append(
                    {
                        "n": n,
                        "alpha": alpha,
                        "beta": "",
                        "x": cfg.resolve_x(n),
                        "pipeline": pipeline,
                        "rounds": res.rounds_charged,
                        "size": res.partition.size if res.partition else "",
                        "palette": res.coloring.palette,
                        "max_reads": part_reads,
                        "wall_ms": f"{wall:.1f}",
                        "valid": is_proper(g, res.coloring),
                    }
                )
    out = sys.stdout if not args.out else open(args.out, "w", encoding="ascii")
    try:
        writer = csv.DictWriter(out, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="arbcolor",
        description="layered-partition orientations and sparse-graph colorings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_in=True):
        if needs_in:
            p.add_argument("--in", dest="infile", required=True)
        p.add_argument("--alpha", type=int)
        p.add_argument("--beta", type=int)
        p.add_argument("--epsilon", type=float, default=1.0)
        p.add_argument("--delta", type=float, default=0.5)
        p.add_argument("--c", type=float, default=7.0)
        p.add_argument("--x", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p_gen = sub.add_parser("generate", help="write a forest-union graph + certificate")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--alpha", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_part = sub.add_parser("partition", help="compute a full layered partition")
    common(p_part)
    p_part.set_defaults(func=cmd_partition)

    p_col = sub.add_parser("color", help="run a coloring pipeline")
    common(p_col)
    p_col.add_argument("--pipeline", choices=PIPELINES, required=True)
    p_col.set_defaults(func=cmd_color)

    p_ver = sub.add_parser("verify", help="independently re-check output files")
    p_ver.add_argument("--in", dest="infile", required=True)
    p_ver.add_argument("--partition")
    p_ver.add_argument("--coloring")
    p_ver.add_argument("--beta", type=int)
    p_ver.add_argument("--palette", type=int)
    p_ver.add_argument("--format", choices=("json", "csv"), default="json")
    p_ver.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="CSV sweep over a parameter grid")
    p_bench.add_argument("--ns", required=True, help="comma-separated node counts")
    p_bench.add_argument("--alphas", required=True, help="comma-separated arboricities")
    p_bench.add_argument(
        "--pipelines",
        default="partition",
        help="comma-separated subset of partition," + ",".join(PIPELINES),
    )
    p_bench.add_argument("--epsilon", type=float, default=1.0)
    p_bench.add_argument("--delta", type=float, default=0.5)
    p_bench.add_argument("--c", type=float, default=7.0)
    p_bench.add_argument("--x", type=int)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except FailedToProgress as exc:
        return _fail(3, "FAILED_TO_PROGRESS", str(exc), exc.diagnostics)
    except GraphFormatError as exc:
        return _fail(2, "FORMAT", str(exc))
    except FileNotFoundError as exc:
        return _fail(2, "IO", str(exc))
    except ValueError as exc:
        return _fail(2, "USAGE", str(exc))


if __name__ == "__main__":
    sys.exit(main())
