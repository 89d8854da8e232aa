"""Command-line interface.

Exit codes: 0 success, 1 check failure, 2 usage or config error, 3 budget
exceeded.  Graph arguments accept either inline JSON (``{"family": "cycle",
"n": 8}``) or a path to an edge-list file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import BudgetExceededError, ConfigError, GenerationError
from .expanders import (
    EXHAUSTIVE_CAP,
    adjacency_spectrum,
    exhaustive_lambda,
    spectral_lambda,
    verify_expander_props,
)
from .experiments import (
    build_graph,
    load_config,
    parse_config,
    resolve_profile,
    run_covering_check,
    run_range_experiment,
    run_tail_experiment,
    run_verify_suite,
)
from .flaws import core_within_cluster_interior, flaw_decomposition
from .graphs import DEFAULT_NODE_BUDGET, Graph, save_edge_list
from .lipschitz import (
    EnsembleSpec,
    count_groundstate,
    count_onepoint,
    enumerate_groundstate,
    enumerate_onepoint,
    fn_range,
    load_function,
    sample_exact,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _graph_from_arg(arg: str) -> Graph:
    if arg.strip().startswith("{"):
        try:
            source = json.loads(arg)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad graph JSON: {exc}") from exc
        return build_graph(source)
    return build_graph({"path": arg})


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit seed for stochastic steps")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET,
                   help="node budget for exhaustive routines")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sampling")


def _emit(obj, out_dir, filename) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=str)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, filename), "w") as fh:
            fh.write(text + "\n")
    print(text)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liplab",
                                     description="Exact and Monte-Carlo study of integer "
                                                 "Lipschitz functions on finite graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a graph and save its edge list")
    p.add_argument("--graph", required=True, help="generator JSON")
    p.add_argument("--out-file", required=True)
    _common_flags(p)

    p = sub.add_parser("spectrum", help="adjacency spectrum and expansion certificates")
    p.add_argument("--graph", required=True)
    p.add_argument("--exhaustive", action="store_true",
                   help=f"also run the subset sweep (n <= {EXHAUSTIVE_CAP})")
    p.add_argument("--props", action="store_true", help="verify structural consequences")
    _common_flags(p)

    p = sub.add_parser("count", help="count an ensemble exactly")
    p.add_argument("--graph", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--mode", choices=["one-point", "ground-state"], default="one-point")
    p.add_argument("--v0", type=int, default=0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--lambda-source", default="spectral",
                   help="spectral | exhaustive | a number to assert")
    _common_flags(p)

    p = sub.add_parser("enumerate", help="stream ensemble members as JSON lines")
    p.add_argument("--graph", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--mode", choices=["one-point", "ground-state"], default="one-point")
    p.add_argument("--v0", type=int, default=0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--lambda-source", default="spectral")
    p.add_argument("--limit", type=int, default=None, help="stop after this many members")
    _common_flags(p)

    p = sub.add_parser("sample", help="draw samples and emit per-sample statistics CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--mode", choices=["one-point", "ground-state"], default="one-point")
    p.add_argument("--v0", type=int, default=0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--lambda-source", default="spectral")
    p.add_argument("--sampler", choices=["exact", "glauber"], default="exact")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--probes", type=int, nargs="*", default=[0])
    _common_flags(p)

    p = sub.add_parser("flaws", help="cluster/core decomposition of a stored function")
    p.add_argument("--graph", required=True)
    p.add_argument("--function", required=True, help="path to {'M':..,'values':..} JSON")
    p.add_argument("--anchor", type=int, required=True)
    p.add_argument("--base", type=int, default=0)
    _common_flags(p)

    p = sub.add_parser("containers", help="build an approximating-pair family")
    p.add_argument("--graph", required=True)
    p.add_argument("--vertex", type=int, default=0)
    p.add_argument("--boundary-size", type=int, required=True)
    p.add_argument("--linkage", type=int, default=4)
    p.add_argument("--psi", type=float, default=1.0)
    p.add_argument("--lambda-source", default="spectral")
    _common_flags(p)

    p = sub.add_parser("experiment", help="run a configured experiment")
    p.add_argument("kind", choices=["range", "tail", "covering"])
    p.add_argument("--config", required=True)
    _common_flags(p)

    p = sub.add_parser("verify", help="run the consolidated verification suite")
    p.add_argument("--graph", action="append", default=None,
                   help="extra graph (JSON or path); repeatable, replaces the default set")
    p.add_argument("--fuzz-scale", type=int, default=1)
    _common_flags(p)

    return parser


def _resolve_lambda_arg(arg: str):
    if arg in ("spectral", "exhaustive"):
        return arg
    try:
        return {"asserted": float(arg)}
    except ValueError as exc:
        raise ConfigError(f"bad --lambda-source {arg!r}") from exc


def _spec_from_args(args, g: Graph) -> EnsembleSpec:
    if args.mode == "one-point":
        return EnsembleSpec("one-point", M=args.M, v0=args.v0)
    profile = resolve_profile(g, _resolve_lambda_arg(args.lambda_source))
    if profile is None:
        raise ConfigError("ground-state mode requires a regular graph")
    return EnsembleSpec("ground-state", M=args.M, k=args.k, lam=profile.lam)


def _cmd_gen_graph(args) -> int:
    g = _graph_from_arg(args.graph)
    save_edge_list(g, args.out_file)
    print(json.dumps({"name": g.name, "n": g.n, "m": g.m, "file": args.out_file}))
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    g = _graph_from_arg(args.graph)
    out = {"name": g.name, "n": g.n, "regular": g.is_regular()}
    if g.is_regular():
        out["d"] = g.regular_degree()
        out["eigenvalues"] = [float(v) for v in adjacency_spectrum(g)]
        prof = spectral_lambda(g)
        out["lam_spectral"] = prof.lam
        if args.exhaustive:
            out["lam_exhaustive"] = exhaustive_lambda(g).lam
        if args.props:
            chosen = exhaustive_lambda(g) if args.exhaustive else prof
            report = verify_expander_props(g, chosen, seed=args.seed)
            out["props"] = report
    _emit(out, args.out, "spectrum.json")
    if args.props and not out.get("props", {}).get("all_ok", True):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_count(args) -> int:
    g = _graph_from_arg(args.graph)
    if args.mode == "one-point":
        res = count_onepoint(g, args.v0, args.M, budget=args.budget)
    else:
        spec = _spec_from_args(args, g)
        res = count_groundstate(g, args.k, args.M, spec.lam, budget=args.budget)
    _emit(res.__dict__, args.out, "count.json")
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    g = _graph_from_arg(args.graph)
    if args.mode == "one-point":
        stream = enumerate_onepoint(g, args.v0, args.M, budget=args.budget)
    else:
        spec = _spec_from_args(args, g)
        stream = enumerate_groundstate(g, args.k, args.M, spec.lam, budget=args.budget)
    emitted = 0
    for f in stream:
        print(json.dumps({"M": f.M, "values": list(f.values)}))
        emitted += 1
        if args.limit is not None and emitted >= args.limit:
            break
    return EXIT_OK


def _cmd_sample(args) -> int:
    g = _graph_from_arg(args.graph)
    spec = _spec_from_args(args, g)
    for v in args.probes:
        if not (0 <= v < g.n):
            raise ConfigError(f"probe vertex {v} out of range")
    if args.sampler == "exact":
        fns = sample_exact(g, spec, seed=args.seed, count=args.samples, budget=args.budget)
    else:
        from .experiments import draw_samples

        cfg = parse_config(
            {
                "schema": 1,
                "graph": {"path": "-"},
                "M": args.M,
                "mode": {"kind": args.mode, **({"v0": args.v0} if args.mode == "one-point" else {"k": args.k})},
                "sampler": {"kind": "glauber"},
                "samples": args.samples,
                "seed": args.seed,
                "probes": list(args.probes),
                "threads": args.threads,
            }
        )
        profile = resolve_profile(g, _resolve_lambda_arg(args.lambda_source))
        fns = draw_samples(g, cfg, profile)
    header = ["sample_id", "range", "min", "max"] + [f"probe_{v}" for v in args.probes]
    lines = [",".join(header)]
    for i, f in enumerate(fns):
        row = [i, fn_range(f), min(f.values), max(f.values)] + [f.values[v] for v in args.probes]
        lines.append(",".join(str(x) for x in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "samples.csv"), "w") as fh:
            fh.write(text)
    print(text, end="")
    return EXIT_OK


def _cmd_flaws(args) -> int:
    g = _graph_from_arg(args.graph)
    f = load_function(args.function)
    dec = flaw_decomposition(g, f, args.anchor, args.base)
    out = {
        "anchor": dec.anchor,
        "base": dec.base,
        "M": dec.M,
        "cluster": sorted(dec.cluster),
        "core": sorted(dec.core),
        "cluster_threshold": dec.cluster_threshold,
        "core_threshold": dec.core_threshold,
    }
    if dec.core:
        out["core_in_cluster_interior"] = core_within_cluster_interior(dec, g)
    _emit(out, args.out, "flaws.json")
    return EXIT_OK


def _cmd_containers(args) -> int:
    from .containers import (
        build_container_family,
        count_report_csv,
        family_to_json_lines,
        linked_set_count_report,
    )

    g = _graph_from_arg(args.graph)
    profile = resolve_profile(g, _resolve_lambda_arg(args.lambda_source))
    if profile is None:
        raise ConfigError("container pipeline requires a regular graph")
    fam = build_container_family(
        g, args.vertex, args.boundary_size, args.linkage, args.psi, profile,
        seed=args.seed, budget=args.budget,
    )
    report = linked_set_count_report(
        g, args.vertex, args.boundary_size, args.linkage, profile, budget=args.budget
    )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "family.jsonl"), "w") as fh:
            for line in family_to_json_lines(fam):
                fh.write(line + "\n")
        with open(os.path.join(args.out, "container_report.csv"), "w") as fh:
            fh.write(count_report_csv([report]))
    print(
        json.dumps(
            {
                "vertex": fam.vertex,
                "boundary_size": fam.boundary_size,
                "linkage": fam.linkage,
                "psi": fam.psi,
                "n_sets": fam.n_sets,
                "n_pairs": len(fam.pairs),
                "covers_all": fam.covers_all,
                "stats": fam.stats,
                "count_report": report,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return EXIT_OK if fam.covers_all or fam.n_sets == 0 else EXIT_CHECK_FAILED


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    out_dir = args.out or cfg.out
    if args.kind == "covering":
        report = run_covering_check(cfg)
        _emit(report, out_dir, "covering.json")
        return EXIT_CHECK_FAILED if report.get("status") == "fail" else EXIT_OK
    result = run_range_experiment(cfg) if args.kind == "range" else run_tail_experiment(cfg)
    if out_dir:
        paths = result.write(out_dir)
        print(json.dumps({"written": paths}, sort_keys=True))
    else:
        print(json.dumps({"aggregates": result.aggregates, "gates": result.gates},
                         indent=2, sort_keys=True, default=str))
    if args.kind == "tail" and result.aggregates["asserted_violations"]:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_verify(args) -> int:
    graphs = None
    if args.graph:
        graphs = [_graph_from_arg(spec) for spec in args.graph]
    suite = run_verify_suite(graphs=graphs, seed=args.seed, budget=args.budget,
                             fuzz_scale=args.fuzz_scale)
    if args.out:
        _emit(suite, args.out, "verify_report.json")
    width = max(len(r["check"]) for r in suite["rows"]) + 2
    for r in suite["rows"]:
        print(f"{r['check']:<{width}} {r['graph']:<12} {r['status']}")
        if r["status"] == "fail":
            print(f"  witness: {r.get('witness')}")
            print(f"  repro:   {r.get('repro')}")
        elif r["status"] == "skipped" and r.get("reason"):
            print(f"  reason: {r['reason']}")
    print(f"\n{suite['n_pass']} pass, {suite['n_fail']} fail, {suite['n_skipped']} skipped/sampled")
    return EXIT_OK if suite["ok"] else EXIT_CHECK_FAILED


_COMMANDS = {
    "gen-graph": _cmd_gen_graph,
    "spectrum": _cmd_spectrum,
    "count": _cmd_count,
    "enumerate": _cmd_enumerate,
    "sample": _cmd_sample,
    "flaws": _cmd_flaws,
    "containers": _cmd_containers,
    "experiment": _cmd_experiment,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, GenerationError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
