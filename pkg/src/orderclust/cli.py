"""Command line driver: gen, cluster, eval, bench."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bench
from .clustering import (ClusteringResult, classical_hc, exact_opt, hc_plus,
                         nfold_approximation, ultrametric_fit)
from .datagen import (copies_for, planted_copies, random_base_component, random_space,
                      read_bundle, write_bundle)
from .dendrogram import DEFAULT_EPSILON, PartialDendrogram, psi
from .dissimilarity import LINKAGES, pnorm_distance
from .errors import OrderClustError, SearchBudgetExceeded
from .metrics import normalized_fits
from .rng import make_rng
from .svg import line_chart

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4
METHODS = ("ordered", "classical", "plus", "exact")


def _float_grid(text: str) -> list[float]:
    """``a:b:step`` (inclusive) or a comma list."""
    if ":" in text:
        a, b, step = (float(v) for v in text.split(":"))
        count = int(round((b - a) / step)) + 1
        return [round(a + k * step, 10) for k in range(count)]
    return [float(v) for v in text.split(",") if v]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orderclust", description=__doc__)
    parser.add_argument("--config", help="JSON file with option values; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance bundle")
    g.add_argument("-o", "--out", required=True)
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--p", type=float, default=0.05, help="edge probability of the random order")
    g.add_argument("--t", type=int, default=1, help="expected ties per level")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--copies", type=int, help="build a planted-copy instance with this many copies")
    g.add_argument("--alpha", type=float, default=0.25)
    g.add_argument("--sigma", type=float, default=0.10)
    g.add_argument("--base", help="bundle used as the base component (default: random)")
    g.add_argument("--target", type=int, default=200, help="element count used when --copies 0")

    c = sub.add_parser("cluster", help="cluster an instance bundle")
    c.add_argument("bundle")
    c.add_argument("-o", "--out", required=True)
    c.add_argument("--method", choices=METHODS, default="ordered")
    c.add_argument("--linkage", choices=LINKAGES, default="single")
    c.add_argument("--samples", type=int, default=10, help="N for the N-fold approximation")
    c.add_argument("--eps", type=float, default=DEFAULT_EPSILON)
    c.add_argument("--norm", type=float, default=1.0, help="p of the fit norm")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--max", type=float, default=1.0, help="saturation value for the plus method")
    c.add_argument("--limit", type=int, default=200_000, help="state budget for the exact method")
    c.add_argument("--tol", type=float, default=0.0, help="relative tie tolerance")
    c.add_argument("--workers", type=int, default=1)

    e = sub.add_parser("eval", help="score result files against a bundle")
    e.add_argument("bundle")
    e.add_argument("results", nargs="+")
    e.add_argument("-o", "--out", required=True)
    e.add_argument("--reference-fit", type=float)

    b = sub.add_parser("bench", help="run a convergence or method comparison experiment")
    b.add_argument("kind", choices=("convergence", "compare"))
    b.add_argument("-o", "--out", required=True, help="CSV path")
    b.add_argument("--svg", help="also write a line chart here")
    b.add_argument("--linkage", choices=LINKAGES, default="single")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--eps", type=float, default=DEFAULT_EPSILON)
    b.add_argument("--norm", type=float, default=1.0)
    b.add_argument("--n", type=int, default=20)
    b.add_argument("--p", type=float, default=0.05)
    b.add_argument("--t", type=int, default=3)
    b.add_argument("--spaces", type=int, default=10)
    b.add_argument("--pool", type=int, default=100)
    b.add_argument("--boots", type=int, default=200)
    b.add_argument("--grid", type=_int_list, default=[1, 2, 3, 5, 10], help="N values, comma separated")
    b.add_argument("--exact-max-n", type=int, default=60)
    b.add_argument("--per-space", action="store_true")
    b.add_argument("--alpha", type=_float_grid, default=_float_grid("0.10:0.50:0.05"))
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--base-n", type=int, default=15)
    b.add_argument("--base-p", type=float, default=0.15)
    b.add_argument("--sigma", type=float, default=0.10)
    b.add_argument("--samples", type=int, default=10)
    b.add_argument("--max", type=float, default=1.0)
    b.add_argument("--records", help="also write the per-run records CSV here")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = json.loads(Path(args.config).read_text())
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(config) - known
        if unknown:
            raise OrderClustError(f"unknown config keys: {sorted(unknown)}")
        for action in sub._actions:
            if action.dest in config and isinstance(config[action.dest], str) and action.type:
                config[action.dest] = action.type(config[action.dest])
        sub.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


def _write_csv(path, rows: list[dict], columns=None) -> None:
    columns = columns or (list(rows[0]) if rows else [])
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                        for k, v in r.items()})


def cmd_gen(args) -> int:
    rng = make_rng(args.seed)
    meta = {"seed": args.seed}
    if args.copies is not None:
        if args.base:
            base, _, base_meta = read_bundle(args.base)
            meta["base"] = str(args.base)
        else:
            base = random_base_component(args.n, args.p, args.t, rng)
            meta.update(base_n=args.n, base_p=args.p, base_t=args.t)
        m = args.copies or copies_for(base.n, args.target)
        inst = planted_copies(base, m, args.alpha, args.sigma, rng)
        meta.update(kind="planted", **inst.params)
        write_bundle(args.out, inst.space, inst.planted, meta)
    else:
        space = random_space(args.n, args.p, args.t, rng)
        meta.update(kind="random", n=args.n, p=args.p, t=args.t)
        write_bundle(args.out, space, None, meta)
    print(f"wrote bundle to {args.out}")
    return EXIT_OK


def cmd_cluster(args) -> int:
    space, _, meta = read_bundle(args.bundle)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kind, eps, p = args.linkage, args.eps, args.norm
    if args.method == "ordered":
        nf = nfold_approximation(space, kind, args.samples, eps, p, args.seed, args.tol, args.workers)
        results = [nf.best]
        extra = {"fits": nf.fits, "samples": args.samples}
    elif args.method == "exact":
        results = exact_opt(space, kind, eps, p, args.limit, args.tol)
        extra = {"minimisers": len(results)}
    else:
        rng = make_rng(args.seed)
        if args.method == "classical":
            theta = classical_hc(space.dist, kind, rng, args.tol)
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                theta = hc_plus(space, kind, args.max, rng, args.tol)
        fit = pnorm_distance(psi(theta), space.dist, p)
        results = [ClusteringResult(theta, fit, eps, p, kind, seed=args.seed, method=args.method)]
        extra = {"max": args.max} if args.method == "plus" else {}
    payload = {"method": args.method, "linkage": kind, "epsilon": eps, "p": p, "seed": args.seed,
               "bundle": str(args.bundle), "results": [r.to_dict() for r in results], **extra}
    (out / "result.json").write_text(json.dumps(payload, indent=2))
    merges = [{"linkage_matrix": r.dendrogram.linkage_matrix().tolist(),
               "merges": r.dendrogram.to_dict()["merges"]} for r in results]
    (out / "merges.json").write_text(json.dumps(merges, indent=2))
    print(f"{args.method}/{kind}: fit {results[0].fit:.6g}, {len(results[0].dendrogram.merges)} merges"
          + (f", {len(results)} minimisers" if len(results) > 1 else ""))
    return EXIT_OK


def _load_results(path) -> list[tuple[str, PartialDendrogram, dict]]:
    data = json.loads(Path(path).read_text())
    entries = data["results"] if "results" in data else [data]
    return [(data.get("method", "ordered"), PartialDendrogram.from_dict(e), e) for e in entries]


def cmd_eval(args) -> int:
    space, planted, _ = read_bundle(args.bundle)
    rows = []
    for path in args.results:
        for k, (method, theta, entry) in enumerate(_load_results(path)):
            if theta.n != space.n:
                raise OrderClustError(f"{path} has {theta.n} elements, bundle has {space.n}")
            eps = entry.get("epsilon", DEFAULT_EPSILON)
            p = entry.get("p", 1.0)
            fit = ultrametric_fit(theta, space.dist, eps, p)
            row = {"instance_id": str(args.bundle), "result": f"{path}#{k}", "method": method,
                   "linkage": entry.get("linkage"), "fit": fit}
            if planted is not None:
                row.update(bench.evaluate(space, planted, theta, fit))
            rows.append(row)
    norm = normalized_fits([r["fit"] for r in rows], args.reference_fit)
    for r, v in zip(rows, norm):
        r["norm_fit"] = v
    Path(args.out).write_text(json.dumps(rows if len(rows) > 1 else rows[0], indent=2))
    for r in rows:
        print(" ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in r.items()))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.kind == "convergence":
        rows = bench.convergence(args.n, args.p, args.t, args.linkage, args.grid, args.spaces, args.pool,
                                 args.boots, args.eps, args.norm, args.seed, args.exact_max_n,
                                 args.per_space)
        _write_csv(args.out, rows, bench.CONVERGENCE_COLUMNS)
        agg = [r for r in rows if r["instance"] == "all"]
        if args.svg:
            xs = [r["N"] for r in agg]
            series = {"E(ARI)": ([r["E_ARI"] for r in agg], [r["std_ARI"] for r in agg]),
                      "E(oARI)": ([r["E_oARI"] for r in agg], [r["std_oARI"] for r in agg]),
                      "norm. fit": [r["norm_fit"] for r in agg],
                      "opt. fit": [r["opt_fit"] for r in agg]}
            Path(args.svg).write_text(line_chart(xs, series, f"{args.linkage}, n={args.n}, p={args.p}, "
                                                 f"t={args.t}", "N", "score"))
        for r in agg:
            print(f"N={r['N']:>4} E_ARI={r['E_ARI']:.4f} E_oARI={r['E_oARI']:.4f} "
                  f"norm_fit={r['norm_fit']:.4f} opt_fit={r['opt_fit']:.4f}")
        return EXIT_OK

    cfg = bench.CompareConfig(kind=args.linkage, alphas=tuple(args.alpha), reps=args.reps,
                              base_n=args.base_n, base_p=args.base_p, base_t=args.t,
                              sigma=args.sigma, N=args.samples, max_value=args.max, eps=args.eps,
                              p=args.norm, seed=args.seed)
    records = bench.compare_records(cfg)
    summary = bench.compare_summary(records)
    _write_csv(args.out, summary, bench.COMPARE_COLUMNS)
    if args.records:
        _write_csv(args.records, records)
    if args.svg:
        charts = []
        for metric in ("ari", "oari", "loops"):
            sel = [r for r in summary if r["metric"] == metric]
            xs = sorted({r["alpha"] for r in sel})
            series = {}
            for m in bench.METHODS:
                rs = sorted((r for r in sel if r["method"] == m), key=lambda r: r["alpha"])
                series[m] = ([r["mean"] for r in rs], [r["paired_std"] for r in rs])
            charts.append(line_chart(xs, series, f"{metric}, {args.linkage}", "alpha", metric))
        Path(args.svg).write_text(charts[0])
        for metric, chart in zip(("oari", "loops"), charts[1:]):
            Path(args.svg).with_name(f"{Path(args.svg).stem}_{metric}.svg").write_text(chart)
    for r in summary:
        print(f"alpha={r['alpha']:.2f} {r['method']:>9} {r['metric']:>5} "
              f"mean={r['mean']:.4f} std={r['paired_std']:.4f}")
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "cluster": cmd_cluster, "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except SearchBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (OrderClustError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
