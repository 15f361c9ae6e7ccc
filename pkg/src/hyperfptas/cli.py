"""``hyperfptas`` command line: compute, exact, compare, check, gen, reduce, bench.

Results go to stdout as JSON (numbers at 12 significant digits, infinities
as the strings ``"inf"``/``"-inf"``), diagnostics to stderr. Exit codes:
0 ok, 1 usage or other error, 2 parse error, 3 outside the guaranteed
region, 4 threshold proximity, 5 oracle size guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

from . import hardcore, twospin
from .errors import (
    HyperFptasError,
    OracleTooLarge,
    OutsideRegion,
    ParseError,
    ThresholdProximity,
)
from .estimate import PartitionEstimate
from .hypergraph import LabeledHypergraph
from .instances import (
    ModelSpec,
    edge_cover_reduction,
    gen_random,
    generator_comment,
    parse,
    parse_edge_list,
    serialize,
)
from .oracle import exact_hardcore, exact_spin

EXIT_OK, EXIT_OTHER, EXIT_PARSE, EXIT_REGION, EXIT_PROXIMITY, EXIT_ORACLE = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for instance parse errors
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(x):
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def dumps(obj) -> str:
    return json.dumps(_num(obj), indent=2) + "\n"


def _load(path: str) -> tuple[LabeledHypergraph, ModelSpec]:
    if path == "-":
        return parse(sys.stdin.read())
    return parse(Path(path).read_text(encoding="utf-8"))


def _delta(G: LabeledHypergraph, override: int | None) -> int:
    d = max(2, G.max_degree)
    if override is None:
        return d
    if override < d:
        raise UsageError(f"--delta {override} is below the instance degree bound {d}")
    return override


def _estimate(G, spec, args) -> PartitionEstimate:
    delta = _delta(G, args.delta)
    eps = args.epsilon
    if eps is None and args.max_depth is None:
        raise UsageError("--epsilon is required unless --max-depth is given")
    if spec.model == "hardcore":
        return hardcore.partition_function(
            G, hardcore.HardcoreParams(spec.lam_f, delta), eps,
            force=args.force, max_depth=args.max_depth, alpha=args.alpha, c=args.c,
            memo=args.memo, threads=args.threads,
        )
    if args.alpha is not None or args.c is not None:
        raise UsageError("--alpha/--c apply to the hardcore model only")
    return twospin.partition_function(
        G, twospin.SpinParams(spec.lam_f, delta), eps,
        force=args.force, max_depth=args.max_depth, memo=args.memo, threads=args.threads,
    )


def _plan_fields(est: PartitionEstimate) -> dict:
    p = est.plan
    out = {"delta": p.delta}
    if est.model == "spin":
        out.update(beta_c=p.beta_c, delta_margin=p.delta_margin, w_hat=p.w_hat, c1=p.c1, c2=p.c2)
    out.update(c=p.c, alpha=p.alpha, C=p.bigC, L=p.L)
    return out


def _report(G, spec, est: PartitionEstimate, omit_timing: bool) -> dict:
    out = {"model": spec.model, "n": G.n, "m": G.m, "lambda": spec.lam_f}
    out.update(_plan_fields(est))
    out.update(logZ=est.log_z, Z=est.z)
    if not omit_timing:
        out["elapsed_ms"] = est.elapsed_ms
    out.update(nodes=est.nodes, guaranteed=est.guaranteed)
    return out


def _exact(G, spec):
    return exact_hardcore(G, spec.lam) if spec.model == "hardcore" else exact_spin(G, spec.lam)


def cmd_compute(args) -> dict:
    G, spec = _load(args.input)
    return _report(G, spec, _estimate(G, spec, args), args.omit_timing)


def cmd_exact(args) -> dict:
    G, spec = _load(args.input)
    t0 = time.perf_counter()
    res = _exact(G, spec)
    out = {"model": spec.model, "n": G.n, "m": G.m, "lambda": spec.lam_f,
           "logZ": res.log_z, "Z": float(res.z), "Z_rational": str(res.z)}
    if not args.omit_timing:
        out["elapsed_ms"] = (time.perf_counter() - t0) * 1000.0
    return out


def cmd_compare(args) -> dict:
    if args.epsilon is None:
        raise UsageError("compare needs --epsilon as the pass tolerance")
    G, spec = _load(args.input)
    res = _exact(G, spec)
    est = _estimate(G, spec, args)
    exact_log, est_log = res.log_z, est.log_z
    err = 0.0 if exact_log == est_log else abs(exact_log - est_log)
    out = _report(G, spec, est, args.omit_timing)
    out.update(logZ_exact=exact_log, logZ_est=est_log, abs_log_error=err, epsilon=args.epsilon,
               **{"pass": bool(err <= args.epsilon)})
    return out


def cmd_check(args) -> dict:
    if args.model == "hardcore":
        if args.lam is None:
            raise UsageError("check --model hardcore needs --lambda")
        thr = hardcore.lambda_critical(args.delta)
        return {"model": "hardcore", "delta": args.delta, "threshold": thr, "value": args.lam,
                "inside": args.lam < thr}
    if args.beta is None:
        raise UsageError("check --model spin needs --beta")
    thr = twospin.beta_critical(args.delta)
    return {"model": "spin", "delta": args.delta, "threshold": thr, "value": args.beta,
            "inside": thr <= args.beta <= 1.0}


def cmd_gen(args) -> str:
    G, spec = gen_random(
        args.n, args.m, args.max_degree, args.max_arity, args.seed, args.model,
        (args.label_lo, args.label_hi), args.lam, args.ising,
    )
    note = generator_comment(
        args.seed, n=args.n, m=args.m, max_degree=args.max_degree, max_arity=args.max_arity,
        labels=f"{args.label_lo}..{args.label_hi}" if args.model == "spin" else "none",
    )
    return serialize(G, spec, [note])


def cmd_reduce(args) -> str:
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text(encoding="utf-8")
    G, note = edge_cover_reduction(parse_edge_list(text))
    return serialize(G, ModelSpec("hardcore", args.lam), ["edge-cover reduction", note])


def _slope(xs, ys) -> float | None:
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < 2:
        return None
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    return sum((p[0] - mx) * (p[1] - my) for p in pts) / sxx


def bench_rows(model, sizes, delta, eps, lam, seed, max_arity=3, memo=True, edges_per_vertex=1.0):
    rows = []
    for n in sizes:
        m = max(1, int(edges_per_vertex * n))
        G, spec = gen_random(n, m, delta, max_arity, seed + n, model, (0.7, 1.0), lam)
        t0 = time.perf_counter()
        if model == "hardcore":
            est = hardcore.partition_function(G, hardcore.HardcoreParams(spec.lam_f, delta), eps, memo=memo)
        else:
            est = twospin.partition_function(G, twospin.SpinParams(spec.lam_f, delta), eps, memo=memo)
        rows.append({"model": model, "n": n, "m": G.m, "delta": delta, "epsilon": eps, "lambda": spec.lam_f,
                     "L": est.depth, "nodes": est.nodes, "wall_ms": (time.perf_counter() - t0) * 1000.0,
                     "logZ": est.log_z})
    return rows


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = bench_rows(args.model, sizes, args.delta, args.epsilon, args.lam, args.seed,
                      memo=not args.no_memo, edges_per_vertex=args.density)
    slope = _slope([r["n"] for r in rows], [r["nodes"] for r in rows])
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _num(v) for k, v in r.items()})
        buf.write(f"# loglog_slope_nodes={_num(slope)}\n")
        return buf.getvalue()
    return {"rows": rows, "loglog_slope_nodes": slope}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hyperfptas", description="Correlation-decay partition function estimates on hypergraphs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def engine_flags(p):
        p.add_argument("--input", required=True, help="instance file ('-' for stdin)")
        p.add_argument("--epsilon", type=float)
        p.add_argument("--force", action="store_true", help="run outside the guaranteed region")
        p.add_argument("--memo", action="store_true", help="memoise the recursion on (instance, vertex, depth)")
        p.add_argument("--max-depth", type=int, help="fixed depth budget (drops the guarantee)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--delta", type=int, help="degree bound (default: max(2, instance max degree))")
        p.add_argument("--alpha", type=float, help="hardcore decay rate override (needs --force)")
        p.add_argument("--c", type=float, help="hardcore edge-size exponent override (needs --force)")
        p.add_argument("--omit-timing", action="store_true", help="leave elapsed_ms out of the JSON")

    p = sub.add_parser("compute", help="run the FPTAS")
    engine_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("exact", help="brute-force partition function")
    p.add_argument("--input", required=True)
    p.add_argument("--omit-timing", action="store_true")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("compare", help="FPTAS against the exact oracle")
    engine_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("check", help="position of a parameter relative to its threshold")
    p.add_argument("--model", choices=["hardcore", "spin"], required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--beta", type=float)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="seeded random instance")
    p.add_argument("--model", choices=["hardcore", "spin"], default="hardcore")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--max-arity", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--label-lo", type=float, default=0.7)
    p.add_argument("--label-hi", type=float, default=1.0)
    p.add_argument("--ising", action="store_true", help="spin labels with gamma = beta")
    p.add_argument("--output", help="write here instead of stdout")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reduce", help="edge-cover reduction of a normal graph ('u v' lines)")
    p.add_argument("--input", required=True)
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bench", help="node counts and wall time over instance sizes")
    p.add_argument("--model", choices=["hardcore", "spin"], default="hardcore")
    p.add_argument("--sizes", default="8,16,32,64")
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--lambda", dest="lam", default="0.3")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--density", type=float, default=1.0, help="edges per vertex")
    p.add_argument("--no-memo", action="store_true")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_OTHER
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OutsideRegion as exc:
        print(f"outside the guaranteed region: {exc}", file=sys.stderr)
        return EXIT_REGION
    except ThresholdProximity as exc:
        print(f"threshold proximity: {exc}", file=sys.stderr)
        return EXIT_PROXIMITY
    except OracleTooLarge as exc:
        print(f"oracle guard: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (HyperFptasError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    text = result if isinstance(result, str) else dumps(result)
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
