"""Command-line entry point wiring the modules into reproducible experiments.

Subcommands: classify, dist, besicovitch (search | verify | cover),
certify-lemmas, countable-space, report.  All outputs are UTF-8 JSON with
rationals serialized as "p/q" strings; every numeric result is tagged with the
backend that produced it.  Seeds are explicit (no wall-clock defaults), so
identical configurations produce byte-identical reports up to timing fields.

Exit codes: 0 success / valid certificate, 2 certificate rejected, 64 bad
configuration or arguments, 70 internal solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

EXIT_OK = 0
EXIT_REJECTED = 2
EXIT_CONFIG = 64
EXIT_SOLVER = 70


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# group and distance construction from flags
# ---------------------------------------------------------------------------

def _build_group(args):
    from . import algebra
    name = args.group
    if name is None:
        raise ConfigError("--group is required")
    if os.path.exists(name):
        return algebra.load_group(name)
    if name == "abelian":
        if not args.weights:
            raise ConfigError("abelian group needs --weights")
        return algebra.abelian_group([Fraction(w) for w in args.weights.split(",")])
    if name == "heisenberg":
        return algebra.heisenberg_group(int(args.n))
    if name == "heisenberg_nonstandard":
        if args.alpha is None:
            raise ConfigError("heisenberg_nonstandard needs --alpha")
        return algebra.heisenberg_nonstandard_group(Fraction(args.alpha))
    if name == "free_step2":
        if args.rank is None:
            raise ConfigError("free_step2 needs --rank")
        return algebra.free_step2_group(int(args.rank))
    if name == "step3_rank3":
        return algebra.step3_rank3_group()
    raise ConfigError(f"unknown group '{name}' (not a tag, not a file)")


def _build_distance(args, group):
    from . import metrics
    kind = args.kind
    if kind == "hs":
        return metrics.HSDistance(group, Fraction(args.R))
    if kind == "cc_h1":
        return metrics.CCHeisenbergDistance(a=float(args.scale))
    if kind == "power":
        base = metrics.HSDistance(group, Fraction(args.R))
        return metrics.PowerDistance(base, Fraction(args.t))
    if kind == "snowflake_product_max":
        return metrics.product_max_distance(
            metrics.euclidean_line(), metrics.snowflake_line(Fraction(args.t)))
    if kind == "snowflake_product_lp":
        return metrics.lp_combination_distance(
            metrics.euclidean_line(), metrics.snowflake_line(Fraction(args.t)),
            Fraction(args.r_exp))
    raise ConfigError(f"unknown distance kind '{kind}'")


def _parse_point(text, exact=True):
    parts = [t for t in str(text).split(",") if t != ""]
    if exact:
        try:
            return tuple(Fraction(t) for t in parts)
        except ValueError:
            return tuple(float(t) for t in parts)
    return tuple(float(t) for t in parts)


def _emit(payload, args):
    text = json.dumps(payload, indent=2, sort_keys=True)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args):
    from .structure import classify_group
    group = _build_group(args)
    payload = classify_group(group)
    payload["group"] = group.name
    _emit(payload, args)
    return EXIT_OK


def cmd_dist(args):
    from .metrics import ExactnessError
    group = _build_group(args)
    d = _build_distance(args, group)
    p = _parse_point(args.p)
    q = _parse_point(args.q)
    value = d.value(p, q)
    backend = "float"
    from .scalars import all_exact
    if all_exact(p) and all_exact(q):
        try:
            r_probe = Fraction(value).limit_denominator(1 << 40)
            d.compare(p, q, r_probe if r_probe > 0 else Fraction(1))
            backend = "exact-comparable"
        except (ExactnessError, ValueError):
            backend = "float"
    _emit({"value": value, "backend": backend,
           "kind": d.kind, "group": group.name}, args)
    return EXIT_OK


def _load_family(path, dist):
    from .besicovitch import BesicovitchFamily
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    mode = data.get("mode", "exact")
    exact = mode == "exact"

    def parse_pt(p):
        if isinstance(p, (int, float)):
            return p
        return tuple(Fraction(x) if exact else float(x) for x in p)

    centers = tuple(parse_pt(c) for c in data["centers"])
    radii = tuple(Fraction(r) if exact else float(r) for r in data["radii"])
    witness = parse_pt(data["witness"])
    return BesicovitchFamily(centers, radii, witness, dist, mode=mode,
                             epsilon=float(data.get("epsilon", 1e-7)))


def cmd_besicovitch(args):
    from . import besicovitch as bz
    group = _build_group(args)
    d = _build_distance(args, group)
    if args.action == "verify":
        fam = _load_family(args.family, d)
        cert = bz.verify_family(fam)
        _emit(cert.to_json(), args)
        if not cert.valid:
            for v in cert.violations:
                print(f"violation: {v}", file=sys.stderr)
            return EXIT_REJECTED
        return EXIT_OK
    if args.action == "search":
        jobs = args.jobs
        seeds = [args.seed + 10_000 * w for w in range(jobs)] if jobs > 1 else [args.seed]
        results = []
        if jobs > 1:
            from concurrent.futures import ProcessPoolExecutor
            budgets = [args.budget // jobs] * jobs
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                futs = [ex.submit(_search_worker, args, s, b)
                        for s, b in zip(seeds, budgets)]
                results = [f.result() for f in futs]
        else:
            results = [_search_worker(args, seeds[0], args.budget)]
        best = bz.merge_search_results(results)
        _emit(best.to_json(), args)
        return EXIT_OK
    if args.action == "cover":
        with open(args.points, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        pts = [tuple(float(x) for x in p) for p in data["points"]]
        radii = [float(r) for r in data["radii"]]
        rep = bz.greedy_cover(pts, radii, d)
        _emit(rep.to_json(), args)
        return EXIT_OK
    raise ConfigError(f"unknown besicovitch action '{args.action}'")


def _search_worker(args, seed, budget):
    from . import besicovitch as bz
    group = _build_group(args)
    d = _build_distance(args, group)
    return bz.search_family(d, budget, strategy=args.strategy, seed=seed,
                            exact=not args.float_mode)


def cmd_certify_lemmas(args):
    from .certificates import RegionParams, lemma_sweep
    params = RegionParams(r=int(args.rank), R=Fraction(args.R))
    rep = lemma_sweep(args.lemma, params, sample_count=int(args.samples),
                      seed=int(args.seed))
    _emit(rep.to_json(), args)
    return EXIT_OK if rep.ok else EXIT_REJECTED


def cmd_countable_space(args):
    from .besicovitch import (countable_space, countable_space_ball_audit,
                              countable_space_triangle_audit,
                              countable_space_two_ball_audit)
    n = int(args.n)
    payload = {
        "n": n,
        "triangle_exact": countable_space_triangle_audit(min(n, args.triangle_limit)),
        "ball_structure_exact": countable_space_ball_audit(n),
        "two_ball_audit": countable_space_two_ball_audit(min(n, 200), grid=args.grid),
    }
    if n <= 64:
        space = countable_space(n)
        payload["validation_issues"] = space.validate()
    _emit(payload, args)
    ok = payload["triangle_exact"] and payload["ball_structure_exact"] and \
        payload["two_ball_audit"]["ok"]
    return EXIT_OK if ok else EXIT_REJECTED


def cmd_report(args):
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    sub = config.pop("subcommand", None)
    if sub is None:
        raise ConfigError("config file needs a 'subcommand' field")
    argv = [sub]
    for key, val in config.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                argv.append(flag)
        elif key in ("action",):
            argv.insert(1, str(val))
        else:
            argv.extend([flag, str(val)])
    parser = build_parser()
    sub_args = parser.parse_args(argv)
    started = time.time()
    code = sub_args.func(sub_args)
    sys.stderr.write(json.dumps({"elapsed_s": time.time() - started}) + "\n")
    return code


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_group_flags(p):
    p.add_argument("--group", help="built-in tag or JSON file path")
    p.add_argument("--weights", help="comma-separated weights for abelian groups")
    p.add_argument("--n", type=int, default=1, help="Heisenberg index")
    p.add_argument("--alpha", help="non-standard grading exponent")
    p.add_argument("--rank", type=int, help="free step-2 rank")


def _add_dist_flags(p):
    p.add_argument("--kind", default="hs",
                   choices=["hs", "cc_h1", "power", "snowflake_product_max",
                            "snowflake_product_lp"])
    p.add_argument("--R", default="1", help="Euclidean unit-ball radius parameter")
    p.add_argument("--t", default="2", help="power / snowflake exponent")
    p.add_argument("--r", "--r-exp", dest="r_exp", default="1", help="lp exponent")
    p.add_argument("--scale", default="1", help="sub-Riemannian scale")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="carnot-bcp",
        description="graded groups, homogeneous quasi-distances, and "
                    "Besicovitch covering certificates")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("classify", help="decide the commuting-layers criterion")
    _add_group_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("dist", help="evaluate a quasi-distance")
    _add_group_flags(p)
    _add_dist_flags(p)
    p.add_argument("--p", required=True, help="comma-separated coordinates")
    p.add_argument("--q", required=True, help="comma-separated coordinates")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("besicovitch", help="search, verify, or cover")
    p.add_argument("action", choices=["search", "verify", "cover"])
    _add_group_flags(p)
    _add_dist_flags(p)
    p.add_argument("--family", help="family JSON file (verify)")
    p.add_argument("--points", help="points+radii JSON file (cover)")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--strategy", default="annealed", choices=["random", "annealed"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--float-mode", action="store_true",
                   help="margin-mode certificates instead of exact")
    p.add_argument("--jobs", type=int,
                   default=int(os.environ.get("CARNOT_BCP_JOBS", "1")))
    p.add_argument("--out")
    p.set_defaults(func=cmd_besicovitch)

    p = sub.add_parser("certify-lemmas", help="hypothesis-constrained lemma sweeps")
    p.add_argument("--lemma", required=True,
                   choices=["aq", "small_angles", "away", "near2a", "inbetween"])
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--R", default="1")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify_lemmas)

    p = sub.add_parser("countable-space", help="audits of the countable example")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--triangle-limit", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_countable_space)

    p = sub.add_parser("report", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
