"""Command-line front end: generate, run, aggregate, report.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import config as cfgmod
from . import results, simulate
from .datasets import GENERATORS, generate, save_pool
from .errors import ParetoALError, RunError, SchemaError

log = logging.getLogger("pareto_al")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _default_out(arg):
    if arg:
        return Path(arg)
    env = os.environ.get(cfgmod.OUTPUT_DIR_ENV)
    return Path(env) if env else None


def cmd_generate(args) -> int:
    out = _default_out(args.out)
    if out is None:
        return _fail(EXIT_USAGE, f"--out not given and ${cfgmod.OUTPUT_DIR_ENV} unset")
    pool = generate(args.case, args.n, args.seed)
    try:
        paths = save_pool(pool, out)
    except OSError as exc:
        return _fail(EXIT_RUNTIME, f"cannot write pool to {out}: {exc}")
    s = pool.summary()
    print(f"{s['name']}: n={s['n']} D={s['D']} frontier={s['frontier_size']} "
          f"max_stratum={s['max_stratum']}")
    for p in paths:
        print(f"  wrote {p}")
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        cfg, base = cfgmod.load_config(args.config)
        out = cfgmod.resolve_output_dir(cfg, base, args.out)
        pool = cfgmod.build_pool(cfg, base)
        try:
            cfgmod.check_sizes(pool.n, cfg.C, cfg.K)
        except ValueError as exc:
            raise cfgmod.ConfigError(f"{args.config}: {exc}") from None
        templates = {
            s.label: simulate.RunConfig(pool=pool, acquisition=s.to_acquisition(),
                                        surrogate=cfg.surrogate.to_surrogate(), C=cfg.C, K=cfg.K,
                                        shell_depth=cfg.shell_depth)
            for s in cfg.strategies
        }
    except (cfgmod.ConfigError, ParetoALError, FileNotFoundError) as exc:
        return _fail(EXIT_USAGE, str(exc))

    ensembles = {}
    for label, template in templates.items():
        log.info("running %s: R=%d C=%d K=%d", label, cfg.R, cfg.C, cfg.K)
        try:
            res = simulate.run_ensemble(template, cfg.R, cfg.master_seed, workers=args.threads)
        except RunError as exc:
            print(json.dumps({"strategy": label, "run_seed": exc.run_seed, "k": exc.iteration,
                              "error": str(exc), "config": cfg.resolved()}, indent=2),
                  file=sys.stderr)
            return _fail(EXIT_RUNTIME, f"run failed for strategy {label}")
        res.strategy = label
        for t in res.trajectories:
            t.strategy = label
        ensembles[label] = res
    manifest = results.write_run_dir(out, pool, ensembles, cfg.resolved())
    print(f"wrote {len(manifest['files'])} trajectories and {results.MANIFEST_FILE} to {out}")
    return EXIT_OK


def cmd_aggregate(args) -> int:
    try:
        manifest, pool, ens = results.load_run_dir(Path(args.in_dir))
    except ParetoALError as exc:
        return _fail(EXIT_USAGE, str(exc))
    results.write_aggregates(Path(args.out), pool, ens, manifest)
    print(f"aggregated {len(ens)} strategies x R={manifest['R']} into {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        paths = results.write_report(Path(args.out), Path(args.in_dir))
    except SchemaError as exc:
        return _fail(EXIT_USAGE, str(exc))
    if args.plots:
        from .plots import render_all

        paths += render_all(Path(args.out))
    for p in paths:
        print(f"  wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pareto-al", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic candidate pool")
    g.add_argument("--case", required=True, choices=sorted(GENERATORS))
    g.add_argument("--n", type=int, default=500)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help=f"output directory (default ${cfgmod.OUTPUT_DIR_ENV})")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run AL ensembles from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="override the config's output_dir")
    r.add_argument("--threads", type=int, default=1,
                   help="parallel worker processes (does not affect results)")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("aggregate", help="summarize a run directory")
    a.add_argument("--in", dest="in_dir", required=True)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_aggregate)

    rep = sub.add_parser("report", help="emit long-format curve tables from aggregates")
    rep.add_argument("--in", dest="in_dir", required=True)
    rep.add_argument("--out", required=True)
    rep.add_argument("--plots", action="store_true", help="also render PNG figures")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "n", 2) < 2:
        return _fail(EXIT_USAGE, "--n must be >= 2")
    if getattr(args, "threads", 1) < 1:
        return _fail(EXIT_USAGE, "--threads must be >= 1")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
