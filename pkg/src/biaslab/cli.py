"""Command-line front end: train, bias, closed-form, compare."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import experiments
from .config import ConfigError, load_config

OUT_ROOT_ENV = "BIASLAB_OUT"


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as e:
        raise ConfigError(f"bad numeric list {text!r}: {e}") from e


def _out_root(args) -> Path | None:
    if getattr(args, "out", None):
        return Path(args.out)
    env = os.environ.get(OUT_ROOT_ENV)
    return Path(env) if env else None


def _resolve_seeds(cfg, args) -> list[int]:
    return [args.seed] if args.seed is not None else cfg.seeds


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    root = _out_root(args)
    for seed in _resolve_seeds(cfg, args):
        d = experiments.run_train(cfg, seed, root)
        print(f"run complete: {d}")
    return 0


def cmd_bias(args) -> int:
    cfg = load_config(args.config)
    root = _out_root(args)
    for seed in _resolve_seeds(cfg, args):
        d = experiments.run_bias(cfg, seed, root)
        print(f"bias run complete: {d}")
    return 0


def cmd_closed_form(args) -> int:
    mus = _parse_floats(args.mu)
    thetas = _parse_floats(args.theta)
    betas = _parse_floats(args.beta)
    if not (mus and thetas and betas):
        raise ConfigError("mu, theta and beta grids must be nonempty")
    for b in betas:
        if not 0.0 <= b <= 1.0:
            raise ConfigError(f"beta {b} outside [0, 1]")
    rows = experiments.closed_form_rows(
        mus, thetas, betas, mc_n=args.mc_n, seed=args.seed or 0
    )
    out = Path(args.out) if args.out else Path("closed_form.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    experiments.write_closed_form_csv(out, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_compare(args) -> int:
    dirs = experiments.discover_run_dirs([Path(p) for p in args.run_dirs])
    summary = experiments.summarize_runs(dirs, last=args.last)
    print(experiments.format_summary_table(summary))
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        experiments.write_summary_csv(out, summary)
        print(f"wrote summary to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="biaslab",
        description="Estimation-bias laboratory for deterministic policy "
        "gradient critics",
    )
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, needs_cfg in (
        ("train", cmd_train, True),
        ("bias", cmd_bias, True),
    ):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=needs_cfg)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, help="output root override")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("closed-form")
    sp.add_argument("--mu", default="0.0", help="comma list of means")
    sp.add_argument("--theta", default="1.0", help="comma list of deviations")
    sp.add_argument("--beta", default="0.5", help="comma list of weights")
    sp.add_argument("--mc-n", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_closed_form)

    sp = sub.add_parser("compare")
    sp.add_argument("run_dirs", nargs="+")
    sp.add_argument("--last", type=int, default=10)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # runtime failure contract: exit code 1
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
