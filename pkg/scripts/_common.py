"""Shared helpers for the experiment scripts."""

import argparse
from pathlib import Path

from xdiff.harness.config import apply_env, load, resolve
from xdiff.harness.output import write_outputs

ROOT = Path(__file__).resolve().parents[1]


def parser(description, default_config):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", default=str(ROOT / "configs" / default_config))
    p.add_argument("--out", default=None)
    return p


def load_config(args):
    cfg = apply_env(load(args.config))
    if args.out:
        cfg = cfg.replace(output=args.out)
    return resolve(cfg)


def finish(cfg, report):
    out = write_outputs(cfg.output, cfg, report)
    status = "all checks passed" if report.passed else "FAILED: " + ", ".join(report.failed_checks())
    print(f"\n{status}; outputs in {out}")
    return 0 if report.passed else 1
