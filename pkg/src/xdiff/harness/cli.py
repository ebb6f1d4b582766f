"""Command line: ``xdiff <subcommand> --config FILE --out DIR``.

Exit status is 0 on success, 1 when a contract is violated or a check in
the report fails, and 2 on bad usage (including an unreadable config).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..errors import ContractError
from . import config as config_mod
from .experiments import EXPERIMENTS
from .gronwall import gronwall_fit
from .output import read_series, write_outputs

log = logging.getLogger("xdiff")

SUBCOMMANDS = {
    "run": "run",
    "weak-strong": "weak_strong",
    "gronwall": "gronwall",
    "pme": "pme_validation",
    "invariants": "invariants",
    "convergence": "convergence",
}


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xdiff", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value config file")
        sp.add_argument("--out", help="output directory (default: the config's 'output')")
        sp.add_argument("--preset", help="apply a named preset before the file's keys")
        sp.add_argument("--seed", type=int, help="override the random seed")
        if name == "gronwall":
            sp.add_argument("--series", help="fit an existing series.csv instead of running")
    return parser


def _load_config(args, kind: str) -> config_mod.ExperimentConfig:
    data = {}
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise _Usage(f"config file not found: {path}")
        data = config_mod.read_mapping(path.read_text())
    if args.preset:
        data["preset"] = args.preset
    # the subcommand decides the experiment kind
    data["kind"] = kind
    cfg = config_mod.apply_env(config_mod.from_mapping(data))
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.out:
        cfg = cfg.replace(output=args.out)
    return config_mod.resolve(cfg)


def _fit_series(path: str) -> int:
    rows = read_series(path)
    fit = gronwall_fit([(r["time"], r["H"]) for r in rows])
    print(json.dumps(fit.to_dict()))
    return 0 if fit.exp_bound_ok and fit.residual_max <= 0 else 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _Usage as exc:
        print(f"xdiff: usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    kind = SUBCOMMANDS[args.command]
    try:
        if kind == "gronwall" and getattr(args, "series", None):
            return _fit_series(args.series)
        cfg = _load_config(args, kind)
        report = EXPERIMENTS[kind](cfg)
        out = write_outputs(cfg.output, cfg, report)
    except _Usage as exc:
        print(f"xdiff: usage error: {exc}", file=sys.stderr)
        return 2
    except ContractError as exc:
        print(f"xdiff: contract violation {exc}", file=sys.stderr)
        return 1
    log.info("wrote %s", out)
    failed = report.failed_checks()
    if failed:
        print(f"xdiff: failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
