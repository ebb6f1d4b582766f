"""Seeded property batteries; prints worst margins and the report hash."""

import json
import sys

from _common import finish, load_config, parser

from xdiff.harness.experiments import invariants_suite


def main():
    args = parser(__doc__, "invariants.toml").parse_args()
    cfg = load_config(args)
    rep = invariants_suite(cfg)
    for name, ok in rep.checks.items():
        print(f"  {'ok  ' if ok else 'FAIL'} {name}")
    print(json.dumps({k: v for k, v in rep.data.items() if k != "hash"}, indent=1, default=float))
    print(f"hash {rep.data['hash']}")
    return finish(cfg, rep)


if __name__ == "__main__":
    sys.exit(main())
