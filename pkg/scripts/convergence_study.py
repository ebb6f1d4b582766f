"""Manufactured-solution convergence in space and time."""

import sys

from _common import finish, load_config, parser

from xdiff.harness.experiments import convergence_experiment


def _table(label, steps, errors, orders):
    print(label)
    for i, (s, e) in enumerate(zip(steps, errors)):
        order = "" if i == 0 else f"{orders[i - 1]:.3f}"
        print(f"  {s:>10.4e} {e:>12.4e} {order:>7}")


def main():
    args = parser(__doc__, "convergence.toml").parse_args()
    cfg = load_config(args)
    rep = convergence_experiment(cfg)
    sp, tm = rep.data["spatial"], rep.data["temporal"]
    _table("spatial (h, L2 error, order), dt = h^2:", sp["h"], sp["errors"], sp["orders"])
    _table(f"temporal (dt, L2 error, order), n = {tm['n_cells']}:", tm["dt"], tm["errors"], tm["orders"])
    return finish(cfg, rep)


if __name__ == "__main__":
    sys.exit(main())
