"""g = 0 runs against the porous-medium source solution."""

import sys

from _common import finish, load_config, parser

from xdiff.harness.experiments import pme_validation


def main():
    args = parser(__doc__, "pme.toml").parse_args()
    cfg = load_config(args)
    rep = pme_validation(cfg)
    print(f"support radius at t_end: {rep.data['support_radius_t_end']:.4f}")
    print(f"{'n':>6} {'dt':>10} {'L1 error':>12} {'order':>7} {'mass drift':>11}")
    for i, row in enumerate(rep.data["levels"]):
        order = "" if i == 0 else f"{rep.data['orders'][i - 1]:.3f}"
        print(f"{row['n_cells']:>6} {row['dt']:>10.3e} {row['L1_error']:>12.4e} {order:>7} {row['mass_drift']:>11.1e}")
    return finish(cfg, rep)


if __name__ == "__main__":
    sys.exit(main())
