"""Refinement table of H(u_h | u_ref) against a fine positive run."""

import sys

from _common import finish, load_config, parser

from xdiff.harness.experiments import weak_strong_experiment


def main():
    args = parser(__doc__, "weak_strong.toml").parse_args()
    cfg = load_config(args)
    rep = weak_strong_experiment(cfg)
    print(f"reference: n={rep.data['reference_cells']}, dt={rep.data['reference_dt']:.3e}, "
          f"min value {rep.data['reference_sigma_lower']:.3f}")
    print(f"{'n':>6} {'dt':>10} {'H(0)':>11} {'H(t_end)':>11} {'max H':>11} {'ratio':>7}")
    prev = None
    for row in rep.data["levels"]:
        ratio = "" if prev is None else f"{prev / row['H_t_end']:.2f}"
        print(f"{row['n_cells']:>6} {row['dt']:>10.2e} {row['H_initial']:>11.3e} "
              f"{row['H_t_end']:>11.3e} {row['H_max']:>11.3e} {ratio:>7}")
        prev = row["H_t_end"]
    print(f"equal-resolution identical inputs: max H = {rep.data['identical_inputs_H_max']:.1e}")
    return finish(cfg, rep)


if __name__ == "__main__":
    sys.exit(main())
