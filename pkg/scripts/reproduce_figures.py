"""Write the curves behind the three success-probability figures as CSV.

    python scripts/reproduce_figures.py --out figures
"""

import argparse

from qwsimplex import experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--m-list", default="100,200,300")
    ap.add_argument("--gamma-mode", default="approx")
    args = ap.parse_args()
    ms = [int(m) for m in args.m_list.split(",")]
    for fig in experiments.FIGURE_IDS:
        paths = experiments.run_figure(fig, args.out, ms, gamma_mode=args.gamma_mode)
        print(paths[-1].read_text(), end="")


if __name__ == "__main__":
    main()
