"""W(theta) for noiseless ZZ rotations, LP against the closed-form decomposition."""
import argparse
import csv
import math
import sys

import numpy as np

from fermionic_nonlinearity.channels import build_basis
from fermionic_nonlinearity.nonlinearity import nonlinearity, reference_l1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=63)
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = ap.parse_args()

    basis = build_basis()
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["theta", "W_lp", "W_reference", "gap"])
    for theta in np.linspace(0.0, math.pi / 2, args.points):
        lp, _ = nonlinearity(float(theta), 0.0, basis)
        ref = reference_l1(float(theta))
        w.writerow(["%.17g" % x for x in (theta, lp, ref, lp - ref)])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
