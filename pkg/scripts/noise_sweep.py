"""W(theta, p) on a grid, plus the smallest grid p where each angle becomes free (W = 1)."""
import argparse
import csv
import json
import sys

import numpy as np

from fermionic_nonlinearity.channels import build_basis
from fermionic_nonlinearity.nonlinearity import NonlinearityCache


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--thetas", default="0.002,0.005,0.01,0.02,0.05,0.1,0.2,0.7853981633974483")
    ap.add_argument("--p-max", type=float, default=0.3)
    ap.add_argument("--p-points", type=int, default=121)
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    ap.add_argument("--thresholds", help="optional JSON path for the W = 1 thresholds")
    args = ap.parse_args()

    cache = NonlinearityCache(build_basis())
    thetas = [float(t) for t in args.thetas.split(",")]
    ps = np.linspace(0.0, args.p_max, args.p_points)
    thresholds = {}
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["theta", "p", "W"])
    for theta in thetas:
        thresholds[repr(theta)] = None
        for p in ps:
            W = cache.get(theta, float(p)).l1_norm
            w.writerow(["%.17g" % x for x in (theta, p, W)])
            if thresholds[repr(theta)] is None and W <= 1 + 1e-9:
                thresholds[repr(theta)] = float(p)
    if fh is not sys.stdout:
        fh.close()
    if args.thresholds:
        with open(args.thresholds, "w") as f:
            json.dump({"p_grid_max": args.p_max, "first_p_with_W_1": thresholds}, f, indent=2)


if __name__ == "__main__":
    main()
