#!/usr/bin/env python3
"""Sweep the imbalance weight xi and emit plot-ready CSV.

Usage: xi_sweep.py CASE [--r 3] [--points 25] [--lo 1e-8] [--hi 1e-3]

One row per xi: the greedy solution's J, sqrt(f) in MW, non-coherency
and cutset, for studying the trade-off frontier of a case.
"""

import argparse
import csv
import sys

import numpy as np

from gridisland.islanding import solve
from gridisland.metrics import build_context
from gridisland.netcase import dc_power_flow, parse_case
from gridisland.coherency import (
    build_K,
    build_model,
    inertia_matrix,
    kron_reduce,
    slow_modes,
)
from gridisland.refsel import select_references_greedy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("case")
    ap.add_argument("--r", type=int, default=3)
    ap.add_argument("--points", type=int, default=25)
    ap.add_argument("--lo", type=float, default=1e-8)
    ap.add_argument("--hi", type=float, default=1e-3)
    args = ap.parse_args()

    with open(args.case) as fh:
        net = parse_case(fh.read())
    op = dc_power_flow(net)
    _, U = slow_modes(
        inertia_matrix(net), build_K(net, op, kron_reduce(net, op)), args.r
    )
    refs = select_references_greedy(U, args.r).refs
    model = build_model(net, op, args.r, refs)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["xi", "J", "sqrt_f_mw", "H_bar", "swaps", "cutset"])
    for xi in [0.0] + list(np.geomspace(args.lo, args.hi, args.points)):
        ctx = build_context(net, op, model, float(xi))
        sol = solve(ctx, net, model)
        w.writerow([
            f"{xi:.6e}", f"{sol.J_value:.6f}", f"{sol.sqrt_f_mw:.3f}",
            f"{sol.H_bar:.6f}", sol.swap_count, ";".join(sorted(sol.cutset)),
        ])


if __name__ == "__main__":
    main()
