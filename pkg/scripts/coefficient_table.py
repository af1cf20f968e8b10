#!/usr/bin/env python3
"""Print the high-SNR ABEP leading-term table, optionally as a CSV file.

One row per term: scenario, node, coefficient, and the per-link average
SNR exponents.  A node's asymptote is the sum of its rows; the smallest
exponent sum is its diversity order.
"""

import argparse

from ncrelay.cli import ExperimentSpec, run_experiment, write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", help="also write the table to this CSV path")
    args = ap.parse_args()

    header, rows = run_experiment(ExperimentSpec(mode="table1"))
    print(header)
    for row in rows:
        print(row)
    if args.out:
        write_csv(args.out, header, rows)
        print(f"wrote {args.out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
