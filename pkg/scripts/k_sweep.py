"""Minimum single-hop throughput versus k, written as CSV (k,min_theta,bound)."""

import csv
import sys

import click

from vermilion.throughput import k_sweep


@click.command()
@click.option("--kmin", default=2, show_default=True)
@click.option("--kmax", default=8, show_default=True)
@click.option("--n", default=16, show_default=True)
@click.option("--degree", default=4, show_default=True)
@click.option("--trials", default=20, show_default=True)
@click.option("--seed", default=1, show_default=True)
def main(kmin, kmax, n, degree, trials, seed):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["k", "min_theta", "bound"])
    for row in k_sweep(range(kmin, kmax + 1), n, degree, trials, seed):
        w.writerow([row.k, f"{row.min_theta:.6f}", f"{row.bound:.6f}"])


if __name__ == "__main__":
    main()
