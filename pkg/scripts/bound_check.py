"""Check the single-hop lower bound (k-1)/k * duty on random saturated matrices."""

import click

from vermilion.schedule import build_vermilion_schedule, emulated_capacities
from vermilion.throughput import saturated_matrices, single_hop_throughput, single_hop_bound


@click.command()
@click.option("--n", default=16, show_default=True)
@click.option("--degree", default=4, show_default=True)
@click.option("--k", default=3, show_default=True)
@click.option("--trials", default=200, show_default=True)
@click.option("--seed", default=2024, show_default=True)
@click.option("--slot-ns", default=4500, show_default=True)
@click.option("--reconfig-ns", default=500, show_default=True)
def main(n, degree, k, trials, seed, slot_ns, reconfig_ns):
    mats = saturated_matrices(n, trials, seed, 25e9, degree)
    worst, violations, bound = None, 0, None
    for i, m in enumerate(mats):
        s = build_vermilion_schedule(m, k, degree, slot_ns, reconfig_ns, seed=i)
        bound = single_hop_bound(k, s.duty)
        theta = single_hop_throughput(m, emulated_capacities(s, m.c)).theta
        violations += theta < bound
        worst = theta if worst is None else min(worst, theta)
    click.echo(f"trials={trials} n={n} d={degree} k={k} bound={bound:.6f} min_theta={worst:.6f} violations={violations}")


if __name__ == "__main__":
    main()
