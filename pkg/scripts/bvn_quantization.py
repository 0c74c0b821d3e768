"""Schedule length and dropped demand when BvN terms are forced onto a fixed slot quantum."""

import click
import numpy as np

from vermilion.decomposition import bvn_decompose, bvn_quantize
from vermilion.matrix import random_saturated


@click.command()
@click.option("--n", default=16, show_default=True)
@click.option("--trials", default=20, show_default=True)
@click.option("--quanta", default="0.001,0.005,0.01,0.05,0.1", show_default=True)
@click.option("--seed", default=0, show_default=True)
def main(n, trials, quanta, seed):
    rng = np.random.default_rng(seed)
    mats = [random_saturated(n, rng, terms=n) for _ in range(trials)]
    decomps = [bvn_decompose(m) for m in mats]
    click.echo("quantum,mean_terms,mean_length,mean_dropped_mass,max_dropped_mass")
    for q in (float(x) for x in quanta.split(",")):
        reps = [bvn_quantize(t, q)[1] for t in decomps]
        lengths = [r.schedule_length for r in reps]
        dropped = [r.dropped_mass for r in reps]
        terms = np.mean([len(t) for t in decomps])
        click.echo(f"{q},{terms:.1f},{np.mean(lengths):.1f},{np.mean(dropped):.4f},{max(dropped):.4f}")
    d = np.array([[0.999, 0.001], [0.001, 0.999]])
    for q in (0.001, 0.01):
        r = bvn_quantize(bvn_decompose(d), q)[1]
        click.echo(f"# two-term example at quantum {q}: length={r.schedule_length} dropped={r.dropped_mass:.3f}")


if __name__ == "__main__":
    main()
