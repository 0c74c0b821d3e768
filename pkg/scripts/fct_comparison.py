"""Flow completion times and utilization: traffic-aware direct versus oblivious VLB."""

import click

from vermilion.simulator import SimConfig, run_simulation

SETUPS = {
    "vermilion-direct": dict(schedule="vermilion", routing="direct"),
    "oblivious-vlb": dict(schedule="oblivious", routing="vlb"),
    "greedy-direct": dict(schedule="greedy", routing="direct"),
}


@click.command()
@click.option("--loads", default="0.05,0.1,0.2,0.4", show_default=True)
@click.option("--n", default=16, show_default=True)
@click.option("--duration", default=0.05, show_default=True, help="seconds of arrivals")
@click.option("--seed", default=1, show_default=True)
def main(loads, n, duration, seed):
    click.echo("setup,load,p99_short_us,p99_long_us,mean_utilization,unfinished")
    for load in (float(x) for x in loads.split(",")):
        for name, extra in SETUPS.items():
            cfg = SimConfig(n=n, load=load, duration=duration, drain=0.5, seed=seed, **extra)
            rep = run_simulation(cfg)
            s = rep.summary()

            def us(block):
                return f"{block['p99_ns'] / 1e3:.1f}" if block["p99_ns"] is not None else "nan"

            click.echo(f"{name},{load},{us(s['short'])},{us(s['long'])},{s['mean_utilization']:.4f},{s['unfinished']}")


if __name__ == "__main__":
    main()
