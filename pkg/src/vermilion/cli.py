"""Command-line entry point.

Every subcommand that writes files also writes a run manifest: the resolved
parameters, input digests and tool version. ``vermilion replay MANIFEST``
reruns the command from it and reproduces the outputs byte for byte.

Exit codes: 0 ok, 2 bad input, 3 internal invariant breach.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from .decomposition import bvn_decompose, bvn_quantize, bvn_reconstruct
from .errors import InvariantError, MatrixFormatError, ValidationError, ZeroDemand
from .matrix import (
    format_matrix_csv,
    max_line_sum,
    normalize,
    parse_matrix_entries,
    parse_matrix_text,
    scale,
    validate_hose,
)
from .rounding import is_valid_rounding, round_matrix
from .schedule import (
    DEFAULT_K,
    DEFAULT_RECONFIG_NS,
    DEFAULT_SLOT_NS,
    PeriodicSchedule,
    build_greedy_schedule,
    build_oblivious_schedule,
    check_schedule,
    emulated_capacities,
    vermilion_pipeline,
)
from .simulator import load_config, parse_config, run_simulation
from .throughput import k_sweep, max_concurrent_flow, single_hop_throughput
from .topology import build_emulated


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ValidationError as e:
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            ctx.exit(2)
        except InvariantError as e:
            click.echo(f"internal error: {type(e).__name__}: {e}", err=True)
            ctx.exit(3)


def _digest_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(path, subcommand: str, params: dict, inputs) -> None:
    manifest = {
        "subcommand": subcommand,
        "params": params,
        "inputs": {str(p): _digest_file(p) for p in inputs if p},
        "version": __version__,
        "seed": params.get("seed"),
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _read_matrix(path, c=None, d_hat=None):
    """Load a traffic matrix. Without declared units, fall back to d = 1 and
    c = max line sum, i.e. read the file as relative demand on a saturated
    hose; throughput is unit-free as long as demand and capacity share c."""
    entries, fc, fd = parse_matrix_entries(Path(path).read_text(), c, d_hat)
    if fc is None or fd is None:
        fc = fc if fc is not None else (max_line_sum(entries) or 1.0)
        fd = fd if fd is not None else 1
    return validate_hose(entries, float(fc), int(fd))


# --- subcommand bodies (shared by the CLI and replay) -------------------------


def do_schedule(p: dict) -> None:
    baseline = p["baseline"]
    if baseline == "rotornet":
        n = p["n"]
        if n is None:
            if not p["matrix"]:
                raise ValidationError("rotornet baseline needs --n or --matrix")
            n = _read_matrix(p["matrix"]).n
        sched = build_oblivious_schedule(n, p["degree"] or 1, p["slot_ns"], p["reconfig_ns"])
    else:
        if not p["matrix"]:
            raise ValidationError(f"{baseline} schedule needs --matrix")
        m = _read_matrix(p["matrix"], p["c"], p["degree"])
        d_hat = p["degree"] or m.d_hat
        if baseline == "greedy":
            sched = build_greedy_schedule(m, d_hat, p["slots"], p["slot_ns"], p["reconfig_ns"])
        else:
            sched = vermilion_pipeline(m, p["k"], d_hat, p["slot_ns"], p["reconfig_ns"], p["seed"]).schedule
    _emit(sched.to_json(), p["out"])


def do_throughput(p: dict) -> None:
    if p["sweep"]:
        ks = _parse_k_range(p["sweep"])
        rows = _sweep_rows(ks, p)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "min_theta", "bound"])
        for r in rows:
            w.writerow([r.k, repr(r.min_theta), repr(r.bound)])
        _emit(buf.getvalue(), p["out"])
        return
    if not p["matrix"] or not p["schedule"]:
        raise ValidationError("throughput needs --matrix and --schedule (or --sweep)")
    m = _read_matrix(p["matrix"], p["c"], p["degree"])
    if m.is_zero():
        raise ZeroDemand("traffic matrix has no demand")
    sched = PeriodicSchedule.from_json(Path(p["schedule"]).read_text())
    if sched.n != m.n:
        raise ValidationError(f"schedule has n={sched.n}, matrix has n={m.n}")
    cap = emulated_capacities(sched, m.c)
    if p["routing"] == "direct":
        rep = single_hop_throughput(m, cap)
    else:
        rep = max_concurrent_flow(cap, m, p["epsilon"])
    _emit(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n", p["out"])


def _parse_k_range(text: str) -> list[int]:
    key, _, rng = text.partition("=")
    if key.strip() != "k" or ".." not in rng:
        raise ValidationError(f"--sweep expects k=A..B, got {text!r}")
    a, b = rng.split("..")
    try:
        lo, hi = int(a), int(b)
    except ValueError:
        raise ValidationError(f"--sweep expects integers, got {text!r}") from None
    if lo < 2 or hi < lo:
        raise ValidationError("--sweep range must satisfy 2 <= A <= B")
    return list(range(lo, hi + 1))


def _sweep_one(args):
    k, p = args
    return k_sweep([k], p["n"], p["degree"] or 4, p["trials"], p["seed"], p["c"] or 25e9,
                   p["slot_ns"], p["reconfig_ns"])[0]


def _sweep_rows(ks, p):
    if p["jobs"] > 1:
        with ProcessPoolExecutor(p["jobs"]) as ex:
            return list(ex.map(_sweep_one, [(k, p) for k in ks]))
    return [_sweep_one((k, p)) for k in ks]


def do_simulate(p: dict) -> None:
    cfg = load_config(p["config"])
    if p["seed"] is not None:
        cfg.seed = p["seed"]
        cfg.validate()
    report = run_simulation(cfg)
    report.write(p["out"])
    (Path(p["out"]) / "config.resolved").write_text(cfg.to_text())


def do_bvn(p: dict) -> None:
    rows = [r for r in Path(p["matrix"]).read_text().splitlines() if r.strip() and not r.lstrip().startswith("#")]
    try:
        d = np.array([[float(x) for x in r.split(",")] for r in rows])
    except ValueError as e:
        raise MatrixFormatError(f"bad matrix: {e}") from None
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MatrixFormatError("bvn input must be a square matrix")
    terms = bvn_decompose(d, p["tol"])
    n = d.shape[0]
    out = {
        "n": n,
        "terms": [{"lambda": t.coefficient, "dst": list(t.permutation.dst)} for t in terms],
        "lambda_sum": float(sum(t.coefficient for t in terms)),
        "term_count": len(terms),
        "term_bound": n * n - 2 * n + 2,
        "max_reconstruction_error": float(np.abs(bvn_reconstruct(terms, n) - d).max()) if terms else 0.0,
    }
    if p["quantum"]:
        _, rep = bvn_quantize(terms, p["quantum"])
        out["quantization"] = rep.to_dict()
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", p["out"])
    if p["quantum_sweep"]:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantum", "schedule_length", "dropped_mass", "dropped_terms"])
        for q in _floats(p["quantum_sweep"]):
            _, rep = bvn_quantize(terms, q)
            w.writerow([repr(q), rep.schedule_length, repr(rep.dropped_mass), rep.dropped_terms])
        Path(p["sweep_out"]).write_text(buf.getvalue()) if p["sweep_out"] else click.echo(buf.getvalue(), nl=False)


def _floats(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None
    if any(v <= 0 for v in vals):
        raise ValidationError("quanta must be positive")
    return vals


def do_round(p: dict) -> None:
    m = _read_matrix(p["matrix"], p["c"], p["degree"])
    sm = scale(normalize(m), p["k"])
    r = round_matrix(sm)
    if not is_valid_rounding(sm.entries, r.entries):
        raise InvariantError("rounding left the floor/ceil envelope")
    _emit(format_matrix_csv(r.entries), p["out"])


def do_topology(p: dict) -> None:
    m = _read_matrix(p["matrix"], p["c"], p["degree"])
    r = round_matrix(scale(normalize(m), p["k"]))
    g = build_emulated(r, p["k"], p["seed"])
    _emit(format_matrix_csv(g.edge_mult), p["out"])


COMMANDS = {
    "schedule": (do_schedule, ("matrix",)),
    "throughput": (do_throughput, ("matrix", "schedule")),
    "simulate": (do_simulate, ("config",)),
    "bvn": (do_bvn, ("matrix",)),
    "round": (do_round, ("matrix",)),
    "topology": (do_topology, ("matrix",)),
}


def _run(name: str, params: dict, manifest_path) -> None:
    fn, input_keys = COMMANDS[name]
    fn(params)
    if manifest_path:
        _write_manifest(manifest_path, name, params, [params.get(k) for k in input_keys])


def _manifest_for(out) -> str | None:
    return f"{out}.manifest.json" if out else None


# --- click wiring -------------------------------------------------------------

_timing = [
    click.option("--slot-ns", default=DEFAULT_SLOT_NS, show_default=True, type=int),
    click.option("--reconfig-ns", default=DEFAULT_RECONFIG_NS, show_default=True, type=int),
]


def _with(options):
    def deco(f):
        for o in reversed(options):
            f = o(f)
        return f

    return deco


@click.group(cls=_Group)
@click.version_option(__version__)
def main():
    """Traffic-aware periodic circuit schedules, throughput oracles, simulation."""


@main.command()
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False))
@click.option("--k", default=DEFAULT_K, show_default=True, type=click.IntRange(min=2))
@click.option("--degree", type=click.IntRange(min=1), help="physical links per node (d)")
@click.option("--c", type=float, help="link capacity in bits/s (overrides the file)")
@_with(_timing)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--baseline", type=click.Choice(["vermilion", "rotornet", "greedy"]), default="vermilion")
@click.option("--n", type=click.IntRange(min=2), help="node count for the rotornet baseline")
@click.option("--slots", type=click.IntRange(min=1), help="greedy period length in slots")
@click.option("--out", type=click.Path(dir_okay=False))
def schedule(**params):
    """Build a periodic schedule and write it as JSON."""
    _run("schedule", params, _manifest_for(params["out"]))


@main.command()
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False))
@click.option("--schedule", type=click.Path(exists=True, dir_okay=False))
@click.option("--routing", type=click.Choice(["direct", "multihop"]), default="direct")
@click.option("--epsilon", default=0.02, show_default=True, type=float)
@click.option("--c", type=float)
@click.option("--degree", type=click.IntRange(min=1))
@click.option("--sweep", help="k=A..B: minimum single-hop throughput per k")
@click.option("--n", default=16, show_default=True, type=click.IntRange(min=2))
@click.option("--trials", default=20, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1))
@_with(_timing)
@click.option("--out", type=click.Path(dir_okay=False))
def throughput(**params):
    """Single-hop or multi-hop throughput of a schedule, or a k sweep."""
    _run("throughput", params, _manifest_for(params["out"]))


@main.command()
@click.option("--config", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, help="override the config seed")
def simulate(**params):
    """Run the packet-level simulator; writes flows/utilization/updates/summary."""
    _run("simulate", params, None)
    _write_manifest(Path(params["out"]) / "manifest.json", "simulate", params, [params["config"]])


@main.command()
@click.option("--matrix", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", default=1e-9, show_default=True, type=float)
@click.option("--quantum", type=float, help="slot quantum for fixed-duration quantization")
@click.option("--quantum-sweep", help="comma-separated quanta; writes a length/loss CSV")
@click.option("--sweep-out", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False))
def bvn(**params):
    """Birkhoff-von Neumann decomposition and its quantization loss."""
    if params["quantum"] is not None and params["quantum"] <= 0:
        raise click.BadParameter("must be positive", param_hint="--quantum")
    _run("bvn", params, _manifest_for(params["out"]))


@main.command(name="round")
@click.option("--matrix", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", default=DEFAULT_K, show_default=True, type=click.IntRange(min=2))
@click.option("--c", type=float)
@click.option("--degree", type=click.IntRange(min=1))
@click.option("--out", type=click.Path(dir_okay=False))
def round_cmd(**params):
    """Scale a traffic matrix by (k-1)n and round it; integer CSV."""
    _run("round", params, _manifest_for(params["out"]))


@main.command()
@click.option("--matrix", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", default=DEFAULT_K, show_default=True, type=click.IntRange(min=2))
@click.option("--c", type=float)
@click.option("--degree", type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", type=click.Path(dir_okay=False))
def topology(**params):
    """Emulated multigraph edge multiplicities as integer CSV."""
    _run("topology", params, _manifest_for(params["out"]))


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--c", type=float)
@click.option("--degree", type=click.IntRange(min=1))
def validate(path, c, degree):
    """Check a schedule JSON, traffic matrix or simulator config against its invariants."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{") and '"planes"' in text:
        sched = PeriodicSchedule.from_json(text)
        problems = check_schedule(sched)
        if problems:
            raise ValidationError("; ".join(problems))
        click.echo(f"ok: schedule n={sched.n} d={sched.d_hat} slots={sched.period}")
    elif path.endswith(".cfg"):
        cfg = parse_config(text)
        click.echo(f"ok: config n={cfg.n} schedule={cfg.schedule} routing={cfg.routing}")
    else:
        m = parse_matrix_text(text, c, degree)
        click.echo(f"ok: matrix n={m.n} c={m.c:g} d={m.d_hat}")


@main.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
def replay(manifest):
    """Rerun a command from its manifest, checking input digests first."""
    obj = json.loads(Path(manifest).read_text())
    name = obj.get("subcommand")
    if name not in COMMANDS:
        raise ValidationError(f"manifest names unknown subcommand {name!r}")
    for path, digest in obj.get("inputs", {}).items():
        if _digest_file(path) != digest:
            raise ValidationError(f"input {path} changed since the manifest was written")
    params = obj["params"]
    if name == "simulate":
        do_simulate(params)
        _write_manifest(Path(params["out"]) / "manifest.json", name, params, [params["config"]])
    else:
        _run(name, params, _manifest_for(params.get("out")))


if __name__ == "__main__":
    sys.exit(main())
