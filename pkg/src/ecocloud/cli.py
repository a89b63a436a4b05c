"""Batch entry points: evaluate, optimize, oracle, sweep, replay, serve.

Machine-format output is line-delimited structured text with a version
header and is byte-stable for fixed inputs and seed.  Exit codes: 0 ok,
2 parse error, 3 validation error, 4 infeasible instance, 5 state-space
guard exceeded.
"""
from __future__ import annotations

import json
import sys

import click
import yaml

from . import plots
from .configio import AppConfig, load_config, placement_from_dict, placement_to_dict
from .errors import (
    EcoCloudError,
    InfeasibleInstanceError,
    MixParseError,
    NoDataError,
    SearchSpaceTooLargeError,
)
from .evaluation import Instance, evaluate, tradeoff_sweep
from .ga import GaParams, ffd_at_max_frequency, mlgga_run
from .manager import Manager, replay as replay_log, report_totals
from .oracle import DEFAULT_STATE_GUARD, brute_force_optimum
from .service import DEFAULT_U_GRID, report_doc
from .sustainability import INDICATORS, sample_at

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_GUARD = 5

MACHINE_HEADER = "ecocloud-output v1"


def instance_from_config(cfg: AppConfig) -> Instance:
    mixes = {
        region: sample_at(series, cfg.start_time).sample
        for region, series in cfg.mix_series.items()
    }
    return Instance(
        topology=cfg.topology,
        mixes=mixes,
        tariff=cfg.tariff,
        taxes=cfg.taxes,
        timestamp=cfg.start_time,
        indicator_table=cfg.indicator_table,
    )


def _fail(code: int, kind: str, message: str):
    click.echo(f"ECOCLOUD-ERROR code={kind}: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    """Map package exceptions to the documented exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MixParseError as exc:
            _fail(EXIT_PARSE, "parse", str(exc))
        except (yaml.YAMLError, json.JSONDecodeError) as exc:
            _fail(EXIT_PARSE, "parse", str(exc))
        except SearchSpaceTooLargeError as exc:
            _fail(EXIT_GUARD, "guard", str(exc))
        except (InfeasibleInstanceError, NoDataError) as exc:
            _fail(EXIT_INFEASIBLE, "infeasible", str(exc))
        except (EcoCloudError, FileNotFoundError, KeyError, ValueError) as exc:
            _fail(EXIT_VALIDATION, "validation", str(exc))

    wrapper.__name__ = fn.__name__
    return wrapper


def _emit(text: str, output):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _machine_doc(subcommand: str, doc: dict) -> str:
    return f"# {MACHINE_HEADER} {subcommand}\n" + json.dumps(doc, sort_keys=True) + "\n"


def _load_placement(cfg: AppConfig, path: str | None):
    if path is None:
        return ffd_at_max_frequency(cfg.topology).to_placement()
    with open(path) as fh:
        return placement_from_dict(yaml.safe_load(fh))


@click.group()
def main():
    """Sustainability-aware cloud manager: models, optimizer, service."""


@main.command("evaluate")
@click.argument("config", type=click.Path(exists=True))
@click.option("--placement", type=click.Path(exists=True), help="Placement document; defaults to FFD at max frequency.")
@click.option("--format", "fmt", type=click.Choice(["human", "machine"]), default="human")
@click.option("-o", "--output", type=click.Path(), default=None)
@_guarded
def evaluate_cmd(config, placement, fmt, output):
    """Evaluate a placement against the full model chain."""
    cfg = load_config(config)
    inst = instance_from_config(cfg)
    pl = _load_placement(cfg, placement)
    report = evaluate(pl, inst)
    doc = {"placement": placement_to_dict(pl), "report": report_doc(report)}
    if fmt == "machine":
        _emit(_machine_doc("evaluate", doc), output)
    else:
        totals = report_totals(report)
        lines = [
            f"feasible: {report.feasible}",
            f"power: {totals['power_kw']:.6f} kW",
            f"real profit: {totals['real_profit']:.6f} USD/h",
            f"virtual profit: {totals['virtual_profit']:.6f} USD/h",
            "indicator rates (g/h): "
            + ", ".join(f"{k}={v:.4f}" for k, v in totals["rates_g_per_h"].items()),
        ]
        if not report.feasible:
            lines.append(f"violations: {totals['violations']}")
        _emit("\n".join(lines) + "\n", output)


@main.command("optimize")
@click.argument("config", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Overrides the configured GA seed.")
@click.option("--format", "fmt", type=click.Choice(["human", "machine"]), default="human")
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--plot", type=click.Path(), default=None, help="Render the fitness trajectory to this image file.")
@_guarded
def optimize_cmd(config, seed, fmt, output, plot):
    """Run the MLGGA once and report the best placement found."""
    cfg = load_config(config)
    inst = instance_from_config(cfg)
    params = cfg.ga if seed is None else GaParams(**{**cfg.ga.__dict__, "rng_seed": seed})
    result = mlgga_run(inst, params)
    doc = {
        "seed": result.seed,
        "generations": result.generations_run,
        "best_fitness": result.best_fitness,
        "trajectory": result.trajectory,
        "placement": placement_to_dict(result.best),
        "totals": report_totals(result.report),
    }
    if plot:
        plots.render_trajectory(result.trajectory, plot)
    if fmt == "machine":
        _emit(_machine_doc("optimize", doc), output)
    else:
        _emit(
            f"seed {result.seed}: best virtual profit "
            f"{result.report.total_costs.virtual_profit:.6f} USD/h "
            f"after {result.generations_run} generations\n"
            + yaml.safe_dump(placement_to_dict(result.best), sort_keys=True),
            output,
        )


@main.command("oracle")
@click.argument("config", type=click.Path(exists=True))
@click.option("--guard", type=int, default=DEFAULT_STATE_GUARD, show_default=True)
@click.option("--pareto/--no-pareto", default=False, help="Also emit the exact Pareto front.")
@click.option("--format", "fmt", type=click.Choice(["human", "machine"]), default="human")
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--plot", type=click.Path(), default=None, help="Render the Pareto front to this image file (with --pareto).")
@_guarded
def oracle_cmd(config, guard, pareto, fmt, output, plot):
    """Brute-force optimum over the full placement x frequency grid."""
    cfg = load_config(config)
    inst = instance_from_config(cfg)
    result = brute_force_optimum(inst, guard=guard, include_pareto=pareto)
    doc = {
        "states_enumerated": result.states_enumerated,
        "placement": placement_to_dict(result.best),
        "totals": report_totals(result.report),
        "feasible_min_rates_g_per_h": result.feasible_min_rates.as_dict(),
    }
    if pareto:
        doc["pareto"] = [
            {"objective": list(vec), "placement": placement_to_dict(p)}
            for vec, p in sorted(result.pareto.members, key=lambda m: m[0])
        ]
        if plot:
            plots.render_pareto([vec for vec, _ in result.pareto.members], plot)
    if fmt == "machine":
        _emit(_machine_doc("oracle", doc), output)
    else:
        _emit(
            f"{result.states_enumerated} states: best virtual profit "
            f"{result.report.total_costs.virtual_profit:.6f} USD/h\n"
            + yaml.safe_dump(placement_to_dict(result.best), sort_keys=True),
            output,
        )


@main.command("sweep")
@click.argument("config", type=click.Path(exists=True))
@click.option("--blade", "blade_id", default=None, help="Blade to sweep; defaults to the first blade.")
@click.option("--points", type=int, default=11, show_default=True, help="Utilization grid size over [0, 1].")
@click.option("--format", "fmt", type=click.Choice(["human", "machine"]), default="machine")
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--plot", type=click.Path(), default=None, help="Render the scatter to this image file.")
@click.option("--x-axis", default="virtual_profit")
@click.option("--y-axis", default="co2")
@_guarded
def sweep_cmd(config, blade_id, points, fmt, output, plot, x_axis, y_axis):
    """Trade-off sweep dataset over the (utilization, frequency) grid."""
    cfg = load_config(config)
    inst = instance_from_config(cfg)
    blade = cfg.topology.blade(blade_id) if blade_id else cfg.topology.blades[0]
    grid = [i / (points - 1) for i in range(points)] if points > 1 else [0.0]
    data = tradeoff_sweep(blade, inst, grid)
    header = "\t".join(
        ["u", "f_ghz", "real_profit", "virtual_profit", *INDICATORS, "is_current"]
    )
    rows = [
        "\t".join(
            [repr(p.u), repr(p.f_ghz), repr(p.real_profit), repr(p.virtual_profit)]
            + [repr(v) for v in p.rates]
            + ["1" if p.is_current else "0"]
        )
        for p in data
    ]
    if plot:
        plots.render_sweep(data, plot, x_axis=x_axis, y_axis=y_axis)
    if fmt == "machine":
        _emit(f"# {MACHINE_HEADER} sweep\n" + "\n".join([header] + rows) + "\n", output)
    else:
        _emit("\n".join([header] + rows) + "\n", output)


@main.command("replay")
@click.argument("config", type=click.Path(exists=True))
@click.argument("log", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["human", "machine"]), default="human")
@click.option("-o", "--output", type=click.Path(), default=None)
@_guarded
def replay_cmd(config, log, fmt, output):
    """Replay a run log and verify it reproduces the logged reports."""
    cfg = load_config(config)
    mgr = replay_log(cfg, log)
    # Every tick entry's logged totals must match a fresh evaluation of the
    # logged placement under the logged clock.
    mismatches = 0
    from .telemetry import LogStore

    entries = LogStore(log).read()
    verify = replay_scratch(cfg)
    for entry in entries:
        if entry.kind == "apply":
            verify.placement = placement_from_dict(entry.payload["placement"])
        if entry.kind != "tick" or "empty" in entry.payload:
            continue
        verify.tick_count = entry.payload["tick"]
        verify.clock = entry.timestamp
        verify._advance_mixes()
        verify.latest_report = verify._evaluate_current()
        fresh = json.dumps(report_totals(verify.latest_report), sort_keys=True)
        logged = json.dumps(entry.payload["totals"], sort_keys=True)
        if fresh != logged:
            mismatches += 1
    doc = {
        "entries": len(entries),
        "mismatched_ticks": mismatches,
        "final_state": mgr.summary(),
    }
    if fmt == "machine":
        _emit(_machine_doc("replay", doc), output)
    else:
        _emit(
            f"replayed {len(entries)} entries, {mismatches} mismatched ticks\n",
            output,
        )
    if mismatches:
        _fail(EXIT_VALIDATION, "validation", f"{mismatches} tick entries did not reproduce")


def replay_scratch(cfg: AppConfig) -> Manager:
    import os
    import tempfile

    scratch = tempfile.NamedTemporaryFile(prefix="ecocloud-verify-", suffix=".log", delete=False)
    scratch.close()
    os.unlink(scratch.name)
    mgr = Manager(cfg, scratch.name)
    os.unlink(mgr.log.path)
    return mgr


@main.command("serve")
@click.argument("config", type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8040, show_default=True)
@click.option("--log-path", type=click.Path(), default="ecocloud-run.log", show_default=True)
@click.option("--clock-multiplier", type=float, default=1.0, show_default=True, help="Virtual-clock compression of the tick interval.")
@click.option("--auto-apply/--no-auto-apply", default=None, help="Override the configured auto-apply mode.")
@click.option("--loop/--no-loop", default=False, help="Run the control loop in the background.")
@_guarded
def serve_cmd(config, host, port, log_path, clock_multiplier, auto_apply, loop):
    """Serve the manager API (and optionally the control loop)."""
    import threading

    from .service import serve_api

    cfg = load_config(config)
    if auto_apply is not None:
        cfg.auto_apply = auto_apply
    manager = Manager(cfg, log_path)
    if loop:
        t = threading.Thread(
            target=manager.run_forever, kwargs={"multiplier": clock_multiplier}, daemon=True
        )
        t.start()
    serve_api(manager, host=host, port=port)


if __name__ == "__main__":
    main()
