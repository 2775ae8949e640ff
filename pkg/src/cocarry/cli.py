"""Command-line front end: thin wrappers over the library and the service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .scenario import ScenarioError, load_scenario
from .world import Script, run_headless


@click.group()
def main() -> None:
    """Human-robot co-transportation simulator."""


@main.command()
@click.option("--scenario", required=True, help="scenario file or bundled name")
@click.option("--script", "script_path", default=None, help="JSON command script")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", default="run_out", show_default=True)
@click.option("--duration", default=None, type=float, help="override run length [s]")
@click.option("--realtime", default=0.0, show_default=True,
              help="real-time factor (0 = as fast as possible)")
def simulate(scenario, script_path, seed, out_dir, duration, realtime) -> None:
    """Run a scripted headless simulation and write logs."""
    try:
        spec = load_scenario(scenario)
    except ScenarioError as exc:
        raise click.ClickException(str(exc))
    script = Script.load(script_path) if script_path else None
    if realtime > 0:
        click.echo(f"note: headless runs ignore --realtime={realtime}; running flat out")
    log = run_headless(spec, script, out_dir=out_dir, seed=seed, duration=duration)
    click.echo(f"result: {log.result} at t={log.end_time:.2f} s")
    click.echo(f"logs in {Path(out_dir).resolve()}")
    if log.result == "collision":
        sys.exit(2)


@main.command()
@click.option("--scenario", default="scenario1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(scenario, port, host) -> None:
    """Start the FastAPI service with the live teleoperation session."""
    import uvicorn

    try:
        load_scenario(scenario)
    except ScenarioError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"session endpoint: ws://{host}:{port}/session?scenario={scenario}")
    uvicorn.run("cocarry.service:app", host=host, port=port, log_level="warning")


@main.command()
@click.option("--log", "log_path", required=True, help="telemetry.jsonl of a recorded run")
@click.option("--out", "out_dir", default="replay_out", show_default=True)
def replay(log_path, out_dir) -> None:
    """Render path and time-series plots from a recorded run."""
    from .replay import replay as do_replay

    try:
        artifacts = do_replay(log_path, out_dir)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot replay {log_path}: {exc}")
    for name, path in artifacts.items():
        click.echo(f"{name}: {path}")


@main.command()
@click.option("--scenario", required=True, help="scenario file or bundled name")
def validate(scenario) -> None:
    """Check a scenario document and report the first problem found."""
    try:
        spec = load_scenario(scenario)
    except ScenarioError as exc:
        click.echo(f"invalid: {exc}")
        sys.exit(1)
    click.echo(f"ok: {spec.name} ({len(spec.obstacles)} obstacles, "
               f"finish at x={spec.finish_x:.2f} m)")


if __name__ == "__main__":
    main()
