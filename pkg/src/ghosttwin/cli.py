"""The `ghost` command line: deterministic replay, golden verification, and
the live service. Replay and verify run in-process; serve boots the FastAPI
app under uvicorn.
"""

from __future__ import annotations

import importlib.resources
import json
import pathlib
import sys

import click

from .config import EngineConfig, load_config
from .session import replay as run_replay


def _read_config(path: str | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    return load_config(pathlib.Path(path).read_text(encoding="utf-8"))


def bundled_golden_dir() -> pathlib.Path:
    return pathlib.Path(str(importlib.resources.files("ghosttwin") / "goldens"))


@click.group()
def main():
    """Author robot tasks by manipulating ghost twins of real objects."""


@main.command("replay")
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False))
def replay_cmd(scene_path, trace_path, out_path, config_path):
    """Replay a controller trace against a scene; write the instruction log."""
    scene_text = pathlib.Path(scene_path).read_text(encoding="utf-8")
    trace_text = pathlib.Path(trace_path).read_text(encoding="utf-8")
    result = run_replay(scene_text, trace_text, _read_config(config_path))
    pathlib.Path(out_path).write_bytes(result.instruction_text.encode("utf-8"))
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(result.digest)


@main.command("verify")
@click.option(
    "--golden",
    "golden_dir",
    default=None,
    type=click.Path(exists=True, file_okay=False),
    help="Golden directory with cases.json (defaults to the bundled one).",
)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False))
def verify_cmd(golden_dir, config_path):
    """Re-run the bundled traces and diff the instruction logs byte-wise."""
    root = pathlib.Path(golden_dir) if golden_dir else bundled_golden_dir()
    cases = json.loads((root / "cases.json").read_text(encoding="utf-8"))
    config = _read_config(config_path)
    failed = 0
    for case in cases:
        scene_text = (root / case["scene"]).read_text(encoding="utf-8")
        trace_text = (root / case["trace"]).read_text(encoding="utf-8")
        expected = (root / case["expected"]).read_bytes()
        result = run_replay(scene_text, trace_text, config)
        got = result.instruction_text.encode("utf-8")
        if got == expected:
            click.echo(f"PASS {case['name']}")
        else:
            failed += 1
            click.echo(f"FAIL {case['name']}: instruction log differs from golden")
    if failed:
        sys.exit(1)
    click.echo(f"{len(cases)} golden case(s) verified")


@main.command("serve")
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--port", default=8000, type=int, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--ui",
    "ui_dir",
    default=None,
    type=click.Path(exists=True, file_okay=False),
    help="Static directory with the browser client (e.g. frontend/dist).",
)
def serve_cmd(scene_path, port, host, config_path, ui_dir):
    """Serve the live session over WebSocket (plus the browser UI if given)."""
    import uvicorn

    from .service.app import create_app

    scene_text = pathlib.Path(scene_path).read_text(encoding="utf-8")
    app = create_app(scene_text, _read_config(config_path), ui_dir=ui_dir)
    click.echo(f"serving on ws://{host}:{port}/ws")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
