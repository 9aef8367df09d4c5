"""Command line entry point: mine insight spaces, print question panels,
replay event scripts, and run the HTTP service.

All diagnostics go to standard error; data outputs go to standard out or the
requested files and are byte-identical across runs for identical inputs.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click

from .config import DEFAULT_CONFIG, EngineConfig
from .dataset import load_table
from .errors import EngineError, NoMatchingInsight
from .insights import InsightType
from .miner import mine_all
from .recommend import format_panel, recommend_for_insight
from .session import replay as replay_events
from .session import to_dot


def _engine_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EngineError as exc:
            click.echo(f"error: {exc.code}: {exc.message}", err=True)
            sys.exit(1)

    return wrapper


def _load_config(config_path: str | None) -> EngineConfig:
    return EngineConfig.load(config_path) if config_path else DEFAULT_CONFIG


def _load_table(csv_path: str, config: EngineConfig):
    path = Path(csv_path)
    return load_table(path.read_bytes(), name=path.stem, config=config)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log at INFO level.")
def main(verbose: bool) -> None:
    """Insight mining and guided-exploration toolkit."""
    logging.basicConfig(stream=sys.stderr,
                        level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.argument("csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON config file.")
@click.option("--out", type=click.Path(dir_okay=False),
              help="Write the insight space here instead of stdout.")
@_engine_errors
def mine(csv: str, config_path: str | None, out: str | None) -> None:
    """Mine CSV into an insight-space JSON document."""
    config = _load_config(config_path)
    space = mine_all(_load_table(csv, config), config)
    text = space.to_json()
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {len(space.insights)} insights to {out}", err=True)
    else:
        click.echo(text, nl=False)


def _resolve_insight(space, selector: str):
    """An insight id (contains '|') or a 'type:attr1,attr2[:polarity]' query."""
    if "|" in selector:
        return space.get(selector)
    parts = selector.split(":")
    if len(parts) not in (2, 3):
        raise click.BadParameter(
            "expected an insight id or type:attr1,attr2[:polarity]",
            param_hint="--insight",
        )
    type_ = InsightType(parts[0].strip().lower())
    attrs = frozenset(a.strip() for a in parts[1].split(",") if a.strip())
    polarity = parts[2].strip().lower() if len(parts) == 3 else None
    matches = [
        i for i in space.of_type(type_)
        if i.attributes == attrs
        and (polarity is None or i.id.rsplit("|", 1)[-1] == polarity)
    ]
    if not matches:
        raise NoMatchingInsight(f"no insight matches {selector!r}", query=selector)
    return min(matches, key=lambda i: (i.tier, -i.strength, i.id))


@main.command()
@click.argument("csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--insight", "selector", required=True,
              help="Insight id or type:attr1,attr2[:polarity] query.")
@click.option("--k", type=int, default=None, help="Panel size cap.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@_engine_errors
def recommend(csv: str, selector: str, k: int | None, config_path: str | None) -> None:
    """Print the ordered follow-up question panel for one insight."""
    config = _load_config(config_path)
    table = _load_table(csv, config)
    space = mine_all(table, config)
    source = _resolve_insight(space, selector)
    panel = recommend_for_insight(
        source, space, k=config.recommend.panel_size if k is None else k
    )
    click.echo(f"source: {source.id}", err=True)
    click.echo(format_panel(panel), nl=False)


@main.command()
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
@click.option("--export", "export_path", type=click.Path(dir_okay=False),
              help="Write the session export here instead of stdout.")
@click.option("--tree-dot", "tree_dot_path", type=click.Path(dir_okay=False),
              help="Also write the analysis tree as DOT.")
@_engine_errors
def replay(script: str, export_path: str | None, tree_dot_path: str | None) -> None:
    """Execute an event script: {"dataset": csv-path, "config"?, "events": [...]}.

    The dataset path resolves relative to the script file. Events use the
    session event-log schema, so any exported session replays as a script.
    """
    script_path = Path(script)
    doc = json.loads(script_path.read_text(encoding="utf-8"))
    config = (EngineConfig.from_dict(doc["config"]) if "config" in doc
              else DEFAULT_CONFIG)
    csv_path = (script_path.parent / doc["dataset"]).resolve()
    table = load_table(csv_path.read_bytes(), name=csv_path.stem, config=config)
    space = mine_all(table, config)
    session = replay_events(doc["events"], table, space, config)
    text = session.export_json()
    if export_path:
        Path(export_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote session export to {export_path}", err=True)
    else:
        click.echo(text, nl=False)
    if tree_dot_path:
        Path(tree_dot_path).write_text(to_dot(session), encoding="utf-8")
        click.echo(f"wrote tree to {tree_dot_path}", err=True)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--data-dir", type=click.Path(file_okay=False),
              help="Persist event logs here and replay them on restart.")
@click.option("--ui-dir", type=click.Path(exists=True, file_okay=False),
              help="Serve a static UI bundle at /ui.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def serve(host: str, port: int, data_dir: str | None, ui_dir: str | None,
          config_path: str | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(_load_config(config_path), data_dir=data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
