"""Command-line interface.

Subcommands: serve, simulate, train-lm, stats, replay, validate-layout.
Configuration comes from one TOML/JSON file (--config or BCI_UI_CONFIG)
with flags winning over file values. Exit codes: 0 ok, 2 config error,
3 runtime error.
"""

from __future__ import annotations

import signal
import sys
from pathlib import Path

import click

from .config import ConfigError, merged, resolve_config
from .correction_engine import CorrectionError, load_corpus, train_ngram
from .decoder_sim import (
    ConfigurationError,
    LexiconError,
    SpeechChannelConfig,
    bundled_corpus_path,
)
from .interaction import LayoutError, bundled_layouts_path, load_layouts
from .session_log import AnalysisError, LogError, compute_stats, read_log

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main() -> None:
    """Logic node, simulator, and analytics for the communication UI."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="TOML/JSON config file (or set BCI_UI_CONFIG).")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="Session log (NDJSON), appended per event.")
@click.option("--host-outbox", type=click.Path(), default=None,
              help="Host command outbox (NDJSON file sink).")
@click.option("--web-root", type=click.Path(), default=None,
              help="Static directory for the browser client.")
@click.option("--layouts", "layouts_path", type=click.Path(), default=None)
@click.option("--heartbeat-ms", type=int, default=None)
def serve(config_path: str | None, host: str | None, port: int | None,
          log_path: str | None, host_outbox: str | None, web_root: str | None,
          layouts_path: str | None, heartbeat_ms: int | None) -> None:
    """Run the logic-node server until SIGTERM/SIGINT."""
    from .server import LogicServer, ServerConfig
    from .simulate import SimConfig, build_pipeline
    from .state_machine import SessionContext

    try:
        file_config = resolve_config(config_path)
        values = merged(file_config, "serve", host=host, port=port,
                        log=log_path, host_outbox=host_outbox,
                        web_root=web_root, layouts=layouts_path,
                        heartbeat_ms=heartbeat_ms)
        server_config = ServerConfig(
            host=values.get("host", "127.0.0.1"),
            port=int(values.get("port", 8765)),
            log_path=Path(values["log"]) if values.get("log") else None,
            host_outbox_path=Path(values["host_outbox"]) if values.get("host_outbox") else None,
            web_root=Path(values["web_root"]) if values.get("web_root") else None,
            layouts_path=Path(values["layouts"]) if values.get("layouts") else None,
            heartbeat_interval_ms=int(values.get("heartbeat_ms", 2000)),
        )
        if server_config.layouts_path:
            load_layouts(server_config.layouts_path)  # validate before serving
        pipeline, _ = build_pipeline(SimConfig())
        from .correction_engine import load_filter_words
        from .decoder_sim import bundled_filter_path
        ctx = SessionContext(candidate_provider=pipeline.candidates,
                             alternatives_provider=pipeline.alternatives,
                             filter_words=load_filter_words(bundled_filter_path()))
    except (ConfigError, LayoutError, LexiconError, CorrectionError, ValueError) as exc:
        _fail(EXIT_CONFIG, str(exc))
        return

    server = LogicServer(server_config, ctx=ctx)
    try:
        server.start()
    except OSError as exc:
        _fail(EXIT_RUNTIME, f"cannot bind {server_config.host}:{server_config.port}: {exc}")
        return

    def _shutdown(signum: int, frame: object) -> None:
        server.stop()

    signal.signal(signal.SIGTERM, _shutdown)
    signal.signal(signal.SIGINT, _shutdown)
    click.echo(f"serving on {server_config.host}:{server.port}")
    server.serve_forever()
    click.echo("shut down cleanly")


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--sentences", "n_sentences", type=int, default=None,
              help="Number of sampled intended sentences.")
@click.option("--seed", type=int, default=None)
@click.option("--substitution-rate", type=float, default=None)
@click.option("--deletion-rate", type=float, default=None)
@click.option("--insertion-rate", type=float, default=None)
@click.option("--novel-fraction", type=float, default=None,
              help="Fraction of sentences with one out-of-corpus word.")
@click.option("--policy", type=click.Choice(
    ["NoCorrection", "SentenceCandidatesOnly", "WordLevel", "TypeWhenStuck"]),
    default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Artifact directory (transcript, events, log, stats).")
@click.option("--smoke", is_flag=True,
              help="Run the full-coverage screen walk instead of a persona.")
@click.option("--figures/--no-figures", default=True)
def simulate(config_path: str | None, n_sentences: int | None, seed: int | None,
             substitution_rate: float | None, deletion_rate: float | None,
             insertion_rate: float | None, novel_fraction: float | None,
             policy: str | None, out_dir: str | None, smoke: bool,
             figures: bool) -> None:
    """Run a scripted persona end-to-end through the full stack."""
    from . import simulate as sim
    from .report import write_report

    try:
        file_config = resolve_config(config_path)
        values = merged(file_config, "simulate", sentences=n_sentences,
                        seed=seed, substitution_rate=substitution_rate,
                        deletion_rate=deletion_rate, insertion_rate=insertion_rate,
                        novel_fraction=novel_fraction, policy=policy, out=out_dir)
        out = Path(values["out"]) if values.get("out") else None

        if smoke:
            pipeline, _ = sim.build_pipeline(sim.SimConfig())
            runtime = sim.smoke_runtime(
                pipeline, log_path=(out / "session.ndjson") if out else None)
            visited = sim.run_smoke(runtime)
            click.echo(f"smoke walk visited {len(visited)} transitions "
                       f"across {len({v[0] for v in visited})} screens")
            if out:
                stats = compute_stats(runtime.log.events)
                write_report(stats, out, figures=figures)
            return

        run_seed = int(values.get("seed", 0))
        channel = SpeechChannelConfig(
            substitution_rate=float(values.get("substitution_rate", 0.1)),
            deletion_rate=float(values.get("deletion_rate", 0.0)),
            insertion_rate=float(values.get("insertion_rate", 0.0)),
            seed=run_seed,
        )
        sentences = sim.sample_sentences(
            int(values.get("sentences", 20)), seed=run_seed,
            novel_fraction=float(values.get("novel_fraction", 0.3)))
        script = sim.PersonaScript(
            sentences=sentences, channel=channel,
            correction_policy=sim.CorrectionPolicy(values.get("policy", "WordLevel")),
            seed=run_seed)
        config = sim.SimConfig(out_dir=out)
    except (ConfigError, ConfigurationError, LexiconError, CorrectionError,
            ValueError) as exc:
        _fail(EXIT_CONFIG, str(exc))
        return

    try:
        result = sim.run_session(script, config)
    except (LexiconError, CorrectionError, LogError) as exc:
        _fail(EXIT_RUNTIME, str(exc))
        return

    click.echo(f"sentences: {len(result.final_sentences)}")
    click.echo(f"fully correct rate: {result.fully_correct_rate:.3f}")
    mean_ms = result.stats.mean_correction_time_ms.get("overall", 0.0)
    click.echo(f"mean correction time: {mean_ms / 1000.0:.1f} s")
    if out:
        write_report(result.stats, out, figures=figures)
        click.echo(f"artifacts in {out}")


@main.command("train-lm")
@click.option("--corpus", "corpus_path", type=click.Path(), default=None,
              help="One whitespace-tokenized sentence per line "
                   "(default: bundled corpus).")
@click.option("--order", type=int, default=3, show_default=True)
@click.option("--add-k", type=float, default=0.01, show_default=True)
@click.argument("out", type=click.Path())
def train_lm(corpus_path: str | None, order: int, add_k: float, out: str) -> None:
    """Train the add-k n-gram language model and save it as JSON."""
    try:
        corpus = load_corpus(corpus_path or bundled_corpus_path())
        lm = train_ngram(corpus, order, add_k)
    except (CorrectionError, OSError) as exc:
        _fail(EXIT_CONFIG, str(exc))
        return
    lm.save(out)
    click.echo(f"trained {order}-gram over {len(lm.vocabulary)} words -> {out}")


@main.command()
@click.argument("log_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Report directory (default: alongside the log).")
@click.option("--figures/--no-figures", default=True)
def stats(log_path: str, out_dir: str | None, figures: bool) -> None:
    """Compute usage statistics from a session log."""
    from .report import stats_table, write_report

    try:
        events = read_log(log_path)
        session_stats = compute_stats(events)
    except (AnalysisError, LogError, ValueError, KeyError) as exc:
        _fail(EXIT_RUNTIME, f"cannot analyze {log_path}: {exc}")
        return
    click.echo(stats_table(session_stats))
    out = Path(out_dir) if out_dir else Path(log_path).parent / "report"
    written = write_report(session_stats, out, figures=figures)
    click.echo(f"report files: {', '.join(str(p) for p in written)}")


@main.command()
@click.argument("events_path", type=click.Path(exists=True))
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="Write the replayed session log here.")
def replay(events_path: str, log_path: str | None) -> None:
    """Re-run a recorded UiEvent stream and report the final state."""
    from . import simulate as sim

    try:
        events = sim.load_events(Path(events_path))
    except (ValueError, KeyError) as exc:
        _fail(EXIT_CONFIG, f"cannot parse events: {exc}")
        return
    try:
        runtime = sim.replay_events(events, log_path=Path(log_path) if log_path else None)
    except LogError as exc:
        _fail(EXIT_RUNTIME, str(exc))
        return
    session_stats = compute_stats(runtime.log.events)
    click.echo(f"replayed {len(events)} events; final state "
               f"{runtime.fsm.state.tag.value}; "
               f"{session_stats.sentences_total} sentences")


@main.command("validate-layout")
@click.argument("layout_path", type=click.Path(exists=True), required=False)
def validate_layout(layout_path: str | None) -> None:
    """Validate a layout file (default: the bundled layouts)."""
    path = layout_path or bundled_layouts_path()
    try:
        layouts = load_layouts(path)
    except LayoutError as exc:
        _fail(EXIT_CONFIG, str(exc))
        return
    for screen, layout in sorted(layouts.items()):
        click.echo(f"{screen}: {len(layout.buttons)} buttons ok")


if __name__ == "__main__":
    main()
