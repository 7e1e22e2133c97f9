"""Session-stats reporting: JSON, aligned text table, CSV, and figures.

The figures are rendered headless (Agg) to PNG files next to the
delimited outputs so a stats run leaves a complete, self-contained
report directory.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .session_log import SessionStats  # noqa: E402


def _fmt_ms(ms: float) -> str:
    return f"{ms / 1000.0:.1f} s"


def _fmt_pct(x: float) -> str:
    return f"{100.0 * x:.1f}%"


def stats_table(stats: SessionStats) -> str:
    """Aligned plain-text table of the usage metrics."""
    rows: list[tuple[str, str]] = [
        ("total use time", _fmt_ms(stats.total_use_ms)),
        ("active state time", _fmt_ms(stats.active_state_ms)),
        ("host control time", _fmt_ms(stats.host_control_ms)),
        ("neural cursor share of total use", _fmt_pct(stats.host_neural_cursor_fraction)),
        ("neural cursor share of active use",
         _fmt_pct(stats.host_neural_cursor_fraction_active)),
        ("sentences finalized", str(stats.sentences_total)),
        ("sentences corrected", str(stats.sentences_corrected)),
        ("successfully corrected", str(stats.sentences_successfully_corrected)),
        ("word-level correction share", _fmt_pct(stats.word_level_share)),
        ("sentence-level correction share", _fmt_pct(stats.sentence_level_share)),
        ("mean time, word correction",
         _fmt_ms(stats.mean_correction_time_ms.get("word_level", 0.0))),
        ("mean time, sentence correction",
         _fmt_ms(stats.mean_correction_time_ms.get("sentence_level", 0.0))),
        ("fully correct when typing", _fmt_pct(stats.fully_correct_rate.get("typed", 0.0))),
        ("fully correct with alternatives",
         _fmt_pct(stats.fully_correct_rate.get("alternatives", 0.0))),
        ("mean length, word correction",
         f"{stats.mean_sentence_length.get('word_level', 0.0):.1f} words"),
        ("mean length, sentence correction",
         f"{stats.mean_sentence_length.get('sentence_level', 0.0):.1f} words"),
    ]
    for kind, count in sorted(stats.edit_counts.items()):
        rows.append((f"edits: {kind}", str(count)))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def write_report(stats: SessionStats, out_dir: Path,
                 figures: bool = True) -> list[Path]:
    """Write stats.json / stats.txt / stats.csv (+ PNG figures)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    json_path = out_dir / "stats.json"
    json_path.write_text(json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n",
                         encoding="utf-8")
    written.append(json_path)

    txt_path = out_dir / "stats.txt"
    txt_path.write_text(stats_table(stats) + "\n", encoding="utf-8")
    written.append(txt_path)

    csv_path = out_dir / "stats.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for key, value in _flatten(stats):
            writer.writerow([key, value])
    written.append(csv_path)

    if figures:
        written.extend(render_figures(stats, out_dir))
    return written


def _flatten(stats: SessionStats) -> list[tuple[str, object]]:
    flat: list[tuple[str, object]] = []
    for key, value in stats.to_dict().items():
        if isinstance(value, dict):
            for sub, v in sorted(value.items()):
                flat.append((f"{key}.{sub}", v))
        else:
            flat.append((key, value))
    return flat


def render_figures(stats: SessionStats, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def save(fig: plt.Figure, name: str) -> None:
        path = out_dir / name
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(5, 3.2))
    times = stats.mean_correction_time_ms
    ax.bar(["sentence", "word"],
           [times.get("sentence_level", 0.0) / 1000.0,
            times.get("word_level", 0.0) / 1000.0],
           color=["#4c72b0", "#dd8452"])
    ax.set_ylabel("mean time in corrections (s)")
    ax.set_title("Correction time by screen")
    save(fig, "correction_time.png")

    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(["word-level", "sentence-level"],
           [stats.word_level_share, stats.sentence_level_share],
           color=["#dd8452", "#4c72b0"])
    ax.set_ylim(0, 1)
    ax.set_ylabel("share of successfully corrected")
    ax.set_title("Correction level shares")
    save(fig, "correction_shares.png")

    fig, ax = plt.subplots(figsize=(5, 3.2))
    rates = stats.fully_correct_rate
    ax.bar(["typing", "alternatives"],
           [rates.get("typed", 0.0), rates.get("alternatives", 0.0)],
           color=["#55a868", "#c44e52"])
    ax.set_ylim(0, 1)
    ax.set_ylabel("fully correct rate")
    ax.set_title("Outcome by editing feature")
    save(fig, "fully_correct_by_feature.png")

    if stats.edit_counts:
        fig, ax = plt.subplots(figsize=(6, 3.2))
        kinds = sorted(stats.edit_counts)
        ax.bar(kinds, [stats.edit_counts[k] for k in kinds], color="#8172b3")
        ax.set_ylabel("uses")
        ax.set_title("Editing feature usage")
        ax.tick_params(axis="x", rotation=30)
        save(fig, "edit_usage.png")

    fig, ax = plt.subplots(figsize=(5, 3.2))
    labels = ["neural cursor (host)"]
    values = [stats.host_neural_cursor_fraction]
    total_ui = sum(stats.ui_modality_ms.values())
    for source, ms in sorted(stats.ui_modality_ms.items()):
        labels.append(f"{source} (ui)")
        values.append(ms / total_ui if total_ui else 0.0)
    ax.barh(labels, values, color="#64b5cd")
    ax.set_xlim(0, 1)
    ax.set_xlabel("fraction of use time")
    ax.set_title("Control modality usage")
    save(fig, "modality_usage.png")

    return written
