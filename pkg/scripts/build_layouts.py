#!/usr/bin/env python3
"""Regenerate src/bciui/data/layouts.json.

Lays out every screen's circular buttons on a 1920x1080 display and
validates the result through the interaction module (bounds, unique
ids, non-overlapping magnetization capture regions) before writing.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from bciui.interaction import layout_from_dict  # noqa: E402

DISPLAY = [1920, 1080]


def button(bid: str, x: float, y: float, r: float, label: str = "") -> dict:
    return {"id": bid, "center": [x, y], "radius": r,
            "label": label or bid.replace("_", " ")}


def row(prefix: str, count: int, x0: float, step: float, y: float, r: float) -> list[dict]:
    return [button(f"{prefix}{i}", x0 + i * step, y, r) for i in range(count)]


LAYOUTS: dict[str, list[dict]] = {
    "Idle": [
        button("play_tts", 300, 850, 80, "play"),
        button("type_to_host", 620, 850, 80, "type to pc"),
        button("keyboard", 940, 850, 80, "spell"),
        button("menu", 1260, 850, 80),
        button("horn", 1580, 850, 80),
    ],
    "Speaking": [
        button("done", 960, 850, 100),
    ],
    "SentenceRating": [
        button("rate_correct", 300, 700, 90, "correct"),
        button("rate_one_word_wrong", 740, 700, 90, "one word wrong"),
        button("rate_mostly_correct", 1180, 700, 90, "mostly correct"),
        button("rate_incorrect", 1620, 700, 90, "incorrect"),
        button("make_corrections", 960, 950, 80, "make corrections"),
    ],
    "SentenceCorrection": (
        row("word_", 10, 160, 160, 80, 45)
        + [button(f"candidate_{i}", 660, 260 + 150 * i, 45) for i in range(5)]
        + [button("corrections_done", 1600, 950, 70, "done")]
    ),
    "WordCorrection": (
        row("word_", 10, 160, 160, 80, 45)
        + [button(f"alt_{i}", 660, 260 + 150 * i, 45) for i in range(5)]
        + [
            button("refresh", 1400, 260, 50),
            button("delete_word", 1400, 420, 50, "delete"),
            button("add_before", 1400, 580, 50),
            button("add_after", 1400, 740, 50),
            button("type_word", 1400, 900, 50, "type"),
            button("back", 1750, 260, 60),
            button("corrections_done", 1700, 950, 60, "done"),
        ]
    ),
    "Menu": [
        button("speech_menu", 480, 270, 90, "speech"),
        button("cursor_menu", 960, 270, 90, "cursor"),
        button("gaze_calibration", 1440, 270, 90, "eye tracker"),
        button("history", 480, 540, 90),
        button("keyboard", 960, 540, 90),
        button("host_panel", 1440, 540, 90, "pc controls"),
        button("privacy_toggle", 480, 810, 90, "privacy"),
        button("filter_toggle", 960, 810, 90, "language filter"),
        button("back", 1440, 810, 90),
    ],
    "SpeechMenu": [
        button("speech_calibration", 760, 540, 90, "calibrate speech"),
        button("back", 1160, 540, 90),
    ],
    "CursorMenu": [
        button("ui_neural", 360, 350, 90, "ui neural cursor"),
        button("ui_gaze", 760, 350, 90, "ui gaze"),
        button("host_neural", 1160, 350, 90, "pc neural cursor"),
        button("host_gaze", 1560, 350, 90, "pc gaze panel"),
        button("cursor_calibration", 560, 700, 90, "calibrate cursor"),
        button("host_off", 960, 700, 90, "pc control off"),
        button("back", 1360, 700, 90),
    ],
    "History": (
        [button(f"select_{i}", 960, 180 + 150 * i, 45) for i in range(5)]
        + [button("play_tts", 400, 950, 70, "play"),
           button("back", 1520, 950, 70)]
    ),
    "OnScreenKeyboard": (
        [button(f"key_{c}", 240 + i * 160, 600, 50, c)
         for i, c in enumerate("qwertyuiop")]
        + [button(f"key_{c}", 320 + i * 160, 760, 50, c)
           for i, c in enumerate("asdfghjkl")]
        + [button(f"key_{c}", 400 + i * 160, 920, 50, c)
           for i, c in enumerate("zxcvbnm")]
        + [
            button("key_space", 1600, 920, 50, "space"),
            button("key_backspace", 1760, 760, 50, "del"),
            button("done", 1760, 300, 60),
            button("cancel", 1560, 150, 60),
        ]
    ),
    "SpeechCalibration": [button("back", 960, 900, 90, "done")],
    "CursorCalibration": [button("back", 960, 900, 90, "done")],
    "GazeCalibration": [button("back", 960, 900, 90, "done")],
    "HostControlPanel": [
        button("host_up", 400, 300, 80, "up"),
        button("host_down", 400, 700, 80, "down"),
        button("host_left", 200, 500, 80, "left"),
        button("host_right", 600, 500, 80, "right"),
        button("host_click", 900, 500, 80, "click"),
        button("host_speed", 900, 800, 70, "speed"),
        button("key_tab", 1300, 260, 60, "tab"),
        button("key_enter", 1300, 460, 60, "enter"),
        button("key_space", 1300, 660, 60, "space"),
        button("key_backspace", 1300, 860, 60, "backspace"),
        button("type_last", 1650, 350, 70, "type sentence"),
        button("back", 1650, 900, 70),
    ],
}


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "src" / "bciui" / "data" / "layouts.json"
    )
    doc = {}
    for screen, buttons in LAYOUTS.items():
        entry = {"display": DISPLAY, "capture_scale": 1.5, "dwell_ms": 800,
                 "buttons": buttons}
        layout_from_dict({"screen": screen, **entry})  # validates
        doc[screen] = entry
    out.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(doc)} screen layouts to {out}")


if __name__ == "__main__":
    main()
