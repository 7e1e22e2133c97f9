#!/usr/bin/env python3
"""Regenerate frontend/test/fixtures/magnetize_trace.json.

Records a jittered pointer trace over the bundled Idle layout together
with the backend's magnetization result for every sample and its dwell
selections. The backend test suite re-derives these expectations and
the frontend test suite must reproduce them exactly, so client-side and
server-side adjudication can never diverge silently.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np  # noqa: E402

from bciui.interaction import (  # noqa: E402
    DwellTracker,
    PointerSample,
    PointerSource,
    bundled_layouts_path,
    load_layouts,
    layout_to_dict,
    magnetize,
)

SEED = 4711


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent
        / "frontend" / "test" / "fixtures" / "magnetize_trace.json"
    )
    layout = load_layouts(bundled_layouts_path())["Idle"]
    rng = np.random.default_rng(SEED)
    centers = [b.center for b in layout.buttons]

    trace = []
    t = 0
    for episode in range(30):
        target = centers[int(rng.integers(0, len(centers)))]
        hold = int(rng.integers(15, 80))
        for _ in range(hold):
            t += 16
            p = (round(float(target[0] + rng.normal(0, 30)), 3),
                 round(float(target[1] + rng.normal(0, 30)), 3))
            trace.append({"p": list(p), "t": t})
        # saccade through open space
        for _ in range(5):
            t += 16
            p = (round(float(rng.uniform(0, 1920)), 3),
                 round(float(rng.uniform(0, 1080)), 3))
            trace.append({"p": list(p), "t": t})

    tracker = DwellTracker(layout)
    magnetized = []
    selections = []
    for sample in trace:
        p = (sample["p"][0], sample["p"][1])
        snapped = magnetize(p, layout)
        magnetized.append(list(snapped))
        for sel in tracker.feed(PointerSample(p, PointerSource.GAZE, sample["t"])):
            selections.append({"button_id": sel.button_id, "t": sel.t_ms})

    doc = {
        "layout": layout_to_dict(layout),
        "dwell_ms": layout.dwell_ms,
        "trace": trace,
        "magnetized": magnetized,
        "selections": selections,
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(trace)} samples, {len(selections)} selections to {out}")


if __name__ == "__main__":
    main()
