// Mouse-as-gaze pointer pipeline: an optional latency buffer emulates
// gaze lag, positions are magnetized with the shared layout rule, and
// selections come from dwell (default) or direct clicks when the
// care-partner click-to-select mode is on.

import { DwellTracker } from "./dwell.js";
import { Layout, magnetize, hitButton, Point } from "./layout.js";

export interface PointerEventOut {
  kind: "ButtonPressed";
  button_id: string;
  t: number;
}

export class PointerPipeline {
  clickToSelect = false;
  latencyMs = 0;

  private tracker: DwellTracker;
  private pending: Array<{ p: Point; t: number }> = [];
  private current: Point = [0, 0];

  constructor(private layout: Layout) {
    this.tracker = new DwellTracker(layout);
  }

  setLayout(layout: Layout): void {
    if (layout === this.layout) return;
    this.layout = layout;
    this.tracker = new DwellTracker(layout);
    this.pending = [];
  }

  /** Feed a raw mouse move; returns dwell selections that completed. */
  move(p: Point, t: number): PointerEventOut[] {
    this.pending.push({ p, t });
    const out: PointerEventOut[] = [];
    while (this.pending.length > 0) {
      const head = this.pending[0]!;
      if (t - head.t < this.latencyMs) break;
      this.pending.shift();
      this.current = head.p;
      if (!this.clickToSelect) {
        for (const sel of this.tracker.feed(head.p, head.t)) {
          out.push({ kind: "ButtonPressed", button_id: sel.button_id, t: sel.t });
        }
      }
    }
    return out;
  }

  /** Direct click; only meaningful in click-to-select mode. */
  click(p: Point, t: number): PointerEventOut[] {
    if (!this.clickToSelect) return [];
    const button = hitButton(p, this.layout);
    return button ? [{ kind: "ButtonPressed", button_id: button.id, t }] : [];
  }

  overlay(t: number) {
    return {
      raw: this.current,
      magnetized: magnetize(this.current, this.layout),
      dwell: this.clickToSelect ? { button_id: null, fraction: 0 } : this.tracker.progress(),
    };
  }

  resetDwell(): void {
    this.tracker.reset();
  }
}
