// Dwell selection over magnetized pointer samples: fires after the
// pointer stays on one button continuously for dwell_ms; leaving
// resets; no re-fire until the pointer leaves. Port of the backend
// tracker with the same semantics.

import { hitButton, Layout, Point } from "./layout.js";

export interface DwellSelection {
  button_id: string;
  t: number;
}

export interface DwellProgress {
  button_id: string | null;
  /** 0..1 fraction of the dwell completed on the current button. */
  fraction: number;
}

export class DwellTracker {
  private buttonId: string | null = null;
  private enteredMs = 0;
  private fired = false;
  private lastT = 0;

  constructor(
    private readonly layout: Layout,
    private readonly dwellMs: number = layout.dwell_ms,
  ) {
    if (this.dwellMs <= 0) throw new Error("dwell duration must be > 0");
  }

  feed(p: Point, t: number): DwellSelection[] {
    this.lastT = t;
    const button = hitButton(p, this.layout);
    if (button === null) {
      this.buttonId = null;
      this.fired = false;
      return [];
    }
    if (button.id !== this.buttonId) {
      this.buttonId = button.id;
      this.enteredMs = t;
      this.fired = false;
    }
    if (!this.fired && t - this.enteredMs >= this.dwellMs) {
      this.fired = true;
      return [{ button_id: button.id, t }];
    }
    return [];
  }

  /** Progress ring state for the renderer. */
  progress(): DwellProgress {
    if (this.buttonId === null) return { button_id: null, fraction: 0 };
    if (this.fired) return { button_id: this.buttonId, fraction: 1 };
    const fraction = Math.min(1, (this.lastT - this.enteredMs) / this.dwellMs);
    return { button_id: this.buttonId, fraction };
  }

  reset(): void {
    this.buttonId = null;
    this.fired = false;
  }
}
