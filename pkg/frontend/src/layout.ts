// Button geometry served by the logic node at /layouts.json. The
// layout file is the single source of truth for hit targets, capture
// scale, and dwell duration, so client-side magnetization can never
// disagree with the server's adjudication.

export interface ButtonDoc {
  id: string;
  center: [number, number];
  radius: number;
  label: string;
  enabled: boolean;
}

export interface Layout {
  screen: string;
  display: [number, number];
  capture_scale: number;
  dwell_ms: number;
  buttons: ButtonDoc[];
}

export type LayoutTable = Record<string, Layout>;

export type Point = [number, number];

function dist(a: Point, b: Point): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

/**
 * Snap to the nearest enabled button center whose capture region
 * (capture_scale * radius) contains the point; nearest wins, exact
 * ties break on button id; otherwise the point passes through.
 * Mirrors the backend rule exactly.
 */
export function magnetize(p: Point, layout: Layout): Point {
  let best: { d: number; id: string; center: Point } | null = null;
  for (const b of layout.buttons) {
    if (!b.enabled) continue;
    const d = dist(p, b.center);
    if (d <= layout.capture_scale * b.radius) {
      if (
        best === null ||
        d < best.d ||
        (d === best.d && b.id < best.id)
      ) {
        best = { d, id: b.id, center: b.center };
      }
    }
  }
  return best ? best.center : p;
}

export function hitButton(p: Point, layout: Layout): ButtonDoc | null {
  const snapped = magnetize(p, layout);
  for (const b of layout.buttons) {
    if (b.enabled && b.center[0] === snapped[0] && b.center[1] === snapped[1]) {
      return b;
    }
  }
  return null;
}
