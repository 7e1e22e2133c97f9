// Screen rendering in two stages: a pure screen model derived from
// (snapshot, layout) that tests can inspect headlessly, and a canvas
// painter that draws it. Button geometry always comes from the layout
// file; snapshot payloads only contribute texts.

import { DwellProgress } from "./dwell.js";
import { ButtonDoc, Layout, LayoutTable, Point } from "./layout.js";
import { CandidateSetDoc, SentenceDoc, sentenceText, Snapshot } from "./snapshot.js";

export interface ButtonView extends ButtonDoc {
  caption: string;
  active: boolean;
}

export interface ScreenModel {
  tag: string;
  title: string;
  lines: string[];
  buttons: ButtonView[];
  banner: string | null;
}

const TITLES: Record<string, string> = {
  Idle: "Idle",
  Speaking: "Speaking...",
  SentenceRating: "How correct was the sentence?",
  SentenceCorrection: "Candidate sentences",
  WordCorrection: "Word correction",
  Menu: "Menu",
  SpeechMenu: "Speech",
  CursorMenu: "Cursor control",
  History: "Last 5 sentences",
  OnScreenKeyboard: "Keyboard",
  SpeechCalibration: "Speech calibration",
  CursorCalibration: "Cursor calibration",
  GazeCalibration: "Eye tracker calibration",
  HostControlPanel: "Personal computer controls",
};

export function screenModel(
  snapshot: Snapshot,
  layouts: LayoutTable,
  errorBanner: string | null = null,
): ScreenModel {
  const tag = snapshot.tag;
  const layout = layouts[tag];
  const payload = snapshot.payload;
  const lines: string[] = [];
  const captions = new Map<string, string>();
  const active = new Set<string>();

  switch (tag) {
    case "Idle": {
      lines.push(sentenceText(snapshot.last_sentence) || "(no sentence yet)");
      if (snapshot.privacy_active) lines.push("privacy mode on");
      break;
    }
    case "Speaking": {
      const words = (payload["partial_words"] as string[]) ?? [];
      lines.push(words.join(" ") || "...");
      break;
    }
    case "SentenceRating": {
      const sentence = payload["sentence"] as SentenceDoc;
      lines.push(sentenceText(sentence));
      break;
    }
    case "SentenceCorrection": {
      const sentence = payload["sentence"] as SentenceDoc;
      lines.push(sentenceText(sentence));
      const cands = payload["candidates"] as CandidateSetDoc;
      cands.items.forEach(([text], i) => {
        captions.set(`candidate_${i}`, text);
      });
      sentence.words.forEach((w, i) => captions.set(`word_${i}`, w));
      break;
    }
    case "WordCorrection": {
      const sentence = payload["sentence"] as SentenceDoc;
      const index = Number(payload["word_index"] ?? 0);
      lines.push(sentenceText(sentence));
      sentence.words.forEach((w, i) => captions.set(`word_${i}`, w));
      active.add(`word_${index}`);
      const alts = payload["alternatives"] as CandidateSetDoc;
      alts.items.forEach(([text], i) => captions.set(`alt_${i}`, text));
      break;
    }
    case "History": {
      snapshot.history.forEach((s, i) => captions.set(`select_${i}`, sentenceText(s)));
      break;
    }
    case "OnScreenKeyboard": {
      lines.push(String(payload["buffer"] ?? "") + "_");
      break;
    }
    case "HostControlPanel": {
      lines.push(payload["fast"] ? "speed: fast" : "speed: slow");
      break;
    }
    case "SpeechCalibration":
    case "CursorCalibration":
    case "GazeCalibration": {
      lines.push(`calibrating ${String(payload["modality"] ?? "")}...`);
      break;
    }
    default:
      break;
  }

  const buttons: ButtonView[] = (layout ? layout.buttons : []).map((b) => ({
    ...b,
    caption: captions.get(b.id) ?? b.label,
    active: active.has(b.id),
  }));

  return {
    tag,
    title: TITLES[tag] ?? tag,
    lines,
    buttons,
    banner: errorBanner,
  };
}

export interface PointerOverlay {
  raw: Point;
  magnetized: Point;
  dwell: DwellProgress;
}

/** Paints a screen model onto a 2D canvas context. */
export function paint(
  ctx: CanvasRenderingContext2D,
  model: ScreenModel,
  layout: Layout | undefined,
  overlay: PointerOverlay | null,
): void {
  const [w, h] = layout ? layout.display : [1920, 1080];
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#10151d";
  ctx.fillRect(0, 0, w, h);

  ctx.fillStyle = "#e8edf5";
  ctx.font = "bold 44px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(model.title, 40, 70);

  ctx.font = "36px system-ui, sans-serif";
  model.lines.forEach((line, i) => {
    ctx.fillText(line, 40, 140 + i * 48);
  });

  for (const b of model.buttons) {
    ctx.beginPath();
    ctx.arc(b.center[0], b.center[1], b.radius, 0, Math.PI * 2);
    ctx.fillStyle = b.active ? "#2f6f4f" : b.enabled ? "#27405e" : "#1a2230";
    ctx.fill();
    ctx.strokeStyle = "#5b7ea8";
    ctx.lineWidth = 3;
    ctx.stroke();
    ctx.fillStyle = "#dce6f2";
    ctx.font = `${Math.max(16, Math.min(26, b.radius / 2.2))}px system-ui, sans-serif`;
    ctx.textAlign = "center";
    ctx.fillText(b.caption.slice(0, 18), b.center[0], b.center[1] + 6, b.radius * 1.9);
  }
  ctx.textAlign = "left";

  if (model.banner) {
    ctx.fillStyle = "#7c2d2d";
    ctx.fillRect(0, h - 56, w, 56);
    ctx.fillStyle = "#ffe2e2";
    ctx.font = "28px system-ui, sans-serif";
    ctx.fillText(model.banner, 24, h - 18);
  }

  if (overlay) {
    const [mx, my] = overlay.magnetized;
    if (overlay.dwell.button_id && overlay.dwell.fraction > 0) {
      ctx.beginPath();
      ctx.arc(mx, my, 34, -Math.PI / 2, -Math.PI / 2 + overlay.dwell.fraction * Math.PI * 2);
      ctx.strokeStyle = "#8be28b";
      ctx.lineWidth = 6;
      ctx.stroke();
    }
    ctx.beginPath();
    ctx.arc(mx, my, 10, 0, Math.PI * 2);
    ctx.fillStyle = "#f3c969";
    ctx.fill();
    ctx.beginPath();
    ctx.arc(overlay.raw[0], overlay.raw[1], 4, 0, Math.PI * 2);
    ctx.fillStyle = "#f3c96966";
    ctx.fill();
  }
}
