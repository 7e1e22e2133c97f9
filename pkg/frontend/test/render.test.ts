import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { LayoutTable } from "../src/layout.js";
import { screenModel } from "../src/render.js";
import { Snapshot } from "../src/snapshot.js";

const layoutsPath = fileURLToPath(
  new URL("../../src/bciui/data/layouts.json", import.meta.url),
);
const rawLayouts = JSON.parse(readFileSync(layoutsPath, "utf-8"));
const layouts: LayoutTable = Object.fromEntries(
  Object.entries(rawLayouts).map(([screen, doc]) => [
    screen,
    { screen, ...(doc as object) } as LayoutTable[string],
  ]),
);

function snap(tag: string, payload: Record<string, unknown>,
              extra: Partial<Snapshot> = {}): Snapshot {
  return {
    tag,
    payload,
    last_sentence: null,
    history: [],
    privacy_active: false,
    filter_enabled: false,
    ui_source: "Gaze",
    host_source: null,
    ...extra,
  };
}

const sentence = {
  words: ["hello", "how", "did", "you"],
  per_word_scores: [0, 0, 0, 0],
  rating: null,
  origin: "Decoded",
};

describe("screen models", () => {
  it("speaking shows the partial words live", () => {
    const model = screenModel(snap("Speaking", { partial_words: ["hello", "how"] }), layouts);
    expect(model.tag).toBe("Speaking");
    expect(model.lines[0]).toBe("hello how");
  });

  it("sentence correction captions candidate and word buttons", () => {
    const model = screenModel(
      snap("SentenceCorrection", {
        sentence,
        candidates: { items: [["hello how are you", -1], ["hello how did you", -2]], shown_before: [] },
      }),
      layouts,
    );
    const byId = new Map(model.buttons.map((b) => [b.id, b]));
    expect(byId.get("candidate_0")?.caption).toBe("hello how are you");
    expect(byId.get("candidate_1")?.caption).toBe("hello how did you");
    expect(byId.get("word_2")?.caption).toBe("did");
  });

  it("word correction marks the selected word and captions alternatives", () => {
    const model = screenModel(
      snap("WordCorrection", {
        sentence,
        word_index: 2,
        alternatives: { items: [["are", -0.5], ["was", -1]], shown_before: [] },
      }),
      layouts,
    );
    const byId = new Map(model.buttons.map((b) => [b.id, b]));
    expect(byId.get("word_2")?.active).toBe(true);
    expect(byId.get("alt_0")?.caption).toBe("are");
  });

  it("history lists the most recent sentences first", () => {
    const history = [0, 1, 2, 3, 4].map((i) => ({
      words: [`sentence${i}`],
      per_word_scores: [0],
      rating: "Correct",
      origin: "Decoded",
    }));
    const model = screenModel(snap("History", {}, { history }), layouts);
    const byId = new Map(model.buttons.map((b) => [b.id, b]));
    expect(byId.get("select_0")?.caption).toBe("sentence0");
    expect(byId.get("select_4")?.caption).toBe("sentence4");
  });

  it("rating screen shows the sentence under judgment", () => {
    const model = screenModel(
      snap("SentenceRating", { sentence, after_corrections: true, ratings: [] }),
      layouts,
    );
    expect(model.lines[0]).toBe("hello how did you");
    expect(model.buttons.some((b) => b.id === "rate_correct")).toBe(true);
  });

  it("renders a banner for malformed-state fallback", () => {
    const model = screenModel(snap("Idle", {}), layouts, "decode problem");
    expect(model.banner).toBe("decode problem");
  });

  it("builds a model for every screen tag without throwing", () => {
    const payloads: Record<string, Record<string, unknown>> = {
      Speaking: { partial_words: [] },
      SentenceRating: { sentence, after_corrections: false, ratings: [] },
      SentenceCorrection: { sentence, candidates: { items: [], shown_before: [] } },
      WordCorrection: {
        sentence, word_index: 0,
        alternatives: { items: [], shown_before: [] },
      },
      OnScreenKeyboard: { buffer: "hi" },
      HostControlPanel: { fast: true },
      SpeechCalibration: { modality: "speech" },
      CursorCalibration: { modality: "cursor" },
      GazeCalibration: { modality: "gaze" },
    };
    for (const tag of Object.keys(layouts)) {
      const model = screenModel(snap(tag, payloads[tag] ?? {}), layouts);
      expect(model.tag).toBe(tag);
      expect(model.buttons.length).toBe(layouts[tag]!.buttons.length);
    }
  });
});
