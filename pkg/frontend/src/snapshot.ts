// Snapshot documents broadcast by the logic node. The client is
// stateless beyond the latest snapshot: rendering is a pure function of
// (snapshot, layout).

export interface SentenceDoc {
  words: string[];
  per_word_scores: number[];
  rating: string | null;
  origin: string;
}

export interface CandidateSetDoc {
  items: [string, number][];
  shown_before: string[];
}

export interface Snapshot {
  tag: string;
  payload: Record<string, unknown>;
  last_sentence: SentenceDoc | null;
  history: SentenceDoc[];
  privacy_active: boolean;
  filter_enabled: boolean;
  ui_source: string;
  host_source: string | null;
}

export const SCREEN_TAGS = [
  "Idle",
  "Speaking",
  "SentenceRating",
  "SentenceCorrection",
  "WordCorrection",
  "Menu",
  "SpeechMenu",
  "CursorMenu",
  "History",
  "OnScreenKeyboard",
  "SpeechCalibration",
  "CursorCalibration",
  "GazeCalibration",
  "HostControlPanel",
] as const;

export class SnapshotError extends Error {}

export function parseSnapshot(payload: Record<string, unknown>): Snapshot {
  const tag = payload["tag"];
  if (typeof tag !== "string" || !(SCREEN_TAGS as readonly string[]).includes(tag)) {
    throw new SnapshotError(`unknown state tag ${String(tag)}`);
  }
  const body = payload["payload"];
  if (typeof body !== "object" || body === null || Array.isArray(body)) {
    throw new SnapshotError("snapshot payload must be an object");
  }
  return {
    tag,
    payload: body as Record<string, unknown>,
    last_sentence: (payload["last_sentence"] as SentenceDoc | null) ?? null,
    history: (payload["history"] as SentenceDoc[]) ?? [],
    privacy_active: Boolean(payload["privacy_active"]),
    filter_enabled: Boolean(payload["filter_enabled"]),
    ui_source: String(payload["ui_source"] ?? "Gaze"),
    host_source: (payload["host_source"] as string | null) ?? null,
  };
}

export function sentenceText(sentence: SentenceDoc | null): string {
  return sentence ? sentence.words.join(" ") : "";
}
