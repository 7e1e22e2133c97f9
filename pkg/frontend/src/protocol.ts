// Wire protocol "bci-ui/1": one JSON document per message,
// {"kind": ..., "seq": ..., "payload": {...}}, newline-delimited over
// the stream framings, with strictly increasing seq per direction.

export const PROTOCOL_VERSION = "bci-ui/1";

export const MESSAGE_KINDS = [
  "Hello",
  "Snapshot",
  "PartialWords",
  "CandidateList",
  "HistoryList",
  "CalibrationCue",
  "Ack",
  "ClientEvent",
  "Heartbeat",
  "Error",
] as const;

export type MessageKind = (typeof MESSAGE_KINDS)[number];

export interface Message {
  kind: MessageKind;
  seq: number;
  payload: Record<string, unknown>;
}

export class ProtocolError extends Error {}

export function encodeMessage(msg: Message): string {
  return JSON.stringify({ kind: msg.kind, seq: msg.seq, payload: msg.payload }) + "\n";
}

export function decodeMessage(line: string): Message {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (err) {
    throw new ProtocolError(`invalid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ProtocolError("message must be a JSON object");
  }
  const { kind, seq, payload } = doc as Record<string, unknown>;
  if (typeof kind !== "string" || !(MESSAGE_KINDS as readonly string[]).includes(kind)) {
    throw new ProtocolError(`unknown message kind ${String(kind)} for ${PROTOCOL_VERSION}`);
  }
  if (typeof seq !== "number" || !Number.isInteger(seq)) {
    throw new ProtocolError("seq must be an integer");
  }
  const body = payload ?? {};
  if (typeof body !== "object" || Array.isArray(body)) {
    throw new ProtocolError("payload must be a JSON object");
  }
  return { kind: kind as MessageKind, seq, payload: body as Record<string, unknown> };
}

/** Splits stream chunks into decoded newline-delimited messages. */
export class LineAssembler {
  private buffer = "";

  feed(chunk: string): Message[] {
    this.buffer += chunk;
    const out: Message[] = [];
    for (;;) {
      const idx = this.buffer.indexOf("\n");
      if (idx < 0) break;
      const line = this.buffer.slice(0, idx).trim();
      this.buffer = this.buffer.slice(idx + 1);
      if (line) out.push(decodeMessage(line));
    }
    return out;
  }
}

// UiEvent documents as the logic node ingests them (ClientEvent payload).
export interface UiEventDoc {
  kind: string;
  t: number;
  words?: string[];
  rating?: string;
  index?: number;
  edit?: { kind: string; text?: string; candidate_index?: number };
  button_id?: string;
  flag?: boolean;
  client_id?: string;
}

export class OutboundSequencer {
  private seq = 0;

  hello(clientId: string, capabilities: "render" | "input"): Message {
    return {
      kind: "Hello",
      seq: ++this.seq,
      payload: { client_id: clientId, capabilities },
    };
  }

  clientEvent(event: UiEventDoc): Message {
    return { kind: "ClientEvent", seq: ++this.seq, payload: { event } };
  }

  heartbeat(): Message {
    return { kind: "Heartbeat", seq: ++this.seq, payload: {} };
  }
}
