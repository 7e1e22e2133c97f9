import { describe, expect, it } from "vitest";

import {
  decodeMessage,
  encodeMessage,
  LineAssembler,
  Message,
  OutboundSequencer,
  ProtocolError,
} from "../src/protocol.js";

describe("message codec", () => {
  it("round trips a snapshot message", () => {
    const msg: Message = {
      kind: "Snapshot",
      seq: 12,
      payload: { tag: "Idle", history: [{ words: ["hi"] }] },
    };
    expect(decodeMessage(encodeMessage(msg).trim())).toEqual(msg);
  });

  it("rejects unknown kinds with the protocol version", () => {
    expect(() =>
      decodeMessage('{"kind": "Teleport", "seq": 1, "payload": {}}'),
    ).toThrowError(/bci-ui\/1/);
  });

  it("rejects non-object payloads", () => {
    expect(() =>
      decodeMessage('{"kind": "Heartbeat", "seq": 1, "payload": [1]}'),
    ).toThrowError(ProtocolError);
  });

  it("assembles messages across chunk boundaries", () => {
    const a = encodeMessage({ kind: "Heartbeat", seq: 1, payload: {} });
    const b = encodeMessage({ kind: "Heartbeat", seq: 2, payload: {} });
    const data = a + b;
    const assembler = new LineAssembler();
    const out: Message[] = [];
    for (let i = 0; i < data.length; i += 5) {
      out.push(...assembler.feed(data.slice(i, i + 5)));
    }
    expect(out.map((m) => m.seq)).toEqual([1, 2]);
  });

  it("sequencer emits strictly increasing seq starting from Hello", () => {
    const seq = new OutboundSequencer();
    const hello = seq.hello("c1", "input");
    const ev = seq.clientEvent({ kind: "DonePressed", t: 5 });
    const hb = seq.heartbeat();
    expect([hello.seq, ev.seq, hb.seq]).toEqual([1, 2, 3]);
    expect(hello.payload).toEqual({ client_id: "c1", capabilities: "input" });
    expect(ev.payload).toEqual({ event: { kind: "DonePressed", t: 5 } });
  });
});
