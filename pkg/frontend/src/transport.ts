// Persistent WebSocket connection with exponential backoff (capped at
// 5 s) and full-snapshot resync: after every reconnect the server's
// handshake delivers Ack plus a complete Snapshot before anything else.

import { encodeMessage, LineAssembler, Message, OutboundSequencer } from "./protocol.js";
import { ClientStore } from "./store.js";

export interface TransportOptions {
  url: string;
  clientId: string;
  capabilities: "render" | "input";
  heartbeatMs?: number;
}

const MAX_BACKOFF_MS = 5000;

export class Transport {
  private ws: WebSocket | null = null;
  private assembler = new LineAssembler();
  private sequencer = new OutboundSequencer();
  private backoffMs = 250;
  private closed = false;
  private heartbeatTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly options: TransportOptions,
    private readonly store: ClientStore,
  ) {}

  connect(): void {
    this.assembler = new LineAssembler();
    this.sequencer = new OutboundSequencer();
    this.store.resetConnection();
    const ws = new WebSocket(this.options.url);
    this.ws = ws;
    ws.onopen = () => {
      this.backoffMs = 250;
      this.send(this.sequencer.hello(this.options.clientId, this.options.capabilities));
      const interval = this.options.heartbeatMs ?? 2000;
      this.heartbeatTimer = setInterval(() => {
        this.send(this.sequencer.heartbeat());
      }, interval);
    };
    ws.onmessage = (event: MessageEvent) => {
      for (const msg of this.assembler.feed(String(event.data))) {
        this.store.apply(msg);
      }
    };
    ws.onclose = () => this.scheduleReconnect();
    ws.onerror = () => ws.close();
  }

  private scheduleReconnect(): void {
    if (this.heartbeatTimer !== null) {
      clearInterval(this.heartbeatTimer);
      this.heartbeatTimer = null;
    }
    if (this.closed) return;
    this.store.setStatus("reconnecting");
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, MAX_BACKOFF_MS);
    setTimeout(() => {
      if (!this.closed) this.connect();
    }, delay);
  }

  send(msg: Message): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(encodeMessage(msg));
    }
  }

  sendEvent(event: Parameters<OutboundSequencer["clientEvent"]>[0]): void {
    this.send(this.sequencer.clientEvent(event));
  }

  close(): void {
    this.closed = true;
    if (this.heartbeatTimer !== null) clearInterval(this.heartbeatTimer);
    this.ws?.close();
  }
}

export function nextBackoff(current: number): number {
  return Math.min(current * 2, MAX_BACKOFF_MS);
}
