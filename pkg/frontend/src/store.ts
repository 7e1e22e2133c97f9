// Client state: the latest snapshot plus connection status. The client
// is stateless beyond this; killing and reloading it mid-session
// reproduces the same screen after the resync snapshot arrives.

import { Message } from "./protocol.js";
import { parseSnapshot, Snapshot, SnapshotError } from "./snapshot.js";

export type ConnectionStatus = "connecting" | "connected" | "reconnecting";

export interface StoreState {
  snapshot: Snapshot | null;
  status: ConnectionStatus;
  sessionId: string | null;
  errorBanner: string | null;
  calibrationCue: string | null;
  lastSeq: number;
}

export class ClientStore {
  state: StoreState = {
    snapshot: null,
    status: "connecting",
    sessionId: null,
    errorBanner: null,
    calibrationCue: null,
    lastSeq: 0,
  };

  private listeners: Array<(state: StoreState) => void> = [];

  subscribe(listener: (state: StoreState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  setStatus(status: ConnectionStatus): void {
    this.state = { ...this.state, status };
    this.emit();
  }

  /** Apply one server message; malformed snapshots keep the last good screen. */
  apply(msg: Message): void {
    if (msg.seq <= this.state.lastSeq) {
      // seq never goes backward per connection; a reconnect resets it.
      return;
    }
    const next: StoreState = { ...this.state, lastSeq: msg.seq };
    switch (msg.kind) {
      case "Ack":
        next.sessionId = String(msg.payload["session_id"] ?? "");
        next.status = "connected";
        break;
      case "Snapshot":
        try {
          next.snapshot = parseSnapshot(msg.payload);
          next.errorBanner = null;
        } catch (err) {
          if (err instanceof SnapshotError) {
            next.errorBanner = err.message; // banner, no crash
          } else {
            throw err;
          }
        }
        break;
      case "CalibrationCue":
        next.calibrationCue = String(msg.payload["modality"] ?? "");
        break;
      case "Error":
        next.errorBanner = String(msg.payload["reason"] ?? "server error");
        break;
      case "Heartbeat":
        break;
      default:
        break;
    }
    this.state = next;
    this.emit();
  }

  /** A new connection restarts the per-connection sequence numbers. */
  resetConnection(): void {
    this.state = { ...this.state, lastSeq: 0, status: "reconnecting" };
    this.emit();
  }

  renderedTag(): string | null {
    return this.state.snapshot ? this.state.snapshot.tag : null;
  }
}
