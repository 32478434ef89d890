// WebSocket session wrapper: one socket, outgoing validation, store updates.

import type { ManualChannel, OutgoingMessage } from "./protocol";
import {
  makeConsentMessage,
  makeInputMessage,
  parseServerMessage,
  validateOutgoing,
} from "./protocol";
import type { ConsoleStore } from "./store";

export class ConsoleSession {
  private ws: WebSocket | null = null;

  constructor(private store: ConsoleStore) {}

  connect(addr: string): void {
    this.disconnect();
    this.store.setConnection("connecting");
    const ws = new WebSocket(addr);
    this.ws = ws;
    ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg !== null) this.store.apply(msg);
    };
    ws.onclose = () => {
      if (this.ws === ws) {
        this.ws = null;
        this.store.setConnection("disconnected");
      }
    };
    ws.onerror = () => {
      // onclose follows; nothing else to do.
    };
  }

  disconnect(): void {
    if (this.ws !== null) {
      const ws = this.ws;
      this.ws = null;
      ws.close();
      this.store.setConnection("disconnected");
    }
  }

  private send(msg: OutgoingMessage): boolean {
    if (this.ws === null || !this.store.controlsEnabled()) return false;
    const torqueMax = this.store.state.hello?.torque_max ?? 10;
    const problem = validateOutgoing(msg, torqueMax);
    if (problem !== null) {
      this.store.state.lastError = `refusing to send: ${problem}`;
      return false;
    }
    this.ws.send(JSON.stringify(msg));
    return true;
  }

  /** Raw widget value; clamped into range client-side before sending. */
  sendInput(channel: ManualChannel, value: number): boolean {
    const torqueMax = this.store.state.hello?.torque_max ?? 10;
    return this.send(makeInputMessage(channel, value, torqueMax));
  }

  sendConsent(value: 0 | 1): boolean {
    return this.send(makeConsentMessage(value));
  }

  /** Steering wheel position in [-1, 1] maps linearly to wheel torque. */
  sendSteeringWheel(position: number): boolean {
    const torqueMax = this.store.state.hello?.torque_max ?? 10;
    return this.sendInput("steering_torque", position * torqueMax);
  }
}
