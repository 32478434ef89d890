// Console state container.  Every authoritative field (mode, telemetry,
// transitions, response time) originates from a received server message;
// nothing in the UI mutates these directly.

import type {
  HelloBody,
  Mode,
  ServerMessage,
  TelemetryBody,
  TransitionBody,
} from "./protocol";
import { PROTOCOL_VERSION } from "./protocol";

export type ConnectionStatus =
  | "disconnected"
  | "connecting"
  | "connected"
  | "version_mismatch";

export interface TransitionEntry extends TransitionBody {
  t: number;
}

export interface ChartPoint {
  t: number;
  speed: number;
  steering_angle: number;
}

export interface ConsoleState {
  connection: ConnectionStatus;
  hello: HelloBody | null;
  mode: Mode | null; // always the latest transition/telemetry message
  telemetry: TelemetryBody | null;
  telemetryT: number;
  transitions: TransitionEntry[];
  history: ChartPoint[];
  lastResponseMs: number | null;
  lastError: string | null;
}

const HISTORY_LIMIT = 400;
const FEED_LIMIT = 50;

interface PendingActivation {
  channel: string;
  t: number;
}

export class ConsoleStore {
  state: ConsoleState = initialState();
  private listeners: Array<(s: ConsoleState) => void> = [];
  private pending: PendingActivation | null = null;

  subscribe(fn: (s: ConsoleState) => void): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  setConnection(status: ConnectionStatus): void {
    this.state.connection = status;
    if (status !== "connected") {
      // On reconnect, state re-syncs from the next telemetry message.
      this.pending = null;
    }
    this.notify();
  }

  /** Whether the input widgets may send anything at all. */
  controlsEnabled(): boolean {
    return this.state.connection === "connected";
  }

  apply(msg: ServerMessage): void {
    const s = this.state;
    switch (msg.kind) {
      case "hello": {
        s.hello = msg.body;
        s.connection =
          msg.body.version === PROTOCOL_VERSION
            ? "connected"
            : "version_mismatch";
        break;
      }
      case "telemetry": {
        s.telemetry = msg.body;
        s.telemetryT = msg.t;
        s.mode = msg.body.mode;
        s.history.push({
          t: msg.t,
          speed: msg.body.speed,
          steering_angle: msg.body.steering_angle,
        });
        if (s.history.length > HISTORY_LIMIT) s.history.shift();
        break;
      }
      case "transition": {
        s.mode = msg.body.to;
        s.transitions.push({ t: msg.t, ...msg.body });
        if (s.transitions.length > FEED_LIMIT) s.transitions.shift();
        if (
          msg.body.to === "MS" &&
          msg.body.cause === "manual_engagement" &&
          this.pending !== null
        ) {
          s.lastResponseMs = msg.t - this.pending.t;
          this.pending = null;
        }
        break;
      }
      case "input": {
        // Absorption ack: an engaging input during autonomy starts the
        // client-side response-time measurement.
        const { channel, value } = msg.body;
        if (
          s.mode === "AS" &&
          s.hello !== null &&
          channel !== undefined &&
          channel !== "consent" &&
          this.engages(channel, value)
        ) {
          this.pending = { channel, t: msg.t };
        }
        break;
      }
      case "consent":
        break;
      case "error": {
        s.lastError = msg.body.message;
        break;
      }
    }
    this.notify();
  }

  private engages(channel: string, value: number): boolean {
    const thresholds = this.state.hello?.thresholds;
    if (!thresholds) return false;
    const threshold = thresholds[channel as keyof typeof thresholds];
    if (threshold === undefined) return false;
    const magnitude = channel === "steering_torque" ? Math.abs(value) : value;
    return magnitude > threshold;
  }
}

export function initialState(): ConsoleState {
  return {
    connection: "disconnected",
    hello: null,
    mode: null,
    telemetry: null,
    telemetryT: 0,
    transitions: [],
    history: [],
    lastResponseMs: null,
    lastError: null,
  };
}
