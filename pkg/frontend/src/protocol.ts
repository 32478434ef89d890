// Socket protocol v1: one JSON object per text frame, {kind, t, body}.
// Every outgoing message is validated against this schema before send;
// incoming frames that do not parse into a known shape are rejected.

export const PROTOCOL_VERSION = "1";

export type Mode = "MS" | "WS" | "AS";

export type ManualChannel = "throttle" | "brake" | "steering_torque";

export interface HelloBody {
  version: string;
  cycle_period: number;
  telemetry_period: number;
  torque_max: number;
  thresholds: Record<ManualChannel, number>;
}

export interface TelemetryBody {
  mode: Mode;
  gate_open: boolean;
  consent: number;
  x: number;
  y: number;
  heading: number;
  speed: number;
  steering_angle: number;
}

export interface TransitionBody {
  from: Mode;
  to: Mode;
  cause: string;
}

export interface InputBody {
  channel: ManualChannel | "consent";
  value: number;
}

export interface ErrorBody {
  message: string;
}

export type ServerMessage =
  | { kind: "hello"; t: number; body: HelloBody }
  | { kind: "telemetry"; t: number; body: TelemetryBody }
  | { kind: "transition"; t: number; body: TransitionBody }
  | { kind: "input"; t: number; body: InputBody }
  | { kind: "consent"; t: number; body: InputBody }
  | { kind: "error"; t: number; body: ErrorBody };

export interface OutgoingMessage {
  kind: "input" | "consent";
  t: number;
  body: { channel?: ManualChannel; value: number };
}

const MODES: ReadonlySet<string> = new Set(["MS", "WS", "AS"]);
const CHANNELS: ReadonlySet<string> = new Set([
  "throttle",
  "brake",
  "steering_torque",
]);

export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) return null;
  const m = msg as { kind?: unknown; t?: unknown; body?: unknown };
  if (typeof m.kind !== "string" || typeof m.t !== "number") return null;
  if (typeof m.body !== "object" || m.body === null) return null;
  const body = m.body as Record<string, unknown>;
  switch (m.kind) {
    case "hello":
      if (typeof body.version !== "string") return null;
      return msg as ServerMessage;
    case "telemetry":
      if (!MODES.has(String(body.mode))) return null;
      return msg as ServerMessage;
    case "transition":
      if (!MODES.has(String(body.from)) || !MODES.has(String(body.to)))
        return null;
      return msg as ServerMessage;
    case "input":
    case "consent":
      if (typeof body.value !== "number") return null;
      return msg as ServerMessage;
    case "error":
      if (typeof body.message !== "string") return null;
      return msg as ServerMessage;
    default:
      return null;
  }
}

/** Clamp a raw widget value into the channel's legal range. */
export function clampChannelValue(
  channel: ManualChannel,
  value: number,
  torqueMax: number,
): number {
  if (channel === "steering_torque") {
    return Math.max(-torqueMax, Math.min(torqueMax, value));
  }
  return Math.max(0, Math.min(1, value));
}

export function makeInputMessage(
  channel: ManualChannel,
  value: number,
  torqueMax: number,
): OutgoingMessage {
  return {
    kind: "input",
    t: 0,
    body: { channel, value: clampChannelValue(channel, value, torqueMax) },
  };
}

export function makeConsentMessage(value: 0 | 1): OutgoingMessage {
  return { kind: "consent", t: 0, body: { value } };
}

/** Returns null when valid, else a reason; called before every send. */
export function validateOutgoing(
  msg: OutgoingMessage,
  torqueMax: number,
): string | null {
  if (msg.kind === "consent") {
    return msg.body.value === 0 || msg.body.value === 1
      ? null
      : "consent must be 0 or 1";
  }
  if (msg.kind !== "input") return "unknown kind";
  const { channel, value } = msg.body;
  if (channel === undefined || !CHANNELS.has(channel)) return "unknown channel";
  if (typeof value !== "number" || Number.isNaN(value)) return "value not a number";
  if (channel === "steering_torque") {
    return Math.abs(value) <= torqueMax ? null : "torque out of range";
  }
  return value >= 0 && value <= 1 ? null : "value outside [0, 1]";
}
