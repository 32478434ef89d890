import { describe, expect, it } from "vitest";

import {
  clampChannelValue,
  makeConsentMessage,
  makeInputMessage,
  parseServerMessage,
  validateOutgoing,
} from "../src/protocol";

describe("parseServerMessage", () => {
  it("accepts well-formed telemetry", () => {
    const msg = parseServerMessage(
      JSON.stringify({
        kind: "telemetry",
        t: 500,
        body: {
          mode: "AS",
          gate_open: true,
          consent: 1,
          x: 1,
          y: 2,
          heading: 0,
          speed: 0.5,
          steering_angle: 0.1,
        },
      }),
    );
    expect(msg).not.toBeNull();
    expect(msg?.kind).toBe("telemetry");
  });

  it("accepts transitions with known modes only", () => {
    const ok = parseServerMessage(
      JSON.stringify({
        kind: "transition",
        t: 10,
        body: { from: "MS", to: "WS", cause: "consent_granted" },
      }),
    );
    expect(ok?.kind).toBe("transition");
    const bad = parseServerMessage(
      JSON.stringify({
        kind: "transition",
        t: 10,
        body: { from: "XX", to: "WS", cause: "?" },
      }),
    );
    expect(bad).toBeNull();
  });

  it("rejects junk", () => {
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage("42")).toBeNull();
    expect(parseServerMessage(JSON.stringify({ kind: "nope", t: 1, body: {} }))).toBeNull();
    expect(parseServerMessage(JSON.stringify({ kind: "hello", t: 1 }))).toBeNull();
  });
});

describe("outgoing validation", () => {
  it("valid input message passes", () => {
    const msg = makeInputMessage("throttle", 0.3, 10);
    expect(validateOutgoing(msg, 10)).toBeNull();
  });

  it("out-of-range widget values are clamped client-side", () => {
    expect(clampChannelValue("throttle", 1.7, 10)).toBe(1);
    expect(clampChannelValue("brake", -0.3, 10)).toBe(0);
    expect(clampChannelValue("steering_torque", -99, 10)).toBe(-10);
    const msg = makeInputMessage("steering_torque", 25, 10);
    expect(msg.body.value).toBe(10);
    expect(validateOutgoing(msg, 10)).toBeNull();
  });

  it("steering position -1 maps to -torque_max", () => {
    const torqueMax = 10;
    const msg = makeInputMessage("steering_torque", -1 * torqueMax, torqueMax);
    expect(msg.body.value).toBe(-torqueMax);
  });

  it("consent is binary", () => {
    expect(validateOutgoing(makeConsentMessage(1), 10)).toBeNull();
    expect(
      validateOutgoing({ kind: "consent", t: 0, body: { value: 2 } }, 10),
    ).not.toBeNull();
  });

  it("rejects unknown channels and NaN", () => {
    expect(
      validateOutgoing(
        { kind: "input", t: 0, body: { channel: "wheel" as never, value: 1 } },
        10,
      ),
    ).not.toBeNull();
    expect(
      validateOutgoing(
        { kind: "input", t: 0, body: { channel: "throttle", value: NaN } },
        10,
      ),
    ).not.toBeNull();
  });
});
