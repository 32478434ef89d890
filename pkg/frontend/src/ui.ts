// DOM wiring: widgets fire protocol messages, state renders back into the
// page.  Widgets echo their own position optimistically; every displayed
// mode/telemetry value comes from received messages only.

import { StripChart } from "./chart";
import type { ConsoleSession } from "./socket";
import type { ConsoleState, ConsoleStore } from "./store";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

export function initUi(store: ConsoleStore, session: ConsoleSession): void {
  const addr = el<HTMLInputElement>("addr");
  const connectBtn = el<HTMLButtonElement>("connect");
  const disconnectBtn = el<HTMLButtonElement>("disconnect");
  const status = el<HTMLSpanElement>("status");
  const banner = el<HTMLDivElement>("banner");
  const modeBadge = el<HTMLSpanElement>("mode");
  const gate = el<HTMLSpanElement>("gate");
  const consent = el<HTMLInputElement>("consent");
  const throttle = el<HTMLInputElement>("throttle");
  const brake = el<HTMLInputElement>("brake");
  const steering = el<HTMLInputElement>("steering");
  const response = el<HTMLElement>("response");
  const error = el<HTMLDivElement>("error");
  const feed = el<HTMLUListElement>("feed");

  const speedChart = new StripChart(
    el<HTMLCanvasElement>("chart-speed"),
    [{ label: "speed", color: "#4fc3f7", values: (p) => p.speed }],
    [-0.5, 3.2],
  );
  const steerChart = new StripChart(
    el<HTMLCanvasElement>("chart-steer"),
    [{ label: "steering", color: "#ffb74d", values: (p) => p.steering_angle }],
    [-0.7, 0.7],
  );

  connectBtn.onclick = () => session.connect(addr.value);
  disconnectBtn.onclick = () => session.disconnect();

  consent.onchange = () => session.sendConsent(consent.checked ? 1 : 0);

  const bindPedal = (input: HTMLInputElement, channel: "throttle" | "brake",
                     label: string) => {
    const value = el<HTMLSpanElement>(label);
    input.oninput = () => {
      value.textContent = Number(input.value).toFixed(2);
      session.sendInput(channel, Number(input.value));
    };
    // Pedals spring back when released.
    input.onpointerup = () => {
      input.value = "0";
      value.textContent = "0.00";
      session.sendInput(channel, 0);
    };
  };
  bindPedal(throttle, "throttle", "throttle-val");
  bindPedal(brake, "brake", "brake-val");

  const steeringVal = el<HTMLSpanElement>("steering-val");
  steering.oninput = () => {
    steeringVal.textContent = Number(steering.value).toFixed(2);
    session.sendSteeringWheel(Number(steering.value));
  };
  steering.onpointerup = () => {
    steering.value = "0";
    steeringVal.textContent = "0.00";
    session.sendSteeringWheel(0);
  };

  store.subscribe((state) => render(state));

  function render(state: ConsoleState): void {
    status.textContent = state.connection;
    status.className = `status ${state.connection}`;
    connectBtn.disabled = state.connection === "connected"
      || state.connection === "connecting";
    disconnectBtn.disabled = state.connection === "disconnected";

    if (state.connection === "version_mismatch") {
      banner.textContent =
        `protocol version mismatch (server v${state.hello?.version}); ` +
        "controls disabled";
      banner.classList.remove("hidden");
    } else {
      banner.classList.add("hidden");
    }

    const enabled = store.controlsEnabled();
    for (const widget of [consent, throttle, brake, steering]) {
      widget.disabled = !enabled;
    }

    modeBadge.textContent = state.mode ?? "--";
    modeBadge.className = `badge ${state.mode ?? "none"}`;
    gate.textContent =
      state.telemetry === null
        ? ""
        : state.telemetry.gate_open
          ? "gate open"
          : "gate closed";

    response.textContent =
      state.lastResponseMs === null ? "--" : `${state.lastResponseMs} ms`;
    error.textContent = state.lastError ?? "";

    if (state.telemetry !== null) {
      el("tx").textContent = state.telemetry.x.toFixed(2);
      el("ty").textContent = state.telemetry.y.toFixed(2);
      el("tspeed").textContent = state.telemetry.speed.toFixed(2);
      el("tsteer").textContent = state.telemetry.steering_angle.toFixed(3);
    }

    feed.replaceChildren(
      ...state.transitions
        .slice()
        .reverse()
        .map((tr) => {
          const li = document.createElement("li");
          li.textContent = `t=${tr.t} ${tr.from} → ${tr.to} (${tr.cause})`;
          return li;
        }),
    );

    speedChart.draw(state.history);
    steerChart.draw(state.history);
  }

  render(store.state);
}
