"""Live operator service: the simulation in soft real time over a websocket.

One operator connection at a time.  The simulation loop is the sole owner
of simulation state and advances it against the wall clock with catch-up
ticks (logic is never skipped).  Operator inputs arrive as JSON messages,
go through a single ordered queue, and are absorbed at tick boundaries, so
a live session replayed as a batch script reproduces the same transition
sequence.  On disconnect every manual input and the consent signal fall to
zero within one cycle.

Protocol (one JSON object per text frame), version "1":

    {"kind": "hello" | "telemetry" | "transition" | "input" | "consent"
             | "error",
     "t": <sim ms>, "body": {...}}

The server sends ``hello`` on connect, streams ``telemetry`` at a fixed
period and ``transition`` on every mode change, and echoes each accepted
``input``/``consent`` with the tick at which it was absorbed.
"""

from __future__ import annotations

import asyncio
import json

from .config import SimConfig
from .manual_io import BRAKE, CONSENT, MANUAL_CHANNELS, STEERING_TORQUE, THROTTLE
from .scenario import Simulation, build_behavior

PROTOCOL_VERSION = "1"


def _message(kind: str, t: int, body: dict) -> str:
    return json.dumps({"kind": kind, "t": t, "body": body})


class LiveService:
    def __init__(self, config: SimConfig | None = None,
                 host: str = "127.0.0.1", port: int = 8700,
                 seed: int = 42, time_scale: float = 1.0):
        self.cfg = config or SimConfig()
        self.host = host
        self.port = port
        self.time_scale = time_scale
        behavior = build_behavior(self.cfg.behavior, self.cfg.adpu)
        self.sim = Simulation(self.cfg, behavior, seed=seed, session="live")
        self.sim.log.append("init", 0, script="live", session="live",
                            seed=seed, behavior=behavior.name, duration=0)
        self._cursor = len(self.sim.log.records)
        self._client = None
        self._sendq: asyncio.Queue[str] | None = None
        self._stop = asyncio.Event()
        self.started = asyncio.Event()

    # -- lifecycle ----------------------------------------------------------

    async def run_forever(self) -> None:
        from websockets.asyncio.server import serve

        async with serve(self._handler, self.host, self.port):
            self.started.set()
            await self._sim_loop()

    def request_stop(self) -> None:
        self._stop.set()

    async def _sim_loop(self) -> None:
        loop = asyncio.get_running_loop()
        start = loop.time()
        while not self._stop.is_set():
            target = int((loop.time() - start) * 1000.0 * self.time_scale)
            while self.sim.t < target:
                self.sim.step_tick()
                self._pump()
            await asyncio.sleep(0.001)

    # -- outgoing -----------------------------------------------------------

    def _send(self, kind: str, t: int, body: dict) -> None:
        if self._sendq is not None:
            self._sendq.put_nowait(_message(kind, t, body))

    def _pump(self) -> None:
        """Translate new log records into protocol messages."""
        records = self.sim.log.records
        while self._cursor < len(records):
            rec = records[self._cursor]
            self._cursor += 1
            kind = rec["kind"]
            if kind == "transition":
                self._send("transition", rec["t"], {
                    "from": rec["frm"], "to": rec["to"], "cause": rec["cause"],
                })
            elif kind == "telemetry":
                self._send("telemetry", rec["t"], {
                    "mode": rec["mode"],
                    "gate_open": rec["gate_open"],
                    "consent": rec["consent"],
                    "x": rec["x"], "y": rec["y"], "heading": rec["heading"],
                    "speed": rec["speed"],
                    "steering_angle": rec["steering_angle"],
                })
            elif kind == "signal_edge":
                msg_kind = "consent" if rec["channel"] == CONSENT else "input"
                self._send(msg_kind, rec["t"], {
                    "channel": rec["channel"], "value": rec["value"],
                })

    # -- incoming -----------------------------------------------------------

    def _validate(self, raw) -> tuple[str, float] | str:
        """Returns (channel, value) or an error string."""
        try:
            msg = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return "not valid JSON"
        if not isinstance(msg, dict) or "kind" not in msg:
            return "missing kind"
        kind = msg["kind"]
        body = msg.get("body")
        if not isinstance(body, dict):
            return "missing body"
        if kind == "consent":
            if body.get("value") not in (0, 1):
                return "consent value must be 0 or 1"
            return (CONSENT, float(body["value"]))
        if kind == "input":
            channel = body.get("channel")
            value = body.get("value")
            if channel not in MANUAL_CHANNELS:
                return f"unknown channel {channel!r}"
            if not isinstance(value, (int, float)):
                return "value must be a number"
            if channel in (THROTTLE, BRAKE) and not 0.0 <= value <= 1.0:
                return f"{channel} value outside [0, 1]"
            if channel == STEERING_TORQUE and abs(value) > self.cfg.plant.torque_max:
                return "steering torque outside range"
            return (channel, float(value))
        return f"unsupported kind {kind!r}"

    async def _handler(self, ws) -> None:
        if self._client is not None:
            await ws.send(_message("error", self.sim.t,
                                   {"message": "operator seat already taken"}))
            await ws.close()
            return
        self._client = ws
        self._sendq = asyncio.Queue()
        sender = asyncio.create_task(self._sender(ws))
        self._send("hello", self.sim.t, {
            "version": PROTOCOL_VERSION,
            "cycle_period": self.cfg.supervisor.cycle_period,
            "telemetry_period": self.cfg.telemetry_period,
            "torque_max": self.cfg.plant.torque_max,
            "thresholds": {
                THROTTLE: self.cfg.engagement.throttle_threshold,
                BRAKE: self.cfg.engagement.brake_threshold,
                STEERING_TORQUE: self.cfg.engagement.steering_torque_threshold,
            },
        })
        try:
            async for raw in ws:
                result = self._validate(raw)
                if isinstance(result, str):
                    self._send("error", self.sim.t, {"message": result})
                else:
                    channel, value = result
                    self.sim.inject(channel, value)
        except Exception:
            pass
        finally:
            sender.cancel()
            self._client = None
            self._sendq = None
            self._failsafe()

    async def _sender(self, ws) -> None:
        while True:
            msg = await self._sendq.get()
            await ws.send(msg)

    def _failsafe(self) -> None:
        # Operator gone: every manual input decays to zero and consent
        # drops, absorbed on the next tick.
        for channel in MANUAL_CHANNELS:
            self.sim.inject(channel, 0.0)
        self.sim.inject(CONSENT, 0)
