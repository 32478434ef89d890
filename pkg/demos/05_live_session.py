#!/usr/bin/env python3
"""Drive the live service programmatically over its socket protocol.

Starts the service in-process, connects as the operator, grants consent,
waits for autonomy, fires a throttle override, and prints every protocol
message on the wire.  The browser console in frontend/ speaks exactly this
protocol.

Run:  python demos/05_live_session.py
"""

import asyncio
import json

from websockets.asyncio.client import connect

from agvsim.config import SimConfig
from agvsim.service import LiveService


async def operator(port):
    async with connect(f"ws://127.0.0.1:{port}") as ws:
        hello = json.loads(await ws.recv())
        print(f"<- hello: protocol v{hello['body']['version']}, "
              f"cycle {hello['body']['cycle_period']} ms")

        print("-> consent = 1")
        await ws.send(json.dumps({"kind": "consent", "t": 0,
                                  "body": {"value": 1}}))
        activation_tick = None
        async for raw in ws:
            msg = json.loads(raw)
            kind, t, body = msg["kind"], msg["t"], msg["body"]
            if kind == "transition":
                print(f"<- t={t:>5} transition {body['from']} -> {body['to']} "
                      f"({body['cause']})")
                if body["to"] == "AS":
                    print("-> throttle = 0.3 (manual override)")
                    await ws.send(json.dumps(
                        {"kind": "input", "t": 0,
                         "body": {"channel": "throttle", "value": 0.3}}))
                if body["to"] == "MS" and activation_tick is not None:
                    print(f"   measured override response: "
                          f"{t - activation_tick} ms")
                    return
            elif kind == "input":
                activation_tick = t
                print(f"<- t={t:>5} input absorbed: {body['channel']}="
                      f"{body['value']}")
            elif kind == "telemetry" and t % 500 == 0:
                print(f"<- t={t:>5} telemetry mode={body['mode']} "
                      f"speed={body['speed']:.2f}")


async def main():
    service = LiveService(SimConfig(), port=8765, time_scale=2.0)
    server = asyncio.create_task(service.run_forever())
    await service.started.wait()
    try:
        await operator(8765)
    finally:
        service.request_stop()
        await server


if __name__ == "__main__":
    asyncio.run(main())
