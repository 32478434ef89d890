#!/usr/bin/env python3
"""Virtual CAN bus walkthrough: arbitration, jitter, and the command gate.

Run:  python demos/01_bus_arbitration.py
"""

from agvsim.canbus import BusConfig, CanFrame, IdMap, Origin, VirtualCanBus

ids = IdMap()

print("== Arbitration: lowest identifier wins a shared delivery tick ==")
bus = VirtualCanBus(BusConfig(base_latency=1))
bus.set_gate(True)
bus.submit(CanFrame(ids.traction_setpoint, b"\x10", Origin.ADPU), now=0)
bus.submit(CanFrame(ids.control_request, b"\x01", Origin.PLC), now=0)
bus.submit(CanFrame(ids.traction_feedback, b"\x22", Origin.ACTUATOR), now=0)
for frame in bus.deliver_due(1):
    print(f"  t=1 delivered id=0x{frame.id:03X} origin={frame.origin.value}")

print("\n== Seeded jitter: reruns are byte-identical ==")
for attempt in (1, 2):
    bus = VirtualCanBus(BusConfig(base_latency=1, jitter_max=3, seed=42))
    times = []
    for i in range(6):
        f = CanFrame(ids.traction_feedback, bytes([i]), Origin.ACTUATOR)
        bus.submit(f, now=10 * i)
        times.append(f.t_deliver)
    print(f"  attempt {attempt}: deliveries at {times}")

print("\n== The gate: command frames drop outside autonomous mode ==")
bus = VirtualCanBus(BusConfig())
bus.set_gate(False)  # manual mode: unidirectional toward the driving unit
bus.submit(CanFrame(ids.steering_setpoint, b"\x05", Origin.ADPU), now=0)
bus.submit(CanFrame(ids.steering_feedback, b"\x06", Origin.ACTUATOR), now=0)
delivered = bus.deliver_due(2)
print(f"  delivered: {[hex(f.id) for f in delivered]} (feedback always passes)")
print(f"  dropped:   {[hex(f.id) for f in bus.dropped]} (command gated)")
