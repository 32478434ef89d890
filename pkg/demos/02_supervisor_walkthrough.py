#!/usr/bin/env python3
"""Mode supervisor walkthrough: consent, handshake, timeout, and override.

Run:  python demos/02_supervisor_walkthrough.py
"""

from agvsim.supervisor import (
    SupervisorConfig,
    SupervisorInputs,
    initial_state,
    step,
)

cfg = SupervisorConfig()  # 10 ms cycle, 2000 ms handshake timeout


def show(label, state):
    print(f"  {label:<42} -> {state.mode.value:>2} "
          f"(gate {'open' if state.gate_open else 'closed'})")


print("== Consent-driven handshake ==")
s = initial_state()
show("ignition", s)
s, _ = step(s, SupervisorInputs(1, False, False, 10), cfg)
show("t=10: consent high, control requested", s)
s, _ = step(s, SupervisorInputs(1, True, False, 40), cfg)
show("t=40: driving unit confirmed in time", s)

print("\n== Manual override wins over everything ==")
s2, _ = step(s, SupervisorInputs(1, True, True, 50), cfg)
show("t=50: throttle engaged while autonomous", s2)

print("\n== Consent revocation ==")
s3, _ = step(s, SupervisorInputs(0, False, False, 50), cfg)
show("t=50: consent dropped to 0", s3)

print("\n== Handshake timeout ==")
s = initial_state()
s, _ = step(s, SupervisorInputs(1, False, False, 10), cfg)
show("t=10: waiting for confirmation", s)
t = 10
while s.mode.value == "WS":
    t += cfg.cycle_period
    s, _ = step(s, SupervisorInputs(1, False, False, t), cfg)
show(f"t={t}: no confirm within {cfg.ws_timeout} ms", s)
print(f"  transition log line: {s.last_transition.log_line()}")
