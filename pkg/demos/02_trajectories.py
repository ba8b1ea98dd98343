"""Integrate the flow dynamics from several starting states.

Every trajectory stays inside the box [0, w] and converges to the
equilibrium segment: starting empty reaches the segment's lower endpoint,
starting full reaches the upper one, and intermediate starts land on
interior equilibria, conserving total mass once inside the box spanned by
the two endpoints.
"""

import numpy as np

from satflow import IntegratorConfig, NetworkSpec, equilibrium_set, integrate, validate

R = np.array([
    [0.0, 0.75, 0.25],
    [0.0, 0.00, 1.00],
    [0.3, 0.70, 0.00],
])
w = np.array([5.0, 4.0, 6.0])
c = np.array([0.0, -1.0, 1.0])
spec = validate(NetworkSpec(routing=R, capacity=w, demand=c))
eq = equilibrium_set(spec)

rng = np.random.default_rng(0)
starts = [np.zeros(3), w, 0.5 * w] + [rng.random(3) * w for _ in range(3)]

cfg = IntegratorConfig(dt=0.01, t_end=200.0)
print(f"{'start':>28} -> {'limit':>28}  dist-to-segment")
for x0 in starts:
    traj = integrate(spec, x0, cfg)
    dist = eq.distance_l1(traj.final_state)
    print(f"{np.round(x0, 3)!s:>28} -> {np.round(traj.final_state, 5)!s:>28}  {dist:.2e}")

print(f"\nsegment endpoints: {np.round(eq.x_min, 5)} and {np.round(eq.x_max, 5)}")
print("empty start reaches the lower endpoint, full start the upper one.")
