"""Sweep the exogenous demand along c(a) = [a/3, -1, 2a/3], a in [0, 9].

The total demand sum(c) = a - 1 crosses zero at a = 1, where the
condition value is positive: the equilibrium is unique on both sides but
jumps discontinuously across the crossing, from the segment's lower
endpoint to its upper endpoint.  This is the phase transition.
"""

import numpy as np

from satflow import DemandPath, NetworkSpec, directional_limits, equilibrium_set, sweep, validate

R = np.array([
    [0.0, 0.75, 0.25],
    [0.0, 0.00, 1.00],
    [0.3, 0.70, 0.00],
])
w = np.array([5.0, 4.0, 6.0])

path = DemandPath(c_start=[0.0, -1.0, 0.0], c_end=[3.0, -1.0, 6.0], samples=91)
result = sweep(R, w, path)

print("a      kind      x*(c(a))")
for row in result.rows[::10]:
    a = 9 * row.s
    print(f"{a:4.1f}  {row.kind:8}  {np.round(row.x_min, 4)}")

jump = result.jumps[0]
a_star = 9 * jump["s"]
c_star = path.c_at(jump["s"])
print(f"\ncritical point at a = {a_star:.9f}, jump magnitude {jump['magnitude']:.6f} (= 356/37)")

eq = equilibrium_set(validate(NetworkSpec(routing=R, capacity=w, demand=c_star)))
lim = directional_limits(R, w, c_star, direction=c_star - path.c_at(0.0))
print(f"approaching from below: x* -> {np.round(lim.from_below, 5)} (segment lower endpoint {np.round(eq.x_min, 5)})")
print(f"approaching from above: x* -> {np.round(lim.from_above, 5)} (segment upper endpoint {np.round(eq.x_max, 5)})")
