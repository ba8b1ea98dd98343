"""Walk through the structural analysis of a three-cell flow network.

The network routes all of each cell's outflow to the other cells (the
routing matrix is stochastic), cell 2 drains one unit of demand to the
outside while cell 3 receives one, and every buffer is finite.  Because
the routing matrix is irreducible and the demand is zero-sum with a
positive condition value, the network has a whole segment of equilibria.
"""

import numpy as np

from satflow import (
    NetworkSpec,
    classify_routing,
    equilibrium_set,
    h_operator,
    invariant_vector,
    multiplicity_test,
    validate,
)

R = np.array([
    [0.0, 0.75, 0.25],
    [0.0, 0.00, 1.00],
    [0.3, 0.70, 0.00],
])
w = np.array([5.0, 4.0, 6.0])
c = np.array([0.0, -1.0, 1.0])

spec = validate(NetworkSpec(routing=R, capacity=w, demand=c))

cls = classify_routing(R)
print(f"routing class: {cls.tag} ({cls.detail})")

pi = invariant_vector(R)
print(f"invariant vector pi = {pi}   (exact: [12/89, 37/89, 40/89])")

hc = h_operator(R, c)
print(f"Hc = {hc}   (solves Hc = R'Hc + c, zero-sum)")

value, multiple = multiplicity_test(spec)
print(f"condition value = {value:.6f} > 0 -> multiple equilibria: {multiple}")

eq = equilibrium_set(spec)
print(f"\nequilibrium set: {eq.kind}")
print(f"  lower endpoint x_min = {eq.x_min}   (exact: [12/37, 0, 40/37])")
print(f"  upper endpoint x_max = {eq.x_max}   (exact: [60/37, 4, 200/37])")
print(f"  line parameter range  [{eq.alpha_min:.6f}, {eq.alpha_max:.6f}]")
print(f"  l1 length of the segment = {np.abs(eq.x_max - eq.x_min).sum():.6f}"
      f" = condition value")
