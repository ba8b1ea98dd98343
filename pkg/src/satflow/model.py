"""Network model representation and structural analysis of the routing matrix.

A flow network is a set of n cells with finite buffer capacities w > 0,
exchanging commodity according to a sub-stochastic routing matrix R
(entry R[i, j] is the fraction of cell i's outflow sent to cell j) and
subject to a constant exogenous net demand c = inflow - outflow.

The structural dichotomy that drives everything downstream:

* R stochastic and irreducible   -> unique invariant probability vector pi,
  and the operator H mapping zero-sum v to the zero-sum solution of
  Hv = R' Hv + v;
* R sub-stochastic out-connected -> every cell can route its mass to a
  leaky cell, so the network drains and equilibria are unique;
* anything else                  -> only min/max equilibria are claimed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PreconditionError, ScenarioError

# A row is stochastic iff its sum is within this band of 1, leaky iff the
# sum is below 1 minus the band.  The theory dichotomy is exact; floats
# need the band.
ROW_SUM_TOL = 1e-12

#: residual required of the invariant vector and of the H operator output
RESIDUAL_TOL = 1e-10

STOCHASTIC_IRREDUCIBLE = "StochasticIrreducible"
SUBSTOCHASTIC_OUT_CONNECTED = "SubStochasticOutConnected"
OTHER = "Other"


@dataclass(frozen=True)
class RoutingClass:
    """Structural classification of a routing matrix.

    tag is one of STOCHASTIC_IRREDUCIBLE, SUBSTOCHASTIC_OUT_CONNECTED or
    OTHER; detail carries a human-readable reason (e.g. which subset of
    cells makes a stochastic matrix reducible).
    """

    tag: str
    detail: str = ""


@dataclass
class NetworkSpec:
    """A complete model instance: routing R, capacities w, net demand c.

    Arrays are coerced to float ndarrays at construction; call
    :func:`validate` (or build through :meth:`from_dict`) to enforce the
    model invariants.
    """

    routing: np.ndarray
    capacity: np.ndarray
    demand: np.ndarray
    inflow: np.ndarray | None = None
    outflow: np.ndarray | None = None

    def __post_init__(self):
        self.routing = np.asarray(self.routing, dtype=float)
        self.capacity = np.asarray(self.capacity, dtype=float)
        self.demand = np.asarray(self.demand, dtype=float)
        if self.inflow is not None:
            self.inflow = np.asarray(self.inflow, dtype=float)
        if self.outflow is not None:
            self.outflow = np.asarray(self.outflow, dtype=float)

    @property
    def n(self) -> int:
        return self.capacity.shape[0]

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkSpec":
        """Build and validate a spec from a parsed scenario document."""
        required = {"routing", "capacity", "demand"}
        allowed = required | {"inflow", "outflow"}
        missing = required - data.keys()
        if missing:
            raise ScenarioError(f"missing keys: {sorted(missing)}")
        unknown = data.keys() - allowed
        if unknown:
            raise ScenarioError(f"unknown keys: {sorted(unknown)}")
        spec = cls(
            routing=data["routing"],
            capacity=data["capacity"],
            demand=data["demand"],
            inflow=data.get("inflow"),
            outflow=data.get("outflow"),
        )
        return validate(spec)


def validate(spec: NetworkSpec) -> NetworkSpec:
    """Check all model invariants on ``spec`` and return it unchanged.

    Raises ScenarioError on: dimension mismatch, non-finite or negative
    entries, row sum above 1 + ROW_SUM_TOL, nonzero diagonal, nonpositive
    capacity, or demand inconsistent with inflow - outflow.
    """
    R, w, c = spec.routing, spec.capacity, spec.demand
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ScenarioError(f"routing must be a square matrix, got shape {R.shape}")
    n = R.shape[0]
    if n == 0:
        raise ScenarioError("network must have at least one cell")
    for name, vec in (("capacity", w), ("demand", c)):
        if vec.shape != (n,):
            raise ScenarioError(f"{name} must have length {n}, got shape {vec.shape}")
    for name, arr in (("routing", R), ("capacity", w), ("demand", c)):
        if not np.all(np.isfinite(arr)):
            raise ScenarioError(f"{name} contains non-finite entries")
    if np.any(R < 0):
        i, j = np.argwhere(R < 0)[0]
        raise ScenarioError(f"routing entry ({i + 1},{j + 1}) is negative")
    if np.any(np.abs(np.diag(R)) > 0):
        i = int(np.argmax(np.abs(np.diag(R)) > 0))
        raise ScenarioError(f"routing diagonal entry {i + 1} must be zero")
    sums = R.sum(axis=1)
    if np.any(sums > 1 + ROW_SUM_TOL):
        i = int(np.argmax(sums > 1 + ROW_SUM_TOL))
        raise ScenarioError(f"row {i + 1} sum exceeds 1 ({sums[i]:.17g})")
    if np.any(w <= 0):
        raise ScenarioError("capacity must be positive")
    if (spec.inflow is None) != (spec.outflow is None):
        raise ScenarioError("inflow and outflow must be given together")
    if spec.inflow is not None:
        lam, mu = spec.inflow, spec.outflow
        if lam.shape != (n,) or mu.shape != (n,):
            raise ScenarioError("inflow/outflow must have length n")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(mu))):
            raise ScenarioError("inflow/outflow contain non-finite entries")
        if np.any(lam < 0) or np.any(mu < 0):
            raise ScenarioError("inflow and outflow must be nonnegative")
        if np.any(lam - mu != c):
            raise ScenarioError("demand must equal inflow - outflow exactly")
    return spec


def row_sums(R: np.ndarray) -> np.ndarray:
    return np.asarray(R, dtype=float).sum(axis=1)


def leaky_nodes(R: np.ndarray) -> list[int]:
    """0-based indices of rows with sum strictly below 1 - ROW_SUM_TOL."""
    return [int(i) for i in np.flatnonzero(row_sums(R) < 1 - ROW_SUM_TOL)]


def _reachability(R: np.ndarray) -> np.ndarray:
    """Boolean closure C with C[i, j] true iff j is reachable from i in the
    support digraph of R, counting the trivial zero-length path (C[i, i])."""
    adj = np.asarray(R) > 0
    n = adj.shape[0]
    closure = adj | np.eye(n, dtype=bool)
    # squaring the boolean matrix log2(n) times suffices; n is desk-scale
    while True:
        nxt = closure @ closure
        if np.array_equal(nxt, closure):
            return closure
        closure = nxt


def is_out_connected(R: np.ndarray) -> bool:
    """True iff from every cell some leaky cell is reachable.

    A cell with row sum strictly below 1 counts as reaching itself
    (zero-length path), so e.g. the all-zero matrix is out-connected.
    """
    R = np.asarray(R, dtype=float)
    leaky = leaky_nodes(R)
    if not leaky:
        return False
    closure = _reachability(R)
    return bool(np.all(closure[:, leaky].any(axis=1)))


def is_irreducible(R: np.ndarray) -> bool:
    """True iff the stochastic matrix R has no closed proper subset of cells.

    For stochastic R this is equivalent to strong connectivity of the
    support digraph: a closed subset is exactly a subset with no outgoing
    edge and full internal row mass.  Raises PreconditionError if some row
    leaks (the subset condition is defined only for stochastic matrices).
    """
    R = np.asarray(R, dtype=float)
    sums = row_sums(R)
    if np.any(sums < 1 - ROW_SUM_TOL):
        i = int(np.argmax(sums < 1 - ROW_SUM_TOL))
        raise PreconditionError(
            f"is_irreducible requires a stochastic matrix; row {i + 1} "
            f"sums to {sums[i]:.17g}"
        )
    closure = _reachability(R)
    return bool(np.all(closure & closure.T))


def _closed_subset(R: np.ndarray) -> list[int]:
    """A closed subset of a reducible stochastic matrix: the members of a
    sink strongly-connected component (0-based, sorted)."""
    closure = _reachability(np.asarray(R))
    n = closure.shape[0]
    # a sink SCC seen from any of its members reaches exactly the mutual set
    for i in range(n):
        reach = np.flatnonzero(closure[i])
        if np.all(closure[reach][:, i]):
            return [int(j) for j in reach]
    raise AssertionError("unreachable: every finite digraph has a sink SCC")


def classify_routing(R: np.ndarray) -> RoutingClass:
    """Classify a validated sub-stochastic routing matrix.

    Returns StochasticIrreducible, SubStochasticOutConnected, or Other
    with a reason.  The first two tags are mutually exclusive: a
    stochastic matrix has no leaky row, hence cannot be out-connected.
    """
    R = np.asarray(R, dtype=float)
    sums = row_sums(R)
    if np.all(np.abs(sums - 1) <= ROW_SUM_TOL):
        if is_irreducible(R):
            return RoutingClass(STOCHASTIC_IRREDUCIBLE, "all rows stochastic, support digraph strongly connected")
        closed = [j + 1 for j in _closed_subset(R)]
        return RoutingClass(OTHER, f"stochastic but reducible: closed subset {{{', '.join(map(str, closed))}}}")
    if is_out_connected(R):
        return RoutingClass(SUBSTOCHASTIC_OUT_CONNECTED, f"leaky rows {[i + 1 for i in leaky_nodes(R)]} reachable from every cell")
    closure = _reachability(R)
    leaky = leaky_nodes(R)
    stranded = [int(i) + 1 for i in range(R.shape[0]) if not (leaky and closure[i, leaky].any())]
    return RoutingClass(OTHER, f"cells {stranded} cannot reach a leaky cell")


def _require_stochastic_irreducible(R: np.ndarray, op: str) -> None:
    cls = classify_routing(R)
    if cls.tag != STOCHASTIC_IRREDUCIBLE:
        raise PreconditionError(f"{op} requires a stochastic irreducible routing matrix ({cls.tag}: {cls.detail})")


def invariant_vector(R: np.ndarray, residual_tol: float = RESIDUAL_TOL) -> np.ndarray:
    """The unique probability vector pi with pi = R' pi, strictly positive.

    Power iteration on the averaged matrix (I + R')/2 (which kills
    periodicity) with 1e-14 increment stopping; falls back to a null-space
    solve of I - R' if the iteration budget is exceeded.
    """
    R = np.asarray(R, dtype=float)
    _require_stochastic_irreducible(R, "invariant_vector")
    n = R.shape[0]
    M = 0.5 * (np.eye(n) + R.T)  # column-stochastic, aperiodic
    pi = np.full(n, 1.0 / n)
    for _ in range(10**5):
        nxt = M @ pi
        if np.abs(nxt - pi).sum() <= 1e-14:
            pi = nxt
            break
        pi = nxt
    else:
        # slow mixing: null space of I - R' via SVD
        _, _, vt = np.linalg.svd(np.eye(n) - R.T)
        pi = vt[-1]
        if pi.sum() < 0:
            pi = -pi
    pi = pi / pi.sum()
    residual = np.abs(pi - R.T @ pi).sum()
    if residual >= residual_tol or np.any(pi <= 0):
        raise NumericalError(f"invariant vector residual {residual:.3g} not within {residual_tol:.3g}")
    return pi


def zero_sum_tol(v: np.ndarray) -> float:
    """Scale-aware tolerance on the zero-sum condition sum(v) = 0."""
    return 1e-12 * (1.0 + np.abs(v).sum())


def is_zero_sum(v: np.ndarray) -> bool:
    v = np.asarray(v, dtype=float)
    return abs(v.sum()) <= zero_sum_tol(v)


def h_operator(R: np.ndarray, v: np.ndarray, residual_tol: float = RESIDUAL_TOL) -> np.ndarray:
    """The zero-sum solution Hv of Hv = R' Hv + v.

    Solved directly via the stacked system [(I - R'); 1'] x = [v; 0] in the
    least-squares sense, which is exact to machine precision (I - R' has
    rank n-1 for irreducible stochastic R and the zero-sum row pins the
    remaining degree of freedom).  The averaged power series is kept in
    :func:`h_series` as an independent oracle.
    """
    R = np.asarray(R, dtype=float)
    v = np.asarray(v, dtype=float)
    _require_stochastic_irreducible(R, "h_operator")
    if not is_zero_sum(v):
        raise PreconditionError(f"h_operator requires a zero-sum vector, got sum {v.sum():.3g}")
    n = R.shape[0]
    A = np.vstack([np.eye(n) - R.T, np.ones((1, n))])
    b = np.concatenate([v, [0.0]])
    hv, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = max(np.abs(hv - R.T @ hv - v).max(), abs(hv.sum()))
    if residual >= residual_tol:
        raise NumericalError(f"H solve residual {residual:.3g} not within {residual_tol:.3g}")
    return hv


def h_series(R: np.ndarray, v: np.ndarray, max_terms: int = 10**4, increment_tol: float = 1e-12) -> np.ndarray:
    """Truncated averaged series (1/2) sum_k ((I + R')/2)^k v.

    Test oracle for :func:`h_operator`; each term is zero-sum, so the limit
    is the zero-sum solution of Hv = R' Hv + v.
    """
    R = np.asarray(R, dtype=float)
    v = np.asarray(v, dtype=float)
    M = 0.5 * (np.eye(R.shape[0]) + R.T)
    term = 0.5 * v.copy()
    total = term.copy()
    for _ in range(max_terms - 1):
        term = M @ term
        total += term
        if np.abs(term).max() < increment_tol:
            break
    return total
