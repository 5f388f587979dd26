"""Depth-bounded cavity recursions for the two lattice models.

The engine evaluates the computation-tree approximations of the marginal
probability that a target vertex is unoccupied (hard-core) or unmatched
(monomer-dimer).  Two seedings exist: phi starts the depth-0 values at 1,
psi at 0.  Their values at even depth sandwich the exact marginal from
above/below, and swap roles at odd depth, which is what turns truncated
recursions into certified bounds.

Both seeds are carried through one traversal as a pair, so asking for a
(phi, psi) pair costs essentially one recursion.
"""

import sys
from dataclasses import dataclass

from .interval import intersect_intervals, outward
from . import lattice

HARDCORE = "hardcore"
MONOMER_DIMER = "monomer_dimer"

PHI = "phi"
PSI = "psi"

_SEED_PAIR = (1.0, 0.0)  # (phi, psi) at depth 0


@dataclass(frozen=True)
class ModelSpec:
    model_kind: str
    lam: float
    dimension: int
    ref_spin_pair_energy: float = 0.0
    ref_spin_field: float = 0.0

    def __post_init__(self):
        if self.model_kind not in (HARDCORE, MONOMER_DIMER):
            raise ValueError("unknown model kind %r" % self.model_kind)
        if self.lam < 0:
            raise ValueError("activity must be nonnegative")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.ref_spin_pair_energy != 0.0 or self.ref_spin_field != 0.0:
            raise ValueError("reference-spin constants are 0 for both models")


@dataclass(frozen=True)
class CavityState:
    region: lattice.Region
    removed: frozenset
    model: ModelSpec


def hardcore_model(lam, dimension):
    return ModelSpec(HARDCORE, lam, dimension)


def dimer_model(lam, dimension):
    return ModelSpec(MONOMER_DIMER, lam, dimension)


def memo_key(state, v, t, seed):
    """Cache fingerprint: removals outside the depth-t ball cannot matter."""
    near = frozenset(u for u in state.removed if lattice.l1_dist(u, v) <= t)
    return (state.region.kind, v, t, seed, near)


def slack_ulps(dimension, t, ulps_per_op=2):
    """Accumulated rounding allowance for one depth-t evaluation.

    Each recursion level applies at most 2d multiply/accumulate steps plus
    a scale and a reciprocal to quantities of order one, so the worst-case
    relative drift is proportional to depth.  ulps_per_op=2 leaves a factor
    of safety over the half-ulp each rounded operation can contribute.
    """
    return ulps_per_op * (2 * dimension + 2) * max(t, 1)


class _Graph:
    """Finite adjacency structure for one region (ids are dense ints)."""

    def __init__(self, region, dimension, extra_removed=()):
        pts = lattice.region_points(region, dimension)
        self.points = pts
        self.index = {p: i for i, p in enumerate(pts)}
        self.neighbor_ids = []
        for p in pts:
            ns = lattice.neighbors(p, region)
            self.neighbor_ids.append(tuple(self.index[q] for q in ns))
        self.max_norm = max((lattice.l1_norm(p) for p in pts), default=0)
        self.initially_removed = frozenset(
            self.index[p] for p in extra_removed if p in self.index)


class _Engine:
    """One top-level query: graph, model, memo table, traversal state."""

    def __init__(self, graph, model, memoize=True):
        self.graph = graph
        self.lam = model.lam
        self.hardcore = model.model_kind == HARDCORE
        self.memoize = memoize
        self.memo = {}
        self.removed = bytearray(len(graph.points))
        for i in graph.initially_removed:
            self.removed[i] = 1
        # only dynamically removed vertices go on the stack; the initial
        # removals are permanent and already excluded by the flag array
        self.stack = []

    def pair(self, v, t):
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000 + 50 * t))
        return self._rec(v, t)

    def _rec(self, v, t):
        removed = self.removed
        live = [u for u in self.graph.neighbor_ids[v] if not removed[u]]
        if self.hardcore:
            if t == 0:
                return _SEED_PAIR
            if not live:
                x = 1.0 / (1.0 + self.lam)
                return (x, x)
        else:
            if not live:
                # a vertex with no remaining edges is surely unmatched
                return (1.0, 1.0) if t > 0 else _SEED_PAIR
            if t == 0:
                return _SEED_PAIR
        memoize = self.memoize
        if memoize:
            pts = self.graph.points
            cv = pts[v]
            near = [u for u in self.stack if lattice.l1_dist(pts[u], cv) <= t]
            near.sort()
            key = (v, t, tuple(near))
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        lam = self.lam
        if self.hardcore:
            # siblings are evaluated with v and all earlier siblings removed
            base = len(self.stack)
            self.stack.append(v)
            removed[v] = 1
            phi_prod = psi_prod = 1.0
            for u in live:
                cp, cs = self._rec(u, t - 1)
                phi_prod *= cp
                psi_prod *= cs
                self.stack.append(u)
                removed[u] = 1
            for u in self.stack[base:]:
                removed[u] = 0
            del self.stack[base:]
            val = (1.0 / (1.0 + lam * phi_prod), 1.0 / (1.0 + lam * psi_prod))
        else:
            # all neighbors see the same graph with just v removed
            self.stack.append(v)
            removed[v] = 1
            phi_sum = psi_sum = 0.0
            for u in live:
                cp, cs = self._rec(u, t - 1)
                phi_sum += cp
                psi_sum += cs
            removed[v] = 0
            self.stack.pop()
            val = (1.0 / (1.0 + lam * phi_sum), 1.0 / (1.0 + lam * psi_sum))
        if memoize:
            self.memo[key] = val
        return val


def _check_window(state, v, t):
    region = state.region
    if region.window_radius >= t + lattice.l1_norm(v):
        return
    # A window smaller than the recursion horizon is still fine when the
    # region predicate itself dies out before the window boundary (finite
    # boxes); truncation can only bite if members sit on the boundary.
    graph = _graph_for(state)
    if graph.max_norm >= region.window_radius:
        raise ValueError(
            "window_radius %d too small for depth %d at %r; enlarge the window"
            % (region.window_radius, t, v))


_GRAPH_CACHE = {}


def _graph_for(state):
    key = (state.region, state.model.dimension, state.removed)
    g = _GRAPH_CACHE.get(key)
    if g is None:
        g = _Graph(state.region, state.model.dimension, state.removed)
        if len(_GRAPH_CACHE) > 32:
            _GRAPH_CACHE.clear()
        _GRAPH_CACHE[key] = g
    return g


def _evaluate_pair(state, v, t, memoize=True, engine_out=None):
    if t < 0:
        raise ValueError("depth must be nonnegative")
    _check_window(state, v, t)
    graph = _graph_for(state)
    if v not in graph.index:
        raise ValueError("%r is not a live vertex of the region" % (v,))
    engine = _Engine(graph, state.model, memoize=memoize)
    if engine_out is not None:
        engine_out.append(engine)
    return engine.pair(graph.index[v], t)


def hardcore_cavity(state, v, t, seed, memoize=True):
    """Phi or Psi value for the hard-core model at vertex v, depth t."""
    if state.model.model_kind != HARDCORE:
        raise ValueError("state carries a %s model" % state.model.model_kind)
    pair = _evaluate_pair(state, v, t, memoize=memoize)
    return pair[0] if seed == PHI else pair[1]


def dimer_cavity(state, v, t, seed, memoize=True):
    """Phi or Psi value for the monomer-dimer model at vertex v, depth t."""
    if state.model.model_kind != MONOMER_DIMER:
        raise ValueError("state carries a %s model" % state.model.model_kind)
    pair = _evaluate_pair(state, v, t, memoize=memoize)
    return pair[0] if seed == PHI else pair[1]


def cavity_pair(state, v, t, memoize=True):
    """(phi, psi) for the state's model in one traversal."""
    return _evaluate_pair(state, v, t, memoize=memoize)


def _parity_bracket(pair, t):
    """Orient a (phi, psi) pair into (lower, upper) around the exact marginal."""
    phi, psi = pair
    return (psi, phi) if t % 2 == 0 else (phi, psi)


def marginal_bounds(state, v, t, ulps_per_op=2, memoize=True):
    """Certified bracket on P(v unoccupied / unmatched), best of two parities.

    Depths t and t-1 each give a valid bracket (opposite parities); both
    are outward-rounded and intersected.  An empty intersection would mean
    the code violated its own sandwich property, so it raises.
    """
    if t < 1:
        raise ValueError("depth must be >= 1 for a nonvacuous bracket")
    _check_window(state, v, t)
    graph = _graph_for(state)
    if v not in graph.index:
        raise ValueError("%r is not a live vertex of the region" % (v,))
    engine = _Engine(graph, state.model, memoize=memoize)
    vid = graph.index[v]
    pair_t = engine.pair(vid, t)
    pair_p = engine.pair(vid, t - 1)
    slack = slack_ulps(state.model.dimension, t, ulps_per_op)
    meta = {
        "depth": t,
        "lambda": state.model.lam,
        "d": state.model.dimension,
        "model": state.model.model_kind,
        "slack_ulps": slack,
        "memoized": memoize,
    }
    lo_t, hi_t = _parity_bracket(pair_t, t)
    lo_p, hi_p = _parity_bracket(pair_p, t - 1)
    iv_t = outward(lo_t, hi_t, slack)
    iv_p = outward(lo_p, hi_p, slack)
    return intersect_intervals(iv_t, iv_p, meta)
