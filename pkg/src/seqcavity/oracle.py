"""Independent exact computations used to validate the cavity engine.

Everything here is deliberately implemented with different algorithms
than the main engine: exact rational arithmetic for finite-graph
partition functions and marginals, and transfer matrices for the
one-dimensional chain and narrow two-dimensional strips.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cavity
from .bounds import Refusal

ENUMERATION_CAP = 36


@dataclass(frozen=True)
class FiniteBox:
    """An axis-aligned box of lattice points, optionally filtered."""

    half_widths: tuple
    removed: frozenset = frozenset()
    region: object = None  # optional lattice.Region filter

    def vertices(self):
        ranges = [range(-w, w + 1) for w in self.half_widths]
        out = []
        for p in itertools.product(*ranges):
            if p in self.removed:
                continue
            if self.region is not None and not self.region.contains(p):
                continue
            out.append(p)
        return out


@dataclass(frozen=True)
class OracleResult:
    value: object  # Fraction (enumeration) or float (transfer matrix)
    method: str
    surface_offset: float = field(default=None, compare=False)


def box_graph(box):
    """(vertices, adjacency dict) of the box with unit-L1 edges."""
    verts = box.vertices()
    vset = set(verts)
    adj = {v: [] for v in verts}
    for v in verts:
        for j in range(len(v)):
            for step in (-1, 1):
                u = v[:j] + (v[j] + step,) + v[j + 1:]
                if u in vset:
                    adj[v].append(u)
    return verts, adj


def _check_cap(verts):
    if len(verts) > ENUMERATION_CAP:
        raise Refusal("instance has %d vertices, enumeration cap is %d"
                      % (len(verts), ENUMERATION_CAP))


def _hardcore_dp(verts, adj, lam):
    """Frontier bitmask dynamic program for the independent-set polynomial.

    Vertices are swept in a fixed order; a state records which already
    placed frontier vertices (those still adjacent to unplaced ones) are
    occupied.  Exact in Fraction arithmetic.
    """
    order = sorted(verts, key=lambda v: tuple(reversed(v)))
    pos = {v: i for i, v in enumerate(order)}
    states = {frozenset(): Fraction(1)}
    placed = set()
    for i, v in enumerate(order):
        back = [u for u in adj[v] if u in placed]
        new_states = {}
        for occ, w in states.items():
            # v stays empty
            key = occ
            new_states[key] = new_states.get(key, Fraction(0)) + w
            # v occupied, if compatible
            if not any(u in occ for u in back):
                key = occ | {v}
                new_states[key] = new_states.get(key, Fraction(0)) + w * lam
        placed.add(v)
        # retire vertices whose neighbors are all placed
        done = {u for u in placed
                if all(x in placed for x in adj[u])}
        states = {}
        for occ, w in new_states.items():
            key = frozenset(u for u in occ if u not in done)
            states[key] = states.get(key, Fraction(0)) + w
    return sum(states.values())


def _hardcore_naive(verts, adj, lam):
    """Direct recursion over include/exclude decisions (small graphs only)."""
    verts = list(verts)

    def rec(i, blocked):
        if i == len(verts):
            return Fraction(1)
        v = verts[i]
        total = rec(i + 1, blocked)
        if v not in blocked:
            total += lam * rec(i + 1, blocked | set(adj[v]))
        return total

    return rec(0, set())


def _matching_deletion(edges, lam, memo):
    """Z(G) = Z(G minus e) + lam * Z(G minus both endpoints of e)."""
    if not edges:
        return Fraction(1)
    key = edges
    hit = memo.get(key)
    if hit is not None:
        return hit
    e = next(iter(edges))
    u, v = e
    rest = edges - {e}
    without = frozenset(f for f in rest if u not in f and v not in f)
    val = _matching_deletion(rest, lam, memo) \
        + lam * _matching_deletion(without, lam, memo)
    memo[key] = val
    return val


def _edge_set(verts, adj):
    edges = set()
    for v in verts:
        for u in adj[v]:
            edges.add(frozenset((u, v)))
    return frozenset(tuple(sorted(e)) for e in edges)


def exact_partition_function(box, model, method=None):
    """Exact partition function of the box under the given model."""
    verts, adj = box_graph(box)
    _check_cap(verts)
    lam = Fraction(model.lam)
    if model.model_kind == cavity.HARDCORE:
        if method == "enumeration":
            value = _hardcore_naive(verts, adj, lam)
        else:
            value = _hardcore_dp(verts, adj, lam)
        return OracleResult(value, "enumeration")
    edges = _edge_set(verts, adj)
    if method == "enumeration":
        value = _matching_naive(list(edges), lam)
    else:
        value = _matching_deletion(edges, lam, {})
    return OracleResult(value, "enumeration")


def _matching_naive(edges, lam):
    def rec(i, used):
        if i == len(edges):
            return Fraction(1)
        u, v = edges[i]
        total = rec(i + 1, used)
        if u not in used and v not in used:
            total += lam * rec(i + 1, used | {u, v})
        return total

    return rec(0, set())


def exact_marginal(box, v, model):
    """P(v unoccupied) or P(v unmatched), as an exact Fraction."""
    verts, adj = box_graph(box)
    _check_cap(verts)
    if v not in set(verts):
        raise ValueError("%r is not a live vertex of the box" % (v,))
    lam = Fraction(model.lam)
    if model.model_kind == cavity.HARDCORE:
        z_full = _hardcore_dp(verts, adj, lam)
        sub = FiniteBox(box.half_widths, box.removed | {v}, box.region)
        sverts, sadj = box_graph(sub)
        z_minus = _hardcore_dp(sverts, sadj, lam)
        return OracleResult(z_minus / z_full, "enumeration")
    edges = _edge_set(verts, adj)
    z_full = _matching_deletion(edges, lam, {})
    reduced = frozenset(e for e in edges if v not in e)
    z_minus = _matching_deletion(reduced, lam, {})
    return OracleResult(z_minus / z_full, "enumeration")


def _power_iteration(mat, tol=1e-12, max_iter=200000):
    vec = np.ones(mat.shape[0])
    value = 0.0
    for _ in range(max_iter):
        nxt = mat @ vec
        nrm = float(np.max(nxt))
        nxt /= nrm
        if abs(nrm - value) <= tol * max(1.0, abs(nrm)):
            return nrm
        value = nrm
        vec = nxt
    return value


def _strip_masks(width):
    """Bitmasks of independent (no two adjacent bits) column states."""
    return [m for m in range(1 << width) if not (m & (m << 1))]


def _horizontal_weight(cells_mask, width, lam):
    """Sum over packings of horizontal dimers on the free cells of a row."""
    # linear DP along the row; a dimer may occupy cells (i-1, i) when both
    # are free
    a, b = 1.0, 1.0  # b = weight up to cell i-1, a = up to cell i-2
    prev_free = False
    for i in range(width):
        free = bool(cells_mask >> i & 1)
        cur = b
        if free and prev_free:
            cur += lam * a
        a, b = b, cur
        prev_free = free
    return b


def _dimer_strip_matrix(width, lam):
    size = 1 << width
    mat = np.zeros((size, size))
    for m_in in range(size):
        free0 = ((1 << width) - 1) & ~m_in
        m_out = free0
        while True:
            cells = free0 & ~m_out
            mat[m_out, m_in] = lam ** bin(m_out).count("1") \
                * _horizontal_weight(cells, width, lam)
            if m_out == 0:
                break
            m_out = (m_out - 1) & free0
    return mat


def _hardcore_strip_matrix(width, lam):
    masks = _strip_masks(width)
    size = len(masks)
    mat = np.zeros((size, size))
    for i, s in enumerate(masks):
        w = lam ** bin(s).count("1")
        for j, s2 in enumerate(masks):
            if s & s2 == 0:
                mat[i, j] = w
    return mat


def _chain_root_and_offset(model_kind, lam):
    """Growth rate and boundary offset of the one-dimensional chain.

    Both models satisfy Z_m = Z_{m-1} + lam*Z_{m-2} on the m-vertex path
    (condition on the state of the last vertex / last edge), differing only
    in Z_1.  Z_m = A r1^m + B r2^m gives free energy log r1 and end offset
    log A = lim (log Z_m - m log r1).
    """
    disc = math.sqrt(1.0 + 4.0 * lam)
    r1 = (1.0 + disc) / 2.0
    r2 = (1.0 - disc) / 2.0
    z0 = 1.0
    z1 = 1.0 + lam if model_kind == cavity.HARDCORE else 1.0
    a_coef = (z1 - r2 * z0) / (r1 - r2)
    return r1, math.log(a_coef)


def transfer_matrix_free_energy(model_kind, lam, strip_width=1, d=1):
    """Free energy per site from a transfer matrix; d=1 or narrow d=2 strips.

    For d=1 the result also carries the additive surface constant
    lim_m (log Z_path(m) - m * P) as surface_offset.
    """
    if d == 1:
        if strip_width != 1:
            raise Refusal("d=1 has strip width 1")
        if model_kind == cavity.HARDCORE:
            mat = np.array([[1.0, 1.0], [lam, 0.0]])
        else:
            mat = np.array([[1.0, lam], [1.0, 0.0]])
        root = _power_iteration(np.abs(mat))
        # power iteration on the companion matrix converges to the same
        # Perron root; the closed form is used for the offset
        _, offset = _chain_root_and_offset(model_kind, lam)
        return OracleResult(math.log(root), "transfer_matrix", offset)
    if d == 2:
        if strip_width > 8:
            raise Refusal("strip width capped at 8")
        if model_kind == cavity.HARDCORE:
            mat = _hardcore_strip_matrix(strip_width, lam)
        else:
            mat = _dimer_strip_matrix(strip_width, lam)
        root = _power_iteration(mat)
        return OracleResult(math.log(root) / strip_width, "transfer_matrix")
    raise Refusal("transfer matrices implemented for d=1 and d=2 only")
