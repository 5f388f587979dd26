"""Lattice geometry: Z^d points, the lexicographic order, sublattice regions.

Points are plain tuples of ints.  The order used everywhere is the
"last coordinate dominates" lexicographic order: u precedes v iff the
highest-index coordinate where they differ is smaller in u.  Regions are
immutable predicates over lattice points, truncated to a finite L1 ball
around the origin (the window); a depth-t recursion never looks further
than distance t, so the truncation is invisible as long as the window is
large enough.
"""

from dataclasses import dataclass, field


def l1_norm(v):
    return sum(abs(c) for c in v)


def l1_dist(u, v):
    return sum(abs(a - b) for a, b in zip(u, v))


def parity(v):
    """0 for even coordinate sum, 1 for odd."""
    return sum(v) & 1


def lex_key(v):
    """Sort key realizing the lattice order (last coordinate major)."""
    return tuple(reversed(v))


def lex_compare(u, v):
    """-1, 0 or 1 as u precedes, equals or succeeds v in the lattice order."""
    if len(u) != len(v):
        raise ValueError("dimension mismatch: %d vs %d" % (len(u), len(v)))
    for j in range(len(u) - 1, -1, -1):
        if u[j] < v[j]:
            return -1
        if u[j] > v[j]:
            return 1
    return 0


def prec_origin_strict(v):
    """True iff v strictly precedes the origin."""
    for j in range(len(v) - 1, -1, -1):
        if v[j] < 0:
            return True
        if v[j] > 0:
            return False
    return False


# Region kinds
FULL = "full_lattice"
PREC = "prec_origin"
PREC_EVEN = "prec_origin_even"
HALF_PLUS = "half_plane_plus"
HALF_MINUS = "half_plane_minus"
INTERSECT = "intersection"


@dataclass(frozen=True)
class Region:
    """Immutable membership predicate plus a finite window radius.

    kind is one of the module-level constants.  j is a 0-based coordinate
    index and k an offset, used only by the half-plane kinds.  parts holds
    the operands of an intersection.
    """

    kind: str
    window_radius: int
    j: int = 0
    k: int = 0
    parts: tuple = field(default=())

    def __post_init__(self):
        if self.window_radius < 0:
            raise ValueError("window_radius must be nonnegative")
        if self.kind == INTERSECT and not self.parts:
            raise ValueError("intersection of nothing")

    def contains(self, v):
        if l1_norm(v) > self.window_radius:
            return False
        return self._predicate(v)

    def _predicate(self, v):
        kind = self.kind
        if kind == FULL:
            return True
        if kind == PREC:
            return prec_origin_strict(v) or not any(v)
        if kind == PREC_EVEN:
            # everything preceding-or-equal the origin, plus all odd points
            # (odd points succeeding the origin stay; odd points preceding
            # it are already members).
            return prec_origin_strict(v) or not any(v) or parity(v) == 1
        if kind == HALF_PLUS:
            return v[self.j] <= self.k
        if kind == HALF_MINUS:
            return v[self.j] >= -self.k
        if kind == INTERSECT:
            return all(p._predicate(v) for p in self.parts)
        raise ValueError("unknown region kind %r" % kind)


def full_lattice(window):
    return Region(FULL, window)


def prec_origin(window):
    return Region(PREC, window)


def prec_origin_even(window):
    return Region(PREC_EVEN, window)


def half_plane_plus(j, k, window):
    return Region(HALF_PLUS, window, j=j, k=k)


def half_plane_minus(j, k, window):
    return Region(HALF_MINUS, window, j=j, k=k)


def intersect(*regions):
    window = min(r.window_radius for r in regions)
    return Region(INTERSECT, window, parts=tuple(regions))


def region_contains(region, v):
    return region.contains(v)


def neighbors(v, region):
    """Unit-L1 neighbors of v inside region, ascending in the lattice order."""
    d = len(v)
    out = []
    for j in range(d):
        for step in (-1, 1):
            u = v[:j] + (v[j] + step,) + v[j + 1:]
            if region.contains(u):
                out.append(u)
    out.sort(key=lex_key)
    return out


def ball_points(d, radius):
    """All points of Z^d with L1 norm <= radius (generator)."""
    def rec(prefix, budget):
        if len(prefix) == d - 1:
            for c in range(-budget, budget + 1):
                yield prefix + (c,)
            return
        for c in range(-budget, budget + 1):
            yield from rec(prefix + (c,), budget - abs(c))

    yield from rec((), radius)


def region_points(region, d):
    """All members of the region (finite thanks to the window), sorted."""
    pts = [p for p in ball_points(d, region.window_radius) if region.contains(p)]
    pts.sort(key=lex_key)
    return pts


def shape_coefficients(a):
    """Face areas A_j = prod_{k != j} 2 a_k of the box [-a_1,a_1]x...x[-a_d,a_d].

    Returns (list of A_j, their sum).
    """
    if any(x <= 0 for x in a):
        raise ValueError("shape entries must be positive")
    a_list = []
    for j in range(len(a)):
        prod = 1.0
        for k2, x in enumerate(a):
            if k2 != j:
                prod *= 2.0 * x
        a_list.append(prod)
    return a_list, sum(a_list)
