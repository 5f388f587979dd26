"""Shared helpers: finite boxes expressed as regions, matched oracle boxes."""

import random

import pytest

from seqcavity import cavity, lattice, oracle


def box_region(lows, highs, window=None):
    """Axis-aligned box [lows_j, highs_j] as an intersection of half planes.

    Must contain the origin (lows <= 0 <= highs) so the half-plane offsets
    stay nonnegative.  The window just needs to strictly enclose the box;
    keeping it tight keeps region enumeration cheap.
    """
    if window is None:
        window = sum(max(-lo, hi) for lo, hi in zip(lows, highs)) + 2
    parts = []
    for j, (lo, hi) in enumerate(zip(lows, highs)):
        assert lo <= 0 <= hi
        parts.append(lattice.half_plane_plus(j, hi, window))
        parts.append(lattice.half_plane_minus(j, -lo, window))
    return lattice.intersect(*parts)


def oracle_box(lows, highs, removed=frozenset()):
    widths = tuple(max(-lo, hi) for lo, hi in zip(lows, highs))
    return oracle.FiniteBox(widths, frozenset(removed),
                            box_region(lows, highs))


def make_state(model, lows, highs, removed=frozenset()):
    return cavity.CavityState(box_region(lows, highs), frozenset(removed),
                              model)


def random_instance(rng, max_vertices=20):
    """A random small box with a few vertices knocked out, plus a target."""
    while True:
        d = rng.choice([1, 1, 2, 2, 3])
        lows, highs = [], []
        for _ in range(d):
            lows.append(-rng.randint(0, 2))
            highs.append(rng.randint(0, 2))
        region = box_region(lows, highs)
        pts = lattice.region_points(region, d)
        if len(pts) > max_vertices + 4:
            continue
        n_remove = rng.randint(0, max(0, len(pts) // 4))
        removed = set(rng.sample(pts, n_remove))
        live = [p for p in pts if p not in removed]
        if not live or len(live) > max_vertices:
            continue
        target = rng.choice(live)
        return d, tuple(lows), tuple(highs), frozenset(removed), target


@pytest.fixture
def rng():
    return random.Random(20240817)
