"""Certified interval container and outward-rounding helpers."""

import math
from dataclasses import dataclass, field


class ConsistencyError(RuntimeError):
    """Two supposedly-valid brackets of the same quantity failed to overlap.

    This can only happen through an implementation or hardware fault, so
    callers must abort rather than patch the interval up.
    """


@dataclass(frozen=True)
class BoundInterval:
    """A certified bracket: the exact target quantity lies in [lower, upper].

    meta records how the interval was produced (depth, pattern, activity,
    rounding slack, decay regime and so on).
    """

    lower: float
    upper: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ConsistencyError(
                "empty interval: lower=%r > upper=%r" % (self.lower, self.upper))

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def midpoint(self):
        return 0.5 * (self.lower + self.upper)

    def contains(self, x):
        return self.lower <= x <= self.upper

    def intersects(self, other):
        return self.lower <= other.upper and other.lower <= self.upper


def round_down(x, slack_ulps):
    """x minus slack_ulps units in the last place, then one more step down."""
    if slack_ulps:
        x = x - slack_ulps * math.ulp(abs(x) if x else 1e-300)
    return math.nextafter(x, -math.inf)


def round_up(x, slack_ulps):
    if slack_ulps:
        x = x + slack_ulps * math.ulp(abs(x) if x else 1e-300)
    return math.nextafter(x, math.inf)


def outward(lower, upper, slack_ulps, meta=None):
    """Build a BoundInterval widened outward by the accumulated ulp slack."""
    return BoundInterval(round_down(lower, slack_ulps),
                         round_up(upper, slack_ulps),
                         dict(meta or {}))


def intersect_intervals(a, b, meta=None):
    """Intersection of two brackets of the same exact quantity."""
    lower = max(a.lower, b.lower)
    upper = min(a.upper, b.upper)
    if lower > upper:
        raise ConsistencyError(
            "brackets [%r, %r] and [%r, %r] do not overlap"
            % (a.lower, a.upper, b.lower, b.upper))
    return BoundInterval(lower, upper, dict(meta or {}))


def exp_interval(iv):
    """Exponentiate a bracket; exp is increasing so bracketing is preserved."""
    meta = dict(iv.meta)
    meta["transform"] = "exp"
    return BoundInterval(math.nextafter(math.exp(iv.lower), -math.inf),
                         math.nextafter(math.exp(iv.upper), math.inf),
                         meta)
