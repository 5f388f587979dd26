"""Certified free-energy and surface-pressure intervals for Z^d.

The free energy (pressure) P(d, lambda) of either model equals the
negative log of one conditional marginal at the origin: the probability
that the origin is unoccupied (hard-core) / unmatched (monomer-dimer) in
the region of all lattice points preceding it.  The chess variant
conditions only even-parity points, halving the depth cost; it carries a
factor 1/2 and, for hard-core only, an additive (1/2)log(1+lambda).

Surface pressure is the first-order boundary correction for rectangular
boxes and is assembled from half-plane marginals, truncated at k_max and
widened by a geometric tail bound whenever the decay certificate allows.
"""

import math
from dataclasses import dataclass

from . import cavity, lattice
from .interval import (BoundInterval, ConsistencyError, exp_interval, outward,
                       round_down, round_up)

PROVEN = "proven_ssm"
UNPROVEN = "unproven"

# extra ulp allowance for the final log / scale steps
_ASSEMBLY_SLACK = 4


class Refusal(Exception):
    """A request the library declines to certify (not an internal error)."""


@dataclass(frozen=True)
class DecayCertificate:
    regime: str
    rho: float = None
    prefactor: float = None


@dataclass(frozen=True)
class DepthAdvice:
    t: int = None
    refused: bool = False
    reason: str = ""


def _hardcore_contraction(d, lam):
    """Level-to-level contraction rate of x -> 1/(1 + lam x^(2d-1)).

    The rate at the unique fixed point is lam*(2d-1)*x^(2d), which is < 1
    exactly on the proven-uniqueness side of the activity threshold.
    """
    if lam == 0:
        return 0.0
    k = 2 * d - 1
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1.0 / (1.0 + lam * mid ** k) > mid:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    return lam * k * x ** (k + 1)


def hardcore_ssm_threshold(d):
    """Critical activity below which exponential SSM is guaranteed (d >= 2)."""
    if d < 2:
        raise ValueError("threshold formula needs vertex degree >= 3")
    delta = 2 * d
    return (delta - 1) ** (delta - 1) / (delta - 2) ** delta


def decay_certificate(model_kind, d, lam):
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if lam < 0:
        raise ValueError("activity must be nonnegative")
    prefactor = math.log1p(2.0 * lam * d)
    if model_kind == cavity.MONOMER_DIMER:
        rho = math.sqrt(1.0 - 2.0 / (math.sqrt(1.0 + 2.0 * lam * d) + 1.0))
        return DecayCertificate(PROVEN, rho, prefactor)
    if model_kind == cavity.HARDCORE:
        if d == 1:
            # one-dimensional uniqueness holds at every activity; the
            # degree-based threshold formula does not apply at degree 2
            return DecayCertificate(PROVEN, _hardcore_contraction(1, lam),
                                    prefactor)
        if lam < hardcore_ssm_threshold(d):
            return DecayCertificate(PROVEN, _hardcore_contraction(d, lam),
                                    prefactor)
        return DecayCertificate(UNPROVEN)
    raise ValueError("unknown model kind %r" % model_kind)


def _origin(d):
    return tuple(0 for _ in range(d))


def _marginal(model, region, t, ulps_per_op, memoize):
    state = cavity.CavityState(region, frozenset(), model)
    return cavity.marginal_bounds(state, _origin(model.dimension), t,
                                  ulps_per_op=ulps_per_op, memoize=memoize)


def _neg_log(interval, scale, constant, meta):
    """[lower, upper] for -scale*log(p) + constant, outward-rounded."""
    lower = -scale * math.log(interval.upper) + constant
    upper = -scale * math.log(interval.lower) + constant
    return BoundInterval(round_down(lower, _ASSEMBLY_SLACK),
                         round_up(upper, _ASSEMBLY_SLACK), meta)


def _free_energy(model, t, pattern, ulps_per_op, memoize):
    if t < 1:
        raise ValueError("depth must be >= 1 (depth 0 gives a vacuous bound)")
    if pattern not in ("plain", "chess"):
        raise ValueError("pattern must be 'plain' or 'chess'")
    d = model.dimension
    if pattern == "chess":
        region = lattice.prec_origin_even(t)
        scale = 0.5
        constant = 0.5 * math.log1p(model.lam) \
            if model.model_kind == cavity.HARDCORE else 0.0
    else:
        region = lattice.prec_origin(t)
        scale = 1.0
        constant = 0.0
    marg = _marginal(model, region, t, ulps_per_op, memoize)
    cert = decay_certificate(model.model_kind, d, model.lam)
    meta = dict(marg.meta)
    meta.update({
        "pattern": pattern,
        "quantity": "free_energy",
        "regime": cert.regime,
        "marginal_lower": marg.lower,
        "marginal_upper": marg.upper,
    })
    return _neg_log(marg, scale, constant, meta)


def hardcore_free_energy(d, lam, t, pattern="chess", ulps_per_op=2,
                         memoize=True):
    """Certified bracket on the hard-core pressure P(d, lam)."""
    return _free_energy(cavity.hardcore_model(lam, d), t, pattern,
                        ulps_per_op, memoize)


def dimer_free_energy(d, lam, t, pattern="chess", ulps_per_op=2, memoize=True):
    """Certified bracket on the monomer-dimer pressure P(d, lam)."""
    return _free_energy(cavity.dimer_model(lam, d), t, pattern,
                        ulps_per_op, memoize)


def free_energy(model_kind, d, lam, t, pattern="chess", ulps_per_op=2,
                memoize=True):
    if model_kind == cavity.HARDCORE:
        return hardcore_free_energy(d, lam, t, pattern, ulps_per_op, memoize)
    if model_kind == cavity.MONOMER_DIMER:
        return dimer_free_energy(d, lam, t, pattern, ulps_per_op, memoize)
    raise ValueError("unknown model kind %r" % model_kind)


def _log_interval(marg):
    """(lower, upper) of log p from a marginal bracket."""
    return (math.log(marg.lower), math.log(marg.upper))


def surface_pressure(model_kind, d, lam, a, t, k_max, allow_uncertified=False,
                     symmetry_reduction=True, ulps_per_op=2, memoize=True):
    """Certified bracket on the surface pressure sP(d, lam, a).

    Evaluates sum_j (A_j/A) sum_{k<=k_max} (2 log p_full - log p_{j,k,+}
    - log p_{j,k,-}) where each p is the preceding-region marginal further
    restricted to a half plane.  When the decay certificate is proven the
    truncated tail is covered by widening with 2*prefactor*rho^(k_max+1)/(1-rho).
    """
    if len(a) != d:
        raise ValueError("shape vector must have length d")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    model = cavity.hardcore_model(lam, d) if model_kind == cavity.HARDCORE \
        else cavity.dimer_model(lam, d)
    cert = decay_certificate(model_kind, d, lam)
    if cert.regime != PROVEN and not allow_uncertified:
        raise Refusal(
            "no proven decay certificate for %s d=%d lambda=%g; the truncated "
            "series cannot be tail-bounded. Pass allow_uncertified to get an "
            "uncertified truncation." % (model_kind, d, lam))
    a_list, a_total = lattice.shape_coefficients(a)
    full = _marginal(model, lattice.prec_origin(t), t, ulps_per_op, memoize)
    log_full = _log_interval(full)
    cubic = all(x == a[0] for x in a)
    terms = []
    total_lo = total_hi = 0.0
    js = [0] if (cubic and symmetry_reduction) else list(range(d))
    for j in js:
        weight = a_list[j] / a_total
        if cubic and symmetry_reduction:
            weight = 1.0  # the d identical directions sum to full weight
        for k in range(k_max + 1):
            plus = _marginal(
                model,
                lattice.intersect(lattice.half_plane_plus(j, k, t),
                                  lattice.prec_origin(t)),
                t, ulps_per_op, memoize)
            minus = _marginal(
                model,
                lattice.intersect(lattice.half_plane_minus(j, k, t),
                                  lattice.prec_origin(t)),
                t, ulps_per_op, memoize)
            lp, lm = _log_interval(plus), _log_interval(minus)
            term_lo = 2.0 * log_full[0] - lp[1] - lm[1]
            term_hi = 2.0 * log_full[1] - lp[0] - lm[0]
            total_lo += weight * term_lo
            total_hi += weight * term_hi
            terms.append({"j": j, "k": k, "weight": weight,
                          "lower": term_lo, "upper": term_hi})
    tail = 0.0
    if cert.regime == PROVEN and cert.rho < 1.0:
        tail = 2.0 * cert.prefactor * cert.rho ** (k_max + 1) / (1.0 - cert.rho)
        total_lo -= tail
        total_hi += tail
    slack = cavity.slack_ulps(d, t, ulps_per_op) * (k_max + 2)
    meta = {
        "quantity": "surface_pressure",
        "model": model_kind, "d": d, "lambda": lam, "depth": t,
        "k_max": k_max, "shape": list(a), "regime": cert.regime,
        "tail_bound": tail, "terms": terms,
        "symmetry_reduction": bool(cubic and symmetry_reduction),
    }
    return BoundInterval(round_down(total_lo, slack),
                         round_up(total_hi, slack), meta)


def depth_for_accuracy(model_kind, d, lam, eps):
    """Smallest certified depth with prefactor*rho^t below eps, if provable."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    cert = decay_certificate(model_kind, d, lam)
    if cert.regime != PROVEN:
        return DepthAdvice(refused=True, reason=(
            "no proven decay rate for %s d=%d lambda=%g; supply an explicit "
            "depth instead" % (model_kind, d, lam)))
    if cert.prefactor <= eps or cert.rho == 0.0:
        return DepthAdvice(t=1)
    t = max(1, math.ceil(math.log(cert.prefactor / eps)
                         / math.log(1.0 / cert.rho)))
    while cert.prefactor * cert.rho ** t >= eps:
        t += 1
    while t > 1 and cert.prefactor * cert.rho ** (t - 1) < eps:
        t -= 1
    return DepthAdvice(t=t)


__all__ = [
    "BoundInterval", "ConsistencyError", "DecayCertificate", "DepthAdvice",
    "Refusal", "decay_certificate", "depth_for_accuracy", "dimer_free_energy",
    "exp_interval", "free_energy", "hardcore_free_energy",
    "hardcore_ssm_threshold", "surface_pressure", "outward",
]
