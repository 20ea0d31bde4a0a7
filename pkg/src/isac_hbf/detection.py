"""Detection-theory kernel.

The radar test statistic is noncentral chi-squared with 2 degrees of freedom,
so the detection probability is the first-order Marcum Q function
Q1(sqrt(rho), sqrt(tau)) with tau the Neyman-Pearson threshold. Everything
here is scalar, pure, and self-contained (no special-function dependencies).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# Window half-width for the Poisson-mixture series, in units of the Poisson
# standard deviation (plus a fixed pad for small means). 40 sigma keeps the
# truncated tail mass far below 1e-300 while staying cheap.
_WINDOW_SIGMAS = 40.0
_WINDOW_PAD = 40


def _log_poisson_pmf(i: int, mean: float) -> float:
    return i * math.log(mean) - mean - math.lgamma(i + 1)


def _representable_start(mean: float, lo: int) -> int:
    """Smallest index >= lo whose Poisson pmf survives in double precision.

    The pmf is unimodal with a representable peak, so a binary search
    between lo and the mode finds the first index with log-pmf > -700
    (exp of anything below that underflows). Mass dropped this way is
    below e^-700 per term -- far inside every tolerance used here.
    """
    if _log_poisson_pmf(lo, mean) > -700.0:
        return lo
    hi = max(lo + 1, int(mean))
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _log_poisson_pmf(mid, mean) > -700.0:
            hi = mid
        else:
            lo = mid
    return hi


def marcum_q1(a: float, b: float) -> float:
    """First-order Marcum Q function Q1(a, b).

    Evaluated as the Poisson mixture of Erlang survival functions:

        Q1(a, b) = sum_i  pois(i; a^2/2) * exp(-y) * sum_{m<=i} y^m / m!

    with y = b^2/2. Every term is positive, so there is no cancellation;
    both the Poisson weights and the Erlang terms are advanced by
    recurrences seeded in the log domain, and the index window is centered
    on the Poisson mode. Absolute accuracy is ~1e-13 or better.
    """
    if a < 0 or b < 0:
        raise ValueError("marcum_q1 arguments must be nonnegative")
    lam = 0.5 * a * a
    y = 0.5 * b * b
    if y == 0.0:
        return 1.0
    if lam == 0.0:
        return math.exp(-y)

    sd = math.sqrt(lam)
    i_lo = max(0, int(lam - _WINDOW_SIGMAS * sd) - _WINDOW_PAD)
    i_lo = _representable_start(lam, i_lo)
    i_hi = int(lam + _WINDOW_SIGMAS * sd) + _WINDOW_PAD

    # Poisson weight at the window start, then upward recurrence.
    w = math.exp(_log_poisson_pmf(i_lo, lam))

    # Erlang survival s(i) = exp(-y) * sum_{m=0..i} y^m/m!. Terms below the
    # y-window carry negligible mass, so the running sum starts at m0.
    m0 = max(0, int(y - _WINDOW_SIGMAS * math.sqrt(y)) - _WINDOW_PAD)
    m0 = _representable_start(y, m0)
    t = 0.0
    s = 0.0
    seeded = False
    if i_lo >= m0:
        t = math.exp(_log_poisson_pmf(m0, y))
        seeded = True
        m = m0
        s = t
        while m < i_lo:
            m += 1
            t *= y / m
            s += t
            if t < s * 1e-18:
                break
        if m < i_lo:          # t already negligible; s has converged
            t = 0.0

    # Accumulate q = sum w_i * s_i with compensated summation.
    q = 0.0
    comp = 0.0
    i = i_lo
    while i <= i_hi:
        term = w * s
        delta = term - comp
        tot = q + delta
        comp = (tot - q) - delta
        q = tot
        i += 1
        w *= lam / i
        if not seeded:
            if i >= m0:
                t = math.exp(i * math.log(y) - y - math.lgamma(i + 1))
                s = t
                seeded = True
        elif t > 0.0:
            t *= y / i
            s += t
            if t < s * 1e-18:
                t = 0.0
        if w == 0.0 and i > lam:
            break
    return min(max(q, 0.0), 1.0)


@dataclass(frozen=True)
class DetectionSpec:
    """False-alarm probability, the induced threshold, and the radar gain.

    tau is the exact chi-squared(2) inverse survival value -2*ln(pfa);
    mu converts beampattern power into the noncentrality parameter.
    """

    pfa: float
    mu: float
    tau: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.pfa < 1.0):
            raise ValueError("pfa must lie in (0, 1)")
        if self.mu <= 0.0:
            raise ValueError("mu must be positive")
        object.__setattr__(self, "tau", -2.0 * math.log(self.pfa))


def detection_probability(rho: float, spec: DetectionSpec) -> float:
    """P_D for a given noncentrality rho; equals pfa at rho = 0."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    return marcum_q1(math.sqrt(rho), math.sqrt(spec.tau))


def required_noncentrality(eta: float, spec: DetectionSpec) -> float:
    """Invert detection_probability: the rho achieving P_D = eta.

    Bracketed bisection on the (strictly monotone) map; the returned value
    satisfies |P_D(rho) - eta| <= 1e-10.
    """
    if eta <= spec.pfa:
        raise ValueError("target below false-alarm floor")
    if eta >= 1.0:
        raise ValueError("target detection probability must be < 1")

    lo, hi = 0.0, 1.0
    while detection_probability(hi, spec) < eta:
        hi *= 2.0
        if hi > 1e15:
            raise RuntimeError("failed to bracket the noncentrality")
    mid = hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        pd_mid = detection_probability(mid, spec)
        if abs(pd_mid - eta) <= 1e-10:
            return mid
        if pd_mid < eta:
            lo = mid
        else:
            hi = mid
    return mid


def noncentrality(p_theta: float, mu: float, squared: bool = True) -> float:
    """Noncentrality produced by beampattern power p_theta.

    The default squares the power; squared=False selects the variant where
    the noncentrality is linear in the radiated power.
    """
    return mu * p_theta * p_theta if squared else mu * p_theta


def beampattern_floor(rho_tilde: float, mu: float, squared: bool = True) -> float:
    """Minimum beampattern power that realizes the required noncentrality."""
    if rho_tilde < 0 or mu <= 0:
        raise ValueError("rho_tilde must be >= 0 and mu > 0")
    return math.sqrt(rho_tilde / mu) if squared else rho_tilde / mu
