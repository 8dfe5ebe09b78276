"""The Borel(lambda) distribution: pmf, truncated law, moments, sampler.

The law of the total progeny of a branching process whose offspring counts
are Poisson with mean ``lambda < 1``.  Mass function at j >= 1:

    p(j) = exp(-lambda * j) * (lambda * j)**(j - 1) / j!

Everything is computed in log space; the direct formula is used only for
small j, where its terms are small enough that double precision keeps the
relative error near 1e-15.  For larger j the factorial is expanded with a
Stirling series so the O(j log j) terms cancel analytically instead of
numerically, keeping the relative error of the pmf below 1e-12 out to at
least j = 1e6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InvalidIndex, WindowOverflow
from .lawkit import TruncatedLaw, _trusted

DEFAULT_WINDOW_CAP = 10_000_000

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
# largest j computed with the naive formula; above it the Stirling path is
# both cheaper and more accurate
_DIRECT_J_MAX = 32


@dataclass(frozen=True)
class BorelParams:
    """Offspring mean ``lam`` in (0, 1), strictly subcritical."""

    lam: float

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lambda must lie strictly in (0, 1), got {self.lam}")

    @property
    def mean(self) -> float:
        return 1.0 / (1.0 - self.lam)

    @property
    def variance(self) -> float:
        return self.lam / (1.0 - self.lam) ** 3

    @property
    def decay_rate(self) -> float:
        """Exponential decay rate of the pmf: lambda - 1 - log(lambda) > 0."""
        return self.lam - 1.0 - math.log(self.lam)


class Censored:
    """Sentinel for a draw that exceeded the simulation cap."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "CENSORED"


CENSORED = Censored()


def mean(p: BorelParams) -> float:
    """Expected total progeny, 1 / (1 - lambda)."""
    return p.mean


def variance(p: BorelParams) -> float:
    """Variance of the total progeny, lambda / (1 - lambda)^3."""
    return p.variance


def _log_pmf_array(lam: float, j: np.ndarray) -> np.ndarray:
    """log p(j) for a vector of indices j >= 1."""
    j = np.asarray(j, dtype=float)
    out = np.empty_like(j)
    small = j <= _DIRECT_J_MAX
    if small.any():
        js = j[small]
        out[small] = -lam * js + (js - 1.0) * np.log(lam * js) - gammaln(js + 1.0)
    if (~small).any():
        jl = j[~small]
        # p(j) = exp(-g0*j) / (lam * sqrt(2*pi) * j^{3/2}) * exp(-S(j)) with
        # g0 = lam - 1 - log(lam) and S the Stirling correction series
        g0 = lam - 1.0 - math.log(lam)
        stirling = 1.0 / (12.0 * jl) - 1.0 / (360.0 * jl**3) + 1.0 / (1260.0 * jl**5)
        out[~small] = (
            -g0 * jl - math.log(lam) - 1.5 * np.log(jl) - _HALF_LOG_TWO_PI - stirling
        )
    return out


def log_pmf(p: BorelParams, j: int) -> float:
    """Log of the mass at the positive integer ``j``."""
    if j < 1 or int(j) != j:
        raise InvalidIndex(f"support is {{1, 2, ...}}, got {j}")
    return float(_log_pmf_array(p.lam, np.array([float(j)]))[0])


def pmf(p: BorelParams, j: int) -> float:
    return math.exp(log_pmf(p, j))


def pmf_values(p: BorelParams, M: int) -> np.ndarray:
    """Vector of p(1), ..., p(M)."""
    if M < 1:
        raise InvalidIndex(f"window must be >= 1, got {M}")
    return np.exp(_log_pmf_array(p.lam, np.arange(1.0, M + 1.0)))


def law(p: BorelParams, eps: float, cap: int = DEFAULT_WINDOW_CAP) -> TruncatedLaw:
    """Smallest truncated law whose window holds at least ``1 - eps`` mass.

    The tail mass is the exact complement of the window sum.  Raises
    ``WindowOverflow`` when more than ``cap`` window points would be needed,
    which signals that ``lam`` is too close to 1 for the requested ``eps``.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    target = 1.0 - eps
    size = 512
    while True:
        if size > cap:
            size = cap
        q = np.exp(_log_pmf_array(p.lam, np.arange(1.0, size + 1.0)))
        cum = np.cumsum(q)
        hit = np.searchsorted(cum, target)
        if hit < q.size:
            M = int(hit) + 1
            probs = q[:M]
            tail = 1.0 - math.fsum(probs.tolist())
            return _trusted(probs, tail, 1)
        if size == cap:
            raise WindowOverflow(
                f"window cap {cap} too small for lambda={p.lam}, eps={eps}"
            )
        size *= 2


def poisson_draw(rng: np.random.Generator, mu: float) -> int:
    """Poisson draw by CDF inversion; consumes exactly one uniform."""
    u = rng.random()
    k = 0
    prob = math.exp(-mu)
    cum = prob
    # cum approaches 1 - O(1e-16); the guard stops pathological float stalls
    limit = int(mu + 40.0 * math.sqrt(mu + 1.0) + 60.0)
    while u > cum and k < limit:
        k += 1
        prob *= mu / k
        cum += prob
    return k


def poisson_draw_vec(rng: np.random.Generator, mu: np.ndarray) -> np.ndarray:
    """Vectorized Poisson inversion, one uniform per entry."""
    mu = np.asarray(mu, dtype=float)
    u = rng.random(mu.shape)
    prob = np.exp(-mu)
    cum = prob.copy()
    k = np.zeros(mu.shape, dtype=np.int64)
    active = u > cum
    limit = int(mu.max(initial=0.0) + 40.0 * math.sqrt(mu.max(initial=0.0) + 1.0) + 60.0)
    rounds = 0
    while active.any() and rounds < limit:
        rounds += 1
        k[active] += 1
        prob[active] *= mu[active] / rounds
        # restart accumulation per-entry: prob holds mu^k e^-mu / k! only for
        # entries still active, which all share the same k = rounds
        cum[active] += prob[active]
        active &= u > cum
    return k


def sample(
    p: BorelParams, rng: np.random.Generator, cap: int = DEFAULT_WINDOW_CAP
) -> int | Censored:
    """One total-progeny draw via the branching recursion.

    Walks the population frontier: one initial individual, each service of a
    pending individual adds a fresh Poisson(lambda) batch.  Returns the total
    count, or ``CENSORED`` once the total would exceed ``cap``.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    total = 1
    pending = poisson_draw(rng, p.lam)
    while pending > 0:
        if total + 1 > cap:
            return CENSORED
        pending += poisson_draw(rng, p.lam) - 1
        total += 1
    return total


def sample_many(
    p: BorelParams,
    n: int,
    rng: np.random.Generator,
    cap: int = DEFAULT_WINDOW_CAP,
) -> tuple[np.ndarray, np.ndarray]:
    """``n`` independent total-progeny draws, vectorized over the frontier.

    Returns ``(totals, censored)``; censored entries hold the cap value and
    are flagged rather than dropped.
    """
    mus = np.full(n, p.lam)
    return branching_totals(rng, mus, lambda k: np.full(k, p.lam), cap)


def branching_totals(
    rng: np.random.Generator,
    first_mu: np.ndarray,
    next_mu,
    cap: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized frontier walk shared by the Borel and busy-period samplers.

    ``first_mu`` gives each path's initial Poisson mean; ``next_mu(k)`` must
    return ``k`` fresh means, one per still-active path, consuming the
    generator in a fixed order so runs are reproducible.
    """
    n = first_mu.size
    total = np.ones(n, dtype=np.int64)
    censored = np.zeros(n, dtype=bool)
    pending = poisson_draw_vec(rng, first_mu)
    active = pending > 0
    while active.any():
        idx = np.flatnonzero(active)
        over = total[idx] + 1 > cap
        if over.any():
            hit = idx[over]
            censored[hit] = True
            active[hit] = False
            idx = idx[~over]
            if idx.size == 0:
                break
        draws = poisson_draw_vec(rng, next_mu(idx.size))
        pending[idx] += draws - 1
        total[idx] += 1
        active[idx] = pending[idx] > 0
    return total, censored
