"""Size-biased laws and two reconstructions of the size-biased Borel law.

For a positive integer law W the size-biased version W* puts mass
``j * P(W = j) / E[W]`` at j.  For W Borel(lambda) two other routes reach
the same law:

* the mixture identity: W* equals in distribution ``(1 - I) W + I (Z + W*)``
  with I Bernoulli(lambda) and Z an independent Borel draw, realized here by
  :func:`mixture_rhs`;
* the geometric-sum form: W* equals a sum of ``eta`` independent Borel draws
  where ``P(eta = n) = (1 - lambda) lambda^(n-1)``, realized by
  :func:`geometric_sum_law`.

Cross-checking the three constructions against each other, with truncation
residuals tracked explicitly, is the main correctness instrument for this
package's law algebra.
"""

from __future__ import annotations

import math

import numpy as np
from dataclasses import dataclass
from scipy import stats
from scipy.signal import fftconvolve

from . import borel
from .borel import BorelParams
from .errors import UnresolvedTail
from .lawkit import TruncatedLaw, _trusted, convolve, mix, moments

# above this input tail, the window mean is too uncertain to size-bias:
# biasing weights outcomes by j, so unplaced tail mass has unbounded pull
UNRESOLVED_TAIL_LIMIT = 1e-6

_DIRECT_CONV_LIMIT = 1_000_000


@dataclass(frozen=True)
class SizeBiasPair:
    """A base law together with its size-biased version.

    Construction guarantees ``biased[j] = j * base[j] / mean`` on the shared
    window, with the window mean as normalizer.
    """

    base: TruncatedLaw
    biased: TruncatedLaw

    def max_proportionality_error(self) -> float:
        mean = moments(self.base).mean
        support = self.base.support().astype(float)
        expected = support * self.base.probs / mean
        return float(np.abs(self.biased.probs[: self.base.size] - expected).max())


def size_bias(w: TruncatedLaw) -> TruncatedLaw:
    """Size-biased version of ``w`` computed over its window.

    The normalizer is the window mean, so the output window sums to one and
    any true biased mass above the window is folded back in.  That folded
    mass is at least :func:`size_bias_tail_estimate`; inputs with tail mass
    above 1e-6 are rejected because the fold-back would no longer be small.
    """
    if w.tail_mass > UNRESOLVED_TAIL_LIMIT:
        raise UnresolvedTail(
            f"tail mass {w.tail_mass:g} too large to size-bias accurately"
        )
    support = w.support().astype(float)
    mean = moments(w).mean
    probs = support * w.probs / mean
    tail = max(0.0, 1.0 - math.fsum(probs.tolist()))
    return _trusted(probs, tail, w.start)


def size_bias_pair(w: TruncatedLaw) -> SizeBiasPair:
    return SizeBiasPair(base=w, biased=size_bias(w))


def size_bias_tail_estimate(w: TruncatedLaw) -> float:
    """Smallest biased mass above the window consistent with ``w``.

    Places the input's tail at the first point above the window; the true
    biased law has at least this much mass beyond the stored window, which
    quantifies how much :func:`size_bias` folded back.
    """
    if w.tail_mass == 0.0:
        return 0.0
    mean_floor = moments(w).mean + (w.end + 1) * w.tail_mass
    return (w.end + 1) * w.tail_mass / mean_floor


def mixture_rhs(
    w: TruncatedLaw, wstar: TruncatedLaw, p: BorelParams, eps: float
) -> TruncatedLaw:
    """Law of ``(1 - I) W + I (Z + W*)`` with I Bernoulli(lambda).

    ``Z`` is truncated at ``eps``; all truncation residue lands in the
    result's tail mass.
    """
    z = borel.law(p, eps)
    return mix(1.0 - p.lam, w, convolve(z, wstar))


def geometric_sum_law(p: BorelParams, eps: float) -> TruncatedLaw:
    """Size-biased Borel law rebuilt as a geometric sum of Borel draws.

    Accumulates ``(1 - lam) lam^(n-1)`` times the n-fold self-convolution of
    the Borel law, stopping once the remaining geometric weight drops below
    ``eps``.  The remaining weight, the base-law tails, and any convolution
    mass pushed past the output window all end up in ``tail_mass``, never
    spread over the window.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    lam = p.lam
    # per-term losses scale like n * base_tail with geometric weights, so a
    # base tail of eps * (1 - lam) / 2 keeps the summed loss under eps / 2
    base = borel.law(p, eps * (1.0 - lam) / 2.0)
    cap = _window_for_biased_tail(p, eps / 8.0, at_least=base.end)

    # arrays indexed by support value: buf[j] is the mass at j
    base0 = np.zeros(cap + 1)
    base0[1 : base.end + 1] = base.probs
    cur = base0.copy()
    acc = np.zeros(cap + 1)
    n = 1
    while True:
        acc += (1.0 - lam) * lam ** (n - 1) * cur
        if lam**n < eps:
            break
        if cur.size * base.size <= _DIRECT_CONV_LIMIT:
            nxt = np.convolve(cur, base0[: base.end + 1])
        else:
            nxt = fftconvolve(cur, base0[: base.end + 1])
            np.maximum(nxt, 0.0, out=nxt)
        cur = nxt[: cap + 1]
        n += 1
        if not cur.any():
            break  # n-fold support already starts above the window
    probs = acc[1:]
    tail = 1.0 - math.fsum(probs.tolist())
    return _trusted(probs, tail, 1)


def _window_for_biased_tail(p: BorelParams, target: float, at_least: int) -> int:
    """Smallest W with size-biased Borel mass above W at most ``target``."""
    lam = p.lam
    size = max(2 * at_least, 1024)
    while True:
        q = borel.pmf_values(p, size)
        jq = np.arange(1.0, size + 1.0) * q
        # geometric ratio bound q(j+1)/q(j) <= exp(-decay_rate) gives a
        # closed-form cap on the mass beyond the computed range
        r = math.exp(-p.decay_rate)
        rem = q[-1] * (size * r / (1.0 - r) + r / (1.0 - r) ** 2)
        suffix = (np.cumsum(jq[::-1])[::-1] - jq) + rem  # sum over j > W
        biased_beyond = (1.0 - lam) * suffix
        hit = np.nonzero(biased_beyond <= target)[0]
        if hit.size:
            return max(int(hit[0]) + 1, at_least)
        size *= 2


def x_mean(p: BorelParams) -> float:
    """Mean gap between the size-biased and plain Borel laws.

    Equals ``lam / (1 - lam)^2``; cross-checkable as the difference of the
    truncated-law means.
    """
    return p.lam / (1.0 - p.lam) ** 2


def check_stochastic_order(p: BorelParams, M: int) -> bool:
    """Check ``xi + 1`` is stochastically below the geometric count ``eta``.

    ``xi`` is Poisson(lambda) and ``P(eta = n) = (1 - lam) lam^(n-1)``; the
    check compares CDFs pointwise for every k up to ``M``, with float slack.
    """
    k = np.arange(1, M + 1)
    shifted_poisson_cdf = stats.poisson.cdf(k - 1, p.lam)
    geometric_cdf = 1.0 - p.lam**k
    return bool(np.all(shifted_poisson_cdf >= geometric_cdf - 1e-12))
