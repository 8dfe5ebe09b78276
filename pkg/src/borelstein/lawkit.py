"""Exact finite-window algebra for integer-valued probability laws.

A law on {1, 2, ...} is stored as a contiguous window of probabilities plus
an explicit tail mass for everything above the window.  All operations keep
``sum(probs) + tail_mass = 1`` to within 1e-12, pushing any mass they cannot
place (convolution cross-tails, truncation residuals) into ``tail_mass``.
Keeping the residual explicit is what makes the total-variation comparisons
below two-sided: the interval returned by :func:`tv_distance` brackets the
exact distance of every pair of full laws consistent with the stored windows.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import EmptySample, NegativeMass, NotNormalized, WeightOutOfRange

CONSERVATION_TOL = 1e-12
INPUT_TOL = 1e-9

# below this product of window lengths, direct convolution beats the FFT
_DIRECT_CONV_LIMIT = 1_000_000


@dataclass(frozen=True)
class TruncatedLaw:
    """A probability law on the positive integers with a finite window.

    ``probs[i]`` is the mass at ``start + i``; ``tail_mass`` is the mass
    attributed to ``{end + 1, end + 2, ...}``.  Instances are immutable and
    safe to share across threads.
    """

    start: int
    probs: np.ndarray
    tail_mass: float

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if self.start < 1:
            raise ValueError(f"support must start at 1 or above, got {self.start}")
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a nonempty 1-D vector")
        if not np.all(np.isfinite(probs)):
            raise ValueError("probs must be finite")
        if probs.min(initial=0.0) < 0.0:
            raise NegativeMass(f"negative window mass {probs.min():g}")
        if self.tail_mass < 0.0:
            raise NegativeMass(f"negative tail mass {self.tail_mass:g}")
        total = math.fsum(probs.tolist()) + self.tail_mass
        if abs(total - 1.0) > CONSERVATION_TOL:
            raise NotNormalized(f"window + tail is {total!r}, not 1")

    @property
    def end(self) -> int:
        """Largest support point inside the window."""
        return self.start + self.probs.size - 1

    @property
    def size(self) -> int:
        return self.probs.size

    def support(self) -> np.ndarray:
        return np.arange(self.start, self.end + 1)

    def window_sum(self) -> float:
        return float(math.fsum(self.probs.tolist()))

    def at(self, j: int) -> float:
        """Mass at the integer ``j`` (zero below the window start)."""
        if j < self.start:
            return 0.0
        if j > self.end:
            raise ValueError(f"{j} is above the window; only tail mass is known there")
        return float(self.probs[j - self.start])


@dataclass(frozen=True)
class TVInterval:
    """Two-sided bracket for a total-variation distance."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(f"invalid TV interval [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower


Moments = namedtuple("Moments", ["mean", "second_moment", "tail_unresolved"])


def _trusted(probs: np.ndarray, tail_mass: float, start: int) -> TruncatedLaw:
    """Build a law from internally computed arrays, absorbing float dust."""
    probs = np.asarray(probs, dtype=float)
    lo = probs.min(initial=0.0)
    if lo < -CONSERVATION_TOL:
        raise NegativeMass(f"internal law has negative mass {lo:g}")
    if lo < 0.0:
        probs = np.maximum(probs, 0.0)
    if -CONSERVATION_TOL < tail_mass < 0.0:
        tail_mass = 0.0
    return TruncatedLaw(start=start, probs=probs, tail_mass=tail_mass)


def make_law(probs, tail_mass: float = 0.0, start: int = 1) -> TruncatedLaw:
    """Validate user-supplied masses and renormalize the total to exactly 1.

    Raises ``NegativeMass`` for any negative entry and ``NotNormalized`` when
    the total deviates from 1 by more than 1e-9.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError("probs must be a nonempty 1-D vector")
    if probs.min(initial=0.0) < 0.0 or tail_mass < 0.0:
        raise NegativeMass("mass entries must be nonnegative")
    total = math.fsum(probs.tolist()) + tail_mass
    if abs(total - 1.0) > INPUT_TOL:
        raise NotNormalized(f"masses sum to {total!r}; expected 1 within {INPUT_TOL:g}")
    return TruncatedLaw(start=start, probs=probs / total, tail_mass=tail_mass / total)


def point_mass(j: int) -> TruncatedLaw:
    """The degenerate law at the positive integer ``j``."""
    if j < 1:
        raise ValueError("support point must be >= 1")
    return TruncatedLaw(start=j, probs=np.array([1.0]), tail_mass=0.0)


def convolve(a: TruncatedLaw, b: TruncatedLaw) -> TruncatedLaw:
    """Law of the sum of independent draws from ``a`` and ``b``.

    The result window spans every sum of window points; all cross terms
    involving either tail land in the result's ``tail_mass``.
    """
    if a.size * b.size <= _DIRECT_CONV_LIMIT:
        probs = np.convolve(a.probs, b.probs)
    else:
        probs = fftconvolve(a.probs, b.probs)
        np.maximum(probs, 0.0, out=probs)
    tail = 1.0 - math.fsum(probs.tolist())
    return _trusted(probs, tail, a.start + b.start)


def mix(w: float, a: TruncatedLaw, b: TruncatedLaw) -> TruncatedLaw:
    """Mixture ``w * a + (1 - w) * b`` on the union of the two windows."""
    if not 0.0 <= w <= 1.0:
        raise WeightOutOfRange(f"mixture weight {w} outside [0, 1]")
    start = min(a.start, b.start)
    end = max(a.end, b.end)
    probs = np.zeros(end - start + 1)
    probs[a.start - start : a.end - start + 1] += w * a.probs
    probs[b.start - start : b.end - start + 1] += (1.0 - w) * b.probs
    tail = w * a.tail_mass + (1.0 - w) * b.tail_mass
    return _trusted(probs, tail, start)


def _beyond(law: TruncatedLaw, cutoff: int) -> float:
    """Mass the law holds strictly above ``cutoff`` (window part plus tail)."""
    if cutoff >= law.end:
        return law.tail_mass
    first = max(cutoff + 1 - law.start, 0)
    return float(math.fsum(law.probs[first:].tolist())) + law.tail_mass


def tv_distance(a: TruncatedLaw, b: TruncatedLaw) -> TVInterval:
    """Exact bracket for the total-variation distance between two laws.

    On the common window the pointwise difference is known.  Above it, each
    law holds a known excess-window mass plus an unplaced tail; over all full
    laws consistent with the stored data the distance ranges between placing
    the unknown mass for maximal overlap and placing it fully apart.  Both
    endpoints are attained, so the interval is sharp; with two zero tails it
    collapses to the exact distance.
    """
    lo = min(a.start, b.start)
    common_end = min(a.end, b.end)
    if common_end >= lo:
        width = common_end - lo + 1
        dense_a = np.zeros(width)
        dense_b = np.zeros(width)
        if common_end >= a.start:
            dense_a[a.start - lo :] = a.probs[: common_end - a.start + 1]
        if common_end >= b.start:
            dense_b[b.start - lo :] = b.probs[: common_end - b.start + 1]
        common_l1 = float(math.fsum(np.abs(dense_a - dense_b).tolist()))
    else:
        common_l1 = 0.0
    beyond_a = _beyond(a, common_end)
    beyond_b = _beyond(b, common_end)
    lower = 0.5 * (common_l1 + abs(beyond_a - beyond_b))
    upper = lower + min(beyond_a, beyond_b)
    lower = min(max(lower, 0.0), 1.0)
    upper = min(max(upper, lower), 1.0)
    return TVInterval(lower=lower, upper=upper)


def empirical_law(samples, M: int, n_total: int | None = None) -> TruncatedLaw:
    """Empirical law of positive-integer samples on the window {1, ..., M}.

    ``n_total`` lets callers account for draws excluded from ``samples``
    (for example censored simulation paths); the excluded fraction then sits
    in the tail mass, keeping TV lower bounds against this law valid.
    """
    samples = np.asarray(samples)
    if samples.size == 0 and not n_total:
        raise EmptySample("no samples")
    if M < 1:
        raise ValueError("window must be >= 1")
    if samples.size and samples.min() < 1:
        raise ValueError("samples must be positive integers")
    n = samples.size if n_total is None else int(n_total)
    if n < samples.size:
        raise ValueError("n_total smaller than the sample count")
    inside = samples[samples <= M].astype(np.int64)
    counts = np.bincount(inside, minlength=M + 1)[1:]
    probs = counts / n
    tail = float(n - counts.sum()) / n
    return _trusted(probs, tail, 1)


def moments(a: TruncatedLaw) -> Moments:
    """Window-only mean and second moment (lower bounds when a tail remains).

    Support lies in {1, 2, ...}, so any tail mass can only push both moments
    up; ``tail_unresolved`` flags that the returned values are strict lower
    bounds rather than exact.
    """
    support = a.support().astype(float)
    mean = float(math.fsum((support * a.probs).tolist()))
    second = float(math.fsum((support * support * a.probs).tolist()))
    return Moments(mean=mean, second_moment=second, tail_unresolved=a.tail_mass > 0.0)
