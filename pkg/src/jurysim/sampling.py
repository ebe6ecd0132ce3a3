"""Seeded, stream-splittable randomness and competence distributions.

Streams are keyed Philox counter-based generators: a (master_seed,
stream_id) pair fully determines the sequence, independent of platform
threading or the order in which streams are consumed.  Experiment
harnesses derive one stream per iteration so that results never depend
on execution order.

Three competence distributions are supported, matching the simulation
families used throughout: uniform on [lo, hi], a normal rejection-sampled
into [lo, hi], and an exponential with density e^-x / (1 - e^-b) on
[0, b] mapped affinely onto [lo, hi].  The exponential's mass sits near
``lo`` (rare expertise); ``mirror=True`` flips it toward ``hi`` for
sensitivity checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_U64 = 2**64 - 1
# Open-interval guard: no sample may equal 0 or 1 exactly.
_LOWEST = np.nextafter(0.0, 1.0)
_HIGHEST = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class SeedSpec:
    """A reproducible random stream identity.

    Identical (master_seed, stream_id) pairs yield identical sample
    sequences across runs and platforms.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.stream_id < 0:
            raise DomainError("stream_id must be nonnegative")

    def stream(self, stream_id: int) -> "SeedSpec":
        """The sibling stream with the same master seed."""
        return SeedSpec(self.master_seed, stream_id)

    def generator(self) -> np.random.Generator:
        """A fresh counter-based generator for this stream."""
        key = [self.master_seed & _U64, self.stream_id & _U64]
        return np.random.Generator(np.random.Philox(key=key))


def _check_bounds(lo: float, hi: float):
    if not (np.isfinite(lo) and np.isfinite(hi) and 0.0 <= lo < hi <= 1.0):
        raise DomainError(f"bounds must satisfy 0 <= lo < hi <= 1: [{lo}, {hi}]")


@dataclass(frozen=True)
class Uniform:
    """Uniform competences on [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        _check_bounds(self.lo, self.hi)

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.lo + rng.random(count) * (self.hi - self.lo)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def spec_string(self) -> str:
        return f"uniform:{self.lo!r}:{self.hi!r}"


@dataclass(frozen=True)
class TruncNormal:
    """Normal(mean, sigma) rejection-sampled into [lo, hi].

    Rejection keeps the exact truncated distribution; the acceptance rate
    stays comfortably high for the sigmas used here (>= 0.05).
    """

    mean: float
    sigma: float
    lo: float
    hi: float

    def __post_init__(self):
        _check_bounds(self.lo, self.hi)
        if not (np.isfinite(self.sigma) and self.sigma > 0.0):
            raise DomainError(f"sigma must be positive: {self.sigma}")
        if not np.isfinite(self.mean):
            raise DomainError(f"mean must be finite: {self.mean}")

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        out = np.empty(count)
        filled = 0
        while filled < count:
            need = count - filled
            cand = rng.normal(self.mean, self.sigma, size=need)
            kept = cand[(cand >= self.lo) & (cand <= self.hi)]
            out[filled : filled + kept.size] = kept
            filled += kept.size
        return out

    def cdf(self, x) -> np.ndarray:
        from math import erf, sqrt

        phi = np.vectorize(
            lambda t: 0.5 * (1.0 + erf((t - self.mean) / (self.sigma * sqrt(2.0))))
        )
        a, b = phi(self.lo), phi(self.hi)
        x = np.asarray(x, dtype=np.float64)
        return np.clip((phi(x) - a) / (b - a), 0.0, 1.0)

    def spec_string(self) -> str:
        return f"truncnormal:{self.mean!r}:{self.sigma!r}:{self.lo!r}:{self.hi!r}"


@dataclass(frozen=True)
class TruncExp:
    """Exponential with density e^-x / (1 - e^-b) on [0, b], mapped to [lo, hi].

    Sampling inverts the CDF (1 - e^-x) / (1 - e^-b) and rescales x/b
    affinely onto [lo, hi], so the probability mass concentrates near
    ``lo``.  With ``mirror=True`` the axis is flipped and mass sits near
    ``hi`` instead.
    """

    b: float
    lo: float
    hi: float
    mirror: bool = False

    def __post_init__(self):
        _check_bounds(self.lo, self.hi)
        if not (np.isfinite(self.b) and self.b > 0.0):
            raise DomainError(f"b must be positive: {self.b}")

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        u = rng.random(count)
        x = -np.log1p(-u * (1.0 - np.exp(-self.b)))
        t = x / self.b
        if self.mirror:
            return self.hi - t * (self.hi - self.lo)
        return self.lo + t * (self.hi - self.lo)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        t = (x - self.lo) / (self.hi - self.lo)
        if self.mirror:
            t = 1.0 - t
        base = -np.expm1(-np.clip(t, 0.0, 1.0) * self.b) / -np.expm1(-self.b)
        return np.clip(1.0 - base, 0.0, 1.0) if self.mirror else np.clip(base, 0.0, 1.0)

    def spec_string(self) -> str:
        tail = ":mirror" if self.mirror else ""
        return f"truncexp:{self.b!r}:{self.lo!r}:{self.hi!r}{tail}"


DistributionSpec = Uniform | TruncNormal | TruncExp


def parse_distribution(text: str, mirror_exp: bool = False) -> DistributionSpec:
    """Parse "uniform:lo:hi", "truncnormal:mean:sigma:lo:hi",
    "truncexp:b:lo:hi[:mirror]" into a distribution spec."""
    parts = [p.strip() for p in text.strip().split(":")]
    name = parts[0].lower()
    try:
        if name == "uniform" and len(parts) == 3:
            return Uniform(float(parts[1]), float(parts[2]))
        if name == "truncnormal" and len(parts) == 5:
            return TruncNormal(*(float(p) for p in parts[1:]))
        if name == "truncexp" and len(parts) in (4, 5):
            mirror = mirror_exp or (len(parts) == 5 and parts[4] == "mirror")
            return TruncExp(
                float(parts[1]), float(parts[2]), float(parts[3]), mirror=mirror
            )
    except ValueError as exc:
        raise DomainError(f"bad distribution spec {text!r}: {exc}") from exc
    raise DomainError(
        f"bad distribution spec {text!r}; expected uniform:lo:hi, "
        "truncnormal:mean:sigma:lo:hi, or truncexp:b:lo:hi[:mirror]"
    )


def sample(spec: DistributionSpec, seed: SeedSpec, count: int) -> np.ndarray:
    """Draw ``count`` competences from ``spec`` on the given stream.

    Samples always lie inside [lo, hi] and never equal 0 or 1 exactly.
    """
    if count < 0:
        raise DomainError("count must be nonnegative")
    values = spec.draw(seed.generator(), count)
    return np.clip(values, _LOWEST, _HIGHEST)
