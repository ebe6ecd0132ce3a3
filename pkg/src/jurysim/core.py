"""Weighted majority rules over independent binary experts.

A rule is a real weight vector, one weight per expert.  On a vote profile
``v`` in {0,1}^m the rule compares the total weight of 1-voters against the
total weight of 0-voters and outputs ONE, ZERO, or TIE.  Everything else in
this module is built on that comparison:

* :func:`exact_accuracy` enumerates all 2^m profiles and sums
  profile-probability times credit (1 for ONE, 0 for ZERO, 1/2 for TIE).
* :func:`mc_accuracy` estimates the same quantity by seeded sampling,
  resolving ties with a fair coin.
* :func:`rule_signature` records the outcome on every profile; two weight
  vectors are the same *rule* exactly when their signatures match.

Two numerical conventions apply everywhere ties and degenerate weights can
appear:

* a weight margin within ``TIE_EPS`` of zero counts as TIE, so float noise
  near a knife-edge is classified deterministically;
* a weight vector whose entries are all below ``ZERO_WEIGHT_EPS`` in
  magnitude is replaced by equal weights (simple majority) before any rule
  is evaluated.  A judge with competence exactly 1/2 produces such a vector.

All functions are pure and operate on immutable inputs; enumeration chunks
are accumulated in profile-index order so results are bit-identical across
runs and worker counts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np

from .errors import DomainError, EnumerationCapError, LengthMismatchError

# Margins within this of zero are ties.
TIE_EPS = 1e-12
# Vectors with every |w| below this fall back to simple majority.
ZERO_WEIGHT_EPS = 1e-12
# Exact enumeration refuses beyond 2^22 profiles.
ENUMERATION_CAP = 22
# count_distinct_rules enumerates agent permutations; keep it tiny.
DISTINCT_RULES_CAP = 5

_PROFILE_CHUNK = 1 << 16
_BATCH_CELLS = 1 << 21
_MC_CHUNK = 1 << 16


class Outcome(IntEnum):
    """Result of a weighted majority vote on one profile.

    Values are chosen so complementing a profile negates the outcome:
    ONE=+1, ZERO=-1, TIE=0.
    """

    ONE = 1
    TIE = 0
    ZERO = -1


def as_competences(values, *, closed: bool = False) -> np.ndarray:
    """Validate and return a 1-D float64 competence vector.

    Entries must lie strictly inside (0,1); with ``closed=True`` the
    endpoints 0 and 1 are allowed (judge competences in sweeps).
    """
    arr = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("competences must form a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError("competences must be finite")
    if closed:
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError(f"competence outside [0,1]: {arr}")
    else:
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise DomainError(f"competence outside open (0,1): {arr}")
    return arr


def as_weights(values, *, length: int | None = None) -> np.ndarray:
    """Validate and return a 1-D float64 weight vector (finite entries)."""
    arr = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("weights must form a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"weights must be finite: {arr}")
    if length is not None and arr.size != length:
        raise LengthMismatchError(
            f"expected {length} weights, got {arr.size}"
        )
    return arr


def as_votes(values, *, length: int | None = None) -> np.ndarray:
    """Validate and return a 1-D int8 vote profile over {0,1}."""
    arr = np.atleast_1d(np.asarray(values))
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("votes must form a non-empty 1-D vector")
    if not np.all(np.isin(arr, (0, 1))):
        raise DomainError(f"votes must be 0 or 1: {arr}")
    if length is not None and arr.size != length:
        raise LengthMismatchError(f"expected {length} votes, got {arr.size}")
    return arr.astype(np.int8)


def effective_weights(weights: np.ndarray) -> np.ndarray:
    """Apply the all-zero fallback: near-zero vectors become equal weights."""
    if np.max(np.abs(weights)) < ZERO_WEIGHT_EPS:
        return np.ones_like(weights)
    return weights


@lru_cache(maxsize=32)
def _profile_mats(m: int) -> tuple[np.ndarray, np.ndarray]:
    """(V, S) for all 2^m profiles: V in {0,1}, S = 2V-1, both (2^m, m).

    Cached only for small m; large-m enumeration uses chunked generation.
    """
    idx = np.arange(1 << m, dtype=np.int64)
    V = ((idx[:, None] >> np.arange(m)[None, :]) & 1).astype(np.float64)
    V.setflags(write=False)
    S = 2.0 * V - 1.0
    S.setflags(write=False)
    return V, S


def _profile_chunk_mats(m: int, start: int, stop: int):
    idx = np.arange(start, stop, dtype=np.int64)
    V = ((idx[:, None] >> np.arange(m)[None, :]) & 1).astype(np.float64)
    return V, 2.0 * V - 1.0


def _classify(margins: np.ndarray) -> np.ndarray:
    """Map float margins to int8 outcomes (+1 / 0 / -1)."""
    return np.where(
        margins > TIE_EPS, 1, np.where(margins < -TIE_EPS, -1, 0)
    ).astype(np.int8)


def _credit(margins: np.ndarray) -> np.ndarray:
    """Credit earned per profile: 1 for ONE, 1/2 for TIE, 0 for ZERO."""
    return np.where(
        margins > TIE_EPS, 1.0, np.where(margins < -TIE_EPS, 0.0, 0.5)
    )


def evaluate_wmr(weights, votes) -> Outcome:
    """Outcome of the weighted majority rule on one vote profile.

    The signed margin is the total weight of 1-voters minus the total
    weight of 0-voters; |margin| <= TIE_EPS is a TIE.
    """
    w = effective_weights(as_weights(weights))
    v = as_votes(votes, length=w.size)
    margin = float(np.sum(w * (2.0 * v - 1.0)))
    if margin > TIE_EPS:
        return Outcome.ONE
    if margin < -TIE_EPS:
        return Outcome.ZERO
    return Outcome.TIE


@dataclass(frozen=True)
class RuleSignature:
    """Outcome of a rule on every one of the 2^m vote profiles.

    Profile index ``b`` encodes the profile whose expert ``e`` votes
    ``(b >> e) & 1``.  Signatures are the canonical identity of a rule:
    two weightings are the same rule iff their signatures are equal.
    """

    m: int
    outcomes: np.ndarray  # int8, values in {+1, 0, -1}, length 2^m

    def __post_init__(self):
        out = np.asarray(self.outcomes, dtype=np.int8)
        if out.shape != (1 << self.m,):
            raise DomainError(
                f"signature for m={self.m} needs {1 << self.m} outcomes"
            )
        out.setflags(write=False)
        object.__setattr__(self, "outcomes", out)

    def outcome_of(self, votes) -> Outcome:
        v = as_votes(votes, length=self.m)
        index = int(np.sum(v.astype(np.int64) << np.arange(self.m)))
        return Outcome(int(self.outcomes[index]))

    def is_decisive(self) -> bool:
        """True when no profile is a TIE."""
        return not bool(np.any(self.outcomes == 0))

    def __eq__(self, other):
        if not isinstance(other, RuleSignature):
            return NotImplemented
        return self.m == other.m and np.array_equal(
            self.outcomes, other.outcomes
        )

    def __hash__(self):
        return hash((self.m, self.outcomes.tobytes()))


def rule_signature(weights) -> RuleSignature:
    """Evaluate the rule on all 2^m profiles (m capped at ENUMERATION_CAP)."""
    w = as_weights(weights)
    m = w.size
    if m > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"rule_signature enumerates 2^{m} profiles; cap is "
            f"m <= {ENUMERATION_CAP}"
        )
    w = effective_weights(w)
    total = 1 << m
    out = np.empty(total, dtype=np.int8)
    for start in range(0, total, _PROFILE_CHUNK):
        stop = min(start + _PROFILE_CHUNK, total)
        _, S = _profile_chunk_mats(m, start, stop)
        out[start:stop] = _classify(np.einsum("pe,e->p", S, w))
    return RuleSignature(m=m, outcomes=out)


def rules_equivalent(w1, w2) -> bool:
    """True iff the two weight vectors induce the same rule."""
    a = as_weights(w1)
    b = as_weights(w2, length=a.size)
    return rule_signature(a) == rule_signature(b)


@dataclass(frozen=True)
class AccuracyEstimate:
    """Probability of a correct collective outcome, with sampling error.

    Exact computations carry ``std_error=0`` and ``iterations=0``.
    """

    mean: float
    std_error: float
    iterations: int

    def __post_init__(self):
        if not (-1e-12 <= self.mean <= 1.0 + 1e-12):
            raise DomainError(f"accuracy mean outside [0,1]: {self.mean}")
        if not (0.0 <= self.std_error <= 0.5):
            raise DomainError(
                f"standard error outside [0, 0.5]: {self.std_error}"
            )
        if self.iterations < 0:
            raise DomainError("iterations must be nonnegative")


def exact_accuracy(competences, weights) -> AccuracyEstimate:
    """Exact accuracy of a weighted majority rule by full enumeration.

    Sums profile-probability times credit over all 2^m profiles, where the
    profile probability is the product of p_e for 1-voters and (1-p_e) for
    0-voters, and TIE profiles earn credit 1/2 (fair coin tie-break).
    Accumulation runs in profile-index order, so the result is
    bit-deterministic.
    """
    p = as_competences(competences)
    w = as_weights(weights, length=p.size)
    m = p.size
    if m > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"exact_accuracy enumerates 2^{m} profiles (cap m <= "
            f"{ENUMERATION_CAP}); use mc_accuracy for larger panels"
        )
    w = effective_weights(w)
    logp = np.log(p)
    logq = np.log1p(-p)
    total = 1 << m
    acc = 0.0
    for start in range(0, total, _PROFILE_CHUNK):
        stop = min(start + _PROFILE_CHUNK, total)
        V, S = _profile_chunk_mats(m, start, stop)
        probs = np.exp(
            np.einsum("pe,e->p", V, logp) + np.einsum("pe,e->p", 1.0 - V, logq)
        )
        acc += float(np.sum(probs * _credit(np.einsum("pe,e->p", S, w))))
    return AccuracyEstimate(mean=min(acc, 1.0), std_error=0.0, iterations=0)


def batch_exact_accuracy(competences: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Exact accuracies for a batch of (competence, weight) row pairs.

    ``competences`` and ``weights`` are (B, m) arrays; returns shape (B,).
    The all-zero fallback applies row-wise.  Work is chunked over rows with
    a fixed chunk size, so results do not depend on worker counts.
    """
    p = np.asarray(competences, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if p.ndim != 2 or w.shape != p.shape:
        raise LengthMismatchError(
            f"competences {p.shape} and weights {w.shape} must be equal 2-D"
        )
    m = p.shape[1]
    if m > ENUMERATION_CAP:
        raise EnumerationCapError(f"batch enumeration cap is m <= {ENUMERATION_CAP}")
    V, S = (_profile_mats(m) if m <= 16 else _profile_chunk_mats(m, 0, 1 << m))
    chunk = max(1, _BATCH_CELLS >> m)
    out = np.empty(p.shape[0])
    for start in range(0, p.shape[0], chunk):
        stop = min(start + chunk, p.shape[0])
        pc = p[start:stop]
        wc = w[start:stop].copy()
        fallback = np.max(np.abs(wc), axis=1) < ZERO_WEIGHT_EPS
        wc[fallback] = 1.0
        margins = np.einsum("be,pe->bp", wc, S)
        logpr = np.einsum("be,pe->bp", np.log(pc), V)
        logpr += np.einsum("be,pe->bp", np.log1p(-pc), 1.0 - V)
        out[start:stop] = np.sum(np.exp(logpr) * _credit(margins), axis=1)
    return out


def mc_accuracy(competences, weights, iterations: int, seed: int) -> AccuracyEstimate:
    """Monte-Carlo accuracy estimate with a seeded tie-breaking coin.

    Vote profiles are drawn independently from the competences; TIE
    outcomes are resolved by a fair coin from the same stream.  Returns
    the sample mean, the binomial standard error, and the iteration
    count.  Fixed seed implies a bit-identical result.
    """
    p = as_competences(competences)
    w = effective_weights(as_weights(weights, length=p.size))
    if iterations < 1:
        raise DomainError("iterations must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), 0]))
    correct = 0
    done = 0
    while done < iterations:
        n = min(_MC_CHUNK, iterations - done)
        votes = rng.random((n, p.size)) < p
        margins = np.einsum("ne,e->n", 2.0 * votes - 1.0, w)
        coin = rng.random(n) < 0.5
        wins = (margins > TIE_EPS) | ((np.abs(margins) <= TIE_EPS) & coin)
        correct += int(np.count_nonzero(wins))
        done += n
    mean = correct / iterations
    se = float(np.sqrt(mean * (1.0 - mean) / iterations))
    return AccuracyEstimate(mean=mean, std_error=se, iterations=iterations)


def _permute_signature(out: np.ndarray, m: int, perm: tuple[int, ...]) -> bytes:
    """Signature bytes after relabelling agent e as perm[e]."""
    idx = np.arange(1 << m)
    new_idx = np.zeros(1 << m, dtype=np.int64)
    for e in range(m):
        new_idx |= ((idx >> e) & 1) << perm[e]
    relabelled = np.empty_like(out)
    relabelled[new_idx] = out
    return relabelled.tobytes()


def _canonical_signature_bytes(out: np.ndarray, m: int) -> bytes:
    """Lexicographically smallest byte form over all agent relabellings."""
    return min(
        _permute_signature(out, m, perm)
        for perm in itertools.permutations(range(m))
    )


def count_distinct_rules(
    m: int,
    sample_count: int = 20000,
    seed: int = 0,
    nonnegative_only: bool = True,
    up_to_permutation: bool = True,
) -> int:
    """Count distinct decisive weighted majority rules found by sampling.

    Samples weight vectors from the interior of the unit simplex, from
    every proper face (supports with some zero weights), and from the
    corners, collects the rule signatures, and counts the distinct
    decisive ones (signatures containing a TIE profile are not counted as
    rules; knife-edge vectors such as (1,1,0) are tie-breaking artefacts,
    not additional rules).  With ``nonnegative_only=False`` every sampled
    vector is also used with independent random sign flips.  With
    ``up_to_permutation=True`` signatures are identified up to agent
    relabelling.

    The result is a lower bound that saturates quickly for small m; with
    the defaults it finds the full count for m <= 5.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    if m > DISTINCT_RULES_CAP:
        raise EnumerationCapError(
            f"count_distinct_rules is limited to m <= {DISTINCT_RULES_CAP}"
        )
    if sample_count < 1:
        raise DomainError("sample_count must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), 0]))
    blocks = [rng.dirichlet(np.ones(m), size=sample_count)]
    per_face = max(8, sample_count // (1 << m))
    for r in range(1, m + 1):
        for support in itertools.combinations(range(m), r):
            face = np.zeros((per_face if r > 1 else 1, m))
            if r == 1:
                face[:, support] = 1.0
            else:
                face[:, support] = rng.dirichlet(np.ones(r), size=face.shape[0])
            blocks.append(face)
    W = np.vstack(blocks)
    if not nonnegative_only:
        signs = rng.choice([-1.0, 1.0], size=W.shape)
        W = np.vstack([W, W * signs])

    _, S = _profile_mats(m)
    margins = np.einsum("be,pe->bp", W, S)
    # simplex samples never trip the all-zero fallback; corners/faces are
    # normalized to sum 1 so the fallback cannot trigger either
    sigs = _classify(margins)
    decisive = ~np.any(sigs == 0, axis=1)
    unique = {row.tobytes(): row for row in sigs[decisive]}
    if not up_to_permutation:
        return len(unique)
    return len({_canonical_signature_bytes(row, m) for row in unique.values()})
