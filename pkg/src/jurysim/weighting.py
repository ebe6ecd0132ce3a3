"""Log-odds weighting, perceived competences, and judge panels.

An expert with true competence p deserves weight ln(p/(1-p)); that
weighting makes the weighted majority rule optimal.  A judge with
competence p_j does not know p but perceives the expert at

    p_je = 1/2 + 2 (p_j - 1/2)(p_e - 1/2)

(the probability the expert agrees with the judge) and applies the
log-odds weighting to that estimate.  A panel of judges averages the
per-judge weights, which is equivalent to taking the log of the
geometric mean of their estimated odds.

This module also hosts the analysis helpers around those maps: the
multiplicative-bias error law, and the search for the smallest judge
competence whose perceived weighting reproduces the optimal rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import as_competences, rule_signature
from .errors import DomainError


class WeightingMode(Enum):
    """Whether negative final weights are kept or clamped to zero."""

    SIGNED = "signed"
    CLAMPED_NONNEGATIVE = "nonnegative"


def _apply_mode(weights: np.ndarray, mode: WeightingMode) -> np.ndarray:
    if mode is WeightingMode.CLAMPED_NONNEGATIVE:
        return np.maximum(weights, 0.0)
    return weights


def log_odds(p):
    """ln(p / (1-p)) for p in the open unit interval.

    Accepts a scalar or an array; strictly increasing in p and
    antisymmetric about 1/2.
    """
    arr = np.asarray(p, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"log_odds requires values in (0,1): {p}")
    out = np.log(arr) - np.log1p(-arr)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def optimal_weights(competences) -> np.ndarray:
    """Element-wise log-odds of the true competences."""
    return log_odds(as_competences(competences))


def perceived_competence(p_j: float, p_e):
    """Judge j's perceived competence of experts with competence p_e.

    p_j may take the closed endpoints 0 and 1; p_e must stay interior.
    The form 1/2 + 2(p_j-1/2)(p_e-1/2) keeps the anchor cases exact in
    floating point: p_j=1/2 gives exactly 1/2, and p_j=1 (or 0) is
    special-cased to return p_e (or 1-p_e) bit-exactly.  The result is
    always interior to (0,1).
    """
    if not (isinstance(p_j, (int, float)) and np.isfinite(p_j) and 0.0 <= p_j <= 1.0):
        raise DomainError(f"judge competence must lie in [0,1]: {p_j}")
    pe = as_competences(p_e)
    scalar = np.isscalar(p_e) or np.asarray(p_e).ndim == 0
    if p_j == 1.0:
        out = pe.copy()
    elif p_j == 0.0:
        out = 1.0 - pe
    else:
        out = 0.5 + 2.0 * (p_j - 0.5) * (pe - 0.5)
    return float(out[0]) if scalar else out


def judge_weights(p_j: float, experts, mode: WeightingMode = WeightingMode.SIGNED) -> np.ndarray:
    """Weights a single judge of competence p_j assigns to the experts."""
    perceived = perceived_competence(p_j, as_competences(experts))
    return _apply_mode(log_odds(np.atleast_1d(perceived)), mode)


def as_estimate_matrix(estimates) -> np.ndarray:
    """Validate an (n judges x m experts) matrix of interior estimates."""
    arr = np.asarray(estimates, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DomainError("estimates must form a non-empty 2-D matrix")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("estimates must lie strictly inside (0,1)")
    return arr


def panel_weights(estimates, mode: WeightingMode = WeightingMode.SIGNED) -> np.ndarray:
    """Per-expert mean of per-judge log-odds weights, then mode clamping.

    For a single judge this reduces to that judge's weights.
    """
    mat = as_estimate_matrix(estimates)
    return _apply_mode(np.mean(log_odds(mat), axis=0), mode)


def panel_weights_from_competences(
    judges, experts, mode: WeightingMode = WeightingMode.SIGNED
) -> np.ndarray:
    """Panel weights when judge estimates follow the perceived-competence map."""
    pj = as_competences(judges, closed=True)
    pe = as_competences(experts)
    rows = [np.atleast_1d(perceived_competence(float(j), pe)) for j in pj]
    return _apply_mode(np.mean(log_odds(np.vstack(rows)), axis=0), mode)


def geometric_mean_odds(estimates_for_expert) -> float:
    """Geometric mean of the odds p/(1-p) over one expert's estimates."""
    arr = as_competences(estimates_for_expert)
    return float(np.exp(np.mean(log_odds(arr))))


def weight_error_under_bias(true_p: float, alpha: float) -> float:
    """Averaged-weight error when estimate odds are off by a factor alpha.

    Constructs a single-judge estimate whose odds equal alpha times the
    true odds and returns (panel weight - optimal weight).  The contract
    is that this equals ln(alpha) up to 1e-12 for any valid inputs.
    """
    p = as_competences(true_p)
    if p.size != 1:
        raise DomainError("true_p must be a single probability")
    if not (np.isfinite(alpha) and alpha > 0.0):
        raise DomainError(f"alpha must be a positive real: {alpha}")
    tp = float(p[0])
    # p_est chosen so p_est/(1-p_est) = alpha * tp/(1-tp), in a form that
    # avoids cancellation: alpha*tp / (alpha*tp + (1-tp))
    num = alpha * tp
    p_est = num / (num + (1.0 - tp))
    if not (0.0 < p_est < 1.0):
        raise DomainError(
            f"alpha={alpha} pushes the estimate outside (0,1) for p={tp}"
        )
    panel = panel_weights(np.array([[p_est]]))
    return float(panel[0]) - log_odds(tp)


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of the optimality-threshold search.

    ``threshold`` is the smallest judge competence whose perceived
    weighting induces the optimal rule signature (None when no p_j <= 1
    achieves it).  ``monotone`` records whether signature equality held at
    every probed grid point above the threshold; when it did not, the
    threshold is the raw grid point and callers should treat the value
    with care.
    """

    threshold: float | None
    monotone: bool = True


def find_optimality_threshold(experts, grid_step: float = 1e-3) -> ThresholdResult:
    """Smallest p_j whose single-judge weighting equals the optimal rule.

    Scans p_j over [0,1] on a grid, then refines the boundary by
    bisection to 1e-4.  Signature equality is checked exactly (same
    winning coalitions), not via weight closeness.
    """
    pe = as_competences(experts)
    if not (0.0 < grid_step <= 0.5):
        raise DomainError(f"grid_step must lie in (0, 0.5]: {grid_step}")
    target = rule_signature(optimal_weights(pe))

    def matches(p_j: float) -> bool:
        return rule_signature(judge_weights(p_j, pe)) == target

    steps = int(round(1.0 / grid_step))
    grid = np.linspace(0.0, 1.0, steps + 1)
    hit = None
    for i, p_j in enumerate(grid):
        if matches(float(p_j)):
            hit = i
            break
    if hit is None:
        return ThresholdResult(threshold=None)

    monotone = all(matches(float(p)) for p in grid[hit + 1 :])
    if not monotone:
        return ThresholdResult(threshold=float(grid[hit]), monotone=False)
    if hit == 0:
        return ThresholdResult(threshold=0.0)

    lo, hi = float(grid[hit - 1]), float(grid[hit])
    while hi - lo > 1e-4:
        mid = 0.5 * (lo + hi)
        if matches(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdResult(threshold=hi)
