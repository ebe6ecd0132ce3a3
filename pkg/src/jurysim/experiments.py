"""Experiment harnesses: judge sweeps and judge/expert partitions.

Three families are provided:

* :func:`fixed_expert_sweep` -- exact accuracy of a single judge's
  perceived weighting over a grid of judge competences, for a fixed
  expert panel.  No sampling is involved.
* :func:`distribution_sweep` -- the same sweep but with expert
  competences drawn i.i.d. per iteration from a distribution; accuracy
  is still computed exactly per draw and averaged across draws.
* :func:`partition_experiment` -- split N agents into k non-voting
  judges and N-k experts, weight the experts by the judge panel, and
  measure the exact accuracy; k=0 is the simple majority over all N.

Each iteration owns the random stream (master_seed, iteration_index), so
results are independent of chunking, worker count, and execution order.
Within an iteration of the partition experiment one competence vector and
one agent permutation are drawn; every judge count k reuses them (judges
are the first k agents of the permutation), which is the paired design.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import core
from .core import batch_exact_accuracy, exact_accuracy, _credit
from .errors import ConfigError, DomainError
from .sampling import DistributionSpec, SeedSpec
from .weighting import WeightingMode, judge_weights, log_odds

_ITER_CHUNK = 4096


def default_judge_grid(step: float = 0.01) -> tuple[float, ...]:
    """Judge competences 0.0 to 1.0 inclusive with the given step."""
    n = int(round(1.0 / step))
    return tuple(float(x) for x in np.linspace(0.0, 1.0, n + 1))


def default_judge_counts(total_agents: int) -> tuple[int, ...]:
    """Judge counts 0 .. floor(N/2)+1, never exceeding N-1."""
    top = min(total_agents // 2 + 1, total_agents - 1)
    return tuple(range(top + 1))


@dataclass(frozen=True)
class ResultTable:
    """Aggregated experiment output: one row per x value.

    ``x`` is unique and sorted; ``stderr`` is zero for exact (non-sampled)
    results; ``metadata`` echoes the generating configuration.
    """

    x_label: str
    x: tuple[float, ...]
    mean: tuple[float, ...]
    stderr: tuple[float, ...]
    iterations: tuple[int, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.x)
        if not (len(self.mean) == len(self.stderr) == len(self.iterations) == n):
            raise DomainError("result table columns must have equal length")
        xs = np.asarray(self.x, dtype=np.float64)
        if np.any(np.diff(xs) <= 0):
            raise DomainError("x values must be strictly increasing")
        means = np.asarray(self.mean)
        if np.any(means < -1e-12) or np.any(means > 1.0 + 1e-12):
            raise DomainError("accuracy means must lie in [0,1]")

    def column(self, x_value: float) -> tuple[float, float, int]:
        """(mean, stderr, iterations) at an exact x value."""
        for xv, mv, sv, iv in zip(self.x, self.mean, self.stderr, self.iterations):
            if xv == x_value:
                return mv, sv, iv
        raise KeyError(f"x value {x_value} not present in table")


def _validate_grid(judge_grid: Sequence[float]) -> tuple[float, ...]:
    grid = tuple(float(g) for g in judge_grid)
    if len(grid) == 0:
        raise ConfigError("judge grid must be non-empty")
    arr = np.asarray(grid)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ConfigError("judge grid values must lie in [0,1]")
    if np.any(np.diff(arr) <= 0):
        raise ConfigError("judge grid must be strictly increasing")
    return grid


@dataclass(frozen=True)
class SweepConfig:
    """Configuration for a judge-competence sweep.

    Exactly one of ``experts`` (fixed panel) or ``expert_count`` plus
    ``distribution`` must be given.  ``iterations`` applies to the
    distribution case only.
    """

    judge_grid: tuple[float, ...]
    experts: tuple[float, ...] | None = None
    expert_count: int | None = None
    distribution: DistributionSpec | None = None
    iterations: int = 100_000
    seed: SeedSpec = SeedSpec(0)
    mode: WeightingMode = WeightingMode.SIGNED

    def __post_init__(self):
        object.__setattr__(self, "judge_grid", _validate_grid(self.judge_grid))
        fixed = self.experts is not None
        drawn = self.expert_count is not None or self.distribution is not None
        if fixed == drawn:
            raise ConfigError(
                "give either a fixed expert panel or (expert_count, distribution)"
            )
        if drawn:
            if self.expert_count is None or self.distribution is None:
                raise ConfigError("drawn experts need both expert_count and distribution")
            if self.expert_count < 1:
                raise ConfigError("expert_count must be >= 1")
            if self.iterations < 1:
                raise ConfigError("iterations must be >= 1 when experts are drawn")


@dataclass(frozen=True)
class PartitionConfig:
    """Configuration for the judges-vs-experts partition experiment."""

    total_agents: int
    judge_counts: tuple[int, ...]
    distribution: DistributionSpec
    iterations: int = 100_000
    seed: SeedSpec = SeedSpec(0)
    mode: WeightingMode = WeightingMode.SIGNED
    paired: bool = True

    def __post_init__(self):
        if self.total_agents < 1:
            raise ConfigError("total_agents must be >= 1")
        ks = tuple(int(k) for k in self.judge_counts)
        if len(ks) == 0:
            raise ConfigError("judge_counts must be non-empty")
        if len(set(ks)) != len(ks):
            raise ConfigError("judge_counts must be distinct")
        for k in ks:
            if not (0 <= k <= self.total_agents - 1):
                raise ConfigError(
                    f"judge count {k} invalid for {self.total_agents} agents: "
                    "at least one expert required"
                )
        object.__setattr__(self, "judge_counts", ks)
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")


def _map_ordered(fn, items: Iterable, threads: int | None) -> list:
    """Apply fn to items, possibly in a thread pool, preserving order.

    The reduction order is fixed by item index, so results are identical
    for every worker count.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def fixed_expert_sweep(
    experts,
    judge_grid: Sequence[float],
    mode: WeightingMode = WeightingMode.SIGNED,
) -> ResultTable:
    """Exact accuracy of a single judge's weighting for each grid p_j.

    A judge at exactly 1/2 assigns all-zero weights, which fall back to
    simple majority.  No sampling: stderr is 0 and iterations is 0.
    """
    pe = core.as_competences(experts)
    if pe.size > core.ENUMERATION_CAP:
        raise core.EnumerationCapError(
            f"fixed_expert_sweep needs exact enumeration (m <= {core.ENUMERATION_CAP})"
        )
    grid = _validate_grid(judge_grid)
    means = [
        exact_accuracy(pe, judge_weights(p_j, pe, mode)).mean for p_j in grid
    ]
    return ResultTable(
        x_label="p_j",
        x=grid,
        mean=tuple(means),
        stderr=(0.0,) * len(grid),
        iterations=(0,) * len(grid),
        metadata={"experts": tuple(float(p) for p in pe), "mode": mode.value},
    )


def _draw_competence_rows(
    distribution: DistributionSpec, seed: SeedSpec, start: int, stop: int, count: int
) -> np.ndarray:
    """Competence rows for iterations [start, stop); row i uses stream i."""
    out = np.empty((stop - start, count))
    for i in range(stop - start):
        rng = seed.stream(start + i).generator()
        out[i] = distribution.draw(rng, count)
    return np.clip(out, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


def _judge_weight_matrix(comps: np.ndarray, p_j: float, mode: WeightingMode) -> np.ndarray:
    """Row-wise judge weights; mirrors perceived_competence's p_j=1 anchor."""
    if p_j == 1.0:
        weights = log_odds(comps)
    else:
        weights = log_odds(0.5 + 2.0 * (p_j - 0.5) * (comps - 0.5))
    if mode is WeightingMode.CLAMPED_NONNEGATIVE:
        weights = np.maximum(weights, 0.0)
    fallback = np.max(np.abs(weights), axis=1) < core.ZERO_WEIGHT_EPS
    weights[fallback] = 1.0
    return weights


def _sweep_chunk(config: SweepConfig, start: int, stop: int) -> list[np.ndarray]:
    """Per-iteration accuracies for every grid point, one chunk of draws."""
    m = config.expert_count
    comps = _draw_competence_rows(
        config.distribution, config.seed, start, stop, m
    )
    V, S = core._profile_mats(m)
    logpr = np.einsum("be,pe->bp", np.log(comps), V)
    logpr += np.einsum("be,pe->bp", np.log1p(-comps), 1.0 - V)
    probs = np.exp(logpr)
    out = []
    for p_j in config.judge_grid:
        weights = _judge_weight_matrix(comps, p_j, config.mode)
        margins = np.einsum("be,pe->bp", weights, S)
        out.append(np.sum(probs * _credit(margins), axis=1))
    return out


def distribution_sweep(config: SweepConfig, threads: int | None = None) -> ResultTable:
    """Average exact accuracy over expert draws, per judge grid point.

    The same per-iteration expert draws are reused across the whole grid,
    so differences along the grid are paired comparisons.  At p_j = 1.0
    the judge weighting equals the optimal weighting bit-exactly.
    """
    if config.experts is not None:
        return fixed_expert_sweep(config.experts, config.judge_grid, config.mode)
    m = config.expert_count
    if m > core.ENUMERATION_CAP:
        raise core.EnumerationCapError(
            f"distribution_sweep computes exact accuracy per draw (m <= {core.ENUMERATION_CAP})"
        )
    chunk = max(1, min(_ITER_CHUNK, (1 << 21) >> m))
    spans = [
        (s, min(s + chunk, config.iterations))
        for s in range(0, config.iterations, chunk)
    ]
    chunks = _map_ordered(
        lambda span: _sweep_chunk(config, span[0], span[1]), spans, threads
    )
    means, stderrs = [], []
    for gi in range(len(config.judge_grid)):
        acc = np.concatenate([c[gi] for c in chunks])
        means.append(float(np.mean(acc)))
        se = float(np.std(acc, ddof=1) / np.sqrt(acc.size)) if acc.size > 1 else 0.0
        stderrs.append(min(se, 0.5))
    return ResultTable(
        x_label="p_j",
        x=config.judge_grid,
        mean=tuple(means),
        stderr=tuple(stderrs),
        iterations=(config.iterations,) * len(config.judge_grid),
        metadata={
            "distribution": config.distribution.spec_string(),
            "expert_count": m,
            "iterations": config.iterations,
            "seed": config.seed.master_seed,
            "mode": config.mode.value,
        },
    )


def _partition_chunk(
    config: PartitionConfig, start: int, stop: int
) -> dict[int, np.ndarray]:
    """Per-iteration accuracies for iterations [start, stop), keyed by k."""
    n = config.total_agents
    count = stop - start
    rows = np.arange(count)[:, None]
    lowest, highest = np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0)
    if config.paired:
        comps = np.empty((count, n))
        perms = np.empty((count, n), dtype=np.int64)
        for i in range(count):
            rng = config.seed.stream(start + i).generator()
            comps[i] = config.distribution.draw(rng, n)
            perms[i] = rng.permutation(n)
        shuffled = np.clip(comps, lowest, highest)[rows, perms]
        panels = {k: shuffled for k in config.judge_counts}
    else:
        # unpaired: per iteration, one fresh (draw, permutation) pair per k,
        # consumed from the iteration's stream in judge_counts order
        comps = {k: np.empty((count, n)) for k in config.judge_counts}
        perms = {k: np.empty((count, n), dtype=np.int64) for k in config.judge_counts}
        for i in range(count):
            rng = config.seed.stream(start + i).generator()
            for k in config.judge_counts:
                comps[k][i] = config.distribution.draw(rng, n)
                perms[k][i] = rng.permutation(n)
        panels = {
            k: np.clip(comps[k], lowest, highest)[rows, perms[k]]
            for k in config.judge_counts
        }

    out = {}
    for k in config.judge_counts:
        shuffled = panels[k]
        if k == 0:
            out[k] = batch_exact_accuracy(shuffled, np.ones_like(shuffled))
            continue
        judges = shuffled[:, :k]
        experts = shuffled[:, k:]
        perceived = 0.5 + 2.0 * (judges[:, :, None] - 0.5) * (experts[:, None, :] - 0.5)
        weights = np.mean(log_odds(perceived), axis=1)
        if config.mode is WeightingMode.CLAMPED_NONNEGATIVE:
            weights = np.maximum(weights, 0.0)
        out[k] = batch_exact_accuracy(experts, weights)
    return out


def partition_experiment(
    config: PartitionConfig, threads: int | None = None
) -> ResultTable:
    """Accuracy of each judges/experts split of a random agent pool.

    Per iteration, N competences and one agent permutation are drawn; the
    first k permuted agents act as the (non-voting) judge panel and the
    rest vote as experts under the panel's averaged perceived weights.
    k=0 is the simple majority over all N agents.  In the paired design
    (default) all k share each iteration's draw; ``paired=False`` draws
    independently per k.
    """
    if config.total_agents > core.ENUMERATION_CAP:
        raise core.EnumerationCapError(
            f"partition_experiment enumerates up to 2^{config.total_agents} "
            f"profiles (cap {core.ENUMERATION_CAP})"
        )
    spans = [
        (s, min(s + _ITER_CHUNK, config.iterations))
        for s in range(0, config.iterations, _ITER_CHUNK)
    ]
    chunks = _map_ordered(
        lambda span: _partition_chunk(config, span[0], span[1]), spans, threads
    )
    ks = sorted(config.judge_counts)
    means, stderrs = [], []
    for k in ks:
        acc = np.concatenate([c[k] for c in chunks])
        means.append(float(np.mean(acc)))
        se = float(np.std(acc, ddof=1) / np.sqrt(acc.size)) if acc.size > 1 else 0.0
        stderrs.append(min(se, 0.5))
    return ResultTable(
        x_label="k_judges",
        x=tuple(float(k) for k in ks),
        mean=tuple(means),
        stderr=tuple(stderrs),
        iterations=(config.iterations,) * len(ks),
        metadata={
            "total_agents": config.total_agents,
            "distribution": config.distribution.spec_string(),
            "iterations": config.iterations,
            "seed": config.seed.master_seed,
            "mode": config.mode.value,
            "paired": config.paired,
        },
    )
