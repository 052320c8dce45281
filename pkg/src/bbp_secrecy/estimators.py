"""Monte Carlo estimators for the main and eavesdropper entropy rates.

Because the receiver states are uniform and the policy treats beam labels
symmetrically, the per-step conditional output distribution given a feedback
prefix does not depend on the state value; conditioning on the state adds
nothing, and the estimators pool all blocks into per-prefix counts instead
of stratifying by state.

The block transcripts are reduced to a pair of L-bit patterns (y_l, y_e),
counted in a dictionary; every prefix statistic is derived from those
pattern counts.  Standard errors come from batch means: blocks are split
into ``GROUPS`` contiguous groups, the plug-in rate is recomputed per group,
and the standard error is the group standard deviation divided by
sqrt(GROUPS).

Parallelism: blocks are sharded into contiguous ranges; each block draws
its generator from (seed, block index), so the merged counts are identical
for any worker count.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import block_rng, simulate_block
from .model import ExplorationSchedule, ModelConfig, binary_entropy, compute_schedule

GROUPS = 100


@dataclass
class TranscriptStats:
    """Pattern counts accumulated over simulated blocks.

    ``pattern_counts`` maps (y_l bits, y_e bits) -> occurrences, with step j
    stored in bit j-1.  ``group_counts`` holds the same split into
    contiguous block groups for batch-means error bars.
    """

    L: int
    blocks: int
    pattern_counts: Counter = field(default_factory=Counter)
    group_counts: list[Counter] = field(default_factory=list)
    clamped_probes: int = 0
    cost_violations: int = 0

    def merge(self, other: "TranscriptStats") -> None:
        if other.L != self.L or len(other.group_counts) != len(self.group_counts):
            raise ValueError("cannot merge stats with different shapes")
        self.blocks += other.blocks
        self.pattern_counts.update(other.pattern_counts)
        for mine, theirs in zip(self.group_counts, other.group_counts):
            mine.update(theirs)
        self.clamped_probes += other.clamped_probes
        self.cost_violations += other.cost_violations

    def prefix_stats(self, which: str, j: int) -> dict[int, tuple[int, int]]:
        """Per-prefix (count, ones) for step j of stream ``"legit"``/``"eav"``.

        Keys are the first j-1 feedback bits packed as an integer.
        """
        return _prefix_stats(self.pattern_counts, which, j)


def _prefix_stats(counts: Counter, which: str, j: int) -> dict[int, tuple[int, int]]:
    sel = 0 if which == "legit" else 1
    mask = (1 << (j - 1)) - 1
    out: dict[int, list[int]] = {}
    for pattern, n in counts.items():
        bits = pattern[sel]
        entry = out.setdefault(bits & mask, [0, 0])
        entry[0] += n
        entry[1] += n * ((bits >> (j - 1)) & 1)
    return {k: (v[0], v[1]) for k, v in out.items()}


def _plug_in_rate(counts: Counter, which: str, L: int) -> float:
    """Plug-in estimate of (1/L) sum_j H(Y_j | Y^{j-1}) from pattern counts."""
    total = sum(counts.values())
    if total == 0:
        raise ValueError("no blocks accumulated")
    acc = 0.0
    for j in range(1, L + 1):
        for n, ones in _prefix_stats(counts, which, j).values():
            acc += (n / total) * binary_entropy(ones / n)
    return acc / L


@dataclass(frozen=True)
class RateEstimate:
    """Point estimate with a batch-means standard error."""

    value: float
    stderr: float
    blocks: int


def _collect_range(
    config: ModelConfig,
    schedule: ExplorationSchedule,
    start: int,
    stop: int,
    groups: int,
    dump_path: str | None = None,
) -> TranscriptStats:
    """Simulate blocks [start, stop) and count their feedback patterns."""
    stats = TranscriptStats(
        L=config.L, blocks=0, group_counts=[Counter() for _ in range(groups)]
    )
    total = config.blocks
    seeds = np.random.SeedSequence(config.seed).generate_state(stop, np.uint64)
    budget_violations = 0
    clamps = 0
    dump = open(dump_path, "w") if dump_path else None
    try:
        import random as _random

        for i in range(start, stop):
            rng = _random.Random(int(seeds[i]))
            t = simulate_block(config, schedule, rng)
            yl_bits = 0
            ye_bits = 0
            for j, (yl, ye) in enumerate(zip(t.y_l, t.y_e)):
                yl_bits |= yl << j
                ye_bits |= ye << j
            key = (yl_bits, ye_bits)
            stats.pattern_counts[key] += 1
            stats.group_counts[i * groups // total][key] += 1
            if not t.cost_ok:
                budget_violations += 1
            clamps += t.clamp_count
            if dump is not None:
                dump.write(t.format_line() + "\n")
        stats.blocks = stop - start
        stats.cost_violations = budget_violations
        stats.clamped_probes = clamps
        return stats
    finally:
        if dump is not None:
            dump.close()


def collect_stats(
    config: ModelConfig,
    schedule: ExplorationSchedule | None = None,
    workers: int | None = None,
    dump_path: str | None = None,
) -> TranscriptStats:
    """Simulate ``config.blocks`` blocks and accumulate pattern counts.

    ``workers`` defaults to the BBP_THREADS environment variable (else 1).
    The result is independent of the worker count.  Transcript dumping
    forces a single worker so the dump order is the block order.
    """
    if config.blocks <= 0:
        raise ValueError("config.blocks must be positive for simulation")
    schedule = schedule or compute_schedule(config.K, config.B, config.L)
    if workers is None:
        workers = max(1, int(os.environ.get("BBP_THREADS", "1")))
    groups = min(GROUPS, config.blocks)
    if dump_path is not None:
        workers = 1
    if workers == 1:
        return _collect_range(config, schedule, 0, config.blocks, groups, dump_path)

    edges = np.linspace(0, config.blocks, workers + 1, dtype=int)
    merged: TranscriptStats | None = None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_collect_range, config, schedule, int(a), int(b), groups)
            for a, b in zip(edges[:-1], edges[1:])
            if b > a
        ]
        for fut in futures:
            part = fut.result()
            if merged is None:
                merged = part
            else:
                merged.merge(part)
    assert merged is not None
    return merged


def _rate_estimate(stats: TranscriptStats, which: str) -> RateEstimate:
    value = _plug_in_rate(stats.pattern_counts, which, stats.L)
    group_rates = [
        _plug_in_rate(c, which, stats.L) for c in stats.group_counts if c
    ]
    if len(group_rates) >= 2:
        stderr = float(np.std(group_rates, ddof=1) / np.sqrt(len(group_rates)))
    else:
        stderr = float("nan")
    return RateEstimate(value=value, stderr=stderr, blocks=stats.blocks)


def estimate_main_rate(
    config: ModelConfig, schedule: ExplorationSchedule | None = None, workers: int | None = None
) -> RateEstimate:
    """Estimate the legitimate entropy rate (1/L) sum_j H(Y_j^l | Y^{l,j-1})."""
    return _rate_estimate(collect_stats(config, schedule, workers), "legit")


def estimate_leakage(
    config: ModelConfig, schedule: ExplorationSchedule | None = None, workers: int | None = None
) -> RateEstimate:
    """Estimate the eavesdropper entropy rate (1/L) sum_j H(Y_j^e | Y^{e,j-1})."""
    return _rate_estimate(collect_stats(config, schedule, workers), "eav")


def estimate_rates(
    config: ModelConfig,
    schedule: ExplorationSchedule | None = None,
    workers: int | None = None,
    dump_path: str | None = None,
) -> tuple[RateEstimate, RateEstimate, TranscriptStats]:
    """One simulation pass giving (main rate, leakage, raw stats)."""
    stats = collect_stats(config, schedule, workers, dump_path)
    return _rate_estimate(stats, "legit"), _rate_estimate(stats, "eav"), stats


def unseen_table_prefixes(stats: TranscriptStats, table) -> list[tuple[int, str]]:
    """Closed-form table prefixes never observed in the sample.

    Unseen prefixes contribute zero to the plug-in rates; callers may want
    to log them when comparing against the closed forms.
    """
    missing = []
    for (j, _k), entry in sorted(table.entries.items()):
        seen = _prefix_stats(stats.pattern_counts, "eav", j)
        bits = int(entry.prefix[::-1], 2) if entry.prefix else 0
        if bits not in seen:
            missing.append((j, entry.prefix))
    return missing
