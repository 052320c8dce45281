"""Core model parameters and the exploration schedule.

The channel has K beam directions.  Each block lasts L channel uses during
which the legitimate receiver and the eavesdropper each sit in one fixed,
uniformly drawn beam (they may coincide).  An input probes a subset of
beams; the per-symbol cost is the number of probed beams and must stay
within the budget B.

The exploration schedule c_1..c_L fixes how many fresh beams are probed per
step while the legitimate beam is still unknown:

    c_1 = min(K / 2, B)
    c_j = min((K - sum_{k<j} c_k) / 2, B)

The schedule is real-valued; ``c_int`` floors each entry to the subset size
actually probed by the simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def binary_entropy(p: float) -> float:
    """Binary entropy of ``p`` in bits, with the convention 0*log2(0) = 0.

    Raises
    ------
    ValueError
        If ``p`` lies outside [0, 1].
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy: p={p!r} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


@dataclass(frozen=True)
class ModelConfig:
    """Instance parameters shared by the bound and simulation layers.

    Attributes
    ----------
    K : int
        Number of beams, K >= 2.
    L : int
        Block length (channel uses per block), L >= 1.
    B : float
        Per-symbol cost budget (maximum number of probed beams), B > 0.
    seed : int
        Base seed for Monte Carlo; per-block generators are derived from it.
    blocks : int
        Number of simulated blocks for the estimators (0 = bounds only).
    """

    K: int
    L: int
    B: float
    seed: int = 0
    blocks: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.K, int) or self.K < 2:
            raise ValueError(f"K must be an integer >= 2, got {self.K!r}")
        if not isinstance(self.L, int) or self.L < 1:
            raise ValueError(f"L must be an integer >= 1, got {self.L!r}")
        if not self.B > 0:
            raise ValueError(f"B must be positive, got {self.B!r}")
        if self.B > self.K:
            raise ValueError(f"B={self.B!r} exceeds the number of beams K={self.K}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.blocks < 0:
            raise ValueError("blocks must be non-negative")


@dataclass(frozen=True)
class ExplorationSchedule:
    """Per-step exploration sizes for one (K, B, L) instance.

    Attributes
    ----------
    c : tuple of float
        Real-valued schedule entries c_1..c_L.
    c_int : tuple of int
        floor(c_j); the subset sizes used by the simulator.
    cum : tuple of float
        Partial sums cum[j-1] = c_1 + ... + c_j.
    """

    K: int
    B: float
    c: tuple[float, ...]
    c_int: tuple[int, ...]
    cum: tuple[float, ...]

    @property
    def L(self) -> int:
        return len(self.c)

    @property
    def is_integral(self) -> bool:
        """True when every c_j is an exact integer."""
        return all(cj == ij for cj, ij in zip(self.c, self.c_int))

    def cum_before(self, j: int) -> float:
        """Sum of c_1..c_{j-1} (zero for j = 1)."""
        return self.cum[j - 2] if j >= 2 else 0.0

    def cum_int_before(self, j: int) -> int:
        """Integer beams actually consumed before step j by exploration."""
        return sum(self.c_int[: j - 1])


def compute_schedule(K: int, B: float, L: int) -> ExplorationSchedule:
    """Evaluate the exploration recursion for ``L`` steps.

    Examples
    --------
    >>> compute_schedule(32, 8, 5).c
    (8.0, 8.0, 8.0, 4.0, 2.0)
    """
    if K < 2 or L < 1 or not 0 < B <= K:
        raise ValueError(f"invalid schedule arguments K={K}, B={B}, L={L}")
    c: list[float] = []
    cum: list[float] = []
    total = 0.0
    for _ in range(L):
        cj = min((K - total) / 2.0, float(B))
        c.append(cj)
        total += cj
        cum.append(total)
    c_int = tuple(int(math.floor(cj)) for cj in c)
    return ExplorationSchedule(K=K, B=float(B), c=tuple(c), c_int=c_int, cum=tuple(cum))
