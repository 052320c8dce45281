"""Block simulator for the adaptive beam-probing policy.

Within a block the transmitter explores fresh beams (c_int_j per step) until
the legitimate receiver's beam is first hit at some step k.  From then on it
bisects: each step probes max(c_int_k // 2^(j-k), 1) beams out of the set
known to contain the legitimate beam, and the set is narrowed to the probed
half on a hit and to the unprobed rest on a miss.  Probes never depend on
the eavesdropper's feedback, only on the legitimate feedback stream.

Both receivers see the same channel: output 1 iff the probed set contains
their beam.  Feedback is noiseless with unit delay.

Determinism: every block draws its randomness from a generator derived from
(seed, block index) via ``numpy.random.SeedSequence``, so results do not
depend on how blocks are partitioned across workers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .model import ExplorationSchedule, ModelConfig


@dataclass(frozen=True, slots=True)
class BeamSet:
    """Subset of the K beams as a bit mask (bit b-1 <-> beam b)."""

    mask: int
    K: int
    card: int

    @classmethod
    def from_beams(cls, beams, K: int) -> "BeamSet":
        mask = 0
        for b in beams:
            mask |= 1 << (b - 1)
        return cls(mask=mask, K=K, card=mask.bit_count())

    @classmethod
    def full(cls, K: int) -> "BeamSet":
        return cls(mask=(1 << K) - 1, K=K, card=K)

    @classmethod
    def empty(cls, K: int) -> "BeamSet":
        return cls(mask=0, K=K, card=0)

    def contains(self, beam: int) -> bool:
        return bool((self.mask >> (beam - 1)) & 1)

    def members(self) -> list[int]:
        return [b for b in range(1, self.K + 1) if (self.mask >> (b - 1)) & 1]

    def hex(self) -> str:
        return format(self.mask, "#x")


@dataclass(frozen=True, slots=True)
class PolicyState:
    """Transmitter-side state entering step ``step``.

    ``candidate`` is the set the previous probe was drawn from (all K beams
    before step 1), ``last_explored`` that previous probe, and
    ``detection_time`` the step of the first legitimate hit, if any.
    ``clamp_count`` counts probe sizes clamped to the candidate cardinality
    (possible only with fractional schedules after flooring).
    """

    candidate: BeamSet
    last_explored: BeamSet
    detection_time: int | None
    step: int
    clamp_count: int = 0


@dataclass(slots=True)
class BlockTranscript:
    """Everything observable about one simulated block."""

    s_l: int
    s_e: int
    probes: list[BeamSet]
    y_l: list[int]
    y_e: list[int]
    cost_ok: bool
    clamp_count: int = 0

    def format_line(self) -> str:
        """One-line dump: ``s_l s_e probes(hex,comma) y_l(bits) y_e(bits)``."""
        probes = ",".join(p.hex() for p in self.probes)
        yl = "".join(str(b) for b in self.y_l)
        ye = "".join(str(b) for b in self.y_e)
        return f"{self.s_l} {self.s_e} {probes} {yl} {ye}"


def initial_policy_state(K: int) -> PolicyState:
    return PolicyState(
        candidate=BeamSet.full(K),
        last_explored=BeamSet.empty(K),
        detection_time=None,
        step=1,
    )


def derive_block_seed(seed: int, index: int) -> int:
    """Stable 64-bit per-block seed; partition-independent by construction.

    Block ``index`` gets word ``index`` of the ``SeedSequence(seed)`` output
    stream, so batch generation over any contiguous range agrees with
    one-at-a-time derivation.
    """
    return int(np.random.SeedSequence(seed).generate_state(index + 1, np.uint64)[index])


def block_rng(seed: int, index: int) -> random.Random:
    return random.Random(derive_block_seed(seed, index))


def draw_states(K: int, rng: random.Random) -> tuple[int, int]:
    """Draw (s_l, s_e) independently and uniformly from [1..K].

    The legitimate state is drawn first; callers relying on replay must not
    reorder the two draws.
    """
    return rng.randrange(1, K + 1), rng.randrange(1, K + 1)


def channel_output(x: BeamSet, s: int) -> int:
    """Deterministic channel: 1 iff the probed set covers beam ``s``."""
    return 1 if x.contains(s) else 0


def jcas_step(
    state: PolicyState,
    prev_feedback: tuple[int, int],
    schedule: ExplorationSchedule,
    rng: random.Random,
) -> tuple[BeamSet, PolicyState]:
    """Choose the probe for ``state.step`` given last step's feedback.

    Only ``prev_feedback[0]`` (the legitimate bit) is ever read; the
    eavesdropper bit is accepted to mirror the feedback link but cannot
    influence the probe sequence.

    Returns
    -------
    (probe, next_state)
    """
    j = state.step
    K = schedule.K
    y_prev = prev_feedback[0]

    if j == 1:
        cand_members = state.candidate.members()
        cand = state.candidate
        q = schedule.c_int[0]
        det: int | None = None
    elif state.detection_time is None and y_prev == 0:
        # Still exploring: drop the beams probed last step, take fresh ones.
        mask = state.candidate.mask & ~state.last_explored.mask
        cand = BeamSet(mask=mask, K=K, card=mask.bit_count())
        cand_members = cand.members()
        q = schedule.c_int[j - 1]
        det = None
    else:
        # Detected at k (possibly just now): narrow to the probed half on a
        # hit, to the unprobed rest on a miss, and probe half of what is left.
        det = state.detection_time if state.detection_time is not None else j - 1
        if y_prev == 1:
            cand = state.last_explored
        else:
            mask = state.candidate.mask & ~state.last_explored.mask
            cand = BeamSet(mask=mask, K=K, card=mask.bit_count())
        cand_members = cand.members()
        q = max(schedule.c_int[det - 1] >> (j - det), 1)

    clamp = state.clamp_count
    if q > cand.card:
        q = cand.card
        clamp += 1
    probe = BeamSet.from_beams(rng.sample(cand_members, q), K) if q else BeamSet.empty(K)
    next_state = PolicyState(
        candidate=cand,
        last_explored=probe,
        detection_time=det,
        step=j + 1,
        clamp_count=clamp,
    )
    return probe, next_state


def simulate_block(
    config: ModelConfig,
    schedule: ExplorationSchedule,
    rng: random.Random,
    s_l: int | None = None,
    s_e: int | None = None,
) -> BlockTranscript:
    """Simulate one block and return its full transcript.

    ``s_l`` / ``s_e`` override the drawn states (used by replay tests); the
    states are drawn from ``rng`` regardless so that the probe-choice stream
    is unchanged by an override.
    """
    drawn_l, drawn_e = draw_states(config.K, rng)
    s_l = drawn_l if s_l is None else s_l
    s_e = drawn_e if s_e is None else s_e

    budget = int(math.floor(config.B))
    state = initial_policy_state(config.K)
    feedback = (0, 0)
    probes: list[BeamSet] = []
    y_l: list[int] = []
    y_e: list[int] = []
    cost_ok = True
    for _ in range(config.L):
        probe, state = jcas_step(state, feedback, schedule, rng)
        if probe.card > budget:
            cost_ok = False
        yl = channel_output(probe, s_l)
        ye = channel_output(probe, s_e)
        probes.append(probe)
        y_l.append(yl)
        y_e.append(ye)
        feedback = (yl, ye)
    return BlockTranscript(
        s_l=s_l,
        s_e=s_e,
        probes=probes,
        y_l=y_l,
        y_e=y_e,
        cost_ok=cost_ok,
        clamp_count=state.clamp_count,
    )
