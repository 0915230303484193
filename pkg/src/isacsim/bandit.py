"""Beam-selection policies and restart control.

All policies run over a slotted horizon with 1-based slot index t.  Rewards
are link SNRs normalized into [0, 1]; a slot with no acknowledgment (no user
on the beam) earns zero.  Ties always break toward the lowest beam index so
runs are reproducible.
"""

import math
from dataclasses import dataclass, field

import numpy as np

RADAR = "radar"
ROUND_ROBIN = "roundrobin"
EXPLOIT = "exploit"

SNR_NORM_MIN_DB = -20.0
SNR_NORM_MAX_DB = 20.0

LUCB_DELTA = 0.1


def normalize_reward(snr_db: float) -> float:
    """Affine map of link SNR onto [0, 1]; dead links earn nothing."""
    if snr_db == -math.inf:
        return 0.0
    span = SNR_NORM_MAX_DB - SNR_NORM_MIN_DB
    return min(max((snr_db - SNR_NORM_MIN_DB) / span, 0.0), 1.0)


@dataclass
class Action:
    phase: str
    beam: int | None


@dataclass
class BanditState:
    """Pull counts and reward sums over the currently active beam set."""

    active_set: tuple
    pulls: np.ndarray = field(init=False)
    rewards: np.ndarray = field(init=False)
    t: int = field(init=False, default=1)
    clamped_rewards: int = field(init=False, default=0)

    def __post_init__(self):
        self.active_set = tuple(self.active_set)
        if not self.active_set:
            raise ValueError("active set must not be empty")
        self.reset(self.active_set)

    def reset(self, active_set) -> None:
        self.active_set = tuple(active_set)
        k = len(self.active_set)
        self.pulls = np.zeros(k, dtype=int)
        self.rewards = np.zeros(k, dtype=float)
        self.t = 1
        self._index = {b: i for i, b in enumerate(self.active_set)}

    def position(self, beam: int) -> int:
        return self._index[beam]

    @property
    def size(self) -> int:
        return len(self.active_set)


def ucb_quality(reward_sum: float, pulls: int, t: int) -> float:
    """Optimism-adjusted beam quality: empirical mean plus exploration bonus."""
    if pulls < 1:
        raise ValueError("beam has never been pulled; round-robin must run first")
    if t < 1:
        raise ValueError("slot index is 1-based")
    return reward_sum / pulls + math.sqrt(2.0 * math.log(t) / pulls)


def _argmax_quality(state: BanditState) -> int:
    if np.any(state.pulls < 1):
        raise ValueError("every beam needs one pull before the quality argmax")
    q = state.rewards / state.pulls + np.sqrt(
        2.0 * math.log(state.t) / state.pulls
    )
    return state.active_set[int(np.argmax(q))]


def ucb_snr_select(state: BanditState) -> int:
    """Round-robin once over every beam, then follow the quality argmax."""
    if state.t <= state.size:
        return state.active_set[state.t - 1]
    return _argmax_quality(state)


def ucb_isac_select(state: BanditState, t_isac: int) -> Action:
    """Phased selection: radar search, subset round-robin, regret minimization.

    ``state.active_set`` holds the radar-pruned beam subset (or the full
    codebook when the radar found nothing, which degrades this to plain
    SNR-based selection).  During the first ``t_isac`` slots the radar owns
    the air and no beam is served; the next ``len(active_set)`` slots
    round-robin the pruned beams; afterwards the quality argmax runs over
    the subset only.
    """
    if state.t <= t_isac:
        return Action(RADAR, None)
    data_t = state.t - t_isac
    if data_t <= state.size:
        return Action(ROUND_ROBIN, state.active_set[data_t - 1])
    return Action(EXPLOIT, _argmax_quality(state))


def update(state: BanditState, beam: int, reward: float) -> BanditState:
    """Credit one slot's reward to a beam; out-of-range rewards are clamped."""
    if not 0.0 <= reward <= 1.0:
        reward = min(max(reward, 0.0), 1.0)
        state.clamped_rewards += 1
    pos = state.position(beam)
    state.pulls[pos] += 1
    state.rewards[pos] += reward
    state.t += 1
    return state


def advance_slot(state: BanditState) -> BanditState:
    """Consume a slot that carried no data (radar search)."""
    state.t += 1
    return state


def random_select(k: int, rng: np.random.Generator) -> int:
    if k < 1:
        raise ValueError("need at least one beam")
    return int(rng.integers(k))


def dbf_oracle_select(snr_all_db: np.ndarray) -> int:
    """Genie selection: evaluate every beam at once, take the best."""
    return int(np.argmax(snr_all_db))


# ---------------------------------------------------------------------------
# LUCB best-arm identification
# ---------------------------------------------------------------------------


@dataclass
class LucbState:
    """Two-arm sampling state for confidence-bound best-beam identification."""

    active_set: tuple
    delta: float = LUCB_DELTA
    committed: int | None = field(init=False, default=None)
    _pull_leader: bool = field(init=False, default=True)

    def __post_init__(self):
        self.active_set = tuple(self.active_set)
        k = len(self.active_set)
        self.pulls = np.zeros(k, dtype=int)
        self.rewards = np.zeros(k, dtype=float)
        self.t = 1

    def reset(self, active_set) -> None:
        self.__init__(tuple(active_set), self.delta)

    @property
    def size(self) -> int:
        return len(self.active_set)

    def radius(self, pulls: int) -> float:
        return math.sqrt(math.log(self.size / self.delta) / (2.0 * pulls))

    def _radii(self) -> np.ndarray:
        return np.sqrt(
            math.log(self.size / self.delta) / (2.0 * np.maximum(self.pulls, 1))
        )

    def _leader_challenger(self):
        means = self.rewards / np.maximum(self.pulls, 1)
        leader = int(np.argmax(means))
        ubs = means + self._radii()
        ubs[leader] = -math.inf
        challenger = int(np.argmax(ubs))
        return leader, challenger

    def maybe_commit(self) -> None:
        if self.committed is not None or np.any(self.pulls == 0):
            return
        if self.size == 1:
            self.committed = 0
            return
        means = self.rewards / self.pulls
        leader = int(np.argmax(means))
        lb = means[leader] - self.radius(int(self.pulls[leader]))
        others = [
            means[i] + self.radius(int(self.pulls[i]))
            for i in range(self.size)
            if i != leader
        ]
        if lb >= max(others):
            self.committed = leader


def lucb_select(state: LucbState) -> int:
    """Sample the empirical best and its strongest challenger alternately.

    Every arm is pulled once first; after the stopping rule fires the winner
    is played forever.
    """
    if state.size == 1:
        state.committed = 0
    if state.committed is not None:
        return state.active_set[state.committed]
    unpulled = np.flatnonzero(state.pulls == 0)
    if unpulled.size:
        return state.active_set[int(unpulled[0])]
    leader, challenger = state._leader_challenger()
    pick = leader if state._pull_leader else challenger
    return state.active_set[pick]


def lucb_update(state: LucbState, beam: int, reward: float) -> LucbState:
    reward = min(max(reward, 0.0), 1.0)
    rr_done_before = not np.any(state.pulls == 0)
    pos = state.active_set.index(beam)
    state.pulls[pos] += 1
    state.rewards[pos] += reward
    state.t += 1
    if state.committed is None:
        if rr_done_before:
            state._pull_leader = not state._pull_leader
        state.maybe_commit()
    return state


# ---------------------------------------------------------------------------
# regret and restart control
# ---------------------------------------------------------------------------


@dataclass
class RegretTracker:
    """Cumulative reward gap versus the per-slot best beam."""

    cumulative: float = 0.0
    trace: list = field(default_factory=list)

    def step(self, star_mean: float, chosen_mean: float) -> None:
        gap = star_mean - chosen_mean
        if gap < 0:
            gap = 0.0
        self.cumulative += gap
        self.trace.append(self.cumulative)


def regret_step(
    tracker: RegretTracker, chosen_mean: float, star_mean: float
) -> RegretTracker:
    tracker.step(star_mean, chosen_mean)
    return tracker


@dataclass
class RestartPolicy:
    """When to throw the learned state away and search again.

    ``periodic`` restarts on a fixed slot interval; ``rsp_forecast`` restarts
    when the beam-exit forecast expires or the served SNR collapses, whichever
    comes first.
    """

    kind: str = "none"
    interval: int | None = None
    next_restart_slot: int | None = None

    def __post_init__(self):
        if self.kind not in ("none", "periodic", "rsp_forecast"):
            raise ValueError(f"unknown restart kind {self.kind!r}")
        if self.kind == "periodic" and (self.interval is None or self.interval < 1):
            raise ValueError("periodic restart needs a positive interval")

    def schedule(self, origin_slot: int, t_infinity: float, slot_period: float):
        """Arm the forecast: restart ceil(T-inf / T) slots after ``origin_slot``."""
        self.next_restart_slot = origin_slot + max(
            math.ceil(t_infinity / slot_period - 1e-12), 1
        )


def maybe_restart(
    policy: RestartPolicy, t: int, snr_dropped: bool = False
) -> bool:
    """Does slot ``t`` trigger a restart under this policy?"""
    if policy.kind == "none":
        return False
    if policy.kind == "periodic":
        return t % policy.interval == 0
    if policy.next_restart_slot is not None and t >= policy.next_restart_slot:
        return True
    return snr_dropped
