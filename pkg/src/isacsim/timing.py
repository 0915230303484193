"""Slot-timing and exploration-time accounting.

Parameterized by measured execution times of the beam-selection and radar
processing blocks on the target SoC.  Everything here is exact arithmetic on
configured constants; nothing is stochastic.  Durations are seconds.

Two conventions exist for exploration time.  The default counts the data
portion of each slot (4 ms), which is how the headline figures are quoted:
32 beams -> 128 ms, and a 13-slot radar search plus 8 round-robin slots ->
84 ms.  Set ``include_compute=True`` to count full slot periods instead.
"""

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class TimingModel:
    slot_data: float = 4.0e-3
    ucb_compute: dict = field(
        default_factory=lambda: {32: 1.5e-3, 16: 0.6e-3, 8: 0.55e-3}
    )
    mf_time: float = 2.0e-3
    music_time: float = 1.5e-3
    pipeline_interval: float = 2.0e-3
    hw_pri: float = 0.58e-6
    packets_per_cpi: int = 20
    subslots: int = 32

    def __post_init__(self):
        for name in ("slot_data", "mf_time", "music_time", "pipeline_interval",
                     "hw_pri"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.packets_per_cpi < 1 or self.subslots < 1:
            raise ValueError("counts must be positive")

    @property
    def cpi(self) -> float:
        """Coherent processing interval: one radar burst."""
        return self.packets_per_cpi * self.hw_pri

    def ucb_time(self, beams: int) -> float:
        """Beam-selection compute time; interpolated to the nearest known size."""
        if beams in self.ucb_compute:
            return self.ucb_compute[beams]
        nearest = min(self.ucb_compute, key=lambda k: abs(k - beams))
        return self.ucb_compute[nearest]

    def slot_period(self, beams: int) -> float:
        """Full slot: data portion plus per-slot beam selection."""
        return self.slot_data + self.ucb_time(beams)


def rsp_pipeline_time(model: TimingModel, beams: int) -> float:
    """Pipelined matched-filter + Doppler processing across all beams.

    New beams enter the matched filter every ``pipeline_interval``; the last
    beam finishes its Doppler estimate ``music_time`` after its filter.
    """
    return model.mf_time + (beams - 1) * model.pipeline_interval + model.music_time


def radar_search_slots(model: TimingModel, beams: int) -> int:
    """Slots consumed before round-robin can start: 1 TX slot + processing.

    The acquisition burst (beams * CPI) fits inside the first slot; the
    pipelined processing then occupies whole slots of the full slot period.
    """
    period = model.slot_period(beams)
    if model.cpi * beams > period:
        raise ValueError("acquisition burst does not fit one slot")
    processing = rsp_pipeline_time(model, beams)
    return 1 + math.ceil(processing / period - 1e-12)


def exploration_time_ucb_snr(
    model: TimingModel, beams: int, include_compute: bool = False
) -> float:
    """Round-robin duration for the communications-only policy."""
    if beams < 1:
        raise ValueError("need at least one beam")
    per_slot = model.slot_period(beams) if include_compute else model.slot_data
    return beams * per_slot


def exploration_time_ucb_isac(
    model: TimingModel,
    beams: int,
    subset_beams: int,
    include_compute: bool = False,
) -> float:
    """Radar search plus round-robin duration for the radar-pruned policy."""
    if subset_beams > beams:
        raise ValueError("subset cannot exceed the codebook")
    if subset_beams < 0:
        raise ValueError("subset size must be non-negative")
    slots = radar_search_slots(model, beams) + subset_beams
    per_slot = model.slot_period(beams) if include_compute else model.slot_data
    return slots * per_slot


def slot_budget(model: TimingModel, policy: str, phase: str) -> tuple:
    """(data_seconds, overhead_seconds) for one slot of a given policy phase.

    Radar-search slots carry no payload.  The communications-only policy
    always pays the full-codebook selection time; the radar-pruned policy
    pays it only while round-robining and afterwards only the subset-sized
    selection, freeing the remainder of the slot for data.
    """
    full = model.slot_period(model.subslots)
    if phase == "radar":
        return 0.0, full
    if policy == "ucb_snr" or phase == "roundrobin":
        compute = model.ucb_time(model.subslots)
        return full - compute, compute
    if policy == "ucb_isac":
        compute = model.ucb_time(8)
        return full - compute, compute
    raise ValueError(f"unknown policy {policy!r}")


def timing_adjusted_throughput(
    model: TimingModel,
    policy: str,
    mean_ber: float,
    total_slots: int,
    payload_bits: int,
    subset_beams: int = 8,
) -> float:
    """Throughput after charging slot overheads and dead search slots.

    The payload nominally needs ``model.slot_data`` seconds; a slot offering
    more data time proportionally carries more bits.  Total elapsed time is
    ``total_slots`` full slot periods.
    """
    full = model.slot_period(model.subslots)
    if policy == "ucb_snr":
        data_per_slot = [slot_budget(model, policy, "exploit")[0]] * total_slots
    elif policy == "ucb_isac":
        dead = radar_search_slots(model, model.subslots)
        rr = subset_beams
        exploit = max(total_slots - dead - rr, 0)
        data_per_slot = (
            [0.0] * dead
            + [slot_budget(model, policy, "roundrobin")[0]] * rr
            + [slot_budget(model, policy, "exploit")[0]] * exploit
        )
    else:
        raise ValueError(f"unknown policy {policy!r}")
    bits = (1.0 - mean_ber) * payload_bits * sum(
        d / model.slot_data for d in data_per_slot
    )
    return bits / (total_slots * full)
