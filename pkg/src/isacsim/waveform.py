"""Golay complementary pulse waveforms.

A complementary pair of bipolar sequences has aperiodic autocorrelations that
sum to a delta, which is what makes the matched-filter range profile clean.
One sequence of the pair fills the active part of each pulse repetition
interval (PRI); the rest of the PRI is silent.
"""

from dataclasses import dataclass, field

import numpy as np

MAX_GOLAY_ORDER = 16

# PRI values quoted to two significant figures (e.g. 0.58 us at 50% duty for
# a 512-chip pulse) under-cover the pulse by a fraction of a percent, so the
# fit check carries a small relative tolerance.
_FIT_RTOL = 1e-2


@dataclass(frozen=True)
class GolayPair:
    """A complementary pair of bipolar (+-1) sequences of equal length."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        n = len(a)
        if len(b) != n:
            raise ValueError("sequences of a Golay pair must have equal length")
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError("Golay pair length must be a power of two >= 2")
        if not (np.all(np.abs(a) == 1.0) and np.all(np.abs(b) == 1.0)):
            raise ValueError("Golay pair entries must be exactly +1 or -1")
        s = aperiodic_autocorrelation(a) + aperiodic_autocorrelation(b)
        s[n - 1] -= 2 * n
        if np.max(np.abs(s)) >= 1e-9:
            raise ValueError("sequences are not complementary")

    @property
    def length(self) -> int:
        return len(self.a)


def generate_golay_pair(order: int) -> GolayPair:
    """Build the canonical complementary pair of length 2**order.

    Uses the Golay/Rudin-Shapiro doubling recursion a' = a||b, b' = a||-b
    seeded at a = b = [+1]; the result is deterministic in ``order``.
    """
    if not isinstance(order, (int, np.integer)):
        raise TypeError("order must be an integer")
    if not 1 <= order <= MAX_GOLAY_ORDER:
        raise ValueError(f"order must be in 1..{MAX_GOLAY_ORDER}, got {order}")
    a = np.array([1.0])
    b = np.array([1.0])
    for _ in range(order):
        a, b = np.concatenate([a, b]), np.concatenate([a, -b])
    return GolayPair(a=a, b=b)


def aperiodic_autocorrelation(x) -> np.ndarray:
    """Full aperiodic autocorrelation R[l] = sum_n x[n] conj(x[n-l]).

    The output has length 2N-1 with lag zero at the centre index N-1 and
    satisfies R[-l] = conj(R[l]).
    """
    x = np.asarray(x)
    if x.size == 0:
        raise ValueError("autocorrelation of an empty sequence is undefined")
    return np.correlate(x, x, mode="full")


@dataclass(frozen=True)
class RadarWaveform:
    """Sampled pulse train: one Golay sequence per PRI, silence after it.

    Parameters
    ----------
    pair : GolayPair
        The complementary pair; sequence ``a`` is transmitted by default.
    sample_period : float
        Fast-time sample spacing Ts in seconds.
    pri : float
        Pulse repetition interval Tp in seconds.
    packets : int
        Number of PRIs (slow-time length) in one coherent burst; at least two
        so that Doppler processing has multiple snapshots.
    duty_cycle : float
        Fraction of the PRI available for the active pulse.
    alternate_pair : bool
        When set, even packets carry sequence ``a`` and odd packets carry
        ``b`` instead of reusing ``a`` throughout.
    """

    pair: GolayPair
    sample_period: float
    pri: float
    packets: int
    duty_cycle: float = 0.5
    alternate_pair: bool = field(default=False)

    def __post_init__(self):
        if self.sample_period <= 0 or self.pri <= 0:
            raise ValueError("sample_period and pri must be positive")
        if not 0 < self.duty_cycle <= 1:
            raise ValueError("duty_cycle must be in (0, 1]")
        if self.packets < 2:
            raise ValueError("at least two packets are required")
        pulse_time = self.pair.length * self.sample_period
        if pulse_time > self.pri * self.duty_cycle * (1 + _FIT_RTOL):
            raise ValueError(
                f"pulse of {pulse_time:.3e} s does not fit the active "
                f"{self.pri * self.duty_cycle:.3e} s of one PRI"
            )

    @property
    def n_fast(self) -> int:
        """Fast-time samples per PRI."""
        return int(round(self.pri / self.sample_period))

    @property
    def length(self) -> int:
        return self.pair.length

    def sequence_for_packet(self, packet_index: int) -> np.ndarray:
        if self.alternate_pair and packet_index % 2 == 1:
            return self.pair.b
        return self.pair.a


def sample_pulse_train(waveform: RadarWaveform, packet_index: int) -> np.ndarray:
    """Fast-time samples of one PRI: the Golay chips, then zeros."""
    if not 0 <= packet_index < waveform.packets:
        raise ValueError(
            f"packet_index {packet_index} outside 0..{waveform.packets - 1}"
        )
    out = np.zeros(waveform.n_fast, dtype=complex)
    seq = waveform.sequence_for_packet(packet_index)
    out[: len(seq)] = seq
    return out
