"""Link-level downlink model: SNR to BER to throughput.

The OFDM PHY is abstracted by the standard Gray-coded square-QAM AWGN
bit-error approximation; the packet payload size and slot period carry the
throughput accounting.
"""

import math
from dataclasses import dataclass, field

BER_FLOOR = 1e-12
BER_CEILING = 0.5


@dataclass(frozen=True)
class CommConfig:
    """Downlink parameters: modulation, payload bits per slot, slot period."""

    modulation_order: int = 16
    data_bits_per_packet: int = 40_000
    slot_period: float = 0.004
    snr_sweep: tuple = field(default=(-10.0, -5.0, 0.0, 5.0, 10.0))

    def __post_init__(self):
        object.__setattr__(self, "snr_sweep", tuple(self.snr_sweep))
        if self.data_bits_per_packet <= 0:
            raise ValueError("payload size must be positive")
        if self.slot_period <= 0:
            raise ValueError("slot period must be positive")
        m = self.modulation_order
        if m < 4 or (m & (m - 1)) != 0:
            raise ValueError("modulation order must be a power of two >= 4")

    @property
    def peak_rate(self) -> float:
        """Error-free bits per second."""
        return self.data_bits_per_packet / self.slot_period


def ber_from_snr(snr_db: float, modulation_order: int = 16) -> float:
    """Uncoded Gray-coded square-QAM bit error rate on an AWGN link.

    BER ~= (4/log2 M)(1 - 1/sqrt(M)) Q(sqrt(3 snr/(M-1))), clamped to
    [1e-12, 0.5]; a dead link (-inf dB) gives coin-flip bits.
    """
    if math.isnan(snr_db):
        raise ValueError("snr_db must not be NaN")
    if snr_db == -math.inf:
        return BER_CEILING
    m = modulation_order
    snr_lin = 10.0 ** (snr_db / 10.0)
    bits = math.log2(m)
    # Q(x) = erfc(x / sqrt 2) / 2
    arg = math.sqrt(3.0 * snr_lin / (m - 1.0))
    ber = (4.0 / bits) * (1.0 - 1.0 / math.sqrt(m)) * 0.5 * math.erfc(arg / math.sqrt(2.0))
    return min(max(ber, BER_FLOOR), BER_CEILING)


def throughput(mean_ber: float, cfg: CommConfig) -> float:
    """Average goodput (1 - BER) * D / T in bits per second."""
    if not 0.0 <= mean_ber <= 1.0:
        raise ValueError("mean_ber must be within [0, 1]")
    return (1.0 - mean_ber) * cfg.peak_rate


def cumulative_ber(trace) -> list:
    """Running mean of a per-slot BER trace."""
    trace = list(trace)
    if not trace:
        raise ValueError("BER trace must be non-empty")
    out = []
    acc = 0.0
    for i, v in enumerate(trace, start=1):
        acc += v
        out.append(acc / i)
    return out
