"""Radar signal processing: pulse compression, detection, Doppler, pruning.

The per-beam chain is matched filter -> peak-to-sidelobe detection ->
subspace Doppler estimation, after which beams carrying only static returns
are dropped and a beam-exit forecast is produced for the survivors.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from ._kernels import jacobi_eigh, music_spectrum
from .scene import RadarDataCube
from .waveform import GolayPair

DEFAULT_THRESHOLD_DB = 13.0
DETECT_GUARD_BINS = 3
# Strongest RS-512 correlation sidelobe sits 19.7 dB below the peak; anything
# inside the correlation span and below this cut is treated as that peak's
# own sidelobe, not a separate target.
SIDELOBE_MASK_DB = 18.0
PSLR_GUARD_BINS = 4


@dataclass(frozen=True)
class RangeProfileSet:
    """Matched-filter output for one beam: range bins x packets."""

    beam_index: int
    profiles: np.ndarray
    sample_period: float
    pulse_length: int

    @property
    def n_bins(self) -> int:
        return self.profiles.shape[0]

    @property
    def packets(self) -> int:
        return self.profiles.shape[1]


@dataclass(frozen=True)
class Detection:
    """One detected return: where it is, how strong, how fast."""

    beam_index: int
    range_bin: int
    range: float
    amplitude: float
    pslr: float
    doppler: float
    velocity: float


@dataclass(frozen=True)
class MusicConfig:
    """Doppler search grid and assumed signal-subspace rank."""

    fd_max: float = 4000.0
    fd_step: float = 400.0
    signal_rank: int = 1

    def __post_init__(self):
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")
        if self.fd_max <= 0:
            raise ValueError("fd_max must be positive")
        if self.signal_rank < 1:
            raise ValueError("signal_rank must be at least 1")

    def grid(self) -> np.ndarray:
        n = int(round(self.fd_max / self.fd_step))
        return self.fd_step * np.arange(-n, n + 1, dtype=float)


@dataclass(frozen=True)
class SelectionConfig:
    """Knobs for pruning the beam set down to likely mobile users."""

    v_static: float = 0.5
    subset_cap: int = 8
    range_cull_fraction: float = 0.9
    amp_cull_margin_db: float = 3.0
    threshold_db: float = DEFAULT_THRESHOLD_DB
    max_unambiguous_range: float = float("inf")


@dataclass(frozen=True)
class BeamSubset:
    """Pruned beam indices (ascending) with their mobile detections."""

    indices: tuple
    detections: dict

    def __len__(self):
        return len(self.indices)


def matched_filter(
    cube: RadarDataCube, pair: GolayPair, alternate: bool = False,
    sample_period: float = 1.0,
) -> RangeProfileSet:
    """Correlate each packet's fast-time samples with the transmit sequence.

    Computed as FFT-domain multiplication with the conjugated sequence
    spectrum, zero-padded to the next power of two at or above twice the
    fast-time length, scaled by 1/N; output bin n corresponds to round-trip
    delay n*Ts.
    """
    samples = cube.samples
    n_fast, packets = samples.shape
    n = pair.length
    if n_fast < n:
        raise ValueError("fast-time axis shorter than the Golay sequence")
    nfft = 1 << (2 * n_fast - 1).bit_length()
    spec = sp_fft.fft(samples, nfft, axis=0)
    if alternate:
        ga = np.conj(sp_fft.fft(pair.a, nfft))
        gb = np.conj(sp_fft.fft(pair.b, nfft))
        for p in range(packets):
            spec[:, p] *= gb if p % 2 == 1 else ga
    else:
        spec *= np.conj(sp_fft.fft(pair.a, nfft))[:, None]
    corr = sp_fft.ifft(spec, axis=0)[:n_fast] / n
    return RangeProfileSet(
        beam_index=cube.beam_index,
        profiles=corr,
        sample_period=sample_period,
        pulse_length=n,
    )


def noncoherent_profile(profiles: RangeProfileSet) -> np.ndarray:
    """Packet-averaged power per range bin."""
    return np.mean(np.abs(profiles.profiles) ** 2, axis=1)


def coherent_profile(profiles: RangeProfileSet) -> np.ndarray:
    """Magnitude of the packet-coherent mean; integrates static returns."""
    return np.abs(np.mean(profiles.profiles, axis=1))


def pslr_db(amplitude_profile: np.ndarray, guard: int = PSLR_GUARD_BINS) -> float:
    """Figure-style peak-to-sidelobe ratio of an amplitude profile.

    Ratio of the peak amplitude to the median amplitude outside a guard
    around the peak, in decilog units: 10*log10(peak/median).  A matched
    noiseless length-N Golay correlation reads 10*log10(N).
    """
    prof = np.asarray(amplitude_profile, dtype=float)
    if prof.ndim != 1 or prof.size <= 2 * guard + 1:
        raise ValueError("profile too short for the PSLR guard")
    peak = int(np.argmax(prof))
    mask = np.ones(prof.size, dtype=bool)
    mask[max(0, peak - guard): peak + guard + 1] = False
    floor = float(np.median(prof[mask]))
    if floor <= 0:
        return math.inf
    return 10.0 * math.log10(prof[peak] / floor)


def detect(
    profiles: RangeProfileSet,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
    guard: int = DETECT_GUARD_BINS,
) -> list:
    """Find target peaks in the noncoherently integrated range profile.

    A local maximum is reported when its power clears the median sidelobe
    power (outside a +-guard window around it) by ``threshold_db``.  Weaker
    local maxima inside a stronger detection's correlation span are treated
    as that detection's own sidelobes unless they come within
    ``SIDELOBE_MASK_DB`` of it.  Returns (range_bin, amplitude, pslr_db)
    tuples, strongest first.
    """
    if threshold_db <= 0:
        raise ValueError("threshold_db must be positive")
    z = noncoherent_profile(profiles)
    n = z.size
    if n < 3:
        return []
    interior = z[1:-1]
    local = np.flatnonzero((interior > z[:-2]) & (interior >= z[2:])) + 1
    if z[0] > z[1]:
        local = np.concatenate([[0], local])
    if z[-1] > z[-2]:
        local = np.concatenate([local, [n - 1]])
    if local.size == 0:
        return []
    # cheap prefilter against the global median before exact per-peak stats
    gross_floor = float(np.median(z))
    thr_lin = 10.0 ** (threshold_db / 10.0)
    cand = local[z[local] > gross_floor * thr_lin * 0.5]
    cand = cand[np.argsort(z[cand])[::-1]]

    results = []
    mask_lin = 10.0 ** (-SIDELOBE_MASK_DB / 10.0)
    span = profiles.pulse_length
    for idx in cand:
        shadowed = any(
            abs(idx - r_bin) < span and z[idx] < z[r_bin] * mask_lin
            for r_bin, _, _ in results
        )
        if shadowed:
            continue
        sel = np.ones(n, dtype=bool)
        sel[max(0, idx - guard): idx + guard + 1] = False
        floor = float(np.median(z[sel]))
        if floor <= 0:
            ratio_db = math.inf
        else:
            ratio_db = 10.0 * math.log10(z[idx] / floor)
        if ratio_db >= threshold_db:
            results.append((int(idx), float(np.sqrt(z[idx])), float(ratio_db)))
    return results


def noise_projector(y: np.ndarray, rank: int) -> np.ndarray:
    """Projector onto the noise subspace of the snapshot autocorrelation.

    Forms R = y y^H and removes the span of the top ``rank`` eigenvectors.
    With rank 1 this reduces analytically to I - y y^H / ||y||^2; higher
    ranks go through the Hermitian Jacobi eigensolver.
    """
    y = np.asarray(y, dtype=complex)
    p = y.size
    if not 1 <= rank < p:
        raise ValueError("rank must satisfy 1 <= rank < len(y)")
    energy = np.vdot(y, y).real
    if energy <= 0:
        raise ValueError("snapshot has zero energy")
    if rank == 1:
        return np.eye(p, dtype=complex) - np.outer(y, np.conj(y)) / energy
    r = np.outer(y, np.conj(y))
    _, vecs = jacobi_eigh(np.ascontiguousarray(r))
    sig = vecs[:, :rank]
    return np.eye(p, dtype=complex) - sig @ sig.conj().T


def music_doppler(
    profiles: RangeProfileSet,
    range_bin: int,
    cfg: MusicConfig,
    pri: float,
) -> tuple:
    """Doppler frequency of the return in one range bin via the pseudo-spectrum.

    The slow-time snapshot across packets is projected onto the noise
    subspace; the pseudo-spectrum 1/(e^H P e) peaks where the Doppler probe
    aligns with the signal.  Returns (f_hat, spectrum) with ties broken
    toward smaller |f|.
    """
    if not 0 <= range_bin < profiles.n_bins:
        raise ValueError(f"range_bin {range_bin} outside profile")
    if cfg.fd_max > 1.0 / (2.0 * pri) * (1 + 1e-12):
        raise ValueError("fd_max exceeds the unambiguous Doppler band 1/(2*pri)")
    y = np.ascontiguousarray(profiles.profiles[range_bin, :])
    proj = np.ascontiguousarray(noise_projector(y, cfg.signal_rank))
    freqs = cfg.grid()
    spectrum = np.asarray(music_spectrum(proj, freqs, pri))
    best = spectrum.max()
    ties = np.flatnonzero(spectrum == best)
    pick = ties[np.lexsort((freqs[ties], np.abs(freqs[ties])))[0]]
    return float(freqs[pick]), spectrum


def process_cube(
    profiles: RangeProfileSet,
    music_cfg: MusicConfig,
    pri: float,
    wavelength: float,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
) -> list:
    """Detect peaks in one beam's profiles and attach Doppler estimates."""
    out = []
    for range_bin, amplitude, ratio_db in detect(profiles, threshold_db):
        f_hat, _ = music_doppler(profiles, range_bin, music_cfg, pri)
        out.append(
            Detection(
                beam_index=profiles.beam_index,
                range_bin=range_bin,
                range=range_bin * profiles.sample_period * 299_792_458.0 / 2.0,
                amplitude=amplitude,
                pslr=ratio_db,
                doppler=f_hat,
                velocity=f_hat * wavelength / 2.0,
            )
        )
    return out


def select_beams(per_beam_detections: dict, cfg: SelectionConfig) -> BeamSubset:
    """Prune the codebook to beams showing at least one mobile detection.

    Static-only beams are clutter and never enter the subset.  When the
    survivor list is larger than the cap, far-range marginal-strength beams
    (long multipath bounces) are culled.
    """
    mobile = {}
    for k in sorted(per_beam_detections):
        dets = [
            d for d in per_beam_detections[k] if abs(d.velocity) >= cfg.v_static
        ]
        if dets:
            mobile[k] = sorted(dets, key=lambda d: d.amplitude, reverse=True)
    if len(mobile) > cfg.subset_cap:
        for k in list(mobile):
            strongest = mobile[k][0]
            far = strongest.range > cfg.range_cull_fraction * cfg.max_unambiguous_range
            weak = strongest.pslr < cfg.threshold_db + cfg.amp_cull_margin_db
            if far and weak and len(mobile) > cfg.subset_cap:
                del mobile[k]
    indices = tuple(sorted(mobile))
    return BeamSubset(indices=indices, detections=mobile)


class SnrDropTracker:
    """Watches the served link SNR for a sustained fall below its peak.

    Smooths the per-slot SNR with an exponential moving average and flags
    when the smoothed value drops ``drop_db`` below its running maximum,
    which is the signature of the user leaving the beam.
    """

    def __init__(self, drop_db: float = 3.0, alpha: float = 0.6):
        self.drop_db = drop_db
        self.alpha = alpha
        self.smoothed = None
        self.peak = -math.inf
        self.dropped = False

    def observe(self, snr_db: float) -> bool:
        if not math.isfinite(snr_db):
            snr_db = -300.0
        if self.smoothed is None:
            self.smoothed = snr_db
        else:
            self.smoothed += self.alpha * (snr_db - self.smoothed)
        self.peak = max(self.peak, self.smoothed)
        if self.smoothed < self.peak - self.drop_db:
            self.dropped = True
        return self.dropped

    def seconds_to_drop(self) -> float:
        """Forecast horizon from the SNR track: infinite until the drop lands."""
        return 0.0 if self.dropped else math.inf


def estimate_t_infinity(
    det: Detection,
    beam_angle: float,
    beamwidth: float,
    snr_track: SnrDropTracker | None = None,
    slot_period: float = 0.004,
) -> float:
    """Forecast seconds until the detected user exits the serving beam.

    Geometry part: a laterally moving target at range r crosses a beam of
    width dphi in r*dphi / (v*cos(phi)) seconds.  The SNR track supplies the
    reactive bound; the lower of the two wins, floored at one slot.
    """
    speed = abs(det.velocity)
    if speed == 0:
        raise ValueError("t-infinity is undefined for a static detection")
    t_geom = det.range * beamwidth / (speed * math.cos(beam_angle))
    t_snr = snr_track.seconds_to_drop() if snr_track is not None else math.inf
    return max(min(t_geom, t_snr), slot_period)


def write_profile_csv(profiles: RangeProfileSet, path) -> None:
    """Debug dump: integrated range profile as (bin, magnitude) rows."""
    z = np.sqrt(noncoherent_profile(profiles))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin,magnitude\n")
        for i, v in enumerate(z):
            fh.write(f"{i},{v:.9g}\n")


def write_spectrum_csv(freqs: np.ndarray, spectrum: np.ndarray, path) -> None:
    """Debug dump: MUSIC pseudo-spectrum as (frequency_hz, value) rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frequency_hz,pseudo_spectrum\n")
        for f, s in zip(freqs, spectrum):
            fh.write(f"{f:.9g},{s:.9g}\n")
