"""Propagation scene: mobile users, multipath, static clutter, radar returns.

The scene lives on the 2-D ground plane with the base station at the origin;
azimuth of a point (x, y) is atan2(x, y), measured from broadside.  A positive
range rate (target receding) maps to a positive Doppler shift
f = 2 * (dr/dt) * fc / c, and the slow-time phase of a return advances as
exp(+2j*pi*f*p*Tp) across packets.

Multipath components are modelled as virtual scatterers: a reflector at
azimuth phi_m with complex gain alpha_m returns radar energy through the
two-way beam pattern at phi_m and carries (attenuated) payload for its source
user when the transmit beam points at phi_m.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import accumulate_echo
from .ula import (
    SPEED_OF_LIGHT,
    ArrayConfig,
    BeamCodebook,
    codebook_weight_matrix,
    steering_vector,
    two_way_gain,
)
from .waveform import RadarWaveform


@dataclass(frozen=True)
class Scatterer:
    """Point scatterer: position/velocity on the ground plane, link amplitude.

    ``amplitude`` is the dimensionless complex link amplitude absorbing RCS,
    path loss and transmit power.
    """

    position: tuple
    velocity: tuple
    amplitude: complex

    def __post_init__(self):
        if self.range <= 0:
            raise ValueError("scatterer must be strictly away from the array")

    @property
    def range(self) -> float:
        x, y = self.position
        return float(np.hypot(x, y))

    @property
    def azimuth(self) -> float:
        x, y = self.position
        return float(np.arctan2(x, y))

    @property
    def range_rate(self) -> float:
        x, y = self.position
        vx, vy = self.velocity
        return (x * vx + y * vy) / self.range

    def doppler(self, carrier_frequency: float) -> float:
        return 2.0 * self.range_rate * carrier_frequency / SPEED_OF_LIGHT

    @property
    def delay(self) -> float:
        return 2.0 * self.range / SPEED_OF_LIGHT


@dataclass(frozen=True)
class MobileUser:
    """A communication user seen by the radar as one or more scatterers."""

    scatterers: tuple
    uid: str = "mu0"

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        if not self.scatterers:
            raise ValueError("a mobile user needs at least one scatterer")

    @property
    def total_power(self) -> float:
        return float(sum(abs(s.amplitude) ** 2 for s in self.scatterers))

    def centroid(self) -> np.ndarray:
        return np.mean([s.position for s in self.scatterers], axis=0)


@dataclass(frozen=True)
class MultipathComponent:
    """Indirect propagation path: delay, azimuth, Doppler and complex gain."""

    delay: float
    azimuth: float
    doppler: float
    gain: complex
    source_user: int = 0

    def __post_init__(self):
        if self.delay <= 0:
            raise ValueError("multipath delay must be positive")


@dataclass(frozen=True)
class ClutterScatterer:
    """Static reflector: identical geometry, identically zero Doppler."""

    delay: float
    azimuth: float
    amplitude: complex

    def __post_init__(self):
        if self.delay <= 0:
            raise ValueError("clutter delay must be positive")


@dataclass(frozen=True)
class Scene:
    users: tuple
    multipaths: tuple = ()
    clutter: tuple = ()
    radar_snr_db: float = 10.0
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "multipaths", tuple(self.multipaths))
        object.__setattr__(self, "clutter", tuple(self.clutter))

    def noise_variance(self, array_cfg: ArrayConfig) -> float:
        """Per-sample noise power.

        Calibrated so that a unit-amplitude scatterer dead on the beam centre
        has per-fast-time-sample SNR of ``radar_snr_db`` before any matched
        filter gain (the on-beam return amplitude is Q).
        """
        q = array_cfg.elements
        return q * q * 10.0 ** (-self.radar_snr_db / 10.0)


@dataclass(frozen=True)
class RadarDataCube:
    """Per-beam fast-time x slow-time samples, dimensions pinned by the waveform."""

    beam_index: int
    samples: np.ndarray

    @staticmethod
    def for_waveform(beam_index: int, waveform: RadarWaveform, samples: np.ndarray):
        expected = (waveform.n_fast, waveform.packets)
        if samples.shape != expected:
            raise ValueError(f"cube shape {samples.shape} != waveform {expected}")
        return RadarDataCube(beam_index=beam_index, samples=samples)


@dataclass
class SynthesisDiagnostics:
    """Counts returns dropped because their delay exceeds one PRI."""

    out_of_range: int = 0


def _echo_sources(scene: Scene, carrier_frequency: float):
    """Flatten the scene into (amplitude, azimuth, delay, doppler) tuples."""
    for user in scene.users:
        for s in user.scatterers:
            yield s.amplitude, s.azimuth, s.delay, s.doppler(carrier_frequency)
    for m in scene.multipaths:
        yield m.gain, m.azimuth, m.delay, m.doppler
    for c in scene.clutter:
        yield c.amplitude, c.azimuth, c.delay, 0.0


def synthesize_beam(
    scene: Scene,
    waveform: RadarWaveform,
    array_cfg: ArrayConfig,
    codebook: BeamCodebook,
    k: int,
    rng: np.random.Generator,
    diagnostics: SynthesisDiagnostics | None = None,
    dtype=np.complex128,
) -> RadarDataCube:
    """Simulate the received radar data cube for codebook beam ``k``.

    Every scene component contributes a delayed, Doppler-rotated copy of the
    transmit pulse scaled by its amplitude and the two-way beamforming factor
    toward its azimuth; circular complex Gaussian noise is added on top.
    Delays are quantized to the nearest fast-time bin.  Single-precision
    cubes (``dtype=np.complex64``) halve the synthesis and filtering cost
    and are plenty for dB-scale detection decisions.
    """
    if not 0 <= k < codebook.size:
        raise ValueError(f"beam index {k} outside codebook of {codebook.size}")
    n_fast = waveform.n_fast
    packets = waveform.packets
    cube = np.zeros((n_fast, packets), dtype=dtype)
    phi_k = codebook.angles[k]
    ts = waveform.sample_period
    p_idx = np.arange(packets)

    for amplitude, azimuth, delay, doppler in _echo_sources(
        scene, array_cfg.carrier_frequency
    ):
        start_bin = int(round(delay / ts))
        if start_bin >= n_fast:
            if diagnostics is not None:
                diagnostics.out_of_range += 1
            continue
        gain = two_way_gain(array_cfg, phi_k, azimuth)
        phases = np.exp(2j * np.pi * doppler * waveform.pri * p_idx)
        if waveform.alternate_pair or cube.dtype != np.complex128:
            scale = amplitude * gain
            for p in range(packets):
                seq = waveform.sequence_for_packet(p)
                stop = min(start_bin + len(seq), n_fast)
                cube[start_bin:stop, p] += (
                    scale * phases[p] * seq[: stop - start_bin]
                ).astype(dtype)
        else:
            accumulate_echo(
                cube,
                waveform.pair.a.astype(complex),
                start_bin,
                complex(amplitude * gain),
                phases,
            )

    variance = scene.noise_variance(array_cfg)
    if variance > 0:
        real_dtype = np.float32 if cube.dtype == np.complex64 else np.float64
        noise = rng.standard_normal((n_fast, 2 * packets), dtype=real_dtype)
        cube += real_dtype(np.sqrt(variance / 2.0)) * (
            noise[:, :packets] + 1j * noise[:, packets:]
        )
    return RadarDataCube.for_waveform(k, waveform, cube)


def advance(scene: Scene, dt: float) -> Scene:
    """Propagate every scatterer by its velocity; multipath stays as drawn."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return scene
    users = tuple(
        replace(
            user,
            scatterers=tuple(
                replace(
                    s,
                    position=(
                        s.position[0] + s.velocity[0] * dt,
                        s.position[1] + s.velocity[1] * dt,
                    ),
                )
                for s in user.scatterers
            ),
        )
        for user in scene.users
    )
    return replace(scene, users=users)


def beam_rolloff_powers(
    array_cfg: ArrayConfig,
    codebook: BeamCodebook,
    azimuths: np.ndarray,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """|w_k . u_phi|^2 / Q for every beam k and azimuth, normalized to 1 on beam."""
    if weights is None:
        weights = codebook_weight_matrix(array_cfg, codebook)
    q = np.arange(array_cfg.elements)
    u = np.exp(
        2j * np.pi * array_cfg.spacing * np.multiply.outer(q, np.sin(azimuths))
    )
    b = weights @ u
    return np.abs(b) ** 2 / array_cfg.elements


def downlink_snr_all(
    scene: Scene,
    array_cfg: ArrayConfig,
    codebook: BeamCodebook,
    comm_snr_db: float,
    user_elements: int | None = None,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """Effective downlink SNR in dB for every beam, serving its strongest user.

    Per user the served power on beam k sums the direct scatterer terms
    |sigma|^2 * rolloff(k, phi) with the user's multipath terms
    |alpha|^2 * rolloff(k, phi_m); the best user is served.  On top of the
    swept per-element SNR the two-sided array gain Q * Q' applies, so a
    beam aimed straight at a unit-amplitude user sees
    comm_snr_db + 10*log10(Q*Q').  Beams coupling to no user at all return
    -inf (no acknowledgment, no payload).
    """
    qp = array_cfg.elements if user_elements is None else user_elements
    azimuths = []
    owner = []
    powers = []
    for ui, user in enumerate(scene.users):
        for s in user.scatterers:
            azimuths.append(s.azimuth)
            owner.append(ui)
            powers.append(abs(s.amplitude) ** 2)
    for m in scene.multipaths:
        if not 0 <= m.source_user < len(scene.users):
            continue
        azimuths.append(m.azimuth)
        owner.append(m.source_user)
        powers.append(abs(m.gain) ** 2)
    if not azimuths:
        return np.full(codebook.size, -np.inf)

    rolloff = beam_rolloff_powers(
        array_cfg, codebook, np.asarray(azimuths), weights=weights
    )
    contrib = rolloff * np.asarray(powers)
    per_user = np.zeros((codebook.size, len(scene.users)))
    for col, ui in enumerate(owner):
        per_user[:, ui] += contrib[:, col]
    served = per_user.max(axis=1)
    out = np.full(codebook.size, -np.inf)
    nz = served > 0
    array_gain_db = 10.0 * np.log10(array_cfg.elements * qp)
    out[nz] = comm_snr_db + array_gain_db + 10.0 * np.log10(served[nz])
    return out


def downlink_snr(
    scene: Scene,
    array_cfg: ArrayConfig,
    codebook: BeamCodebook,
    k: int,
    comm_snr_db: float,
    user_elements: int | None = None,
) -> float:
    """Downlink SNR in dB on a single beam; -inf when no user couples to it."""
    if not 0 <= k < codebook.size:
        raise ValueError(f"beam index {k} outside codebook of {codebook.size}")
    return float(
        downlink_snr_all(scene, array_cfg, codebook, comm_snr_db, user_elements)[k]
    )


# ---------------------------------------------------------------------------
# scene builders
# ---------------------------------------------------------------------------

PEDESTRIAN_SCATTERERS = 27
PEDESTRIAN_BOX = (0.5, 1.8)   # metres, (across-track, along-range)
PEDESTRIAN_POWER = 1.0        # 0 dB relative RCS
CAR_SCATTERERS = 40
CAR_BOX = (4.5, 1.8)
CAR_POWER = 10.0              # 10 dB above the pedestrian


def make_point_user(position, velocity, amplitude=1.0 + 0j, uid="mu0") -> MobileUser:
    return MobileUser(
        scatterers=(Scatterer(tuple(position), tuple(velocity), amplitude),),
        uid=uid,
    )


def _make_cluster_user(position, velocity, count, box, total_power, rng, uid):
    x0, y0 = position
    offsets = rng.uniform(-0.5, 0.5, size=(count, 2)) * np.asarray(box)
    phases = rng.uniform(0.0, 2 * np.pi, size=count)
    mag = np.sqrt(total_power / count)
    scatterers = tuple(
        Scatterer(
            (x0 + dx, y0 + dy),
            tuple(velocity),
            mag * np.exp(1j * ph),
        )
        for (dx, dy), ph in zip(offsets, phases)
    )
    return MobileUser(scatterers=scatterers, uid=uid)


def make_pedestrian(position, velocity, rng, uid="ped0") -> MobileUser:
    """Walking pedestrian: a 27-point cluster at unit total power."""
    return _make_cluster_user(
        position, velocity, PEDESTRIAN_SCATTERERS, PEDESTRIAN_BOX,
        PEDESTRIAN_POWER, rng, uid,
    )


def make_car(position, velocity, rng, uid="car0") -> MobileUser:
    """Mid-size car: a 40-point cluster, 10 dB more total power."""
    return _make_cluster_user(
        position, velocity, CAR_SCATTERERS, CAR_BOX, CAR_POWER, rng, uid,
    )


def draw_multipaths(
    rng: np.random.Generator,
    count: int,
    source: MobileUser,
    source_index: int,
    fov_max: float,
    fd_max: float,
) -> tuple:
    """Random indirect paths coupled to ``source``.

    Azimuth is uniform over (most of) the field of view, Doppler uniform
    within the unambiguous band, delay a little beyond the direct path so
    the reflector stays at scene scale, and gain magnitude 0.1..0.5 of the
    user's link amplitude with uniform phase.
    """
    centroid = source.centroid()
    direct_delay = 2.0 * float(np.hypot(*centroid)) / SPEED_OF_LIGHT
    amp_ref = np.sqrt(source.total_power)
    out = []
    for _ in range(count):
        excess = rng.uniform(0.05, 1.2)
        out.append(
            MultipathComponent(
                delay=direct_delay * (1.0 + excess),
                azimuth=rng.uniform(-0.95 * fov_max, 0.95 * fov_max),
                doppler=rng.uniform(-0.9 * fd_max, 0.9 * fd_max),
                gain=amp_ref
                * rng.uniform(0.1, 0.5)
                * np.exp(1j * rng.uniform(0.0, 2 * np.pi)),
                source_user=source_index,
            )
        )
    return tuple(out)


def draw_clutter(
    rng: np.random.Generator,
    count: int,
    fov_max: float,
    range_lo: float = 8.0,
    range_hi: float = 40.0,
) -> tuple:
    """Random static reflectors comparable in strength to a point user."""
    out = []
    for _ in range(count):
        rng_m = rng.uniform(range_lo, range_hi)
        out.append(
            ClutterScatterer(
                delay=2.0 * rng_m / SPEED_OF_LIGHT,
                azimuth=rng.uniform(-0.9 * fov_max, 0.9 * fov_max),
                amplitude=rng.uniform(0.7, 1.4)
                * np.exp(1j * rng.uniform(0.0, 2 * np.pi)),
            )
        )
    return tuple(out)
