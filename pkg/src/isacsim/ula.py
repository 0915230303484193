"""Uniform linear array geometry: steering vectors, beam weights, codebook.

Azimuth is measured from array broadside, positive toward +x, so a scatterer
at position (x, y) sits at atan2(x, y).  With half-wavelength spacing the
steering vector is u[q] = exp(j*pi*q*sin(phi)).
"""

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class ArrayConfig:
    """Antenna count, element spacing (in wavelengths) and carrier."""

    elements: int
    carrier_frequency: float
    spacing: float = 0.5

    def __post_init__(self):
        if self.elements < 1:
            raise ValueError("array needs at least one element")
        if self.spacing <= 0:
            raise ValueError("element spacing must be positive")
        if self.carrier_frequency <= 0:
            raise ValueError("carrier frequency must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency


@dataclass(frozen=True)
class BeamCodebook:
    """Equally spaced analog beam directions covering a symmetric field of view."""

    angles: np.ndarray
    beamwidth: float

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        object.__setattr__(self, "angles", angles)
        if angles.size < 1:
            raise ValueError("codebook needs at least one beam")
        if angles.size > 1:
            steps = np.diff(angles)
            if np.any(steps <= 0):
                raise ValueError("beam angles must be strictly increasing")
            if np.max(np.abs(steps - self.beamwidth)) > 1e-12:
                raise ValueError("beam spacing must equal the beamwidth")

    @property
    def size(self) -> int:
        return self.angles.size


def steering_vector(cfg: ArrayConfig, phi: float) -> np.ndarray:
    """Array response u for a planar wave arriving from azimuth ``phi``."""
    q = np.arange(cfg.elements)
    return np.exp(2j * np.pi * cfg.spacing * q * np.sin(phi))


def beam_weights(cfg: ArrayConfig, phi_k: float) -> np.ndarray:
    """Unit-norm analog weights pointing the array at ``phi_k``."""
    u = steering_vector(cfg, phi_k)
    return np.conj(u) / np.sqrt(cfg.elements)


def two_way_gain(cfg: ArrayConfig, phi_k: float, phi_target: float) -> complex:
    """Monostatic TX+RX beamforming factor (w.u)(u.w) for one scatterer.

    Real-valued Q when the beam points straight at the target; bounded by Q
    in magnitude everywhere.
    """
    w = beam_weights(cfg, phi_k)
    u = steering_vector(cfg, phi_target)
    wu = w @ u
    return wu * wu


def make_codebook(fov_max: float, count: int) -> BeamCodebook:
    """K equally spaced beams over [-fov_max, +fov_max].

    For a single beam the codebook degenerates to broadside with the full
    field of view as its width.
    """
    if count < 1:
        raise ValueError("beam count must be at least 1")
    if not 0 < fov_max < np.pi / 2:
        raise ValueError("fov_max must be in (0, pi/2)")
    if count == 1:
        return BeamCodebook(angles=np.array([0.0]), beamwidth=2 * fov_max)
    angles = np.linspace(-fov_max, fov_max, count)
    return BeamCodebook(angles=angles, beamwidth=2 * fov_max / (count - 1))


def codebook_weight_matrix(cfg: ArrayConfig, codebook: BeamCodebook) -> np.ndarray:
    """K x Q matrix stacking beam_weights for every codebook angle."""
    q = np.arange(cfg.elements)
    phases = np.multiply.outer(np.sin(codebook.angles), q)
    return np.exp(-2j * np.pi * cfg.spacing * phases) / np.sqrt(cfg.elements)
