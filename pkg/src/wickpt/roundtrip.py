"""Resonator round-trip map and the physical-unit chain.

One round trip is P = exp(g) r(x) K with the Huygens propagator of the
self-imaging cavity acting as the Gaussian spectral filter K = exp(D d2/dx2).
In normalized units (x = X/L, L = sqrt(D)) the filter strength is D_norm = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.constants import c as SPEED_OF_LIGHT

from .lattice import Grid, MirrorProfile, PotentialSpec, SquireWell, evaluate_potential

PAD_FRACTION = 0.25
LEAK_WARN = 1e-8


@dataclass(frozen=True)
class PhysicalConfig:
    wavelength: float  # m
    focal_length: float  # m
    aperture_size: float  # Gaussian aperture w_a, m
    cavity_length: float  # 4f + d, m

    def __post_init__(self):
        for name in ("wavelength", "focal_length", "aperture_size", "cavity_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


HENE = PhysicalConfig(633e-9, 0.10, 250e-6, 0.60)


@dataclass(frozen=True)
class DerivedScales:
    D: float  # m^2
    L: float  # m
    T_R: float  # s
    theta: float  # 1/m


def derived_scales(cfg: PhysicalConfig) -> DerivedScales:
    D = 2.0 * (cfg.wavelength * cfg.focal_length / (2.0 * math.pi * cfg.aperture_size)) ** 2
    return DerivedScales(
        D=D,
        L=math.sqrt(D),
        T_R=2.0 * cfg.cavity_length / SPEED_OF_LIGHT,
        theta=cfg.wavelength / (math.pi * cfg.aperture_size**2),
    )


def tilt_to_gamma(alpha: float, cfg: PhysicalConfig) -> float:
    return 2.0 * math.pi / cfg.wavelength * alpha * derived_scales(cfg).L


def gamma_to_tilt(gamma: float, cfg: PhysicalConfig) -> float:
    return gamma * cfg.wavelength / (2.0 * math.pi * derived_scales(cfg).L)


def aperture_width(u: float, cfg: PhysicalConfig) -> float:
    """Physical mirror aperture 2a = 2uL."""
    return 2.0 * u * derived_scales(cfg).L


def units_report(cfg: PhysicalConfig, gammas: dict[str, float] | None = None, u: float | None = None) -> dict:
    s = derived_scales(cfg)
    out = {
        "inputs": {
            "wavelength_m": cfg.wavelength,
            "focal_length_m": cfg.focal_length,
            "aperture_size_m": cfg.aperture_size,
            "cavity_length_m": cfg.cavity_length,
        },
        "D_m2": s.D,
        "L_m": s.L,
        "T_R_s": s.T_R,
        "theta_per_m": s.theta,
        "tilt": {name: {"gamma": g, "alpha_rad": gamma_to_tilt(g, cfg)} for name, g in (gammas or {}).items()},
    }
    if u is not None:
        out["aperture_2a_m"] = aperture_width(u, cfg)
    return out


# --- propagation ------------------------------------------------------------


def _pad_width(n: int) -> int:
    return max(1, int(math.ceil(PAD_FRACTION * n)))


def huygens_filter(psi, D_norm: float, h: float, boundary: str = "open", return_leak: bool = False):
    """Apply exp(D_norm d2/dx2) as a Fourier filter exp(-D_norm k^2).

    ``boundary="open"`` zero-pads the field by 25% on each side before the FFT;
    ``boundary="wall"`` uses the sine transform, i.e. the field vanishes at the
    grid ends (hard aperture). In open mode a warning is issued when energy
    reaches the outer half of the padding, where it would wrap around.
    """
    psi = np.asarray(psi, dtype=complex)
    n = psi.size
    if D_norm == 0:
        return (psi.copy(), 0.0) if return_leak else psi.copy()
    if boundary == "wall":
        k = np.arange(1, n + 1) * math.pi / ((n + 1) * h)
        out = sfft.idst(np.exp(-D_norm * k**2) * sfft.dst(psi, type=1), type=1)
        return (out, 0.0) if return_leak else out
    if boundary != "open":
        raise ValueError(f"unknown boundary {boundary!r}")
    pad = _pad_width(n)
    big = np.zeros(n + 2 * pad, dtype=complex)
    big[pad : pad + n] = psi
    k = 2.0 * math.pi * sfft.fftfreq(big.size, d=h)
    big = sfft.ifft(np.exp(-D_norm * k**2) * sfft.fft(big))
    q = pad // 2
    edge = np.concatenate((big[:q], big[big.size - q :]))
    total = np.sum(np.abs(big) ** 2)
    leak = float(np.sum(np.abs(edge) ** 2) / total) if total > 0 else 0.0
    if leak > LEAK_WARN:
        warnings.warn(f"field energy fraction {leak:.2e} reached the FFT padding", RuntimeWarning, stacklevel=2)
    out = big[pad : pad + n]
    return (out, leak) if return_leak else out


@dataclass(frozen=True, eq=False)
class RoundTripOperator:
    g: float
    r_profile: np.ndarray
    D_norm: float
    grid: Grid
    boundary: str = "open"  # "wall" for a hard-edged aperture at the grid ends

    def __post_init__(self):
        r = np.asarray(self.r_profile, dtype=complex)
        if r.shape != (self.grid.n,):
            raise ValueError("mirror samples and grid differ in length")
        if np.any(np.abs(r) > 1 + 1e-12):
            raise ValueError("passive mirror needs |r| <= 1; gain belongs in g")
        object.__setattr__(self, "r_profile", r)

    @classmethod
    def from_potential(cls, spec: PotentialSpec, grid: Grid, g: float, D_norm: float = 1.0) -> "RoundTripOperator":
        """Mirror r = exp(-V); a SquireWell becomes a hard aperture at its walls."""
        v = evaluate_potential(spec, grid)
        boundary = "wall" if isinstance(spec, SquireWell) else "open"
        return cls(g, np.exp(-v), D_norm, grid, boundary)

    def scaled(self, s: float) -> "RoundTripOperator":
        """Shrink g, ln r and D uniformly by ``s``."""
        return RoundTripOperator(self.g * s, np.exp(s * np.log(self.r_profile)), self.D_norm * s, self.grid, self.boundary)


def round_trip(psi, op: RoundTripOperator) -> np.ndarray:
    out = huygens_filter(psi, op.D_norm, op.grid.h, op.boundary)
    return math.exp(op.g) * op.r_profile * out


def growth_factor(op: RoundTripOperator, n_iter: int = 400, seed: int = 0) -> float:
    """Asymptotic per-round-trip amplitude growth |lambda_max| by power iteration from noise."""
    rng = np.random.default_rng(seed)
    psi = rng.uniform(-1, 1, op.grid.n) + 1j * rng.uniform(-1, 1, op.grid.n)
    ratio = float("nan")
    for _ in range(n_iter):
        nxt = round_trip(psi, op)
        ratio = np.linalg.norm(nxt) / np.linalg.norm(psi)
        psi = nxt / np.linalg.norm(nxt)
    return float(ratio)


def filter_generator(grid: Grid, boundary: str) -> np.ndarray:
    """Dense matrix of the d2/dx2 whose exponential is the Fourier filter on this grid."""
    n = grid.n
    if boundary == "wall":
        k = np.arange(1, n + 1) * math.pi / ((n + 1) * grid.h)
        s = sfft.dst(np.eye(n), type=1, axis=0, norm="ortho")
        return s @ np.diag(-(k**2)) @ s
    pad = _pad_width(n)
    big = n + 2 * pad
    k = 2.0 * math.pi * sfft.fftfreq(big, d=grid.h)
    f = sfft.fft(np.eye(big), axis=0)
    lap = sfft.ifft(-(k**2)[:, None] * f, axis=0).real
    return lap[pad : pad + n, pad : pad + n]


def continuous_generator(op: RoundTripOperator) -> np.ndarray:
    """g + ln r(x) + D d2/dx2 as a dense matrix (the round-trip generator without BCH corrections)."""
    return np.diag(op.g + np.log(op.r_profile)) + op.D_norm * filter_generator(op.grid, op.boundary)


def expm_apply(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """exp(a) v through the eigendecomposition of ``a``."""
    w, vecs = np.linalg.eig(a)
    return vecs @ (np.exp(w) * np.linalg.solve(vecs, v))


@dataclass(frozen=True)
class BCHReport:
    scales: tuple[float, ...]
    errors: tuple[float, ...]

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(a / b for a, b in zip(self.errors[:-1], self.errors[1:]))


def bch_consistency(psi, op: RoundTripOperator, scales=(1.0, 0.5, 0.25)) -> BCHReport:
    """Discrepancy between one round trip and exp(g + ln r + D d2/dx2), under uniform shrinking."""
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    errors = []
    for s in scales:
        sop = op.scaled(s)
        exact = expm_apply(continuous_generator(sop), psi)
        errors.append(float(np.linalg.norm(round_trip(psi, sop) - exact) / nrm))
    return BCHReport(tuple(scales), tuple(errors))


def mirror_from_potential(v: np.ndarray) -> MirrorProfile:
    """Reflectance and phase samples realizing a potential, r = exp(-V)."""
    r = np.exp(-np.asarray(v))
    return MirrorProfile(np.abs(r) ** 2, np.angle(r))
