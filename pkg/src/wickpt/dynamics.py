"""Time integration of d(psi)/dt = -H psi - |psi|^2 psi and classification of the emitted power."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

from .lattice import Grid, OperatorMatrix, PotentialSpec, assemble_hamiltonian

log = logging.getLogger(__name__)

NOISE_FLOOR = 1e-12


class NonFiniteFieldError(FloatingPointError):
    pass


class InsufficientCyclesError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FieldState:
    psi: np.ndarray
    t: float = 0.0


@dataclass(frozen=True, eq=False)
class RunConfig:
    spec: PotentialSpec
    grid: Grid
    g0: float
    dt: float = 0.05
    t_end: float = 600.0
    noise_amp: float = 1e-3
    seed: int = 0
    record_stride: int | None = None  # default keeps >= 4000 power samples
    snapshot_stride: int | None = None  # default ~200 snapshots

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be at least one step")
        if not self.noise_amp > 0:
            raise ValueError("noise_amp must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True, eq=False)
class PowerTrace:
    times: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        if np.shape(self.times) != np.shape(self.power):
            raise ValueError("times and power differ in length")

    def __len__(self):
        return len(self.times)

    def window(self, transient_frac: float) -> "PowerTrace":
        start = int(np.floor(transient_frac * len(self)))
        return PowerTrace(self.times[start:], self.power[start:])


@dataclass(frozen=True)
class Stationary:
    power: float
    modulation_depth: float


@dataclass(frozen=True)
class Oscillatory:
    period: float
    modulation_depth: float
    mean_power: float


@dataclass(frozen=True)
class NotConverged:
    reason: str


EmissionClass = Stationary | Oscillatory | NotConverged


@dataclass(frozen=True, eq=False)
class Snapshots:
    times: np.ndarray
    intensity: np.ndarray  # (n_snapshots, n_points) of |psi|^2


def power(psi: np.ndarray, grid: Grid) -> float:
    return float(np.sum(np.abs(psi) ** 2) * grid.h)


def init_noise(grid: Grid, amp: float, seed: int) -> FieldState:
    if not amp > 0:
        raise ValueError("noise amplitude must be positive")
    rng = np.random.default_rng(seed)
    xi = rng.uniform(-1.0, 1.0, grid.n)
    zeta = rng.uniform(-1.0, 1.0, grid.n)
    return FieldState(amp * (xi + 1j * zeta), 0.0)


def saturate(psi: np.ndarray, tau: float) -> np.ndarray:
    """Exact flow of d(psi)/dt = -|psi|^2 psi over time tau (phase is frozen)."""
    return psi / np.sqrt(1.0 + 2.0 * tau * (psi.real**2 + psi.imag**2))


class CrankNicolson:
    """Linear substep (I + dt/2 H) psi_new = (I - dt/2 H) psi_old, factored once."""

    def __init__(self, op: OperatorMatrix, dt: float):
        self.op = op
        self.dt = dt
        half = 0.5 * dt
        self._d = 1.0 - half * op.diag
        self._lo = -half * op.lower
        self._up = -half * op.upper
        *self._factors, info = lapack.zgttrf(
            (half * op.lower).astype(complex),
            (1.0 + half * op.diag).astype(complex),
            (half * op.upper).astype(complex),
        )
        if info != 0:
            raise np.linalg.LinAlgError("Crank-Nicolson matrix is singular")

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        rhs = self._d * psi
        rhs[1:] += self._lo * psi[:-1]
        rhs[:-1] += self._up * psi[1:]
        out, _ = lapack.zgttrs(*self._factors, rhs)
        return out


def _strang(psi, cn: CrankNicolson, dt: float):
    psi = saturate(psi, 0.5 * dt)
    psi = cn(psi)
    return saturate(psi, 0.5 * dt)


def step(state: FieldState, op: OperatorMatrix, dt: float, propagator: CrankNicolson | None = None) -> FieldState:
    """One Strang step: half saturation, Crank-Nicolson linear step, half saturation."""
    cn = propagator if propagator is not None else CrankNicolson(op, dt)
    psi = _strang(state.psi, cn, dt)
    if not np.all(np.isfinite(psi)):
        raise NonFiniteFieldError(f"field became non-finite at t={state.t + dt:g}")
    return FieldState(psi, state.t + dt)


def evolve_field(state: FieldState, op: OperatorMatrix, dt: float, n_steps: int) -> FieldState:
    """Advance ``n_steps`` without recording anything."""
    cn = CrankNicolson(op, dt)
    psi = state.psi
    for _ in range(n_steps):
        psi = _strang(psi, cn, dt)
    if not np.all(np.isfinite(psi)):
        raise NonFiniteFieldError("field became non-finite")
    return FieldState(psi, state.t + n_steps * dt)


def evolve(cfg: RunConfig, initial: FieldState | None = None):
    """Run from seeded noise (or ``initial``) to ``cfg.t_end``.

    Returns ``(PowerTrace, final FieldState, Snapshots)``.
    """
    op = assemble_hamiltonian(cfg.spec, cfg.grid, cfg.g0)
    cn = CrankNicolson(op, cfg.dt)
    state = initial if initial is not None else init_noise(cfg.grid, cfg.noise_amp, cfg.seed)
    n = cfg.n_steps
    stride = cfg.record_stride or max(1, n // 4000)
    snap_stride = cfg.snapshot_stride or max(1, n // 200)
    h = cfg.grid.h
    psi = state.psi
    t0 = state.t
    times, powers = [t0], [float(np.sum(np.abs(psi) ** 2) * h)]
    s_times, s_rows = [t0], [np.abs(psi) ** 2]
    for i in range(1, n + 1):
        psi = _strang(psi, cn, cfg.dt)
        if i % stride == 0 or i % snap_stride == 0:
            intensity = psi.real**2 + psi.imag**2
            if not np.all(np.isfinite(intensity)):
                raise NonFiniteFieldError(f"field became non-finite at t={t0 + i * cfg.dt:g}")
            if i % stride == 0:
                times.append(t0 + i * cfg.dt)
                powers.append(float(intensity.sum() * h))
            if i % snap_stride == 0:
                s_times.append(t0 + i * cfg.dt)
                s_rows.append(intensity)
    if not np.all(np.isfinite(psi)):
        raise NonFiniteFieldError("field became non-finite")
    trace = PowerTrace(np.array(times), np.array(powers))
    snaps = Snapshots(np.array(s_times), np.array(s_rows))
    return trace, FieldState(psi, t0 + n * cfg.dt), snaps


def _upward_crossings(times: np.ndarray, values: np.ndarray, level: float) -> np.ndarray:
    below = values[:-1] < level
    above = values[1:] >= level
    idx = np.flatnonzero(below & above)
    v0, v1 = values[idx], values[idx + 1]
    frac = (level - v0) / (v1 - v0)
    return times[idx] + frac * (times[idx + 1] - times[idx])


def dominant_period(trace: PowerTrace, transient_frac: float = 0.5) -> tuple[float, float]:
    """Mean spacing of upward crossings of the post-transient mean, and its standard deviation."""
    w = trace.window(transient_frac)
    p = np.asarray(w.power, dtype=float)
    if p.size < 2:
        raise InsufficientCyclesError("trace too short")
    crossings = _upward_crossings(np.asarray(w.times, float), p, p.mean())
    if crossings.size < 3:
        raise InsufficientCyclesError(f"only {crossings.size} upward mean crossings")
    gaps = np.diff(crossings)
    return float(gaps.mean()), float(gaps.std())


def classify_emission(trace: PowerTrace, transient_frac: float = 0.5, depth_tol: float = 1e-3) -> EmissionClass:
    w = trace.window(transient_frac)
    if len(w) < 100:
        raise ValueError(f"need >= 100 post-transient samples, got {len(w)}")
    p = np.asarray(w.power, dtype=float)
    mean = float(p.mean())
    if not np.isfinite(mean) or mean < NOISE_FLOOR:
        return NotConverged("mean power below noise floor (laser below threshold)")
    depth = float((p.max() - p.min()) / mean)
    if depth < depth_tol:
        return Stationary(mean, depth)
    try:
        period, _ = dominant_period(trace, transient_frac)
    except InsufficientCyclesError:
        return NotConverged(f"modulation depth {depth:.3g} without repeated cycles")
    return Oscillatory(period, depth, mean)
