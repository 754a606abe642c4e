"""Time integrators for the cubic half-wave and Szego equations.

Half-wave, (i d_t - |D_x|) u = |u|^2 u, is stepped by Strang splitting in
which both substeps are exact flows:

  * linear half step: mode k is multiplied by e^{-i (dt/2) |k|};
  * nonlinear step:   u(x) <- e^{-i dt |u(x)|^2} u(x) pointwise on the
    collocation grid (|u| is invariant under this flow, so the substep is
    the exact solution of i u_t = |u|^2 u at each grid node).

The composition is second order in dt and conserves the grid mass exactly,
which is why splitting is preferred over Runge-Kutta for the long eps
sweeps.  During `evolve` the state is kept on the enlarged dealiased grid
across steps (truncating back to the caller's band only for observers and
the final output), so mass conservation is unconditional; the stateless
`step_half_wave` truncates each step, discarding only the tail beyond the
input band.

Szego, i d_t V = P_{>=0}(V |V|^2), has no linear part, so there is nothing
to split; it is stepped with classical 4-stage Runge-Kutta on the projected,
dealiased spectral right side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .series import NormSeries
from .spectral_core import (
    SpectralField,
    cubic_term,
    dealias_points,
    project_nonneg,
)

BLOWUP_FACTOR = 1e6


class Scheme(enum.Enum):
    STRANG_SPLIT = "strang"
    RK4_SPECTRAL = "rk4"


class Equation(enum.Enum):
    HALF_WAVE = "half_wave"
    SZEGO = "szego"


class BlowUpError(RuntimeError):
    """Raised when a trajectory's L2 norm exceeds BLOWUP_FACTOR times its start."""


@dataclass(frozen=True)
class EvolverConfig:
    max_mode: int
    dt: float
    t_end: float
    scheme: Scheme = Scheme.STRANG_SPLIT
    dealias: bool = True
    record_every: int = 1

    def __post_init__(self):
        if self.max_mode < 1:
            raise ValueError(f"max_mode must be >= 1, got {self.max_mode}")
        if self.dt <= 0.0 or self.t_end <= 0.0 or self.dt > self.t_end:
            raise ValueError(f"need 0 < dt <= t_end, got dt={self.dt}, t_end={self.t_end}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")


@dataclass(frozen=True)
class ConservedSnapshot:
    t: float
    mass: float
    momentum: float
    hw_energy: float
    szego_energy: float

    def __post_init__(self):
        vals = (self.t, self.mass, self.momentum, self.hw_energy, self.szego_energy)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"non-finite snapshot: {vals}")
        if self.mass < 0.0:
            raise ValueError(f"negative mass {self.mass}")


def _time_grid(dt: float, t_end: float) -> np.ndarray:
    """Step sizes landing exactly on t_end; the final step is shortened."""
    n_full = int(math.floor(t_end / dt + 1e-12))
    rest = t_end - n_full * dt
    steps = [dt] * n_full
    if rest > 1e-12 * dt:
        steps.append(rest)
    return np.asarray(steps)


class HalfWaveStepper:
    """Spectral split-step machinery on a fixed dealiased grid."""

    def __init__(self, max_mode: int, dealias: bool = True):
        self.max_mode = max_mode
        self.n_points = dealias_points(max_mode) if dealias else sfft.next_fast_len(2 * max_mode + 1)
        self.grid_modes = sfft.fftfreq(self.n_points, 1.0 / self.n_points).astype(np.int64)
        self.abs_modes = np.abs(self.grid_modes).astype(np.float64)

    def lift(self, f: SpectralField) -> np.ndarray:
        """Spectral state on the internal grid (fft ordering)."""
        if f.max_mode > (self.n_points - 1) // 2:
            raise ValueError("field does not fit on the stepper grid")
        state = np.zeros(self.n_points, dtype=np.complex128)
        state[f.modes % self.n_points] = f.coeffs
        return state

    def restrict(self, state: np.ndarray, max_mode: int | None = None) -> SpectralField:
        K = max_mode if max_mode is not None else self.max_mode
        k = np.arange(-K, K + 1)
        return SpectralField(state[k % self.n_points], K)

    def grid_values(self, state: np.ndarray) -> np.ndarray:
        return sfft.ifft(state, norm="forward")

    def step_strang(self, state: np.ndarray, dt: float) -> np.ndarray:
        state = state * np.exp(-0.5j * dt * self.abs_modes)
        u = sfft.ifft(state, norm="forward")
        u *= np.exp(-1j * dt * np.abs(u) ** 2)
        state = sfft.fft(u, norm="forward")
        return state * np.exp(-0.5j * dt * self.abs_modes)

    def _rhs(self, state: np.ndarray) -> np.ndarray:
        u = sfft.ifft(state, norm="forward")
        return -1j * (self.abs_modes * state + sfft.fft(u * np.abs(u) ** 2, norm="forward"))

    def step_rk4(self, state: np.ndarray, dt: float) -> np.ndarray:
        k1 = self._rhs(state)
        k2 = self._rhs(state + 0.5 * dt * k1)
        k3 = self._rhs(state + 0.5 * dt * k2)
        k4 = self._rhs(state + dt * k3)
        return state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def step(self, state: np.ndarray, dt: float, scheme: Scheme = Scheme.STRANG_SPLIT) -> np.ndarray:
        if scheme is Scheme.STRANG_SPLIT:
            return self.step_strang(state, dt)
        return self.step_rk4(state, dt)

    def conserved(self, t: float, state: np.ndarray) -> ConservedSnapshot:
        u = self.grid_values(state)
        quartic = 0.25 * float(np.mean(np.abs(u) ** 4))
        return ConservedSnapshot(
            t=t,
            mass=float(np.sum(np.abs(state) ** 2)),
            momentum=float(np.sum(self.grid_modes * np.abs(state) ** 2)),
            hw_energy=0.5 * float(np.sum(self.abs_modes * np.abs(state) ** 2)) + quartic,
            szego_energy=quartic,
        )


def step_half_wave(u: SpectralField, dt: float) -> SpectralField:
    """One Strang step; the result is truncated back to the input band."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    stepper = HalfWaveStepper(u.max_mode)
    return stepper.restrict(stepper.step_strang(stepper.lift(u), dt))


NEG_CONTENT_TOL = 1e-12


def _szego_rhs(V: SpectralField) -> SpectralField:
    return -1j * project_nonneg(cubic_term(V, V, V))


def step_szego(V: SpectralField, dt: float) -> SpectralField:
    """One classical RK4 step of i V_t = P_{>=0}(V |V|^2); support k >= 0 is preserved."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    neg = np.max(np.abs(V.coeffs[: V.max_mode])) if V.max_mode > 0 else 0.0
    if neg > NEG_CONTENT_TOL:
        raise ValueError(f"negative-mode content {neg:.3e} exceeds {NEG_CONTENT_TOL:g}")
    k1 = _szego_rhs(V)
    k2 = _szego_rhs(V + 0.5 * dt * k1)
    k3 = _szego_rhs(V + 0.5 * dt * k2)
    k4 = _szego_rhs(V + dt * k3)
    return V + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _szego_snapshot(t: float, V: SpectralField) -> ConservedSnapshot:
    k = V.modes.astype(np.float64)
    moduli = np.abs(V.coeffs) ** 2
    quartic = 0.25 * float(np.mean(np.abs(V.values(dealias_points(V.max_mode))) ** 4))
    return ConservedSnapshot(
        t=t,
        mass=float(np.sum(moduli)),
        momentum=float(np.sum(k * moduli)),
        hw_energy=0.5 * float(np.sum(np.abs(k) * moduli)) + quartic,
        szego_energy=quartic,
    )


def evolve(
    u0: SpectralField,
    cfg: EvolverConfig,
    equation: Equation,
    observers: dict | None = None,
) -> tuple[SpectralField, NormSeries, list[ConservedSnapshot]]:
    """Deterministic trajectory with snapshots every `record_every` steps.

    `observers` maps a column name to a callable (t, field) -> float; the
    field handed to observers is the state truncated to cfg.max_mode.  The
    final time lands exactly on t_end (last step shortened).  Aborts with
    BlowUpError if the L2 norm exceeds 1e6 times its initial value.
    """
    observers = observers or {}
    steps = _time_grid(cfg.dt, cfg.t_end)
    times: list[float] = []
    columns: dict[str, list[float]] = {name: [] for name in observers}
    snapshots: list[ConservedSnapshot] = []

    if equation is Equation.SZEGO:
        if cfg.scheme is not Scheme.RK4_SPECTRAL:
            raise ValueError("the Szego equation has no linear part to split; use RK4_SPECTRAL")
        V = u0.embed(max(cfg.max_mode, u0.max_mode)).truncate(cfg.max_mode)

        def record(t, V):
            times.append(t)
            snapshots.append(_szego_snapshot(t, V))
            for name, fn in observers.items():
                columns[name].append(float(fn(t, V)))

        m0 = math.sqrt(float(np.sum(np.abs(V.coeffs) ** 2)))
        record(0.0, V)
        t = 0.0
        for i, h in enumerate(steps):
            V = step_szego(V, h)
            t = cfg.t_end if i == len(steps) - 1 else t + h
            m = math.sqrt(float(np.sum(np.abs(V.coeffs) ** 2)))
            if m > BLOWUP_FACTOR * m0:
                raise BlowUpError(f"L2 norm {m:.3e} exceeded {BLOWUP_FACTOR:g} x initial at t={t:.6g}")
            if (i + 1) % cfg.record_every == 0 or i == len(steps) - 1:
                record(t, V)
        series = NormSeries(np.asarray(times), {k: np.asarray(v) for k, v in columns.items()})
        return V, series, snapshots

    stepper = HalfWaveStepper(cfg.max_mode, dealias=cfg.dealias)
    state = stepper.lift(u0.embed(max(cfg.max_mode, u0.max_mode)).truncate(cfg.max_mode))

    def record(t, state):
        times.append(t)
        snapshots.append(stepper.conserved(t, state))
        if observers:
            f = stepper.restrict(state)
            for name, fn in observers.items():
                columns[name].append(float(fn(t, f)))

    m0 = math.sqrt(float(np.sum(np.abs(state) ** 2)))
    record(0.0, state)
    t = 0.0
    for i, h in enumerate(steps):
        state = stepper.step(state, h, cfg.scheme)
        t = cfg.t_end if i == len(steps) - 1 else t + h
        m = math.sqrt(float(np.sum(np.abs(state) ** 2)))
        if m > BLOWUP_FACTOR * m0:
            raise BlowUpError(f"L2 norm {m:.3e} exceeded {BLOWUP_FACTOR:g} x initial at t={t:.6g}")
        if (i + 1) % cfg.record_every == 0 or i == len(steps) - 1:
            record(t, state)
    series = NormSeries(np.asarray(times), {k: np.asarray(v) for k, v in columns.items()})
    return stepper.restrict(state), series, snapshots


def default_dt(u0_linf: float, cap: float = 1e-3, max_phase: float = 0.05) -> float:
    """dt policy: keep the nonlinear phase per step below `max_phase` radians."""
    if u0_linf <= 0.0:
        return cap
    return min(cap, max_phase / u0_linf**2)


def snapshots_to_columns(snapshots: list[ConservedSnapshot], equation: Equation) -> dict[str, np.ndarray]:
    energy = [s.hw_energy if equation is Equation.HALF_WAVE else s.szego_energy for s in snapshots]
    return {
        "mass": np.asarray([s.mass for s in snapshots]),
        "momentum": np.asarray([s.momentum for s in snapshots]),
        "energy": np.asarray(energy),
    }
