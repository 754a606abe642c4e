"""Closed-form and brute-force oracles for the estimates behind the experiments.

Each "lesssim" statement is operationalized either as an exact identity
(checked against an independent brute-force route) or as a log-log slope
regression over an eps sweep plus a ratio-boundedness check.  Absolute
constants are measured and reported, never asserted a priori.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .series import NormSeries, fmt
from .spectral_core import (
    SpectralField,
    cubic_term,
    hs_norm,
    project_neg,
    zeros,
)
from .szego_family import SzegoParams, TAIL_TOL, required_modes, szego_coeffs

RESONANCE_THRESHOLD = 1e-8  # |Omega| * t below this switches Lambda to its Taylor branch


# --------------------------------------------------------------------------
# oscillatory phase integral Lambda
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OscPhase:
    """Phase data of one Duhamel mode: detuning Omega = omega - k (2 + c)."""

    t: float
    k: int
    omega: float
    c: float

    def __post_init__(self):
        if self.t < 0.0:
            raise ValueError(f"time must be nonnegative, got {self.t}")
        if not np.isfinite(self.detuning):
            raise ValueError("detuning is not finite")

    @property
    def detuning(self) -> float:
        return self.omega - self.k * (2.0 + self.c)

    @property
    def reduced_frequency(self) -> float:
        """omega / (2 + c): the mode index at which the detuning vanishes."""
        return self.omega / (2.0 + self.c)

    @property
    def resonant_mode(self) -> int:
        """Integer part of the reduced frequency (diagnostic only)."""
        return int(math.floor(self.reduced_frequency))


def _phase_integral(t: float, detuning: float) -> complex:
    # int_0^t e^{-i tau Omega} d tau, with a 3-term Taylor branch near resonance.
    # The closed form -(e^{-ix} - 1)/(i Omega) is evaluated through
    # e^{-ix} - 1 = -2i sin(x/2) e^{-ix/2}, which avoids the cos(x) - 1
    # cancellation and keeps the seam mismatch at rounding level.
    x = detuning * t
    if abs(x) < RESONANCE_THRESHOLD:
        return t * (1.0 - 0.5j * x - x * x / 6.0)
    return 2.0 * math.sin(0.5 * x) / detuning * np.exp(-0.5j * x)


def _phase_integral_moduli_sq(t: float, detuning: np.ndarray) -> np.ndarray:
    # |Lambda|^2 = t^2 sinc^2(Omega t / 2), stable through Omega = 0.
    return (t * np.sinc(detuning * t / (2.0 * np.pi))) ** 2


def _phase_integral_array(t: float, detuning: np.ndarray) -> np.ndarray:
    x = detuning * t
    taylor = t * (1.0 - 0.5j * x - x * x / 6.0)
    near = np.abs(x) < RESONANCE_THRESHOLD
    safe = np.where(near, 1.0, detuning)
    exact = 2.0 * np.sin(0.5 * x) / safe * np.exp(-0.5j * x)
    return np.where(near, taylor, exact)


def lambda_osc(phase: OscPhase) -> complex:
    """Lambda = int_0^t e^{-i tau Omega} d tau = -(e^{-it Omega} - 1)/(i Omega)."""
    return _phase_integral(phase.t, phase.detuning)


# --------------------------------------------------------------------------
# negative-frequency projection of v |v|^2 for the one-pole profile
# --------------------------------------------------------------------------

def _check_pole(pole: complex, max_mode: int) -> float:
    p = abs(pole)
    if p >= 1.0:
        raise ValueError(f"pole radius must satisfy |P| < 1, got {p}")
    if p > 0.0 and max_mode * math.log(p) > math.log(TAIL_TOL):
        need = int(math.ceil(math.log(TAIL_TOL) / math.log(p)))
        raise ValueError(f"max_mode={max_mode} leaves tail |P|^K > {TAIL_TOL:g}; need K >= {need}")
    return p


def negative_part_closed(amplitude: complex, pole: complex, max_mode: int) -> SpectralField:
    """P_{<0}(v |v|^2) for v = A / (1 - P e^{ix}), in closed form.

    The coefficient of e^{-ikx} (k >= 1) is A |A|^2 / (1 - |P|^2)^2 * conj(P)^k.
    """
    p = _check_pole(pole, max_mode)
    alpha = abs(amplitude)
    out = zeros(max_mode)
    k = np.arange(1, max_mode + 1)
    coef = amplitude * alpha**2 / (1.0 - p * p) ** 2 * np.conj(pole) ** k
    out.coeffs[max_mode - k] = coef
    return out


def negative_part_bruteforce(amplitude: complex, pole: complex, max_mode: int) -> SpectralField:
    """Same object by brute force: truncate the geometric series for v, form
    the dealiased cubic product, project on negative frequencies."""
    _check_pole(pole, max_mode)
    k = np.arange(0, max_mode + 1)
    coeffs = np.zeros(2 * max_mode + 1, dtype=np.complex128)
    coeffs[max_mode:] = amplitude * np.asarray(pole, dtype=np.complex128) ** k
    v = SpectralField(coeffs, max_mode)
    return project_neg(cubic_term(v, v, v))


# --------------------------------------------------------------------------
# Duhamel term of the negative-frequency forcing
# --------------------------------------------------------------------------

def _check_regime(s: float, sigma: float) -> None:
    # regime a): sigma in [0,1/2), s in (0,1/2); b): sigma in [1/2, 1/(4s)), s in (1/4,1/2)
    if 0.0 <= sigma < 0.5 and 0.0 < s < 0.5:
        return
    if 0.5 <= sigma and 0.25 < s < 0.5 and sigma < 1.0 / (4.0 * s):
        return
    raise ValueError(f"(s, sigma) = ({s}, {sigma}) outside the smoothing regimes")


def duhamel_field(params: SzegoParams, t: float, max_mode: int) -> SpectralField:
    """W(t) = int_0^t U(-tau) P_{<0}(v|v|^2)(tau) d tau, supported on k <= -1.

    Mode -k carries (alpha^3 / eps^2) p^k Lambda(t, k, omega, c).
    """
    out = zeros(max_mode)
    pref = params.alpha**3 / params.eps**2
    k = np.arange(1, max_mode + 1, dtype=np.float64)
    lam = _phase_integral_array(t, params.omega - k * (2.0 + params.c))
    out.coeffs[max_mode - k.astype(int)] = pref * params.p**k * lam
    return out


def duhamel_negative_norm(
    params: SzegoParams,
    sigma: float,
    t_grid: np.ndarray,
    max_mode: int | None = None,
) -> tuple[float, NormSeries]:
    """sup over t_grid of the H^sigma norm of the Duhamel term, plus the series.

    By unitarity of the free flow this equals the norm of the physical-space
    Duhamel integral of the negative-frequency forcing.
    """
    _check_regime(params.s, sigma)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.size == 0 or t_grid.min() < 0.0 or t_grid.max() > 1.0:
        raise ValueError("t_grid must be a nonempty subset of [0, 1]")
    K = max_mode if max_mode is not None else required_modes(params.eps)
    k = np.arange(1, K + 1, dtype=np.float64)
    weights = (1.0 + k * k) ** sigma * (1.0 - params.eps) ** k
    detuning = params.omega - k * (2.0 + params.c)
    pref = (params.alpha**3 / params.eps**2) ** 2
    norms = np.empty_like(t_grid)
    for i, t in enumerate(t_grid):
        norms[i] = math.sqrt(pref * float(np.dot(weights, _phase_integral_moduli_sq(t, detuning))))
    return float(norms.max()), NormSeries(t_grid, {"duhamel_hsig": norms})


def duhamel_norm_quadrature(
    params: SzegoParams, sigma: float, t: float, max_mode: int, panels: int = 4096
) -> float:
    """Independent oracle: composite-Simpson quadrature of the Duhamel integrand.

    Integrates e^{-i tau Omega_k} in tau directly (no closed form for Lambda).
    """
    if panels % 2 == 1:
        raise ValueError("Simpson rule needs an even panel count")
    k = np.arange(1, max_mode + 1, dtype=np.float64)
    detuning = params.omega - k * (2.0 + params.c)
    tau = np.linspace(0.0, t, panels + 1)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (t / panels) / 3.0
    lam = np.exp(-1j * np.outer(tau, detuning)).T @ w
    coef = (params.alpha**3 / params.eps**2) * params.p**k * lam
    return float(np.sqrt(np.sum((1.0 + k * k) ** sigma * np.abs(coef) ** 2)))


# --------------------------------------------------------------------------
# profile norm bounds and weighted geometric moments
# --------------------------------------------------------------------------

def vest_bounds(
    params: SzegoParams, sigma: float, t_grid: np.ndarray
) -> tuple[float, float]:
    """(sup_t ||v(t)||_Linf, sup_t ||v(t)||_{H^sigma}) over the t grid.

    The sup norm is taken over a 4(2K+1)-point collocation grid; for the
    one-pole profile the grid values come from the pole formula
    |v(t,x)| = alpha / |1 - p e^{i(x - t(1+c))}|, exact at every point.
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0,1], got {sigma}")
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.size == 0 or t_grid.min() < 0.0 or t_grid.max() > 1.0:
        raise ValueError("t_grid must be a nonempty subset of [0, 1]")
    K = required_modes(params.eps)
    x = 2.0 * np.pi * np.arange(4 * (2 * K + 1)) / (4 * (2 * K + 1))
    k = np.arange(0, K + 1, dtype=np.float64)
    moduli_sq = (params.alpha * params.p**k) ** 2
    hsig = math.sqrt(float(np.dot((1.0 + k * k) ** sigma, moduli_sq)))
    linf = 0.0
    for t in t_grid:
        vals = params.alpha / np.abs(1.0 - params.p * np.exp(1j * (x - t * (1.0 + params.c))))
        linf = max(linf, float(vals.max()))
    # coefficient moduli are time-invariant, so one hsig serves the whole grid
    return linf, hsig


def geometric_moment(eps: float, sigma: float, k_max: int | None = None) -> float:
    """sum_{k>=0} (1-eps)^k k^(2 sigma), truncated below 1e-16 of the total."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0,1], got {sigma}")
    if k_max is None:
        # (1-eps)^k k^(2s) < 1e-16 * total once eps*k exceeds ~ 42 + 2s ln k
        k_max = int(math.ceil((16.0 + 4.0) * math.log(10.0) / eps)) + 64
    k = np.arange(0, k_max + 1, dtype=np.float64)
    terms = (1.0 - eps) ** k * k ** (2.0 * sigma)
    total = float(terms.sum())
    if terms[-1] > TAIL_TOL * total:
        raise ValueError(f"k_max={k_max} truncates above the 1e-16 tail rule")
    return total


# --------------------------------------------------------------------------
# inequality probes
# --------------------------------------------------------------------------

def random_probe_field(max_mode: int, sigma: float, seed: int = 0, rng=None) -> SpectralField:
    """Generic H^sigma field: i.i.d. complex Gaussian coefficients with
    variance (1+k^2)^(-sigma-0.6)."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    k = np.arange(-max_mode, max_mode + 1, dtype=np.float64)
    sd = (1.0 + k * k) ** (-(sigma + 0.6) / 2.0)
    raw = rng.standard_normal(2 * max_mode + 1) + 1j * rng.standard_normal(2 * max_mode + 1)
    return SpectralField(raw * sd / math.sqrt(2.0), max_mode)


def interpolation_probe(f: SpectralField, sigma: float) -> float:
    """ratio Linf / ( L2^(1-1/(2 sigma)) * Hsigma^(1/(2 sigma)) ), sigma > 1/2."""
    if sigma <= 0.5:
        raise ValueError(f"interpolation exponent needs sigma > 1/2, got {sigma}")
    l2 = hs_norm(f, 0.0)
    if l2 == 0.0:
        raise ValueError("zero field rejected")
    expo = 1.0 / (2.0 * sigma)
    return f.linf_grid() / (l2 ** (1.0 - expo) * hs_norm(f, sigma) ** expo)


def _product_field(f: SpectralField, g: SpectralField) -> SpectralField:
    # exact product, no truncation: degree K_f + K_g via direct convolution
    return SpectralField(np.convolve(f.coeffs, g.coeffs), f.max_mode + g.max_mode)


def product_probe(f: SpectralField, g: SpectralField, sigma: float) -> float:
    """ratio ||fg||_{H^sigma} / ( ||f||_{H^sigma} ||g||_inf + ||g||_{H^sigma} ||f||_inf )."""
    sigma = float(sigma)
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    denom = hs_norm(f, sigma) * g.linf_grid() + hs_norm(g, sigma) * f.linf_grid()
    if denom == 0.0:
        raise ValueError("both inputs zero")
    return hs_norm(_product_field(f, g), sigma) / denom


class QLemma(enum.Enum):
    Q1 = "linear"     # w v vbar and wbar v^2
    Q2 = "quadratic"  # w^2 vbar and w wbar v
    Q3 = "cubic"      # w^2 wbar


def q_lemma_probe(w: SpectralField, params: SzegoParams, sigma: float, which: QLemma) -> float:
    """Max over the H^sigma and L2 variants of left/right for one product lemma.

    Left sides are built with the dealiased cubic product (truncated to the
    common band); right sides carry constant 1, so the returned ratios feed
    sweep analyses rather than assertions.
    """
    if sigma <= 0.5:
        raise ValueError(f"product lemmas need sigma > 1/2, got {sigma}")
    if not 0.25 < params.s < 0.5:
        raise ValueError(f"product lemmas need s in (1/4,1/2), got {params.s}")
    eps, s = params.eps, params.s
    w_l2, w_hs = hs_norm(w, 0.0), hs_norm(w, sigma)
    if w_l2 == 0.0:
        return 0.0
    if which is QLemma.Q3:
        lhs = cubic_term(w, w, w)
        ratio_h = hs_norm(lhs, sigma) / (w_l2 ** (2.0 - 1.0 / sigma) * w_hs ** (1.0 + 1.0 / sigma))
        ratio_l = hs_norm(lhs, 0.0) / (w_l2 ** (3.0 - 1.0 / sigma) * w_hs ** (1.0 / sigma))
        return max(ratio_h, ratio_l)

    v = szego_coeffs(params, 0.0, required_modes(eps))
    interp = w_l2 ** (1.0 - 1.0 / (2.0 * sigma)) * w_hs ** (1.0 / (2.0 * sigma))
    if which is QLemma.Q1:
        t1 = cubic_term(w, v, v)      # w vbar v
        t2 = cubic_term(v, w, v)      # v wbar v
        rhs_h = eps ** (2.0 * (s - 0.5)) * w_hs + eps ** (2.0 * s - sigma - 0.5) * interp
        rhs_l = eps ** (2.0 * s - 1.0) * w_l2 + eps ** (2.0 * s - 0.5) * interp
        ratio_h = (hs_norm(t1, sigma) + hs_norm(t2, sigma)) / rhs_h
        ratio_l = (hs_norm(t1, 0.0) + hs_norm(t2, 0.0)) / rhs_l
        return max(ratio_h, ratio_l)

    t1 = cubic_term(w, v, w)          # w vbar w
    t2 = cubic_term(w, w, v)          # w wbar v
    rhs_h = (
        eps ** (s - 0.5) * w_hs ** (1.0 + 1.0 / (2.0 * sigma)) * w_l2 ** (1.0 - 1.0 / (2.0 * sigma))
        + eps ** (s - sigma) * w_hs ** (1.0 / sigma) * w_l2 ** (2.0 - 1.0 / sigma)
    )
    rhs_l = (
        eps ** (s - 0.5) * w_l2 ** (2.0 - 1.0 / (2.0 * sigma)) * w_hs ** (1.0 / (2.0 * sigma))
        + eps**s * w_l2 ** (2.0 - 1.0 / sigma) * w_hs ** (1.0 / sigma)
    )
    ratio_h = (hs_norm(t1, sigma) + hs_norm(t2, sigma)) / rhs_h
    ratio_l = (hs_norm(t1, 0.0) + 2.0 * hs_norm(t2, 0.0)) / rhs_l
    return max(ratio_h, ratio_l)


# --------------------------------------------------------------------------
# Gronwall bootstrap, extremal case
# --------------------------------------------------------------------------

GRONWALL_STEPS = 10_000


def gronwall_extremal(theta: float, C: float, eps: float, A: float) -> tuple[float, NormSeries]:
    """Integrate the equality case g' = C g / eps, g(0) = A eps^theta on the
    window [0, eps |ln eps|^(1/2)] and return max g / eps^(theta/2).

    Refuses parameters outside the smallness regime
    A eps^(theta/2) e^(C^2 |ln eps|^(1/2)) < 1.
    """
    if theta <= 0.0 or C < 0.0 or A <= 0.0 or not 0.0 < eps < 1.0:
        raise ValueError("need theta, A > 0, C >= 0 and eps in (0,1)")
    L = abs(math.log(eps))
    if A * eps ** (theta / 2.0) * math.exp(C * C * math.sqrt(L)) >= 1.0:
        raise ValueError(
            f"outside the smallness regime: A eps^(theta/2) e^(C^2 sqrt|ln eps|) = "
            f"{A * eps ** (theta / 2.0) * math.exp(C * C * math.sqrt(L)):.3e} >= 1"
        )
    t_end = eps * math.sqrt(L)
    dt = t_end / GRONWALL_STEPS
    scale = eps ** (theta / 2.0)
    g = A * eps**theta
    record = GRONWALL_STEPS // 1000 or 1
    ts, gs = [0.0], [g]
    for n in range(1, GRONWALL_STEPS + 1):
        g += dt * C * g / eps
        if n % record == 0 or n == GRONWALL_STEPS:
            ts.append(n * dt)
            gs.append(g)
    gs = np.asarray(gs)
    series = NormSeries(np.asarray(ts), {"g": gs, "ratio": gs / scale})
    return float(gs.max() / scale), series


# --------------------------------------------------------------------------
# scaling regressions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of log(value) against log(eps)."""

    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    r2: float


def fit_scaling(eps_values, values) -> ScalingFit:
    eps_values = np.asarray(eps_values, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if eps_values.size != values.size or eps_values.size < 2:
        raise ValueError("need at least two (eps, value) pairs")
    if np.any(eps_values <= 0.0) or np.any(values <= 0.0):
        raise ValueError("log-log fit needs positive eps and values")
    x, y = np.log(eps_values), np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return ScalingFit(tuple(zip(eps_values.tolist(), values.tolist())), float(slope), float(intercept), max(min(r2, 1.0), 0.0))


PROBE_CSV_HEADER = ["eps", "s", "sigma", "quantity", "value", "predicted_exponent", "fitted_slope", "r2"]


def write_probe_report(path, rows) -> None:
    """Probe report CSV: eps,s,sigma,quantity,value,predicted_exponent,fitted_slope,r2."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROBE_CSV_HEADER)
        for row in rows:
            eps, s, sigma, quantity, value, predicted, slope, r2 = row
            writer.writerow(
                [fmt(eps), fmt(s), fmt(sigma), quantity, fmt(value), fmt(predicted), fmt(slope), fmt(r2)]
            )
