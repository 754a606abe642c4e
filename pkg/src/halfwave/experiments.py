"""Experiment drivers: instability sweep, approximation bound, bootstrap diagnostic.

Each driver takes an ExperimentConfig, runs one trajectory (or a pair) per
eps, and assembles an ExperimentReport plus per-eps NormSeries.  Outputs are
deterministic for a fixed config and seed: CSV floats are written with repr
and runtimes are kept out of the CSVs (they go to meta.json, which is the
one non-reproducible artifact).
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis_oracles import ScalingFit, fit_scaling
from .evolvers import (
    BlowUpError,
    Equation,
    HalfWaveStepper,
    _time_grid,
    default_dt,
    snapshots_to_columns,
)
from .series import NormSeries, fmt
from .spectral_core import SpectralField, field_to_csv, hs_norm
from .szego_family import (
    FamilyBranch,
    SzegoParams,
    initial_distance_closed,
    make_params,
    params_from_json,
    pair_hs_inner_closed,
    required_modes,
    separation_distance_closed,
    separation_time,
    shifted_coeffs,
    szego_coeffs,
)

DEFAULT_EPS = (0.1, 0.05, 0.025, 0.0125)
FORCE_LARGE_MODES = 6000         # above this K a PDE run needs an explicit override
MEMORY_CAP_BYTES = 8 << 30


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


def default_sigma(s: float) -> float:
    """Centered in the admissible window (1/2, 1/(4s)), capped at 0.75."""
    return min(0.75, (1.0 / (4.0 * s) + 0.5) / 2.0)


@dataclass(frozen=True)
class ExperimentConfig:
    s: float = 0.4
    eps_list: tuple[float, ...] = DEFAULT_EPS
    sigma: float | None = None
    dt: float | None = None
    max_mode: int | None = None
    t_samples: int = 512
    out_dir: Path | None = None
    seed: int = 0
    force_large: bool = False

    def __post_init__(self):
        if not 0.25 < self.s < 0.5:
            raise ConfigError(f"s must lie in (1/4, 1/2), got {self.s}")
        if not self.eps_list:
            raise ConfigError("eps_list must be nonempty")
        if any(not 0.0 < e < 1.0 for e in self.eps_list):
            raise ConfigError(f"every eps must lie in (0,1), got {self.eps_list}")
        if any(nxt >= prev for prev, nxt in zip(self.eps_list, self.eps_list[1:])):
            raise ConfigError(f"eps_list must be strictly decreasing, got {self.eps_list}")
        sigma = self.resolved_sigma
        if not 0.5 < sigma < 1.0 / (4.0 * self.s):
            raise ConfigError(f"sigma={sigma} outside the window (1/2, 1/(4s)) for s={self.s}")
        if self.dt is not None and self.dt <= 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_samples < 1:
            raise ConfigError(f"t_samples must be >= 1, got {self.t_samples}")

    @property
    def resolved_sigma(self) -> float:
        return self.sigma if self.sigma is not None else default_sigma(self.s)

    def modes_for(self, eps: float) -> int:
        return self.max_mode if self.max_mode is not None else required_modes(eps)


@dataclass
class ExperimentReport:
    kind: str
    s: float
    sigma: float
    header: list[str]
    rows: list[list] = field(default_factory=list)
    params_by_eps: dict[str, tuple[str, str]] = field(default_factory=dict)
    fits: dict[str, ScalingFit] = field(default_factory=dict)
    runtimes: dict[str, float] = field(default_factory=dict)
    run_meta: dict = field(default_factory=dict)

    def row_map(self) -> list[dict]:
        return [dict(zip(self.header, row)) for row in self.rows]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header)
            for row in self.rows:
                writer.writerow([cell if isinstance(cell, str) else fmt(cell) for cell in row])


def _guard_resolution(cfg: ExperimentConfig, eps: float) -> int:
    K = cfg.modes_for(eps)
    M = 4 * K + 2
    est_bytes = 16 * M * 12  # two trajectories, ~6 working arrays each
    if est_bytes > MEMORY_CAP_BYTES:
        raise ConfigError(
            f"eps={eps:g} needs K={K} (~{est_bytes / 2**30:.1f} GiB working set), beyond the memory cap"
        )
    if K > FORCE_LARGE_MODES and not cfg.force_large:
        raise ConfigError(
            f"eps={eps:g} needs K={K} modes (grid {M}, ~{est_bytes / 2**20:.0f} MiB, "
            f"~{K / 740:.0f}x the eps=0.1 runtime); pass --force-large to run anyway"
        )
    return K


def _hs_weights(max_mode: int, s: float) -> np.ndarray:
    k = np.arange(-max_mode, max_mode + 1, dtype=np.float64)
    return (1.0 + k * k) ** s


def _band_norm(weights: np.ndarray, coeffs: np.ndarray) -> float:
    return math.sqrt(float(np.dot(weights, np.abs(coeffs) ** 2)))


@dataclass
class _PairRun:
    """Lockstep half-wave evolution of the two family branches."""

    times: np.ndarray
    dist_hs: np.ndarray
    approx_1: np.ndarray
    approx_2: np.ndarray
    snapshots_1: list
    snapshots_2: list
    final_1: SpectralField
    final_2: SpectralField
    dt: float
    n_steps: int


def run_pair(
    params_1: SzegoParams,
    params_2: SzegoParams,
    t_end: float,
    max_mode: int,
    s: float,
    dt: float | None = None,
    t_samples: int = 512,
) -> _PairRun:
    """Advance both branches with the shared Strang stepper, recording the
    H^s pair distance and per-branch approximation errors against the
    shifted closed-form profiles."""
    stepper = HalfWaveStepper(max_mode)
    u1 = szego_coeffs(params_1, 0.0, max_mode)
    u2 = szego_coeffs(params_2, 0.0, max_mode)
    linf = max(p.alpha / (1.0 - p.p) for p in (params_1, params_2))
    dt = dt if dt is not None else default_dt(linf)
    steps = _time_grid(dt, t_end)
    record_every = max(1, len(steps) // t_samples)
    weights = _hs_weights(max_mode, s)
    s1, s2 = stepper.lift(u1), stepper.lift(u2)

    times, dist, ap1, ap2 = [], [], [], []
    snaps1, snaps2 = [], []

    def record(t):
        f1, f2 = stepper.restrict(s1), stepper.restrict(s2)
        times.append(t)
        dist.append(_band_norm(weights, f1.coeffs - f2.coeffs))
        v1 = shifted_coeffs(params_1, t, max_mode)
        v2 = shifted_coeffs(params_2, t, max_mode)
        ap1.append(_band_norm(weights, f1.coeffs - v1.coeffs))
        ap2.append(_band_norm(weights, f2.coeffs - v2.coeffs))
        snaps1.append(stepper.conserved(t, s1))
        snaps2.append(stepper.conserved(t, s2))

    record(0.0)
    t = 0.0
    m0 = math.sqrt(sum(np.sum(np.abs(x) ** 2) for x in (s1, s2)))
    for i, h in enumerate(steps):
        s1 = stepper.step_strang(s1, h)
        s2 = stepper.step_strang(s2, h)
        t = t_end if i == len(steps) - 1 else t + h
        m = math.sqrt(sum(np.sum(np.abs(x) ** 2) for x in (s1, s2)))
        if m > 1e6 * m0:
            raise BlowUpError(f"pair L2 norm exceeded 1e6 x initial at t={t:.6g}")
        if (i + 1) % record_every == 0 or i == len(steps) - 1:
            record(t)

    return _PairRun(
        times=np.asarray(times),
        dist_hs=np.asarray(dist),
        approx_1=np.asarray(ap1),
        approx_2=np.asarray(ap2),
        snapshots_1=snaps1,
        snapshots_2=snaps2,
        final_1=stepper.restrict(s1),
        final_2=stepper.restrict(s2),
        dt=dt,
        n_steps=len(steps),
    )


def _mass_drift(snapshots) -> float:
    masses = np.asarray([s.mass for s in snapshots])
    return float(np.max(np.abs(masses - masses[0])) / masses[0])


INSTABILITY_HEADER = [
    "eps", "status", "d0", "d_sep_closed", "d_sep_numeric",
    "approx_err_1", "approx_err_2", "mass_drift",
]


def run_instability(cfg: ExperimentConfig) -> ExperimentReport:
    """Per eps: evolve both branches under half-wave to t_eps and compare the
    numeric H^s separation with the closed-form Szego one."""
    report = ExperimentReport("instability", cfg.s, cfg.resolved_sigma, list(INSTABILITY_HEADER))
    out = _prepare_out(cfg)
    for eps in cfg.eps_list:
        K = _guard_resolution(cfg, eps)
        started = time.perf_counter()
        p1 = make_params(eps, cfg.s, FamilyBranch.FIRST)
        p2 = make_params(eps, cfg.s, FamilyBranch.SECOND)
        te = separation_time(eps, cfg.s)
        d0 = initial_pair_distance(p1, p2, K, cfg.s)
        key = f"{eps:g}"
        report.params_by_eps[key] = (p1.to_json(FamilyBranch.FIRST), p2.to_json(FamilyBranch.SECOND))
        try:
            run = run_pair(p1, p2, te, K, cfg.s, dt=cfg.dt, t_samples=cfg.t_samples)
        except BlowUpError as err:
            report.rows.append([eps, f"blowup:{err}", d0, separation_distance_closed(eps, cfg.s),
                                float("nan"), float("nan"), float("nan"), float("nan")])
            report.runtimes[key] = time.perf_counter() - started
            continue
        d_closed = separation_distance_closed(eps, cfg.s)
        row = [
            eps, "ok", d0, d_closed, float(run.dist_hs[-1]),
            float(run.approx_1.max()), float(run.approx_2.max()),
            max(_mass_drift(run.snapshots_1), _mass_drift(run.snapshots_2)),
        ]
        report.rows.append(row)
        report.runtimes[key] = time.perf_counter() - started
        report.run_meta[key] = {"K": K, "dt": run.dt, "n_steps": run.n_steps,
                                "tail_bound": p1.p**K, "t_eps": te}
        if out is not None:
            series = NormSeries(run.times, dict(
                snapshots_to_columns(run.snapshots_1, Equation.HALF_WAVE),
                dist_hs=run.dist_hs, approx_err_1=run.approx_1, approx_err_2=run.approx_2,
            ))
            series.to_csv(out / f"series_{eps:g}.csv", lead=("mass", "momentum", "energy"))
            field_to_csv(run.final_1, out / f"state_{eps:g}_first.csv")
            field_to_csv(run.final_2, out / f"state_{eps:g}_second.csv")
    _finish(cfg, report, out)
    return report


def initial_pair_distance(p1: SzegoParams, p2: SzegoParams, max_mode: int, s: float) -> float:
    u1 = szego_coeffs(p1, 0.0, max_mode)
    u2 = szego_coeffs(p2, 0.0, max_mode)
    return hs_norm(u1 - u2, s)


APPROXIMATION_HEADER = ["eps", "status", "sup_approx_err", "mass_drift", "in_fit"]
SANITY_EPS = 0.5  # rows at or above this are outside the asymptotic regime


def run_approximation(cfg: ExperimentConfig) -> ExperimentReport:
    """Per eps: sup_t ||u - v_eps||_{H^s} for the first branch, plus the
    log-log fit of these sups against eps (sanity rows excluded)."""
    report = ExperimentReport("approximation", cfg.s, cfg.resolved_sigma, list(APPROXIMATION_HEADER))
    out = _prepare_out(cfg)
    fit_eps, fit_vals = [], []
    for eps in cfg.eps_list:
        K = _guard_resolution(cfg, eps)
        started = time.perf_counter()
        p1 = make_params(eps, cfg.s, FamilyBranch.FIRST)
        te = separation_time(eps, cfg.s)
        key = f"{eps:g}"
        report.params_by_eps[key] = (p1.to_json(FamilyBranch.FIRST),) * 2
        try:
            run = run_pair(p1, p1, te, K, cfg.s, dt=cfg.dt, t_samples=cfg.t_samples)
        except BlowUpError as err:
            report.rows.append([eps, f"blowup:{err}", float("nan"), float("nan"), "no"])
            report.runtimes[key] = time.perf_counter() - started
            continue
        sup_err = float(run.approx_1.max())
        in_fit = eps < SANITY_EPS
        if in_fit:
            fit_eps.append(eps)
            fit_vals.append(sup_err)
        report.rows.append([eps, "ok", sup_err, _mass_drift(run.snapshots_1), "yes" if in_fit else "no"])
        report.runtimes[key] = time.perf_counter() - started
        report.run_meta[key] = {"K": K, "dt": run.dt, "n_steps": run.n_steps, "t_eps": te}
        if out is not None:
            series = NormSeries(run.times, dict(
                snapshots_to_columns(run.snapshots_1, Equation.HALF_WAVE), approx_err=run.approx_1,
            ))
            series.to_csv(out / f"series_{eps:g}.csv", lead=("mass", "momentum", "energy"))
    if len(fit_eps) >= 2:
        report.fits["sup_approx_err"] = fit_scaling(fit_eps, fit_vals)
    report.run_meta["predicted_exponent"] = (4.0 * cfg.s - 1.0) / 4.0
    _finish(cfg, report, out)
    return report


BOOTSTRAP_HEADER = ["eps", "status", "sup_h", "h_ratio", "max_interp_slack"]


def run_bootstrap_diagnostic(cfg: ExperimentConfig) -> NormSeries:
    """Track h_eps(t) = eps^{-s} ||w||_{L2} + eps^{sigma-s} ||w||_{H^sigma}
    along the runs, w = u - v_eps; ratios against eps^{s-1/4} go to the
    report, and the returned series is the one of the smallest eps."""
    sigma = cfg.resolved_sigma
    report = ExperimentReport("bootstrap", cfg.s, sigma, list(BOOTSTRAP_HEADER))
    out = _prepare_out(cfg)
    last_series: NormSeries | None = None
    for eps in cfg.eps_list:
        K = _guard_resolution(cfg, eps)
        started = time.perf_counter()
        p1 = make_params(eps, cfg.s, FamilyBranch.FIRST)
        te = separation_time(eps, cfg.s)
        key = f"{eps:g}"
        report.params_by_eps[key] = (p1.to_json(FamilyBranch.FIRST),) * 2
        stepper = HalfWaveStepper(K)
        state = stepper.lift(szego_coeffs(p1, 0.0, K))
        dt = cfg.dt if cfg.dt is not None else default_dt(p1.alpha / (1.0 - p1.p))
        steps = _time_grid(dt, te)
        record_every = max(1, len(steps) // cfg.t_samples)
        w_l2 = _hs_weights(K, 0.0)
        w_sig = _hs_weights(K, sigma)
        w_s = _hs_weights(K, cfg.s)
        times, h_vals, l2_vals, sig_vals, slack_vals = [], [], [], [], []

        def record(t):
            w = stepper.restrict(state).coeffs - shifted_coeffs(p1, t, K).coeffs
            l2 = _band_norm(w_l2, w)
            hsig = _band_norm(w_sig, w)
            hs_s = _band_norm(w_s, w)
            times.append(t)
            l2_vals.append(l2)
            sig_vals.append(hsig)
            h_vals.append(eps ** (-cfg.s) * l2 + eps ** (sigma - cfg.s) * hsig)
            # weighted-sequence Hoelder: ||w||_{H^s} <= ||w||_{L2}^{1-s/sigma} ||w||_{H^sigma}^{s/sigma}
            rhs = l2 ** (1.0 - cfg.s / sigma) * hsig ** (cfg.s / sigma)
            slack_vals.append(0.0 if rhs == 0.0 else hs_s / rhs - 1.0)

        record(0.0)
        t = 0.0
        for i, h in enumerate(steps):
            state = stepper.step_strang(state, h)
            t = te if i == len(steps) - 1 else t + h
            if (i + 1) % record_every == 0 or i == len(steps) - 1:
                record(t)
        sup_h = max(h_vals)
        report.rows.append([eps, "ok", sup_h, sup_h / eps ** (cfg.s - 0.25), max(slack_vals)])
        report.runtimes[key] = time.perf_counter() - started
        report.run_meta[key] = {"K": K, "dt": dt, "n_steps": len(steps), "t_eps": te}
        last_series = NormSeries(
            np.asarray(times),
            {"h": np.asarray(h_vals), "w_l2": np.asarray(l2_vals), "w_hsig": np.asarray(sig_vals)},
        )
        if out is not None:
            last_series.to_csv(out / f"series_{eps:g}.csv")
    _finish(cfg, report, out)
    return last_series


def _prepare_out(cfg: ExperimentConfig) -> Path | None:
    if cfg.out_dir is None:
        return None
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(cfg: ExperimentConfig, report: ExperimentReport, out: Path | None) -> None:
    if out is None:
        return
    report.to_csv(out / "report.csv")
    meta = {
        "version": __version__,
        "numpy": np.__version__,
        "scipy": __import__("scipy").__version__,
        "kind": report.kind,
        "s": report.s,
        "sigma": report.sigma,
        "seed": cfg.seed,
        "thread_count": 1,
        "t_samples": cfg.t_samples,
        "eps_list": list(cfg.eps_list),
        "params": {k: {"first": json.loads(a), "second": json.loads(b)}
                   for k, (a, b) in report.params_by_eps.items()},
        "runs": report.run_meta,
        "fits": {k: {"slope": f.slope, "intercept": f.intercept, "r2": f.r2}
                 for k, f in report.fits.items()},
        "sup_note": "grid sups under-estimate the true sup over t",
        "runtimes_sec": report.runtimes,  # informational; not reproducible
    }
    with open(out / "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


_TEXT_COLUMNS = {"status", "in_fit"}


def load_report(out_dir) -> ExperimentReport:
    """Reload report.csv + meta.json; every row's params re-validate on load."""
    out = Path(out_dir)
    with open(out / "report.csv", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        raw_rows = list(reader)
    with open(out / "meta.json") as fh:
        meta = json.load(fh)
    report = ExperimentReport(meta["kind"], meta["s"], meta["sigma"], header)
    for row in raw_rows:
        report.rows.append([cell if header[i] in _TEXT_COLUMNS else float(cell)
                            for i, cell in enumerate(row)])
    for key, pair in meta["params"].items():
        first = params_from_json(json.dumps(pair["first"]))
        second = params_from_json(json.dumps(pair["second"]))
        report.params_by_eps[key] = (first.to_json(), second.to_json())
    report.run_meta = meta["runs"]
    return report


def closed_form_separation_sweep(eps_list, s: float) -> list[dict]:
    """Closed-form rows (no PDE): d0, d_sep, cross-term moduli at 0 and t_eps."""
    rows = []
    for eps in eps_list:
        p1 = make_params(eps, s, FamilyBranch.FIRST)
        p2 = make_params(eps, s, FamilyBranch.SECOND)
        te = separation_time(eps, s)
        rows.append({
            "eps": eps,
            "d0": initial_distance_closed(eps, s),
            "d_sep": separation_distance_closed(eps, s),
            "cross_0": abs(pair_hs_inner_closed(p1, p2, 0.0, s)),
            "cross_te": abs(pair_hs_inner_closed(p1, p2, te, s)),
            "t_eps": te,
        })
    return rows
