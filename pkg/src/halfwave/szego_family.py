"""Explicit traveling-wave families of the cubic Szego equation.

The one-pole profile phi_{alpha,p}(z) = alpha / (1 - p z) evolves under the
Szego equation as a pure phase/rotation,

    V(t, x) = e^{-i omega t} phi_{alpha,p}(e^{-i c t} e^{ix}),
    omega = alpha^2 / (1 - p^2)^2,   c = alpha^2 / (1 - p^2),

so its Fourier coefficients are alpha e^{-i omega t} p^k e^{-i c k t} for
k >= 0.  The epsilon-parametrization ties the pole radius and amplitude
together (p^2 = 1 - eps, alpha = eps^(s+1/2) times an optional amplitude
bump 1 + |log eps|^(-1/4)) and produces the two nearby families whose H^s
distance grows on the window t_eps = eps^(1-2s) |log eps|^(1/2).

All closed-form sums are truncated when the summand falls below 1e-16 of
the running total; the geometric tail bound is returned alongside.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .spectral_core import SpectralField

TAIL_TOL = 1e-16
_CHUNK = 1 << 20


class FamilyBranch(enum.Enum):
    FIRST = "first"    # alpha = eps^(s+1/2)
    SECOND = "second"  # alpha = eps^(s+1/2) (1 + |log eps|^(-1/4))


@dataclass(frozen=True)
class SzegoParams:
    eps: float
    s: float
    alpha: float
    p: float
    omega: float
    c: float
    delta: float

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0,1), got {self.eps}")
        if not 0.0 < self.s < 0.5:
            raise ValueError(f"s must lie in (0,1/2), got {self.s}")
        if self.alpha <= 0.0 or self.omega <= 0.0 or self.c <= 0.0 or self.delta < 0.0:
            raise ValueError("alpha, omega, c must be positive and delta nonnegative")
        # 1 - p^2 == eps is the defining identity; p is stored rounded, so
        # allow a few ulp on p^2 and 1e-14 relative on the derived speeds.
        if abs(self.p * self.p - (1.0 - self.eps)) > 8.0 * np.finfo(float).eps:
            raise ValueError("pole radius inconsistent with eps: p^2 != 1 - eps")
        if abs(self.omega - self.alpha**2 / self.eps**2) > 1e-14 * self.omega:
            raise ValueError("omega inconsistent with alpha^2/(1-p^2)^2")
        if abs(self.c - self.alpha**2 / self.eps) > 1e-14 * self.c:
            raise ValueError("c inconsistent with alpha^2/(1-p^2)")
        if abs(self.omega - self.c / self.eps) > 1e-14 * self.omega:
            raise ValueError("omega != c/(1-p^2)")

    def to_json(self, branch: FamilyBranch | None = None) -> str:
        branch = branch if branch is not None else (FamilyBranch.FIRST if self.delta == 0.0 else FamilyBranch.SECOND)
        items = {"eps": self.eps, "s": self.s, "branch": branch.value}
        items.update({k: getattr(self, k) for k in ("alpha", "p", "omega", "c", "delta")})
        return json.dumps({k: (v if isinstance(v, str) else float(f"{v:.17g}")) for k, v in items.items()})


def params_from_json(text: str) -> SzegoParams:
    d = json.loads(text)
    params = SzegoParams(d["eps"], d["s"], d["alpha"], d["p"], d["omega"], d["c"], d["delta"])
    expected = make_params(d["eps"], d["s"], FamilyBranch(d["branch"]))
    if abs(params.alpha - expected.alpha) > 1e-14 * expected.alpha:
        raise ValueError("stored alpha does not match the branch formula")
    return params


def make_params(eps: float, s: float, branch: FamilyBranch = FamilyBranch.FIRST) -> SzegoParams:
    """Parameters of equations p = sqrt(1-eps), alpha = eps^(s+1/2) (1+delta)."""
    eps, s = float(eps), float(s)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    if not 0.0 < s < 0.5:
        raise ValueError(f"s must lie in (0,1/2), got {s}")
    delta = 0.0 if branch is FamilyBranch.FIRST else abs(math.log(eps)) ** -0.25
    alpha = eps ** (s + 0.5) * (1.0 + delta)
    return SzegoParams(
        eps=eps, s=s, alpha=alpha, p=math.sqrt(1.0 - eps),
        omega=alpha**2 / eps**2, c=alpha**2 / eps, delta=delta,
    )


def required_modes(eps: float) -> int:
    """Mode count policy K = ceil(32 ln(10) / eps), giving p^K <= 1e-16."""
    return int(math.ceil(32.0 * math.log(10.0) / eps))


def _check_tail(p: float, max_mode: int) -> None:
    # p^K <= 1e-16 so the discarded tail is below double precision.
    if max_mode * math.log(p) > math.log(TAIL_TOL):
        need = int(math.ceil(math.log(TAIL_TOL) / math.log(p)))
        raise ValueError(
            f"max_mode={max_mode} leaves a tail p^K={p**max_mode:.3e} > {TAIL_TOL:g}; need K >= {need}"
        )


def _family_field(params: SzegoParams, t: float, max_mode: int, freq_shift: float) -> SpectralField:
    _check_tail(params.p, max_mode)
    k = np.arange(0, max_mode + 1)
    coef = params.alpha * np.exp(-1j * params.omega * t) * params.p ** k * np.exp(-1j * freq_shift * k * t)
    out = np.zeros(2 * max_mode + 1, dtype=np.complex128)
    out[max_mode:] = coef
    return SpectralField(out, max_mode)


def szego_coeffs(params: SzegoParams, t: float, max_mode: int) -> SpectralField:
    """V(t): coefficients alpha e^{-i omega t} p^k e^{-i c k t}, k >= 0."""
    return _family_field(params, t, max_mode, params.c)


def shifted_coeffs(params: SzegoParams, t: float, max_mode: int) -> SpectralField:
    """v(t, x) = V(t, x - t), the half-wave comparison profile: frequency shift 1 + c."""
    return _family_field(params, t, max_mode, 1.0 + params.c)


def weighted_power_series(s: float, q: float, theta: float = 0.0) -> tuple[complex, float]:
    """sum_{k>=0} (1+k^2)^s q^k e^{-i theta k} with its geometric tail bound.

    Terms are accumulated in chunks until the summand drops below 1e-16 of
    the running absolute sum (past the summand's peak).
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"ratio q must lie in (0,1), got {q}")
    total = 0.0 + 0.0j
    abs_total = 0.0
    k0 = 0
    k_peak = 2.0 * max(s, 0.0) / -math.log(q)
    while True:
        k = np.arange(k0, k0 + _CHUNK, dtype=np.float64)
        a = (1.0 + k * k) ** s * q ** k
        total += complex(np.sum(a * np.exp(-1j * theta * k)))
        abs_total += float(a.sum())
        k0 += _CHUNK
        last = float(a[-1])
        if k0 > k_peak and last < TAIL_TOL * abs_total:
            ratio = q * ((1.0 + (k0 + 1.0) ** 2) / (1.0 + k0**2)) ** s
            tail = last * ratio / (1.0 - ratio)
            return total, tail


def pair_hs_inner_closed(params_a: SzegoParams, params_b: SzegoParams, t: float, s: float) -> complex:
    """<V_a(t), V_b(t)>_{H^s} in closed form.

    Equals alpha_a alpha_b e^{-i(omega_a-omega_b)t} sum_k (1+k^2)^s p^{2k}
    e^{-i(c_a-c_b)k t}; both families must share eps (hence p).
    """
    if params_a.eps != params_b.eps:
        raise ValueError(f"families must share eps, got {params_a.eps} and {params_b.eps}")
    q = 1.0 - params_a.eps
    series, _ = weighted_power_series(s, q, (params_a.c - params_b.c) * t)
    phase = np.exp(-1j * (params_a.omega - params_b.omega) * t)
    return complex(params_a.alpha * params_b.alpha * phase * series)


def profile_hs_norm_closed(params: SzegoParams, s: float) -> float:
    """H^s norm of the profile, time-invariant: alpha sqrt(sum (1+k^2)^s (1-eps)^k)."""
    series, _ = weighted_power_series(s, 1.0 - params.eps)
    return params.alpha * math.sqrt(series.real)


def separation_time(eps: float, s: float) -> float:
    """t_eps = eps^(1-2s) |ln eps|^(1/2)."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    if not 0.0 < s < 0.5:
        raise ValueError(f"s must lie in (0,1/2), got {s}")
    return eps ** (1.0 - 2.0 * s) * abs(math.log(eps)) ** 0.5


def decay_reference_time(eps: float, s: float) -> float:
    """Time scale t0 = eps / |c_1 - c_2| past which the pair inner product decays."""
    p1 = make_params(eps, s, FamilyBranch.FIRST)
    p2 = make_params(eps, s, FamilyBranch.SECOND)
    return eps / abs(p1.c - p2.c)


def initial_distance_closed(eps: float, s: float) -> float:
    """||V1(0) - V2(0)||_{H^s} = |alpha_1 - alpha_2| sqrt(sum (1+k^2)^s (1-eps)^k)."""
    p1 = make_params(eps, s, FamilyBranch.FIRST)
    p2 = make_params(eps, s, FamilyBranch.SECOND)
    series, _ = weighted_power_series(s, 1.0 - eps)
    return abs(p1.alpha - p2.alpha) * math.sqrt(series.real)


def separation_distance_closed(eps: float, s: float) -> float:
    """||V1(t_eps) - V2(t_eps)||_{H^s} from the closed-form norms and cross term."""
    p1 = make_params(eps, s, FamilyBranch.FIRST)
    p2 = make_params(eps, s, FamilyBranch.SECOND)
    te = separation_time(eps, s)
    n1 = profile_hs_norm_closed(p1, s)
    n2 = profile_hs_norm_closed(p2, s)
    cross = pair_hs_inner_closed(p1, p2, te, s)
    return math.sqrt(max(n1 * n1 + n2 * n2 - 2.0 * cross.real, 0.0))
