"""Spectral toolkit for the periodic cubic half-wave and Szego equations."""

__version__ = "0.1.0"

from .spectral_core import (  # noqa: E402,F401
    SpectralField,
    cubic_term,
    half_wave_propagator,
    hs_inner,
    hs_norm,
    project_neg,
    project_nonneg,
)
from .szego_family import (  # noqa: E402,F401
    FamilyBranch,
    SzegoParams,
    make_params,
    pair_hs_inner_closed,
    separation_time,
    shifted_coeffs,
    szego_coeffs,
)
from .evolvers import (  # noqa: E402,F401
    Equation,
    EvolverConfig,
    Scheme,
    evolve,
    step_half_wave,
    step_szego,
)
