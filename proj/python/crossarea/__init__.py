"""First-crossing time, area and minimum of jump-diffusions."""

from ._core import (
    Error,
    Process,
    __version__,
    airy_ai,
    airy_ai_prime,
    bm_area_lt_driftless,
    bm_area_mean,
    bm_area_second,
    bm_fpt_density,
    bm_fpt_lt,
    bm_fpt_moments,
    bm_min_cdf,
    gamma_lt,
    normal_cdf,
    ou_mean_fpt,
    ou_min_cdf,
    parse_preset,
    poisson_area_lt,
    poisson_area_moments,
    poisson_fpt_law,
    run_command,
    simulate,
    solve_levy,
    solve_lt,
    solve_min,
    solve_moment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
