"""Exponential sums, bound formulas, the Heath-Brown identity and psi sums."""
from .bounds import (
    BoundReport, bound_sk, bound_second_deriv, bound_third_deriv, derivative_test_report,
    monomial_sum, sk_bound, sk_scan, weyl_vdc_sides,
)
from .heath_brown import (
    HBTerm, HeathBrownRangeError, dirichlet_convolve, hb_decompose, hb_identity_residual,
    hb_max_residual, hb_residuals,
)
from .psi_sums import (
    DecayScan, InadmissibleError, alpha_grid, decay_admissible, delta_supremum,
    max_admissible_delta, membership_decomposition, psi_diff_sum, psi_diff_weights,
    psi_fourier_constant, psi_fourier_error, scan_decay, sstar_bound, sstar_min_sum,
    sstar_report,
)
from .sums import (
    ExpSumParams, SkEvaluator, TypeRangeClass, exp_sum_sk, type_I_sum, type_II_sum,
    type_sum_bound,
)
