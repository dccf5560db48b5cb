"""Generalised binomial coefficients C(w, z) via gamma ratios and sinc series.

Also integrals of C(w, x) f(x) over the real line, by lattice sums and by
quadrature, and executable checks of the identities that connect them.
"""
from .binomial import (
    BinomialArgs,
    binom_eval,
    binom_fourier_transform,
    binom_gamma,
    binom_int_k,
    binom_sinc_finite,
    binom_sinc_series,
    binom_theorem_sum,
    raabe_rate,
)
from .errors import DivergentTail, DomainError, NoConvergence, PoleError, SincBinomError
from .identities import (
    IdentityId,
    IdentityReport,
    binom_antiderivative,
    run_identity_battery,
    sech_closed_form,
    verify_antiderivative,
    verify_cot_identity,
    verify_rational_simple,
    verify_rational_square,
    verify_sech_integral,
    verify_sinc_representation,
    verify_triple_product,
)
from .kernels import Kernel, KernelKind
from .options import EvalOptions, Evaluation, Method
from .quadrature import (
    Projection,
    QuadratureSpec,
    corollary_sum,
    fourier_coefficient,
    fourier_pair_quadrature,
    integrate_finite,
    integrate_line,
    sinc_project,
    theorem3_evaluate,
    theorem3_quadrature,
)
from .series import SeriesDiagnostics
from .special import (
    beta_gamma,
    beta_series,
    cospi,
    gamma,
    log_gamma,
    reciprocal_gamma_weierstrass,
    rect,
    rgamma,
    si,
    sinc,
    sinpi,
)

__version__ = "0.1.0"
