"""GGC mixing laws, exponential-utility NMVM portfolios and convergence diagnostics."""

from ._kernels import BACKEND
from .distances import DistanceReport, distance_report, fortet_mourier_bracket, kolmogorov, total_variation
from .mixing import (
    AtomicGgc,
    DensityGridSpec,
    FiniteGammaConvolution,
    Gig,
    ThorinPair,
    as_gamma_convolution,
    as_thorin,
    atomic,
    density,
    gamma,
    integrability_number,
    laplace,
    mean,
    moschopoulos_bound,
    thorin_partial_mean,
    wiener_gamma_h,
)
from .models import MarketSpec, NmvmModel
from .portfolio import (
    ModelConstants,
    PortfolioSolution,
    expected_utility,
    minimize_q,
    model_constants,
    optimal_portfolio,
    q_objective,
)
from .robustness import (
    LawPath,
    PerturbationSchedule,
    RobustnessReport,
    ToleranceSpec,
    check_convergence,
    make_schedule,
    partial_mean_diagnostic,
    run_sweep,
)
from .sampling import mc_expected_utility, sample_mixing, sample_nmvm

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AtomicGgc",
    "DensityGridSpec",
    "DistanceReport",
    "FiniteGammaConvolution",
    "Gig",
    "LawPath",
    "MarketSpec",
    "ModelConstants",
    "NmvmModel",
    "PerturbationSchedule",
    "PortfolioSolution",
    "RobustnessReport",
    "ThorinPair",
    "ToleranceSpec",
    "as_gamma_convolution",
    "as_thorin",
    "atomic",
    "check_convergence",
    "density",
    "distance_report",
    "expected_utility",
    "fortet_mourier_bracket",
    "gamma",
    "integrability_number",
    "kolmogorov",
    "laplace",
    "make_schedule",
    "mc_expected_utility",
    "mean",
    "minimize_q",
    "model_constants",
    "moschopoulos_bound",
    "optimal_portfolio",
    "partial_mean_diagnostic",
    "q_objective",
    "run_sweep",
    "sample_mixing",
    "sample_nmvm",
    "thorin_partial_mean",
    "total_variation",
    "wiener_gamma_h",
]
