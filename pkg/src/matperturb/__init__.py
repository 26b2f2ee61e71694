"""First-order perturbation of matrix powers and the matrix modulus, including singular matrices."""

__version__ = "0.1.0"

from .core import (
    NotHermitianError,
    NotPSDError,
    NumericalError,
    PreconditionError,
    SpectralDecomposition,
    SvdDecomposition,
    apply_function,
    eigh,
    frobenius_norm,
    hadamard,
    matrix_modulus,
    matrix_power,
    numerical_rank,
    spectral_norm,
    svd,
)
from .decomposition import (
    ModulusSplit,
    PerturbationTooLargeError,
    SchurSplit,
    modulus_split,
    psd_iff_schur_complement,
    schur_reassemble,
    schur_split,
)
from .first_order import (
    KernelPresentError,
    ModulusApproxResult,
    PowerApproxResult,
    dk_approx,
    modulus_approx,
    modulus_approx_invertible,
    modulus_approx_psd,
    power_approx,
    power_approx_s,
    power_function,
)
from .loewner import (
    DividedDifferenceMatrix,
    divided_difference,
    power_dd_one,
    sqrt_divided_difference,
    xi_sigma_alpha,
    xi_sigma_plus,
)
from .projectors import ProjectorPair, projector_first_order, spectral_projectors
from .verification import (
    InstanceSpec,
    OrderFitReport,
    error_order_fit,
    fit_order,
    lemma_remark_check,
    random_instance,
    run_campaign,
    wihler_check,
    wihler_sweep,
)
