"""Fast discrete Laplace transforms and polynomial evaluation in the unit disk.

The package provides near-linear-time application of kernel sums
``f_i = sum_j fhat_j * kappa(y_i, xi_j)`` for asymptotically smooth
kernels, and of generalized polynomials ``f(z) = sum_k fhat_k * z^xi_k``
at nodes in the closed complex unit disk, both certified to a target
accuracy ``epsilon`` in the sense ``||f - ftilde||_inf <= epsilon *
||fhat||_1``.
"""

from .interp import (
    Closure,
    Interval,
    InterpBasis,
    chebyshev_points,
    interp_error_sup,
    lagrange_matrix,
    make_basis,
)
from .partition import (
    DyadicPartition,
    band_bounds,
    band_index,
    band_indices,
    interp_order,
    make_partition,
)
from .kernels import (
    Kernel,
    bessel_half_kernel,
    exp_kernel,
    kernel_block,
    scaled_derivative_fd,
    smoothness_bound,
)
from .laplace import LaplacePlan, general_interp_order, make_plan, naive_apply
from .fourier import DirectBackend, NfftBackend, calibrated_cutoff, make_backend
from .diskeval import (
    DiskPlan,
    PolarSplit,
    hadamard_block_identity_check,
    make_disk_plan,
    naive_disk_apply,
    naive_disk_apply_adjoint,
    polar_split,
)
from .cli import BenchRecord, TestData, gen_testdata, relative_error

__version__ = "0.1.0"

__all__ = [
    "Closure",
    "Interval",
    "InterpBasis",
    "chebyshev_points",
    "interp_error_sup",
    "lagrange_matrix",
    "make_basis",
    "DyadicPartition",
    "band_bounds",
    "band_index",
    "band_indices",
    "interp_order",
    "make_partition",
    "Kernel",
    "bessel_half_kernel",
    "exp_kernel",
    "kernel_block",
    "scaled_derivative_fd",
    "smoothness_bound",
    "LaplacePlan",
    "general_interp_order",
    "make_plan",
    "naive_apply",
    "DirectBackend",
    "NfftBackend",
    "calibrated_cutoff",
    "make_backend",
    "DiskPlan",
    "PolarSplit",
    "hadamard_block_identity_check",
    "make_disk_plan",
    "naive_disk_apply",
    "naive_disk_apply_adjoint",
    "polar_split",
    "BenchRecord",
    "TestData",
    "gen_testdata",
    "relative_error",
]
