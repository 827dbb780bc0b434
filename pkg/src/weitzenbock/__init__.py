"""Kernel of the Weitzenboeck derivation d(x_i) = x_{i-1} via Casimir elements and tau maps."""

from .casimir import (
    RealizedModule,
    StringModule,
    TauDecomposition,
    casimir_element,
    check_dual,
    euler_casimir,
    gradient_module,
    standard_casimir,
    string_module,
    tau,
    tau_decompose,
)
from .derivation import LinearDerivation, apply, commutator, isobaric_components, order, raising, toral, weitzenboeck
from .oracle import cross_check, kernel_slice, slice_basis, subalgebra_slice_dim
from .poly import (
    Poly,
    add,
    degree,
    format_poly,
    is_homogeneous,
    is_isobaric,
    mul,
    normalize_primitive,
    parse_poly,
    partial,
    scale,
    weight,
    weight_of_monomial,
)
from .solver import KernelResult, SolverConfig, compute_kernel, minimize, verify_result
from .subalgebra import (
    GeneratorInfo,
    Signature,
    SubalgebraBasis,
    acceptable_set,
    candidate_products,
    is_member,
    signature,
    signature_solutions,
)

__version__ = "0.1.0"
