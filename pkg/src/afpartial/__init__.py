"""Finite-dimensional models of AF-algebras as partial crossed products.

Standard circle actions on direct sums of matrix algebras, the regularity
maps lambda and theta, standard homomorphisms, UHF towers and the odometer,
together with numerical certificates for the identities relating them.
"""

from .errors import (
    AlgebraError,
    AxiomViolation,
    BadLevels,
    CapExceeded,
    CovarianceViolation,
    DomainViolation,
    InvalidDigit,
    NotUnitModulus,
    OutOfDomain,
    OutOfRange,
    PlacementError,
    RegularityViolation,
    ShapeMismatch,
)
from .grading import GradedAlgebra, act, fourier_project, semi_saturated_check, spectral_project
from .matblock import (
    BlockElement,
    BlockShape,
    add,
    adjoint,
    identity,
    matrix_unit,
    mul,
    op_norm,
    random_element,
    span_dimension,
    zeros,
)
from .odometer import (
    FactorSeq,
    Word,
    e_of_word,
    index_j,
    odometer_inverse_step,
    odometer_step,
    orbit,
    word_of_index,
)
from .regular import (
    RegularityData,
    commutant_dimension,
    lambda_map,
    masa_check,
    theta_map,
    verify_theta_lemma,
    verify_regular_axioms,
)
from .report import CheckReport
from .tower import (
    StandardHomSpec,
    TowerSpec,
    UhfSpec,
    apply_hom,
    check_covariant,
    check_injective,
    check_regular_hom,
    check_shift_restriction,
    push,
    uhf_tower,
)

__version__ = "0.1.0"
