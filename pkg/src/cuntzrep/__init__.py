"""Exact computational kernel for Cuntz-relation representations on symbol spaces.

The package covers: exact radical scalars, words and cylinders, step
functions (the dense operator domain), cylinder measures with pushforwards
and Radon-Nikodym derivatives, monic systems with the induced isometries,
classification (irreducibility, disjointness, equivalence, commutants), a
finite-depth universal representation on square-root densities, and atomic
representations on eventually-constant words.
"""

from .atomic import AtomVector, atom_mass, atomic_apply, atomic_monicity_report, atomic_rn_value
from .classify import (
    BoundaryOperators,
    EquivalenceVerdict,
    FixedSpaceResult,
    boundary_matrices,
    commutant_basis,
    disjointness_check,
    equivalence_check,
    fixed_point_space,
    irreducibility_check,
)
from .errors import (
    CertificateError,
    MethodDisagreementError,
    NotAbsolutelyContinuousError,
    ResolutionError,
    ValidationError,
)
from .measures import (
    AtomicTailMeasure,
    AtomicTailSpec,
    CylinderMeasure,
    MarkovMeasure,
    MarkovSpec,
    ProductMeasure,
    ProductSpec,
    affinity,
    consistency_check,
    inner_product,
    integrate,
    rn_derivative,
    stationary_vector,
)
from .monic import (
    MonicSystem,
    apply_adjoint,
    apply_isometry,
    apply_word_operator,
    cuntz_relations_check,
    kakutani_monic_system,
    markov_monic_system,
    projection,
    validate_monic_system,
    vector_measure,
)
from .scalars import RadicalSum, Rational, Scalar, sqrt_positive_rational, to_float
from .stepfuncs import StepFunction
from .universal import (
    CommutantFamily,
    SigmaVector,
    commutant_family_check,
    embed,
    inner_product_depth,
    intertwine_check,
    universal_adjoint,
    universal_isometry,
    universal_projection,
)
from .words import TailPoint, cylinder_relation, parse_word, tail_prepend, tail_shift

__version__ = "0.1.0"
