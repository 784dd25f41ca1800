"""Classification of Boolean functions modulo Reed-Muller codes under the
affine general linear group, with applications: class-number tables, a
near-bent census, and covering-radius bounds from randomized coset searches.
"""

__version__ = "0.1.0"

from .errors import (
    RmclassError,
    InvalidInputError,
    DependencyMissingError,
    ResourceRefusedError,
    InternalConsistencyError,
)
from .bfcore import (
    BooleanFunction,
    SpaceSpec,
    WalshSpectrum,
    mobius,
    walsh,
    is_near_bent,
    inner_product,
    complement_transform,
    reduce_mod_rm,
    homogeneous_part,
)
from .group import (
    AffineMap,
    SubgroupOracle,
    act,
    compose,
    generators_stu,
    group_order,
    identity,
    inverse,
    random_affine,
    subgroup_order,
)
from .classify import (
    BoundaryAction,
    ClassRecord,
    OrbitConfig,
    OrbitSet,
    boundary_act,
    classify_space,
    descend,
    generator_set,
    orbit_enumerate,
    stab_histogram,
    stab_order_from_class_formula,
)
from .census import (
    ClassCountTable,
    burnside_count,
    duality_check,
    fix_count,
    near_bent_census,
    table_render,
)
from .covrad import (
    GeneratorMatrix,
    TrialReport,
    covering_radius_bound,
    distance,
    exact_coset_min_weight,
    exact_covering_radius_rm1,
    pivoting,
    reduce,
    rm_generator_matrix,
)
