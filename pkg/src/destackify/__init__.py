"""Divisorialification of tame orbifold charts with diagonalizable stabilizers."""

from .chart import (
    Chart,
    DivisorLabel,
    MatrixGroupAction,
    codim_of_stackiness,
    divisorial_index,
    is_divisorial,
    make_chart,
    matrix_group_stackiness,
    max_divisorial_locus,
    split_representation,
    stabilizer_dual,
)
from .divisorialify import (
    AddGerbeFactor,
    AddTrivialCoordinate,
    Atlas,
    Certificate,
    abelianization_report,
    coarse_smoothness,
    destackify_driver,
    divisorialification,
    functoriality_check,
)
from .ktheory import (
    GradedVectorSpace,
    HModule,
    TorPair,
    cotangent_class_trivial,
    same_cyclic_modular_rep,
    split_graded,
    tor_pair,
)
from .transforms import (
    Blowup,
    Root,
    StackyBlowUpSequence,
    blow_up,
    normalize_sequence,
    rigidify,
    root_stack,
)
from .zlinalg import (
    FinAbGroup,
    in_subgroup,
    quotient_presentation,
    smith_normal_form,
    subgroup_of_order_less_than,
)

__version__ = "0.1.0"

__all__ = [
    "abelianization_report",
    "AddGerbeFactor",
    "AddTrivialCoordinate",
    "Atlas",
    "blow_up",
    "Blowup",
    "Certificate",
    "Chart",
    "coarse_smoothness",
    "codim_of_stackiness",
    "cotangent_class_trivial",
    "destackify_driver",
    "divisorial_index",
    "divisorialification",
    "DivisorLabel",
    "FinAbGroup",
    "functoriality_check",
    "GradedVectorSpace",
    "HModule",
    "in_subgroup",
    "is_divisorial",
    "make_chart",
    "matrix_group_stackiness",
    "MatrixGroupAction",
    "max_divisorial_locus",
    "normalize_sequence",
    "quotient_presentation",
    "rigidify",
    "Root",
    "root_stack",
    "same_cyclic_modular_rep",
    "smith_normal_form",
    "split_graded",
    "split_representation",
    "stabilizer_dual",
    "StackyBlowUpSequence",
    "subgroup_of_order_less_than",
    "tor_pair",
    "TorPair",
]
