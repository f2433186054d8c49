"""Stable matching instances, rotation posets, poset realizations under
restricted preference models, and pathwidth-parameterized exact counting,
sampling, and fair-matching selection.
"""

from .errors import CapExceededError, ParseError, ValidationError
from .instance import (
    MAN,
    WOMAN,
    Instance,
    Matching,
    RangeProfile,
    blocking_pairs,
    complete_preferences,
    compute_range,
    format_instance,
    gale_shapley,
    is_stable,
    parse_instance,
    symmetric_shortlists,
)
from .rotations import (
    RULE_1,
    RULE_2,
    Rotation,
    RotationDigraph,
    all_stable_matchings_bruteforce,
    downset_from_matching,
    eliminate,
    exposed_rotations,
    matching_from_downset,
    rotation_digraph,
)
from .posets import (
    Dag,
    check_realization,
    dag_to_dot,
    enumerate_downsets_bruteforce,
    format_dag,
    is_downset,
    parse_dag,
    poset_isomorphic_small,
    transitive_closure,
    transitive_reduction,
)
from .pathdecomp import (
    Extent,
    PathDecomposition,
    construct_path_decomposition,
    extent_of,
    format_decomposition,
    induced_decomposition,
    parse_decomposition,
    pathwidth_exact_tiny,
    to_nice,
    validate_decomposition,
)
from .downsets import (
    count_downsets,
    count_downsets_within,
    descendants,
    sample_downset,
    uniform_int,
)
from .realize import (
    AttrRealization,
    AttributeProfile,
    ListRealization,
    bitonic_sequence,
    construct_instance,
    evaluate_profiles,
    realize_attr6,
    realize_bounded3,
    realize_complete,
    realize_list2inf,
    realize_range,
)
from .fairness import (
    FairnessScores,
    balanced_bruteforce,
    count_stable_matchings,
    median_stable_matching,
    sample_stable_matching,
    sample_stable_matchings,
    sex_equal_bruteforce,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
