"""Schreier structures on even-regular graphs and invariant random Schreier graphs."""
from .errors import (
    BudgetExhausted,
    GraphFormatError,
    InternalError,
    OutsideGraphError,
    PreconditionError,
    SchreierError,
    SizeLimitError,
)
from .words import Word, reduced_words
from .graph_core import (
    Neighborhood,
    RootedMultigraph,
    automorphism_generators,
    automorphisms_fixing_root,
    ball,
    canonical_key,
    isomorphic,
    is_rigid,
    neighborhood_from_key,
    orbit_weight,
    orbits_fixing_root,
)
from .schreier import (
    SchreierGraph,
    a_cycles,
    contains,
    forget,
    from_permutations,
    from_subgroup,
    in_subgroup,
    read_word,
    reverse_cycle,
    reverse_cycles,
    schreier_generators,
    shift_root,
    validate,
)
from .factorize import close_up, euler_tour, extend_structure, schreier_structure, two_factorize
from .lazy import from_selector, grandfather, line, tree, z2, z2_with_diagonal
from .measures import (
    CylinderMeasure,
    ReversalModel,
    check_shift_invariance,
    check_unimodular,
    distinctness_witness,
    estimate_cylinder,
    exact_reversal_measure,
    pushforward_forget,
    reversal_family_count,
    sofic_lift,
    total_variation,
    uniform_root_measure,
)

__version__ = "0.1.0"
