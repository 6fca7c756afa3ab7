"""Path groupoids over glued curve complexes, generalized connections,
and measure-aware connection transforms."""

from .groups import (
    GroupCtx,
    GroupElem,
    GroupMismatchError,
    NotEnumerableError,
    counter_seed,
    derive_seed,
    make_group,
)
from .paths import (
    ComplexError,
    CurveComplex,
    DecompositionError,
    GraphSkeleton,
    NotExpressibleError,
    PathError,
    PathWord,
    Segment,
    common_refinement,
    concat,
    equivalent,
    express,
    induce_skeleton,
    is_decomposition,
    is_edge,
    is_refinement,
    parse_path,
    point_at,
    slice_word,
    split_at,
)
from .connections import (
    Connection,
    CylFunction,
    ExplicitConnection,
    LazyHaarConnection,
    eval_cyl,
    project,
)
from .germs import (
    CompletenessError,
    ExtendedGermConnection,
    Germ,
    PointSet,
    QSet,
    QuasiSurface,
    builtin_qset,
    check_germ,
    connections_equal_on,
    extend,
    find_disagreement,
    germ_from_connection,
    qset_all,
    qset_edges,
    qset_points,
    qset_surface,
)
from .morphisms import (
    CriteriaReport,
    GraphicalMorphism,
    Graphomorphism,
    MorphismError,
    check_criteria,
    compose,
    identity_graphomorphism,
    identity_morphism,
    is_injective,
    is_orderable_edge_family,
    map_qset,
    validate_inverse,
)
from .transforms import (
    AdmissibleMap,
    Transform,
    TransformedConnection,
    TransformError,
    bb_related,
    build_transform,
    check_admissible,
    diffeo_transform,
    gauge_transform,
    identity_transform,
    invert_transform,
    npoint_transform,
    pinned_edges,
    weyl_transform,
)
from .measure import (
    EnumerationCapError,
    PushforwardReport,
    StatReport,
    WitnessReport,
    char_moments,
    exact_pushforward,
    nonpreservation_witness,
    statistical_pushforward,
)

__version__ = "0.1.0"
