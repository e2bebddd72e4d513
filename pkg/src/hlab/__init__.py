"""Attractors of contractive systems, coding maps, and lattice fixed points."""

from .attractor import (
    AttractorApprox,
    CylinderApprox,
    attractor_by_words,
    cylinder,
    hb_step,
    iterate_attractor,
    word_fixed_point,
)
from .coding import (
    CodedPoint,
    check_pi_lipschitz,
    check_semiconjugacy,
    code_point,
    disconnectedness_probe,
    injectivity_search,
    inverse_modulus_check,
)
from .errors import (
    CapExceeded,
    DimensionMismatch,
    MismatchBeyondDepth,
    SpecFormatError,
    UnknownIndex,
)
from .ifs import (
    AffineContraction,
    Box,
    IifsSpec,
    ParametricFamily,
    PropertyReport,
    SscReport,
    apply_map,
    check_locally_finite,
    check_non_overlapping,
    check_strongly_non_overlapping,
    compose_word,
    load_spec,
    spec_from_dict,
    spec_to_dict,
    ssc_constants,
)
from .lattice import (
    GfpResult,
    brute_force_fixed_subsets,
    check_continuity_premises,
    f_union,
    fractional_shift_counterexample,
    shrinking_images_counterexample,
    tk_gfp,
)
from .metric import (
    PointCloud,
    diameter,
    directed_set_dist,
    epsilon_prune,
    hausdorff_dist,
    min_set_dist,
    point_dist,
)
from .words import (
    EMPTY,
    Word,
    WordPrefix,
    concat,
    first_mismatch,
    parse_word,
    right_shift,
    word_metric,
)

__version__ = "0.1.0"
