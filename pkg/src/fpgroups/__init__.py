"""Toolkit for finitely presented groups at desk scale.

Core pieces: free-group word algebra, presentation constructors (doubles,
centralizing HNN extensions, split extensions by free groups, the Rips
construction), metric small-cancellation analysis with Dehn's algorithm,
compositional word-problem solvers, embedding homomorphisms into direct
products, subgroup-distortion and growth experiments, and van Kampen area
search.
"""

from .errors import (
    AlphabetMismatchError,
    BudgetExceededError,
    CheckFailedError,
    NameCollisionError,
    ToolkitError,
    ValidationError,
    WordSyntaxError,
)
from .words import (
    Alphabet,
    Word,
    concat,
    cyclic_reduce,
    exponent_sum,
    format_word,
    invert,
    parse_word,
    reduce,
)
from .presentations import (
    FreeAction,
    Presentation,
    SubgroupSpec,
    catalog_names,
    direct_product,
    double,
    example_catalog,
    format_presentation,
    free_product,
    hnn_centralizing,
    load_presentation,
    parse_presentation,
    rips,
    save_presentation,
    semidirect_free,
)
from .smallcanc import (
    DehnIndex,
    MetricReport,
    PieceReport,
    build_dehn_index,
    check_metric,
    dehn_reduce,
    is_trivial_dehn,
    pieces,
)
from .solvers import (
    DirectProductSolver,
    FreeAbelianSolver,
    FreeProductSolver,
    FreeSolver,
    SmallCancellationSolver,
    Solver,
    SplitExtensionSolver,
    StableLetter,
    collect,
    is_identity,
    solver_from_config,
    syllable_normal_form,
)
from .growth import (
    AUTOMORPHISM_CATALOG,
    FreeAutomorphism,
    GrowthReport,
    catalog_automorphism,
    classify_growth,
    conjugate_distortion,
    detect_periodic_conjugacy,
    distortion_sequence,
    double_test_word,
    iterate_aut,
    length_matrix_oracle,
)
from .area import (
    AreaResult,
    Budget,
    area_experiment,
    area_search,
    loglog_slope,
    stallings_experiment,
    stallings_is_trivial,
    stallings_reduce,
    trace_from_jsonl,
    trace_to_jsonl,
)
from .stallings import (
    ReductionTrace,
    TraceStep,
    is_single_application,
    replay_trace,
    stallings_presentation,
)
from .homomorphisms import (
    EmbeddingPackage,
    EmbeddingSolver,
    Homomorphism,
    QuotientData,
    apply,
    build_double_embedding,
    build_hnn_embedding,
    build_semidirect_embedding,
    compose,
    embedding_to_dict,
    injectivity_probe,
    is_trivial_via_embedding,
    load_embedding,
    relabel_solver,
    save_embedding,
    semidirect_to_direct,
    verify_hom,
)

__version__ = "0.1.0"
