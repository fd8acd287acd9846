"""Fractional classification of documents into a two-level category scheme,
by journal membership and by the profile of citing documents, with tools to
compare the two: flow matrices, citation indicators, community detection,
force-directed layout, and a seeded synthetic corpus generator.
"""

from .assignments import (
    Assignment,
    AssignmentSet,
    SYSTEM_ASJC,
    SYSTEM_U1,
    iter_assignments,
    read_assignments,
    write_assignments,
)
from .asjc import classify_asjc, classify_asjc_fractional, journal_vector, redistribute
from .citer import (
    ThresholdPolicy,
    aggregate_references,
    apply_threshold,
    classify_u1f08,
    classify_u1f08_all,
    reference_profile,
)
from .corpus import (
    Area,
    Category,
    CitationIndex,
    Corpus,
    Document,
    Journal,
    ParseError,
    Scheme,
    ValidationError,
    build_citation_index,
    corpus_summary,
    load_corpus,
    load_scheme,
    ref_stats_by_year,
    write_corpus,
    write_scheme,
)
from .flow import (
    ClassFlowStats,
    FlowAccumulator,
    FlowMatrix,
    SummaryStats,
    class_flow_stats,
    document_flow,
    flow_matrix,
    summary_stats,
    top_links,
)
from .indicators import (
    BaselineTable,
    ExcellenceThresholds,
    category_baselines,
    excellence_flags,
    excellence_overlap,
    excellence_thresholds,
    ni_abs_diff_series,
    ni_std_by_area,
    ni_table,
    normalized_impact,
)
from .netgraph import (
    FlowGraph,
    Layout,
    LayoutParams,
    Partition,
    build_flow_graph,
    detect_communities,
    export_graph,
    linlog_layout,
    load_graph,
    modularity,
)
from .syngen import SynParams, generate_corpus, oracle_classify, oracle_flow
from .weights import collapse_to_areas, normalize, support

__version__ = "0.1.0"

__all__ = [
    "Area",
    "Assignment",
    "AssignmentSet",
    "BaselineTable",
    "Category",
    "CitationIndex",
    "ClassFlowStats",
    "Corpus",
    "Document",
    "ExcellenceThresholds",
    "FlowAccumulator",
    "FlowGraph",
    "FlowMatrix",
    "Journal",
    "Layout",
    "LayoutParams",
    "ParseError",
    "Partition",
    "Scheme",
    "SummaryStats",
    "SynParams",
    "SYSTEM_ASJC",
    "SYSTEM_U1",
    "ThresholdPolicy",
    "ValidationError",
    "aggregate_references",
    "apply_threshold",
    "build_citation_index",
    "build_flow_graph",
    "category_baselines",
    "class_flow_stats",
    "classify_asjc",
    "classify_asjc_fractional",
    "classify_u1f08",
    "classify_u1f08_all",
    "collapse_to_areas",
    "corpus_summary",
    "detect_communities",
    "document_flow",
    "excellence_flags",
    "excellence_overlap",
    "excellence_thresholds",
    "export_graph",
    "flow_matrix",
    "generate_corpus",
    "iter_assignments",
    "journal_vector",
    "linlog_layout",
    "load_corpus",
    "load_graph",
    "load_scheme",
    "modularity",
    "ni_abs_diff_series",
    "ni_std_by_area",
    "ni_table",
    "normalize",
    "normalized_impact",
    "oracle_classify",
    "oracle_flow",
    "read_assignments",
    "redistribute",
    "ref_stats_by_year",
    "reference_profile",
    "summary_stats",
    "support",
    "top_links",
    "write_assignments",
    "write_corpus",
    "write_scheme",
]
