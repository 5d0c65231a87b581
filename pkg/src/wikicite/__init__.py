"""Journal citations from MediaWiki dumps: cite journal extraction, an
article x journal count matrix, NMF soft clustering, cluster bush and report."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .bush import ClusterBush, build_bush, cluster_overlap, render_bush_svg
from .dump import PageStream, WikiPage, open_dump_stream
from .lexicon import (
    JournalLexicon,
    NormalizedJournal,
    bundled_lexicon_path,
    load_lexicon,
    normalize_journal,
)
from .matrix import (
    SparseCountMatrix,
    build_matrix,
    exclude_journals,
    matrix_stats,
    top_cited_journals,
)
from .nmf import (
    NmfModel,
    factorize,
    multiplicative_step,
    reconstruction_error,
    sweep_model_sizes,
    top_loadings,
)
from .report import DumpSummary, render_html_report, summarize_dump, write_growth_csv
from .wikitext import (
    CitationInstance,
    TemplateInstance,
    clean_field_value,
    extract_citations,
    parse_templates,
)
