"""Citation-network disruption analytics.

Library surface re-exported here; the batch CLI lives in cdengine.cli.
"""

from .corpus import (
    AuthorCareer,
    CitationGraph,
    Corpus,
    DocumentRecord,
    FieldYearTable,
    FilterSpec,
    IngestOptions,
    TeamStats,
    ValidationReport,
    author_careers,
    field_year_aggregates,
    filter_corpus,
    growth_regressors,
    ingest,
    load_corpus,
    save_corpus,
)
from .disruption import (
    DisruptionConfig,
    DisruptionScore,
    DisruptionTable,
    JRule,
    batch_cd,
    bucket_conservation,
    cd_index,
    cd_index_summation_oracle,
    classify_citers,
    di_variants,
)
from .normalize import NormalizationContext, normalized_cd, normalized_values
from .nullmodel import (
    AtypicalResult,
    RewireConfig,
    ZScoreTable,
    atypical_combinations,
    cd_zscores,
    cited_key_pairs,
    rewire,
    z_stats,
)
from .knowledge import (
    age_of_work_cited,
    diversity_of_work_cited,
    embedding_table_vectorizer,
    hashed_title_vectorizer,
    members_by_field_year,
    normalized_entropy,
    self_citation_ratio,
    semantic_diversity,
    top1pct_share,
    top_cited_membership,
)
from .text import (
    TokenPipelineConfig,
    default_stopwords,
    load_pos_lexicon,
    load_stopwords,
    preprocess,
    type_token_ratio,
    verb_frequency,
    word_pair_novelty,
)
from .stats import (
    FitResult,
    RegressionSpec,
    ols_fit,
    predict,
    predict_year_series,
    shapley_owen,
)

__version__ = "0.1.0"
