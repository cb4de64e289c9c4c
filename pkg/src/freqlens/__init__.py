"""freqlens: train static word embeddings from scratch and audit how word
frequency leaks into similarity scores and corpus bias measurements.

The pipeline: build or resample a corpus (:mod:`freqlens.corpus`), train SGNS /
GloVe / FastText embeddings (:mod:`freqlens.train`), then quantify the
frequency-similarity association (:mod:`freqlens.freq`) and its effect on
group-bias scores (:mod:`freqlens.bias`).
"""

__version__ = "0.1.0"

from .bias import (
    BiasReport,
    BootstrapConfig,
    ContextGroups,
    NormEntry,
    bias_experiment,
    bias_we,
    bootstrap_mean_ci,
    filter_targets,
    load_norms,
)
from .corpus import (
    Corpus,
    Provenance,
    ResampleReport,
    Vocabulary,
    balance_frequencies,
    build_vocab,
    encode,
    load_corpus,
    preprocess,
    resample,
    save_corpus,
    shuffle_tokens,
)
from .freq import (
    FrequencyBinning,
    Heatmap,
    PairSample,
    PcaResult,
    RegressionResult,
    RmseResult,
    assign_bins,
    build_rmse_design,
    heatmap,
    ols,
    pca_stratified,
    permutation_baseline,
    rmse,
    sample_pairs,
)
from .store import EmbeddingSet, combine_w_plus_c, persist, restore, similarity
from .train import (
    CooccurrenceTable,
    GridSetting,
    Hyperparams,
    build_cooccurrence,
    enumerate_grid,
    fasttext_pair_loss_grad,
    sgns_pair_loss_grad,
    train_fasttext,
    train_glove,
    train_sgns,
    word_ngrams,
)

__all__ = [
    "BiasReport",
    "BootstrapConfig",
    "ContextGroups",
    "CooccurrenceTable",
    "Corpus",
    "EmbeddingSet",
    "FrequencyBinning",
    "GridSetting",
    "Heatmap",
    "Hyperparams",
    "NormEntry",
    "PairSample",
    "PcaResult",
    "Provenance",
    "RegressionResult",
    "ResampleReport",
    "RmseResult",
    "Vocabulary",
    "assign_bins",
    "balance_frequencies",
    "bias_experiment",
    "bias_we",
    "bootstrap_mean_ci",
    "build_cooccurrence",
    "build_rmse_design",
    "build_vocab",
    "combine_w_plus_c",
    "encode",
    "enumerate_grid",
    "fasttext_pair_loss_grad",
    "filter_targets",
    "heatmap",
    "load_corpus",
    "load_norms",
    "ols",
    "pca_stratified",
    "permutation_baseline",
    "persist",
    "preprocess",
    "resample",
    "restore",
    "rmse",
    "sample_pairs",
    "save_corpus",
    "sgns_pair_loss_grad",
    "shuffle_tokens",
    "similarity",
    "train_fasttext",
    "train_glove",
    "train_sgns",
    "word_ngrams",
]
