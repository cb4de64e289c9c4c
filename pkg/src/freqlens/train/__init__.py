"""Embedding trainers: SGNS, GloVe and FastText, plus the hyperparameter grid."""

from .fasttext import (
    build_subword_index,
    fasttext_pair_loss_grad,
    fnv1a_32,
    ngram_bucket,
    train_fasttext,
    word_ngrams,
)
from .glove import CooccurrenceTable, build_cooccurrence, glove_weight, train_glove
from .params import (
    GridSetting,
    Hyperparams,
    enumerate_grid,
    parse_setting_identifier,
    setting_identifier,
)
from .sgns import (
    build_negative_table,
    sample_negatives,
    sgns_pair_loss_grad,
    subsample_keep_probs,
    train_sgns,
)

__all__ = [
    "CooccurrenceTable",
    "GridSetting",
    "Hyperparams",
    "build_cooccurrence",
    "build_negative_table",
    "build_subword_index",
    "enumerate_grid",
    "fasttext_pair_loss_grad",
    "fnv1a_32",
    "glove_weight",
    "ngram_bucket",
    "parse_setting_identifier",
    "sample_negatives",
    "setting_identifier",
    "sgns_pair_loss_grad",
    "subsample_keep_probs",
    "train_fasttext",
    "train_glove",
    "train_sgns",
    "word_ngrams",
]
