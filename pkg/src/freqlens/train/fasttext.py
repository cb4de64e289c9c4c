"""FastText-style subword embeddings: SGNS where the input-side vector of a
word is the sum of its own vector and its character n-gram vectors.

N-grams are taken from the word wrapped in '<' and '>' boundary markers and
hashed into a fixed number of bucket rows with 32-bit FNV-1a. With
``fasttext_buckets == 0`` the model degenerates to plain SGNS.
"""

from __future__ import annotations

import numpy as np

from ..corpus import Corpus, Vocabulary
from ..errors import ConfigError
from ..store import EmbeddingSet
from .params import Hyperparams
from .sgns import _normalize_label, _train_on_pairs, _validate_training_inputs, sgns_pair_loss_grad

FNV_OFFSET = 2166136261
FNV_PRIME = 16777619


def fnv1a_32(data: bytes) -> int:
    """32-bit FNV-1a hash."""
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFF
    return h


def word_ngrams(word: str, nmin: int = 3, nmax: int = 6) -> list[str]:
    """Unique character n-grams of '<word>' with lengths nmin..nmax,
    in (length, position) enumeration order."""
    s = f"<{word}>"
    out: list[str] = []
    seen: set[str] = set()
    for n in range(nmin, nmax + 1):
        for i in range(len(s) - n + 1):
            g = s[i : i + n]
            if g not in seen:
                seen.add(g)
                out.append(g)
    return out


def ngram_bucket(ngram: str, buckets: int) -> int:
    return fnv1a_32(ngram.encode("utf-8")) % buckets


def build_subword_index(vocab: Vocabulary, hp: Hyperparams) -> tuple[np.ndarray, np.ndarray, int]:
    """CSR map word ID -> its input rows: the word's own row followed by its
    n-gram bucket rows (offset by the vocabulary size)."""
    V = len(vocab)
    if hp.fasttext_buckets == 0:
        return (
            np.arange(V, dtype=np.int32),
            np.arange(V + 1, dtype=np.int64),
            V,
        )
    idx: list[int] = []
    off = np.empty(V + 1, dtype=np.int64)
    off[0] = 0
    for i, word in enumerate(vocab.words):
        idx.append(i)
        for g in word_ngrams(word, hp.fasttext_ngram_min, hp.fasttext_ngram_max):
            idx.append(V + ngram_bucket(g, hp.fasttext_buckets))
        off[i + 1] = len(idx)
    return np.asarray(idx, dtype=np.int32), off, V + hp.fasttext_buckets


def fasttext_pair_loss_grad(rows: np.ndarray, c: np.ndarray, label):
    """Pair loss under the summed-n-gram parameterization.

    ``rows`` stacks the constituent input vectors (own + n-gram rows); the
    effective input vector is their sum, so every constituent row shares the
    same gradient. Returns (loss, grad_rows, grad_c).
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    c = np.asarray(c, dtype=np.float64)
    if rows.shape[1] != c.shape[0]:
        raise ConfigError(f"dimension mismatch: {rows.shape} vs {c.shape}")
    _normalize_label(label)
    loss, grad_w, grad_c = sgns_pair_loss_grad(rows.sum(axis=0), c, label)
    return loss, np.tile(grad_w, (rows.shape[0], 1)), grad_c


def train_fasttext(
    corpus: Corpus,
    vocab: Vocabulary,
    hp: Hyperparams,
    snapshot_sink=None,
    *,
    workers: int = 1,
    progress: bool = False,
) -> EmbeddingSet:
    """Train FastText embeddings; snapshots and the returned target matrix hold
    the composed per-word vectors (own row + n-gram rows summed)."""
    _validate_training_inputs(corpus, vocab, hp, "fasttext")
    sub_idx, sub_off, n_rows = build_subword_index(vocab, hp)
    V = len(vocab)

    if hp.fasttext_buckets == 0:
        compose = lambda W: W  # noqa: E731 - degenerates to plain SGNS
    else:

        def compose(W: np.ndarray) -> np.ndarray:
            return np.add.reduceat(W[sub_idx], sub_off[:-1], axis=0)

    return _train_on_pairs(
        corpus, vocab, hp, sub_idx, sub_off, n_rows,
        snapshot_sink, workers, progress, compose=compose, method="fasttext",
    )
