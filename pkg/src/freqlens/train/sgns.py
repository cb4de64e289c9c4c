"""Skip-gram with negative sampling, trained by SGD over (input, output) pairs.

For every center position the surrounding words inside a (dynamically shrunk)
window each form one positive pair, padded with ``negatives`` noise words drawn
from the unigram distribution raised to ``cds_exponent``. The input side of a
pair is the neighbor word, the output side the center word, mirroring the
reference implementation.
"""

from __future__ import annotations

import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import expit

from ..corpus import Corpus, Vocabulary
from ..errors import ConfigError
from ..store import EmbeddingSet
from ._kernels import draw_negatives, mix_seed, subword_sgns_epoch
from .params import Hyperparams

DEFAULT_NEG_TABLE_SIZE = 10_000_000
ALPHA_FLOOR = 1e-4


def build_negative_table(
    counts: np.ndarray, cds_exponent: float, size: int = DEFAULT_NEG_TABLE_SIZE
) -> np.ndarray:
    """Sampling table where word w occupies a share of slots proportional to
    count(w) ** cds_exponent. Granularity is 1/size per word."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.size == 0 or counts.sum() <= 0:
        raise ConfigError("cannot build a negative-sampling table from empty counts")
    p = counts**cds_exponent
    cum = np.cumsum(p)
    bounds = np.floor(cum / cum[-1] * size).astype(np.int64)
    bounds[-1] = size
    reps = np.diff(np.concatenate(([0], bounds)))
    return np.repeat(np.arange(len(counts), dtype=np.int32), reps)


def sample_negatives(neg_table: np.ndarray, n: int, seed: int) -> np.ndarray:
    """Draw n samples through the same LCG path the training kernel uses."""
    out = np.empty(n, dtype=np.int32)
    draw_negatives(neg_table, n, mix_seed(seed), out)
    return out


def subsample_keep_probs(counts: np.ndarray, threshold: float) -> np.ndarray:
    """Keep probability per word under frequent-word subsampling.

    keep(w) = (sqrt(f/t) + 1) * t/f clipped to 1, with f the corpus frequency
    of w and t the threshold (reference-implementation formula).
    """
    counts = np.asarray(counts, dtype=np.float64)
    f = counts / counts.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        keep = (np.sqrt(f / threshold) + 1.0) * (threshold / f)
    keep[~np.isfinite(keep)] = 1.0
    return np.minimum(keep, 1.0)


def _normalize_label(label) -> bool:
    if label in ("positive", True, 1):
        return True
    if label in ("negative", False, 0):
        return False
    raise ConfigError(f"label must be 'positive' or 'negative', got {label!r}")


def sgns_pair_loss_grad(w, c, label):
    """Per-pair loss term and exact analytic gradients, in float64.

    Positive pairs contribute -log(sigmoid(w.c)), negative pairs
    -log(sigmoid(-w.c)).
    """
    w = np.asarray(w, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if w.shape != c.shape:
        raise ConfigError(f"dimension mismatch: {w.shape} vs {c.shape}")
    positive = _normalize_label(label)
    x = float(w @ c)
    if positive:
        loss = float(np.logaddexp(0.0, -x))
        dldx = -float(expit(-x))
    else:
        loss = float(np.logaddexp(0.0, x))
        dldx = float(expit(x))
    return loss, dldx * c, dldx * w


def _readonly(a: np.ndarray) -> np.ndarray:
    view = a.view()
    view.setflags(write=False)
    return view


def _identity_subwords(vocab_size: int) -> tuple[np.ndarray, np.ndarray]:
    return (
        np.arange(vocab_size, dtype=np.int32),
        np.arange(vocab_size + 1, dtype=np.int64),
    )


def _validate_training_inputs(corpus: Corpus, vocab: Vocabulary, hp: Hyperparams, method: str):
    if hp.method != method:
        raise ConfigError(f"hyperparams are for method {hp.method!r}, expected {method!r}")
    if len(vocab) == 0:
        raise ConfigError("cannot train on an empty vocabulary")
    if corpus.token_count == 0:
        raise ConfigError("cannot train on an empty corpus")
    if not corpus.is_encoded:
        raise ConfigError("corpus must be encoded against the vocabulary before training")
    tokens = np.asarray(corpus.tokens)
    if int(tokens.max(initial=0)) >= len(vocab) or int(tokens.min(initial=0)) < 0:
        raise ConfigError("corpus contains token IDs outside the vocabulary")


def _shard_bounds(n_sentences: int, workers: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, n_sentences, workers + 1).astype(np.int64)
    return [(int(edges[i]), int(edges[i + 1])) for i in range(workers)]


def _train_on_pairs(
    corpus: Corpus,
    vocab: Vocabulary,
    hp: Hyperparams,
    sub_idx: np.ndarray,
    sub_off: np.ndarray,
    n_rows: int,
    snapshot_sink,
    workers: int,
    progress: bool,
    compose,
    method: str,
) -> EmbeddingSet:
    """Shared SGNS/FastText driver; ``compose`` maps the raw input matrix to
    the per-word target matrix handed to snapshots and the result."""
    V = len(vocab)
    rng = np.random.default_rng(hp.seed)
    W = (rng.random((n_rows, hp.dim), dtype=np.float32) - np.float32(0.5)) / np.float32(hp.dim)
    C = np.zeros((V, hp.dim), dtype=np.float32)
    neg_table = build_negative_table(vocab.counts, hp.cds_exponent)
    if hp.subsample > 0:
        keep = subsample_keep_probs(vocab.counts, hp.subsample)
        use_subsample = True
    else:
        keep = np.ones(V, dtype=np.float64)
        use_subsample = False

    tokens = np.ascontiguousarray(corpus.tokens, dtype=np.int32)
    offsets = np.ascontiguousarray(corpus.offsets, dtype=np.int64)
    n_sent = corpus.n_sentences
    total = float(hp.epochs * corpus.token_count) + 1.0
    loss_per_epoch: list[float] = []

    if workers <= 1:
        state = mix_seed(hp.seed)
        words_done = 0
        for epoch in range(1, hp.epochs + 1):
            t0 = time.perf_counter()
            state, words_done, loss, npairs = subword_sgns_epoch(
                tokens, offsets, 0, n_sent, W, C, sub_idx, sub_off,
                neg_table, keep, use_subsample, hp.window, hp.negatives,
                hp.dynamic_window, hp.learning_rate, ALPHA_FLOOR, total,
                words_done, state,
            )
            state = np.uint64(state)  # numba boxes uint64 returns as Python int
            loss_per_epoch.append(loss)
            if progress:
                rate = corpus.token_count / max(time.perf_counter() - t0, 1e-9)
                print(
                    f"{method} epoch {epoch}/{hp.epochs} loss={loss:.2f} "
                    f"pairs={npairs} words/sec={rate:,.0f}",
                    file=sys.stderr,
                )
            if snapshot_sink is not None:
                snapshot_sink(epoch, _readonly(compose(W)), _readonly(C))
    else:
        # Hogwild-style: shards race on shared parameters, no determinism promise.
        shards = _shard_bounds(n_sent, workers)
        shard_tokens = [int(offsets[hi] - offsets[lo]) for lo, hi in shards]
        states = [mix_seed(hp.seed * 1_000_003 + i + 1) for i in range(workers)]
        done = [0] * workers
        for epoch in range(1, hp.epochs + 1):
            t0 = time.perf_counter()

            def run(i):
                lo, hi = shards[i]
                planned = float(hp.epochs * shard_tokens[i]) + 1.0
                res = subword_sgns_epoch(
                    tokens, offsets, lo, hi, W, C, sub_idx, sub_off,
                    neg_table, keep, use_subsample, hp.window, hp.negatives,
                    hp.dynamic_window, hp.learning_rate, ALPHA_FLOOR, planned,
                    done[i], states[i],
                )
                states[i], done[i] = np.uint64(res[0]), res[1]
                return res[2]

            with ThreadPoolExecutor(max_workers=workers) as pool:
                losses = list(pool.map(run, range(workers)))
            loss_per_epoch.append(float(sum(losses)))
            if progress:
                rate = corpus.token_count / max(time.perf_counter() - t0, 1e-9)
                print(
                    f"{method} epoch {epoch}/{hp.epochs} loss={loss_per_epoch[-1]:.2f} "
                    f"words/sec={rate:,.0f} ({workers} workers)",
                    file=sys.stderr,
                )
            if snapshot_sink is not None:
                snapshot_sink(epoch, _readonly(compose(W)), _readonly(C))

    return EmbeddingSet(
        vocab=vocab,
        W=compose(W),
        C=C,
        method=method,
        hyperparams=hp,
        meta={"loss_per_epoch": loss_per_epoch},
    )


def train_sgns(
    corpus: Corpus,
    vocab: Vocabulary,
    hp: Hyperparams,
    snapshot_sink=None,
    *,
    workers: int = 1,
    progress: bool = False,
) -> EmbeddingSet:
    """Train SGNS embeddings; ``snapshot_sink(epoch, W, C)`` is called with
    read-only views after every epoch (copy them to retain)."""
    _validate_training_inputs(corpus, vocab, hp, "sgns")
    sub_idx, sub_off = _identity_subwords(len(vocab))
    return _train_on_pairs(
        corpus, vocab, hp, sub_idx, sub_off, len(vocab),
        snapshot_sink, workers, progress, compose=lambda W: W, method="sgns",
    )
