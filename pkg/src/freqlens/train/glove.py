"""GloVe: weighted least-squares factorization of log co-occurrence counts,
optimized with per-element AdaGrad over the shuffled nonzero entries."""

from __future__ import annotations

import sys
import time
from typing import Iterator

import numpy as np

from ..corpus import Corpus, Vocabulary
from ..errors import ConfigError
from ..store import EmbeddingSet
from ._kernels import cooc_emit, glove_objective, glove_pass
from .params import Hyperparams
from .sgns import _readonly

_CHUNK_PAIRS = 20_000_000


class CooccurrenceTable:
    """Sparse symmetric map (i, j) -> weight, stored once per unordered pair.

    Keys are sorted canonical codes min(i,j) * V + max(i,j); lookups are
    symmetric. Weights accumulate 1/d over every co-occurrence at distance d.
    """

    def __init__(self, keys: np.ndarray, weights: np.ndarray, vocab_size: int):
        self.keys = np.asarray(keys, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.vocab_size = int(vocab_size)
        if self.keys.shape != self.weights.shape:
            raise ConfigError("keys and weights must align")

    @property
    def nnz(self) -> int:
        return len(self.keys)

    def weight(self, i: int, j: int) -> float:
        a, b = (i, j) if i <= j else (j, i)
        key = a * self.vocab_size + b
        pos = np.searchsorted(self.keys, key)
        if pos < len(self.keys) and self.keys[pos] == key:
            return float(self.weights[pos])
        return 0.0

    def pair_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Canonical (i, j) index arrays with i <= j."""
        ii = (self.keys // self.vocab_size).astype(np.int32)
        jj = (self.keys % self.vocab_size).astype(np.int32)
        return ii, jj

    def items(self) -> Iterator[tuple[int, int, float]]:
        ii, jj = self.pair_arrays()
        for a, b, x in zip(ii, jj, self.weights):
            yield int(a), int(b), float(x)


def _aggregate(keys: np.ndarray, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(keys) == 0:
        return keys.astype(np.int64), vals.astype(np.float64)
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    vals = vals[order].astype(np.float64)
    uniq_mask = np.empty(len(keys), dtype=bool)
    uniq_mask[0] = True
    np.not_equal(keys[1:], keys[:-1], out=uniq_mask[1:])
    starts = np.flatnonzero(uniq_mask)
    return keys[starts], np.add.reduceat(vals, starts)


def build_cooccurrence(corpus: Corpus, vocab: Vocabulary, window: int) -> CooccurrenceTable:
    """Count within-window pairs with 1/distance weighting, per sentence."""
    if not corpus.is_encoded:
        raise ConfigError("corpus must be encoded against the vocabulary")
    if window < 1:
        raise ConfigError("window must be >= 1")
    V = len(vocab)
    tokens = np.ascontiguousarray(corpus.tokens, dtype=np.int32)
    offsets = np.ascontiguousarray(corpus.offsets, dtype=np.int64)
    lengths = np.diff(offsets)
    # Exact per-sentence pair counts bound each emit buffer.
    pair_counts = np.where(
        lengths > window,
        window * lengths - window * (window + 1) // 2,
        lengths * (lengths - 1) // 2,
    )
    if pair_counts.sum() == 0:
        return CooccurrenceTable(np.empty(0, np.int64), np.empty(0, np.float64), V)

    chunk_keys: list[np.ndarray] = []
    chunk_vals: list[np.ndarray] = []
    s = 0
    n_sent = corpus.n_sentences
    cum = np.concatenate(([0], np.cumsum(pair_counts)))
    while s < n_sent:
        e = int(np.searchsorted(cum, cum[s] + _CHUNK_PAIRS, side="right")) - 1
        e = max(e, s + 1)
        budget = int(cum[e] - cum[s])
        keys = np.empty(budget, dtype=np.int64)
        vals = np.empty(budget, dtype=np.float64)
        n = cooc_emit(tokens, offsets, s, e, window, V, keys, vals)
        k, v = _aggregate(keys[:n], vals[:n])
        chunk_keys.append(k)
        chunk_vals.append(v)
        s = e
    keys, weights = _aggregate(np.concatenate(chunk_keys), np.concatenate(chunk_vals))
    return CooccurrenceTable(keys, weights, V)


def glove_weight(x: float, x_max: float = 100.0, alpha: float = 0.75) -> float:
    """Loss weighting f(x) = min(1, (x / x_max) ** alpha)."""
    return min(1.0, (x / x_max) ** alpha)


def train_glove(
    cooc: CooccurrenceTable,
    vocab: Vocabulary,
    hp: Hyperparams,
    snapshot_sink=None,
    *,
    workers: int = 1,
    progress: bool = False,
) -> EmbeddingSet:
    """AdaGrad-fit W, C and bias terms to the weighted log-count objective.

    ``hp.epochs`` is the iteration count; each iteration sweeps all nonzero
    entries in a fresh shuffled order, visiting both (i, j) and (j, i).
    ``snapshot_sink(iteration, W, C)`` fires once per iteration (a barrier in
    multi-worker mode). The returned set keeps biases and the per-iteration
    objective values in ``meta``. With ``workers > 1`` the shuffled entries
    are sharded across racy threads and determinism is not promised.
    """
    if hp.method != "glove":
        raise ConfigError(f"hyperparams are for method {hp.method!r}, expected 'glove'")
    if cooc.nnz == 0:
        raise ConfigError("cannot train glove on an empty co-occurrence table")
    if cooc.vocab_size != len(vocab):
        raise ConfigError("co-occurrence table was built against a different vocabulary")

    V, dim = len(vocab), hp.dim
    rng = np.random.default_rng(hp.seed)
    scale = 0.5 / dim
    W = rng.uniform(-scale, scale, size=(V, dim))
    C = rng.uniform(-scale, scale, size=(V, dim))
    bw = rng.uniform(-scale, scale, size=V)
    bc = rng.uniform(-scale, scale, size=V)
    gW = np.ones((V, dim))
    gC = np.ones((V, dim))
    gbw = np.ones(V)
    gbc = np.ones(V)

    ii, jj = cooc.pair_arrays()
    logx = np.log(cooc.weights)
    fx = np.minimum(1.0, (cooc.weights / hp.glove_x_max) ** hp.glove_alpha)

    loss_history: list[float] = []
    for it in range(1, hp.epochs + 1):
        t0 = time.perf_counter()
        order = rng.permutation(cooc.nnz).astype(np.int64)
        if workers <= 1:
            glove_pass(order, ii, jj, logx, fx, W, C, bw, bc, gW, gC, gbw, gbc,
                       hp.learning_rate)
        else:
            from concurrent.futures import ThreadPoolExecutor

            shards = np.array_split(order, workers)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(
                    lambda shard: glove_pass(shard, ii, jj, logx, fx, W, C, bw, bc,
                                             gW, gC, gbw, gbc, hp.learning_rate),
                    shards,
                ))
        objective = float(glove_objective(ii, jj, logx, fx, W, C, bw, bc))
        loss_history.append(objective)
        if progress:
            rate = cooc.nnz / max(time.perf_counter() - t0, 1e-9)
            print(
                f"glove iteration {it}/{hp.epochs} objective={objective:.4f} "
                f"entries/sec={rate:,.0f}",
                file=sys.stderr,
            )
        if snapshot_sink is not None:
            snapshot_sink(it, _readonly(W), _readonly(C))

    return EmbeddingSet(
        vocab=vocab,
        W=W,
        C=C,
        method="glove",
        hyperparams=hp,
        meta={"loss_history": loss_history, "biases": (bw, bc)},
    )
