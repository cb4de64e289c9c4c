"""Sentence corpora: preprocessing, vocabularies, shuffling and frequency resampling.

A :class:`Corpus` is an ordered collection of sentences. It exists in two
stages: a raw stage where tokens are strings (straight out of
:func:`preprocess`) and an encoded stage where tokens are integer IDs under a
:class:`Vocabulary`. Training code consumes the encoded stage; the resampling
and shuffling operations work on either.
"""

from __future__ import annotations

import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, DecodeError, UnknownWordError

_SENTENCE_SPLIT = re.compile(r"[.!?\n]")
# \w is alphanumeric plus underscore; the extra alternative strips the underscore.
_NON_ALNUM = re.compile(r"[^\w]|_", re.UNICODE)


@dataclass(frozen=True)
class Provenance:
    """Where a corpus came from: original text, a shuffle, or a resample."""

    kind: str  # "original" | "shuffled" | "resampled"
    seed: int | None = None
    word: str | None = None
    target: int | None = None

    def describe(self) -> str:
        if self.kind == "shuffled":
            return f"shuffled(seed={self.seed})"
        if self.kind == "resampled":
            return f"resampled(word={self.word}, target={self.target}, seed={self.seed})"
        return "original"


ORIGINAL = Provenance("original")


class Vocabulary:
    """Bijective word <-> ID map with occurrence counts.

    IDs are assigned by descending count with lexicographic tie-break, so a
    vocabulary built from the same counts is always identical.
    """

    def __init__(self, words: Sequence[str], counts: Sequence[int], min_count: int = 0):
        self.words = list(words)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.min_count = int(min_count)
        if len(self.words) != len(self.counts):
            raise ConfigError("words and counts must have equal length")
        self._ids = {w: i for i, w in enumerate(self.words)}
        if len(self._ids) != len(self.words):
            raise ConfigError("vocabulary words must be unique")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._ids

    def id(self, word: str) -> int:
        try:
            return self._ids[word]
        except KeyError:
            raise UnknownWordError(word) from None

    def get(self, word: str) -> int | None:
        return self._ids.get(word)

    def count(self, word: str) -> int:
        return int(self.counts[self.id(word)])

    def save_tsv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("word\tcount\n")
            for w, c in zip(self.words, self.counts):
                fh.write(f"{w}\t{int(c)}\n")

    @classmethod
    def load_tsv(cls, path: str | Path, min_count: int = 0) -> "Vocabulary":
        words, counts = [], []
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != "word\tcount":
                raise ConfigError(f"bad vocabulary header {header!r}, expected 'word\\tcount'")
            for line in fh:
                w, c = line.rstrip("\n").split("\t")
                words.append(w)
                counts.append(int(c))
        return cls(words, counts, min_count=min_count)


class Corpus:
    """Ordered sentences of tokens, stored flat with sentence offsets."""

    def __init__(
        self,
        tokens: list[str] | np.ndarray,
        offsets: np.ndarray,
        provenance: Provenance = ORIGINAL,
        vocab: Vocabulary | None = None,
    ):
        self._tokens = tokens
        self._offsets = np.asarray(offsets, dtype=np.int64)
        self.provenance = provenance
        self.vocab = vocab
        if self._offsets[0] != 0 or self._offsets[-1] != len(tokens):
            raise ConfigError("offsets must start at 0 and end at the token count")

    @classmethod
    def from_sentences(
        cls,
        sentences: Iterable[Sequence[str]],
        provenance: Provenance = ORIGINAL,
    ) -> "Corpus":
        flat: list[str] = []
        offsets = [0]
        for sent in sentences:
            flat.extend(sent)
            offsets.append(len(flat))
        return cls(flat, np.asarray(offsets, dtype=np.int64), provenance)

    @property
    def is_encoded(self) -> bool:
        return isinstance(self._tokens, np.ndarray)

    @property
    def token_count(self) -> int:
        return len(self._tokens)

    @property
    def n_sentences(self) -> int:
        return len(self._offsets) - 1

    @property
    def tokens(self) -> list[str] | np.ndarray:
        """Flat token stream (strings in the raw stage, int32 IDs when encoded)."""
        return self._tokens

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets

    def sentence(self, i: int):
        lo, hi = self._offsets[i], self._offsets[i + 1]
        return self._tokens[lo:hi]

    def sentences(self) -> Iterator:
        for i in range(self.n_sentences):
            yield self.sentence(i)

    def sentence_lengths(self) -> np.ndarray:
        return np.diff(self._offsets)

    def word_counts(self) -> dict[str, int]:
        """Occurrence count per word over the whole corpus."""
        if self.is_encoded:
            assert self.vocab is not None
            bins = np.bincount(self._tokens, minlength=len(self.vocab))
            return {w: int(bins[i]) for i, w in enumerate(self.vocab.words) if bins[i] > 0}
        return dict(Counter(self._tokens))

    def count_of(self, word: str) -> int:
        if self.is_encoded:
            assert self.vocab is not None
            wid = self.vocab.get(word)
            if wid is None:
                return 0
            return int(np.count_nonzero(self._tokens == wid))
        return sum(1 for t in self._tokens if t == word)

    def __repr__(self) -> str:
        stage = "encoded" if self.is_encoded else "raw"
        return (
            f"Corpus({self.n_sentences} sentences, {self.token_count} tokens, "
            f"{stage}, {self.provenance.describe()})"
        )


@dataclass
class ResampleReport:
    """Outcome of a resampling pass targeting one word's frequency."""

    word: str
    count_before: int
    count_after: int
    target: int
    sentences_dropped: int = 0
    sentences_replicated: int = 0
    side_effect_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "count_before": self.count_before,
            "count_after": self.count_after,
            "target": self.target,
            "sentences_dropped": self.sentences_dropped,
            "sentences_replicated": self.sentences_replicated,
            "side_effect_counts": dict(self.side_effect_counts),
        }


def preprocess(docs: Iterable[str | bytes], min_doc_tokens: int = 1) -> Corpus:
    """Normalize a stream of documents into a raw-stage corpus.

    Each document is split into sentences on '.', '!', '?' and newline; every
    non-alphanumeric character becomes whitespace; letters are lowercased.
    Documents whose total token count falls below ``min_doc_tokens`` are
    dropped entirely, as are empty sentences.

    Raises:
        DecodeError: a bytes document is not valid UTF-8.
    """
    flat: list[str] = []
    offsets = [0]
    for doc in docs:
        if isinstance(doc, bytes):
            try:
                doc = doc.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise DecodeError(exc.start, exc.reason) from None
        doc_flat: list[str] = []
        doc_offsets: list[int] = []
        for piece in _SENTENCE_SPLIT.split(doc):
            toks = _NON_ALNUM.sub(" ", piece).lower().split()
            if toks:
                doc_flat.extend(sys.intern(t) for t in toks)
                doc_offsets.append(len(doc_flat))
        if len(doc_flat) >= min_doc_tokens:
            base = len(flat)
            flat.extend(doc_flat)
            offsets.extend(base + off for off in doc_offsets)
    return Corpus(flat, np.asarray(offsets, dtype=np.int64), ORIGINAL)


def build_vocab(corpus: Corpus, min_count: int = 1) -> Vocabulary:
    """Count words and keep those occurring at least ``min_count`` times.

    IDs are assigned by descending count, ties broken lexicographically.
    """
    if corpus.is_encoded:
        raise ConfigError("build_vocab expects a raw-stage corpus")
    counts = Counter(corpus.tokens)
    kept = [(w, c) for w, c in counts.items() if c >= min_count]
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    return Vocabulary([w for w, _ in kept], [c for _, c in kept], min_count=min_count)


def encode(corpus: Corpus, vocab: Vocabulary) -> Corpus:
    """Map a raw corpus onto vocabulary IDs, dropping out-of-vocabulary tokens.

    Sentence boundaries are preserved; sentences may become shorter (or empty)
    where tokens were pruned.
    """
    if corpus.is_encoded:
        raise ConfigError("corpus is already encoded")
    ids = {w: i for i, w in enumerate(vocab.words)}
    flat = np.empty(corpus.token_count, dtype=np.int32)
    keep = np.zeros(corpus.token_count, dtype=bool)
    for i, tok in enumerate(corpus.tokens):
        wid = ids.get(tok)
        if wid is not None:
            flat[i] = wid
            keep[i] = True
    kept_flat = flat[keep]
    # New offsets: cumulative kept-token counts at the old sentence boundaries.
    kept_cum = np.concatenate(([0], np.cumsum(keep)))
    offsets = kept_cum[corpus.offsets]
    return Corpus(kept_flat, offsets.astype(np.int64), corpus.provenance, vocab)


def shuffle_tokens(corpus: Corpus, seed: int) -> Corpus:
    """Globally permute all tokens, re-cut into the original sentence lengths.

    Word frequencies and the sentence-length sequence are preserved exactly;
    all contextual structure is destroyed.
    """
    if corpus.token_count == 0:
        raise ConfigError("cannot shuffle an empty corpus")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(corpus.token_count)
    if corpus.is_encoded:
        shuffled = np.asarray(corpus.tokens)[perm]
    else:
        toks = corpus.tokens
        shuffled = [toks[p] for p in perm]
    return Corpus(shuffled, corpus.offsets.copy(), Provenance("shuffled", seed=seed), corpus.vocab)


def _occurrences_per_sentence(corpus: Corpus, word: str) -> np.ndarray:
    """Number of occurrences of ``word`` in each sentence."""
    n = corpus.n_sentences
    if corpus.is_encoded:
        assert corpus.vocab is not None
        wid = corpus.vocab.get(word)
        if wid is None:
            return np.zeros(n, dtype=np.int64)
        hits = np.flatnonzero(np.asarray(corpus.tokens) == wid)
        sent_idx = np.searchsorted(corpus.offsets, hits, side="right") - 1
        return np.bincount(sent_idx, minlength=n)
    occ = np.zeros(n, dtype=np.int64)
    for i in range(n):
        sent = corpus.sentence(i)
        occ[i] = sum(1 for t in sent if t == word)
    return occ


def _rebuild(corpus: Corpus, keep_mask: np.ndarray, appended: np.ndarray) -> Corpus:
    """New corpus from kept sentences plus sentences appended by index."""
    lengths = corpus.sentence_lengths()
    if corpus.is_encoded:
        toks = np.asarray(corpus.tokens)
        token_keep = np.repeat(keep_mask, lengths)
        parts = [toks[token_keep]]
        new_lengths = [lengths[keep_mask]]
        for s in appended:
            parts.append(toks[corpus.offsets[s] : corpus.offsets[s + 1]])
            new_lengths.append(lengths[s : s + 1])
        flat = np.concatenate(parts) if parts else np.empty(0, dtype=np.int32)
        offsets = np.concatenate(([0], np.cumsum(np.concatenate(new_lengths))))
        return Corpus(flat, offsets, corpus.provenance, corpus.vocab)
    flat: list[str] = []
    offsets_list = [0]
    for i in range(corpus.n_sentences):
        if keep_mask[i]:
            flat.extend(corpus.sentence(i))
            offsets_list.append(len(flat))
    for s in appended:
        flat.extend(corpus.sentence(int(s)))
        offsets_list.append(len(flat))
    return Corpus(flat, np.asarray(offsets_list, dtype=np.int64), corpus.provenance, corpus.vocab)


def resample(
    corpus: Corpus,
    word: str,
    target_count: int,
    seed: int,
    watch: Sequence[str] = (),
) -> tuple[Corpus, ResampleReport]:
    """Drop or replicate sentences containing ``word`` toward a target count.

    Undersampling drops uniformly random containing sentences until the count
    first reaches or falls below the target; oversampling appends uniformly
    random (with replacement) copies of containing sentences until the count
    first reaches or exceeds it. Sentences without the word are never touched.

    Returns the resampled corpus plus a report with exact counts and, for each
    word in ``watch``, the count delta it suffered as a side effect.
    """
    if target_count < 1:
        raise ConfigError("target_count must be >= 1; removing a word outright is not supported")
    occ = _occurrences_per_sentence(corpus, word)
    count_before = int(occ.sum())
    if count_before == 0:
        raise UnknownWordError(word, where="corpus")
    watch_before = {w: corpus.count_of(w) for w in watch}

    rng = np.random.default_rng(seed)
    containing = np.flatnonzero(occ)
    keep = np.ones(corpus.n_sentences, dtype=bool)
    appended = np.empty(0, dtype=np.int64)
    dropped = replicated = 0

    if count_before > target_count:
        order = rng.permutation(containing)
        removed = np.cumsum(occ[order])
        # First index where the running count crosses down to <= target.
        k = int(np.searchsorted(removed, count_before - target_count, side="left")) + 1
        keep[order[:k]] = False
        dropped = k
    elif count_before < target_count:
        deficit = target_count - count_before
        picks: list[np.ndarray] = []
        gained = 0
        while gained < deficit:
            batch = rng.choice(containing, size=max(1, len(containing)), replace=True)
            added = np.cumsum(occ[batch])
            j = int(np.searchsorted(added, deficit - gained, side="left")) + 1
            j = min(j, len(batch))
            picks.append(batch[:j])
            gained += int(added[j - 1])
        appended = np.concatenate(picks)
        replicated = len(appended)

    new_corpus = _rebuild(corpus, keep, appended)
    new_corpus.provenance = Provenance("resampled", seed=seed, word=word, target=target_count)
    count_after = new_corpus.count_of(word)
    side_effects = {w: new_corpus.count_of(w) - watch_before[w] for w in watch}
    report = ResampleReport(
        word=word,
        count_before=count_before,
        count_after=count_after,
        target=target_count,
        sentences_dropped=dropped,
        sentences_replicated=replicated,
        side_effect_counts=side_effects,
    )
    return new_corpus, report


def balance_frequencies(
    corpus: Corpus,
    word_a: str,
    word_b: str,
    seed: int,
    watch: Sequence[str] = (),
) -> tuple[Corpus, ResampleReport]:
    """Oversample the rarer of two words until its count reaches the other's.

    Equivalent to ``resample(rarer_word, count_of_more_frequent)``; with equal
    counts the corpus is returned unchanged.
    """
    count_a = corpus.count_of(word_a)
    count_b = corpus.count_of(word_b)
    if count_a == 0:
        raise UnknownWordError(word_a, where="corpus")
    if count_b == 0:
        raise UnknownWordError(word_b, where="corpus")
    rare, high = (word_a, count_b) if count_a < count_b else (word_b, count_a)
    return resample(corpus, rare, high, seed, watch=watch)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write one sentence per line, tokens separated by single spaces."""
    words = corpus.vocab.words if corpus.is_encoded else None
    with open(path, "w", encoding="utf-8") as fh:
        for sent in corpus.sentences():
            if words is not None:
                fh.write(" ".join(words[t] for t in sent))
            else:
                fh.write(" ".join(sent))
            fh.write("\n")


def load_corpus(path: str | Path, provenance: Provenance = ORIGINAL) -> Corpus:
    """Read a one-sentence-per-line corpus file into the raw stage."""
    flat: list[str] = []
    offsets = [0]
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(exc.start, exc.reason) from None
    for line in text.splitlines():
        toks = line.split(" ") if line else []
        toks = [sys.intern(t) for t in toks if t]
        if toks:
            flat.extend(toks)
            offsets.append(len(flat))
    return Corpus(flat, np.asarray(offsets, dtype=np.int64), provenance)
