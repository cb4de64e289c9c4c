"""Embedding-based bias scores for target words against two context groups,
Glasgow-style gender-norm handling, and the resampled-corpus bias experiment."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import Vocabulary
from .errors import ConfigError, NormsParseError, UnknownWordError
from .freq import FrequencyBinning
from .store import EmbeddingSet, similarity


@dataclass(frozen=True)
class ContextGroups:
    """Two disjoint word groups whose mean similarity difference defines bias."""

    a: tuple[str, ...]
    b: tuple[str, ...]
    label: str = ""

    def __post_init__(self):
        if not self.a or not self.b:
            raise ConfigError("context groups must be nonempty")
        if set(self.a) & set(self.b):
            raise ConfigError("context groups must be disjoint")

    @classmethod
    def of(cls, a, b, label: str = "") -> "ContextGroups":
        a = (a,) if isinstance(a, str) else tuple(a)
        b = (b,) if isinstance(b, str) else tuple(b)
        return cls(a=a, b=b, label=label)


def bias_we(emb: EmbeddingSet, x: str, groups: ContextGroups) -> float:
    """mean_a cos(w_x, w_a) - mean_b cos(w_x, w_b); lies in [-2, 2]."""
    wx = emb.vector(x)
    mean_a = float(np.mean([similarity(wx, emb.vector(a), "cosine") for a in groups.a]))
    mean_b = float(np.mean([similarity(wx, emb.vector(b), "cosine") for b in groups.b]))
    return mean_a - mean_b


@dataclass(frozen=True)
class NormEntry:
    """One rated word: femaleness on the flipped 1-7 scale plus its class."""

    word: str
    femaleness: float
    cls: str  # "male" | "female" | "neutral"


def classify_femaleness(femaleness: float) -> str:
    if femaleness <= 2.0:
        return "male"
    if femaleness >= 6.0:
        return "female"
    return "neutral"


def load_norms(path: str | Path) -> list[NormEntry]:
    """Read a norms CSV with columns word,gender_norm,is_homonym.

    The raw norm runs 1 (feminine) to 7 (masculine); it is flipped to a
    femaleness score 8 - raw. Homonyms and words containing uppercase
    characters are discarded.
    """
    entries: list[NormEntry] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise NormsParseError(1, "empty file") from None
        if [h.strip() for h in header] != ["word", "gender_norm", "is_homonym"]:
            raise NormsParseError(1, f"expected header word,gender_norm,is_homonym, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise NormsParseError(lineno, f"expected 3 columns, got {len(row)}")
            word, raw_str, homonym_str = (col.strip() for col in row)
            try:
                raw = float(raw_str)
            except ValueError:
                raise NormsParseError(lineno, f"bad gender_norm {raw_str!r}") from None
            if not (1.0 <= raw <= 7.0):
                raise NormsParseError(lineno, f"gender_norm {raw} outside [1, 7]")
            homonym = homonym_str.lower()
            if homonym not in ("0", "1", "true", "false"):
                raise NormsParseError(lineno, f"bad is_homonym {homonym_str!r}")
            if homonym in ("1", "true"):
                continue
            if any(ch.isupper() for ch in word):
                continue
            femaleness = 8.0 - raw
            entries.append(NormEntry(word=word, femaleness=femaleness,
                                     cls=classify_femaleness(femaleness)))
    return entries


def filter_targets(
    norms: Sequence[NormEntry],
    vocabularies: Sequence[Vocabulary],
    binnings: Sequence[FrequencyBinning],
) -> list[str]:
    """Words present in every vocabulary whose frequency bin is identical
    across all binnings; order follows the norms list."""
    if len(vocabularies) != len(binnings) or not vocabularies:
        raise ConfigError("need one binning per vocabulary, at least one pair")
    out: list[str] = []
    for entry in norms:
        word = entry.word if isinstance(entry, NormEntry) else str(entry)
        ids = [vocab.get(word) for vocab in vocabularies]
        if any(i is None for i in ids):
            continue
        bins = {binning.bin_of(i) for binning, i in zip(binnings, ids)}
        if len(bins) == 1:
            out.append(word)
    return out


@dataclass(frozen=True)
class BootstrapConfig:
    n_resamples: int = 1000
    level: float = 0.95
    seed: int = 0


def bootstrap_mean_ci(
    values: Sequence[float],
    n_resamples: int = 1000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float, float]:
    """Percentile bootstrap of the mean: (mean, ci_low, ci_high)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ConfigError("cannot bootstrap an empty sample")
    if not (0.0 < level < 1.0):
        raise ConfigError("level must lie in (0, 1)")
    if n_resamples < 1:
        raise ConfigError("n_resamples must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, values.size, size=(n_resamples, values.size))
    boot_means = values[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(boot_means, [alpha, 1.0 - alpha])
    return float(values.mean()), float(lo), float(hi)


@dataclass
class BiasRow:
    corpus_id: str
    word: str
    bin: int
    cls: str
    bias: float


@dataclass
class BiasAggregate:
    corpus_id: str
    bin: int
    cls: str
    n: int
    mean: float
    ci_low: float
    ci_high: float


@dataclass
class BiasReport:
    rows: list[BiasRow]
    aggregates: list[BiasAggregate] = field(default_factory=list)

    def rows_to_csv(self, path: str | Path) -> None:
        """Schema: corpus_id,word,bin,class,bias."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["corpus_id", "word", "bin", "class", "bias"])
            for r in self.rows:
                writer.writerow([r.corpus_id, r.word, r.bin, r.cls, repr(float(r.bias))])

    def aggregates_to_csv(self, path: str | Path) -> None:
        """Schema: corpus_id,bin,class,n,mean,ci_low,ci_high."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["corpus_id", "bin", "class", "n", "mean", "ci_low", "ci_high"])
            for a in self.aggregates:
                writer.writerow(
                    [a.corpus_id, a.bin, a.cls, a.n, repr(float(a.mean)),
                     repr(float(a.ci_low)), repr(float(a.ci_high))]
                )

    def aggregate(self, corpus_id: str, bin: int, cls: str = "all") -> BiasAggregate:
        for a in self.aggregates:
            if (a.corpus_id, a.bin, a.cls) == (corpus_id, bin, cls):
                return a
        raise KeyError((corpus_id, bin, cls))


def bias_experiment(
    embedding_sets: Mapping[str, EmbeddingSet],
    targets: Sequence[str],
    groups: ContextGroups,
    binnings: Mapping[str, FrequencyBinning],
    bootstrap_cfg: BootstrapConfig = BootstrapConfig(),
    classes: Mapping[str, str] | None = None,
) -> BiasReport:
    """Bias of every target word in every corpus, with per-group bootstrap CIs.

    ``embedding_sets`` and ``binnings`` map corpus IDs to the set trained on
    that corpus and its vocabulary binning. Aggregates cover each
    (corpus, bin) group under class "all", plus each (corpus, bin, class)
    group when ``classes`` assigns classes to target words.
    """
    if set(embedding_sets) != set(binnings):
        raise ConfigError("embedding_sets and binnings must cover the same corpus ids")
    for word in list(groups.a) + list(groups.b):
        for corpus_id, emb in embedding_sets.items():
            if word not in emb.vocab:
                raise UnknownWordError(word, where=f"vocabulary of corpus {corpus_id!r}")

    rows: list[BiasRow] = []
    for corpus_id in sorted(embedding_sets):
        emb = embedding_sets[corpus_id]
        binning = binnings[corpus_id]
        # One vectorized pass: bias = mean cos to A-columns minus mean cos to B-columns.
        W = emb.W.astype(np.float64, copy=False)
        norms = np.sqrt(np.einsum("ij,ij->i", W, W))
        target_ids = np.array([emb.vocab.id(w) for w in targets], dtype=np.int64)
        a_ids = [emb.vocab.id(w) for w in groups.a]
        b_ids = [emb.vocab.id(w) for w in groups.b]
        used = np.concatenate((target_ids, a_ids, b_ids))
        if (norms[used] == 0.0).any():
            bad = int(used[norms[used] == 0.0][0])
            raise ConfigError(f"zero vector for word {emb.vocab.words[bad]!r}")

        def mean_cos(ids):
            sims = (W[target_ids] @ W[ids].T) / np.outer(norms[target_ids], norms[ids])
            return sims.mean(axis=1)

        bias = mean_cos(a_ids) - mean_cos(b_ids)
        for w, wid, value in zip(targets, target_ids, bias):
            cls = classes.get(w, "all") if classes else "all"
            rows.append(BiasRow(corpus_id=corpus_id, word=w,
                                bin=binning.bin_of(int(wid)), cls=cls, bias=float(value)))

    aggregates: list[BiasAggregate] = []
    by_group: dict[tuple[str, int, str], list[float]] = {}
    for r in rows:
        by_group.setdefault((r.corpus_id, r.bin, "all"), []).append(r.bias)
        if classes:
            by_group.setdefault((r.corpus_id, r.bin, r.cls), []).append(r.bias)
    for i, key in enumerate(sorted(by_group)):
        corpus_id, b, cls = key
        values = by_group[key]
        mean, lo, hi = bootstrap_mean_ci(
            values, bootstrap_cfg.n_resamples, bootstrap_cfg.level,
            seed=bootstrap_cfg.seed + i,
        )
        aggregates.append(BiasAggregate(corpus_id=corpus_id, bin=b, cls=cls,
                                        n=len(values), mean=mean, ci_low=lo, ci_high=hi))
    return BiasReport(rows=rows, aggregates=aggregates)
