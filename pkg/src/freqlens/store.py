"""Embedding sets: similarity metrics, w+c combination, and on-disk formats.

Binary layout (format of record), little-endian throughout::

    magic "FQL1" | V:u32 | D:u32 | per word: len:u16, utf8 bytes,
    D float32 (target row), D float32 (context row)

Text layout: header line ``V D``, then one ``word v1 ... vD`` line per target
row with 6 decimal places. The text format carries only the target matrix.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
import numpy as np

from .corpus import Vocabulary
from .errors import ConfigError, EmbeddingFormatError, SimilarityUndefinedError

_MAGIC = b"FQL1"

METRICS = ("cosine", "neg_euclidean")


@dataclass
class EmbeddingSet:
    """Target matrix W and context matrix C over a vocabulary.

    Row ``i`` of each matrix is the vector of vocabulary ID ``i``. ``meta``
    carries trainer extras (loss history, bias terms) and is never persisted.
    """

    vocab: Vocabulary
    W: np.ndarray
    C: np.ndarray
    method: str = "sgns"
    hyperparams: object | None = None
    epoch_tag: int | None = None
    meta: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.W = np.ascontiguousarray(self.W)
        self.C = np.ascontiguousarray(self.C)
        if self.W.shape != self.C.shape:
            raise ConfigError(f"W and C shapes differ: {self.W.shape} vs {self.C.shape}")
        if self.W.shape[0] != len(self.vocab):
            raise ConfigError(
                f"matrix has {self.W.shape[0]} rows for a vocabulary of {len(self.vocab)}"
            )
        if not (np.isfinite(self.W).all() and np.isfinite(self.C).all()):
            raise ConfigError("embedding matrices must be finite")

    @property
    def dim(self) -> int:
        return self.W.shape[1]

    def vector(self, word: str) -> np.ndarray:
        return self.W[self.vocab.id(word)]


def combine_w_plus_c(emb: EmbeddingSet) -> EmbeddingSet:
    """Return a set whose target matrix is W + C (the ``w+c`` variant)."""
    hp = emb.hyperparams
    if hp is not None:
        try:
            from dataclasses import replace

            hp = replace(hp, add_context=True)
        except TypeError:
            pass
    return EmbeddingSet(
        vocab=emb.vocab,
        W=emb.W + emb.C,
        C=emb.C.copy(),
        method=emb.method,
        hyperparams=hp,
        epoch_tag=emb.epoch_tag,
    )


def similarity(u: np.ndarray, v: np.ndarray, metric: str = "cosine") -> float:
    """Cosine similarity or negative Euclidean distance between two vectors.

    Accumulates in float64 regardless of storage dtype.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ConfigError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if metric == "cosine":
        nu = float(np.sqrt(np.dot(u, u)))
        nv = float(np.sqrt(np.dot(v, v)))
        if nu == 0.0 or nv == 0.0:
            raise SimilarityUndefinedError("cosine similarity is undefined for a zero vector")
        return float(np.dot(u, v)) / (nu * nv)
    if metric == "neg_euclidean":
        d = u - v
        return -float(np.sqrt(np.dot(d, d)))
    raise ConfigError(f"unknown metric {metric!r}; choose from {METRICS}")


def persist(emb: EmbeddingSet, path: str | Path, format: str = "binary") -> None:
    """Write an embedding set to disk in ``binary`` or ``text`` format."""
    if format == "binary":
        _write_binary(emb, path)
    elif format == "text":
        _write_text(emb, path)
    else:
        raise ConfigError(f"unknown format {format!r}; choose 'binary' or 'text'")


def restore(path: str | Path, vocab: Vocabulary | None = None) -> EmbeddingSet:
    """Read an embedding set, auto-detecting binary vs text by the magic bytes.

    When ``vocab`` is given its words must match the file; otherwise a
    count-free vocabulary is synthesized in file order.
    """
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == _MAGIC:
        words, W, C = _read_binary(path)
    else:
        words, W, C = _read_text(path)
    if vocab is not None:
        if list(vocab.words) != words:
            raise EmbeddingFormatError("vocabulary does not match the words stored in the file")
    else:
        vocab = Vocabulary(words, np.zeros(len(words), dtype=np.int64), min_count=0)
    return EmbeddingSet(vocab=vocab, W=W, C=C)


def _write_binary(emb: EmbeddingSet, path: str | Path) -> None:
    V, D = emb.W.shape
    W = emb.W.astype("<f4", copy=False)
    C = emb.C.astype("<f4", copy=False)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", V, D))
        for i, word in enumerate(emb.vocab.words):
            wb = word.encode("utf-8")
            if len(wb) > 0xFFFF:
                raise EmbeddingFormatError(f"word too long to persist: {word[:32]!r}...")
            fh.write(struct.pack("<H", len(wb)))
            fh.write(wb)
            fh.write(W[i].tobytes())
            fh.write(C[i].tobytes())


def _read_binary(path: str | Path) -> tuple[list[str], np.ndarray, np.ndarray]:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _MAGIC:
        raise EmbeddingFormatError("bad magic bytes", byte_offset=0)
    if len(data) < 12:
        raise EmbeddingFormatError("truncated header", byte_offset=len(data))
    V, D = struct.unpack_from("<II", data, 4)
    pos = 12
    words: list[str] = []
    seen: set[str] = set()
    W = np.empty((V, D), dtype=np.float32)
    C = np.empty((V, D), dtype=np.float32)
    row_bytes = 4 * D
    for i in range(V):
        if pos + 2 > len(data):
            raise EmbeddingFormatError(
                f"truncated payload: expected {V} words, got {i}", byte_offset=pos
            )
        (wlen,) = struct.unpack_from("<H", data, pos)
        pos += 2
        end = pos + wlen + 2 * row_bytes
        if end > len(data):
            raise EmbeddingFormatError(
                f"truncated payload: expected {V} words, got {i}", byte_offset=pos
            )
        word = data[pos : pos + wlen].decode("utf-8")
        if word in seen:
            raise EmbeddingFormatError(f"duplicate word {word!r}", byte_offset=pos)
        seen.add(word)
        words.append(word)
        pos += wlen
        W[i] = np.frombuffer(data, dtype="<f4", count=D, offset=pos)
        pos += row_bytes
        C[i] = np.frombuffer(data, dtype="<f4", count=D, offset=pos)
        pos += row_bytes
    return words, W, C


def _write_text(emb: EmbeddingSet, path: str | Path) -> None:
    V, D = emb.W.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{V} {D}\n")
        for i, word in enumerate(emb.vocab.words):
            row = " ".join(f"{x:.6f}" for x in emb.W[i])
            fh.write(f"{word} {row}\n")


def _read_text(path: str | Path) -> tuple[list[str], np.ndarray, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise EmbeddingFormatError(f"bad header {header.strip()!r}, expected 'V D'", line=1)
        try:
            V, D = int(parts[0]), int(parts[1])
        except ValueError:
            raise EmbeddingFormatError(f"bad header {header.strip()!r}", line=1) from None
        words: list[str] = []
        seen: set[str] = set()
        W = np.empty((V, D), dtype=np.float32)
        for i in range(V):
            line = fh.readline()
            if not line:
                raise EmbeddingFormatError(
                    f"truncated payload: header claims {V} rows, got {i}", line=i + 2
                )
            cols = line.rstrip("\n").split(" ")
            if len(cols) != D + 1:
                raise EmbeddingFormatError(
                    f"expected {D + 1} columns, got {len(cols)}", line=i + 2
                )
            word = cols[0]
            if word in seen:
                raise EmbeddingFormatError(f"duplicate word {word!r}", line=i + 2)
            seen.add(word)
            words.append(word)
            W[i] = [float(x) for x in cols[1:]]
    return words, W, np.zeros_like(W)
