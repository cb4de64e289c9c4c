# Project frequency-stratified embedding samples onto their top two principal
# components: the bin centroids line up along the leading directions, i.e. the
# vector geometry encodes corpus frequency.
#
# CLI equivalent:
#   freqlens pca --embeddings e.bin --vocab e.bin.vocab.tsv --out pca.csv

from pathlib import Path

import numpy as np

from freqlens import (
    Corpus,
    Hyperparams,
    assign_bins,
    build_vocab,
    encode,
    pca_stratified,
    shuffle_tokens,
    train_sgns,
)
from freqlens.freq import write_pca_csv

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)
rng = np.random.default_rng(0)

counts = [15_000] * 8 + [1_500] * 80 + [150] * 800 + [15] * 4000
tokens = np.repeat(np.arange(len(counts)), counts)
rng.shuffle(tokens)
words = [f"w{i}" for i in range(len(counts))]
sentences, i = [], 0
while i < len(tokens):
    n = int(rng.integers(6, 16))
    sentences.append([words[t] for t in tokens[i : i + n]])
    i += n
shuffled = shuffle_tokens(Corpus.from_sentences(sentences), seed=1)
vocab = build_vocab(shuffled, min_count=10)
enc = encode(shuffled, vocab)

hp = Hyperparams.defaults("sgns", dim=32, min_count=10, epochs=5, seed=2)
emb = train_sgns(enc, vocab, hp, progress=True)

binning = assign_bins(vocab)
result = pca_stratified(emb, binning, words_per_bin=100, seed=3)
ev = result.explained_variance
print(f"\nexplained variance: pc1={ev[0]:.4f} pc2={ev[1]:.4f}")
print("bin centroids in the top-2 PC plane:")
for b in sorted(result.centroids):
    c = result.centroids[b]
    n = int((result.word_bins == b).sum())
    print(f"  bin {b} ({n:3d} words): pc1={c[0]:+.4f} pc2={c[1]:+.4f}")

# A monotone drift of centroids along either axis is the frequency dimension.
write_pca_csv(result, vocab, OUT / "pca_projection.csv")
print(f"\nwrote {OUT / 'pca_projection.csv'}")
