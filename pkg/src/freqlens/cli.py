"""Command-line pipeline: every stage reads and writes plain files, carries an
explicit seed, and drops a metadata sidecar next to each artifact."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .bias import BootstrapConfig, ContextGroups, bias_experiment, filter_targets, load_norms
from .corpus import Vocabulary, build_vocab, encode, load_corpus, preprocess, resample, save_corpus, shuffle_tokens
from .errors import FreqlensError
from .freq import (
    RmseResult,
    assign_bins,
    build_rmse_design,
    heatmap,
    ols,
    pca_stratified,
    permutation_baseline,
    rmse,
    sample_pairs,
    write_heatmap_csv,
    write_pca_csv,
    write_regression_csv,
    write_rmse_csv,
)
from .store import combine_w_plus_c, persist, restore
from .train import Hyperparams, build_cooccurrence, enumerate_grid, train_fasttext, train_glove, train_sgns

METRIC_CHOICES = ("cosine", "neg_euclidean")


def _env_seed() -> int:
    return int(os.environ.get("FREQLENS_SEED", "1"))


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _write_sidecar(out_path: str | Path, command: str, plan: argparse.Namespace,
                   inputs: list[str | Path], seeds: dict) -> None:
    meta = {
        "command": command,
        "argv": [f"{k}={v}" for k, v in sorted(vars(plan).items()) if k != "func"],
        "seeds": seeds,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "output": str(out_path),
        "version": __version__,
    }
    with open(f"{out_path}.meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_documents(paths: list[str]):
    """Documents are blocks separated by blank lines; each file may hold many."""
    for path in paths:
        with open(path, "rb") as fh:
            data = fh.read()
        for block in data.split(b"\n\n"):
            if block.strip():
                yield block


def _cmd_preprocess(plan: argparse.Namespace) -> int:
    corpus = preprocess(_read_documents(plan.inputs), min_doc_tokens=plan.min_doc_tokens)
    save_corpus(corpus, plan.out)
    _write_sidecar(plan.out, "preprocess", plan, plan.inputs, {})
    print(f"wrote {corpus.n_sentences} sentences / {corpus.token_count} tokens to {plan.out}")
    return 0


def _cmd_shuffle(plan: argparse.Namespace) -> int:
    corpus = load_corpus(plan.corpus)
    shuffled = shuffle_tokens(corpus, seed=plan.seed)
    save_corpus(shuffled, plan.out)
    _write_sidecar(plan.out, "shuffle", plan, [plan.corpus], {"seed": plan.seed})
    print(f"wrote shuffled corpus to {plan.out}")
    return 0


def _cmd_resample(plan: argparse.Namespace) -> int:
    corpus = load_corpus(plan.corpus)
    resampled, report = resample(corpus, plan.word, plan.target, seed=plan.seed,
                                 watch=plan.watch or ())
    save_corpus(resampled, plan.out)
    _write_sidecar(plan.out, "resample", plan, [plan.corpus], {"seed": plan.seed})
    with open(plan.report, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"resampled {plan.word!r}: {report.count_before} -> {report.count_after} "
          f"(target {plan.target})")
    return 0


def _hyperparams_from_plan(plan: argparse.Namespace) -> Hyperparams:
    overrides = dict(
        dim=plan.dim,
        window=plan.window,
        negatives=plan.negatives,
        cds_exponent=plan.cds,
        seed=plan.seed,
        min_count=plan.min_count,
        subsample=0.0 if plan.no_subsample else plan.subsample,
        fasttext_ngram_min=plan.ngram_min,
        fasttext_ngram_max=plan.ngram_max,
        fasttext_buckets=plan.buckets,
    )
    if plan.epochs is not None:
        overrides["epochs"] = plan.epochs
    if plan.lr is not None:
        overrides["learning_rate"] = plan.lr
    return Hyperparams.defaults(plan.method, **overrides)


def _train_one(raw_corpus, hp: Hyperparams, *, workers: int, progress: bool,
               snapshot_sink=None):
    vocab = build_vocab(raw_corpus, min_count=hp.min_count)
    encoded = encode(raw_corpus, vocab)
    if hp.method == "glove":
        cooc = build_cooccurrence(encoded, vocab, hp.window)
        emb = train_glove(cooc, vocab, hp, snapshot_sink, workers=workers,
                          progress=progress)
    elif hp.method == "fasttext":
        emb = train_fasttext(encoded, vocab, hp, snapshot_sink, workers=workers,
                             progress=progress)
    else:
        emb = train_sgns(encoded, vocab, hp, snapshot_sink, workers=workers,
                         progress=progress)
    return vocab, emb


def _cmd_train(plan: argparse.Namespace) -> int:
    raw = load_corpus(plan.corpus)
    hp = _hyperparams_from_plan(plan)
    out = Path(plan.out)

    snapshot_sink = None
    holder: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    if plan.save_epochs:

        def snapshot_sink(epoch, W, C):
            holder[epoch] = (np.array(W), np.array(C))

    vocab, emb = _train_one(raw, hp, workers=plan.workers, progress=True,
                            snapshot_sink=snapshot_sink)
    if plan.add_context:
        emb = combine_w_plus_c(emb)
    persist(emb, out, format=plan.format)
    vocab_out = plan.vocab_out or f"{out}.vocab.tsv"
    vocab.save_tsv(vocab_out)
    if plan.save_epochs:
        from .store import EmbeddingSet

        for epoch, (W, C) in sorted(holder.items()):
            snap = EmbeddingSet(vocab=vocab, W=W, C=C, method=hp.method,
                                hyperparams=hp, epoch_tag=epoch)
            persist(snap, f"{out}.ep{epoch}", format=plan.format)
    _write_sidecar(out, "train", plan, [plan.corpus], {"seed": plan.seed})
    print(f"trained {hp.method} ({len(vocab)} words, dim {hp.dim}) -> {out}")
    return 0


def _cmd_grid(plan: argparse.Namespace) -> int:
    raw = load_corpus(plan.corpus)
    base = _hyperparams_from_plan(plan)
    settings = enumerate_grid(plan.method, base=base)
    out_dir = Path(plan.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    # Settings differing only in w+c share one training run.
    trained: dict = {}
    for setting in settings:
        hp = setting.hyperparams
        train_key = replace(hp, add_context=False)
        if train_key not in trained:
            vocab, emb = _train_one(raw, train_key, workers=plan.workers, progress=True)
            trained[train_key] = emb
        emb = trained[train_key]
        if hp.add_context:
            emb = combine_w_plus_c(emb)
        setting_dir = out_dir / setting.setting_id
        setting_dir.mkdir(exist_ok=True)
        out = setting_dir / "embeddings.bin"
        persist(emb, out, format="binary")
        emb.vocab.save_tsv(setting_dir / "vocab.tsv")
        _write_sidecar(out, "grid", plan, [plan.corpus], {"seed": plan.seed})
    print(f"trained {len(settings)} settings into {out_dir}")
    return 0


def _load_embeddings(emb_path: str, vocab_path: str):
    vocab = Vocabulary.load_tsv(vocab_path)
    return restore(emb_path, vocab=vocab)


def _cmd_heatmap(plan: argparse.Namespace) -> int:
    emb = _load_embeddings(plan.embeddings, plan.vocab)
    binning = assign_bins(emb.vocab)
    pairs = sample_pairs(binning, n_per_cell=plan.pairs, seed=plan.seed)
    hm = heatmap(emb, pairs, metric=plan.metric)
    write_heatmap_csv(hm, plan.out)
    _write_sidecar(plan.out, "heatmap", plan, [plan.embeddings, plan.vocab],
                   {"seed": plan.seed})
    print(f"wrote heatmap over bins {hm.bins} to {plan.out}")
    return 0


def _cmd_rmse(plan: argparse.Namespace) -> int:
    emb = _load_embeddings(plan.embeddings, plan.vocab)
    binning = assign_bins(emb.vocab)
    pairs = sample_pairs(binning, n_per_cell=plan.pairs, seed=plan.seed)
    hm = heatmap(emb, pairs, metric=plan.metric)
    actual = rmse(hm)
    baseline = permutation_baseline(hm, n_permutations=plan.n_perm, seed=plan.perm_seed)
    result = RmseResult(setting_id=plan.setting_id, metric=plan.metric,
                        rmse_actual=actual, rmse_baseline=baseline)
    write_rmse_csv([result], plan.out)
    _write_sidecar(plan.out, "rmse", plan, [plan.embeddings, plan.vocab],
                   {"seed": plan.seed, "perm_seed": plan.perm_seed})
    print(f"rmse={actual:.6f} baseline_max={baseline.max():.6f} -> {plan.out}")
    return 0


def _cmd_pca(plan: argparse.Namespace) -> int:
    emb = _load_embeddings(plan.embeddings, plan.vocab)
    binning = assign_bins(emb.vocab)
    result = pca_stratified(emb, binning, words_per_bin=plan.words_per_bin, seed=plan.seed)
    write_pca_csv(result, emb.vocab, plan.out)
    _write_sidecar(plan.out, "pca", plan, [plan.embeddings, plan.vocab],
                   {"seed": plan.seed})
    ev = result.explained_variance
    print(f"explained variance: {ev[0]:.6g}, {ev[1]:.6g} -> {plan.out}")
    return 0


def _parse_tagged(values: list[str], flag: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in values:
        if "=" not in item:
            raise FreqlensError(f"{flag} expects ID=PATH, got {item!r}")
        key, path = item.split("=", 1)
        out[key] = path
    return out


def _cmd_bias(plan: argparse.Namespace) -> int:
    emb_paths = _parse_tagged(plan.embeddings, "--embeddings")
    vocab_paths = _parse_tagged(plan.vocab, "--vocab")
    if set(emb_paths) != set(vocab_paths):
        raise FreqlensError("--embeddings and --vocab must use the same corpus ids")
    embeddings = {cid: _load_embeddings(emb_paths[cid], vocab_paths[cid]) for cid in emb_paths}
    binnings = {cid: assign_bins(emb.vocab) for cid, emb in embeddings.items()}

    norms = load_norms(plan.norms)
    order = sorted(embeddings)
    targets = filter_targets(norms, [embeddings[c].vocab for c in order],
                             [binnings[c] for c in order])
    classes = {n.word: n.cls for n in norms}
    groups = ContextGroups.of(plan.group_a, plan.group_b)
    report = bias_experiment(
        embeddings, targets, groups, binnings,
        BootstrapConfig(n_resamples=plan.bootstrap, level=plan.level, seed=plan.seed),
        classes=classes,
    )
    report.rows_to_csv(plan.out)
    report.aggregates_to_csv(plan.aggregates)
    inputs = [plan.norms] + list(emb_paths.values()) + list(vocab_paths.values())
    _write_sidecar(plan.out, "bias", plan, inputs, {"seed": plan.seed})
    _write_sidecar(plan.aggregates, "bias", plan, inputs, {"seed": plan.seed})
    print(f"{len(targets)} target words x {len(embeddings)} corpora -> {plan.out}")
    return 0


def _cmd_regress(plan: argparse.Namespace) -> int:
    import csv as _csv

    setting_ids: list[str] = []
    values: list[float] = []
    for path in plan.rmse:
        with open(path, encoding="utf-8", newline="") as fh:
            for row in _csv.DictReader(fh):
                if row["metric"] != plan.metric:
                    continue
                setting_ids.append(row["setting_id"])
                values.append(float(row["rmse_actual"]))
    if not setting_ids:
        raise FreqlensError(f"no rows with metric {plan.metric!r} in {plan.rmse}")
    X, y, terms = build_rmse_design(setting_ids, values)
    result = ols(X, y, terms=terms)
    write_regression_csv(result, plan.out)
    _write_sidecar(plan.out, "regress", plan, list(plan.rmse), {})
    print(f"fitted {len(terms)} terms on {result.n_observations} settings -> {plan.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freqlens",
        description="Train static word embeddings and audit frequency artifacts.",
    )
    parser.add_argument("--version", action="version", version=f"freqlens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    seed_default = _env_seed()

    p = sub.add_parser("preprocess", help="normalize raw documents into a corpus file")
    p.add_argument("inputs", nargs="+", help="text files; blank lines separate documents")
    p.add_argument("--min-doc-tokens", type=_positive_int, default=50)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("shuffle", help="globally permute all tokens")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_shuffle)

    p = sub.add_parser("resample", help="drop or replicate sentences containing a word")
    p.add_argument("--corpus", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--target", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--watch", nargs="*", default=[], help="words to track for side effects")
    p.add_argument("--out", required=True)
    p.add_argument("--report", required=True, help="path for the JSON resample report")
    p.set_defaults(func=_cmd_resample)

    def add_train_args(p, with_epochs=True):
        p.add_argument("--method", choices=("sgns", "glove", "fasttext"), required=True)
        p.add_argument("--dim", type=_positive_int, default=300)
        p.add_argument("--window", type=_positive_int, default=10)
        p.add_argument("--negatives", "--neg", dest="negatives", type=_positive_int, default=5)
        p.add_argument("--cds", type=float, default=0.75)
        p.add_argument("--epochs", type=_positive_int, default=None,
                       help="default: 5 (sgns/fasttext), 15 (glove iterations)")
        p.add_argument("--lr", type=float, default=None,
                       help="default: 0.025 (sgns/fasttext), 0.05 (glove)")
        p.add_argument("--min-count", type=_positive_int, default=100)
        p.add_argument("--subsample", type=float, default=1e-3)
        p.add_argument("--no-subsample", action="store_true")
        p.add_argument("--ngram-min", type=_positive_int, default=3)
        p.add_argument("--ngram-max", type=_positive_int, default=6)
        p.add_argument("--buckets", type=int, default=2_000_000)
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--workers", type=_positive_int, default=1,
                       help=">1 trades determinism for speed")

    p = sub.add_parser("train", help="train one embedding set")
    p.add_argument("--corpus", required=True)
    add_train_args(p)
    p.add_argument("--add-context", action="store_true", help="emit W+C as the target matrix")
    p.add_argument("--format", choices=("binary", "text"), default="binary")
    p.add_argument("--save-epochs", action="store_true",
                   help="persist per-epoch snapshots as OUT.ep<k>")
    p.add_argument("--vocab-out", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("grid", help="train every hyperparameter grid setting")
    p.add_argument("--corpus", required=True)
    add_train_args(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("heatmap", help="bin-by-bin mean similarity heatmap")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--metric", choices=METRIC_CHOICES, default="cosine")
    p.add_argument("--pairs", type=_positive_int, default=500)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_heatmap)

    p = sub.add_parser("rmse", help="frequency-association RMSE with permutation baseline")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--metric", choices=METRIC_CHOICES, default="cosine")
    p.add_argument("--pairs", type=_positive_int, default=500)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--n-perm", type=_positive_int, default=200)
    p.add_argument("--perm-seed", type=int, default=None)
    p.add_argument("--setting-id", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rmse)

    p = sub.add_parser("pca", help="frequency-stratified top-2 PCA projection")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--words-per-bin", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("bias", help="bias of norm-rated targets across corpora")
    p.add_argument("--embeddings", action="append", required=True, metavar="ID=PATH")
    p.add_argument("--vocab", action="append", required=True, metavar="ID=PATH")
    p.add_argument("--norms", required=True)
    p.add_argument("--group-a", nargs="+", required=True)
    p.add_argument("--group-b", nargs="+", required=True)
    p.add_argument("--bootstrap", type=_positive_int, default=1000)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", required=True, help="per-word rows CSV")
    p.add_argument("--aggregates", required=True, help="per-group aggregate CSV")
    p.set_defaults(func=_cmd_bias)

    p = sub.add_parser("regress", help="OLS of RMSE on hyperparameter choices")
    p.add_argument("--rmse", nargs="+", required=True, help="rmse CSV files")
    p.add_argument("--metric", choices=METRIC_CHOICES, default="cosine")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_regress)

    return parser


def parse_args(argv=None) -> argparse.Namespace:
    """Validate argv into a run plan (an argparse namespace)."""
    parser = build_parser()
    plan = parser.parse_args(argv)
    if getattr(plan, "perm_seed", None) is None and hasattr(plan, "perm_seed"):
        plan.perm_seed = plan.seed + 1
    return plan


def run(plan: argparse.Namespace) -> int:
    """Execute a parsed plan; returns the process exit status."""
    try:
        return plan.func(plan)
    except (FreqlensError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
