"""Frequency-similarity association: log10 bins, sampled pair heatmaps, the
RMSE association metric with its permutation baseline, stratified PCA, and the
OLS regression of RMSE on hyperparameter choices."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .corpus import Vocabulary
from .errors import (
    ConfigError,
    InsufficientDataError,
    SimilarityUndefinedError,
    SingularDesignError,
)
from .store import METRICS, EmbeddingSet
from .train.params import parse_setting_identifier

DEFAULT_PAIRS_PER_CELL = 500
_ENUMERATE_LIMIT = 200_000


@dataclass
class FrequencyBinning:
    """Partition of the vocabulary by floor(log10 count)."""

    bins: list[int]
    members: dict[int, np.ndarray]
    word_bin: np.ndarray

    def bin_of(self, word_id: int) -> int:
        return int(self.word_bin[word_id])


def assign_bins(vocab: Vocabulary) -> FrequencyBinning:
    """Bin every word by floor(log10 of its count); empty bins are omitted."""
    if len(vocab) == 0:
        raise ConfigError("cannot bin an empty vocabulary")
    counts = np.asarray(vocab.counts, dtype=np.float64)
    if (counts < 1).any():
        raise ConfigError("all vocabulary counts must be >= 1 to assign bins")
    word_bin = np.floor(np.log10(counts)).astype(np.int64)
    bins = sorted(int(b) for b in np.unique(word_bin))
    members = {b: np.flatnonzero(word_bin == b).astype(np.int32) for b in bins}
    return FrequencyBinning(bins=bins, members=members, word_bin=word_bin)


@dataclass
class CellPairs:
    bin_row: int
    bin_col: int
    u: np.ndarray
    v: np.ndarray
    shortfall: bool


@dataclass
class PairSample:
    """Sampled word pairs per bin cell (i <= j), same-word pairs excluded."""

    cells: list[CellPairs]
    n_per_cell: int
    seed: int


def _enumerate_pairs(a: np.ndarray, b: np.ndarray, diagonal: bool):
    if diagonal:
        iu, iv = np.triu_indices(len(a), k=1)
        return a[iu], a[iv]
    iu, iv = np.meshgrid(np.arange(len(a)), np.arange(len(b)), indexing="ij")
    return a[iu.ravel()], b[iv.ravel()]


def _rejection_pairs(rng, a: np.ndarray, b: np.ndarray, n: int, diagonal: bool):
    seen: set[int] = set()
    us: list[int] = []
    vs: list[int] = []
    width = len(b)
    while len(us) < n:
        size = max(1024, n)
        ui = rng.integers(0, len(a), size=size)
        vi = rng.integers(0, len(b), size=size)
        if diagonal:
            lo = np.minimum(ui, vi)
            hi = np.maximum(ui, vi)
            ok = lo != hi
            keys = lo[ok] * width + hi[ok]
            uu, vv = a[lo[ok]], a[hi[ok]]
        else:
            keys = ui * width + vi
            uu, vv = a[ui], b[vi]
        for key, x, y in zip(keys.tolist(), uu.tolist(), vv.tolist()):
            if key in seen:
                continue
            seen.add(key)
            us.append(x)
            vs.append(y)
            if len(us) == n:
                break
    return np.asarray(us, dtype=np.int32), np.asarray(vs, dtype=np.int32)


def sample_pairs(
    binning: FrequencyBinning,
    n_per_cell: int = DEFAULT_PAIRS_PER_CELL,
    seed: int = 0,
) -> PairSample:
    """Draw up to ``n_per_cell`` distinct word pairs for every cell (i, j) with
    i <= j, uniformly without replacement over bin_i x bin_j minus same-word
    pairs. Cells with fewer distinct pairs take them all and set ``shortfall``.
    """
    if not binning.bins:
        raise ConfigError("binning has no occupied bins")
    rng = np.random.default_rng(seed)
    cells: list[CellPairs] = []
    for ai, bi in enumerate(binning.bins):
        for bj in binning.bins[ai:]:
            a = binning.members[bi]
            b = binning.members[bj]
            diagonal = bi == bj
            total = len(a) * (len(a) - 1) // 2 if diagonal else len(a) * len(b)
            if total <= n_per_cell or total <= _ENUMERATE_LIMIT:
                u, v = _enumerate_pairs(a, b, diagonal)
                if total > n_per_cell:
                    pick = rng.permutation(total)[:n_per_cell]
                    u, v = u[pick], v[pick]
                shortfall = total < n_per_cell
            else:
                u, v = _rejection_pairs(rng, a, b, n_per_cell, diagonal)
                shortfall = False
            cells.append(
                CellPairs(bin_row=bi, bin_col=bj, u=np.asarray(u, np.int32),
                          v=np.asarray(v, np.int32), shortfall=shortfall)
            )
    return PairSample(cells=cells, n_per_cell=n_per_cell, seed=seed)


@dataclass
class Heatmap:
    """Bin-by-bin mean similarities plus the per-pair values behind each cell."""

    metric: str
    bins: list[int]
    cell_means: np.ndarray
    cell_counts: np.ndarray
    cell_shortfall: np.ndarray
    cell_values: dict[tuple[int, int], np.ndarray] = field(repr=False)
    grand_mean: float = float("nan")

    def mean_at(self, bin_row: int, bin_col: int) -> float:
        i = self.bins.index(bin_row)
        j = self.bins.index(bin_col)
        return float(self.cell_means[i, j])


def _pair_similarities(emb: EmbeddingSet, u: np.ndarray, v: np.ndarray, metric: str, norms):
    W = emb.W
    if metric == "cosine":
        for ids in (u, v):
            zero = ids[norms[ids] == 0.0]
            if len(zero):
                word = emb.vocab.words[int(zero[0])]
                raise SimilarityUndefinedError(
                    f"cosine similarity undefined: word {word!r} has a zero vector"
                )
        num = np.einsum("ij,ij->i", W[u].astype(np.float64), W[v].astype(np.float64))
        return num / (norms[u] * norms[v])
    d = W[u].astype(np.float64) - W[v].astype(np.float64)
    return -np.sqrt(np.einsum("ij,ij->i", d, d))


def heatmap(emb: EmbeddingSet, pair_sample: PairSample, metric: str = "cosine") -> Heatmap:
    """Mean similarity per bin cell over the sampled pairs, mirrored to a
    symmetric matrix. The grand mean is the unweighted mean over occupied
    cells; per-pair values are retained for the permutation baseline."""
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}; choose from {METRICS}")
    bins = sorted({c.bin_row for c in pair_sample.cells} | {c.bin_col for c in pair_sample.cells})
    index = {b: i for i, b in enumerate(bins)}
    B = len(bins)
    means = np.full((B, B), np.nan)
    counts = np.zeros((B, B), dtype=np.int64)
    shortfall = np.zeros((B, B), dtype=bool)
    values: dict[tuple[int, int], np.ndarray] = {}

    norms = None
    if metric == "cosine":
        W64 = emb.W.astype(np.float64, copy=False)
        norms = np.sqrt(np.einsum("ij,ij->i", W64, W64))

    for cell in pair_sample.cells:
        i, j = index[cell.bin_row], index[cell.bin_col]
        shortfall[i, j] = shortfall[j, i] = cell.shortfall
        if len(cell.u) == 0:
            continue
        sims = _pair_similarities(emb, cell.u, cell.v, metric, norms)
        values[(cell.bin_row, cell.bin_col)] = sims
        means[i, j] = means[j, i] = sims.mean()
        counts[i, j] = counts[j, i] = len(sims)
    occupied = [float(vals.mean()) for _, vals in sorted(values.items())]
    grand = float(np.mean(occupied)) if occupied else float("nan")
    return Heatmap(
        metric=metric, bins=bins, cell_means=means, cell_counts=counts,
        cell_shortfall=shortfall, cell_values=values, grand_mean=grand,
    )


def rmse(hm: Heatmap) -> float:
    """Root mean squared deviation of occupied cell means from the grand mean."""
    means = np.array([vals.mean() for _, vals in sorted(hm.cell_values.items())])
    if len(means) == 0:
        raise ConfigError("heatmap has no occupied cells")
    return float(np.sqrt(np.mean((means - hm.grand_mean) ** 2)))


def permutation_baseline(hm: Heatmap, n_permutations: int = 200, seed: int = 0) -> np.ndarray:
    """RMSE distribution after randomly reassigning pair similarities to cells.

    Pools every retained pair value, permutes, refills the cells with their
    original pair counts, and recomputes cell means and RMSE per replicate.
    """
    items = sorted(hm.cell_values.items())
    if not items:
        raise ConfigError("heatmap retains no per-pair values")
    pool = np.concatenate([vals for _, vals in items])
    counts = np.array([len(vals) for _, vals in items])
    edges = np.concatenate(([0], np.cumsum(counts)))
    rng = np.random.default_rng(seed)
    out = np.empty(n_permutations)
    for r in range(n_permutations):
        shuffled = pool[rng.permutation(len(pool))]
        sums = np.add.reduceat(shuffled, edges[:-1])
        means = sums / counts
        out[r] = np.sqrt(np.mean((means - means.mean()) ** 2))
    return out


def write_heatmap_csv(hm: Heatmap, path: str | Path) -> None:
    """Schema: bin_row,bin_col,mean_sim,n_pairs,shortfall (mirrored cells included)."""
    rows = []
    index = {b: i for i, b in enumerate(hm.bins)}
    for (b1, b2), vals in sorted(hm.cell_values.items()):
        i, j = index[b1], index[b2]
        rows.append((b1, b2, float(vals.mean()), len(vals), int(hm.cell_shortfall[i, j])))
        if b1 != b2:
            rows.append((b2, b1, float(vals.mean()), len(vals), int(hm.cell_shortfall[i, j])))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_row", "bin_col", "mean_sim", "n_pairs", "shortfall"])
        for b1, b2, m, n, s in rows:
            writer.writerow([b1, b2, repr(m), n, s])


@dataclass
class RmseResult:
    setting_id: str
    metric: str
    rmse_actual: float
    rmse_baseline: np.ndarray


def write_rmse_csv(results: Sequence[RmseResult], path: str | Path) -> None:
    """Schema: setting_id,metric,rmse_actual,baseline_q50,baseline_q99,baseline_max,n_perm."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["setting_id", "metric", "rmse_actual", "baseline_q50",
             "baseline_q99", "baseline_max", "n_perm"]
        )
        for r in results:
            base = np.asarray(r.rmse_baseline, dtype=np.float64)
            writer.writerow(
                [r.setting_id, r.metric, repr(float(r.rmse_actual)),
                 repr(float(np.quantile(base, 0.5))), repr(float(np.quantile(base, 0.99))),
                 repr(float(base.max())), len(base)]
            )


# ---------------------------------------------------------------------------
# Stratified PCA


@dataclass
class PcaResult:
    word_ids: np.ndarray
    word_bins: np.ndarray
    projections: np.ndarray
    centroids: dict[int, np.ndarray]
    explained_variance: np.ndarray
    components: np.ndarray


def _power_iteration(A: np.ndarray, start: np.ndarray, tol: float = 1e-10,
                     max_iter: int = 10_000) -> tuple[np.ndarray, float]:
    v = start / np.linalg.norm(start)
    for _ in range(max_iter):
        y = A @ v
        ny = np.linalg.norm(y)
        if ny < 1e-300:
            return v, 0.0  # matrix annihilates v: zero eigenvalue
        v_new = y / ny
        if np.linalg.norm(v_new - v) < tol or np.linalg.norm(v_new + v) < tol:
            v = v_new
            break
        v = v_new
    return v, float(v @ A @ v)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def _orthonormal_fallback(v1: np.ndarray) -> np.ndarray:
    k = int(np.argmin(np.abs(v1)))
    e = np.zeros_like(v1)
    e[k] = 1.0
    w = e - (e @ v1) * v1
    return w / np.linalg.norm(w)


def pca_stratified(
    emb: EmbeddingSet,
    binning: FrequencyBinning,
    words_per_bin: int = 100,
    seed: int = 0,
) -> PcaResult:
    """Top-2 PCA of a frequency-stratified sample of unit-normalized vectors.

    Samples up to ``words_per_bin`` words per occupied bin, L2-normalizes,
    mean-centers, and extracts the top two principal components by power
    iteration with deflation (tol 1e-10, max 10000 iterations). Component
    signs are fixed so the largest-magnitude coordinate is positive.
    """
    rng = np.random.default_rng(seed)
    ids_parts, bins_parts = [], []
    for b in binning.bins:
        members = binning.members[b]
        take = min(words_per_bin, len(members))
        pick = rng.choice(members, size=take, replace=False)
        ids_parts.append(np.sort(pick))
        bins_parts.append(np.full(take, b, dtype=np.int64))
    ids = np.concatenate(ids_parts)
    word_bins = np.concatenate(bins_parts)
    if len(ids) < 3:
        raise InsufficientDataError(f"PCA needs at least 3 sampled vectors, got {len(ids)}")

    X = emb.W[ids].astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", X, X))
    zero = np.flatnonzero(norms == 0.0)
    if len(zero):
        word = emb.vocab.words[int(ids[zero[0]])]
        raise SimilarityUndefinedError(f"cannot normalize zero vector of word {word!r}")
    Xn = X / norms[:, None]
    Xc = Xn - Xn.mean(axis=0)
    cov = (Xc.T @ Xc) / (len(ids) - 1)

    v1, lam1 = _power_iteration(cov, rng.standard_normal(cov.shape[0]))
    deflated = cov - lam1 * np.outer(v1, v1)
    v2, lam2 = _power_iteration(deflated, rng.standard_normal(cov.shape[0]))
    if lam2 <= 0.0:
        lam2 = max(lam2, 0.0)
        v2 = _orthonormal_fallback(v1)
    v1, v2 = _fix_sign(v1), _fix_sign(v2)
    components = np.stack([v1, v2])
    projections = Xc @ components.T
    centroids = {
        int(b): projections[word_bins == b].mean(axis=0) for b in binning.bins
    }
    return PcaResult(
        word_ids=ids, word_bins=word_bins, projections=projections,
        centroids=centroids, explained_variance=np.array([lam1, lam2]),
        components=components,
    )


def write_pca_csv(result: PcaResult, vocab: Vocabulary, path: str | Path) -> None:
    """Schema: word,bin,pc1,pc2,is_centroid (centroid rows carry an empty word)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "bin", "pc1", "pc2", "is_centroid"])
        for wid, b, (p1, p2) in zip(result.word_ids, result.word_bins, result.projections):
            writer.writerow([vocab.words[int(wid)], int(b), repr(float(p1)), repr(float(p2)), 0])
        for b in sorted(result.centroids):
            c = result.centroids[b]
            writer.writerow(["", int(b), repr(float(c[0])), repr(float(c[1])), 1])


# ---------------------------------------------------------------------------
# OLS regression of the RMSE metric on hyperparameter choices


@dataclass
class RegressionResult:
    terms: list[str]
    coef: np.ndarray
    se: np.ndarray
    t: np.ndarray
    p: np.ndarray
    n_observations: int
    r_squared: float


def ols(X: np.ndarray, y: np.ndarray, terms: Sequence[str] | None = None) -> RegressionResult:
    """QR-based least squares with classical standard errors.

    Two-sided p-values come from the t distribution with n - k degrees of
    freedom, evaluated through the regularized incomplete beta function.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ConfigError("design matrix must be 2-dimensional")
    n, k = X.shape
    if n < k:
        raise ConfigError(f"need at least as many rows ({n}) as columns ({k})")
    if terms is None:
        terms = [f"x{i}" for i in range(k)]
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-10 * max(diag.max(), 1.0):
        raise SingularDesignError("design matrix is rank deficient")
    coef = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ coef
    rss = float(resid @ resid)
    dof = n - k
    if dof < 1:
        raise InsufficientDataError("standard errors need more rows than columns")
    sigma2 = rss / dof
    Rinv = np.linalg.solve(R, np.eye(k))
    se = np.sqrt(sigma2 * np.einsum("ij,ij->i", Rinv, Rinv))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.divide(coef, se, out=np.full(k, np.inf), where=se > 0)
        t = np.where((se == 0) & (coef < 0), -np.inf, t)
        t = np.where((se == 0) & (coef == 0), 0.0, t)
        arg = dof / (dof + t * t)
    arg = np.where(np.isinf(t), 0.0, arg)
    p = betainc(dof / 2.0, 0.5, arg)
    tss = float(((y - y.mean()) ** 2).sum())
    if tss > 0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 1.0 if rss <= 1e-30 else 0.0
    return RegressionResult(
        terms=list(terms), coef=coef, se=se, t=t, p=p,
        n_observations=n, r_squared=float(r2),
    )


def build_rmse_design(
    setting_ids: Sequence[str], rmse_values: Sequence[float]
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Dummy-coded design for regressing RMSE on hyperparameter choices.

    Reference levels: win=2, w+c=no, neg=1, cds=0.75. A dummy column is
    emitted only when its level occurs in the data; settings without a
    hyperparameter (glove has no neg/cds) sit at the reference level.
    """
    if len(setting_ids) != len(rmse_values):
        raise ConfigError("setting_ids and rmse_values must align")
    parsed = [parse_setting_identifier(sid) for sid in setting_ids]
    columns: list[tuple[str, np.ndarray]] = []

    def level_col(name, active):
        vals = np.array([1.0 if active(p) else 0.0 for p in parsed])
        if vals.any():
            columns.append((name, vals))

    level_col("win=5", lambda p: p.get("window") == 5)
    level_col("win=10", lambda p: p.get("window") == 10)
    level_col("w+c=yes", lambda p: p.get("add_context") is True)
    level_col("neg=5", lambda p: p.get("negatives") == 5)
    level_col("neg=15", lambda p: p.get("negatives") == 15)
    level_col("cds=1", lambda p: p.get("cds_exponent") == 1.0)

    X = np.column_stack([np.ones(len(parsed))] + [c for _, c in columns])
    terms = ["intercept"] + [name for name, _ in columns]
    return X, np.asarray(rmse_values, dtype=np.float64), terms


def write_regression_csv(result: RegressionResult, path: str | Path) -> None:
    """Schema: term,coef,se,t,p."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["term", "coef", "se", "t", "p"])
        for i, term in enumerate(result.terms):
            writer.writerow(
                [term, repr(float(result.coef[i])), repr(float(result.se[i])),
                 repr(float(result.t[i])), repr(float(result.p[i]))]
            )
