"""Hyperparameter bundles and the evaluation grid."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from ..errors import ConfigError

METHODS = ("sgns", "glove", "fasttext")

# Grid axes shared by every method, and the extra axes for the SGNS family.
GRID_WINDOWS = (2, 5, 10)
GRID_ADD_CONTEXT = (False, True)
GRID_CDS = (0.75, 1.0)
GRID_NEGATIVES = (1, 5, 15)


@dataclass(frozen=True)
class Hyperparams:
    """Training configuration; defaults follow the reference implementations.

    ``epochs`` doubles as the AdaGrad iteration count for glove. A
    ``subsample`` of 0 disables frequent-word downsampling;
    ``fasttext_buckets`` of 0 disables character n-grams entirely.
    """

    method: str = "sgns"
    dim: int = 300
    window: int = 10
    add_context: bool = False
    negatives: int = 5
    cds_exponent: float = 0.75
    epochs: int = 5
    seed: int = 1
    learning_rate: float = 0.025
    min_count: int = 100
    subsample: float = 1e-3
    dynamic_window: bool = True
    fasttext_ngram_min: int = 3
    fasttext_ngram_max: int = 6
    fasttext_buckets: int = 2_000_000
    glove_x_max: float = 100.0
    glove_alpha: float = 0.75

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.negatives < 1:
            raise ConfigError("negatives must be >= 1")
        if not (0.0 < self.cds_exponent <= 1.0):
            raise ConfigError("cds_exponent must lie in (0, 1]")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.subsample < 0:
            raise ConfigError("subsample must be >= 0 (0 disables)")
        if self.fasttext_buckets < 0:
            raise ConfigError("fasttext_buckets must be >= 0 (0 disables n-grams)")
        if not (1 <= self.fasttext_ngram_min <= self.fasttext_ngram_max):
            raise ConfigError("need 1 <= fasttext_ngram_min <= fasttext_ngram_max")

    @classmethod
    def defaults(cls, method: str, **overrides) -> "Hyperparams":
        """Per-method defaults: sgns/fasttext run 5 epochs at lr 0.025,
        glove runs 15 AdaGrad iterations at lr 0.05."""
        base = dict(method=method)
        if method == "glove":
            base.update(learning_rate=0.05, epochs=15)
        base.update(overrides)
        return cls(**base)


@dataclass(frozen=True)
class GridSetting:
    """One concrete grid point plus its stable identifier."""

    setting_id: str
    hyperparams: Hyperparams


def setting_identifier(hp: Hyperparams) -> str:
    """Stable string encoding every grid-varied hyperparameter."""
    wc = "yes" if hp.add_context else "no"
    parts = [hp.method, f"win{hp.window}", f"wc{wc}"]
    if hp.method in ("sgns", "fasttext"):
        parts.append(f"cds{hp.cds_exponent:g}")
        parts.append(f"neg{hp.negatives}")
    return "_".join(parts)


def parse_setting_identifier(setting_id: str) -> dict:
    """Invert :func:`setting_identifier` into a field dict."""
    parts = setting_id.split("_")
    if len(parts) < 3:
        raise ConfigError(f"malformed setting id {setting_id!r}")
    out: dict = {"method": parts[0]}
    for part in parts[1:]:
        if part.startswith("win"):
            out["window"] = int(part[3:])
        elif part.startswith("wc"):
            out["add_context"] = part[2:] == "yes"
        elif part.startswith("cds"):
            out["cds_exponent"] = float(part[3:])
        elif part.startswith("neg"):
            out["negatives"] = int(part[3:])
        else:
            raise ConfigError(f"unknown component {part!r} in setting id {setting_id!r}")
    return out


def enumerate_grid(method: str, base: Hyperparams | None = None) -> list[GridSetting]:
    """Full Cartesian product of the grid axes that apply to ``method``.

    Yields 6 settings for glove and 36 for sgns/fasttext, in a deterministic
    order (window, then w+c, then cds, then negatives).
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {METHODS}")
    if base is None:
        base = Hyperparams.defaults(method)
    settings = []
    if method == "glove":
        for win, wc in itertools.product(GRID_WINDOWS, GRID_ADD_CONTEXT):
            hp = replace(base, method=method, window=win, add_context=wc)
            settings.append(GridSetting(setting_identifier(hp), hp))
    else:
        for win, wc, cds, neg in itertools.product(
            GRID_WINDOWS, GRID_ADD_CONTEXT, GRID_CDS, GRID_NEGATIVES
        ):
            hp = replace(
                base,
                method=method,
                window=win,
                add_context=wc,
                cds_exponent=cds,
                negatives=neg,
            )
            settings.append(GridSetting(setting_identifier(hp), hp))
    return settings
