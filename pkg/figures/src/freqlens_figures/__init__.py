"""Render freqlens CSV artifacts as figures.

Four figure kinds, one per artifact schema:

- ``heatmap``      from ``bin_row,bin_col,mean_sim,n_pairs,shortfall``
- ``pca_scatter``  from ``word,bin,pc1,pc2,is_centroid``
- ``bias_lines``   from ``corpus_id,bin,class,n,mean,ci_low,ci_high``
- ``rmse_strips``  from ``setting_id,metric,rmse_actual,baseline_q50,baseline_q99,baseline_max,n_perm``

Rendering is deterministic: repeated runs produce byte-identical SVG.
"""

from .render import (
    EmptyDataError,
    FigureSpec,
    RenderError,
    RenderInfo,
    SchemaError,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "EmptyDataError",
    "FigureSpec",
    "RenderError",
    "RenderInfo",
    "SchemaError",
    "render",
]
