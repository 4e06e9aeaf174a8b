"""Cell quadrature and layer-cake integration of grid functions.

Every cell of the tensor grid gets one value from its ``2**n`` corner nodes:

* a zero corner makes the cell zero (the closed support ends there);
* a corner at ``+inf`` caps the cell at its largest finite corner value;
* otherwise the cell value is ``exp(-mean(v))``, the geometric mean of the
  corner values (an average of ``v = -log f``, not of ``f``).

The log-space average is exact for ``exp`` of an affine function across the
cell midpoint and, unlike the arithmetic mean, does not smear a support face
that sits on a grid plane half a cell outward.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .grids import GridFunction, tail_estimate

__all__ = [
    "Integral",
    "cell_values",
    "integrate",
    "superlevel_volume",
    "default_levels",
    "layer_cake",
]


class Integral(NamedTuple):
    value: float
    tail: float


def _corners(a: np.ndarray):
    n = a.ndim
    for offs in itertools.product((0, 1), repeat=n):
        yield a[tuple(slice(o, a.shape[i] - 1 + o) for i, o in enumerate(offs))]


def _check_isolated(inf_mask: np.ndarray):
    """Reject two ``+inf`` nodes that share a cell."""
    if inf_mask.sum() < 2:
        return
    n = inf_mask.ndim
    for offs in itertools.product((-1, 0, 1), repeat=n):
        if all(o == 0 for o in offs) or next(o for o in offs if o != 0) < 0:
            continue
        a_sl, b_sl = [], []
        for o, size in zip(offs, inf_mask.shape):
            a_sl.append(slice(max(0, -o), size - max(0, o)))
            b_sl.append(slice(max(0, o), size - max(0, -o)))
        if (inf_mask[tuple(a_sl)] & inf_mask[tuple(b_sl)]).any():
            raise ValueError("+inf nodes must be isolated (no two in a common cell)")


def cell_values(f: GridFunction) -> np.ndarray:
    """One value per grid cell, shape ``counts - 1`` (see module docstring)."""
    inf_mask = np.isinf(f.values)
    _check_isolated(inf_mask)
    v = f.neglog
    corners_v = list(_corners(v))
    zero = np.zeros(corners_v[0].shape, dtype=bool)
    for c in corners_v:
        zero |= c == np.inf
    if not inf_mask.any():
        with np.errstate(invalid="ignore"):
            mean_v = np.mean(corners_v, axis=0)
        return np.where(zero, 0.0, np.exp(-np.where(zero, 0.0, mean_v)))
    corners_f = list(_corners(f.values))
    touch = np.zeros_like(zero)
    cap = np.zeros(zero.shape)
    for c in corners_f:
        touch |= np.isinf(c)
        cap = np.maximum(cap, np.where(np.isinf(c), 0.0, c))
    safe = [np.where(np.isfinite(c), c, 0.0) for c in corners_v]
    mean_v = np.mean(safe, axis=0)
    out = np.exp(-mean_v)
    out = np.where(touch, cap, out)
    return np.where(zero, 0.0, out)


def integrate(f: GridFunction) -> Integral:
    """Cell-value quadrature of ``f`` over its box plus a truncation-tail estimate."""
    total = float(np.sum(cell_values(f))) * f.domain.cell_volume
    return Integral(total, tail_estimate(f))


def superlevel_volume(f: GridFunction, s: float, cells: Optional[np.ndarray] = None) -> float:
    """Volume of the cells whose value exceeds ``s``."""
    if s < 0:
        raise ValueError("level must be non-negative")
    cells = cell_values(f) if cells is None else cells
    return int(np.count_nonzero(cells > s)) * f.domain.cell_volume


def default_levels(f: GridFunction, count: int = 64, floor: float = 1e-6) -> np.ndarray:
    """``count`` geometric levels from the largest cell value down to ``floor`` times it."""
    top = float(cell_values(f).max())
    return top * np.geomspace(1.0, floor, count)


def layer_cake(f: GridFunction, levels: Optional[Sequence[float]] = None) -> float:
    """``sum (s_k - s_{k+1}) * V({f > s_k+1/2})`` over the level grid closed by 0.

    ``s_k+1/2`` is the arithmetic midpoint of consecutive levels.  Mass
    above the first level is not counted, so the first level should be the
    maximum.
    """
    cells = cell_values(f)
    if levels is None:
        top = float(cells.max())
        levels = top * np.geomspace(1.0, 1e-6, 64)
    s = np.asarray(levels, dtype=float)
    if s.ndim != 1 or s.size == 0 or (s <= 0).any() or (np.diff(s) >= 0).any():
        raise ValueError("levels must be a non-empty strictly decreasing positive sequence")
    s = np.append(s, 0.0)
    flat = np.sort(cells.ravel())
    mids = 0.5 * (s[:-1] + s[1:])
    above = flat.size - np.searchsorted(flat, mids, side="right")
    return float(np.sum((s[:-1] - s[1:]) * above)) * f.domain.cell_volume
