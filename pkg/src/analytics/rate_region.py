"""
Rate Region Grids

Per-link achievable rate regions of a two-hop line network, with and without
decoding and re-encoding at the relay, plus shape summaries of the resulting
feasible sets.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.analytics.erasure_analytics import rper_single_hop
from src.coding.models import CodeParams

logger = logging.getLogger(__name__)

SCHEME_NC = 'nc'
SCHEME_E2E = 'e2e'
SCHEMES = (SCHEME_NC, SCHEME_E2E)

CSV_COLUMNS = ['delta1', 'delta2', 'scheme', 'feasible', 'best_r', 'achieved_rate']


@dataclass(frozen=True)
class GridSpec:
    """Erasure-rate axis: 0 to max_delta inclusive, in steps of step."""
    max_delta: float = 0.5
    step: float = 0.01

    def __post_init__(self):
        if self.step <= 0 or self.max_delta < 0 or self.max_delta > 1:
            raise ValueError(f"Invalid grid: max_delta={self.max_delta}, step={self.step}")

    def axis(self) -> np.ndarray:
        cells = int(round(self.max_delta / self.step))
        # Rounded so that axis values print and compare as their decimal form
        return np.round(np.arange(cells + 1) * self.step, 10)


@dataclass
class RegionCell:
    feasible: bool
    best_r: Optional[float] = None
    best_n: Optional[int] = None
    achieved_rate: Optional[float] = None


@dataclass
class RateRegionGrid:
    """
    Rate region over a (delta1, delta2) grid.

    cells[i][j] corresponds to (delta1_axis[i], delta2_axis[j]).
    """
    scheme: str
    k: int
    q: int
    eta0: float
    rate_window: Tuple[float, float]
    delta1_axis: np.ndarray
    delta2_axis: np.ndarray
    cells: List[List[RegionCell]] = field(default_factory=list)

    def feasible_mask(self) -> np.ndarray:
        return np.array([[cell.feasible for cell in row] for row in self.cells], dtype=bool)

    def to_frame(self) -> pd.DataFrame:
        """Long-format table, one row per cell, with the CSV export columns."""
        rows = []
        for i, d1 in enumerate(self.delta1_axis):
            for j, d2 in enumerate(self.delta2_axis):
                cell = self.cells[i][j]
                rows.append({
                    'delta1': float(d1),
                    'delta2': float(d2),
                    'scheme': self.scheme,
                    'feasible': cell.feasible,
                    'best_r': cell.best_r,
                    'achieved_rate': cell.achieved_rate,
                })
        return pd.DataFrame(rows, columns=CSV_COLUMNS)


@dataclass
class RegionSummary:
    """Shape figures of a feasible set."""
    scheme: str
    feasible_cells: int
    total_cells: int
    feasible_fraction: float
    axis1_interval: Optional[Tuple[float, float]]
    axis2_interval: Optional[Tuple[float, float]]
    rectangularity: float
    symmetric: bool
    area_ratio: Optional[float] = None
    product_mismatch_cells: List[Tuple[float, float]] = field(default_factory=list)
    mismatches_on_edge: bool = True

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def block_lengths(k: int, rate_window: Tuple[float, float]) -> List[int]:
    """
    Integer block lengths n whose rate k/n lies in the window, smallest first.

    Raises:
        ValueError: If the window is empty or holds no k/n
    """
    r_min, r_max = rate_window
    if not 0 < r_min <= r_max <= 1:
        raise ValueError(f"Empty or invalid rate window {rate_window}")
    n_lo = math.ceil(k / r_max - 1e-12)
    n_hi = math.floor(k / r_min + 1e-12)
    lengths = list(range(max(n_lo, k), n_hi + 1))
    if not lengths:
        raise ValueError(f"Rate window {rate_window} contains no rate k/n for k={k}")
    return lengths


@lru_cache(maxsize=200000)
def _rper(k: int, n: int, q: int, delta: float) -> float:
    return rper_single_hop(CodeParams(k=k, n=n, q=q), delta)


def _cell_eta(scheme: str, k: int, n: int, q: int, delta1: float, delta2: float) -> float:
    # Both per-link residuals share one n, so the NC target couples the two links
    if scheme == SCHEME_NC:
        return 1.0 - (1.0 - _rper(k, n, q, delta1)) * (1.0 - _rper(k, n, q, delta2))
    total = 1.0 - (1.0 - delta1) * (1.0 - delta2)
    return _rper(k, n, q, round(total, 12))


def evaluate_cell(scheme: str, k: int, delta1: float, delta2: float, q: int = 8,
                  eta0: float = 0.05, rate_window: Tuple[float, float] = (0.5, 1.0)) -> RegionCell:
    """
    Largest rate in the window meeting eta0 on links (delta1, delta2).

    Raises:
        ValueError: For an unknown scheme, an empty window or an erasure rate outside [0, 1]
    """
    if scheme not in SCHEMES:
        raise ValueError(f"Unknown scheme {scheme!r}; expected one of {SCHEMES}")
    for delta in (delta1, delta2):
        if not 0.0 <= delta <= 1.0:
            raise ValueError(f"Erasure rate must be in [0, 1], got {delta}")
    return _first_feasible(scheme, k, q, eta0, block_lengths(k, rate_window), float(delta1), float(delta2))


def _first_feasible(scheme: str, k: int, q: int, eta0: float, lengths: List[int],
                    delta1: float, delta2: float) -> RegionCell:
    for n in lengths:
        eta = _cell_eta(scheme, k, n, q, delta1, delta2)
        if eta <= eta0:
            r = k / n
            return RegionCell(feasible=True, best_r=r, best_n=n, achieved_rate=r * (1.0 - eta))
    return RegionCell(feasible=False)


def rate_region_grid(scheme: str, k: int, q: int = 8, eta0: float = 0.05,
                     rate_window: Tuple[float, float] = (0.5, 1.0),
                     grid: Optional[GridSpec] = None) -> RateRegionGrid:
    """
    Compute the two-hop rate region grid for one scheme.

    Each cell takes the largest rate (smallest n) in the window whose residual
    erasure meets eta0. The NC scheme decodes and re-encodes at the relay, so
    the per-hop RPERs compose; the end-to-end scheme only codes at the source,
    which then sees the total erasure of both links.

    Args:
        scheme: 'nc' or 'e2e'
        k: Information packets per generation
        q: Field exponent
        eta0: Target residual erasure rate
        rate_window: (r_min, r_max)
        grid: Axis layout, shared by both axes

    Returns:
        RateRegionGrid
    """
    if scheme not in SCHEMES:
        raise ValueError(f"Unknown scheme {scheme!r}; expected one of {SCHEMES}")
    lengths = block_lengths(k, rate_window)
    grid = grid or GridSpec()
    axis = grid.axis()

    region = RateRegionGrid(scheme=scheme, k=k, q=q, eta0=eta0, rate_window=tuple(rate_window),
                            delta1_axis=axis, delta2_axis=axis.copy())
    for d1 in axis:
        region.cells.append([_first_feasible(scheme, k, q, eta0, lengths, float(d1), float(d2))
                             for d2 in axis])

    feasible = int(region.feasible_mask().sum())
    logger.info(f"Rate region ({scheme}): {feasible}/{axis.size ** 2} feasible cells")
    return region


def _axis_interval(axis: np.ndarray, mask: np.ndarray) -> Optional[Tuple[float, float]]:
    hits = np.flatnonzero(mask)
    if hits.size == 0:
        return None
    return float(axis[hits[0]]), float(axis[hits[-1]])


def summarize_region(grid: RateRegionGrid, baseline: Optional[RateRegionGrid] = None) -> RegionSummary:
    """
    Summarize the shape of a feasible set.

    Per-axis intervals are read along the axes (the other link lossless).
    Rectangularity is the feasible cell count over the product of the per-axis
    feasible cell counts, so an axis-aligned product set scores 1. Cells of
    that product set which are infeasible are listed as product mismatches;
    mismatches_on_edge is True when every one lies within one grid step of
    the last feasible value on both axes.

    Args:
        grid: Region to summarize
        baseline: Optional region to compare areas against

    Returns:
        RegionSummary
    """
    mask = grid.feasible_mask()
    feasible = int(mask.sum())
    along1 = mask[:, 0]
    along2 = mask[0, :]
    box = int(along1.sum()) * int(along2.sum())
    rectangularity = feasible / box if box else 0.0
    symmetric = mask.shape[0] == mask.shape[1] and bool(np.array_equal(mask, mask.T))

    product = np.outer(along1, along2)
    missing = np.argwhere(product & ~mask)
    mismatches = [(float(grid.delta1_axis[i]), float(grid.delta2_axis[j])) for i, j in missing]
    on_edge = True
    if missing.size:
        edge1, edge2 = np.flatnonzero(along1)[-1], np.flatnonzero(along2)[-1]
        on_edge = bool(np.all((missing[:, 0] >= edge1 - 1) & (missing[:, 1] >= edge2 - 1)))

    area_ratio = None
    if baseline is not None:
        base = int(baseline.feasible_mask().sum())
        area_ratio = feasible / base if base else math.inf

    return RegionSummary(
        scheme=grid.scheme,
        feasible_cells=feasible,
        total_cells=mask.size,
        feasible_fraction=feasible / mask.size,
        axis1_interval=_axis_interval(grid.delta1_axis, along1),
        axis2_interval=_axis_interval(grid.delta2_axis, along2),
        rectangularity=rectangularity,
        symmetric=symmetric,
        area_ratio=area_ratio,
        product_mismatch_cells=mismatches,
        mismatches_on_edge=on_edge,
    )
