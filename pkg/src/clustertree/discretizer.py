"""Piecewise-constant approximation of continuous densities on shifted grids.

Given an analytic density ``f`` with a Lipschitz certificate, keep the grid
cells on which ``f`` reaches ``eta`` (judged from a ``k^d`` sample lattice on
the closed cell) and give each kept cell the sampled maximum as its level.
The result ``g`` is a piecewise-constant density in F_int whose distance to
``f`` in sup-norm is certified from the Lipschitz bound.

:func:`convergence_experiment` repeats this over decreasing scales and
measures the sampled merge distortion between the Hartigan tree of ``g``
and the true merge heights of ``f``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .exceptions import (
    DisconnectedSupportError,
    InvariantError,
    NoSplitError,
    PreconditionError,
    SchemaError,
    TruthUnavailableError,
)
from .level_tree import Dendrogram, sweep_forest, sweep_tree
from .merge_metric import merge_heights_at_points
from .numbers import as_fraction
from .regions import RegionComplex, build_complex_from_cells, classify, region_at
from .shifted_grid import CellId, ShiftedGrid

__all__ = [
    "CellSup",
    "ConvergenceReport",
    "ConvergenceRow",
    "DensitySpec",
    "Discretization",
    "SplitResult",
    "convergence_experiment",
    "discretize",
    "split_fixture",
    "sup_on_cell",
    "truth_merge_height",
]

log = logging.getLogger(__name__)

GAUSSIAN = "gaussian_mixture"
BOXES = "box_mixture"


@dataclass(frozen=True)
class DensitySpec:
    """Analytic density: a mixture of isotropic Gaussians or of uniform boxes.

    Gaussian component ``k`` is ``N(means[k], scales[k]^2 I)``.  Box
    component ``k`` is uniform on the half-open box ``boxes[k] = (lower,
    upper)``.  Weights are positive and sum to one.
    """

    dim: int
    family: str
    weights: tuple[float, ...]
    means: tuple[tuple[float, ...], ...] = ()
    scales: tuple[float, ...] = ()
    boxes: tuple = ()

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if self.dim < 1 or int(self.dim) != self.dim:
            raise PreconditionError("dim must be a positive integer")
        if len(w) == 0 or np.any(w <= 0) or abs(w.sum() - 1) > 1e-9:
            raise PreconditionError("weights must be positive and sum to 1")
        if self.family == GAUSSIAN:
            if len(self.means) != len(w) or len(self.scales) != len(w):
                raise PreconditionError("need one mean and one scale per weight")
            if any(len(m) != self.dim for m in self.means):
                raise PreconditionError("mean dimension mismatch")
            if any(not s > 0 for s in self.scales):
                raise PreconditionError("scales must be positive")
        elif self.family == BOXES:
            if len(self.boxes) != len(w):
                raise PreconditionError("need one box per weight")
            for lo, hi in self.boxes:
                if len(lo) != self.dim or len(hi) != self.dim or any(a >= b for a, b in zip(lo, hi)):
                    raise PreconditionError(f"degenerate box {(lo, hi)}")
        else:
            raise PreconditionError(f"unknown family {self.family!r}")

    @classmethod
    def gaussian_mixture(cls, weights, means, scales) -> "DensitySpec":
        means = tuple(tuple(float(v) for v in np.atleast_1d(m)) for m in means)
        return cls(len(means[0]), GAUSSIAN, tuple(map(float, weights)), means, tuple(map(float, scales)))

    @classmethod
    def box_mixture(cls, weights, boxes) -> "DensitySpec":
        boxes = tuple(
            (tuple(float(v) for v in np.atleast_1d(lo)), tuple(float(v) for v in np.atleast_1d(hi)))
            for lo, hi in boxes
        )
        return cls(len(boxes[0][0]), BOXES, tuple(map(float, weights)), boxes=boxes)

    # -- evaluation -------------------------------------------------------------

    def _peaks(self) -> np.ndarray:
        w = np.asarray(self.weights)
        if self.family == GAUSSIAN:
            s = np.asarray(self.scales)
            return w * (2 * np.pi * s**2) ** (-self.dim / 2)
        vol = np.array([np.prod(np.subtract(hi, lo)) for lo, hi in self.boxes])
        return w / vol

    def __call__(self, X) -> np.ndarray:
        """Density at points; the last axis of ``X`` holds coordinates."""
        X = np.asarray(X, dtype=float)
        if X.shape[-1:] != (self.dim,):
            raise PreconditionError(f"points must have trailing dimension {self.dim}")
        flat = X.reshape(-1, self.dim)
        out = np.zeros(len(flat))
        peaks = self._peaks()
        if self.family == GAUSSIAN:
            for c, m, s in zip(peaks, self.means, self.scales):
                r2 = np.sum((flat - np.asarray(m)) ** 2, axis=1)
                out += c * np.exp(-r2 / (2 * s * s))
        else:
            for c, (lo, hi) in zip(peaks, self.boxes):
                inside = np.all((flat >= np.asarray(lo)) & (flat < np.asarray(hi)), axis=1)
                out += c * inside
        return out.reshape(X.shape[:-1])

    @property
    def peak_bound(self) -> float:
        """Upper bound on ``max f``."""
        return float(self._peaks().sum())

    @property
    def lipschitz_bound(self) -> float:
        """Certified Lipschitz constant (infinite for box mixtures).

        In one dimension: the maximum of ``|f'|`` on a dense grid over the
        hull of the means widened by the largest scale (beyond it every
        component slope has the same sign and decays), plus half the grid
        step times a bound on ``|f''|``.  In higher dimensions the gradient
        norm of each isotropic component peaks one standard deviation from
        its mean, and the peaks are summed.
        """
        if self.family == BOXES:
            return math.inf
        return _gaussian_lipschitz(self)

    def default_eta(self, scale: float) -> float:
        """Level threshold coupled to the mesh: ``L * scale * sqrt(d)``.

        Box mixtures have no Lipschitz constant; their smallest component
        height is used instead, so every cell meeting a box is kept.
        """
        if self.family == BOXES:
            return float(self._peaks().min())
        return self.lipschitz_bound * scale * math.sqrt(self.dim)

    def support_box(self, eta: float) -> tuple[np.ndarray, np.ndarray]:
        """Box outside of which ``f < eta``."""
        if eta > self.peak_bound:
            raise PreconditionError(f"eta={eta} is not below the maximum of the density")
        if self.family == BOXES:
            lo = np.min([b[0] for b in self.boxes], axis=0)
            hi = np.max([b[1] for b in self.boxes], axis=0)
            return lo, hi
        radius = max(self.scales) * math.sqrt(2 * math.log(self.peak_bound / eta))
        means = np.asarray(self.means)
        return means.min(axis=0) - radius, means.max(axis=0) + radius

    # -- serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        doc = {"schema": "v1", "dim": self.dim, "family": self.family, "weights": list(self.weights)}
        if self.family == GAUSSIAN:
            doc["means"] = [list(m) for m in self.means]
            doc["scales"] = list(self.scales)
        else:
            doc["boxes"] = [[list(lo), list(hi)] for lo, hi in self.boxes]
        return doc

    @classmethod
    def from_json(cls, doc) -> "DensitySpec":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        try:
            if doc.get("schema", "v1") != "v1":
                raise SchemaError(f"unsupported schema {doc['schema']!r}")
            family = doc["family"]
            if family == GAUSSIAN:
                spec = cls.gaussian_mixture(doc["weights"], doc["means"], doc["scales"])
            elif family == BOXES:
                spec = cls.box_mixture(doc["weights"], [tuple(b) for b in doc["boxes"]])
            else:
                raise SchemaError(f"unknown family {family!r}")
        except (KeyError, TypeError, IndexError) as exc:
            raise SchemaError(f"malformed density spec: {exc}") from None
        if spec.dim != doc["dim"]:
            raise SchemaError("dim does not match the component dimension")
        return spec


def _gaussian_lipschitz(spec: DensitySpec, step: float = 1e-4) -> float:
    s = np.asarray(spec.scales)
    peaks = spec._peaks()
    if spec.dim > 1:
        return float(np.sum(peaks * math.exp(-0.5) / s))
    key = (spec.weights, spec.means, spec.scales, step)
    if key not in _LIPSCHITZ_CACHE:
        mu = np.array([m[0] for m in spec.means])
        x = np.arange(mu.min() - s.max(), mu.max() + s.max() + step, step)
        slope = np.zeros_like(x)
        for c, m, sd in zip(peaks, mu, s):
            z = (x - m) / sd
            slope += -c * z / sd * np.exp(-z * z / 2)
        curvature = float(np.sum(peaks / s**2))  # max |phi''| = peak / sigma^2
        _LIPSCHITZ_CACHE[key] = float(np.abs(slope).max()) + step / 2 * curvature
    return _LIPSCHITZ_CACHE[key]


_LIPSCHITZ_CACHE: dict = {}


# -- per-cell bounds --------------------------------------------------------------


@dataclass(frozen=True)
class CellSup:
    """Bracket ``lower <= sup over the cell <= certified_upper``.

    ``floor`` is a lower bound on the infimum over the cell.
    """

    lower: float
    certified_upper: float
    floor: float


def _lattice_offsets(dim: int, scale: float, k: int) -> np.ndarray:
    ticks = np.linspace(0.0, scale, k)
    return np.array(list(product(ticks, repeat=dim)))


def _gaussian_sups(spec: DensitySpec, lowers: np.ndarray, scale: float, k: int) -> np.ndarray:
    offsets = _lattice_offsets(spec.dim, scale, k)
    out = np.empty(len(lowers))
    chunk = max(1, 200_000 // len(offsets))
    for s in range(0, len(lowers), chunk):
        pts = lowers[s:s + chunk, None, :] + offsets[None, :, :]
        out[s:s + chunk] = spec(pts).max(axis=1)
    return out


def _box_sup_inf(spec: DensitySpec, lo, hi) -> tuple[float, float]:
    # Exact: f is constant on each cell of the arrangement of boxes.
    lo = [as_fraction(v) for v in lo]
    hi = [as_fraction(v) for v in hi]
    peaks = spec._peaks()
    boxes = [
        ([as_fraction(v) for v in b_lo], [as_fraction(v) for v in b_hi]) for b_lo, b_hi in spec.boxes
    ]
    axes = []
    for i in range(spec.dim):
        cuts = {lo[i], hi[i]}
        for b_lo, b_hi in boxes:
            cuts |= {c for c in (b_lo[i], b_hi[i]) if lo[i] < c < hi[i]}
        axes.append(sorted(cuts))
    values = []
    for piece in product(*[list(zip(a, a[1:])) for a in axes]):
        # each piece is a half-open sub-box; test its lower corner
        corner = [p[0] for p in piece]
        val = sum(
            c for c, (b_lo, b_hi) in zip(peaks, boxes)
            if all(bl <= x < bh for x, bl, bh in zip(corner, b_lo, b_hi))
        )
        values.append(float(val))
    return max(values), min(values)


def sup_on_cell(spec: DensitySpec, cell: CellId, grid: ShiftedGrid, k: int = 11) -> CellSup:
    """Bracket the supremum of ``spec`` over one grid cell.

    For Gaussian mixtures ``lower`` is the maximum over a ``k^d`` lattice of
    the closed cell (corners included) and the bracket width is
    ``L * scale * sqrt(d) / (k - 1)``.  For box mixtures both ends are exact.
    """
    if k < 2:
        raise PreconditionError("samples_per_axis must be at least 2")
    box = grid.cell_box(cell)
    if spec.family == BOXES:
        sup, inf = _box_sup_inf(spec, box.lower, box.upper)
        return CellSup(sup, sup, inf)
    lower = float(_gaussian_sups(spec, np.array([[float(v) for v in box.lower]]), grid.scale, k)[0])
    L = spec.lipschitz_bound
    return CellSup(lower, lower + L * grid.diameter / (k - 1), lower - L * grid.diameter)


# -- discretization ------------------------------------------------------------------


@dataclass(frozen=True)
class Discretization:
    """A piecewise-constant approximation and its certificate.

    ``sup_norm_bound`` certifies ``||f - g||_inf``.
    """

    complex: RegionComplex
    grid: ShiftedGrid
    eta: float
    samples_per_axis: int
    sup_norm_bound: float
    sampling_slack: float
    in_F_int: bool

    @property
    def cell_count(self) -> int:
        return len(self.complex)

    def value_at(self, points) -> np.ndarray:
        """``g`` at each row of ``points``."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(P))
        for n, p in enumerate(P):
            r = region_at(p, self.complex)
            if r is not None:
                out[n] = float(self.complex.level(r))
        return out


def discretize(
    spec: DensitySpec,
    eta: float,
    grid_scale: float,
    k: int = 11,
    allow_disconnected: bool = False,
) -> Discretization:
    """Piecewise-constant ``g`` in F_int approximating ``spec``.

    Cells whose sampled maximum reaches ``eta`` are kept with that maximum
    as their level.  For Gaussian mixtures the certificate is
    ``max(L * diam, eta + L * diam / (k - 1))`` where ``diam`` is the cell
    diameter; for box mixtures it is computed exactly from per-cell sup and
    inf.  Raises :class:`DisconnectedSupportError` when the kept cells do not
    form a connected complex, unless ``allow_disconnected``.
    """
    if not eta > 0:
        raise PreconditionError("eta must be positive")
    if not grid_scale > 0:
        raise PreconditionError("grid_scale must be positive")
    if k < 2:
        raise PreconditionError("samples_per_axis must be at least 2")
    grid = ShiftedGrid(spec.dim, grid_scale)
    lo, hi = spec.support_box(eta)
    cells = list(grid.cells_meeting(lo, hi))
    lowers = np.array([[float(a) * grid_scale for a in c.anchor] for c in cells])

    diam = grid.diameter
    if spec.family == GAUSSIAN:
        L = spec.lipschitz_bound
        sups = _gaussian_sups(spec, lowers, grid_scale, k)
        slack = L * diam / (k - 1)
        bound = max(L * diam, eta + slack)
        kept = [(c, float(v)) for c, v in zip(cells, sups) if v >= eta]
    else:
        slack = 0.0
        kept, bound = [], 0.0
        for c in cells:
            box = grid.cell_box(c)
            sup, inf = _box_sup_inf(spec, box.lower, box.upper)
            if sup >= eta:
                kept.append((c, sup))
                bound = max(bound, sup - inf)
            else:
                bound = max(bound, sup)
    if not kept:
        raise PreconditionError("no cell reaches eta: empty support")

    complex = build_complex_from_cells(kept, grid)
    report = classify(complex)
    if report.in_F and not report.in_F_int:
        raise InvariantError(f"shifted-grid complex lacks the internally connected property: {report}")
    if not report.in_F and not allow_disconnected:
        raise DisconnectedSupportError(
            f"support at eta={eta:g}, scale={grid_scale:g} is disconnected "
            "(eta too large or mesh too coarse)"
        )
    log.debug("discretized: %d cells kept of %d, bound %.3g", len(kept), len(cells), bound)
    return Discretization(complex, grid, eta, k, bound, slack, report.in_F_int)


# -- ground truth ----------------------------------------------------------------------


def _sparse_table(values: np.ndarray) -> list[np.ndarray]:
    table = [values]
    span = 1
    while 2 * span <= len(values):
        prev = table[-1]
        table.append(np.minimum(prev[:-span], prev[span:]))
        span *= 2
    return table


def _range_min(table, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    # minimum of values[lo:hi] (hi exclusive, hi > lo)
    length = hi - lo
    level = np.floor(np.log2(length)).astype(int)
    out = np.empty(len(lo))
    for lv in np.unique(level):
        sel = level == lv
        span = 1 << lv
        row = table[lv]
        out[sel] = np.minimum(row[lo[sel]], row[hi[sel] - span])
    return out


def _symmetric_pair(spec: DensitySpec):
    if spec.family != GAUSSIAN or len(spec.weights) != 2:
        return None
    (w1, w2), (s1, s2) = spec.weights, spec.scales
    if not (math.isclose(w1, w2) and math.isclose(s1, s2)):
        return None
    m1, m2 = np.asarray(spec.means[0]), np.asarray(spec.means[1])
    if np.linalg.norm(m2 - m1) <= 2 * s1:
        return None  # unimodal: no saddle
    return m1, m2


def truth_merge_height(spec: DensitySpec, X, Y, resolution: float = 1e-3) -> np.ndarray:
    """True merge heights ``m_f(x, y)`` of the continuous density.

    In one dimension connected sets are intervals, so ``m_f(x, y)`` is the
    minimum of ``f`` on ``[x, y]``, found by a dense scan with spacing
    ``resolution`` (endpoints evaluated exactly).  In higher dimensions only
    the symmetric two-Gaussian mixture is supported: its upper level sets
    split into two halves exactly above the midpoint value.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    fx, fy = spec(X), spec(Y)
    ends = np.minimum(fx, fy)
    if spec.dim == 1:
        a = np.minimum(X[:, 0], Y[:, 0])
        b = np.maximum(X[:, 0], Y[:, 0])
        start = a.min()
        n = int(math.ceil((b.max() - start) / resolution)) + 2
        grid = start + resolution * np.arange(n)
        table = _sparse_table(spec(grid[:, None]))
        lo = np.searchsorted(grid, a, side="right")
        hi = np.searchsorted(grid, b, side="left")
        out = ends.copy()
        inner = hi > lo
        out[inner] = np.minimum(out[inner], _range_min(table, lo[inner], hi[inner]))
        return out

    pair = _symmetric_pair(spec)
    if pair is None:
        raise TruthUnavailableError(
            "true merge heights are available in 1-D and for symmetric bimodal Gaussian pairs only"
        )
    m1, m2 = pair
    mid = (m1 + m2) / 2
    saddle = float(spec(mid[None, :])[0])
    axis = m2 - m1
    same_side = np.sign((X - mid) @ axis) == np.sign((Y - mid) @ axis)
    return np.where((ends <= saddle) | same_side, ends, saddle)


# -- convergence experiment -------------------------------------------------------------

REPORT_COLUMNS = (
    "scale",
    "eta_used",
    "sup_norm_bound",
    "sup_norm_sampled",
    "d_M_to_truth",
    "cell_count",
    "in_F_int",
)


@dataclass(frozen=True)
class ConvergenceRow:
    scale: float
    eta_used: float
    sup_norm_bound: float
    sup_norm_sampled: float
    d_M_to_truth: float
    cell_count: int
    in_F_int: bool


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    pair_samples: int
    seed: int

    @property
    def within_bound(self) -> bool:
        """Every row's sampled distortion is below its certified sup-norm bound."""
        return all(r.d_M_to_truth <= r.sup_norm_bound for r in self.rows)

    @property
    def d_M_non_increasing(self) -> bool:
        d = [r.d_M_to_truth for r in self.rows]
        return all(b <= a for a, b in zip(d, d[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            row = asdict(r)
            row["in_F_int"] = str(r.in_F_int).lower()
            writer.writerow({c: (repr(v) if isinstance(v, float) else v) for c, v in row.items()})
        return buf.getvalue()


def convergence_experiment(
    spec: DensitySpec,
    scales: Sequence[float],
    pair_samples: int = 1000,
    seed: int = 0,
    k: int = 11,
    eta: float | None = None,
) -> ConvergenceReport:
    """Discretize at each scale and compare with the true merge heights.

    Each row uses ``eta = spec.default_eta(scale)`` unless ``eta`` is
    given.  Rows whose support comes out disconnected are kept, with
    ``in_F_int`` false and the Hartigan forest in place of the tree.
    The same ``pair_samples`` point pairs, drawn uniformly from the
    support box at the smallest threshold, are used in every row.
    """
    scales = [float(s) for s in scales]
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise PreconditionError("scales must be strictly decreasing")
    if spec.dim > 1 and _symmetric_pair(spec) is None:
        raise TruthUnavailableError("no ground-truth merge heights for this density")
    etas = [eta if eta is not None else spec.default_eta(s) for s in scales]
    lo, hi = spec.support_box(min(etas))
    rng = np.random.default_rng(seed)
    X = rng.uniform(lo, hi, size=(pair_samples, spec.dim))
    Y = rng.uniform(lo, hi, size=(pair_samples, spec.dim))
    truth = truth_merge_height(spec, X, Y)
    P = np.vstack([X, Y])
    fP = spec(P)

    rows = []
    for s, e in zip(scales, etas):
        disc = discretize(spec, e, s, k, allow_disconnected=True)
        cx = disc.complex
        tree = sweep_forest(cx, "touch")
        approx = merge_heights_at_points(tree, cx, X, Y)
        d_M = float(np.max(np.abs(approx - truth)))
        sup_sampled = float(np.max(np.abs(disc.value_at(P) - fP)))
        rows.append(
            ConvergenceRow(s, e, disc.sup_norm_bound, sup_sampled, d_M, disc.cell_count, disc.in_F_int)
        )
        log.info("scale %g: d_M %.4g, bound %.4g, %d cells", s, d_M, disc.sup_norm_bound, disc.cell_count)
    return ConvergenceReport(tuple(rows), pair_samples, seed)


# -- split fixture ------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitResult:
    tree: Dendrogram
    saddle_level: float
    discretization: Discretization


def split_fixture(spec: DensitySpec, scale: float = 0.0625, k: int = 11, eta: float | None = None) -> SplitResult:
    """Height at which the discretized Hartigan tree first branches.

    Walks down from the root through single-child nodes; the first node
    with two or more children marks the split of the upper level sets,
    which approximates the saddle value of ``f`` within ``L * scale *
    sqrt(d)``.
    """
    disc = discretize(spec, eta if eta is not None else spec.default_eta(scale), scale, k)
    tree = sweep_tree(disc.complex, "touch")
    node = tree.roots[0]
    while len(tree.children[node]) == 1:
        node = tree.children[node][0]
    if not tree.children[node]:
        raise NoSplitError("no split: the discretized tree never branches")
    return SplitResult(tree, float(tree.height[node]), disc)
