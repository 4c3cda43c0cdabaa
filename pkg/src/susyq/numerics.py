"""Uniform grids, finite differences, quadrature, and series summation.

Everything in the package runs on a fixed symmetric grid [-L, L].  Two value
carriers exist:

* ``GridFunction`` holds plain finite complex samples.
* ``ScaledGridFunction`` holds ``values * exp(log_scale)`` with a finite
  complex ``values`` array and a real ``log_scale`` array.  Families that grow
  like exp(exp(x)) are not representable as doubles on a wide grid, but their
  pairings with decaying partners are perfectly finite; the scaled carrier
  keeps the exponent symbolic until the inner product combines them, so those
  pairings (and shift-invariant relative residuals) are computed without
  overflow.

Derivatives are 4th-order central differences in the interior with one-sided
stencils of matching order at the edges.  Inner products use composite Simpson
weights, conjugate-linear in the first slot.  Residual checks should drop the
outermost 5 points per edge, where one-sided stencils live.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .expr import Expr, evaluate_array

__all__ = [
    "Grid",
    "GridFunction",
    "ScaledGridFunction",
    "NumericsError",
    "PoleOnGridError",
    "RepresentationError",
    "NonConvergenceError",
    "default_grid",
    "as_scaled",
    "sample",
    "derivative",
    "inner",
    "norm",
    "integrate_halfline",
    "gamma_average",
    "sum_series",
    "cumulative_antiderivative",
    "max_rel_difference",
    "relative_residual",
    "interior_slice",
    "interior_norm",
    "fitted_decay_exponents",
    "gridfunction_to_csv",
    "gridfunction_from_csv",
]

EDGE_PAD = 5  # points per edge excluded from residual checks
DECAY_FIT_FRACTION = 0.2  # outer fraction of the grid used for decay fits
DECAY_EPSILON = 0.05  # a tail decays if its fitted outward slope < -epsilon

_LOG_HUGE = 700.0  # exp() beyond this is not representable in float64


class NumericsError(RuntimeError):
    """Base class for grid/quadrature failures."""


class PoleOnGridError(NumericsError):
    """Sampling produced non-finite values; carries the first offending x."""

    def __init__(self, x: float, index: int, count: int):
        super().__init__(
            f"non-finite sample (pole or overflow) at x={x!r} "
            f"(grid index {index}, {count} offending point{'s' if count != 1 else ''})"
        )
        self.x = x
        self.index = index
        self.count = count


class RepresentationError(NumericsError):
    """A scaled function cannot be materialized into plain doubles."""


class NonConvergenceError(NumericsError):
    """An adaptive quadrature or series did not meet its tolerance."""


class Grid:
    """Uniform symmetric grid: x_j = -L + j*h, h = 2L/(N-1), j = 0..N-1."""

    def __init__(self, half_width: float = 12.0, n_points: int = 4097):
        half_width = float(half_width)
        n_points = int(n_points)
        if not half_width > 0:
            raise ValueError("half_width must be positive")
        if n_points < 16:
            raise ValueError("n_points must be at least 16")
        self.half_width = half_width
        self.n_points = n_points
        self.spacing = 2.0 * half_width / (n_points - 1)
        self.x = -half_width + self.spacing * np.arange(n_points)
        self._simpson = None

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.half_width == other.half_width
            and self.n_points == other.n_points
        )

    def __hash__(self):
        return hash((self.half_width, self.n_points))

    def __repr__(self):
        return f"Grid(half_width={self.half_width}, n_points={self.n_points})"

    @property
    def simpson_weights(self) -> np.ndarray:
        """Composite Simpson weights; a 3/8-rule tail absorbs an odd interval
        count so both grid parities integrate at 4th order."""
        if self._simpson is None:
            n, h = self.n_points, self.spacing
            w = np.zeros(n)
            if n % 2 == 1:
                w[0] = w[-1] = 1.0
                w[1:-1:2] = 4.0
                w[2:-2:2] = 2.0
                w *= h / 3.0
            else:
                w[0] = w[n - 4] = 1.0
                w[1 : n - 4 : 2] = 4.0
                w[2 : n - 4 : 2] = 2.0
                w *= h / 3.0
                w[n - 4 :] += h * np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
            self._simpson = w
        return self._simpson


def default_grid() -> Grid:
    return Grid()


def _check_same_grid(f, g):
    if f.grid != g.grid:
        raise ValueError(f"grid mismatch: {f.grid!r} vs {g.grid!r}")


class GridFunction:
    """Finite complex samples on a grid."""

    def __init__(self, grid: Grid, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (grid.n_points,):
            raise ValueError(f"expected {grid.n_points} values, got shape {values.shape}")
        bad = ~np.isfinite(values)
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            raise PoleOnGridError(float(grid.x[j]), j, int(bad.sum()))
        self.grid = grid
        self.values = values

    def __add__(self, other):
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, GridFunction):
            _check_same_grid(self, c)
            return GridFunction(self.grid, self.values * c.values)
        return GridFunction(self.grid, self.values * c)

    __rmul__ = __mul__

    def conj(self) -> "GridFunction":
        return GridFunction(self.grid, np.conjugate(self.values))


class ScaledGridFunction:
    """values * exp(log_scale) with finite ``values`` and real ``log_scale``.

    ``dlog``/``d2log`` optionally carry exact derivatives of ``log_scale``
    (available whenever the scale came from a known superpotential); finite
    differences fill in when absent.
    """

    def __init__(self, grid: Grid, values, log_scale, dlog=None, d2log=None):
        values = np.asarray(values, dtype=np.complex128)
        log_scale = np.asarray(log_scale, dtype=float)
        if values.shape != (grid.n_points,) or log_scale.shape != (grid.n_points,):
            raise ValueError("values and log_scale must match the grid length")
        if not np.isfinite(values).all():
            raise ValueError("scaled values must be finite")
        if not np.isfinite(log_scale).all():
            raise ValueError("log_scale must be finite")
        self.grid = grid
        self.values = values
        self.log_scale = log_scale
        self.dlog = None if dlog is None else np.asarray(dlog, dtype=float)
        self.d2log = None if d2log is None else np.asarray(d2log, dtype=float)

    def with_values(self, values) -> "ScaledGridFunction":
        """Same scale (and scale derivatives), new prefactor values."""
        return ScaledGridFunction(self.grid, values, self.log_scale, self.dlog, self.d2log)

    def log_magnitude(self) -> np.ndarray:
        """log|f| pointwise; -inf where the prefactor vanishes."""
        with np.errstate(divide="ignore"):
            return self.log_scale + np.log(np.abs(self.values))

    def representable(self) -> bool:
        mag = self.log_magnitude()
        return bool(np.max(mag[np.isfinite(mag)], initial=-np.inf) < _LOG_HUGE)

    def materialize(self) -> GridFunction:
        if not self.representable():
            j = int(np.argmax(self.log_magnitude()))
            raise RepresentationError(
                f"function exceeds float range near x={float(self.grid.x[j])!r}; "
                "keep it in scaled form"
            )
        return GridFunction(self.grid, self.values * np.exp(self.log_scale))

    def scale_shifted_values(self):
        """(values * exp(log_scale - s0), s0) with s0 = max log_scale."""
        s0 = float(np.max(self.log_scale))
        return self.values * np.exp(self.log_scale - s0), s0


def as_scaled(f) -> ScaledGridFunction:
    if isinstance(f, ScaledGridFunction):
        return f
    return ScaledGridFunction(f.grid, f.values, np.zeros(f.grid.n_points))


# ---------------------------------------------------------------------------
# sampling and differentiation

def sample(e: Expr, grid: Grid) -> GridFunction:
    """Evaluate an expression on the grid; poles are reported, not returned."""
    values = evaluate_array(e, grid.x)
    bad = ~np.isfinite(values)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise PoleOnGridError(float(grid.x[j]), j, int(bad.sum()))
    return GridFunction(grid, values)


@lru_cache(maxsize=64)
def _one_sided_weights(offsets: tuple, order: int) -> np.ndarray:
    """Stencil weights (in units of h**-order) from the Taylor system."""
    k = len(offsets)
    a = np.empty((k, k))
    for p in range(k):
        a[p] = [o**p / math.factorial(p) for o in offsets]
    b = np.zeros(k)
    b[order] = 1.0
    return np.linalg.solve(a, b)


_EDGE_STENCILS = {
    1: {0: (0, 1, 2, 3, 4), 1: (-1, 0, 1, 2, 3)},
    2: {0: (0, 1, 2, 3, 4, 5), 1: (-1, 0, 1, 2, 3, 4)},
}


def _fd(values: np.ndarray, h: float, order: int) -> np.ndarray:
    out = np.empty_like(values)
    v = values
    if order == 1:
        out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    elif order == 2:
        out[2:-2] = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)
    else:
        raise ValueError("order must be 1 or 2")
    n = len(v)
    for j, offsets in _EDGE_STENCILS[order].items():
        w = _one_sided_weights(offsets, order) / h**order
        idx = j + np.array(offsets)
        out[j] = np.dot(w, v[idx])
        # mirrored stencil at the right edge
        jr = n - 1 - j
        w_r = _one_sided_weights(tuple(-o for o in offsets), order) / h**order
        out[jr] = np.dot(w_r, v[jr + np.array([-o for o in offsets])])
    return out


def derivative(f, order: int = 1):
    """4th-order finite-difference derivative; same carrier type out as in."""
    if isinstance(f, GridFunction):
        return GridFunction(f.grid, _fd(f.values, f.grid.spacing, order))
    if isinstance(f, ScaledGridFunction):
        h = f.grid.spacing
        s1 = f.dlog if f.dlog is not None else _fd(f.log_scale, h, 1).real
        v1 = _fd(f.values, h, 1)
        if order == 1:
            return f.with_values(v1 + s1 * f.values)
        s2 = f.d2log if f.d2log is not None else _fd(f.log_scale, h, 2).real
        v2 = _fd(f.values, h, 2)
        return f.with_values(v2 + 2 * s1 * v1 + (s2 + s1 * s1) * f.values)
    raise TypeError(f"cannot differentiate {type(f).__name__}")


# ---------------------------------------------------------------------------
# inner products and norms

def inner(f, g) -> complex:
    """Simpson inner product, conjugate-linear in the first slot.

    Scaled carriers combine in log space: the pairing of a hugely growing
    function with a hugely decaying one is finite whenever the combined
    exponent is, and that is the condition checked.
    """
    _check_same_grid(f, g)
    w = f.grid.simpson_weights
    if isinstance(f, GridFunction) and isinstance(g, GridFunction):
        return complex(np.sum(w * np.conjugate(f.values) * g.values))
    fs, gs = as_scaled(f), as_scaled(g)
    s = fs.log_scale + gs.log_scale
    p = np.conjugate(fs.values) * gs.values
    mag = np.abs(p)
    with np.errstate(divide="ignore"):
        log_mag = s + np.log(mag)
    if np.max(log_mag, initial=-np.inf) > _LOG_HUGE:
        j = int(np.argmax(log_mag))
        raise RepresentationError(
            f"pairing integrand exceeds float range near x={float(f.grid.x[j])!r}"
        )
    out = np.zeros_like(p)
    nz = mag > 0
    out[nz] = (p[nz] / mag[nz]) * np.exp(log_mag[nz])
    return complex(np.sum(w * out))


def norm(f) -> float:
    """L2 norm; for scaled carriers it may overflow; prefer residual ratios."""
    if isinstance(f, GridFunction):
        return float(np.sqrt(np.sum(f.grid.simpson_weights * np.abs(f.values) ** 2)))
    return float(np.sqrt(abs(inner(f, f))))


def interior_slice(n_points: int, pad: int = EDGE_PAD) -> slice:
    return slice(pad, n_points - pad)


def interior_norm(f, pad: int = EDGE_PAD, exclude: list | None = None) -> float:
    """L2 norm over the interior, skipping edge points and marked poles."""
    if isinstance(f, ScaledGridFunction):
        raise TypeError("interior_norm takes a plain GridFunction; materialize first")
    mask = _interior_mask(f.grid, pad, exclude)
    w = f.grid.simpson_weights * mask
    return float(np.sqrt(np.sum(w * np.abs(f.values) ** 2)))


def _interior_mask(grid: Grid, pad: int, exclude: list | None) -> np.ndarray:
    mask = np.zeros(grid.n_points, dtype=bool)
    mask[interior_slice(grid.n_points, pad)] = True
    if exclude:
        width = 6 * grid.spacing
        for x0 in exclude:
            mask &= np.abs(grid.x - x0) > width
    return mask


def relative_residual(num, den, pad: int = EDGE_PAD, exclude: list | None = None) -> float:
    """||num|| / ||den|| over the interior, shift-invariant for scaled input.

    ``num`` and ``den`` must share a carrier type; scaled carriers must share
    their scale array (which is how operator residuals are produced).
    """
    _check_same_grid(num, den)
    grid = num.grid
    mask = _interior_mask(grid, pad, exclude)
    w = grid.simpson_weights * mask
    if isinstance(num, GridFunction) and isinstance(den, GridFunction):
        a = np.sqrt(np.sum(w * np.abs(num.values) ** 2))
        b = np.sqrt(np.sum(w * np.abs(den.values) ** 2))
    else:
        ns, ds = as_scaled(num), as_scaled(den)
        if not np.array_equal(ns.log_scale, ds.log_scale):
            raise ValueError("scaled residual requires a shared log_scale")
        shifted = ns.log_scale - np.max(ns.log_scale[mask], initial=0.0)
        e2 = np.exp(2 * np.clip(shifted, -_LOG_HUGE, 0.0))
        a = np.sqrt(np.sum(w * np.abs(ns.values) ** 2 * e2))
        b = np.sqrt(np.sum(w * np.abs(ds.values) ** 2 * e2))
    if b == 0.0:
        return 0.0 if a == 0.0 else np.inf
    return float(a / b)


def max_rel_difference(a: np.ndarray, b: np.ndarray, mask=None) -> float:
    """max|a - b| / max(scale of a, b) over an optional boolean mask."""
    a = np.asarray(a)
    b = np.asarray(b)
    if mask is not None:
        a, b = a[mask], b[mask]
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - b)) / scale)


# ---------------------------------------------------------------------------
# decay classification

@dataclass
class DecayFit:
    """Fitted outward log-slopes of |f| on the outer fraction of each side."""

    left_exponent: float
    right_exponent: float

    @property
    def square_integrable(self) -> bool:
        return (
            self.left_exponent < -DECAY_EPSILON and self.right_exponent < -DECAY_EPSILON
        )


def fitted_decay_exponents(f, fraction: float = DECAY_FIT_FRACTION) -> DecayFit:
    """Least-squares slope of log|f| vs outward distance on each tail."""
    fs = as_scaled(f)
    log_mag = fs.log_magnitude()
    n = fs.grid.n_points
    k = max(8, int(round(fraction * n)))
    x = fs.grid.x

    def slope(xs, ys):
        keep = np.isfinite(ys)
        if keep.sum() < 4:
            return -np.inf  # identically ~0 on the tail: decayed below floor
        c = np.polyfit(xs[keep], ys[keep], 1)
        return float(c[0])

    right = slope(x[-k:], log_mag[-k:])
    left = -slope(x[:k], log_mag[:k])
    return DecayFit(left_exponent=left, right_exponent=right)


# ---------------------------------------------------------------------------
# cumulative quadrature (for vacua built from superpotential antiderivatives)

def cumulative_antiderivative(values: np.ndarray, grid: Grid, dvalues=None) -> np.ndarray:
    """W with W' = values and W = 0 at the grid point nearest x = 0.

    Cumulative trapezoid plus the Euler-Maclaurin h^2/12 endpoint correction;
    with exact end-derivatives supplied the result is 4th-order accurate,
    which the downstream annihilation-residual checks rely on.
    """
    values = np.asarray(values, dtype=np.complex128)
    h = grid.spacing
    t = np.empty(grid.n_points, dtype=np.complex128)
    t[0] = 0.0
    np.cumsum((values[1:] + values[:-1]) * (h / 2.0), out=t[1:])
    dv = _fd(values, h, 1) if dvalues is None else np.asarray(dvalues)
    w = t - (h * h / 12.0) * (dv - dv[0])
    j0 = int(np.argmin(np.abs(grid.x)))
    return w - w[j0]


# ---------------------------------------------------------------------------
# adaptive quadrature on [0, inf) and oscillatory averages

@dataclass
class HalflineIntegral:
    value: float
    tail_estimate: float
    panels: int

    def __float__(self):
        return self.value


def _panel_simpson(f, a: float, b: float, rel_tol: float, max_refine: int = 14) -> float:
    """Composite Simpson on [a, b], refined by doubling until stable."""
    m = 8
    prev = None
    for _ in range(max_refine):
        xs = np.linspace(a, b, m + 1)
        ys = np.asarray(f(xs), dtype=float)
        h = (b - a) / m
        val = h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum())
        if prev is not None and abs(val - prev) <= rel_tol * max(1.0, abs(val)):
            return val
        prev = val
        m *= 2
    return prev


def integrate_halfline(f, tol: float = 1e-10, max_doublings: int = 40) -> HalflineIntegral:
    """Integrate a decaying real integrand over [0, inf) by panel doubling.

    Panels [0,1], [1,2], [2,4], ... are each integrated by refined Simpson;
    the sum stops when two consecutive panels contribute below tolerance.
    """
    total = 0.0
    edges = [0.0, 1.0]
    small_streak = 0
    last = np.inf
    panels = 0
    for k in range(max_doublings):
        a, b = edges
        part = _panel_simpson(f, a, b, rel_tol=tol * 1e-2)
        total += part
        panels += 1
        if abs(part) <= tol * max(1.0, abs(total)) / 2:
            small_streak += 1
            if small_streak >= 2:
                return HalflineIntegral(total, abs(part) + abs(last), panels)
        else:
            small_streak = 0
        last = part
        edges = [b, 2 * b]
    raise NonConvergenceError(
        f"half-line integral did not converge after {max_doublings} panel doublings"
    )


def gamma_average(f, big_gamma: float, rel_tol: float = 1e-10, max_refine: int = 18) -> complex:
    """(1/2G) * integral of f over [-G, G] by refined composite Simpson.

    For f = exp(i*w*gamma) the result is sin(w*G)/(w*G): bounded by
    2/(G*|w|), which is the decay the resolution estimator sweeps on.
    """
    if big_gamma <= 0:
        raise ValueError("big_gamma must be positive")
    m = 128
    prev = None
    for _ in range(max_refine):
        xs = np.linspace(-big_gamma, big_gamma, m + 1)
        ys = np.asarray(f(xs), dtype=np.complex128)
        h = 2 * big_gamma / m
        val = h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum())
        val /= 2 * big_gamma
        if prev is not None and abs(val - prev) <= rel_tol * max(1.0, abs(val)):
            return complex(val)
        prev = val
        m *= 2
    return complex(prev)


# ---------------------------------------------------------------------------
# series with tail control

@dataclass
class SeriesValue:
    value: complex
    terms: int
    tail_estimate: float


def sum_series(term, tail_bound, tol: float = 1e-12, n_max: int = 100000) -> SeriesValue:
    """Sum term(0) + term(1) + ... until tail_bound(n) < tol.

    ``tail_bound(n)`` estimates everything beyond index n.  Raises when the
    bound never drops below tolerance within n_max terms.
    """
    total = 0.0 + 0.0j
    best = np.inf
    for n in range(n_max):
        total += term(n)
        tb = float(tail_bound(n))
        best = min(best, tb)
        if tb < tol:
            return SeriesValue(complex(total), n + 1, tb)
    raise NonConvergenceError(
        f"series tail bound not below {tol} after {n_max} terms (best {best})"
    )


# ---------------------------------------------------------------------------
# CSV serialization

def _write_csv(buf, grid: Grid, columns: dict, metadata: dict):
    meta = {"L": grid.half_width, "N": grid.n_points}
    meta.update(metadata)
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    names = ["x"] + list(columns)
    buf.write(",".join(names) + "\n")
    arrays = [grid.x] + [np.asarray(c, dtype=float) for c in columns.values()]
    for row in zip(*arrays):
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")


def gridfunction_to_csv(f, path):
    """Write x, re, im rows with a JSON metadata header.

    A scaled carrier is written shifted by its peak exponent, recorded as
    ``log_offset`` in the metadata, so the file stays finite.
    """
    if isinstance(f, ScaledGridFunction):
        shifted, s0 = f.scale_shifted_values()
        columns = {"re": shifted.real, "im": shifted.imag}
        metadata = {"log_offset": s0}
        grid = f.grid
    else:
        columns = {"re": f.values.real, "im": f.values.imag}
        metadata = {}
        grid = f.grid
    if hasattr(path, "write"):
        _write_csv(path, grid, columns, metadata)
    else:
        with open(path, "w") as fh:
            _write_csv(fh, grid, columns, metadata)


def gridfunction_from_csv(path):
    """Inverse of :func:`gridfunction_to_csv`.

    Files carrying a ``log_offset`` come back as a constant-scale
    ``ScaledGridFunction``; plain files come back as a ``GridFunction``.
    """
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path) as fh:
            text = fh.read()
    lines = text.strip().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing JSON metadata header")
    meta = json.loads(lines[0][2:])
    grid = Grid(meta["L"], meta["N"])
    data = np.loadtxt(io.StringIO("\n".join(lines[2:])), delimiter=",")
    values = data[:, 1] + 1j * data[:, 2]
    if "log_offset" in meta:
        return ScaledGridFunction(grid, values, np.full(grid.n_points, float(meta["log_offset"])))
    return GridFunction(grid, values)
