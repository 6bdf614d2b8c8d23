"""Averaging, fractional maximal and potential operators on grid functions.

Box integrals are evaluated through cumulative arrays with interpolation at
half-cell positions, which is exact for cell-constant functions: cubes
centered at cell midpoints with radius equal to a whole number of cells have
their faces on half-cell positions, where the cumulative is linear.
Everything uses the zero-extension convention: a function is 0 outside its
grid, and cube normalizers are never clipped at the domain boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma_fn

from .errors import DomainError, PreconditionError
from .exponent import _gauss_nodes
from .grid import Cube, GridFunction, MeasurableSet

EXACT = "EXACT"
DYADIC = "DYADIC"

_MAX_KERNEL_CELLS = 20000


def _axis_box_sum(arr, axis, m):
    """Sum over the index window [j + 0.5 - m, j + 0.5 + m] along one axis.

    The cumulative is linearly interpolated, so half-integer endpoints are
    exact for cell-constant data; out-of-range windows saturate, matching
    extension of the data by zero.
    """
    c = arr.shape[axis]
    pad_shape = list(arr.shape)
    pad_shape[axis] = 1
    cum = np.concatenate([np.zeros(pad_shape), np.cumsum(arr, axis=axis)], axis=axis)

    def interp(z):
        z = np.clip(z, 0.0, float(c))
        k = np.minimum(np.floor(z).astype(int), c - 1)
        frac = z - k
        lo = np.take(cum, k, axis=axis)
        hi = np.take(cum, k + 1, axis=axis)
        shape = [1] * arr.ndim
        shape[axis] = len(z)
        return lo + frac.reshape(shape) * (hi - lo)

    j = np.arange(c)
    return interp(j + 0.5 + m) - interp(j + 0.5 - m)


def box_sums(f, m):
    """Integral of f over the cube of index-radius m centered at every cell."""
    arr = f.values
    for axis in range(arr.ndim):
        arr = _axis_box_sum(arr, axis, float(m))
    return arr * f.domain.cell_volume


def averaging_op(f, E, alpha=0.0):
    """Averaging operator: measure(E)^(alpha/n) times the mean of f over E, on E.

    The mean uses the full (unclipped) measure of E in the normalizer while
    the integral runs over the part of E inside the grid, so the result
    agrees with applying the whole-space operator to the zero-extended f.
    """
    if isinstance(E, Cube):
        E = MeasurableSet.from_cube(E)
    n = f.domain.dimension
    mask = E.mask_on(f.domain)
    if not mask.any():
        raise DomainError("averaging set does not meet the grid")
    measure = E.measure_exact() if E.is_box() else E.measure_on(f.domain)
    if measure <= 0.0:
        raise PreconditionError("averaging set must have positive measure")
    integral = float(f.values[mask].sum()) * f.domain.cell_volume
    out = np.zeros_like(f.values)
    out[mask] = measure ** (alpha / n - 1.0) * integral
    return GridFunction(f.domain, out)


def _radius_list(policy, m_max):
    if policy == EXACT:
        return list(range(1, m_max + 1))
    if policy == DYADIC:
        radii = []
        m = 1
        while m < m_max:
            radii.append(m)
            m *= 2
        radii.append(m)
        return radii
    raise PreconditionError(f"unknown radius policy {policy!r}")


def fractional_maximal(f, alpha, radii=EXACT):
    """Centered fractional maximal function on the grid.

    Takes the sup of measure(Q)^(alpha/n - 1) * integral of |f| over Q over
    axis-parallel cubes Q centered at each cell midpoint whose radius is a
    whole number of cells (all of them for EXACT, powers of two for DYADIC).
    Radii stop once the cube swallows the whole grid from any position.
    """
    n = f.domain.dimension
    if not (0.0 <= alpha < n):
        raise PreconditionError(f"need 0 <= alpha < n = {n}, got alpha = {alpha}")
    h = f.domain.h
    absf = GridFunction(f.domain, np.abs(f.values))
    m_max = max(f.domain.cells)
    best = np.full(f.domain.cells, -np.inf)
    for m in _radius_list(radii, m_max):
        vals = (2.0 * m * h) ** (alpha - n) * box_sums(absf, m)
        np.maximum(best, vals, out=best)
    return GridFunction(f.domain, np.maximum(best, 0.0))


def fractional_maximal_uncentered(f, alpha):
    """Uncentered fractional maximal function, one dimension only.

    The sup runs over all intervals with endpoints on the grid lattice that
    contain the evaluation cell; this under-estimates the continuum sup, so
    lower bounds verified against it are genuine.
    """
    if f.domain.dimension != 1:
        raise PreconditionError("uncentered maximal is implemented in one dimension")
    if not (0.0 <= alpha < 1.0):
        raise PreconditionError(f"need 0 <= alpha < 1, got {alpha}")
    h = f.domain.h
    vals = np.abs(f.values)
    n_cells = vals.shape[0]
    cum = np.concatenate([[0.0], np.cumsum(vals)]) * h
    best = np.zeros(n_cells)
    b = np.arange(n_cells)
    for a in range(n_cells):
        lengths = (b[a:] - a + 1.0) * h
        va = (cum[b[a:] + 1] - cum[a]) * lengths ** (alpha - 1.0)
        suf = np.maximum.accumulate(va[::-1])[::-1]
        np.maximum(best[a:], suf, out=best[a:])
    return GridFunction(f.domain, best)


def riesz_gamma(alpha, n):
    """Normalizing constant of the fractional integral kernel."""
    if not (0.0 < alpha < n):
        raise PreconditionError(f"need 0 < alpha < n = {n}, got alpha = {alpha}")
    return _gamma_fn((n - alpha) / 2.0) / (
        math.pi ** (n / 2.0) * 2.0 ** alpha * _gamma_fn(alpha / 2.0)
    )


def _self_cell_integral(alpha, n, h):
    """Integral of |u|^(alpha - n) over one grid cell centered at the origin."""
    if n == 1:
        return 2.0 * (h / 2.0) ** alpha / alpha
    # n == 2: polar integration over the square, using its dihedral symmetry
    nodes, wts = _gauss_nodes()
    theta = (math.pi / 8.0) * (nodes + 1.0)
    r_edge = h / (2.0 * np.cos(theta))
    return (math.pi / 8.0) * float(np.dot(wts, 8.0 * r_edge ** alpha / alpha))


def riesz_potential(f, alpha):
    """Fractional integral of f: convolution with the normalized power kernel.

    Midpoint quadrature off the diagonal plus the exact self-cell integral.
    Pairwise distance matrices keep this to modest grids in dimension 1 or 2.
    """
    n = f.domain.dimension
    if n > 2:
        raise PreconditionError("potential is implemented for dimensions 1 and 2")
    if f.domain.total_cells > _MAX_KERNEL_CELLS:
        raise PreconditionError(
            f"grid has {f.domain.total_cells} cells, pairwise kernel capped at {_MAX_KERNEL_CELLS}"
        )
    gamma = riesz_gamma(alpha, n)
    pts = f.domain.points()
    vals = f.values.ravel()
    h = f.domain.h
    self_int = _self_cell_integral(alpha, n, h)
    out = np.empty(len(pts))
    chunk = max(1, int(2e7) // max(len(pts), 1))
    for start in range(0, len(pts), chunk):
        stop = min(start + chunk, len(pts))
        d = np.linalg.norm(pts[start:stop, None, :] - pts[None, :, :], axis=-1)
        with np.errstate(divide="ignore"):
            kern = d ** (alpha - n) * f.domain.cell_volume
        for i in range(start, stop):
            kern[i - start, i] = self_int
        out[start:stop] = kern @ vals
    return GridFunction(f.domain, (gamma * out).reshape(f.domain.cells))


# -- positioned cube pairs ---------------------------------------------------


@dataclass(frozen=True)
class TUPair:
    """A cube and its translate by t * r * sqrt(n) in a unit direction."""

    base: Cube
    partner: Cube
    t: float
    direction: tuple


def make_tu_pair(cube, t, direction=None):
    n = cube.dimension
    if direction is None:
        direction = tuple(1.0 if i == 0 else 0.0 for i in range(n))
    u = np.asarray(direction, dtype=float)
    if u.shape != (n,) or abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise PreconditionError("direction must be a unit vector of matching dimension")
    shift = t * cube.radius * math.sqrt(n) * u
    partner = Cube(tuple(np.asarray(cube.center) + shift), cube.radius)
    return TUPair(cube, partner, float(t), tuple(u))


def verify_tu_pair(pair, tol=1e-10):
    """Recover (t, u) from the stored cubes and compare with the stored values."""
    q, pt = pair.base, pair.partner
    if abs(q.radius - pt.radius) > tol * q.radius:
        return False
    n = q.dimension
    d = np.asarray(pt.center) - np.asarray(q.center)
    dist = float(np.linalg.norm(d))
    t = dist / (q.radius * math.sqrt(n))
    if abs(t - abs(pair.t)) > tol * max(1.0, abs(pair.t)):
        return False
    if dist > 0:
        u = d / dist
        sign = 1.0 if pair.t >= 0 else -1.0
        if np.max(np.abs(u - sign * np.asarray(pair.direction))) > tol:
            return False
    return True


def covering_cube(pair):
    """Smallest construction cube containing the pair: centered between the
    two cubes with radius (t + 2) r sqrt(n) / 2."""
    q, pt = pair.base, pair.partner
    center = tuple(0.5 * (np.asarray(q.center) + np.asarray(pt.center)))
    radius = (abs(pair.t) + 2.0) * q.radius * math.sqrt(q.dimension) / 2.0
    return Cube(center, radius)


def cube_average(f, cube):
    """Mean of f over a cube, zero-extension convention (unclipped measure)."""
    mask = MeasurableSet.from_cube(cube).mask_on(f.domain)
    integral = float(f.values[mask].sum()) * f.domain.cell_volume
    return integral / cube.volume


@dataclass(frozen=True)
class PairBoundReport:
    lhs_min: float
    rhs: float
    factor: float
    holds: bool


def maximal_pair_lower_bound(f, pair, alpha):
    """Check the transfer bound: on the partner cube, the uncentered maximal
    function dominates ((t+2) sqrt(n) / 2)^(alpha-n) |Q|^(alpha/n) avg_Q f."""
    n = f.domain.dimension
    if n != 1:
        raise PreconditionError("pair lower bound is implemented in one dimension")
    if pair.t < 4.0:
        raise PreconditionError(f"pair bound needs t >= 4, got t = {pair.t}")
    q = pair.base
    factor = ((pair.t + 2.0) * math.sqrt(n) / 2.0) ** (alpha - n)
    rhs = factor * q.volume ** (alpha / n) * cube_average(f, q)
    mf = fractional_maximal_uncentered(f, alpha)
    pmask = MeasurableSet.from_cube(pair.partner).mask_on(f.domain)
    if not pmask.any():
        raise PreconditionError("partner cube contains no grid cells")
    lhs_min = float(mf.values[pmask].min())
    return PairBoundReport(lhs_min, rhs, factor, lhs_min >= rhs * (1.0 - 1e-9))


@dataclass(frozen=True)
class FractionalKernel:
    """Kernel of fractional order: |K(x,y)| <= c0 / |x-y|^(n-alpha), with a
    Holder-type smoothness constant c0 at exponent delta, and a one-direction
    nondegeneracy floor a (K at least a / |x-y|^(n-alpha) along `direction`)."""

    fn: callable
    alpha: float
    c0: float
    delta: float
    lower: float
    dimension: int

    def __call__(self, x_pts, y):
        return self.fn(np.asarray(x_pts, dtype=float), np.asarray(y, dtype=float))


def riesz_kernel(alpha, n):
    """The positive power kernel |x - y|^(alpha - n) as a FractionalKernel."""

    def fn(x_pts, y):
        d = np.linalg.norm(x_pts.reshape(-1, n) - y.reshape(1, n), axis=1)
        with np.errstate(divide="ignore"):
            return d ** (alpha - n)

    return FractionalKernel(fn=fn, alpha=alpha, c0=1.0, delta=1.0, lower=1.0, dimension=n)


def kernel_threshold(kernel, n=None):
    """Separation threshold t0 past which the pair lower bound applies."""
    n = kernel.dimension if n is None else n
    a, c0, delta, alpha = kernel.lower, kernel.c0, kernel.delta, kernel.alpha
    if a <= 0:
        raise PreconditionError("kernel has no nondegeneracy floor (lower <= 0)")
    return max(4.0, (2.0 * c0 * (1.0 + 2.0 ** (n - alpha + delta)) / a) ** (1.0 / delta))


@dataclass(frozen=True)
class CZOPairReport:
    t0: float
    applicable: bool
    lhs_min: float
    rhs: float
    holds: bool


def czo_pair_lower_bound(kernel, f, pair):
    """Check the singular-integral transfer bound on a separated pair.

    For |t| at least the kernel threshold t0, the integral of K(x, y) f(x)
    over the base cube has, at every y in the partner cube, absolute value at
    least 2^(n-alpha-1) a (|t| sqrt(n))^(alpha-n) |Q|^(alpha/n) avg_Q f.
    """
    n = f.domain.dimension
    if kernel.dimension != n:
        raise PreconditionError("kernel dimension does not match the grid")
    if kernel.lower <= 0:
        # degenerate kernel: no nondegeneracy floor, the bound makes no claim
        return CZOPairReport(math.inf, False, 0.0, 0.0, False)
    t0 = kernel_threshold(kernel)
    applicable = abs(pair.t) >= t0
    q = pair.base
    alpha = kernel.alpha
    rhs = (
        2.0 ** (n - alpha - 1.0)
        * kernel.lower
        * (abs(pair.t) * math.sqrt(n)) ** (alpha - n)
        * q.volume ** (alpha / n)
        * cube_average(f, q)
    )
    qmask = MeasurableSet.from_cube(q).mask_on(f.domain)
    pmask = MeasurableSet.from_cube(pair.partner).mask_on(f.domain)
    if not pmask.any() or not qmask.any():
        raise PreconditionError("pair cubes contain no grid cells")
    pts = f.domain.points()
    fvals = f.values.ravel()
    qsel = qmask.ravel()
    xq, fq = pts[qsel], fvals[qsel]
    lhs_min = math.inf
    for y in pts[pmask.ravel()]:
        val = float(np.dot(kernel(xq, y), fq)) * f.domain.cell_volume
        lhs_min = min(lhs_min, abs(val))
    holds = applicable and lhs_min >= rhs * (1.0 - 1e-6)
    return CZOPairReport(t0, applicable, lhs_min, rhs, holds)


def kernel_sign_coherent(kernel, pair, samples=200, seed=0):
    """Whether K(x, y) keeps one sign for x in the base cube, y in the partner."""
    rng = np.random.default_rng(seed)
    n = pair.base.dimension
    qb = np.asarray(pair.base.as_box())
    pb = np.asarray(pair.partner.as_box())
    x = rng.uniform(qb[:, 0], qb[:, 1], size=(samples, n))
    y = rng.uniform(pb[:, 0], pb[:, 1], size=(samples, n))
    signs = set()
    for yi in y[: min(samples, 40)]:
        v = kernel(x, yi)
        signs.update(np.sign(v[v != 0.0]).tolist())
    return len(signs) <= 1
