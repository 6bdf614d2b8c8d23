"""Modulars, Luxemburg norms, pairing constants and harmonic means.

Two evaluation routes coexist:

* a grid route for arbitrary grid functions (midpoint sampling, exact for
  piecewise-constant data aligned with the cells), and
* an analytic route for indicators of intervals and boxes, exact for
  constant pieces and using fixed Gauss quadrature across bump shoulders.
  Its cost does not depend on the number of bumps inside the interval, so
  intervals of length 1e27 containing 1e13 bumps are fine.

The Luxemburg norm is found by bisection on the scaling parameter; the
modular is strictly decreasing in it, so bracketing is straightforward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .exponent import (
    INF,
    BumpsPiece,
    ConstantPiece,
    _gauss_nodes,
    _tf_array,
    _tf_scalar,
    box_intersect,
    box_subtract_volume,
    box_volume,
    conjugate,
)
from .grid import GridFunction, MeasurableSet


# -- grid route -------------------------------------------------------------


def _grid_modular_parts(f, p, region=None):
    """Split |f| into the finite-exponent samples and the sup over {p = inf}."""
    domain = f.domain
    pv = p.values(domain.points())
    af = np.abs(f.values).ravel()
    if region is not None:
        mask = region.mask_on(domain).ravel()
    else:
        mask = np.ones(af.shape, dtype=bool)
    finite = mask & np.isfinite(pv) & (af > 0)
    infty = mask & np.isinf(pv)
    sup = float(af[infty].max()) if infty.any() else 0.0
    return af[finite], pv[finite], domain.cell_volume, sup


def modular(f, p, region=None):
    """Modular of a grid function: integral of |f|^p plus sup of |f| over {p = inf}."""
    af, pv, vol, sup = _grid_modular_parts(f, p, region)
    with np.errstate(over="ignore"):
        return float((af ** pv).sum() * vol) + sup


def _norm_bisect(rho, rel_tol=1e-8):
    """Smallest lam with rho(lam) <= 1, for rho strictly decreasing in lam."""
    hi = 1.0
    for _ in range(4200):
        if rho(hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise ArithmeticError("modular stays above 1, no norm bracket found")
    lo = 0.5 * hi
    for _ in range(4200):
        if rho(lo) > 1.0:
            break
        hi = lo
        lo *= 0.5
        if lo < 1e-300:
            return 0.0
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if rho(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def luxemburg_norm(f, p, region=None, rel_tol=1e-8):
    """Luxemburg norm of a grid function: inf of lam with modular(f/lam) <= 1."""
    af, pv, vol, sup = _grid_modular_parts(f, p, region)
    if af.size == 0 and sup == 0.0:
        return 0.0

    def rho(lam):
        with np.errstate(over="ignore"):
            val = float(((af / lam) ** pv).sum() * vol)
        if sup > 0.0:
            val += sup / lam
        return val

    return _norm_bisect(rho, rel_tol)


# -- pairing constants ------------------------------------------------------


def holder_constant(p):
    """Constant K with integral |fg| <= K * norm_p(f) * norm_conjugate(g).

    Built from the global exponent bounds and which of the three level
    regions ({p = 1}, {1 < p < inf}, {p = inf}) carry positive measure.
    Always at most 4.
    """
    s = p.strata()
    lo, hi = p.bounds()
    total = 0.0
    if s.has_finite:
        total += 1.0 / lo - (0.0 if hi == INF else 1.0 / hi) + 1.0
    if s.has_inf:
        total += 1.0
    if s.has_one:
        total += 1.0
    return total


def duality_constant(p):
    """Constant k <= 1 with k * norm(f) <= sup over unit-norm g of integral fg.

    The reciprocal counts how many of the three level regions are charged,
    so k is at least 1/3.
    """
    return 1.0 / p.strata().count


@dataclass(frozen=True)
class PairingReport:
    integral: float
    f_norm: float
    g_norm: float
    constant: float
    bound: float
    holds: bool


def holder_pairing_check(f, g, p, tol=1e-6):
    """Check integral |f g| <= K * norm_p(f) * norm_p'(g) on a shared grid."""
    if f.domain.box != g.domain.box or f.domain.cells != g.domain.cells:
        raise PreconditionError("pairing check needs both functions on the same grid")
    lhs = float((np.abs(f.values) * np.abs(g.values)).sum()) * f.domain.cell_volume
    const = holder_constant(p)
    fn = luxemburg_norm(f, p)
    gn = luxemburg_norm(g, conjugate(p))
    bound = const * fn * gn
    return PairingReport(lhs, fn, gn, const, bound, lhs <= bound * (1.0 + tol))


# -- analytic interval route (one dimension) --------------------------------


def _segment_subtract(seg, covered):
    """seg minus a sorted disjoint list of segments."""
    out = [seg]
    for clo, chi in covered:
        nxt = []
        for lo, hi in out:
            if chi <= lo or clo >= hi:
                nxt.append((lo, hi))
                continue
            if clo > lo:
                nxt.append((lo, clo))
            if chi < hi:
                nxt.append((chi, hi))
        out = nxt
    return [(lo, hi) for lo, hi in out if hi > lo]


def _segment_union(covered, extra):
    segs = sorted(covered + extra)
    out = []
    for lo, hi in segs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _effective_segments(p, a, b):
    """First-match piece segments covering [a, b] within the domain."""
    if p.dimension != 1:
        raise PreconditionError("interval integrals are one-dimensional")
    dom_lo, dom_hi = p.domain[0]
    a2, b2 = max(a, dom_lo), min(b, dom_hi)
    if b2 <= a2:
        return []
    covered = []
    out = []
    for piece in p.pieces:
        plo, phi = piece.box[0]
        lo, hi = max(a2, plo), min(b2, phi)
        if hi <= lo:
            continue
        for slo, shi in _segment_subtract((lo, hi), covered):
            out.append((piece, slo, shi))
        covered = _segment_union(covered, [(lo, hi)])
    total = sum(hi - lo for _, lo, hi in out)
    if total < (b2 - a2) * (1.0 - 1e-9):
        raise DomainError(f"interval ({a2}, {b2}) is not covered by the exponent pieces")
    return out


def _g_scalar(g, w):
    return float(g(np.array([w], dtype=float))[0])


def _bumps_segment_integral(piece, lo, hi, g, transforms):
    """Integral of g(p) over one bump-piece segment; g must be nonnegative.

    Assembled as base-region length times g(base) plus one closed-form bump
    integral per fully contained bump plus explicit quadrature over at most
    a few straddling windows, so the cost is independent of the bump count.
    """
    bump = piece.bump
    s, m = bump.support_halfwidth, bump.plateau_halfwidth
    g_base = _g_scalar(g, _tf_scalar(transforms, piece.base))
    g_top = _g_scalar(g, _tf_scalar(transforms, piece.top))

    def g_of_profile(prof):
        return g(_tf_array(transforms, piece.base + piece.direction * prof))

    shoulder = bump.shoulder_integral(g_of_profile)
    full_int = 2.0 * m * g_top + 2.0 * shoulder
    (kf, kl), straddlers = piece.full_and_straddling(lo, hi)
    n_full = max(0, kl - kf + 1)

    total = 0.0
    base_len = hi - lo
    if n_full:
        base_len -= n_full * 2.0 * s
        total += n_full * full_int
    nodes, wts = _gauss_nodes()
    for _, c in straddlers:
        if np.spacing(abs(c)) > 0.01 * s:
            # center coordinates are quantized more coarsely than the bump
            # itself; resolve by center membership (O(1) absolute error)
            if lo <= c <= hi:
                base_len -= 2.0 * s
                total += full_int
            continue
        o0, o1 = max(lo - c, -s), min(hi - c, s)
        if o1 <= o0:
            continue
        base_len -= o1 - o0
        knots = [o0] + [o for o in (-s, -m, m, s) if o0 < o < o1] + [o1]
        for u0, u1 in zip(knots, knots[1:]):
            half, midp = 0.5 * (u1 - u0), 0.5 * (u0 + u1)
            d = np.abs(midp + half * nodes)
            total += half * float(np.dot(wts, g_of_profile(bump.profile(d))))
    base_len = max(base_len, 0.0)
    if base_len > 0.0:
        total += base_len * g_base
    return total


def interval_integral(p, a, b, g):
    """Integral over [a, b] of g(p(x)) for a one-dimensional exponent.

    g is a vectorized nonnegative function of the transformed exponent
    values and must map the value inf to something finite (or the result
    is inf, which bisection treats as an infeasible scaling).
    """
    total = 0.0
    for piece, lo, hi in _effective_segments(p, a, b):
        if isinstance(piece, ConstantPiece):
            total += (hi - lo) * _g_scalar(g, _tf_scalar(p.transforms, piece.value))
        else:
            total += _bumps_segment_integral(piece, lo, hi, g, p.transforms)
    return total


def interval_has_infinite_exponent(p, a, b):
    """Whether the transformed exponent equals inf on positive measure in [a, b]."""
    for piece, lo, hi in _effective_segments(p, a, b):
        if isinstance(piece, ConstantPiece):
            if _tf_scalar(p.transforms, piece.value) == INF:
                return True
            continue
        w_base = _tf_scalar(p.transforms, piece.base)
        w_top = _tf_scalar(p.transforms, piece.top)
        if w_base == INF:
            cover = piece.support_cover_length(lo, hi)
            if (hi - lo) - cover > 1e-12 * max(1.0, hi - lo):
                return True
        if w_top == INF and piece.bump.height > 0:
            mw = piece.bump.plateau_halfwidth
            kf, kl = piece.centers.index_range_in(lo - mw, hi + mw)
            if kl >= kf:
                return True
    return False


def interval_indicator_modular(p, a, b, lam):
    """Modular of (indicator of [a, b]) / lam via the analytic route."""
    log_lam = math.log(lam)

    def g(w):
        out = np.zeros_like(w)
        finite = np.isfinite(w)
        with np.errstate(over="ignore"):
            out[finite] = np.exp(-w[finite] * log_lam)
        return out

    val = interval_integral(p, a, b, g)
    if interval_has_infinite_exponent(p, a, b):
        val += 1.0 / lam
    return val


def interval_indicator_norm(p, a, b, rel_tol=1e-8):
    """Luxemburg norm of the indicator of [a, b] via the analytic route."""
    if b <= a:
        return 0.0
    has_inf = interval_has_infinite_exponent(p, a, b)

    def rho(lam):
        log_lam = math.log(lam)

        def g(w):
            out = np.zeros_like(w)
            finite = np.isfinite(w)
            with np.errstate(over="ignore"):
                out[finite] = np.exp(-w[finite] * log_lam)
            return out

        val = interval_integral(p, a, b, g)
        if has_inf:
            val += 1.0 / lam
        return val

    return _norm_bisect(rho, rel_tol)


# -- indicator norms and means for general sets ------------------------------


def _constant_piece_cells(p, box):
    """(effective volume, transformed value) per piece over a box; exact."""
    cells = []
    for i, piece in enumerate(p.pieces):
        if not isinstance(piece, ConstantPiece):
            raise PreconditionError("exact box route needs constant pieces")
        region = box_intersect(piece.box, box)
        if region is None:
            continue
        region = box_intersect(region, p.domain)
        if region is None:
            continue
        vol = box_subtract_volume(region, [q.box for q in p.pieces[:i]])
        if vol > 0.0:
            cells.append((vol, _tf_scalar(p.transforms, piece.value)))
    return cells


def set_measure(E, grid=None):
    """Lebesgue measure of a measurable set, exact for boxes."""
    if E.is_box():
        return E.measure_exact()
    domain = E.grid_mask[0] if E.grid_mask is not None else grid
    if domain is None:
        raise PreconditionError("set measure needs a grid for non-box sets")
    return E.measure_on(domain)


def set_norm(p, E, grid=None, rel_tol=1e-8):
    """Luxemburg norm of the indicator of a measurable set.

    Boxes go through the analytic route (interval engine in one dimension,
    exact piece volumes for constant pieces in higher dimension); anything
    else is rasterized on the given grid.
    """
    if E.is_box():
        if p.dimension == 1:
            a, b = E.box[0]
            return interval_indicator_norm(p, a, b, rel_tol)
        clipped = box_intersect(E.box, p.domain)
        if clipped is None:
            raise DomainError("set lies outside the exponent's domain")
        cells = _constant_piece_cells(p, E.box)
        vols = np.array([v for v, _ in cells])
        ws = np.array([w for _, w in cells])
        finite = np.isfinite(ws)
        has_inf = bool((~finite).any())
        if vols.sum() < box_volume(clipped) * (1.0 - 1e-9):
            raise DomainError("box is not covered by the exponent pieces")

        def rho(lam):
            with np.errstate(over="ignore"):
                val = float((vols[finite] * lam ** (-ws[finite])).sum())
            return val + (1.0 / lam if has_inf else 0.0)

        return _norm_bisect(rho, rel_tol)
    domain = E.grid_mask[0] if E.grid_mask is not None else grid
    if domain is None:
        raise PreconditionError("set norm needs a grid for non-box sets")
    return luxemburg_norm(GridFunction.indicator(domain, E), p, rel_tol=rel_tol)


def mean_inverse_exponent(p, E, grid=None):
    """Average of 1/p over the set (clipped to the exponent's domain),
    with 1/inf = 0."""
    if E.is_box():
        clipped = box_intersect(E.box, p.domain)
        if clipped is None:
            raise DomainError("set lies outside the exponent's domain")
        if p.dimension == 1:
            a, b = clipped[0]

            def g(w):
                with np.errstate(divide="ignore"):
                    return np.where(np.isinf(w), 0.0, 1.0 / w)

            return interval_integral(p, a, b, g) / (b - a)
        cells = _constant_piece_cells(p, E.box)
        total = sum(v for v, _ in cells)
        if total < box_volume(clipped) * (1.0 - 1e-9):
            raise DomainError("box is not covered by the exponent pieces")
        return sum(v * (0.0 if w == INF else 1.0 / w) for v, w in cells) / total
    domain = E.grid_mask[0] if E.grid_mask is not None else grid
    if domain is None:
        raise PreconditionError("harmonic mean needs a grid for non-box sets")
    mask = E.mask_on(domain)
    if not mask.any():
        raise PreconditionError("set has no cells on this grid")
    pv = p.values(domain.points()).reshape(domain.cells)
    inv = np.where(np.isinf(pv), 0.0, 1.0 / pv)
    return float(inv[mask].mean())


def harmonic_mean(p, E, grid=None):
    """Harmonic mean exponent of the set: reciprocal of the average of 1/p."""
    inv = mean_inverse_exponent(p, E, grid)
    return INF if inv == 0.0 else 1.0 / inv
