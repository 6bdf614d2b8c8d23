"""Tests for averaging, maximal, and potential operators plus pair geometry."""

import math

import numpy as np
import pytest
from scipy.special import gamma

from varlp import (
    Cube,
    DYADIC,
    DomainError,
    EXACT,
    FractionalKernel,
    GridDomain,
    GridFunction,
    MeasurableSet,
    PreconditionError,
    TUPair,
    averaging_op,
    box_sums,
    covering_cube,
    cube_average,
    czo_pair_lower_bound,
    fractional_maximal,
    fractional_maximal_uncentered,
    kernel_sign_coherent,
    kernel_threshold,
    make_tu_pair,
    maximal_pair_lower_bound,
    riesz_gamma,
    riesz_kernel,
    riesz_potential,
    verify_tu_pair,
)


def line_grid(lo, hi, cells):
    return GridDomain(((float(lo), float(hi)),), (cells,))


def indicator_on(grid, a, b):
    return GridFunction.indicator(grid, MeasurableSet.from_box(((a, b),)))


# -- box sums ------------------------------------------------------------------


def test_box_sums_matches_direct_window(rng):
    grid = line_grid(0.0, 1.0, 64)
    vals = rng.uniform(0.0, 3.0, 64)
    f = GridFunction(grid, vals)
    h = grid.cell_volume
    for m in (1, 2, 5, 17):
        got = box_sums(f, m)
        for j in (0, 1, 30, 62, 63):
            lo, hi = j - m, j + m
            # full cells strictly inside, half weight for the two edge cells
            inner = vals[max(lo + 1, 0):min(hi, 64)].sum()
            edges = 0.0
            if 0 <= lo < 64:
                edges += 0.5 * vals[lo]
            if 0 <= hi < 64:
                edges += 0.5 * vals[hi]
            want = (inner + edges) * h
            assert got[j] == pytest.approx(want, rel=1e-12), f"m={m}, j={j}"


def test_box_sums_half_integer_radius(rng):
    grid = line_grid(0.0, 1.0, 32)
    vals = rng.uniform(0.0, 1.0, 32)
    f = GridFunction(grid, vals)
    got = box_sums(f, 1.5)
    h = grid.cell_volume
    for j in (2, 15, 29):
        want = vals[j - 1:j + 2].sum() * h
        assert got[j] == pytest.approx(want, rel=1e-12), f"window [{j - 1},{j + 1}] at j={j}"


def test_box_sums_two_dimensional(rng):
    grid = GridDomain(((0.0, 1.0), (0.0, 1.0)), (16, 16))
    vals = rng.uniform(0.0, 1.0, (16, 16))
    f = GridFunction(grid, vals)
    got = box_sums(f, 1.5)
    h2 = grid.cell_volume
    want = vals[4:7, 7:10].sum() * h2
    assert got[5, 8] == pytest.approx(want, rel=1e-12)


# -- averaging operator --------------------------------------------------------


def test_averaging_indicator_alpha_zero():
    grid = line_grid(0.0, 2.0, 128)
    Q = Cube((1.0,), 0.5)
    f = GridFunction.indicator(grid, MeasurableSet.from_cube(Q))
    out = averaging_op(f, Q, alpha=0.0)
    assert np.array_equal(out.values, f.values), "averaging an indicator over itself is itself"


def test_averaging_unit_cube_half_power():
    grid = line_grid(0.0, 2.0, 128)
    Q = Cube((0.5,), 0.5)
    f = GridFunction.indicator(grid, MeasurableSet.from_cube(Q))
    out = averaging_op(f, Q, alpha=0.5)
    inside = f.values > 0
    assert np.allclose(out.values[inside], 1.0), "|Q| = 1 so the weight is 1"


def test_averaging_wide_cube_value():
    grid = line_grid(0.0, 2.0, 128)
    f = indicator_on(grid, 0.0, 1.0)
    out = averaging_op(f, Cube((1.0,), 1.0), alpha=0.5)
    inside = out.values > 0
    assert np.allclose(out.values[inside], math.sqrt(2.0) * 0.5), "2^(1/2) * mean 1/2"
    assert inside.sum() == 128, "supported on all of the averaging cube"


def test_averaging_empty_intersection_raises():
    grid = line_grid(0.0, 2.0, 64)
    f = GridFunction(grid, np.ones(64))
    with pytest.raises(DomainError):
        averaging_op(f, Cube((5.0,), 0.5), alpha=0.0)


def test_cube_average_uses_unclipped_measure():
    grid = line_grid(0.0, 2.0, 128)
    f = GridFunction(grid, np.ones(128))
    # half of Q(1.5, 1) hangs outside the grid: integral 1.5... no, [0.5,2.5] clips to [0.5,2]
    assert cube_average(f, Cube((1.5,), 1.0)) == pytest.approx(1.5 / 2.0, rel=1e-9)


# -- fractional maximal --------------------------------------------------------


def test_maximal_indicator_interior_alpha_zero():
    grid = line_grid(-2.0, 2.0, 256)
    f = indicator_on(grid, -0.5, 0.5)
    out = fractional_maximal(f, 0.0)
    mids = grid.axis_midpoints(0)
    interior = np.abs(mids) < 0.4
    assert np.allclose(out.values[interior], 1.0), "small cubes around interior points average to 1"


def test_maximal_closed_form_off_support():
    # M of the centered unit-interval indicator at x > 1/2 is (2x+1)^(alpha-1)
    grid = line_grid(-8.0, 8.0, 1024)
    f = indicator_on(grid, -0.5, 0.5)
    alpha = 0.5
    out = fractional_maximal(f, alpha)
    mids = grid.axis_midpoints(0)
    idx = int(np.argmin(np.abs(mids - 1.5)))
    x = mids[idx]
    want = (2.0 * x + 1.0) ** (alpha - 1.0)
    assert out.values[idx] == pytest.approx(want, rel=1e-2), f"x={x}"
    assert out.values[idx] == pytest.approx(0.5, abs=0.02)
    for target in (2.5, 4.0, 6.5):
        idx = int(np.argmin(np.abs(mids - target)))
        x = mids[idx]
        want = (2.0 * x + 1.0) ** (alpha - 1.0)
        assert out.values[idx] == pytest.approx(want, rel=1e-2), f"x={x}"


def test_uncentered_maximal_power_lower_bound():
    # the uncentered sup at |x| > 1/2 dominates 2^(alpha-1) |x|^(alpha-1)
    grid = line_grid(-8.0, 8.0, 1024)
    f = indicator_on(grid, -0.5, 0.5)
    for alpha in (0.0, 0.3, 0.5):
        out = fractional_maximal_uncentered(f, alpha)
        mids = grid.axis_midpoints(0)
        away = np.abs(mids) >= 0.7
        bound = 2.0 ** (alpha - 1.0) * np.abs(mids[away]) ** (alpha - 1.0)
        assert np.all(out.values[away] >= bound), (
            f"alpha={alpha}: min slack {(out.values[away] - bound).min()}"
        )


def test_uncentered_dominates_centered(rng):
    grid = line_grid(0.0, 4.0, 128)
    for trial in range(10):
        f = GridFunction(grid, rng.uniform(0.0, 2.0, 128))
        cen = fractional_maximal(f, 0.4)
        unc = fractional_maximal_uncentered(f, 0.4)
        assert np.all(unc.values >= cen.values - 1e-12), f"trial {trial}"


def test_dyadic_exact_sandwich(rng):
    grid = line_grid(0.0, 4.0, 128)
    for trial in range(20):
        alpha = rng.uniform(0.0, 0.95)
        f = GridFunction(grid, rng.uniform(0.0, 3.0, 128))
        dy = fractional_maximal(f, alpha, radii=DYADIC).values
        ex = fractional_maximal(f, alpha, radii=EXACT).values
        assert np.all(dy <= ex * (1 + 1e-12)), f"trial {trial}: dyadic radii are a subset"
        assert np.all(ex <= 2.0 ** (1.0 - alpha) * dy * (1 + 1e-12)), (
            f"trial {trial}: doubling gap exceeded, alpha={alpha}"
        )


def test_maximal_monotone_and_homogeneous(rng):
    grid = line_grid(0.0, 4.0, 128)
    for trial in range(10):
        f_vals = rng.uniform(0.0, 2.0, 128)
        g_vals = f_vals + rng.uniform(0.0, 1.0, 128)
        alpha = rng.uniform(0.0, 0.9)
        mf = fractional_maximal(GridFunction(grid, f_vals), alpha).values
        mg = fractional_maximal(GridFunction(grid, g_vals), alpha).values
        assert np.all(mf <= mg + 1e-12), f"trial {trial}: monotone"
        c = float(rng.uniform(0.1, 50.0))
        mcf = fractional_maximal(GridFunction(grid, c * f_vals), alpha).values
        assert np.allclose(mcf, c * mf, rtol=1e-12), f"trial {trial}: homogeneous, c={c}"


def test_maximal_sublinear_on_indicators():
    grid = line_grid(0.0, 4.0, 256)
    fa = indicator_on(grid, 0.5, 1.25)
    fb = indicator_on(grid, 2.0, 3.5)
    both = GridFunction(grid, fa.values + fb.values)
    alpha = 0.5
    msum = fractional_maximal(both, alpha).values
    parts = fractional_maximal(fa, alpha).values + fractional_maximal(fb, alpha).values
    assert np.all(msum <= parts + 1e-12)


def test_maximal_rejects_bad_alpha():
    grid = line_grid(0.0, 1.0, 32)
    f = GridFunction(grid, np.ones(32))
    with pytest.raises(PreconditionError):
        fractional_maximal(f, 1.0)
    with pytest.raises(PreconditionError):
        fractional_maximal(f, -0.1)
    with pytest.raises(PreconditionError):
        fractional_maximal(f, 0.5, radii="OTHER")


# -- riesz potential -----------------------------------------------------------


def test_riesz_gamma_value():
    got = riesz_gamma(0.5, 1)
    assert got == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-12)
    # independent route through the gamma function
    for alpha, n in ((0.5, 1), (0.3, 1), (0.8, 2), (1.5, 2)):
        want = gamma((n - alpha) / 2.0) / (2.0 ** alpha * math.pi ** (n / 2.0) * gamma(alpha / 2.0))
        assert riesz_gamma(alpha, n) == pytest.approx(want, rel=1e-12), f"alpha={alpha}, n={n}"


def test_riesz_potential_interval_closed_form():
    # I_alpha of an interval indicator integrates the kernel exactly; the
    # singular kernel limits midpoint quadrature to O(h^alpha), so check a
    # measured error level and that refinement actually shrinks it
    a, b, alpha = 0.5, 1.5, 0.5

    def closed(x, g):
        if a < x < b:
            return g * ((x - a) ** alpha + (b - x) ** alpha) / alpha
        far, near = max(abs(x - a), abs(x - b)), min(abs(x - a), abs(x - b))
        return g * (far ** alpha - near ** alpha) / alpha

    def worst_error(cells):
        grid = line_grid(0.0, 2.0, cells)
        f = indicator_on(grid, a, b)
        out = riesz_potential(f, alpha)
        g = riesz_gamma(alpha, 1)
        mids = grid.axis_midpoints(0)
        rels = []
        for target in (0.75, 1.0, 1.3, 0.2, 1.9):
            idx = int(np.argmin(np.abs(mids - target)))
            x = float(mids[idx])
            want = closed(x, g)
            rels.append(abs(float(out.values[idx]) - want) / want)
        return max(rels)

    coarse, fine = worst_error(160), worst_error(640)
    assert coarse < 6e-3, f"coarse-grid relative error {coarse}"
    assert fine < 2.5e-3, f"fine-grid relative error {fine}"
    assert fine < 0.8 * coarse, f"no convergence: {coarse} -> {fine}"


def test_riesz_potential_zero_and_preconditions():
    grid = line_grid(0.0, 1.0, 32)
    zero = GridFunction(grid, np.zeros(32))
    assert np.all(riesz_potential(zero, 0.5).values == 0.0)
    f = GridFunction(grid, np.ones(32))
    with pytest.raises(PreconditionError):
        riesz_potential(f, 0.0)
    with pytest.raises(PreconditionError):
        riesz_potential(f, 1.0)


def test_maximal_below_potential(rng):
    # M_alpha f <= c I_alpha f with c = 2^(alpha-n) n^((n-alpha)/2) / gamma(alpha, n)
    grid = line_grid(0.0, 2.0, 128)
    alpha = 0.5
    c = 2.0 ** (alpha - 1.0) / riesz_gamma(alpha, 1)
    worst = 0.0
    for trial in range(5):
        f = GridFunction(grid, rng.uniform(0.0, 2.0, 128))
        m = fractional_maximal(f, alpha).values
        pot = riesz_potential(f, alpha).values
        ratio = float(np.max(m / pot))
        worst = max(worst, ratio)
        assert ratio <= c * 1.05, f"trial {trial}: sampled ratio {ratio} vs {c}"
    assert worst > 0.0


# -- pair geometry -------------------------------------------------------------


def test_make_tu_pair_line():
    pair = make_tu_pair(Cube((0.0,), 1.0), 4.0)
    assert pair.partner.center == pytest.approx((4.0,))
    assert pair.partner.radius == 1.0
    assert verify_tu_pair(pair)


def test_make_tu_pair_plane_scales_with_dimension():
    pair = make_tu_pair(Cube((0.0, 0.0), 1.0), 5.0)
    assert pair.partner.center[0] == pytest.approx(5.0 * math.sqrt(2.0))
    assert pair.partner.center[1] == pytest.approx(0.0)
    assert verify_tu_pair(pair)


def test_make_tu_pair_zero_shift_and_direction():
    pair = make_tu_pair(Cube((1.0,), 2.0), 0.0)
    assert pair.partner.center == pytest.approx((1.0,))
    with pytest.raises(PreconditionError):
        make_tu_pair(Cube((0.0, 0.0), 1.0), 4.0, direction=(1.0, 1.0))


def test_verify_tu_pair_detects_corruption():
    good = make_tu_pair(Cube((0.0,), 1.0), 4.0)
    bad = TUPair(base=good.base, partner=Cube((3.5,), 1.0), t=4.0, direction=good.direction)
    assert not verify_tu_pair(bad)


def test_covering_cube_contains_both():
    pair = make_tu_pair(Cube((0.0,), 1.0), 4.0)
    cover = covering_cube(pair)
    assert cover.radius == pytest.approx(3.0), "(t+2) r sqrt(n) / 2"
    assert cover.center == pytest.approx((2.0,))
    for point in (-1.0, 1.0, 3.0, 5.0):
        assert cover.contains_points(np.array([[point]]))[0]


# -- maximal pair lemma --------------------------------------------------------


def test_pair_bound_indicator_alpha_zero():
    grid = line_grid(-4.0, 8.0, 384)
    f = indicator_on(grid, -1.0, 1.0)
    pair = make_tu_pair(Cube((0.0,), 1.0), 4.0)
    rep = maximal_pair_lower_bound(f, pair, 0.0)
    assert rep.rhs == pytest.approx(1.0 / 3.0, rel=1e-9), "((t+2)/2)^(-1) with unit average"
    assert rep.holds, f"lhs_min {rep.lhs_min} vs rhs {rep.rhs}"


def test_pair_bound_zero_function():
    grid = line_grid(-4.0, 8.0, 192)
    f = GridFunction(grid, np.zeros(192))
    rep = maximal_pair_lower_bound(f, make_tu_pair(Cube((0.0,), 1.0), 4.0), 0.0)
    assert rep.lhs_min == 0.0 and rep.rhs == 0.0 and rep.holds


def test_pair_bound_random_support(rng):
    grid = line_grid(-4.0, 10.0, 448)
    mids = grid.axis_midpoints(0)
    inside = np.abs(mids) < 1.0
    pair = make_tu_pair(Cube((0.0,), 1.0), 6.0)
    for trial in range(10):
        vals = np.zeros(448)
        vals[inside] = rng.uniform(0.0, 2.0, int(inside.sum()))
        rep = maximal_pair_lower_bound(GridFunction(grid, vals), pair, 0.5)
        assert rep.holds, f"trial {trial}: lhs {rep.lhs_min} rhs {rep.rhs}"


def test_pair_bound_needs_separation():
    grid = line_grid(-4.0, 8.0, 192)
    f = GridFunction(grid, np.ones(192))
    with pytest.raises(PreconditionError):
        maximal_pair_lower_bound(f, make_tu_pair(Cube((0.0,), 1.0), 3.0), 0.0)


# -- czo pair lemma ------------------------------------------------------------


def test_kernel_threshold_power_kernel():
    kern = riesz_kernel(0.5, 1)
    t0 = kernel_threshold(kern)
    assert t0 == pytest.approx(2.0 * (1.0 + 2.0 ** 1.5), rel=1e-12), "just above 7.65"
    # a kernel with a huge lower constant falls back to the floor of 4
    fat = FractionalKernel(fn=kern.fn, alpha=0.5, c0=1.0, delta=1.0, lower=100.0, dimension=1)
    assert kernel_threshold(fat) == 4.0


def test_czo_pair_bound_holds_for_riesz():
    grid = line_grid(-4.0, 12.0, 512)
    f = indicator_on(grid, -1.0, 1.0)
    kern = riesz_kernel(0.5, 1)
    pair = make_tu_pair(Cube((0.0,), 1.0), 8.0)
    rep = czo_pair_lower_bound(kern, f, pair)
    assert rep.applicable
    want_rhs = 2.0 ** (1.0 - 0.5 - 1.0) * 8.0 ** (0.5 - 1.0) * 2.0 ** 0.5
    assert rep.rhs == pytest.approx(want_rhs, rel=1e-9)
    assert rep.holds, f"lhs {rep.lhs_min} vs rhs {rep.rhs}"


def test_czo_pair_below_threshold_not_applicable():
    grid = line_grid(-4.0, 12.0, 256)
    f = indicator_on(grid, -1.0, 1.0)
    rep = czo_pair_lower_bound(riesz_kernel(0.5, 1), f, make_tu_pair(Cube((0.0,), 1.0), 5.0))
    assert not rep.applicable, "t below the threshold makes no claim"


def test_czo_degenerate_kernel_not_applicable():
    grid = line_grid(-4.0, 12.0, 256)
    f = indicator_on(grid, -1.0, 1.0)
    kern = riesz_kernel(0.5, 1)
    flat = FractionalKernel(fn=kern.fn, alpha=0.5, c0=1.0, delta=1.0, lower=0.0, dimension=1)
    rep = czo_pair_lower_bound(flat, f, make_tu_pair(Cube((0.0,), 1.0), 8.0))
    assert not rep.applicable and not rep.holds
    assert rep.t0 == math.inf


def test_kernel_sign_coherent_on_valid_pair():
    kern = riesz_kernel(0.5, 1)
    pair = make_tu_pair(Cube((0.0,), 1.0), 8.0)
    assert kernel_sign_coherent(kern, pair)
