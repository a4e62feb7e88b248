"""Frozen oracles for the support and Hessian measures.

Totals for the square, cube, segment and point are derived independently
by fitting the parallel volume polynomial vol(K_t) = sum over a ball,
edge tubes and facet slabs, worked out by hand before the module was
written:

    square   [0,1]^2 : order 0 -> pi,     order 1 -> 2
    cube     [0,1]^3 : order 0 -> 4pi/3,  order 1 -> pi,  order 2 -> 2
    segment  in R^2  : order 0 -> pi,     order 1 -> 1
    point    in R^2  : order 0 -> pi,     order 1 -> 0

and the localized bottom-edge mass of the square at direction (0,-1)
is 1/2.  Hessian totals for the three interval examples (R = 1):

    indicator of [-1,1]        : order 1 -> 2, order 0 -> 2, flowout -> 4
    |x| + indicator of [-1,1]  : order 1 -> 2, order 0 -> 2, flowout -> 4
    indicator of {0}           : order 1 -> 0, order 0 -> 2, flowout -> 2
"""

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epival.bodies import Polytope
from epival.functions import PLConvexFunction
from epival.measures import (
    FaceMeasure,
    SphereMeasure,
    density_constant,
    hessian_integrate,
    hessian_integrate_via_support,
    hessian_measure,
    hessian_steiner,
    hessian_total,
    integrate_over_face,
    integrate_support_measure,
    local_parallel_volume_mc,
    nearest_points,
    p_t_volume_mc,
    parallel_volume,
    support_measure,
    surface_area_measure,
)


def square():
    return Polytope.construct([(0, 0), (1, 0), (0, 1), (1, 1)], 2)


def cube():
    return Polytope.construct(
        [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)], 3)


def segment2():
    return Polytope.construct([(0, 0), (1, 0)], 2)


def point2():
    return Polytope.construct([(F(1, 3), F(1, 2))], 2)


def indicator_interval():
    return PLConvexFunction.constant(Polytope.construct([(-1,), (1,)], 1), 0)


def vee_interval():
    dom = Polytope.construct([(-1,), (1,)], 1)
    return PLConvexFunction.from_pieces(dom, [((-1,), 0), ((1,), 0)])


def indicator_origin():
    return PLConvexFunction.constant(Polytope.construct([(0,)], 1), 0)


def random_polytope(rng, d, npts=12):
    while True:
        pts = [tuple(F(int(round(x * 8)), 8) for x in rng.normal(size=d))
               for _ in range(npts)]
        P = Polytope.construct(pts, d)
        if P.intrinsic_dim == d:
            return P


def scale(P, t):
    return Polytope.construct(
        [tuple(F(t) * x for x in v) for v in P.vertices], P.ambient_dim)


class TestDensityConstants:
    def test_table(self):
        assert density_constant(2, 0) == F(1, 2)
        assert density_constant(2, 1) == F(1, 2)
        assert density_constant(3, 0) == F(1, 3)
        assert density_constant(3, 1) == F(1, 6)
        assert density_constant(3, 2) == F(1, 3)


class TestSupportTotals:
    def test_square(self):
        assert support_measure(square(), 0).total == pytest.approx(math.pi, abs=1e-12)
        assert support_measure(square(), 1).total == pytest.approx(2.0, abs=1e-12)

    def test_cube(self):
        assert support_measure(cube(), 0).total == pytest.approx(4 * math.pi / 3, abs=1e-9)
        assert support_measure(cube(), 1).total == pytest.approx(math.pi, abs=1e-12)
        assert support_measure(cube(), 2).total == pytest.approx(2.0, abs=1e-12)

    def test_segment(self):
        assert support_measure(segment2(), 0).total == pytest.approx(math.pi, abs=1e-12)
        assert support_measure(segment2(), 1).total == pytest.approx(1.0, abs=1e-12)

    def test_point(self):
        assert support_measure(point2(), 0).total == pytest.approx(math.pi, abs=1e-12)
        assert support_measure(point2(), 1).total == 0.0

    def test_parallel_volume_square(self):
        for t in (0.25, 0.5, 1.0, 2.0):
            want = 1 + 4 * t + math.pi * t * t - 1
            assert parallel_volume(square(), t) == pytest.approx(want, rel=1e-12)

    def test_parallel_volume_cube(self):
        t = 0.75
        want = 6 * t + 3 * math.pi * t ** 2 + 4 * math.pi / 3 * t ** 3
        assert parallel_volume(cube(), t) == pytest.approx(want, rel=1e-9)

    def test_normal_region_inside_normal_cone(self):
        for P, i in [(square(), 0), (cube(), 1), (segment2(), 0)]:
            fm = support_measure(P, i)
            for piece in fm.pieces:
                for r in piece.normal_region.rays:
                    u = np.array([float(x) for x in r])
                    u /= np.linalg.norm(u)
                    assert piece.normal_region.contains_direction(u)


class TestLocalization:
    def test_square_bottom_edge(self):
        def f(x, nu):
            return 1.0 if nu[1] < -0.9 else 0.0

        got = integrate_support_measure(square(), 1, f)
        assert got == pytest.approx(0.5, abs=1e-9)

    def test_facet_formula_matches_atoms(self):
        for P in (square(), cube()):
            d = P.ambient_dim
            sam = surface_area_measure(P)

            def g(x, nu):
                return float(nu[0] ** 2 + 0.3 * nu[-1])

            got = integrate_support_measure(P, d - 1, g)
            want = sam.pair(lambda n: n[0] ** 2 + 0.3 * n[-1]) / d
            assert got == pytest.approx(want, abs=1e-9)

    def test_vertex_order_is_angular_measure(self):
        tri = Polytope.construct([(0, 0), (1, 0), (0, 1)], 2)
        # interior angles: pi/2, pi/4, pi/4 -> exterior 2pi total
        assert support_measure(tri, 0).total == pytest.approx(math.pi, abs=1e-12)


class TestSurfaceAreaMeasure:
    def test_square_atoms(self):
        sam = surface_area_measure(square())
        assert sam.total() == pytest.approx(4.0)
        assert sam.closedness_residual() < 1e-12

    def test_lower_dimensional_body(self):
        sam = surface_area_measure(segment2())
        assert len(sam.atoms) == 2
        assert sam.total() == pytest.approx(2.0)
        assert sam.closedness_residual() < 1e-12
        assert surface_area_measure(point2()).atoms == ()

    def test_closedness_random(self):
        rng = np.random.default_rng(5)
        for d in (2, 3):
            for _ in range(5):
                P = random_polytope(rng, d)
                sam = surface_area_measure(P)
                assert sam.closedness_residual() < 1e-9

    def test_homogeneity(self):
        rng = np.random.default_rng(11)
        P = random_polytope(rng, 3)
        for i in (1, 2):
            a = support_measure(scale(P, 2), i).total
            b = support_measure(P, i).total
            assert a == pytest.approx(2 ** i * b, rel=1e-9)

    def test_json_round_trip(self):
        sam = surface_area_measure(cube())
        back = SphereMeasure.from_dict(sam.to_dict())
        assert back.dim == 3
        assert back.total() == pytest.approx(sam.total())


class TestParallelVolumeMC:
    def test_square_full(self):
        est, se = local_parallel_volume_mc(square(), None, 1.0, 200_000, 42)
        assert abs(est - (4 + math.pi)) < 3 * se + 1e-12

    def test_point(self):
        est, se = local_parallel_volume_mc(point2(), None, 1.0, 120_000, 7)
        assert abs(est - math.pi) < 3 * se + 1e-12

    def test_square_bottom_normal_region(self):
        def region(x, u):
            return u[1] <= -1 + 1e-9

        est, se = local_parallel_volume_mc(square(), region, 1.0, 200_000, 3)
        assert abs(est - 1.0) < 3 * se + 1e-12

    def test_steiner_vs_mc_random(self):
        rng = np.random.default_rng(20)
        for d in (2, 3):
            P = random_polytope(rng, d)
            for t in (0.25, 0.5, 1.0, 2.0):
                want = parallel_volume(P, t)
                est, se = local_parallel_volume_mc(P, None, t, 60_000, 1000 + d)
                assert abs(est - want) < 3.5 * se + 1e-12

    def test_reproducible(self):
        a = local_parallel_volume_mc(square(), None, 0.5, 10_000, 9)
        b = local_parallel_volume_mc(square(), None, 0.5, 10_000, 9)
        assert a == b


class TestNearestPoints:
    def test_square_cases(self):
        P = square()
        X = np.array([[0.5, 0.5], [2.0, 0.5], [2.0, 2.0], [0.5, -3.0]])
        dist, proj = nearest_points(P, X)
        assert dist == pytest.approx([0.0, 1.0, math.sqrt(2), 3.0])
        assert proj[1] == pytest.approx([1.0, 0.5])
        assert proj[2] == pytest.approx([1.0, 1.0])

    def test_flat_in_3d(self):
        P = Polytope.construct([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)], 3)
        X = np.array([[0.25, 0.25, 2.0], [-1.0, 0.0, 0.0]])
        dist, _ = nearest_points(P, X)
        assert dist == pytest.approx([2.0, 1.0])


class TestHessianTotals:
    def test_indicator_interval(self):
        u = indicator_interval()
        assert hessian_total(u, 1) == 2
        assert hessian_total(u, 0) == 2
        assert hessian_steiner(u, 1) == 4

    def test_vee(self):
        u = vee_interval()
        assert hessian_total(u, 1) == 2
        assert hessian_total(u, 0) == 2
        assert hessian_steiner(u, 1) == 4

    def test_indicator_origin(self):
        u = indicator_origin()
        assert hessian_total(u, 1) == 0
        assert hessian_total(u, 0) == 2
        assert hessian_steiner(u, 1) == 2

    def test_box_dependence(self):
        u = indicator_interval()
        assert hessian_total(u, 0, F(3)) == 6
        assert hessian_steiner(u, 2, F(3)) == 2 + 2 * 6

    def test_positive_gradient_slab(self):
        u = indicator_interval()
        hm = hessian_measure(u, 0)

        def f(x, y):
            return 1.0 if y[0] > 0 else 0.0

        assert hm.integrate(f) == pytest.approx(1.0, abs=1e-9)

    def test_two_dim_pyramid(self):
        # u = max(|x1|, |x2|) on [-1,1]^2: 4 cells, gradients (+-1, 0), (0, +-1)
        dom = Polytope.construct([(-1, -1), (1, -1), (-1, 1), (1, 1)], 2)
        u = PLConvexFunction.from_pieces(
            dom, [((1, 0), 0), ((-1, 0), 0), ((0, 1), 0), ((0, -1), 0)])
        # order 2: domain area; order 0: gradient box fully covered once
        assert hessian_total(u, 2) == 4
        assert hessian_total(u, 0) == 4
        # flowout at t=1 in box R=1 is the 4x4 square
        assert hessian_steiner(u, 1) == 16

    def test_two_dim_simple_split(self):
        dom = Polytope.construct([(0, 0), (1, 0), (0, 1), (1, 1)], 2)
        u = PLConvexFunction.from_pieces(dom, [((0, 0), 0), ((1, 1), -1)])
        assert hessian_total(u, 2) == 1
        est, se = p_t_volume_mc(u, None, 1.0, 150_000, 17)
        want = float(hessian_steiner(u, 1))
        assert abs(est - want) < 3.5 * se + 1e-12


class TestFlowoutMC:
    @pytest.mark.parametrize("maker,want", [
        (indicator_interval, 4.0),
        (vee_interval, 4.0),
        (indicator_origin, 2.0),
    ])
    def test_interval_examples(self, maker, want):
        est, se = p_t_volume_mc(maker(), None, 1.0, 150_000, 23)
        assert abs(est - want) < 3.5 * se + 1e-12

    def test_steiner_matches_mc_across_t(self):
        u = vee_interval()
        for t in (0.25, 0.5, 2.0):
            want = float(hessian_steiner(u, F(t).limit_denominator(64)))
            est, se = p_t_volume_mc(u, None, t, 100_000, 31)
            assert abs(est - want) < 3.5 * se + 1e-12


class TestPushforwardConsistency:
    def test_order0_dim1(self):
        u = vee_interval()
        hm = hessian_measure(u, 0, F(2))

        def f(x, y):
            return math.cos(0.7 * y[0]) * (1.0 + float(x[0]) ** 2)

        direct = hm.integrate(f, tol=1e-9)
        via = hessian_integrate_via_support(u, 0, f, tol=1e-9, gradient_bound=F(2))
        assert via == pytest.approx(direct, abs=1e-6)

    def test_order0_origin(self):
        u = indicator_origin()

        def f(x, y):
            return 1.0 + 0.5 * y[0] ** 2

        direct = hessian_measure(u, 0, F(1)).integrate(f, tol=1e-9)
        via = hessian_integrate_via_support(u, 0, f, tol=1e-9, gradient_bound=F(1))
        # direct: integral of f over [-1, 1] = 2 + 1/3
        assert direct == pytest.approx(2 + 1 / 3, abs=1e-9)
        assert via == pytest.approx(direct, abs=1e-6)

    def test_dim2_orders(self):
        dom = Polytope.construct([(0, 0), (2, 0), (0, 2), (2, 2)], 2)
        u = PLConvexFunction.from_pieces(
            dom, [((0, 0), 0), ((1, 0), -1), ((0, 1), -1), ((1, 1), -2)])

        def f(x, y):
            return (1.0 + 0.3 * x[0] - 0.2 * x[1]) * math.exp(-0.5 * (y[0] + y[1]))

        for i in (0, 1):
            direct = hessian_measure(u, i, F(2)).integrate(f, tol=1e-8)
            via = hessian_integrate_via_support(u, i, f, tol=1e-8, gradient_bound=F(2))
            assert via == pytest.approx(direct, abs=5e-5), f"order {i}"

    def test_top_order_is_cell_sum(self):
        dom = Polytope.construct([(0, 0), (1, 0), (0, 1), (1, 1)], 2)
        u = PLConvexFunction.from_pieces(dom, [((0, 0), 0), ((1, 1), -1)])

        def f(x, y):
            return x[0] + x[1] + y[0]

        got = hessian_integrate(u, 2, f)
        # each cell is a half square; gradient (1,1) on the upper cell
        # integral of x0+x1 over the square is 1, plus area 1/2 of the cell
        assert got == pytest.approx(1.0 + 0.5, abs=1e-9)


class TestFaceQuadrature:
    def test_triangle_area(self):
        tri = Polytope.construct([(0, 0, 0), (2, 0, 0), (0, 2, 0)], 3)
        assert integrate_over_face(tri, lambda x: 1.0) == pytest.approx(2.0, abs=1e-10)

    def test_segment_moment(self):
        seg = Polytope.construct([(0, 0), (1, 1)], 2)
        got = integrate_over_face(seg, lambda x: x[0])
        assert got == pytest.approx(math.sqrt(2) / 2, abs=1e-10)

    def test_point_counts(self):
        assert integrate_over_face(point2(), lambda x: 5.0) == 5.0


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_support_totals_scale_correctly(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, 2, npts=8)
    t0 = support_measure(P, 0).total
    assert t0 == pytest.approx(math.pi, abs=1e-9)
    Q = scale(P, 3)
    assert support_measure(Q, 1).total == pytest.approx(
        3 * support_measure(P, 1).total, rel=1e-9)
