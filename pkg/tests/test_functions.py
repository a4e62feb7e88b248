import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from epival.bodies import Polytope
from epival.functions import (
    EpiMinNotConvex,
    MaxAffine,
    PLConvexFunction,
    epi_distance,
)


def absfun():
    return PLConvexFunction.lower_envelope([(-1, 1), (0, 0), (1, 1)])


def boxfun():
    # max(|x1|, |x2|) on [-1,1]^2
    S = Polytope.construct([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    return PLConvexFunction.from_pieces(
        S, [((1, 0), 0), ((-1, 0), 0), ((0, 1), 0), ((0, -1), 0)]
    )


def random_envelope(rng, n, npts=None):
    npts = npts or rng.randint(n + 1, n + 5)
    pts = []
    for _ in range(npts):
        x = tuple(F(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(n))
        t = F(rng.randint(-6, 6), rng.randint(1, 3))
        pts.append(x + (t,))
    return PLConvexFunction.lower_envelope(pts)


class TestConstruction:
    def test_abs_canonical(self):
        u = absfun()
        assert u.pieces == (((F(-1),), F(0)), ((F(1),), F(0)))
        assert u.evaluate((F(1, 2),)) == F(1, 2)
        assert u.evaluate((2,)) is None
        assert u.min_value == 0 and u.max_value == 1

    def test_dominated_piece_dropped(self):
        dom = Polytope.construct([(0,), (1,)], 1)
        u = PLConvexFunction.from_pieces(dom, [((0,), 0), ((0,), -1), ((1,), -5)])
        assert u.pieces == (((F(0),), F(0)),)

    def test_collinear_envelope_is_affine(self):
        u = PLConvexFunction.lower_envelope([(0, 0), (1, 1), (2, 2)])
        assert u.pieces == (((F(1),), F(0)),)
        assert u.domain.vertices == ((F(0),), (F(2),))

    def test_point_domain(self):
        dom = Polytope.construct([(3, 4)], 2)
        u = PLConvexFunction.from_pieces(dom, [((1, 1), 0), ((0, 0), 2)])
        assert u.pieces == (((F(0), F(0)), F(7)),)
        assert u.evaluate((3, 4)) == 7

    def test_segment_domain_gradient_projection(self):
        # x2 is constant 0 on the segment, so gradients differing only in
        # the second slot collapse to one canonical piece
        dom = Polytope.construct([(0, 0), (1, 0)], 2)
        u = PLConvexFunction.from_pieces(dom, [((1, 5), 0), ((1, -3), 0)])
        assert len(u.pieces) == 1
        assert u.evaluate((F(1, 2), 0)) == F(1, 2)

    def test_vertical_segment_envelope(self):
        u = PLConvexFunction.lower_envelope([(2, 5), (2, -1), (2, 3)])
        assert u.domain.vertices == ((F(2),),)
        assert u.evaluate((2,)) == -1

    def test_tilted_plane_envelope(self):
        u = PLConvexFunction.lower_envelope([(0, 0, 0), (1, 0, 1), (0, 1, 0), (1, 1, 1)])
        assert u.pieces == (((F(1), F(0)), F(0)),)

    def test_cells_tile_domain(self):
        v = boxfun()
        assert len(v.cells) == 4
        total = sum(c.volume for _, _, c in v.cells)
        assert total == v.domain.volume

    def test_serialization_round_trip(self):
        for u in (absfun(), boxfun()):
            assert PLConvexFunction.from_dict(u.to_dict()) == u


class TestDictionary:
    def test_body_of_abs(self):
        K = absfun().body_of()
        assert set(K.vertices) == {
            (F(-1), F(1)), (F(0), F(0)), (F(0), F(2)), (F(1), F(1)),
        }
        assert K.volume == 2

    def test_body_of_box(self):
        assert boxfun().body_of().volume == F(8, 3)

    def test_body_of_constant_is_flat(self):
        dom = Polytope.construct([(0,), (1,)], 1)
        K = PLConvexFunction.constant(dom, F(1, 2)).body_of()
        assert K.intrinsic_dim == 1
        assert set(K.vertices) == {(F(0), F(1, 2)), (F(1), F(1, 2))}

    def test_floor_inverts_body_lower_part(self):
        rng = random.Random(3)
        for n in (1, 2):
            for _ in range(12):
                u = random_envelope(rng, n)
                assert PLConvexFunction.floor_of(u.graph_hull()) == u

    def test_floor_of_cube(self):
        C = Polytope.construct(
            [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
        )
        u = PLConvexFunction.floor_of(C)
        assert u == PLConvexFunction.constant(
            Polytope.construct([(0, 0), (1, 0), (1, 1), (0, 1)]), 0
        )

    def test_floor_of_rotated_square(self):
        K = Polytope.construct([(0, 0), (1, 1), (0, 2), (-1, 1)])
        u = PLConvexFunction.floor_of(K)
        assert u == absfun()


class TestConjugate:
    def test_abs_conjugate_closed_form(self):
        c = absfun().fenchel_conjugate()
        for y in [F(0), F(1, 2), F(2), F(-3), F(7, 3)]:
            assert c.evaluate((y,)) == max(F(0), abs(y) - 1)

    def test_linear_conjugate(self):
        dom = Polytope.construct([(0,), (1,)], 1)
        u = PLConvexFunction.affine(dom, (1,), 0)
        c = u.fenchel_conjugate()
        for y in [F(-2), F(0), F(1), F(5, 2)]:
            assert c.evaluate((y,)) == max(F(0), y - 1)

    def test_support_identity_random(self):
        # conjugate equals the support of the associated body evaluated at
        # downward directions, exactly
        rng = random.Random(17)
        for n in (1, 2):
            for _ in range(10):
                u = random_envelope(rng, n)
                c = u.fenchel_conjugate()
                K = u.body_of()
                for _ in range(6):
                    y = tuple(F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n))
                    assert c.evaluate(y) == K.support(y + (F(-1),))

    def test_fenchel_young(self):
        rng = random.Random(23)
        for n in (1, 2):
            for _ in range(8):
                u = random_envelope(rng, n)
                c = u.fenchel_conjugate()
                for g, b, cell in u.cells:
                    for x in cell.vertices:
                        # equality at subgradients
                        assert u.evaluate(x) + c.evaluate(g) == sum(
                            a * t for a, t in zip(x, g)
                        )
                for _ in range(4):
                    x = u.domain.centroid
                    y = tuple(F(rng.randint(-5, 5), 2) for _ in range(n))
                    assert u.evaluate(x) + c.evaluate(y) >= sum(
                        a * t for a, t in zip(x, y)
                    )


class TestEpiOperations:
    def test_epi_scale_matches_body_scaling(self):
        rng = random.Random(31)
        for n in (1, 2):
            for _ in range(6):
                u = random_envelope(rng, n)
                t = F(rng.randint(1, 7), rng.randint(1, 4))
                assert u.epi_scale(t).body_of() == u.body_of().scale(t)

    def test_epi_translate_matches_body_translation(self):
        rng = random.Random(37)
        for n in (1, 2):
            for _ in range(6):
                u = random_envelope(rng, n)
                s = tuple(F(rng.randint(-4, 4), 2) for _ in range(n))
                c = F(rng.randint(-3, 3))
                assert u.epi_translate(s, c).body_of() == u.body_of().translate(s + (c,))

    def test_epi_scale_value(self):
        u = absfun().epi_scale(2)
        assert u.evaluate((1,)) == 1
        assert u.evaluate((2,)) == 2
        assert u.domain.vertices == ((F(-2),), (F(2),))


class TestLattice:
    def test_max_min_of_floors_on_split_bodies(self):
        rng = random.Random(41)
        for _ in range(10):
            u = random_envelope(rng, 1, 5)
            K = u.body_of()
            lo = min(v[0] for v in K.vertices)
            hi = max(v[0] for v in K.vertices)
            a = lo + (hi - lo) * F(1, 3)
            b = lo + (hi - lo) * F(2, 3)
            L = K.clip((1, 0), b)
            R = K.clip((-1, 0), -a)
            fl = PLConvexFunction.floor_of
            assert fl(L.intersect(R)) == fl(L).pointwise_max(fl(R))
            assert fl(L.convex_union(R)) == fl(L).pointwise_min(fl(R))

    def test_min_rejects_nonconvex(self):
        dom = Polytope.construct([(0,), (1,)], 1)
        u = PLConvexFunction.constant(dom, 0)
        v = PLConvexFunction.affine(dom, (1,), F(-1, 2))
        with pytest.raises(EpiMinNotConvex):
            u.pointwise_min(v)

    def test_min_rejects_agreeing_at_domain_endpoints(self):
        # the convex envelope of min(x, 1-x) is 0, which agrees with the
        # minimum at both domain endpoints, so a vertex check on the
        # inputs' cells alone would pass; the epigraph union is
        # disconnected at low levels and the test still rejects
        dom = Polytope.construct([(0,), (1,)], 1)
        u = PLConvexFunction.affine(dom, (1,), 0)
        v = PLConvexFunction.affine(dom, (-1,), 1)
        with pytest.raises(EpiMinNotConvex):
            u.pointwise_min(v)
        assert not u.min_exists_with(v)

    def test_min_overlapping_domains_above_minimum(self):
        # one input sits strictly above the other on a shared domain;
        # the minimum is the lower input and must not be rejected
        dom = Polytope.construct([(0,), (1,)], 1)
        u = PLConvexFunction.constant(dom, 0)
        v = PLConvexFunction.from_pieces(dom, [((2,), -1), ((-2,), 1)])
        assert v.evaluate((0,)) == 1 and v.evaluate((1,)) == 1
        assert u.pointwise_min(v) == u

    def test_min_disjoint_domains_collinear(self):
        a = PLConvexFunction.affine(Polytope.construct([(0,), (1,)], 1), (1,), 0)
        b = PLConvexFunction.affine(Polytope.construct([(1,), (2,)], 1), (1,), 0)
        m = a.pointwise_min(b)
        assert m.domain.vertices == ((F(0),), (F(2),))

    def test_min_disjoint_domains_rejected(self):
        a = PLConvexFunction.constant(Polytope.construct([(0,), (1,)], 1), 0)
        b = PLConvexFunction.constant(Polytope.construct([(2,), (3,)], 1), 0)
        with pytest.raises(EpiMinNotConvex):
            a.pointwise_min(b)

    def test_max_with_disjoint_domain_is_empty(self):
        a = PLConvexFunction.constant(Polytope.construct([(0,), (1,)], 1), 0)
        b = PLConvexFunction.constant(Polytope.construct([(2,), (3,)], 1), 0)
        assert a.pointwise_max(b).is_empty


class TestSublevel:
    def test_sublevel_abs(self):
        u = absfun()
        s = u.sublevel_set(F(1, 2))
        assert s.vertices == ((F(-1, 2),), (F(1, 2),))
        assert u.sublevel_set(-1).is_empty
        assert u.sublevel_set(5) == u.domain

    def test_sublevel_box(self):
        v = boxfun()
        s = v.sublevel_set(F(1, 2))
        assert s.volume == 1


class TestEpiDistance:
    def test_identical(self):
        assert epi_distance(absfun(), absfun()) == 0.0

    def test_translate_small(self):
        u = absfun()
        v = u.epi_translate((F(1, 100),), 0)
        d = epi_distance(u, v)
        assert 0 < d < 0.05

    def test_cap_at_one(self):
        u = absfun()
        v = u.epi_translate((100,), 0)
        assert epi_distance(u, v) == 1.0

    def test_empty_conventions(self):
        e = PLConvexFunction.empty(1)
        assert epi_distance(e, e) == 0.0
        assert epi_distance(e, absfun()) == 1.0

    def test_decreasing_under_vertex_perturbation(self):
        base = [(-1, 1), (0, 0), (1, 1)]
        u = PLConvexFunction.lower_envelope(base)
        prev = None
        for j in range(1, 8):
            eps = F(1, 2 ** j)
            pts = [(-1 + eps, 1), (0, eps), (1, 1 + eps)]
            d = epi_distance(u, PLConvexFunction.lower_envelope(pts))
            if prev is not None:
                assert d <= prev + 1e-12
            prev = d
        assert prev < 1e-2


coord = st.integers(min_value=-6, max_value=6)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.tuples(coord, coord), min_size=2, max_size=6),
    st.tuples(coord, coord),
)
def test_envelope_minorizes_input_points(pts, q):
    u = PLConvexFunction.lower_envelope(pts)
    for x, t in pts:
        val = u.evaluate((x,))
        assert val is not None and val <= t
    val = u.evaluate((q[0],))
    if val is not None:
        # value is a convex combination certificate: never below the best
        # affine minorant through the input points
        assert val >= min(t for _, t in pts)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coord, coord, coord), min_size=3, max_size=7))
def test_envelope_convexity_midpoints(pts):
    u = PLConvexFunction.lower_envelope(pts)
    vs = u.complex_vertices
    for a in vs:
        for b in vs:
            mid = tuple((x + y) / 2 for x, y in zip(a, b))
            va, vb, vm = u.evaluate(a), u.evaluate(b), u.evaluate(mid)
            assert vm is not None and vm <= (va + vb) / 2
