"""Translation polytopes, good generating sets, hemisphere tests and cone languages."""

import itertools
from fractions import Fraction

import pytest

from src.errors import InfeasibleError, PolytopeError, PreconditionError, SurjectivityError
from src.fellow_travel import min_fft_delta, verify_fft
from src.group_files import load_points, load_triangulation
from src.groups import CayleyOracle, GroupPresentation
from src.polytopes import (
    Ray,
    Triangulation,
    abelian_fft_bound,
    boundary_rays,
    cone_language,
    convex_hull,
    expanded_abelian_letters,
    gauge_exceptions,
    f_invariant_core,
    good_generating_set,
    hemisphere_check,
    is_f_invariant,
    is_good,
    symmetric_hemisphere_check,
    translation_length,
    translation_polytope,
    translation_samples,
)

E1, E2 = Ray((1, 0)), Ray((0, 1))
NE1, NE2 = Ray((-1, 0)), Ray((0, -1))


def rays(*vectors):
    return [Ray.of(v) for v in vectors]


class TestRay:
    def test_primitive(self):
        assert Ray.of((2, 4)) == Ray((1, 2))
        assert Ray.of((Fraction(1, 2), 1)) == Ray((1, 2))
        assert str(Ray.of((-3, 0))) == "(-1,0)"

    def test_zero_vector(self):
        with pytest.raises(PolytopeError):
            Ray.of((0, 0))


class TestConvexHull:
    def test_square_drops_interior_point(self):
        hull = convex_hull([(0, 0), (2, 0), (0, 2), (2, 2), (1, 1), (1, 0)], 2)
        assert hull.vertex_set() == frozenset({(0, 0), (2, 0), (0, 2), (2, 2)})
        assert len(hull.facets) == 4

    def test_interval(self):
        hull = convex_hull([(3,), (-1,), (1,)], 1)
        assert hull.vertex_set() == frozenset({(-1,), (3,)})
        assert hull.contains((2,))
        assert not hull.contains((4,))

    def test_collinear_points(self):
        with pytest.raises(PolytopeError, match="full-dimensional"):
            convex_hull([(0, 0), (1, 1), (2, 2)], 2)

    def test_gauge_and_scaling(self):
        diamond = convex_hull([(1, 0), (-1, 0), (0, 1), (0, -1)], 2)
        assert diamond.gauge((1, 1)) == 2
        assert diamond.gauge((0, 0)) == 0
        assert diamond.scaled(3).contains((2, 1))
        assert sorted(diamond.integer_points()) == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]

    def test_centrally_symmetric_keeps_opposite_facets(self):
        diamond = convex_hull([(1, 0), (-1, 0), (0, 1), (0, -1)], 2)
        assert dict(diamond.facets) == {(1, 1): 1, (1, -1): 1, (-1, 1): 1, (-1, -1): 1}
        cube = convex_hull(list(itertools.product((-1, 1), repeat=3)), 3)
        assert len(cube.facets) == 6
        assert len(cube.vertices) == 8


class TestTranslationLength:
    def test_z2(self, z2):
        assert translation_length((2, 1), z2.gens, z2.pres) == 3
        assert translation_length((0, 0), z2.gens, z2.pres) == 0

    def test_cannon_uses_swapped_letters(self, cannon):
        assert translation_length((2, 2), cannon.gens, cannon.pres) == 2
        assert translation_length((0, 2), cannon.gens, cannon.pres) == 1

    def test_outside_positive_span(self, line, z1_letters):
        gens = z1_letters(("a", 1, 1))
        with pytest.raises(InfeasibleError):
            translation_length((-1,), gens, line)

    def test_expanded_letters_include_orbit(self, cannon):
        vectors = {v for v, _ in expanded_abelian_letters(cannon.gens, cannon.pres)}
        assert (0, 2) in vectors
        assert (0, 1) in vectors


class TestTranslationPolytope:
    def test_z2_diamond(self, z2):
        polytope = translation_polytope(z2.gens, z2.pres)
        assert polytope.vertex_set() == frozenset({(1, 0), (-1, 0), (0, 1), (0, -1)})
        assert len(polytope.facets) == 4
        assert boundary_rays(polytope) == sorted([E1, E2, NE1, NE2])
        assert not hemisphere_check(boundary_rays(polytope))

    def test_cannon_diamond(self, cannon):
        polytope = translation_polytope(cannon.gens, cannon.pres)
        assert polytope.vertex_set() == frozenset({(2, 0), (-2, 0), (0, 2), (0, -2)})
        assert is_f_invariant(polytope, cannon.pres)
        assert boundary_rays(polytope) == sorted([E1, E2, NE1, NE2])

    def test_weighted_interval(self, line, z1_letters):
        gens = z1_letters(("a", 1, 1), ("A", -1, 1), ("b", 2, 1))
        polytope = translation_polytope(gens, line)
        assert polytope.vertex_set() == frozenset({(-1,), (2,)})

    def test_one_sided_letters(self, line, z1_letters):
        with pytest.raises(PolytopeError):
            translation_polytope(z1_letters(("a", 1, 1)), line)


class TestGoodGeneratingSet:
    def test_cannon_square(self, cannon):
        q = convex_hull(load_points("q_square"), 2)
        good = good_generating_set(cannon.gens, q, cannon.pres)
        assert good.scale == 2
        assert good.added == 18
        assert len(good.gens) == 26
        assert good.gens.inverse_closed
        assert translation_polytope(good.gens, cannon.pres).vertex_set() == q.scaled(2).vertex_set()
        assert is_good(good.gens, cannon.pres, 3)

    def test_cannon_square_falsifies_at_delta_one(self, cannon):
        good = good_generating_set(cannon.gens, convex_hull(load_points("q_square"), 2), cannon.pres)
        oracle = CayleyOracle(good.gens, cannon.pres)
        assert not verify_fft(0, 2, oracle).holds
        report = verify_fft(1, 4, oracle)
        assert report.holds
        assert report.classes_checked < report.words_checked
        assert min_fft_delta(4, 6, oracle) == 1

    def test_base_cannon_is_not_good(self, cannon):
        assert not is_good(cannon.gens, cannon.pres, 4)

    def test_q_must_be_invariant(self, cannon):
        tall = convex_hull([(1, 2), (-1, 2), (1, -2), (-1, -2)], 2)
        with pytest.raises(PolytopeError, match="invariant"):
            good_generating_set(cannon.gens, tall, cannon.pres)

    def test_symmetric_needs_symmetric_q(self, z2):
        lopsided = convex_hull([(2, 0), (0, 2), (-1, -1)], 2)
        with pytest.raises(PolytopeError, match="-Q"):
            good_generating_set(z2.gens, lopsided, z2.pres, symmetric=True)
        good = good_generating_set(z2.gens, lopsided, z2.pres)
        assert not good.gens.inverse_closed

    def test_origin_must_be_interior(self, z2):
        corner = convex_hull([(0, 0), (1, 0), (0, 1)], 2)
        with pytest.raises(PolytopeError, match="interior"):
            good_generating_set(z2.gens, corner, z2.pres)


class TestAbelianFFTBound:
    def test_z1(self, z1):
        bound = abelian_fft_bound(z1.gens, z1.pres, 6)
        assert bound.minimal == [(1, 1)]
        assert bound.k == 2
        assert bound.frontier_closed

    def test_z2(self, z2):
        bound = abelian_fft_bound(z2.gens, z2.pres, 5)
        assert set(bound.minimal) == {(1, 1, 0, 0), (0, 0, 1, 1)}
        assert bound.k == 2

    def test_single_letter(self, line, z1_letters):
        bound = abelian_fft_bound(z1_letters(("a", 1, 1)), line, 5)
        assert bound.minimal == []
        assert bound.k == 0

    def test_needs_free_abelian(self, cannon):
        with pytest.raises(PreconditionError):
            abelian_fft_bound(cannon.gens, cannon.pres, 3)


class TestHemisphere:
    def test_basic_cases(self):
        assert hemisphere_check([E1, E2])
        assert not hemisphere_check([E1, E2, NE1, NE2])
        assert not hemisphere_check(rays((1, 0), (0, 1), (-1, -1)))
        assert hemisphere_check([E1, NE1])

    def test_empty(self):
        with pytest.raises(PreconditionError):
            hemisphere_check([])

    def test_matches_brute_force(self):
        pool = rays((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1))
        normals = [u for u in itertools.product(range(-2, 3), repeat=2) if any(u)]
        for size in range(1, len(pool) + 1):
            for subset in itertools.combinations(pool, size):
                expected = any(
                    all(u[0] * r.direction[0] + u[1] * r.direction[1] >= 0 for r in subset)
                    for u in normals
                )
                assert hemisphere_check(list(subset)) == expected, subset

    def test_symmetric_part(self):
        assert symmetric_hemisphere_check([E1, E2, NE1])
        assert not symmetric_hemisphere_check([E1, E2, NE1, NE2, Ray((1, 1))])
        assert symmetric_hemisphere_check([E1, E2])

    def test_f_invariant_core(self, cannon):
        assert f_invariant_core(rays((1, 0), (0, 1), (1, 1)), cannon.pres) == sorted(rays((1, 0), (0, 1), (1, 1)))
        assert f_invariant_core(rays((1, 0), (1, 1)), cannon.pres) == [Ray((1, 1))]


class TestTriangulation:
    def test_dependent_rays_rejected(self):
        tri = Triangulation(2, (E1, NE1), ((0, 1),))
        with pytest.raises(PolytopeError, match="dependent"):
            tri.validate()

    def test_missing_ray_index(self):
        with pytest.raises(PolytopeError, match="missing"):
            Triangulation(2, (E1, E2), ((0, 2),)).validate()

    def test_cover(self, cannon):
        quadrants = load_triangulation("quadrants")
        assert quadrants.check_cover(3) == []
        assert quadrants.is_f_invariant(cannon.pres)
        upper = Triangulation(2, (E1, E2, NE1), ((0, 1), (1, 2)))
        assert (0, -1) in upper.check_cover(1)


class TestConeLanguage:
    def test_quadrants(self, z2):
        language = cone_language(load_triangulation("quadrants"), z2.gens, z2.pres)
        assert language.scale == 1
        assert language.lattice_index == 1
        assert language.coset_words == [()]
        assert language.surjective
        assert language.cone_words_geodesic
        assert language.max_slack == 0
        assert language.missing_boundary_rays == []
        assert language.to_dict(z2.gens)["words"] == ["a", "b", "A", "B"]

    def test_diagonal_ray_forces_scale_two(self, z2):
        language = cone_language(load_triangulation("quadrants_diagonal"), z2.gens, z2.pres)
        assert language.scale == 2
        assert language.points[1] == (1, 1)
        assert language.lattice_index == 4
        assert len(language.coset_words) == 16
        assert language.surjective

    def test_half_line_misses_negatives(self, z1):
        with pytest.raises(SurjectivityError):
            cone_language(load_triangulation("half_line"), z1.gens, z1.pres)


class TestGaugeIdentity:
    def test_z2_box(self, z2):
        assert gauge_exceptions(z2.gens, z2.pres, 6) == []

    def test_asymmetric_letters(self, z2_letters):
        gens = z2_letters(("a", (1, 0), 1), ("b", (0, 1), 1), ("c", (-1, -1), 1))
        assert gauge_exceptions(gens, GroupPresentation.free_abelian(2), 6) == []

    def test_z2_lengths_are_linear(self, z2):
        (sample,) = translation_samples([(2, 1)], z2.gens, z2.pres)
        assert sample.tau == 3
        assert all(sample.deviation(n) == 0 for n in sample.lengths)

    def test_cannon_vertical_costs_two_extra_letters(self, cannon):
        (sample,) = translation_samples([(0, 1)], cannon.gens, cannon.pres)
        assert sample.tau == Fraction(1, 2)
        assert sample.lengths[4] == 4
        assert all(sample.deviation(n) * n == 2 for n in sample.lengths)
        assert sample.to_dict()["max_scaled_deviation"] == "2"
