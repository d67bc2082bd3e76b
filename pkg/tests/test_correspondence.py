import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrdyn.correspondence import (
    Correspondence,
    SpherePoint,
    chordal_distance,
    unit_circle_points,
)
from corrdyn.errors import InvalidInputError
from corrdyn.polyalg import BivariatePolynomial as BP
from corrdyn.polyalg import GaussianRational

GR = GaussianRational.of


def circle_poly():
    # z^2 + w^2 - 1
    return BP([[GR(-1), GR(0), GR(1)], [GR(0)], [GR(1)]])


class TestSpherePoint:
    def test_normalization(self):
        p = SpherePoint.from_complex(5 + 0j)
        assert p.z1 == 1 and abs(p.z2 - 0.2) < 1e-15

    def test_infinity(self):
        inf = SpherePoint.infinity()
        assert inf.is_infinity
        with pytest.raises(InvalidInputError):
            inf.to_complex()

    def test_chordal_symmetry_and_range(self):
        a = SpherePoint.from_complex(1 + 2j)
        b = SpherePoint.infinity()
        assert chordal_distance(a, b) == chordal_distance(b, a)
        assert 0 <= chordal_distance(a, b) <= 1.0 + 1e-12

    @given(
        st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
        st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
        st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
    )
    @settings(max_examples=100)
    def test_triangle_inequality(self, a, b, c):
        pa, pb, pc = map(SpherePoint.from_complex, (a, b, c))
        assert chordal_distance(pa, pc) <= (
            chordal_distance(pa, pb) + chordal_distance(pb, pc) + 1e-9
        )


class TestFibers:
    def test_circle_fiber_double_point(self):
        corr = Correspondence(circle_poly())
        fiber = corr.backward_fiber(SpherePoint.from_complex(1 + 0j))
        assert len(fiber.points) == 1
        z, e = fiber.points[0]
        assert z.to_complex() == pytest.approx(0j) and e == 2

    def test_circle_fiber_simple(self):
        corr = Correspondence(circle_poly())
        fiber = corr.backward_fiber(SpherePoint.from_complex(0j))
        got = sorted(round(z.to_complex().real) for z, _ in fiber.points)
        assert got == [-1, 1]
        assert all(e == 1 for _, e in fiber.points)

    def test_forward_fiber_at_infinity(self):
        corr = Correspondence(BP.graph_of_power(2))  # w = z^2
        fiber = corr.forward_fiber(SpherePoint.infinity())
        assert len(fiber.points) == 1
        assert fiber.points[0][0].is_infinity
        assert fiber.points[0][1] == 1

    def test_total_multiplicity_is_degree(self):
        corr = Correspondence(BP.monomial_relation(3, 2))
        for w in unit_circle_points(7):
            assert corr.backward_fiber(w).total_multiplicity == 3
        for z in unit_circle_points(7):
            assert corr.forward_fiber(z).total_multiplicity == 2

    def test_branch_index(self):
        corr = Correspondence(BP.monomial_relation(3, 2))
        origin = SpherePoint.from_complex(0j)
        assert corr.branch_index(origin, origin) == 3

    def test_branch_index_absent_point(self):
        corr = Correspondence(BP.graph_of_power(2))
        with pytest.raises(InvalidInputError):
            corr.branch_index(
                SpherePoint.from_complex(1 + 0j), SpherePoint.from_complex(5 + 0j)
            )

    def test_on_correspondence(self):
        corr = Correspondence(BP.graph_of_power(2))
        assert corr.on_correspondence(
            SpherePoint.from_complex(2 + 0j), SpherePoint.from_complex(4 + 0j)
        )
        assert corr.on_correspondence(SpherePoint.infinity(), SpherePoint.infinity())
        assert not corr.on_correspondence(
            SpherePoint.from_complex(2 + 0j), SpherePoint.from_complex(5 + 0j)
        )


class TestRationalMapBranchIndex:
    def test_matches_vanishing_order(self):
        # for w = z^m the branch index at (0, 0) is m, elsewhere on C 1
        for m in (2, 3, 4):
            corr = Correspondence(BP.graph_of_power(m))
            origin = SpherePoint.from_complex(0j)
            assert corr.branch_index(origin, origin) == m
            z = SpherePoint.from_complex(1.3 + 0.2j)
            w = SpherePoint.from_complex(z.to_complex() ** m)
            assert corr.branch_index(z, w) == 1


class TestBranchedSets:
    def test_graph_of_square(self):
        corr = Correspondence(BP.graph_of_power(2))
        sets = corr.branched_sets()
        vals = {("inf" if p.is_infinity else round(p.to_complex().real)) for p in sets.branch_points}
        assert vals == {0, "inf"}

    def test_product_family_global(self):
        factors = [BP.graph_of_power(2), BP.graph_of_power(3)]
        corr = Correspondence(BP.product(factors), factors=factors)
        sets = corr.branched_sets()
        vals = {("inf" if p.is_infinity else round(p.to_complex().real)) for p in sets.branch_points}
        assert vals == {0, 1, "inf"}

    def test_product_family_on_circle(self):
        factors = [BP.graph_of_power(2), BP.graph_of_power(3)]
        corr = Correspondence(BP.product(factors), factors=factors)
        sets = corr.branched_sets(restrict_to="circle")
        assert len(sets.branch_points) == 1
        assert sets.branch_points[0].to_complex() == pytest.approx(1 + 0j)

    def test_monomial_has_no_branching_on_circle(self):
        corr = Correspondence(BP.monomial_relation(2, 3))
        sets = corr.branched_sets(restrict_to="circle")
        assert sets.branch_points == ()

    def test_every_branch_point_verified(self):
        factors = [BP.graph_of_power(2), BP.graph_of_power(4)]
        corr = Correspondence(BP.product(factors), factors=factors)
        sets = corr.branched_sets()
        for b in sets.branch_points:
            found = False
            for w, _ in corr.forward_fiber(b).points:
                if corr.branch_index(b, w) >= 2:
                    found = True
            assert found


class TestValidation:
    def test_rejects_non_squarefree(self):
        bad = BP.product([BP.graph_of_power(2), BP.graph_of_power(2)])
        with pytest.raises(InvalidInputError):
            Correspondence(bad)

    def test_rejects_degenerate_degree(self):
        with pytest.raises(InvalidInputError):
            Correspondence(BP([[GR(0), GR(1)]]))  # p = w, no z dependence
