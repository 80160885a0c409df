"""Chamber calculus: enumeration, signs, derivatives, restrictions, matching."""

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slly import bethe
from slly import piecewise as pw
from slly.errors import AmbiguousPointError, DiscontinuityError


def plane_wave(n, kappa, coef=1.0):
    return pw.build(n, {r: [(coef, tuple(kappa))] for r in pw.enumerate_regions(n)})


class TestEnumeration:
    def test_single_particle(self):
        assert [r.order for r in pw.enumerate_regions(1)] == [(1,)]

    def test_three_particles_matches_listing(self):
        orders = [r.order for r in pw.enumerate_regions(3)]
        assert orders == [
            (1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1),
        ]

    def test_five_particles_against_permutation_oracle(self):
        regions = pw.enumerate_regions(5)
        oracle = set(itertools.permutations(range(1, 6)))
        assert len(regions) == 120
        assert {r.order for r in regions} == oracle

    @pytest.mark.parametrize("n", [0, 11])
    def test_size_guard(self, n):
        with pytest.raises(ValueError):
            pw.enumerate_regions(n)

    @pytest.mark.parametrize("n,count", [(2, 1), (3, 6), (4, 36)])
    def test_interface_counts(self, n, count):
        ifaces = pw.enumerate_interfaces(n)
        assert len(ifaces) == count
        assert count == math.factorial(n) * (n - 1) // 2

    def test_interface_orientation_and_adjacency(self):
        for iface in pw.enumerate_interfaces(4):
            a, b = iface.pair
            assert a < b
            assert iface.left.sign(a, b) == -1
            assert iface.right.sign(a, b) == 1
            # regions differ by exactly one adjacent transposition
            diff = [i for i, (s, t) in enumerate(zip(iface.left.order, iface.right.order)) if s != t]
            assert len(diff) == 2 and diff[1] == diff[0] + 1

    def test_interfaces_unique(self):
        ifaces = pw.enumerate_interfaces(4)
        keys = {frozenset((i.left.order, i.right.order)) for i in ifaces}
        assert len(keys) == len(ifaces)


class TestSign:
    def test_identity_region(self):
        r = pw.Region((1, 2, 3))
        assert pw.sign_value(r, 1, 2) == -1

    def test_reversed_region(self):
        r = pw.Region((3, 2, 1))
        assert pw.sign_value(r, 1, 3) == 1

    def test_equal_indices_rejected(self):
        with pytest.raises(ValueError):
            pw.sign_value(pw.Region((1, 2)), 1, 1)

    @settings(max_examples=60, deadline=None)
    @given(perm=st.permutations(list(range(1, 5))))
    def test_antisymmetry(self, perm):
        r = pw.Region(tuple(perm))
        for a in range(1, 5):
            for b in range(1, 5):
                if a != b:
                    assert r.sign(a, b) == -r.sign(b, a)

    def test_unity_partition_three_particles(self):
        # eps(x1-x2)eps(x1-x3) + eps(x2-x1)eps(x2-x3) + eps(x1-x3)eps(x2-x3) = 1
        one = pw.constant_function(3)
        t1 = pw.multiply_sign(pw.multiply_sign(one, 1, 2), 1, 3)
        t2 = pw.multiply_sign(pw.multiply_sign(one, 2, 1), 2, 3)
        t3 = pw.multiply_sign(pw.multiply_sign(one, 1, 3), 2, 3)
        total = pw.add(pw.add(t1, t2), t3)
        assert pw.coefficient_distance(total, one) == 0.0


class TestDifferentiate:
    def test_scales_by_kappa(self):
        f = plane_wave(2, (1j, -1j), coef=2.0)
        df = pw.differentiate(f, 1)
        for ts in df.terms.values():
            assert ts[0].coef == 2j

    def test_commutes(self):
        f = plane_wave(3, (0.3 + 1j, -0.7j, 1.1))
        a = pw.differentiate(pw.differentiate(f, 1), 2)
        b = pw.differentiate(pw.differentiate(f, 2), 1)
        assert pw.coefficient_distance(a, b) == 0.0

    def test_dimer_center_of_mass_derivative_vanishes(self):
        # kappa_1 = -kappa_2 per chamber, so (d1 + d2) annihilates the pair profile
        f = bethe.dimer_state(0.0, -2.0)
        total = pw.add(pw.differentiate(f, 1), pw.differentiate(f, 2))
        assert pw.max_coefficient(total) == 0.0


class TestMultiplySign:
    def test_involution(self):
        f = plane_wave(3, (1j, 2j, -3j), coef=1.5 + 0.5j)
        twice = pw.multiply_sign(pw.multiply_sign(f, 1, 3), 1, 3)
        assert pw.coefficient_distance(twice, f) == 0.0

    def test_two_particle_signs(self):
        f = pw.multiply_sign(pw.constant_function(2), 1, 2)
        r12, r21 = pw.Region((1, 2)), pw.Region((2, 1))
        assert f.terms[r12][0].coef == -1
        assert f.terms[r21][0].coef == 1

    def test_equal_indices_rejected(self):
        with pytest.raises(ValueError):
            pw.multiply_sign(pw.constant_function(2), 2, 2)


class TestEvaluate:
    def test_constant(self):
        f = pw.constant_function(3)
        assert pw.evaluate(f, (0.0, 1.0, -2.0)) == 1.0

    def test_dimer_value(self):
        f = bethe.dimer_state(0.0, -2.0)
        assert pw.evaluate(f, (0.0, 1.0)) == pytest.approx(math.exp(-1.0), abs=1e-14)

    def test_diagonal_rejected(self):
        f = pw.constant_function(2)
        with pytest.raises(AmbiguousPointError):
            pw.evaluate(f, (0.5, 0.5))


class TestCanonicalization:
    def test_merges_equal_kappa(self):
        r = pw.Region((1, 2))
        f = pw.build(2, {r: [(1.0, (1j, 0)), (2.0, (1j, 0))]})
        assert len(f.terms[r]) == 1
        assert f.terms[r][0].coef == 3.0

    def test_drops_tiny_coefficients(self):
        r = pw.Region((1, 2))
        f = pw.build(2, {r: [(1e-15, (1j, 0))]})
        assert r not in f.terms

    def test_idempotent(self):
        import numpy as np

        rng = np.random.default_rng(7)
        data = {}
        for region in pw.enumerate_regions(3):
            data[region] = [
                (
                    complex(rng.standard_normal(), rng.standard_normal()),
                    tuple(complex(rng.standard_normal(), rng.standard_normal()) for _ in range(3)),
                )
                for _ in range(4)
            ]
        f = pw.build(3, data)
        g = pw.canonicalize(f)
        assert f.terms == g.terms


class TestRestriction:
    def test_plane_wave_substitution(self):
        k1, k2 = 1.3, -0.4
        f = plane_wave(2, (1j * k1, 1j * k2))
        iface = pw.enumerate_interfaces(2)[0]
        left = pw.restrict_to_interface(f, iface, "left")
        assert len(left) == 1
        assert left[0].kappa == (1j * (k1 + k2),)

    def test_dimer_restricts_to_one(self):
        f = bethe.dimer_state(0.0, -2.0)
        iface = pw.enumerate_interfaces(2)[0]
        for side in ("left", "right"):
            terms = pw.restrict_to_interface(f, iface, side)
            assert len(terms) == 1
            assert terms[0].coef == pytest.approx(1.0)
            assert terms[0].kappa == (0.0,)

    def test_bethe_state_sides_agree(self):
        f = bethe.collision_state([1.0, -0.5], 1.7)
        iface = pw.enumerate_interfaces(2)[0]
        assert pw.continuity_residual(f, iface) == 0.0

    def test_linearity(self):
        import numpy as np

        rng = np.random.default_rng(3)

        def rand_fn():
            data = {}
            for region in pw.enumerate_regions(3):
                data[region] = [
                    (
                        complex(rng.standard_normal(), rng.standard_normal()),
                        tuple(1j * rng.standard_normal() for _ in range(3)),
                    )
                    for _ in range(3)
                ]
            return pw.build(3, data)

        f, g = rand_fn(), rand_fn()
        iface = pw.enumerate_interfaces(3)[0]
        merged = pw._merge_terms(
            [(t.coef, t.kappa) for t in pw.restrict_to_interface(pw.add(f, g), iface, "left")]
            + [(-t.coef, t.kappa) for t in pw.restrict_to_interface(f, iface, "left")]
            + [(-t.coef, t.kappa) for t in pw.restrict_to_interface(g, iface, "left")]
        )
        assert max((abs(t.coef) for t in merged), default=0.0) <= 1e-12


class TestMatchingResiduals:
    def test_constant_is_continuous(self):
        f = pw.constant_function(3)
        for iface in pw.enumerate_interfaces(3):
            assert pw.continuity_residual(f, iface) == 0.0

    def test_valid_ratio_continuous_and_perturbed_not(self):
        c, k1, k2 = 1.9, 0.8, -0.3
        s = bethe.s_matrix(k1, k2, c)
        iface = pw.enumerate_interfaces(2)[0]
        r12, r21 = iface.left, iface.right
        ka, kb = (1j * k1, 1j * k2), (1j * k2, 1j * k1)

        def two_body(ratio):
            return pw.build(2, {r12: [(1.0, ka), (ratio, kb)], r21: [(1.0, kb), (ratio, ka)]})

        assert pw.continuity_residual(two_body(s), iface) == 0.0
        assert pw.jump_residual([two_body(s)], iface, [[2 * c]]) <= 1e-13
        assert pw.jump_residual([two_body(s * 1.1)], iface, [[2 * c]]) > 1e-3

    def test_free_wave_jump_equals_coupling(self):
        c = 1.3
        f = plane_wave(2, (0.7j, -0.2j))
        iface = pw.enumerate_interfaces(2)[0]
        assert pw.jump_residual([f], iface, [[2 * c]]) == pytest.approx(2 * abs(c))

    def test_dimension_mismatch(self):
        f = pw.constant_function(2)
        iface = pw.enumerate_interfaces(2)[0]
        with pytest.raises(ValueError):
            pw.jump_residual([f], iface, [[1.0, 0.0], [0.0, 1.0]])

    def test_discontinuous_input_rejected(self):
        r12, r21 = pw.Region((1, 2)), pw.Region((2, 1))
        f = pw.build(2, {r12: [(1.0, (0j, 0j))], r21: [(2.0, (0j, 0j))]})
        iface = pw.enumerate_interfaces(2)[0]
        with pytest.raises(DiscontinuityError):
            pw.jump_residual([f], iface, [[1.0]])


class TestSerialization:
    def test_round_trip(self):
        f = bethe.collision_state([1.1, 0.4, -0.8], 2.2)
        g = pw.from_json_obj(pw.to_json_obj(f))
        assert pw.coefficient_distance(f, g) == 0.0
        assert g.n == 3
