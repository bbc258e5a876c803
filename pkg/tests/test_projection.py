"""Exact, level-reduced, Monte Carlo, and closed-form projection constants."""

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cube_constants import core, projection


def brute_lambda(fam: core.SupportFamily) -> Fraction:
    total = 0
    for x in range(1 << fam.n):
        g = 0
        for S in fam.masks:
            g += -1 if (S & x).bit_count() & 1 else 1
        total += abs(g)
    return Fraction(total, 1 << fam.n)


@st.composite
def small_families(draw):
    n = draw(st.integers(1, 5))
    universe = list(range(1 << n))
    masks = draw(
        st.lists(st.sampled_from(universe), min_size=1, max_size=6, unique=True)
    )
    return core.SupportFamily(n, tuple(sorted(masks)), "explicit")


class TestLambdaExact:
    @given(small_families())
    @settings(max_examples=80)
    def test_matches_brute_force(self, fam):
        assert projection.lambda_exact(fam) == brute_lambda(fam)

    @given(small_families())
    @settings(max_examples=30)
    def test_kernels_agree(self, fam):
        wht = projection.lambda_exact(fam, kernel="wht")
        gray = projection.lambda_exact(fam, kernel="gray")
        assert wht == gray

    def test_result_is_exact_rational(self):
        lam = projection.lambda_exact(core.family_homogeneous(3, 2))
        assert lam == Fraction(3, 2)

    def test_full_family_is_one(self):
        for n in range(1, 9):
            assert projection.lambda_exact(core.family_full(n)) == 1

    def test_inactive_coordinates_ignored(self):
        # same two sets on a 40-dimensional cube: only 3 active coordinates
        fam = core.family_explicit(40, [[7, 31], [7, 40]])
        small = core.family_explicit(2, [[1], [2]])
        assert projection.lambda_exact(fam) == projection.lambda_exact(small)

    def test_blocked_kernel_agrees_with_direct(self, monkeypatch):
        fam = core.family_homogeneous(9, 2)
        want = projection.lambda_exact(fam)
        monkeypatch.setattr(projection, "_WHT_MAX_DIRECT", 5)
        assert projection.lambda_exact(fam) == want
        assert projection.lambda_exact(fam, threads=3) == want

    def test_enumeration_guard(self):
        fam = core.family_explicit(35, [[i] for i in range(1, 33)])
        with pytest.raises(core.SizeGuardError):
            projection.lambda_exact(fam)

    def test_max_n_override(self):
        fam = core.family_homogeneous(12, 2)
        with pytest.raises(core.SizeGuardError):
            projection.lambda_exact(fam, max_n=10)


class TestLambdaLevel:
    @given(st.integers(1, 10), st.data())
    @settings(max_examples=40)
    def test_agrees_with_enumeration(self, n, data):
        d = data.draw(st.integers(1, n))
        mode = data.draw(st.sampled_from(["exact-degree", "up-to-degree"]))
        fam_fn = (
            core.family_homogeneous if mode == "exact-degree" else core.family_upto
        )
        lev = projection.lambda_level_exact(n, d, mode)
        assert lev == projection.lambda_exact(fam_fn(n, d))

    def test_mode_aliases(self):
        a = projection.lambda_level_exact(8, 3, "exact")
        b = projection.lambda_level_exact(8, 3, "exact-degree")
        c = projection.lambda_level_exact(8, 3, "homogeneous")
        assert a == b == c
        u = projection.lambda_level_exact(8, 3, "upto")
        v = projection.lambda_level_exact(8, 3, "up-to-degree")
        assert u == v

    def test_unknown_mode(self):
        with pytest.raises(core.CubeError):
            projection.lambda_level_exact(8, 3, "sideways")

    def test_large_n_runs_fast(self):
        lam = projection.lambda_level_exact(2000, 1, "exact-degree")
        # singleton family of size 2000: E|sum of 2000 signs|
        want = Fraction(2000 * math.comb(1999, 999), 2**1999)
        assert lam == want

    def test_n_guard(self):
        with pytest.raises(core.SizeGuardError):
            projection.lambda_level_exact(projection.MAX_LEVEL_N + 1, 2)


class TestClosedForms:
    def test_gamma_formula_small(self):
        # lambda(l2^n) = (2/sqrt(pi)) Gamma((n+2)/2) / Gamma((n+1)/2)
        cf1 = projection.lambda_closed_forms(1)
        assert abs(cf1.l2 - 1.0) <= 1e-14
        cf2 = projection.lambda_closed_forms(2)
        assert abs(cf2.l2 - 4 / math.pi) <= 1e-14

    def test_l1_parity_relation(self):
        for n in range(1, 20):
            cf = projection.lambda_closed_forms(n)
            if n % 2 == 1:
                assert abs(cf.l1 - cf.l2) <= 1e-12 * cf.l2
            else:
                prev = projection.lambda_closed_forms(n - 1)
                assert abs(cf.l1 - prev.l2) <= 1e-12 * cf.l1

    def test_matches_exact_singletons(self):
        for n in range(1, 13):
            lam = float(projection.lambda_exact(core.family_homogeneous(n, 1)))
            cf = projection.lambda_closed_forms(n)
            assert abs(lam - cf.l1) <= 1e-12 * cf.l1


class TestHaagerup:
    def test_hand_values(self):
        assert projection.haagerup_lambda(1) == 1
        assert projection.haagerup_lambda(2) == 1
        assert projection.haagerup_lambda(3) == Fraction(3, 2)
        assert projection.haagerup_lambda(4) == Fraction(3, 2)
        assert projection.haagerup_lambda(5) == Fraction(15, 8)

    def test_equals_exact_singletons(self):
        for n in range(1, 15):
            fam = core.family_homogeneous(n, 1)
            assert projection.haagerup_lambda(n) == projection.lambda_exact(fam)

    def test_growth_ratio_tends_to_gaussian(self):
        # E|sum eps_i| / sqrt(n) -> sqrt(2/pi)
        v = float(projection.haagerup_lambda(4000)) / math.sqrt(4000)
        assert abs(v - math.sqrt(2 / math.pi)) <= 1e-3

    def test_guard(self):
        with pytest.raises(core.CubeError):
            projection.haagerup_lambda(0)


class TestMonteCarlo:
    def test_seed_and_thread_determinism(self):
        fam = core.family_homogeneous(12, 3)
        a = projection.lambda_mc(fam, samples=20000, seed=7, threads=1)
        b = projection.lambda_mc(fam, samples=20000, seed=7, threads=8)
        assert a == b
        c = projection.lambda_mc(fam, samples=20000, seed=8, threads=1)
        assert c.mean != a.mean

    def test_ci_covers_exact_value(self):
        fam = core.family_homogeneous(8, 2)
        exact = float(projection.lambda_exact(fam))
        est = projection.lambda_mc(fam, samples=40000, seed=42)
        assert est.ci95[0] <= exact <= est.ci95[1]
        assert est.stderr > 0

    def test_sample_guard(self):
        with pytest.raises(core.CubeError):
            projection.lambda_mc(core.family_full(3), samples=10)

    def test_works_beyond_enumeration_range(self):
        fam = core.family_homogeneous(40, 1)
        est = projection.lambda_mc(fam, samples=20000, seed=42)
        want = float(projection.haagerup_lambda(40))
        assert abs(est.mean - want) <= 5 * est.stderr


class TestPrimeReports:
    def test_small_prime_report(self):
        rep = projection.prime_singleton_report(10)
        assert rep.prime_count == 4
        assert rep.lam == Fraction(3, 2)

    def test_ratio_definition(self):
        rep = projection.prime_singleton_report(50)
        want = float(rep.lam) / math.sqrt(50 / math.log(50))
        assert abs(rep.ratio - want) <= 1e-12

    def test_guard(self):
        with pytest.raises(core.CubeError):
            projection.prime_singleton_report(2)

    def test_squarefree_cross_check(self):
        rep = projection.squarefree_mc(16, samples=20000, seed=42)
        assert rep.exact is not None
        assert rep.agrees_with_exact
        diff = abs(rep.estimate.mean - float(rep.exact))
        assert diff <= 4 * rep.estimate.stderr

    def test_squarefree_large_n_skips_exact(self):
        rep = projection.squarefree_mc(60, samples=5000, seed=42)
        assert rep.exact is None
        assert rep.agrees_with_exact is None

    def test_squarefree_guards(self):
        with pytest.raises(core.CubeError):
            projection.squarefree_mc(12, samples=5000)
        with pytest.raises(core.CubeError):
            projection.squarefree_mc(20, samples=10)
