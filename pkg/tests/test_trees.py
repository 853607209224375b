"""Complete-tree counting, label-probability bounds, family-tree ancestry."""

import math
import random
from fractions import Fraction

import pytest

from ealab import (BitString, CompleteTreeSpec, ConfigError, EaConfig,
                   MultiOptOneMax, OneMax, build_complete_tree,
                   count_at_distance, p_opt, q_opt_bound, q_opt_bound_exact,
                   simulate_family_tree, total_nodes, verify_p_opt)

import oracles


class TestCounting:
    def test_closed_form(self):
        assert count_at_distance(3, 2, 0) == 1
        assert count_at_distance(3, 2, 2) == 12
        assert count_at_distance(3, 2, 5) == 0
        assert total_nodes(0, 7) == 1

    def test_counts_partition_the_tree(self):
        for t, lam in ((0, 1), (3, 2), (5, 3), (10, 2)):
            assert sum(count_at_distance(t, lam, ell)
                       for ell in range(t + 1)) == total_nodes(t, lam)

    def test_validation(self):
        with pytest.raises(ConfigError):
            count_at_distance(3, 2, -1)
        with pytest.raises(ConfigError):
            count_at_distance(-1, 2, 0)
        with pytest.raises(ConfigError):
            count_at_distance(3, 0, 1)


class TestExplicitBuild:
    def test_census_matches_closed_form(self):
        for t, lam in ((0, 2), (1, 3), (2, 2), (3, 2), (4, 4)):
            tree = build_complete_tree(CompleteTreeSpec(t, lam, n=4))
            census = tree.census()
            assert len(tree) == total_nodes(t, lam)
            for ell in range(t + 1):
                assert census.get(ell, 0) == count_at_distance(t, lam, ell)

    def test_idents_are_unique_and_rooted(self):
        tree = build_complete_tree(CompleteTreeSpec(3, 2, n=4))
        assert tree.idents[0] == ()
        assert len(set(tree.idents)) == len(tree)

    def test_size_guard(self):
        with pytest.raises(ConfigError):
            CompleteTreeSpec(20, 3, n=4).validate()

    def test_label_guard_scales_with_n(self):
        spec = CompleteTreeSpec(5, 3, n=2000, root_label=BitString.zeros(2000))
        with pytest.raises(ConfigError):
            spec.validate()
        CompleteTreeSpec(5, 3, n=20, root_label=BitString.zeros(20)).validate()

    def test_labeled_build(self):
        root = BitString.from_string("1010")
        spec = CompleteTreeSpec(2, 2, n=4, root_label=root)
        tree = build_complete_tree(spec, rng=random.Random(3))
        assert tree.labels is not None
        assert len(tree.labels) == len(tree)
        assert tree.labels[0] == root.mask
        assert all(0 <= m < 16 for m in tree.labels)

    def test_unlabeled_build_has_no_labels(self):
        tree = build_complete_tree(CompleteTreeSpec(2, 2, n=4))
        assert tree.labels is None


class TestPOpt:
    def test_values(self):
        assert p_opt(1, 8) == pytest.approx((1 / 7) ** 2)
        assert p_opt(0, 8) == 0.0
        assert p_opt(7, 8) == 1.0
        assert p_opt(50, 8) == 1.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            p_opt(-1, 8)
        with pytest.raises(ConfigError):
            p_opt(1, 1)

    def test_monte_carlo_single_mutation(self):
        root = BitString.zeros(8)
        target = BitString.from_string("11110000")
        check = verify_p_opt(root, target, 1, 10 ** 6, random.Random(404))
        rate = oracles.exact_hit_rate_one_mutation(8, 4)
        noise = 3 * math.sqrt(rate * (1 - rate) / 10 ** 6)
        assert abs(check.empirical - rate) <= noise
        assert check.empirical <= check.bound
        assert check.within

    def test_zero_mutations_never_hit(self):
        root = BitString.zeros(8)
        target = BitString.ones(8)
        check = verify_p_opt(root, target, 0, 1000, random.Random(1))
        assert check.hits == 0
        assert check.bound == 0.0
        assert check.within

    def test_premise_enforced(self):
        root = BitString.zeros(12)
        near = BitString.from_string("110000000000")
        far = BitString.from_string("111000000000")
        verify_p_opt(root, far, 1, 10, random.Random(0))  # distance 3 = n/4
        with pytest.raises(ConfigError):
            verify_p_opt(root, near, 1, 10, random.Random(0))

    def test_length_mismatch(self):
        with pytest.raises(ConfigError):
            verify_p_opt(BitString.zeros(8), BitString.ones(12), 1, 10,
                         random.Random(0))


class TestQOpt:
    def test_empty_horizon(self):
        b = q_opt_bound(0, 8, 2, 2)
        assert (b.raw, b.clamped) == (0.0, 0.0)

    @pytest.mark.parametrize("t,n,mu,lam", [(6, 8, 2, 5), (4, 12, 3, 3)])
    def test_log_space_matches_exact_rationals(self, t, n, mu, lam):
        raw = q_opt_bound(t, n, mu, lam).raw
        exact = q_opt_bound_exact(t, n, mu, lam)
        assert raw == pytest.approx(float(exact), rel=1e-9)

    def test_equal_counts_direct_sum(self):
        t, n, mu = 5, 8, 3
        direct = mu * sum(math.comb(t, ell) * p_opt(ell, n)
                          for ell in range(1, t + 1))
        assert q_opt_bound(t, n, mu, mu).raw == pytest.approx(direct, rel=1e-12)

    def test_monotone_in_horizon(self):
        raws = [q_opt_bound(t, 16, 2, 4).raw for t in range(8)]
        assert all(a <= b for a, b in zip(raws, raws[1:]))

    def test_tiny_for_short_horizons(self):
        # four iterations of a (1+1) process on n = 100: every summand is
        # below 2^-25, so the whole failure bound is
        t, n = 4, 100
        for ell in range(1, t + 1):
            assert math.comb(t, ell) * (ell / (n - 1)) ** (n / 4) <= 2.0 ** -25
        b = q_opt_bound(t, n, 1, 1)
        assert b.raw <= 4 * 2.0 ** -25
        assert b.clamped == b.raw

    def test_exact_needs_divisible_length(self):
        with pytest.raises(ConfigError):
            q_opt_bound_exact(4, 10, 1, 1)

    def test_validation(self):
        with pytest.raises(ConfigError):
            q_opt_bound(-1, 8, 1, 1)
        with pytest.raises(ConfigError):
            q_opt_bound(4, 1, 1, 1)


class TestFamilyTree:
    def test_initial_optimum(self):
        res = simulate_family_tree(EaConfig(6, 3, 3, seed=2), MultiOptOneMax(6, k=6))
        assert res.iterations == 0
        assert res.hit_optimum
        assert res.depth_counts == ({0: 3},)

    def test_budget_bound_shape(self):
        cfg = EaConfig(50, 2, 2, seed=5, max_iterations=5)
        res = simulate_family_tree(cfg, OneMax(50))
        assert not res.hit_optimum
        assert res.iterations == 5
        assert len(res.depth_counts) == 6
        assert all(sum(c.values()) == 2 for c in res.depth_counts)

    def test_depth_cannot_exceed_iteration(self):
        cfg = EaConfig(30, 4, 6, seed=9, max_iterations=50)
        res = simulate_family_tree(cfg, OneMax(30))
        for k, depth in enumerate(res.max_depths()):
            assert depth <= k

    def test_population_fits_inside_complete_trees(self):
        # after k iterations, members at depth d cannot outnumber the depth-d
        # slots of mu complete trees of height k
        mu, lam = 8, 8
        for rep in range(100):
            cfg = EaConfig(50, mu, lam, seed=1000 + rep, max_iterations=100)
            res = simulate_family_tree(cfg, OneMax(50))
            for k, counts in enumerate(res.depth_counts):
                for d, c in counts.items():
                    assert c <= mu * count_at_distance(k, lam, d)
