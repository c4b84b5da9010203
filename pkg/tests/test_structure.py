import math

import numpy as np
import pytest

from conftest import make_model, make_rule, random_spd
from rclass.config import HyperParams
from rclass.structure import (ADAPT, GROW, RESERVE, ClassPotentialState,
                              DQEvaluator, DQState, adapt_winner,
                              bhattacharyya_overlap, consequent_similarity,
                              ds_check, ers_update_and_prune, forgetting_update,
                              grow_decision, init_new_rule, merge_check,
                              merge_rules, merged_volume_hypothesis,
                              plan_new_rule, pplus_prune, pplus_update,
                              recall_check, recall_rule, rule_volume,
                              split_check_and_split, PRUNE_STREAK)


class TestRuleVolume:
    def test_unit_disk(self):
        rule = make_rule([0.0, 0.0], inv_cov=np.eye(2))
        assert rule_volume(rule) == pytest.approx(np.pi)

    def test_one_dim_variance_four(self):
        rule = make_rule([0.0], inv_cov=np.array([[0.25]]))
        assert rule_volume(rule) == pytest.approx(4.0)

    def test_scaling_homogeneity(self, rng):
        s = random_spd(rng, 3)
        base = make_rule(np.zeros(3), inv_cov=s)
        scaled = make_rule(np.zeros(3), inv_cov=s / 4.0)  # covariance x4 = k^2 with k=2
        assert rule_volume(scaled) == pytest.approx(rule_volume(base) * 2 ** 3)

    def test_monotone_in_eigenvalues(self):
        grownth = make_rule([0.0, 0.0], inv_cov=np.diag([1.0, 0.5]))
        base = make_rule([0.0, 0.0], inv_cov=np.diag([1.0, 1.0]))
        assert rule_volume(grownth) > rule_volume(base)


class TestDsCheck:
    def test_empty_model_true(self):
        assert ds_check(make_model([]), 0.0)

    def test_equal_volume_inclusive(self):
        rule = make_rule([0.0, 0.0])
        model = make_model([rule])
        assert ds_check(model, rule_volume(rule))

    def test_smaller_fails(self):
        rule = make_rule([0.0, 0.0])
        model = make_model([rule])
        assert not ds_check(model, 0.5 * rule_volume(rule))


class TestDQ:
    def test_first_sample_is_one(self):
        state = DQState.fresh(2)
        dq, _ = state.commit(np.array([0.3, 0.4]), np.eye(2))
        assert dq == 1.0

    def test_identical_samples_at_origin_stay_one(self):
        state = DQState.fresh(2)
        for _ in range(10):
            dq, _ = state.commit(np.zeros(2), np.eye(2))
            assert dq == pytest.approx(1.0)

    def test_constant_nonzero_point_converges_to_one(self):
        state = DQState.fresh(2)
        x = np.array([0.4, 0.6])
        values = [state.commit(x, np.eye(2))[0] for _ in range(300)]
        assert values[-1] > 0.95
        assert values[-1] > values[2]

    def test_replay_matches_incremental(self, rng):
        # from-scratch oracle: replay the recorded inputs through a fresh
        # recursion and compare every accumulator
        state = DQState.fresh(2)
        inputs = []
        for _ in range(20):
            x = rng.uniform(0, 1, 2)
            s = random_spd(rng, 2)
            inputs.append((x, s))
            state.commit(x, s)
        fresh = DQState.fresh(2)
        for x, s in inputs:
            fresh.commit(x, s)
        assert fresh.u_acc == pytest.approx(state.u_acc, rel=1e-10)
        assert fresh.c_acc == pytest.approx(state.c_acc, rel=1e-10)
        np.testing.assert_allclose(fresh.alpha_acc, state.alpha_acc, rtol=1e-10)
        assert fresh.prev_dq == pytest.approx(state.prev_dq, rel=1e-10)

    def test_nonpositive_radicand_clamps_to_zero(self):
        evaluator = DQEvaluator(u_acc=1.0, alpha_acc=np.array([50.0, 0.0]),
                                c_acc=0.0, dq_prev=1.0, inv_cov=np.eye(2))
        assert evaluator.at(np.array([1.0, 0.0])) == 0.0


class TestClassPotential:
    def test_no_history_is_zero(self):
        state = ClassPotentialState.fresh(2, 3)
        assert state.potential(np.array([0.5, 0.5]), 0) == 0.0

    def test_identical_history_maximal(self):
        state = ClassPotentialState.fresh(2, 2)
        x = np.array([0.3, 0.6])
        for _ in range(5):
            state.ingest(x, 0)
        for _ in range(5):
            state.ingest(np.array([0.9, 0.1]), 1)
        zeta = state.potentials(x)
        assert zeta[0] == pytest.approx(1.0)
        assert zeta[0] > zeta[1]

    def test_matches_batch_oracle(self, rng):
        # oracle: n / (n + sum of squared distances to past class samples)
        state = ClassPotentialState.fresh(3, 2)
        past = []
        for _ in range(12):
            x = rng.uniform(0, 1, 3)
            past.append(x)
            state.ingest(x, 0)
        q = rng.uniform(0, 1, 3)
        n = len(past)
        expected = math.sqrt(n / (n + sum(float((q - p) @ (q - p)) for p in past)))
        assert state.potential(q, 0) == pytest.approx(expected, rel=1e-12)

    def test_separated_classes_argmax(self, rng):
        state = ClassPotentialState.fresh(2, 2)
        mean0, mean1 = np.array([0.2, 0.2]), np.array([0.8, 0.8])
        for _ in range(30):
            state.ingest(mean0 + 0.02 * rng.standard_normal(2), 0)
            state.ingest(mean1 + 0.02 * rng.standard_normal(2), 1)
        zeta = state.potentials(mean0)
        assert int(np.argmax(zeta)) == 0


class TestPlacement:
    def test_first_rule_default_radius(self):
        model = make_model([], init_radius=0.5)
        placement = plan_new_rule(model, np.array([0.5, 0.5]), 0)
        assert placement.kind == "first"
        np.testing.assert_allclose(placement.centroid, [0.5, 0.5])
        np.testing.assert_allclose(placement.inv_cov(), np.diag([4.0, 4.0]))

    def test_non_overlap_spread_from_intra(self):
        # remote sample (tight existing rule): spread = fac * (x - c_intra)
        x = np.array([0.5, 0.5])
        rule = make_rule(x + np.array([1.0, 0.0]), inv_cov=10.0 * np.eye(2),
                         class_idx=0)
        model = make_model([rule], init_radius=0.5, overlap_factor_default=0.3,
                           dist_floor=0.01)
        placement = plan_new_rule(model, x, 0)
        assert placement.kind == "non_overlap"
        np.testing.assert_allclose(placement.centroid, x)
        assert placement.spread[0] == pytest.approx(0.3)       # |fac * (-1)|
        assert placement.inv_cov()[0, 0] == pytest.approx(1.0 / 0.3 ** 2)

    def test_class_overlap_hand_evaluated(self):
        # x inside a hostile region: centroid retreats from the inter-class
        # rule by 0.1 * (c_ie - x); spread = fac * (centroid - c_ie)
        x = np.array([0.5, 0.5])
        inter = make_rule([0.6, 0.5], class_idx=0)    # same spot, other class
        intra = make_rule([0.9, 0.5], class_idx=1)
        model = make_model([inter, intra], init_radius=1.0, dist_floor=0.001)
        # class history says class 0 owns this location
        for _ in range(10):
            model.class_potential.ingest(x, 0)
        for _ in range(10):
            model.class_potential.ingest(np.array([0.9, 0.5]), 1)
        placement = plan_new_rule(model, x, true_class=1)
        assert placement.kind == "class_overlap"
        expected_centroid = x - 0.1 * (inter.centroid - x)
        np.testing.assert_allclose(placement.centroid, expected_centroid)
        fac = np.linalg.norm(x - intra.centroid) / np.linalg.norm(x - inter.centroid)
        expected_spread = np.abs(fac * (expected_centroid - inter.centroid))
        np.testing.assert_allclose(placement.spread,
                                   np.maximum(expected_spread, 0.001))

    def test_rule_overlap_moves_off_sibling(self):
        x = np.array([0.5, 0.5])
        intra = make_rule([0.52, 0.5], class_idx=1)
        inter = make_rule([0.9, 0.5], class_idx=0)
        model = make_model([intra, inter], init_radius=1.0)
        for _ in range(10):
            model.class_potential.ingest(np.array([0.51, 0.5]), 1)
        placement = plan_new_rule(model, x, true_class=1)
        assert placement.kind == "rule_overlap"
        np.testing.assert_allclose(
            placement.centroid, x - 0.1 * (intra.centroid - inter.centroid))


class TestGrowDecision:
    def test_empty_model_grows(self):
        assert grow_decision(make_model([]), 1.0, 1.0, np.array([])) == GROW

    def test_ds_fail_reserves(self):
        rule = make_rule([0.0, 0.0])
        model = make_model([rule])
        assert grow_decision(model, 0.1 * rule_volume(rule), 0.5,
                             np.array([0.4])) == RESERVE

    def test_extremal_density_grows(self):
        rule = make_rule([0.0, 0.0])
        model = make_model([rule])
        vol = rule_volume(rule)
        assert grow_decision(model, vol, 0.9, np.array([0.5, 0.4])) == GROW
        assert grow_decision(model, vol, 0.1, np.array([0.5, 0.4])) == GROW

    def test_interior_covered_adapts(self):
        rule = make_rule([0.0, 0.0])
        model = make_model([rule])
        vol = rule_volume(rule)
        assert grow_decision(model, vol, 0.45, np.array([0.5, 0.4]),
                             covered=True) == ADAPT

    def test_interior_uncovered_reserves(self):
        rule = make_rule([0.0, 0.0])
        model = make_model([rule])
        vol = rule_volume(rule)
        assert grow_decision(model, vol, 0.45, np.array([0.5, 0.4]),
                             covered=False) == RESERVE


class TestInitNewRule:
    def test_first_rule_fields(self):
        model = make_model([], init_radius=0.5)
        placement = plan_new_rule(model, np.array([0.5, 0.5]), 2)
        rule = init_new_rule(model, placement, 2)
        assert rule.support == 1.0
        np.testing.assert_allclose(rule.class_support, [0, 0, 1, 0])
        np.testing.assert_allclose(rule.inv_cov, np.diag([4.0, 4.0]))
        assert rule.out_cov[0, 0] == pytest.approx(
            min(model.config.init_cov_scale, 1.0 / model.config.weight_decay))

    def test_copies_winner_consequent_and_mean_recurrence(self, rng):
        w = rng.standard_normal((4, 5))
        r1 = make_rule([0.2, 0.2], out_weights=w, rec=0.4)
        r2 = make_rule([0.8, 0.8], rec=0.8)
        model = make_model([r1, r2])
        placement = plan_new_rule(model, np.array([0.25, 0.25]), 1)
        rule = init_new_rule(model, placement, 1)
        np.testing.assert_array_equal(rule.out_weights, w)  # winner is r1
        np.testing.assert_allclose(rule.rec_weights, np.full(4, 0.6))


class TestAdaptWinner:
    def test_zero_displacement_scales_inverse(self):
        s = np.diag([2.0, 3.0])
        rule = make_rule([0.5, 0.5], inv_cov=s, support=3.0, class_idx=1)
        adapt_winner(rule, np.array([0.5, 0.5]), 1)
        alpha = 1.0 / 4.0
        np.testing.assert_allclose(rule.inv_cov, s / (1 - alpha), atol=1e-12)
        np.testing.assert_allclose(rule.centroid, [0.5, 0.5])
        assert rule.support == 4.0
        assert rule.class_support[1] == 4.0

    def test_mean_of_two_points(self):
        rule = make_rule([0.0], inv_cov=np.array([[1.0]]), support=1.0)
        adapt_winner(rule, np.array([1.0]), 0)
        assert rule.centroid[0] == pytest.approx(0.5)

    def test_shadow_covariance_oracle(self, rng):
        # maintain the forward covariance recursion and invert directly
        u = 3
        rule = make_rule(rng.uniform(0, 1, u), inv_cov=np.eye(u), n_classes=2,
                         support=1.0)
        shadow = np.linalg.inv(rule.inv_cov)
        for _ in range(100):
            x = rng.uniform(0, 1, u)
            n = rule.support
            alpha = 1.0 / (n + 1.0)
            centroid_new = rule.centroid + (x - rule.centroid) * alpha
            v = x - centroid_new
            shadow = (1 - alpha) * shadow + alpha * (1 - alpha) * np.outer(v, v)
            adapt_winner(rule, x, 0)
            direct = np.linalg.inv(shadow)
            err = np.abs(rule.inv_cov - direct).max() / np.abs(direct).max()
            assert err <= 1e-6


class TestSignificancePruning:
    def test_single_rule_never_pruned(self):
        rule = make_rule([0.0, 0.0])
        model = make_model([rule])
        for _ in range(50):
            assert ers_update_and_prune(model) == []
        assert model.n_rules == 1

    def test_identical_rules_not_pruned(self, rng):
        w = rng.standard_normal((4, 5))
        rules = [make_rule([0.0, 0.0], out_weights=w),
                 make_rule([0.0, 0.0], out_weights=w)]
        model = make_model(rules)
        for _ in range(40):
            assert ers_update_and_prune(model) == []

    def test_zeroed_consequent_pruned_after_decline(self, rng):
        strong = make_rule([0.0, 0.0], out_weights=np.ones((4, 5)))
        fading = make_rule([1.0, 1.0], out_weights=np.ones((4, 5)))
        model = make_model([strong, fading])
        for _ in range(15):     # build a healthy history
            ers_update_and_prune(model)
        fading.out_weights = np.zeros((4, 5))
        pruned = []
        for _ in range(PRUNE_STREAK + 2):
            pruned += ers_update_and_prune(model)
        assert pruned == [1]
        assert model.n_rules == 1 and len(model.archive) == 1


class TestPPlus:
    def test_centroid_samples_drive_to_one(self):
        rule = make_rule([0.5, 0.5])
        rule.pplus.value = 0.4
        values = [pplus_update(rule, np.array([0.5, 0.5])) for _ in range(200)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        assert values[-1] > 0.9

    def test_huge_distance_collapses(self):
        rule = make_rule([0.0, 0.0], inv_cov=1e6 * np.eye(2))
        for _ in range(5):
            value = pplus_update(rule, np.array([50.0, 50.0]))
        assert value < 1e-2

    def test_zero_start_is_absorbing(self):
        rule = make_rule([0.5, 0.5])
        rule.pplus.value = 0.0
        assert pplus_update(rule, np.array([0.5, 0.5])) == 0.0

    def test_pplus_prune_fires_on_relevance_crash(self):
        # plateau first (samples in the rule's region), then the region is
        # abandoned: relevance crashes through the history band and the
        # sustained breach prunes the rule
        stale = make_rule([0.0, 0.0], inv_cov=25.0 * np.eye(2))
        active = make_rule([2.0, 2.0], inv_cov=25.0 * np.eye(2))
        model = make_model([stale, active])
        for _ in range(40):
            for rule in model.rules:
                pplus_update(rule, np.array([0.05, -0.05]))
            assert pplus_prune(model) == []
        pruned = []
        for _ in range(60):
            for rule in model.rules:
                pplus_update(rule, np.array([2.0, 2.0]))
            pruned += pplus_prune(model)
            if pruned:
                break
        assert pruned == [0]
        assert len(model.archive) == 1


class TestRecall:
    def test_empty_archive(self):
        model = make_model([make_rule([0.0, 0.0])])
        assert recall_check(model, 0.5, np.array([0.4])) is None

    def test_below_live_density_stays_archived(self):
        model = make_model([make_rule([0.0, 0.0])])
        archived = make_rule([5.0, 5.0])
        archived.pplus.value = 0.3
        archived.pplus.prune_value = 0.1
        model.archive.append(archived)
        assert recall_check(model, 0.9, np.array([0.8])) is None

    def test_recovered_uncovered_rule_recalled_bit_exact(self):
        live = make_rule([0.0, 0.0])
        model = make_model([live])
        archived = make_rule([5.0, 5.0], out_weights=np.full((4, 5), 0.7))
        archived.pplus.value = 0.8
        archived.pplus.prune_value = 0.2
        model.archive.append(archived)
        idx = recall_check(model, 0.1, np.array([0.05]))
        assert idx == 0
        snapshot = (archived.centroid.copy(), archived.inv_cov.copy(),
                    archived.out_weights.copy(), archived.out_cov.copy())
        rule = recall_rule(model, idx)
        assert rule is archived
        np.testing.assert_array_equal(rule.centroid, snapshot[0])
        np.testing.assert_array_equal(rule.inv_cov, snapshot[1])
        np.testing.assert_array_equal(rule.out_weights, snapshot[2])
        np.testing.assert_array_equal(rule.out_cov, snapshot[3])
        assert model.archive == [] and model.n_rules == 2

    def test_unrecovered_rule_stays(self):
        model = make_model([make_rule([0.0, 0.0])])
        archived = make_rule([5.0, 5.0])
        archived.pplus.value = 0.5
        archived.pplus.prune_value = 0.5   # no recovery above prune level
        model.archive.append(archived)
        assert recall_check(model, 0.1, np.array([0.05])) is None

    def test_covered_rule_stays(self):
        live = make_rule([0.0, 0.0], inv_cov=0.01 * np.eye(2))  # broad
        model = make_model([live])
        archived = make_rule([1.0, 1.0])
        archived.pplus.value = 0.9
        archived.pplus.prune_value = 0.1
        model.archive.append(archived)
        assert recall_check(model, 0.1, np.array([0.05])) is None


class TestSplit:
    def test_no_split_below_tolerance(self):
        big = make_rule([0.0, 0.0], support=20.0)
        peer = make_rule([1.0, 1.0], support=20.0)
        model = make_model([big, peer], split_tolerance=0.8)
        assert not split_check_and_split(model, 0)

    def test_lone_fresh_rule_guarded(self):
        rule = make_rule([0.0, 0.0], support=1.0)
        model = make_model([rule], split_tolerance=0.8)
        assert not split_check_and_split(model, 0)

    def test_principal_axis_split(self):
        # covariance diag(4, 1): children at C +- [2, 0], supports halved
        winner = make_rule([0.5, 0.5], inv_cov=np.diag([0.25, 1.0]),
                           support=10.0, class_idx=1)
        tiny = make_rule([2.0, 2.0], inv_cov=100.0 * np.eye(2), support=10.0)
        model = make_model([winner, tiny], split_offset=1.0, split_tolerance=0.8)
        total_before = sum(r.support for r in model.rules)
        assert split_check_and_split(model, 0)
        assert model.n_rules == 3
        centers = sorted([model.rules[0].centroid[0], model.rules[2].centroid[0]])
        assert centers == pytest.approx([0.5 - 2.0, 0.5 + 2.0])
        assert model.rules[0].centroid[1] == pytest.approx(0.5)
        assert model.rules[0].support == pytest.approx(5.0)
        assert model.rules[2].support == pytest.approx(5.0)
        # support conserved by the split
        assert sum(r.support for r in model.rules) == pytest.approx(total_before)
        # fallback deflation: variance quartered along the split axis
        np.testing.assert_allclose(model.rules[0].inv_cov, np.diag([1.0, 1.0]),
                                   atol=1e-9)


class TestForgetting:
    def test_unchanged_relevance_noop(self):
        rule = make_rule([0.0, 0.0], support=10.0)
        rule.pplus.value = rule.pplus.prev_value = 0.5
        lam, trans = forgetting_update(rule)
        assert lam == pytest.approx(1.0)
        assert trans == 0.0
        assert rule.support == 10.0

    def test_drop_clamps_at_zero(self):
        rule = make_rule([0.0, 0.0], support=10.0)
        rule.pplus.prev_value = 0.5
        rule.pplus.value = 0.4        # relevance fell by 0.1
        lam, trans = forgetting_update(rule)
        assert lam == pytest.approx(1.01)
        assert trans == 0.0           # floored: support never grows
        assert rule.support == 10.0

    def test_rise_hits_decay_ceiling(self):
        rule = make_rule([0.0, 0.0], support=10.0, class_idx=2)
        rule.pplus.prev_value = 0.0
        rule.pplus.value = 1.0
        lam, trans = forgetting_update(rule)
        assert lam == pytest.approx(0.9)
        assert trans == pytest.approx(0.99)
        assert rule.support == pytest.approx(0.1)
        # class support scales with it (invariant: sums match)
        assert rule.class_support.sum() == pytest.approx(rule.support)


class TestMerge:
    def test_identical_rules_boundary_no_merge(self):
        a = make_rule([0.5, 0.5])
        b = make_rule([0.5, 0.5])
        model = make_model([a, b])
        assert bhattacharyya_overlap(a, b) == pytest.approx(0.0, abs=1e-12)
        ok, score = merge_check(model, 0, 1)
        assert not ok

    def test_far_apart_volume_explodes(self):
        a = make_rule([0.0, 0.0], support=5.0)
        b = make_rule([10.0, 0.0], support=5.0)
        model = make_model([a, b])
        bound = 2 * (rule_volume(a) + rule_volume(b))
        assert merged_volume_hypothesis(a, b) > bound
        ok, _ = merge_check(model, 0, 1)
        assert not ok

    def test_overlapping_rules_merge(self):
        a = make_rule([0.0, 0.0], support=6.0, class_idx=0)
        b = make_rule([1.0, 0.0], support=2.0, class_idx=1)
        model = make_model([a, b])
        score = bhattacharyya_overlap(a, b)
        assert score > 0.0
        bound = 2 * (rule_volume(a) + rule_volume(b))
        assert merged_volume_hypothesis(a, b) <= bound
        ok, got = merge_check(model, 0, 1)
        assert ok and got == pytest.approx(score)

    def test_merge_centroid_support_weighting(self):
        a = make_rule([0.0, 0.0], support=5.0, class_idx=0)
        b = make_rule([1.0, 0.0], support=5.0, class_idx=1)
        model = make_model([a, b])
        total = sum(r.support for r in model.rules)
        keep = merge_rules(model, 0, 1, overlap_score=0.1)
        merged = model.rules[keep]
        np.testing.assert_allclose(merged.centroid, [0.5, 0.0])
        assert merged.support == pytest.approx(total)
        assert model.n_rules == 1
        np.testing.assert_allclose(merged.class_support, [5.0, 5.0, 0.0, 0.0])

    def test_consequent_similarity_piecewise(self):
        assert consequent_similarity(0.0) == pytest.approx(1.0)
        assert consequent_similarity(np.pi / 2) == pytest.approx(0.0)
        assert consequent_similarity(np.pi) == pytest.approx(1.0)

    def test_orthogonal_consequents_keep_dominant(self, rng):
        w_a = np.zeros((4, 5))
        w_a[:, 1] = 1.0              # linear term along axis 1
        w_b = np.zeros((4, 5))
        w_b[:, 3] = 1.0              # orthogonal linear term
        a = make_rule([0.0, 0.0], support=6.0, out_weights=w_a)
        b = make_rule([1.0, 0.0], support=2.0, out_weights=w_b)
        model = make_model([a, b])
        keep = merge_rules(model, 0, 1, overlap_score=0.5)
        # angle pi/2 -> similarity 0 < score -> delta 0 -> dominant kept
        np.testing.assert_array_equal(model.rules[keep].out_weights, w_a)

    def test_parallel_consequents_participatory_step(self):
        w_a = np.zeros((4, 5))
        w_a[:, 1] = 2.0
        w_b = np.zeros((4, 5))
        w_b[:, 1] = 1.0              # parallel: angle 0, similarity 1
        a = make_rule([0.0, 0.0], support=6.0, out_weights=w_a)
        b = make_rule([0.5, 0.0], support=2.0, out_weights=w_b)
        model = make_model([a, b])
        keep = merge_rules(model, 0, 1, overlap_score=0.3)
        share = 6.0 / 8.0
        expected = w_a + share * 1.0 * (w_a - w_b)
        np.testing.assert_allclose(model.rules[keep].out_weights, expected)


class TestStructuralInvariants:
    def test_rule_invariants_after_stream(self, rng):
        from rclass.harness import FileOracle
        from rclass.learner import OnlineLearner
        from rclass.streams import gaussian_stream

        cfg = HyperParams(budget=0.6, init_radius=0.05, recurrent_init=1.0)
        learner = OnlineLearner(4, 4, cfg)
        oracle = FileOracle()
        for sample in gaussian_stream(400, seed=77, std=0.05):
            learner.process(sample, oracle)
            model = learner.model
            if model.rules:
                assert model.n_rules >= 1
            for rule in model.rules + model.archive:
                np.testing.assert_allclose(rule.inv_cov, rule.inv_cov.T,
                                           atol=1e-9)
                np.linalg.cholesky(rule.inv_cov)   # PD or raises
                assert rule.class_support.sum() == pytest.approx(rule.support,
                                                                 abs=1e-9)
                assert np.all(rule.rec_weights >= 0.0)
                assert np.all(rule.rec_weights <= 1.0)
        assert learner.model.n_rules >= 1
