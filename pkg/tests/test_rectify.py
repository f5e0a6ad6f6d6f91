"""Envelope oracle vs generative accumulation, reweighted duals, box pairs."""

import numpy as np
import pytest

from gaplab import (
    INF,
    DiscreteMeasure,
    box_infimum_pairs,
    diag_inf,
    discretize,
    envelope_matrix,
    generative_rectify,
    pointwise_dual_envelope,
    reweighted_dual_optimizer,
    sample_reweight_pair,
    truncate_cost,
)
from gaplab.catalog import diag_M, random_finite, rational_nullmod, trivial_zero
from gaplab.rectify import (
    FeasiblePair,
    RectifiedAccumulator,
    ReweightPair,
    dyadic_index_ranges,
)


def uniform(n):
    return DiscreteMeasure(np.full(n, 1.0 / n))


class TestPointwiseEnvelope:
    def test_corner_entry_reaches_above_neighbours(self):
        C = np.array([[0.0, 0.0], [0.0, 1.0]])
        assert pointwise_dual_envelope(C, uniform(2), uniform(2), 1, 1) == 1.0

    def test_disconnected_forbidden_pattern_is_unbounded(self):
        C = np.array([[INF, 0.0], [0.0, INF]])
        assert pointwise_dual_envelope(C, uniform(2), uniform(2), 0, 0) == INF

    def test_equals_cost_on_finite_instances(self):
        # every function on a finite full-support grid is already "closed":
        # the envelope reproduces the cost entry by entry
        for seed in (1, 2, 3):
            inst = random_finite(seed, 6)
            C, mu, nu = discretize(inst, 6)
            E = envelope_matrix(C, mu, nu)
            assert np.abs(E - C).max() <= 1e-7

    def test_diagonal_instance_envelope(self):
        C, mu, nu = discretize(diag_inf(), 4)
        E = envelope_matrix(C, mu, nu)
        fin = np.isfinite(C)
        assert np.abs(E[fin] - C[fin]).max() <= 1e-7
        assert np.all(np.isinf(E[~fin]))

    def test_requires_full_support(self):
        from gaplab.solver import InputError

        bad = DiscreteMeasure(np.array([1.0, 0.0]))
        with pytest.raises(InputError):
            pointwise_dual_envelope(np.zeros((2, 2)), bad, uniform(2), 0, 0)

    def test_invariant_under_full_support_reweighting(self):
        # the rectification depends on the marginals only through their null
        # sets; with full support there are none, so any reweighting ties
        C, mu, nu = discretize(random_finite(11, 4), 4)
        E1 = envelope_matrix(C, mu, nu)
        mu2 = mu.reweighted(np.array([0.4, 0.1, 0.3, 0.2]) * 4)
        nu2 = nu.reweighted(np.array([0.25, 0.25, 0.1, 0.4]) * 4)
        E2 = envelope_matrix(C, DiscreteMeasure(mu2.weights), DiscreteMeasure(nu2.weights))
        assert np.abs(E1 - E2).max() <= 1e-7

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_dominates_every_feasible_pair(self, seed):
        # 100 random feasible pairs per instance: start phi anywhere, tighten
        # psi to the largest feasible value; none may poke above the envelope
        rng = np.random.default_rng(seed)
        C = rng.uniform(0, 2, (3, 3))
        mu = nu = uniform(3)
        E = envelope_matrix(C, mu, nu)
        for _ in range(100):
            phi = rng.uniform(-2, 2, 3)
            psi = (C - phi[:, None]).min(axis=0)
            assert np.all(phi[:, None] + psi[None, :] <= E + 1e-9)


class TestReweightPairs:
    def test_all_ones_balanced_for_probability_marginals(self):
        mu = nu = uniform(4)
        pair = ReweightPair(np.ones(4), np.ones(4))
        assert pair.balance_error(mu, nu) <= 1e-10

    def test_scaling_restores_balance(self):
        mu = nu = uniform(2)
        f = np.array([1.0, 0.0])  # integral 1/2
        g = np.array([1.0, 1.0])  # integral 1
        If, Ig = f @ mu.weights, g @ nu.weights
        scaled = ReweightPair(f, g * (If / Ig))
        assert scaled.balance_error(mu, nu) <= 1e-10

    def test_sampled_pairs_respect_balance(self):
        mu = nu = uniform(6)
        for seed in range(10):
            pair = sample_reweight_pair(mu, nu, seed)
            assert pair.balance_error(mu, nu) <= 1e-10
            assert np.all(pair.f >= 0) and np.all(pair.f <= 1)
            assert np.all(pair.g >= 0) and np.all(pair.g <= 1)

    def test_deterministic_per_seed(self):
        mu = nu = uniform(5)
        p1 = sample_reweight_pair(mu, nu, 123)
        p2 = sample_reweight_pair(mu, nu, 123)
        assert np.array_equal(p1.f, p2.f) and np.array_equal(p1.g, p2.g)


class TestReweightedDual:
    def test_constant_cost_full_weights(self):
        C, mu, nu = discretize(rational_nullmod(), 4)
        fp = reweighted_dual_optimizer(C, mu, nu, ReweightPair(np.ones(4), np.ones(4)))
        assert fp.objective == pytest.approx(1.0, abs=1e-9)
        assert fp.feasibility_slack(C) <= 1e-9

    def test_zero_weights_give_zero_pair(self):
        C, mu, nu = discretize(trivial_zero(), 4)
        fp = reweighted_dual_optimizer(C, mu, nu, ReweightPair(np.zeros(4), np.zeros(4)))
        assert np.all(fp.phi == 0) and np.all(fp.psi == 0)

    def test_truncated_diagonal_recovers_finite_variant_value(self):
        C, mu, nu = discretize(diag_inf(), 4)
        fp = reweighted_dual_optimizer(
            truncate_cost(C, 2), mu, nu, ReweightPair(np.ones(4), np.ones(4))
        )
        assert fp.objective == pytest.approx(0.5, abs=1e-9)

    def test_rejects_unbounded_cost(self):
        from gaplab.solver import InputError

        C, mu, nu = discretize(diag_inf(), 4)
        with pytest.raises(InputError):
            reweighted_dual_optimizer(C, mu, nu, ReweightPair(np.ones(4), np.ones(4)))


class TestBoxPairs:
    def test_constant_cost_whole_grid_box(self):
        C = np.full((3, 3), 5.0)
        pairs = box_infimum_pairs(C, boxes=[((0, 3), (0, 3))])
        assert len(pairs) == 1
        assert np.allclose(pairs[0].tensor(), 5.0)

    def test_box_containing_zero_entries(self):
        C, _, _ = discretize(diag_inf(), 4)
        pairs = box_infimum_pairs(C, boxes=[((1, 4), (0, 3))])
        t = pairs[0].tensor()
        assert t[1:4, 0:3].max() == pytest.approx(0.0)

    def test_singleton_box_reaches_the_entry(self):
        C, _, _ = discretize(diag_inf(), 4)
        pairs = box_infimum_pairs(C, boxes=[((3, 4), (3, 4))])
        assert pairs[0].tensor()[3, 3] == pytest.approx(1.0)

    def test_every_pair_feasible(self):
        C, _, _ = discretize(diag_inf(), 4)
        for pair in box_infimum_pairs(C):
            assert pair.feasibility_slack(C) <= 1e-9

    def test_dyadic_ranges_cover_singletons(self):
        ranges = dyadic_index_ranges(6)
        assert (0, 6) in ranges
        assert all((i, i + 1) in ranges for i in range(6))


class TestGenerativeRectify:
    def test_zero_pair_floor(self):
        acc = generative_rectify(trivial_zero(), 4, budget=0, rng_seed=0)
        assert np.all(acc.lower_envelope >= 0.0)

    def test_constant_one_cost_saturates(self):
        acc = generative_rectify(rational_nullmod(), 4, budget=10, rng_seed=0)
        assert acc.sup_gap_finite() <= 1e-6

    def test_diagonal_budget_200(self):
        acc = generative_rectify(diag_inf(), 4, budget=200, rng_seed=42)
        C, mu, nu = discretize(diag_inf(), 4)
        fin = np.isfinite(C)
        assert acc.sup_gap_finite() <= 1e-6
        # forbidden entries end strictly above every finite cost value
        assert acc.lower_envelope[~fin].min() >= 2.0 - 1e-9

    def test_generative_never_exceeds_envelope_oracle(self):
        # minimality at every budget: the generative sup approaches the
        # entrywise envelope strictly from below
        inst = random_finite(5, 4)
        C, mu, nu = discretize(inst, 4)
        E = envelope_matrix(C, mu, nu)
        for budget in (0, 10, 50):
            acc = generative_rectify(inst, 4, budget=budget, rng_seed=5)
            assert np.all(acc.lower_envelope <= E + 1e-7)

    def test_monotone_in_accumulation(self):
        C, mu, nu = discretize(diag_M(2.0), 4)
        acc = RectifiedAccumulator(C)
        snapshots = []
        acc.add_pair(FeasiblePair(np.zeros(4), np.zeros(4), "zero_pair"))
        snapshots.append(acc.lower_envelope.copy())
        for pair in box_infimum_pairs(C)[:10]:
            acc.add_pair(pair)
            snapshots.append(acc.lower_envelope.copy())
        for before, after in zip(snapshots, snapshots[1:]):
            assert np.all(after >= before - 1e-15)

    def test_infeasible_pair_rejected(self):
        from gaplab.solver import InputError

        acc = RectifiedAccumulator(np.zeros((2, 2)))
        with pytest.raises(InputError):
            acc.add_pair(FeasiblePair(np.ones(2), np.ones(2), "user"))

    def test_provenance_log_lines(self):
        acc = generative_rectify(trivial_zero(), 2, budget=3, rng_seed=1)
        kinds = {prov.split("(")[0] for prov, _, _ in acc.log}
        assert kinds == {"zero_pair", "box_infimum", "reweighted_dual"}
        assert acc.pair_count == len(acc.log)
