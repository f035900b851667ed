import numpy as np
import pytest

from trotteropt.fitness import FitnessContext, evaluate
from trotteropt.model import ChainInstance, TermOrdering
from trotteropt.sampler import DEFAULT_SCALES, SamplingPlan, SamplingScheme, run_sampling
from trotteropt.trotter import CoefficientVector, DecompositionSpec, suzuki_seed

GROUPED = TermOrdering.grouped()


def plan_for(instance, scheme, scales, samples=20, k=2, r=4):
    return SamplingPlan(
        scheme=scheme,
        std_devs=tuple(scales),
        samples_per_scale=samples,
        spec=DecompositionSpec(k, r, GROUPED),
        instance=instance,
    )


@pytest.fixture(scope="module")
def small_instance():
    return ChainInstance.random(3, np.random.default_rng(11), seed=11)


class TestPlanValidation:
    def test_rejects_nonpositive_scale(self, small_instance):
        with pytest.raises(ValueError):
            plan_for(small_instance, SamplingScheme.AROUND_SUZUKI, [0.0])

    def test_rejects_zero_samples(self, small_instance):
        with pytest.raises(ValueError):
            plan_for(small_instance, SamplingScheme.AROUND_SUZUKI, [0.1], samples=0)

    def test_rejects_k1(self, small_instance):
        with pytest.raises(ValueError):
            plan_for(small_instance, SamplingScheme.AROUND_SUZUKI, [0.1], k=1)

    def test_default_scales_span_decades(self):
        assert DEFAULT_SCALES[0] == 1e-9
        assert DEFAULT_SCALES[-1] == 1.0
        assert len(DEFAULT_SCALES) == 10


class TestRunSampling:
    def test_degenerate_scale_reproduces_center_fitness(self, small_instance):
        # At scale 1e-300 the draws round to the centre exactly.
        plan = plan_for(small_instance, SamplingScheme.AROUND_SUZUKI, [1e-300], samples=5)
        (row,) = run_sampling(plan, 0)
        ctx = FitnessContext.create(small_instance, plan.spec)
        seed_fit = evaluate(ctx, suzuki_seed(2))
        assert row.mean_fitness == seed_fit
        assert row.min_fitness == row.max_fitness == seed_fit

    def test_all_fitness_in_range(self, small_instance):
        plan = plan_for(small_instance, SamplingScheme.AROUND_UNIFORM, [1e-4, 1e-2, 1.0], samples=30)
        for row in run_sampling(plan, 1):
            assert 0.0 <= row.min_fitness <= row.mean_fitness <= row.max_fitness <= 2.0 + 1e-12

    def test_deterministic(self, small_instance):
        plan = plan_for(small_instance, SamplingScheme.AROUND_SUZUKI, [1e-6, 1e-3], samples=10)
        a = run_sampling(plan, 42)
        b = run_sampling(plan, 42)
        assert a == b

    def test_suzuki_neighbourhood_degrades_with_scale(self, small_instance):
        plan = plan_for(
            small_instance, SamplingScheme.AROUND_SUZUKI, [1e-8, 1e-6, 1e-4, 1e-2], samples=40
        )
        rows = run_sampling(plan, 7)
        means = [row.mean_fitness for row in rows]
        # Non-decreasing on average: the seed sits in a locally good region.
        assert means[-1] > means[0]
        assert np.mean(np.diff(means) >= 0) >= 0.5

    def test_uniform_center_value(self, small_instance):
        # Centre of the around-uniform scheme is 1/d per component (0.2 at k=2);
        # at that exact point the decomposition equals plain second-order
        # slicing with 5r slices.
        spec = DecompositionSpec(2, 4, GROUPED)
        ctx = FitnessContext.create(small_instance, spec)
        center_fit = evaluate(ctx, CoefficientVector(2, (0.2,) * 5))
        plain_spec = DecompositionSpec(1, 20, GROUPED)
        plain_ctx = FitnessContext.create(small_instance, plain_spec)
        plain_fit = evaluate(plain_ctx, suzuki_seed(1))
        assert center_fit == pytest.approx(plain_fit, abs=1e-12)


@pytest.mark.slow
class TestFullScale:
    def test_large_scale_uniform_sampling_is_near_worst(self):
        inst = ChainInstance.random(5, np.random.default_rng(12), seed=12)
        plan = SamplingPlan(
            scheme=SamplingScheme.AROUND_UNIFORM,
            std_devs=(1.0,),
            samples_per_scale=100,
            spec=DecompositionSpec(2, 125, GROUPED),
            instance=inst,
        )
        (row,) = run_sampling(plan, 3)
        assert abs(row.mean_fitness - 2.0) <= 0.2
