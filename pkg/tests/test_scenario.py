from fractions import Fraction

from hypothesis import given, strategies as st

from tickcheck.model_ir import Distribution, load_model, parse_distribution
from tickcheck.scenario import REAL_DENOMINATOR, draw, sample_scenario, stream_seed

from conftest import FIXTURES

u64s = st.integers(0, 2 ** 64 - 1)
u32s = st.integers(0, 2 ** 32 - 1)


def test_same_seed_same_pins():
    m = load_model(FIXTURES / "random.mdl")
    a = sample_scenario(m, 20, 42, 3)
    b = sample_scenario(m, 20, 42, 3)
    assert a.pins == b.pins and a.stream_seed == b.stream_seed
    assert len(a.pins) == 20 * len(m.random_sources())


def test_runs_and_seeds_differ():
    m = load_model(FIXTURES / "random.mdl")
    base = sample_scenario(m, 20, 42, 0).pins
    assert sample_scenario(m, 20, 42, 1).pins != base
    assert sample_scenario(m, 20, 43, 0).pins != base
    assert stream_seed(1, 2) != stream_seed(2, 1)


def test_prefix_stable_across_bounds():
    m = load_model(FIXTURES / "random.mdl")
    short, long = sample_scenario(m, 5, 9, 0).pins, sample_scenario(m, 50, 9, 0).pins
    assert all(long[k] == v for k, v in short.items())


@given(u64s, u32s)
def test_draws_in_support(a, b):
    lo_hi = draw(parse_distribution("UniformInt(-2, 3)"), a, b)
    assert isinstance(lo_hi, int) and -2 <= lo_hi <= 3
    r = draw(parse_distribution("UniformReal(0, 1)"), a, b)
    assert isinstance(r, Fraction) and 0 <= r < 1 and (r * REAL_DENOMINATOR).denominator == 1
    assert draw(parse_distribution("Bernoulli(0.3)"), a, b) in (True, False)
    assert draw(parse_distribution("DiscreteChoice([1, 5, 9], [1, 2, 1])"), a, b) in (1, 5, 9)


def test_uniform_int_edges():
    d = Distribution("UniformInt", (0, 9))
    assert draw(d, 0, 0) == 0
    assert draw(d, 2 ** 64 - 1, 0) == 9


def test_bernoulli_frequency():
    m = load_model(FIXTURES / "prob_q20.mdl")
    fault = next(b for b in m.random_sources())
    hits = sum(sample_scenario(m, 1, 5, k).pins[(fault.id, 0)] for k in range(4000))
    assert abs(hits / 4000 - 0.2) < 0.03


def test_discrete_choice_weights():
    d = parse_distribution("DiscreteChoice([1, 5, 9], [1, 2, 1])")
    counts = {1: 0, 5: 0, 9: 0}
    for u in range(0, 2 ** 32, 2 ** 20):
        counts[draw(d, 0, u)] += 1
    assert counts == {1: 1024, 5: 2048, 9: 1024}
