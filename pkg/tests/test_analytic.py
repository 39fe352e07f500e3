import random
from fractions import Fraction as F

import pytest

from contextuality.analytic import (
    BinaryStats,
    MedianResult,
    bunch_set_distance,
    cyclic2_min_partial,
    delta0_cbd,
    delta0_present,
    delta_p,
    delta_p_via_lp,
    max_coupling_probability,
    median_binary,
    min_mismatch,
    per_context_min_delta,
    pmf_from_mean,
    tv_distance,
)
from contextuality.errors import (
    AlphabetMismatch,
    MeanOutOfRange,
    ShapeMismatch,
    UnrealizableStats,
)
from contextuality.examples import ab_system, disjoint_support_system, pr_box
from contextuality.oracle import SystemShape, random_pmf, random_system
from contextuality.system import Context, Pmf, Property, System

PM = (1, -1)


def joint_pmf(rho: F) -> Pmf:
    """Uniform-marginal joint over two +/-1 properties with correlation rho."""
    return BinaryStats(F(0), F(0), rho).to_pmf()


# ---------------------------------------------------------------------------
# max coupling / TV
# ---------------------------------------------------------------------------

def test_max_coupling_half_means():
    a, b = pmf_from_mean(F(1, 2)), pmf_from_mean(F(-1, 2))
    assert max_coupling_probability([a, b]) == F(1, 2)


def test_max_coupling_identical():
    a = pmf_from_mean(F(1, 3))
    assert max_coupling_probability([a, a]) == 1


def test_max_coupling_disjoint_supports():
    assert max_coupling_probability([pmf_from_mean(F(1)), pmf_from_mean(F(-1))]) == 0


def test_max_coupling_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        max_coupling_probability([pmf_from_mean(F(0)), Pmf([(0, 1)], {(0,): F(1)})])


def test_tv_examples():
    assert tv_distance(pmf_from_mean(F(1, 2)), pmf_from_mean(F(-1, 2))) == F(1, 2)
    a = pmf_from_mean(F(1, 7))
    assert tv_distance(a, a) == 0
    assert tv_distance(pmf_from_mean(F(1)), pmf_from_mean(F(-1))) == 1


def test_tv_is_one_minus_max_coupling():
    rng = random.Random(5)
    for _ in range(50):
        a = random_pmf(rng, [(0, 1, 2)])
        b = random_pmf(rng, [(0, 1, 2)])
        assert max_coupling_probability([a, b]) == 1 - tv_distance(a, b)
        assert tv_distance(a, b) == tv_distance(b, a)


def test_tv_binary_equals_half_mean_gap():
    rng = random.Random(6)
    for _ in range(100):
        m1 = F(rng.randint(-32, 32), 32)
        m2 = F(rng.randint(-32, 32), 32)
        assert tv_distance(pmf_from_mean(m1), pmf_from_mean(m2)) == abs(m1 - m2) / 2


# ---------------------------------------------------------------------------
# delta0 (both baselines)
# ---------------------------------------------------------------------------

def test_delta0_cbd_consistent_is_zero():
    assert delta0_cbd(pr_box()) == 0


def test_delta0_cbd_disjoint_example():
    assert delta0_cbd(disjoint_support_system()) == 2
    # coincides with the per-property floor on this system
    assert delta0_present(disjoint_support_system()) == 2


def test_delta0_cbd_single_marginal_gap():
    z = F(0)
    sysd = ab_system(2, 2, {
        (1, 1): BinaryStats(F(1, 2), z, z),
        (1, 2): BinaryStats(z, z, z),
        (2, 1): BinaryStats(z, z, z),
        (2, 2): BinaryStats(z, z, z),
    })
    assert delta0_cbd(sysd) == F(1, 4)


def test_delta0_present_disjoint():
    assert delta0_present(disjoint_support_system()) == 2


def test_delta0_present_consistent_zero():
    assert delta0_present(pr_box()) == 0


def test_delta0_formulas_agree_on_two_context_systems():
    # with every property in exactly two contexts, both baselines reduce to
    # half the absolute difference of the connection means
    for seed in range(25):
        sysd = random_system(SystemShape(2, 2, consistent=bool(seed % 2), seed=seed))
        assert delta0_present(sysd) == delta0_cbd(sysd)


# ---------------------------------------------------------------------------
# delta_p / median
# ---------------------------------------------------------------------------

def test_delta_p_disjoint_example():
    res = delta_p(disjoint_support_system(), "p1")
    assert res.value == 1
    assert isinstance(res.optimizer, MedianResult)
    assert (res.optimizer.lo, res.optimizer.hi) == (0, 0)


def test_delta_p_two_contexts_half_gap():
    rng = random.Random(7)
    for _ in range(20):
        m1 = F(rng.randint(-32, 32), 32)
        m2 = F(rng.randint(-32, 32), 32)
        sysd = _connection_system([m1, m2])
        res = delta_p(sysd, "p")
        assert res.value == abs(m1 - m2) / 2
        assert (res.optimizer.lo, res.optimizer.hi) == (min(m1, m2), max(m1, m2))


def test_delta_p_identical_marginals():
    sysd = _connection_system([F(1, 3)] * 3)
    assert delta_p(sysd, "p").value == 0


def test_delta_p_lp_matches_median_on_binary_connections():
    rng = random.Random(8)
    for _ in range(30):
        means = [F(rng.randint(-32, 32), 32) for _ in range(rng.randint(2, 5))]
        sysd = _connection_system(means)
        assert delta_p(sysd, "p").value == delta_p_via_lp(sysd, "p").value


def test_delta_p_general_alphabet_uses_lp():
    # three-symbol property: optimizer is a pmf, value matches hand count
    alpha = (0, 1, 2)
    contexts = [Context(f"c{i}", ("p",)) for i in range(2)]
    bunches = {
        "c0": Pmf([alpha], {(0,): F(1)}),
        "c1": Pmf([alpha], {(2,): F(1)}),
    }
    sysd = System([Property("p", alpha)], contexts, bunches)
    res = delta_p(sysd, "p")
    assert res.value == 1  # any q splits its mass between the two point masses
    assert isinstance(res.optimizer, Pmf)


def test_median_binary_examples():
    r = median_binary([F(0), F(0), F(1), F(-1)])
    assert (r.lo, r.hi, r.delta_p) == (0, 0, 1)
    r = median_binary([F(1, 2)])
    assert (r.lo, r.hi, r.delta_p) == (F(1, 2), F(1, 2), 0)
    r = median_binary([F(-1), F(1)])
    assert (r.lo, r.hi, r.delta_p) == (-1, 1, 1)
    assert r.midpoint == 0


def test_median_interval_attains_same_value():
    r = median_binary([F(-1), F(1)])
    for q in (F(-1), F(-1, 3), F(0), F(1, 2), F(1)):
        assert sum(abs(m - q) for m in (F(-1), F(1))) / 2 == r.delta_p


def test_median_rejects_out_of_range():
    with pytest.raises(MeanOutOfRange):
        median_binary([F(3, 2)])
    with pytest.raises(MeanOutOfRange):
        median_binary([])


# ---------------------------------------------------------------------------
# cyclic-2 and per-context minima
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("rho", [F(-1), F(-1, 2), F(0), F(1, 3), F(1)])
def test_cyclic2_against_perfect_correlation(rho):
    q = BinaryStats(F(0), F(0), rho)
    r = BinaryStats(F(0), F(0), F(1))
    assert cyclic2_min_partial(q, r) == abs(rho - 1) / 2


def test_cyclic2_identity():
    s = BinaryStats(F(1, 4), F(-1, 3), F(1, 5))
    assert cyclic2_min_partial(s, s) == 0


def test_cyclic2_point_mass_case():
    q = BinaryStats(F(0), F(0), F(0))
    r = BinaryStats(F(1), F(-1), F(-1))
    assert cyclic2_min_partial(q, r) == 1


def test_binary_stats_realizability():
    with pytest.raises(UnrealizableStats):
        BinaryStats(F(1), F(1), F(-1))  # both always +1 but anticorrelated
    with pytest.raises(MeanOutOfRange):
        BinaryStats(F(2), F(0), F(0))


def test_binary_stats_pmf_round_trip():
    s = BinaryStats(F(1, 4), F(-1, 2), F(1, 8))
    assert BinaryStats.from_pmf(s.to_pmf()) == s


def test_per_context_identity_coupling():
    sysd = disjoint_support_system()
    q = joint_pmf(F(1))  # identical to bunch c1
    assert per_context_min_delta(sysd, q, "c1") == 0


@pytest.mark.parametrize("rho", [F(-1), F(0), F(2, 3), F(1)])
def test_per_context_disjoint_example_values(rho):
    sysd = disjoint_support_system()
    q = joint_pmf(rho)
    # point-mass context: both marginal gaps are 1, dominating the correlation gap
    assert per_context_min_delta(sysd, q, "c3") == 1
    # perfectly correlated uniform context: only the correlation gap counts
    assert per_context_min_delta(sysd, q, "c1") == (1 - rho) / 2


def test_per_context_rejects_wrong_joint_shape():
    sysd = disjoint_support_system()
    with pytest.raises(ShapeMismatch):
        per_context_min_delta(sysd, pmf_from_mean(F(0)), "c1")


def test_per_context_lp_equals_closed_form():
    rng = random.Random(9)
    sysd = disjoint_support_system()
    for _ in range(20):
        q = random_pmf(rng, [PM, PM])
        for cid in ("c1", "c2", "c3", "c4"):
            fast = per_context_min_delta(sysd, q, cid)
            via_lp = per_context_min_delta(sysd, q, cid, force_lp=True)
            assert fast == via_lp


def test_min_mismatch_symmetry():
    rng = random.Random(10)
    for _ in range(20):
        a = random_pmf(rng, [PM, PM])
        b = random_pmf(rng, [PM, PM])
        assert min_mismatch(a, b) == min_mismatch(b, a)


def test_bunch_set_distance_is_a_metric():
    rng = random.Random(11)
    for trial in range(15):
        systems = [
            random_system(SystemShape(2, 2, consistent=False, seed=100 * trial + k))
            for k in range(3)
        ]
        a, b, c = systems
        dab = bunch_set_distance(a, b)
        dba = bunch_set_distance(b, a)
        dac = bunch_set_distance(a, c)
        dcb = bunch_set_distance(c, b)
        assert dab == dba >= 0
        assert dab <= dac + dcb  # triangle inequality
    # zero iff the bunch distributions coincide
    s = random_system(SystemShape(2, 2, consistent=False, seed=3))
    assert bunch_set_distance(s, s) == 0
    t = random_system(SystemShape(2, 2, consistent=False, seed=4))
    if any(s.bunch(c.id) != t.bunch(c.id) for c in s.contexts):
        assert bunch_set_distance(s, t) > 0


def _connection_system(means):
    contexts = [Context(f"c{i}", ("p",)) for i in range(len(means))]
    bunches = {f"c{i}": pmf_from_mean(m) for i, m in enumerate(means)}
    return System([Property("p", PM)], contexts, bunches)
