from fractions import Fraction as F

import pytest

from contextuality.errors import (
    AlphabetMismatch,
    DuplicateOutcome,
    EmptyContext,
    InvalidPosition,
    NegativeWeight,
    NonBinaryAlphabet,
    NonNormalizedPmf,
    UnknownProperty,
    ValidationError,
)
from contextuality.examples import disjoint_support_system, pr_box
from contextuality.system import (
    Context,
    Pmf,
    Property,
    System,
    connection_of,
    consistency_report,
    expectation,
    marginal,
    product_expectation,
    validate_system,
)

PM = (1, -1)


def test_validate_2x2_system():
    sysd = pr_box()
    assert len(sysd.properties) == 4
    assert len(sysd.contexts) == 4
    assert [p.id for p in sysd.properties] == ["a1", "a2", "b1", "b2"]
    assert [c.id for c in sysd.contexts] == ["a1b1", "a1b2", "a2b1", "a2b2"]


def test_validate_rejects_non_normalized_bunch():
    with pytest.raises(NonNormalizedPmf):
        Pmf([PM], {(1,): F(49, 100), (-1,): F(1, 2)})


def test_validate_rejects_unknown_property():
    props = [Property("a1", PM), Property("a2", PM)]
    ctx = Context("c", ("a1", "a3"))
    uniform = Pmf([PM, PM], {(s, t): F(1, 4) for s in PM for t in PM})
    with pytest.raises(UnknownProperty):
        validate_system(props, [ctx], {"c": uniform})


def test_validate_rejects_negative_weight():
    with pytest.raises(NegativeWeight):
        Pmf([PM], {(1,): F(3, 2), (-1,): F(-1, 2)})


def test_validate_rejects_duplicate_outcome():
    with pytest.raises(DuplicateOutcome):
        Pmf([PM], [((1,), F(1, 2)), ((1,), F(1, 4)), ((-1,), F(1, 4))])


def test_validate_rejects_empty_context():
    with pytest.raises(EmptyContext):
        Context("c", ())


def test_validate_rejects_unused_property():
    props = [Property("a1", PM), Property("a2", PM)]
    ctx = Context("c", ("a1",))
    with pytest.raises(ValidationError):
        validate_system(props, [ctx], {"c": Pmf([PM], {(1,): F(1)})})


def test_validate_rejects_float_weights():
    with pytest.raises(ValidationError):
        Pmf([PM], {(1,): 0.5, (-1,): 0.5})


def test_bunch_alphabet_must_match_context():
    props = [Property("a1", PM), Property("a2", (0, 1))]
    ctx = Context("c", ("a1", "a2"))
    wrong = Pmf([PM, PM], {(s, t): F(1, 4) for s in PM for t in PM})
    with pytest.raises(AlphabetMismatch):
        validate_system(props, [ctx], {"c": wrong})


def test_marginal_symmetric_pair():
    pmf = Pmf([PM, PM], {(1, 1): F(1, 2), (-1, -1): F(1, 2)})
    assert marginal(pmf, [0]) == Pmf([PM], {(1,): F(1, 2), (-1,): F(1, 2)})


def test_marginal_point_mass():
    pmf = Pmf([PM, PM], {(1, -1): F(1)})
    assert marginal(pmf, [1]) == Pmf([PM], {(-1,): F(1)})


def test_marginal_forced():
    pmf = Pmf([PM, PM], {(1, 1): F(3, 4), (1, -1): F(1, 4)})
    assert marginal(pmf, [0]) == Pmf([PM], {(1,): F(1)})


def test_marginal_invalid_position():
    pmf = Pmf([PM, PM], {(1, 1): F(1)})
    with pytest.raises(InvalidPosition):
        marginal(pmf, [2])
    with pytest.raises(InvalidPosition):
        marginal(pmf, [])
    with pytest.raises(InvalidPosition):
        marginal(pmf, [0, 0])


def test_marginal_idempotent():
    pmf = Pmf([PM, PM, PM], {(1, 1, 1): F(1, 4), (1, -1, 1): F(1, 4),
                             (-1, 1, -1): F(1, 2)})
    once = pmf.marginal([0, 2])
    assert once.marginal([0, 1]) == once


def test_connection_disjoint_example_means():
    sysd = disjoint_support_system()
    conn = connection_of(sysd, "p1")
    assert conn.contexts == ("c1", "c2", "c3", "c4")
    assert [expectation(m) for m in conn.marginals] == [0, 0, 1, -1]
    conn2 = connection_of(sysd, "p2")
    assert [expectation(m) for m in conn2.marginals] == [0, 0, 1, -1]


def test_connection_pr_box_uniform():
    sysd = pr_box()
    conn = connection_of(sysd, "a1")
    assert len(conn.marginals) == 2
    assert conn.marginals[0] == conn.marginals[1]
    assert expectation(conn.marginals[0]) == 0


def test_connection_single_context():
    props = [Property("p", PM), Property("q", PM)]
    ctx = Context("c", ("p", "q"))
    uniform = Pmf([PM, PM], {(s, t): F(1, 4) for s in PM for t in PM})
    sysd = System(props, [ctx], {"c": uniform})
    conn = connection_of(sysd, "p")
    assert len(conn.marginals) == 1


def test_connection_unknown_property():
    with pytest.raises(UnknownProperty):
        connection_of(pr_box(), "nope")


def test_connection_marginals_rederivable():
    # re-marginalizing each bunch reproduces the reported connection
    for sysd in (pr_box(), disjoint_support_system()):
        for p in sysd.properties:
            conn = connection_of(sysd, p.id)
            for cid, marg in zip(conn.contexts, conn.marginals):
                ctx = sysd.context(cid)
                pos = ctx.properties.index(p.id)
                assert sysd.bunch(cid).marginal([pos]) == marg
                assert sum((w for _, w in marg.items()), F(0)) == 1


def test_consistency_pr_box():
    rep = consistency_report(pr_box())
    assert rep.consistent
    assert all(v == 0 for v in rep.max_tv.values())


def test_consistency_disjoint_example():
    rep = consistency_report(disjoint_support_system())
    assert not rep.consistent
    # point masses at +1 and -1 are at total variation distance 1
    assert rep.max_tv == {"p1": F(1), "p2": F(1)}


def test_consistency_single_context():
    props = [Property("p", PM)]
    sysd = System(props, [Context("c", ("p",))], {"c": Pmf([PM], {(1,): F(1)})})
    rep = consistency_report(sysd)
    assert rep.consistent
    assert rep.max_tv["p"] == 0


def test_consistency_flag_iff_all_tv_zero():
    for sysd in (pr_box(), disjoint_support_system()):
        rep = consistency_report(sysd)
        assert rep.consistent == all(v == 0 for v in rep.max_tv.values())


def test_expectation():
    assert expectation(Pmf([PM], {(1,): F(3, 4), (-1,): F(1, 4)})) == F(1, 2)


def test_product_expectation_perfect_correlation():
    pmf = Pmf([PM, PM], {(1, 1): F(1, 2), (-1, -1): F(1, 2)})
    assert product_expectation(pmf) == 1


def test_product_expectation_perfect_anticorrelation():
    pmf = Pmf([PM, PM], {(1, -1): F(1, 2), (-1, 1): F(1, 2)})
    assert product_expectation(pmf) == -1


def test_expectation_rejects_non_binary():
    with pytest.raises(NonBinaryAlphabet):
        expectation(Pmf([(0, 1, 2)], {(0,): F(1)}))
    with pytest.raises(NonBinaryAlphabet):
        product_expectation(Pmf([PM], {(1,): F(1)}))


def test_pmf_items_lexicographic():
    pmf = Pmf([PM, PM], {(s, t): F(1, 4) for s in PM for t in PM})
    assert [o for o, _ in pmf.items()] == [(1, 1), (1, -1), (-1, 1), (-1, -1)]
