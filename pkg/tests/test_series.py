import random
import pytest
from hypothesis import given, settings, strategies as st

from novikov_cone.cones import FormFamily
from novikov_cone.errors import (InvalidTwistData, NegativeIndexError, NonUnimodularFamily,
                                 OrderMismatch, ZeroVectorError)
from novikov_cone.series import (GroupRingElement, TruncatedSeries, TwistData, bounded_support,
                                 height, in_minus_completion, j_n_project, jn_kernel_dimension,
                                 mul_truncated, normal_order, reduce_mod_ideal,
                                 to_dual_coordinates, twisted_mul_truncated, validate_twist)

from twists import random_series, random_twist


def S(k, n, terms):
    return TruncatedSeries(k, n, terms)


# --- group ring elements -----------------------------------------------------

def test_height_examples():
    assert height(GroupRingElement({(0, 0): 1}), (3, 5)) == 0
    assert height(GroupRingElement({(1, 1): 1}), (-1, -2)) == -3
    assert height(GroupRingElement({(1, 0): 1, (0, 1): 1}), (-1, 2)) == 2
    with pytest.raises(ZeroVectorError):
        height(GroupRingElement({}, 2), (1, 1))


def test_dual_coordinates_examples():
    g = FormFamily([[-1, 0], [0, -1]])
    assert to_dual_coordinates(GroupRingElement({(0, 0): 1}), g).member
    view = to_dual_coordinates(GroupRingElement({(2, 1): 1}), g)
    assert view.terms == {(2, 1): 1} and view.member
    view = to_dual_coordinates(GroupRingElement({(-1, 3): 1}), g)
    assert view.terms == {(-1, 3): 1} and not view.member
    shift, power = view.laurent_split()
    assert shift == (-1, 0) and power == {(0, 3): 1}
    with pytest.raises(NonUnimodularFamily):
        to_dual_coordinates(GroupRingElement({(0, 0): 1}), FormFamily([[-2, 0], [0, -1]]))


def _unimodular_forms(rng, k):
    m = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(3 * k):
        i, j = rng.sample(range(k), 2)
        c = rng.choice([-1, 1, 2])
        m[i] = [a + c * b for a, b in zip(m[i], m[j])]
    return FormFamily(m)


def test_membership_coherence():
    rng = random.Random(5)
    for _ in range(100):
        k = rng.randint(2, 3)
        g = _unimodular_forms(rng, k)
        lam = GroupRingElement({tuple(rng.randint(-3, 3) for _ in range(k)): 1
                                for _ in range(rng.randint(1, 4))})
        assert to_dual_coordinates(lam, g).member == in_minus_completion(lam, g)


def test_non_admissible_membership_is_only_the_origin():
    g = FormFamily([[1], [-1]])
    members = [i for i in range(-5, 6) if in_minus_completion(GroupRingElement({(i,): 1}), g)]
    assert members == [0]


# --- truncation and commutative products ------------------------------------

def test_reduce_mod_ideal_examples():
    assert reduce_mod_ideal({(0, 0): 1, (1, 1): 1}, 1) == S(2, 1, {(0, 0): 1})
    assert not reduce_mod_ideal({(3, 1): 1}, 1)
    x = {(3, 0): 1, (1, 2): 1}
    assert reduce_mod_ideal(x, 2) == S(2, 2, x)
    with pytest.raises(NegativeIndexError):
        reduce_mod_ideal({(-1, 0): 1}, 2)


def test_mul_truncated_examples():
    a = S(2, 1, {(0, 0): 1, (1, 0): 1})
    b = S(2, 1, {(0, 0): 1, (0, 1): 1})
    assert mul_truncated(a, b) == S(2, 1, {(0, 0): 1, (1, 0): 1, (0, 1): 1})
    x = S(2, 3, {(0, 2): 5, (4, 1): -2})
    assert mul_truncated(x, TruncatedSeries.one(2, 3)) == x
    n = 3
    assert not mul_truncated(S(2, n, {(n, 0): 1}), S(2, n, {(0, n): 1}))
    with pytest.raises(OrderMismatch):
        mul_truncated(S(2, 2, {}), S(2, 3, {}))


def test_support_stays_in_s_n():
    rng = random.Random(2)
    for _ in range(50):
        k, n = rng.randint(1, 3), rng.randint(1, 4)
        a, b = random_series(rng, k, n), random_series(rng, k, n)
        assert all(min(i) < n for i in mul_truncated(a, b).terms)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.randoms(use_true_random=False))
def test_commutative_ring_axioms(k, n, rnd):
    a, b, c = (random_series(rnd, k, n) for _ in range(3))
    one = TruncatedSeries.one(k, n)
    assert mul_truncated(mul_truncated(a, b), c) == mul_truncated(a, mul_truncated(b, c))
    assert mul_truncated(a, b + c) == mul_truncated(a, b) + mul_truncated(a, c)
    assert mul_truncated(a, b) == mul_truncated(b, a)
    assert mul_truncated(one, a) == a


# --- twisted products --------------------------------------------------------

def _s(*exps, m=1):
    return GroupRingElement({tuple(exps): 1}, m)


def test_twisted_inversion_example():
    tw = TwistData(1, [[[-1]]])
    x = TruncatedSeries(1, 3, {(1,): _s(1)}, 1)
    assert twisted_mul_truncated(x, x, tw) == TruncatedSeries(1, 3, {(2,): 1}, 1)


def test_twisted_unit():
    tw = TwistData(1, [[[-1]]])
    x = TruncatedSeries(1, 4, {(0,): _s(2), (2,): _s(-1)}, 1)
    one = TruncatedSeries.one(1, 4, 1)
    assert twisted_mul_truncated(one, x, tw) == x
    assert twisted_mul_truncated(x, one, tw) == x


def test_commutator_rewrite():
    # tau_1 tau_2 = s tau_2 tau_1, so tau_2 tau_1 = s^-1 tau_1 tau_2
    comm = [[(1, (0,)), (1, (1,))], [(1, (-1,)), (1, (0,))]]
    tw = TwistData(1, [[[1]], [[1]]], comm)
    sign, h, idx = normal_order(tw, (1, 0))
    assert (sign, h, idx) == (1, (-1,), (1, 1))
    a = TruncatedSeries(2, 2, {(0, 1): 1}, 1)
    b = TruncatedSeries(2, 2, {(1, 0): 1}, 1)
    assert twisted_mul_truncated(a, b, tw) == TruncatedSeries(2, 2, {(1, 1): _s(-1)}, 1)


def _rewrite_oracle(tw, word):
    """Normal form of a word in the tau's by exhaustive adjacent swaps, tracking
    the accumulated coefficient as an element of Z[H] (sigma applied on the left)."""
    coeff = GroupRingElement({(0,) * tw.m: 1}, tw.m)
    word = list(word)
    changed = True
    while changed:
        changed = False
        for p in range(len(word) - 1):
            i, j = word[p], word[p + 1]
            if i > j:
                sign, h = tw.comm[i][j]
                unit = GroupRingElement({h: sign}, tw.m)
                # move the unit through the prefix tau_{w_0} ... tau_{w_{p-1}}
                for q in reversed(word[:p]):
                    unit = unit.act(tw.sigma_matrix(q))
                coeff = coeff * unit
                word[p], word[p + 1] = j, i
                changed = True
                break
    return coeff, tuple(word)


def test_normal_order_matches_rewrite_oracle():
    rng = random.Random(9)
    for _ in range(40):
        tw = random_twist(rng, rng.randint(2, 3), rng.randint(1, 2))
        word = tuple(rng.randrange(tw.k) for _ in range(rng.randint(2, 5)))
        sign, h, idx = normal_order(tw, word)
        coeff, sorted_word = _rewrite_oracle(tw, word)
        assert coeff == GroupRingElement({h: sign}, tw.m)
        assert idx == tuple(sorted_word.count(i) for i in range(tw.k))


def test_validate_twist_examples():
    assert validate_twist(TwistData.trivial(2, 1))
    for s in ([[1]], [[-1]]):
        assert validate_twist(TwistData(1, [s]))
    assert validate_twist(TwistData(2, [[[2, 1], [1, 1]]]))
    bad = TwistData(2, [[[1, 1], [0, 1]], [[1, 0], [1, 1]]])
    assert not validate_twist(bad)
    a = TruncatedSeries(2, 2, {(0, 0): 1}, 2)
    with pytest.raises(InvalidTwistData):
        twisted_mul_truncated(a, a, bad)


def test_twist_data_shape_errors():
    with pytest.raises(InvalidTwistData):
        TwistData(2, [[[1]]])
    with pytest.raises(InvalidTwistData):
        TwistData(1, [[[1]]], [[(2, (0,))]])


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_twisted_ring_axioms(rnd):
    k, m, n = rnd.randint(1, 3), rnd.randint(1, 2), rnd.randint(1, 4)
    tw = random_twist(rnd, k, m)
    a, b, c = (random_series(rnd, k, n, m) for _ in range(3))
    mul = lambda x, y: twisted_mul_truncated(x, y, tw)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, b + c) == mul(a, b) + mul(a, c)
    assert mul(a + b, c) == mul(a, c) + mul(b, c)


# --- projections -------------------------------------------------------------

def test_j_n_project_examples():
    x = S(2, 1, {(5, 0): 1})
    assert not j_n_project(x, 0)
    assert j_n_project(x, 1).coefficients == {0: {(5,): 1}}
    one = TruncatedSeries.one(2, 1)
    assert j_n_project(one, 0) and j_n_project(one, 1)
    y = S(2, 1, {(1, 1): 1})
    assert not j_n_project(y, 0) and not j_n_project(y, 1)


def test_projections_detect_every_nonzero_element():
    rng = random.Random(4)
    for _ in range(200):
        k, n = rng.randint(1, 3), rng.randint(1, 4)
        x = random_series(rng, k, n)
        if x:
            assert any(j_n_project(x, i) for i in range(k))


@pytest.mark.parametrize("k,n,bound", [(1, 1, 3), (2, 1, 3), (2, 2, 4), (3, 2, 3), (3, 1, 2)])
def test_jn_kernel_is_zero(k, n, bound):
    assert jn_kernel_dimension(k, n, bounded_support(k, n, bound)) == 0


def test_jn_kernel_oracle_sees_monomials_outside_s_n():
    # a monomial with every exponent >= n is killed by all projections
    assert jn_kernel_dimension(2, 1, [(1, 1)]) == 1
