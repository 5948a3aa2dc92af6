"""Core arithmetic: cyclotomics, vanishing tests, multiset transforms, parsing."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectile import (
    DomainError,
    MaskMultiset,
    ParseError,
    cyclic_product,
    cyclotomic,
    difference_set,
    dilate,
    divisors,
    group,
    is_full_group_product,
    parse_multiset,
    restrict_class,
    vanishes_at,
    zero_set,
)
from spectile.zn import poly_divmod, poly_mul, poly_trim

import oracles


def mm(n, elems):
    return MaskMultiset.from_elements(n, elems)


# ---------------------------------------------------------------------------
# cyclotomic polynomials


def test_cyclotomic_base_case():
    assert cyclotomic(1).coeffs == (-1, 1)


def test_cyclotomic_4():
    assert cyclotomic(4).coeffs == (1, 0, 1)


def test_cyclotomic_12_against_naive_division():
    num = [0] * 13
    num[0], num[12] = -1, 1
    for e in (1, 2, 3, 4, 6):
        num = oracles.naive_divide(num, list(cyclotomic(e).coeffs))
    assert tuple(num) == (1, 0, -1, 0, 1)
    assert cyclotomic(12).coeffs == (1, 0, -1, 0, 1)


@pytest.mark.parametrize("d", range(1, 61))
def test_cyclotomic_matches_sympy(d):
    ours = list(cyclotomic(d).coeffs)
    theirs = list(reversed(oracles.cyclo_poly(d).all_coeffs()))
    assert ours == theirs


@pytest.mark.parametrize("d", range(2, 61))
def test_cyclotomic_value_at_one(d):
    fact = [p for p, _ in group(d).factorization]
    expected = fact[0] if len(fact) == 1 else 1
    assert cyclotomic(d).at_one() == expected


def test_cyclotomic_degree_is_totient():
    for d in range(1, 40):
        phi = sum(1 for i in range(1, d + 1) if math.gcd(i, d) == 1)
        assert cyclotomic(d).degree == phi


def test_product_of_cyclotomics_is_xn_minus_1():
    for n in (1, 2, 6, 12, 30, 36, 48, 60):
        prod = [1]
        for d in divisors(n):
            prod = poly_mul(prod, list(cyclotomic(d).coeffs))
        expected = [0] * (n + 1)
        expected[0], expected[n] = -1, 1
        assert poly_trim(prod) == poly_trim(expected)


# ---------------------------------------------------------------------------
# vanishing tests


def test_vanishes_pair_cycle():
    assert vanishes_at(mm(6, [0, 3]), 2)
    assert not vanishes_at(mm(6, [0, 3]), 3)
    assert vanishes_at(mm(6, [0, 3]), 6)


def test_vanishes_singleton_never():
    for n in (4, 9, 12):
        a = mm(n, [0])
        for d in divisors(n):
            if d > 1:
                assert not vanishes_at(a, d)


def test_vanishes_full_group_everywhere():
    a = mm(12, range(12))
    for d in divisors(12):
        if d > 1:
            assert vanishes_at(a, d)


def test_vanishes_rejects_non_divisor():
    with pytest.raises(DomainError):
        vanishes_at(mm(6, [0, 3]), 4)


def test_zero_set_examples():
    assert zero_set(mm(12, [0, 1, 6, 7])).vanishing_divisors == frozenset({2, 4, 12})
    assert zero_set(mm(8, [0])).vanishing_divisors == frozenset()
    assert zero_set(mm(6, range(6))).vanishing_divisors == frozenset({2, 3, 6})


def test_zero_set_membership_through_gcd():
    za = zero_set(mm(12, [0, 1, 6, 7]))
    assert za.residues() == frozenset({1, 3, 5, 6, 7, 9, 11})
    assert za.contains(6) and za.contains(-1) and not za.contains(4)


def test_zero_set_empty_multiset_rejected():
    with pytest.raises(DomainError):
        zero_set(MaskMultiset.from_coeffs(6, [0] * 6))


@pytest.mark.parametrize("n", [6, 8, 12, 18, 20])
def test_zero_set_matches_independent_oracle(n):
    import random

    rng = random.Random(n)
    for _ in range(25):
        elems = rng.sample(range(n), rng.randint(1, n))
        a = mm(n, elems)
        assert zero_set(a).vanishing_divisors == frozenset(
            oracles.zero_divisors(a.coeffs, n)
        )


# ---------------------------------------------------------------------------
# transforms


def test_dilate_collapses_pair():
    out = dilate(mm(6, [0, 3]), 2)
    assert out.coeffs == (2, 0, 0, 0, 0, 0)


def test_dilate_identity():
    a = mm(10, [0, 1, 7])
    assert dilate(a, 1).coeffs == a.coeffs


def test_dilate_doubling_in_z4():
    assert dilate(mm(4, [0, 1, 2, 3]), 2).coeffs == (2, 0, 2, 0)


def test_restrict_class_examples():
    a = mm(6, [0, 3])
    assert restrict_class(a, 0, 3).coeffs == a.coeffs
    assert restrict_class(a, 1, 3).is_empty()
    assert restrict_class(a, 2, 3).is_empty()
    assert restrict_class(mm(4, range(4)), 1, 2).support() == (1, 3)
    with pytest.raises(DomainError):
        restrict_class(a, 0, 4)


def test_restrict_class_partitions_mass():
    a = mm(12, [0, 1, 5, 6, 7, 11])
    for m in (2, 3, 4, 6, 12):
        assert sum(restrict_class(a, j, m).mass() for j in range(m)) == a.mass()


def test_difference_set_examples():
    assert difference_set(mm(6, [0, 3])) == frozenset({0, 3})
    assert difference_set(mm(9, [0])) == frozenset({0})
    assert difference_set(mm(12, [0, 1, 6, 7])) == frozenset({0, 1, 5, 6, 7, 11})
    with pytest.raises(DomainError):
        difference_set(MaskMultiset.from_coeffs(6, [2, 0, 0, 0, 0, 0]))


def test_difference_set_symmetry_and_zero():
    d = difference_set(mm(15, [0, 2, 3, 7]))
    assert 0 in d
    assert all((-x) % 15 in d for x in d)


# ---------------------------------------------------------------------------
# algebraic properties


group_orders = st.sampled_from([2, 3, 4, 6, 8, 9, 12, 16, 18, 20, 24])


@st.composite
def multisets(draw, proper=False, max_mass=10):
    n = draw(group_orders)
    k = draw(st.integers(1, min(n, max_mass)))
    if proper:
        elems = draw(
            st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True)
        )
    else:
        elems = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=max_mass))
    return MaskMultiset.from_elements(n, elems)


@settings(max_examples=60, deadline=None)
@given(multisets(), st.integers(0, 40))
def test_vanishing_invariant_under_translation(a, t):
    for d in divisors(a.n):
        assert vanishes_at(a, d) == vanishes_at(a.translate(t), d)


@settings(max_examples=60, deadline=None)
@given(multisets(), st.integers(1, 200))
def test_zero_set_invariant_under_unit_dilation(a, m):
    if math.gcd(m, a.n) != 1:
        m = 1
    assert (
        zero_set(dilate(a, m)).vanishing_divisors == zero_set(a).vanishing_divisors
    )


@settings(max_examples=80, deadline=None)
@given(multisets(), st.integers(-5, 40))
def test_dilation_preserves_mass(a, m):
    assert dilate(a, m).mass() == a.mass()


@settings(max_examples=60, deadline=None)
@given(multisets())
def test_fold_agrees_with_big_ring_division(a):
    # the production path folds mod X^d - 1 first; dividing the raw length-N
    # vector by Phi_d must give the same verdict, as must the sympy oracle
    for d in divisors(a.n):
        folded_route = vanishes_at(a, d)
        _, rem = poly_divmod(list(a.coeffs), cyclotomic(d).coeffs)
        assert folded_route == (not rem)
        assert folded_route == oracles.vanishes(a.coeffs, d)


@settings(max_examples=40, deadline=None)
@given(multisets(max_mass=6), multisets(max_mass=6))
def test_packed_product_matches_convolution(a, b):
    if a.n != b.n:
        return
    prod = cyclic_product(a, b)
    assert is_full_group_product(a, b) == all(c == 1 for c in prod.coeffs)


# ---------------------------------------------------------------------------
# parsing and serialization


def test_parse_text_form():
    a = parse_multiset("6:{0,3}")
    assert a.n == 6 and a.support() == (0, 3)


def test_parse_multiplicities_and_spaces():
    a = parse_multiset("6:{0*2, 3, 5*3}")
    assert a.coeffs == (2, 0, 0, 1, 0, 3)


def test_parse_json_form():
    a = parse_multiset('{"n":6,"coeffs":[1,0,0,1,0,0]}')
    assert a.support() == (0, 3)


def test_text_round_trip():
    for text in ("6:{0,3}", "12:{0,1,6,7}", "5:{0*2,1,4*3}"):
        a = parse_multiset(text)
        assert parse_multiset(a.to_text()).coeffs == a.coeffs


def test_json_round_trip_is_byte_identical():
    a = parse_multiset("12:{0,1,6,7}")
    blob = json.dumps(a.to_json(), sort_keys=True, separators=(",", ":"))
    again = json.dumps(
        parse_multiset(blob).to_json(), sort_keys=True, separators=(",", ":")
    )
    assert blob == again


@pytest.mark.parametrize(
    "bad",
    ["", "6", "x:{0}", "6:{0,}", "6:{a}", "6:{0*b}", "0:{0}", '{"n":6}', '{"n":6,"coeffs":[1]}'],
)
def test_parse_rejects_malformed(bad):
    with pytest.raises(ParseError):
        parse_multiset(bad)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_multiset("nope")
    assert err.value.position == 0


def test_fold_route_matches_big_ring_up_to_60():
    import random

    rng = random.Random(60)
    for n in range(2, 61):
        for _ in range(3):
            mass = rng.randint(1, 8)
            a = MaskMultiset.from_elements(n, [rng.randrange(n) for _ in range(mass)])
            for d in divisors(n):
                _, rem = poly_divmod(list(a.coeffs), cyclotomic(d).coeffs)
                assert vanishes_at(a, d) == (not rem)


def test_factored_context_rejects_repeated_prime():
    import pytest as _pytest

    from spectile import GroupContext

    with _pytest.raises(DomainError):
        GroupContext.from_factorization([(2, 3), (2, 4)])
    with _pytest.raises(DomainError):
        GroupContext.from_factorization([(4, 1)])


def test_trivial_group_units():
    assert group(1).units() == (0,)


def test_packed_product_fallback_for_heavy_masses():
    # masses large enough to overflow a 16-bit lane force the plain
    # convolution path; the verdict must not change
    a = MaskMultiset.from_coeffs(6, [300, 0, 0, 0, 0, 0])
    b = MaskMultiset.from_coeffs(6, [300, 0, 0, 0, 0, 0])
    assert not is_full_group_product(a, b)
    ones = MaskMultiset.from_coeffs(4, [1, 1, 1, 1])
    unit = MaskMultiset.from_coeffs(4, [1, 0, 0, 0])
    assert is_full_group_product(ones, unit)
