from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from cubictwist import linalg
from cubictwist.arith import Tri, divides_power, factorize, is_prime, squarefree


@given(st.integers(1, 10 ** 9))
@settings(max_examples=200)
def test_factorize_matches_sympy(n):
    assert factorize(n) == (sympy.factorint(n), 1)
    assert is_prime(n) == sympy.isprime(n)


@given(st.integers(1, 10 ** 9))
@settings(max_examples=200)
def test_squarefree_matches_sympy(n):
    expected = all(e == 1 for e in sympy.factorint(n).values())
    assert squarefree(n) is Tri.of(expected)


def test_squarefree_with_small_bound_can_be_unknown():
    # 1009 * 1013 has no factor below 10, so the cofactor is undecided
    assert squarefree(1009 * 1013, bound=10) is Tri.UNKNOWN
    assert squarefree(1009 ** 2, bound=10) is Tri.FALSE
    assert squarefree(4 * 1009 * 1013, bound=10) is Tri.FALSE


def test_divides_power():
    assert divides_power(49, 7, 2) and not divides_power(49, 7, 1)
    assert not divides_power(0, 7, 3)


matrices = st.lists(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=4),
                             min_size=3, max_size=3), min_size=3, max_size=3)


@given(matrices)
def test_linalg_against_sympy(m):
    M = sympy.Matrix(m)
    assert linalg.det3(m) == Fraction(str(M.det()))
    assert linalg.rank(m) == M.rank()
    if M.det() != 0:
        inv = linalg.inverse(m)
        assert linalg.matmul(inv, m) == linalg.identity(3)
