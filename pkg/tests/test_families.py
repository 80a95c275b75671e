from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cubictwist.arith import Tri
from cubictwist.errors import ConditionOutOfRange, GateFailed, InvalidSpec, ReduciblePolynomial
from cubictwist.families import (CASES, FAMILIES, applicable_cases, basis_discriminant,
                                 defining_coefficients, family_gates, family_good_basis,
                                 family_integral_basis, kishi_N, make_family_field,
                                 polynomial_discriminant, unimodular_over_integral_basis,
                                 verify_case, washington_principal_generator)
from cubictwist.field_core import is_algebraic_integer

X = sympy.Symbol("x")


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(-40, 40))
def test_discriminant_closed_form_matches_sympy(family, n):
    c0, c1, c2 = defining_coefficients(family, n)
    assert sympy.discriminant(X ** 3 + c2 * X ** 2 + c1 * X + c0, X) == polynomial_discriminant(family, n)


def test_polynomial_examples():
    inst = make_family_field("shanks", -1)
    assert inst.field.coeffs == (-1, -2, 1) and inst.field.poly_discriminant == 49
    inst = make_family_field("kishi", 0)
    assert inst.field.coeffs == (-1, -3, 0) and inst.field.poly_discriminant == 81
    with pytest.raises(ReduciblePolynomial):
        make_family_field("washington", 1)
    with pytest.raises(InvalidSpec):
        make_family_field("lehmer", 3)


def test_gate_examples():
    assert family_gates("shanks", 1)["n^2+3n+9 squarefree"] is Tri.TRUE
    assert family_gates("shanks", 3)["n^2+3n+9 squarefree"] is Tri.FALSE
    assert kishi_N(2) == 301
    assert family_gates("kishi", 2)["N squarefree"] is Tri.TRUE
    g = family_gates("washington", 10)
    assert g["n even, (n^2+3)(n^2-3n+3)/9^d squarefree"] is Tri.TRUE


def test_integral_basis_examples():
    inst = make_family_field("washington", 4)
    rho = inst.field.rho
    assert inst.integral_basis == (inst.field.one, rho, (rho * rho - 1) / 3)
    inst16 = make_family_field("kishi", 16 - 54)
    assert inst16.basis_case == "16"
    assert inst16.integral_basis[1] == (2 * inst16.field.rho ** 2 + inst16.field.rho) / 3


def test_gate_failure_is_reported():
    inst = make_family_field("shanks", 3)
    assert inst.integral_basis is None
    with pytest.raises(GateFailed):
        family_integral_basis(inst)
    with pytest.raises(GateFailed):
        family_good_basis(inst, "nonmonogenic")


@pytest.mark.parametrize("family", FAMILIES)
def test_integral_bases_are_maximal_orders(family):
    for n in range(-12, 13):
        try:
            inst = make_family_field(family, n)
        except (ReduciblePolynomial, ConditionOutOfRange):
            continue
        if inst.integral_basis is None:
            continue
        F = inst.field
        assert all(is_algebraic_integer(b) for b in inst.integral_basis)
        assert basis_discriminant(F, inst.integral_basis) == inst.discriminant
        # the discriminant of a cyclic cubic field is the square of its conductor
        r = sympy.integer_nthroot(inst.discriminant, 2)
        assert r[1]


def test_shanks_good_basis_gram_at_21():
    v = verify_case(make_family_field("shanks", 21), "nonmonogenic")
    assert v.ok and v.expected_gram == (28899, -12141, 7011, 342)


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_washington_2b_w_entry(n):
    inst = make_family_field("washington", n)
    if inst.integral_basis is None:
        pytest.skip("gate fails")
    gb = family_good_basis(inst, "2b")
    w = Fraction((n - 3) * (n - 1) * (n * n - 4 * n + 7) * (n * n - 3 * n + 3) * (n * n + 3), 64)
    assert gb.expected_gram[3] == w
    assert verify_case(inst, "2b").gram_match


def test_kishi_43_row():
    n = 43 - 54
    inst = make_family_field("kishi", n)
    assert inst.basis_case == "43"
    gb = family_good_basis(inst, "43")
    rho = inst.field.rho
    assert gb.basis[0] == rho * rho and gb.basis[1] == (-rho * rho + rho) / 6
    assert unimodular_over_integral_basis(inst, gb.basis)
    assert verify_case(inst, "43").ok


def test_case_conditions():
    with pytest.raises(ConditionOutOfRange):
        family_good_basis(make_family_field("washington", 2), "1")
    with pytest.raises(ConditionOutOfRange):
        family_good_basis(make_family_field("washington", 3), "2a")
    with pytest.raises(InvalidSpec):
        family_good_basis(make_family_field("kishi", 2), "nope")


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_washington_principal_generator(n):
    g = washington_principal_generator(make_family_field("washington", n))
    assert g.norm() == -(n * n - 3 * n + 3)


def test_washington_generator_example_n4():
    assert washington_principal_generator(make_family_field("washington", 4)).norm() == -7


def test_galois_cross_check_recorded():
    seen = set()
    for n in range(-10, 11):
        for fam in ("washington", "kishi"):
            try:
                inst = make_family_field(fam, n)
            except ReduciblePolynomial:
                continue
            seen.add((fam, inst.galois_match))
    assert ("kishi", "sigma") in seen
    assert {m for f, m in seen if f == "washington"} <= {"sigma", "sigma^2"}


def test_applicable_cases_are_known():
    for fam in FAMILIES:
        for n in (-7, 2, 4, 7, 21):
            try:
                inst = make_family_field(fam, n)
            except (ReduciblePolynomial, ConditionOutOfRange):
                continue
            assert set(applicable_cases(inst)) <= set(CASES[fam])


@pytest.mark.parametrize("n", [-3, -5, -7])
def test_kishi_odd_a_with_negative_n_is_not_good(n):
    # recorded behaviour: the published odd-a basis fails the test for negative n
    inst = make_family_field("kishi", n)
    v = verify_case(inst, "odd-a")
    assert v.unimodular and not v.report.is_good


@pytest.mark.parametrize("n", [5, 9, 11])
def test_kishi_odd_a_with_positive_n_is_good(n):
    assert verify_case(make_family_field("kishi", n), "odd-a").ok
