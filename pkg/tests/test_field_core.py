from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cubictwist.errors import (FieldMismatch, InvalidConductorData, NoRepresentation,
                               ReduciblePolynomial)
from cubictwist.field_core import (ConductorData, CubicField, all_conductor_params, conductor_params,
                                   conductor_primes, conjugates, embed, field_from_conductor,
                                   galois_apply, is_algebraic_integer, is_totally_positive,
                                   is_valid_conductor, sign_pattern, trace_and_norm)

X = sympy.Symbol("x")
FIELDS = {m: field_from_conductor(conductor_params(m)) for m in (7, 9, 13, 63, 91)}
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
coords = st.tuples(rationals, rationals, rationals)


def sympy_poly(F):
    c0, c1, c2 = F.coeffs
    return X ** 3 + c2 * X ** 2 + c1 * X + c0


def sympy_norm(F, x):
    """Resultant of the defining polynomial with the coordinate polynomial."""
    a0, a1, a2 = (sympy.Rational(c.numerator, c.denominator) for c in x.coords)
    return Fraction(str(sympy.resultant(sympy_poly(F), a0 + a1 * X + a2 * X ** 2, X)))


def test_conductor_7_example():
    cd = conductor_params(7)
    assert (cd.m, cd.a, cd.b) == (7, -1, 3)
    F = field_from_conductor(cd)
    assert F.coeffs == (1, -2, -1)
    assert F.discriminant == 49


@pytest.mark.parametrize("m", [8, 14, 18, 27, 49, 3 * 7, 5])
def test_invalid_conductors(m):
    assert not is_valid_conductor(m)
    with pytest.raises(NoRepresentation):
        conductor_primes(m)


def test_composite_conductor_has_several_fields():
    assert len(all_conductor_params(91)) == 2
    assert [(c.a, c.b) for c in all_conductor_params(63)] == [(15, 3), (-12, 6)]
    assert conductor_primes(63) == [7]


def test_conductor_data_validation():
    with pytest.raises(InvalidConductorData):
        ConductorData(7, 1, 3)  # a must be 2 mod 3
    with pytest.raises(InvalidConductorData):
        ConductorData(7, 5, 1)


def test_reducible_polynomial_rejected():
    with pytest.raises(ReduciblePolynomial):
        CubicField((-6, 11, -6))  # (x-1)(x-2)(x-3)


@pytest.mark.parametrize("m", sorted(FIELDS))
def test_galois_matrix_is_an_automorphism_of_order_three(m):
    F = FIELDS[m]
    rho = F.rho
    s = galois_apply(rho, 1)
    assert F.min_poly_value(s).is_zero()
    assert galois_apply(s, 2) == rho
    assert galois_apply(galois_apply(s, 1), 1) == rho


@pytest.mark.parametrize("m", sorted(FIELDS))
def test_integral_basis_is_a_ring_with_field_discriminant(m):
    F = FIELDS[m]
    B = F.integral_basis
    assert all(is_algebraic_integer(b) for b in B)
    for a in B:
        for b in B:
            assert all(c.denominator == 1 for c in F.integral_coordinates(a * b))
    d = sympy.Matrix([[(a * b).trace() for b in B] for a in B]).det()
    assert d == m * m


@settings(max_examples=60, deadline=None)
@given(coords, coords, st.sampled_from(sorted(FIELDS)))
def test_trace_norm_are_homomorphisms(a, b, m):
    F = FIELDS[m]
    x, y = F(a), F(b)
    assert (x + y).trace() == x.trace() + y.trace()
    assert (x * y).norm() == x.norm() * y.norm()
    assert x.norm() == sympy_norm(F, x)
    assert trace_and_norm(x) == (x.trace(), x.norm())


@settings(max_examples=60, deadline=None)
@given(coords, coords, st.sampled_from(sorted(FIELDS)))
def test_galois_is_a_ring_homomorphism(a, b, m):
    F = FIELDS[m]
    x, y = F(a), F(b)
    assert galois_apply(x * y) == galois_apply(x) * galois_apply(y)
    assert galois_apply(x + y) == galois_apply(x) + galois_apply(y)
    c = conjugates(x)
    assert (c[0] * c[1] * c[2]).coords == (x.norm(), 0, 0)


@settings(max_examples=40, deadline=None)
@given(coords, st.sampled_from(sorted(FIELDS)))
def test_inverse(a, m):
    F = FIELDS[m]
    x = F(a)
    if x.is_zero():
        return
    assert x * x.inverse() == F.one


def test_mixing_fields_raises():
    with pytest.raises(FieldMismatch):
        FIELDS[7].rho + FIELDS[13].rho


@pytest.mark.parametrize("m", sorted(FIELDS))
def test_embedding_order_matches_sigma(m):
    F = FIELDS[m]
    roots = sorted(float(r) for r in sympy.Poly(sympy_poly(F), X).nroots(n=30))
    ivs = embed(F.rho, 80)
    for iv, r in zip(ivs, (roots[0], roots[2], roots[1])):
        assert abs(float(iv.mid) - r) <= 1e-12 * max(1, abs(r))
    s_ivs = embed(galois_apply(F.rho, 1), 80)
    # sigma(rho) at the smallest root is the largest root
    assert abs(float(s_ivs[0].mid) - roots[2]) <= 1e-12 * max(1, abs(roots[2]))


@given(coords)
@settings(max_examples=40, deadline=None)
def test_sign_pattern_agrees_with_floats(a):
    F = FIELDS[13]
    x = F(a)
    if x.is_zero():
        assert sign_pattern(x) == (0, 0, 0)
        return
    signs = sign_pattern(x)
    mids = [float(iv.mid) for iv in embed(x, 64)]
    for s, v in zip(signs, mids):
        if abs(v) > 1e-9:
            assert s == (1 if v > 0 else -1)
    assert is_totally_positive(x * x) is True


def test_embed_precision_contract():
    x = FIELDS[7].rho
    for iv in embed(x, 64):
        assert iv.width <= Fraction(2, 2 ** 64) * max(1, abs(iv.hi))
    with pytest.raises(ValueError):
        embed(x, 8)


def test_algebraic_integer():
    F = FIELDS[9]
    assert is_algebraic_integer(F.rho)
    assert not is_algebraic_integer(F.rho / 2)
