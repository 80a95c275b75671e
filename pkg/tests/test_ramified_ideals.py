from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cubictwist import linalg
from cubictwist.errors import InvalidSpec, NotRepresentable
from cubictwist.field_core import all_conductor_params, conductor_params, field_from_conductor
from cubictwist.lattice_geom import LatticeBasis3, is_wr_lattice
from cubictwist.ramified_ideals import (IdealArithmetic, RamifiedSpec, all_specs, beta_norm,
                                        check_ideal, eisenstein_representations, first_minimum_formula,
                                        hnf, ideal_arithmetic, ideal_basis, ideal_wr_status,
                                        represent_prime_eisenstein)

F7 = field_from_conductor(conductor_params(7))
F63 = field_from_conductor(conductor_params(63))
F91 = field_from_conductor(conductor_params(91))


def test_eisenstein_representation_of_7():
    reps = eisenstein_representations(7)
    assert len(reps) == 12 and (3, 1) in reps
    y, z = represent_prime_eisenstein(7, F7.conductor)
    a, b = F7.conductor.a, F7.conductor.b
    assert y * y - y * z + z * z == 7 and (y + z) % 3 == 1
    assert (y * (a + 3 * b) + z * (a - 3 * b)) % 7 == 0


def test_non_representable_prime():
    with pytest.raises(NotRepresentable):
        represent_prime_eisenstein(5, F7.conductor)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 400))
def test_eisenstein_representations_are_complete(n):
    reps = set(eisenstein_representations(n))
    assert all(y * y - y * z + z * z == n for y, z in reps)
    # the form is invariant under the 6 units of Z[omega] and conjugation
    for y, z in reps:
        for img in ((z, y), (-y, -z), (y - z, y), (z, z - y)):
            assert img in reps


def test_kappa_orbit_basis_for_m7():
    ib = ideal_basis(RamifiedSpec(F7, {1}, set()))
    assert ib.construction == "kappa_orbit" and ib.claimed_norm == 49
    ar = ideal_arithmetic(F7)
    assert ar.index([ar.coords(e) for e in ib.elements]) == 49


def test_shape_ii_for_p0_squared_p1():
    spec = RamifiedSpec(F63, set(), {1}, e0=2)
    ib = ideal_basis(spec)
    assert ib.construction == "three_mid_m_shape_ii"
    assert ib.elements[0] == F63(21)


def test_disjointness_and_range_checks():
    with pytest.raises(InvalidSpec):
        RamifiedSpec(F7, {1}, {1})
    with pytest.raises(InvalidSpec):
        RamifiedSpec(F7, {2}, set())
    with pytest.raises(InvalidSpec):
        RamifiedSpec(F7, set(), set(), e0=1)


def test_wr_status_examples():
    assert ideal_wr_status(RamifiedSpec(F7, set(), {1})) == (False, "closed-form")
    assert ideal_wr_status(RamifiedSpec(F63, {1}, set())) == (False, "proven_not_wr")
    # m = 793 = 13 * 61, the prime above 13: enumeration shows it is not WR in either field
    for cd in all_conductor_params(793):
        F = field_from_conductor(cd)
        spec = RamifiedSpec(F, set(), {1})
        assert spec.p_J == 13
        c = check_ideal(spec)
        assert c.first_minimum == 507 and not c.enumerated_wr
        assert c.predicted_wr is False


def test_beta_norm_examples():
    assert beta_norm(F7, 1, 0, 0) == 3
    assert beta_norm(F7, 0, 1, 0) == Fraction(14, 3)


@pytest.mark.parametrize("F", [F7] + [field_from_conductor(cd) for m in (91, 247) for cd in all_conductor_params(m)])
def test_first_minimum_formula_matches_enumeration(F):
    for spec in all_specs(F):
        ib = ideal_basis(spec)
        res = is_wr_lattice(LatticeBasis3.from_field_elements(list(ib.elements)))
        assert res.first_minimum == first_minimum_formula(spec)


@pytest.mark.parametrize("m", [7, 9, 63, 91, 117, 133, 819])
def test_every_ideal_checks_out(m):
    for cd in all_conductor_params(m):
        F = field_from_conductor(cd)
        for spec in all_specs(F):
            c = check_ideal(spec)
            assert c.covolume_ok and c.agrees, spec.label()
            ar = ideal_arithmetic(F)
            rows = [ar.coords(e) for e in c.basis.elements]
            assert ar.is_closed(rows)
            assert hnf(rows) == ar.ideal_of_spec(spec)


def test_cube_of_ramified_prime_is_p():
    ar = IdealArithmetic(F91)
    for p in (7, 13):
        P = ar.prime_above(p)
        assert ar.index(P) == p
        assert ar.power(P, 3) == hnf([[p, 0, 0], [0, p, 0], [0, 0, p]])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-30, 30), min_size=3, max_size=3), min_size=3, max_size=6))
def test_hnf_is_canonical(rows):
    if linalg.rank([[Fraction(x) for x in r] for r in rows]) < 3:
        return
    H = hnf(rows)
    assert all(H[i][j] == 0 for i in range(3) for j in range(i))
    assert all(H[i][i] > 0 for i in range(3))
    assert all(0 <= H[k][i] < H[i][i] for i in range(3) for k in range(i))
    assert hnf(H) == H
    assert hnf(list(reversed(rows))) == H
