"""Good-basis testing for ideal lattices in cyclic cubic fields.

A basis ``{x, y, z}`` of a full-rank sublattice of ``F`` is *good* when a
diagonal twist makes it a minimal basis of a well-rounded lattice.  The
squared twist entries are the conjugates of a single field element
``alpha0``, so everything below is exact rational arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd
from typing import Optional

from . import linalg
from .arith import divides_power
from .errors import DegenerateBasis, NotAUnit, NotWR, SignMismatch, Unverified
from .field_core import (FieldElement, different_generator_candidate, galois_apply,
                         is_algebraic_integer, sign_pattern)
from .lattice_geom import (GramMatrix3, LatticeBasis3, enumerate_short_vectors,
                           lattices_similar_by_minimal_bases, minimal_basis,
                           wr_gram_criterion)

DEFAULT_T_MAX = 4
DEFAULT_ITERATIONS = 200
DEFAULT_COEFF_BOUND = 3
DEFAULT_SEED = 0


@dataclass
class PrincipalLink:
    psi: FieldElement
    k: int
    t: int
    verified: bool
    scale: Optional[Fraction] = None
    equal_off_diagonal: Optional[bool] = None
    minimal_gram: Optional[GramMatrix3] = None
    # whether a unit of mixed sign was exhibited; the converse argument assumes one
    mixed_sign_unit: Optional[bool] = None


@dataclass
class TwistReport:
    basis: tuple
    alpha0: FieldElement
    e1: Fraction
    e2: Fraction
    e3: Fraction
    sign_ok: bool
    sign: int = 0
    twisted_gram: Optional[GramMatrix3] = None
    is_good: bool = False
    principal_link: Optional[PrincipalLink] = None
    meta: dict = dc_field(default_factory=dict)

    @property
    def field(self):
        return self.alpha0.field


@dataclass
class OrthoTwistCertificate:
    delta: FieldElement
    unimodular_gram: GramMatrix3
    orthonormal_frame: tuple
    frame_gram: GramMatrix3


def coordinate_matrix(elements):
    return [list(e.coords) for e in elements]


def alpha0_of_basis(F, x, y, z):
    """The element whose conjugates are the squared twist entries (up to a common scale)."""
    x, y, z = F(x), F(y), F(z)
    sq = [t * t for t in (x, y, z)]
    s1 = [galois_apply(t, 1) for t in sq]
    s2 = [galois_apply(t, 2) for t in sq]
    return (s1[0] - s1[1]) * (s2[1] - s2[2]) - (s2[0] - s2[1]) * (s1[1] - s1[2])


def gram_of_twisted_basis(F, basis, alpha0, sign):
    """Gram matrix ``Tr(sign * alpha0 * b_i * b_j)`` of the twisted basis."""
    if sign not in (1, -1):
        raise SignMismatch("sign must be +1 or -1")
    if sign_pattern(alpha0) != (sign, sign, sign):
        raise SignMismatch("conjugates of alpha0 do not share the requested sign")
    return LatticeBasis3.from_field_elements([F(b) for b in basis], sign * alpha0).gram


def test_good_basis(F, x, y, z):
    """Decide whether ``{x, y, z}`` is a good basis."""
    basis = (F(x), F(y), F(z))
    if linalg.det3(coordinate_matrix(basis)) == 0:
        raise DegenerateBasis("basis elements are linearly dependent over Q")
    a0 = alpha0_of_basis(F, *basis)
    e1 = a0.trace()
    e2 = (e1 * e1 - (a0 * a0).trace()) / 2
    e3 = a0.norm()
    sign_ok = e1 * e3 > 0 and e2 > 0
    rep = TwistReport(basis, a0, e1, e2, e3, sign_ok)
    if not sign_ok:
        return rep
    rep.sign = 1 if e1 > 0 else -1
    # the sign test already certifies a common sign, so no interval work is needed
    rep.twisted_gram = LatticeBasis3.from_field_elements(list(basis), rep.sign * a0).gram
    rep.is_good = wr_gram_criterion(rep.twisted_gram)
    return rep


test_good_basis.__test__ = False  # not a pytest test despite the name


def twisted_lattice(report):
    """The twisted lattice as a :class:`LatticeBasis3` (requires ``sign_ok``)."""
    if not report.sign_ok:
        raise SignMismatch("alpha0 has conjugates of mixed sign; no twist exists")
    return LatticeBasis3.from_field_elements(list(report.basis), report.sign * report.alpha0)


def unit_transport(report, u):
    """Report for ``{u x, u y, u z}``; the twist does not change."""
    F = report.field
    u = F(u)
    if abs(u.norm()) != 1 or not is_algebraic_integer(u):
        raise NotAUnit(f"{u} is not a unit")
    return test_good_basis(F, *(u * b for b in report.basis))


def _random_unimodular(rng, coeff_bound, max_steps=3):
    m = linalg.identity(3)
    for _ in range(rng.randint(1, max_steps)):
        i, j = rng.sample(range(3), 2)
        c = rng.choice([c for c in range(-coeff_bound, coeff_bound + 1) if c])
        e = linalg.identity(3)
        e[i][j] = Fraction(c)
        m = linalg.matmul(e, m)
    # random signed permutation keeps the search from favouring one ordering
    perm = rng.sample(range(3), 3)
    signs = [rng.choice((1, -1)) for _ in range(3)]
    return [[int(signs[r] * m[perm[r]][k]) for k in range(3)] for r in range(3)]


def random_unimodular_images(B0, iterations, coeff_bound, seed):
    rng = random.Random(seed)
    yield [[1, 0, 0], [0, 1, 0], [0, 0, 1]], tuple(B0)
    for _ in range(iterations):
        M = _random_unimodular(rng, coeff_bound)
        yield M, tuple(sum((M[r][k] * B0[k] for k in range(3)), B0[0].field.zero) for r in range(3))


def good_basis_search(F, B0=None, iterations=DEFAULT_ITERATIONS,
                      coeff_bound=DEFAULT_COEFF_BOUND, seed=DEFAULT_SEED):
    """Test random unimodular images of ``B0``; return good bases with distinct Grams."""
    if B0 is None:
        B0 = F.integral_basis
    B0 = tuple(F(b) for b in B0)
    found = {}
    for M, basis in random_unimodular_images(B0, iterations, coeff_bound, seed):
        rep = test_good_basis(F, *basis)
        if rep.is_good and rep.twisted_gram.entries() not in found:
            rep.meta["transform"] = M
            found[rep.twisted_gram.entries()] = rep
    return [found[k] for k in sorted(found)]


def _integral_coordinates(F, a):
    """Coordinates of ``a`` in the integral basis, or None when ``a`` is not integral."""
    if F.integral_basis is None:
        return None
    c = F.integral_coordinates(a)
    if any(x.denominator != 1 for x in c):
        return None
    return [int(x) for x in c]


def mixed_sign_unit(F):
    """A unit from the rho-power pool with conjugates of mixed sign, if any."""
    rho = F.rho
    if abs(rho.norm()) != 1:
        return None
    r1 = galois_apply(rho, 1)
    for cand in (rho, r1, rho * r1, rho / r1):
        s = sign_pattern(cand)
        if len(set(s)) > 1:
            return cand
    return None


def principal_link(report, F=None, t_max=DEFAULT_T_MAX):
    """Link a good basis of ``O_F`` to a principal ideal similar to its twist.

    Writes ``alpha0 = k psi`` with ``k`` the content of ``alpha0`` in the
    integral basis and returns None unless ``N(psi)`` divides a power
    ``Delta_F^t`` with ``t <= t_max``.
    """
    F = F or report.field
    if not report.is_good:
        return None
    coords = _integral_coordinates(F, report.alpha0)
    if coords is None or F.discriminant is None:
        return None
    k = 0
    for c in coords:
        k = gcd(k, c)
    psi = report.sign * report.alpha0 / k  # totally positive normalisation
    npsi = abs(psi.norm())
    t = next((t for t in range(1, t_max + 1) if divides_power(npsi, F.discriminant, t)), None)
    if t is None:
        return None
    link = PrincipalLink(psi, k, t, verified=False, mixed_sign_unit=mixed_sign_unit(F) is not None)
    twist = twisted_lattice(report)
    psi2 = psi * psi
    ideal = LatticeBasis3.from_field_elements(list(F.integral_basis), psi2 * psi2)
    try:
        similar, scale = lattices_similar_by_minimal_bases(ideal, twist)
    except NotWR:
        similar, scale = False, None
    link.verified = similar
    link.scale = scale
    mg = minimal_basis(twist).gram
    link.minimal_gram = mg
    link.equal_off_diagonal = abs(mg.u) == abs(mg.v) == abs(mg.w)
    report.principal_link = link
    return link


def _unit_pool(F, max_exp=4):
    rho = F.rho
    if abs(rho.norm()) != 1:
        return [F.one, -F.one]
    r1 = galois_apply(rho, 1)
    pool = []
    for i in range(-max_exp, max_exp + 1):
        for j in range(-max_exp, max_exp + 1):
            u = rho ** i * r1 ** j
            pool.extend((u, -u))
    pool.sort(key=lambda u: (sum(abs(c) for c in u.coords), u.coords))
    return pool


def orthogonal_twist(F, max_exp=4):
    """Twist of ``O_F`` isometric to ``Z^3`` via a totally positive generator of the different."""
    if F.integral_basis is None or F.discriminant is None:
        raise Unverified("field has no known integral basis or discriminant")
    d0 = different_generator_candidate(F)
    seeds = []
    for d in (d0, galois_apply(d0, 1), galois_apply(d0, 2)):
        seeds.extend((d, -d))
    for d in seeds:
        if abs(d.norm()) != F.discriminant:
            continue
        for u in _unit_pool(F, max_exp):
            delta = d * u
            if sign_pattern(delta) != (1, 1, 1):
                continue
            return _ortho_certificate(F, delta)
    raise Unverified("no totally positive generator of the different found in the search pool")


def _ortho_certificate(F, delta):
    L = LatticeBasis3.from_field_elements(list(F.integral_basis), delta.inverse())
    G = L.gram
    if any(x.denominator != 1 for x in G.entries()) or G.det() != 1:
        raise Unverified("twisted Gram is not unimodular")
    units = [c for c, n in enumerate_short_vectors(G, 1) if n == 1]
    frame = []
    for c in units:
        if all(G.inner(c, f) == 0 for f in frame):
            frame.append(c)
        if len(frame) == 3:
            break
    if len(frame) < 3:
        raise Unverified("unimodular lattice has no orthonormal frame")
    frame_gram = G.transform(frame)
    return OrthoTwistCertificate(delta, G, tuple(frame), frame_gram)
