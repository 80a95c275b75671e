"""Ideals of ``O_F`` whose norm divides the field discriminant.

Every such ideal is ``P_0^e0 * P_I^2 * P_J`` where ``P_i`` is the unique
prime above ``p_i | m`` and ``P_0`` the prime above 3 when ``3 | m``.
Ideals are handled as Hermite-normal-form lattices in integral-basis
coordinates; the closed-form bases are checked against that generic
construction (a lattice of the right index that is closed under ``O_F``
and built from ramified primes is the ideal, by uniqueness).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import isqrt, prod

from . import linalg
from .arith import is_prime
from .errors import InvalidSpec, NotRepresentable
from .field_core import ConductorData, conductor_primes, galois_apply
from .lattice_geom import LatticeBasis3, is_wr_lattice

CONSTRUCTIONS = ("kappa_orbit", "three_mid_m_shape_i", "three_mid_m_shape_ii",
                 "three_mid_m_shape_iii", "integral_basis", "prime_product")


@dataclass(frozen=True)
class RamifiedSpec:
    """The ideal ``P_0^e0 * P_I^2 * P_J``; ``I`` and ``J`` hold prime indices starting at 1."""

    field: object
    I: frozenset = frozenset()
    J: frozenset = frozenset()
    e0: int = 0

    def __post_init__(self):
        object.__setattr__(self, "I", frozenset(self.I))
        object.__setattr__(self, "J", frozenset(self.J))
        F = self.field
        if F.conductor is None:
            raise InvalidSpec("field has no conductor data")
        if self.I & self.J:
            raise InvalidSpec(f"I and J must be disjoint (common: {sorted(self.I & self.J)})")
        r = len(self.primes)
        bad = [i for i in self.I | self.J if not 1 <= i <= r]
        if bad:
            raise InvalidSpec(f"prime indices {bad} out of range 1..{r}")
        if self.e0 not in (0, 1, 2):
            raise InvalidSpec("exponent of P_0 must be 0, 1 or 2")
        if self.e0 and not F.conductor.three_divides:
            raise InvalidSpec("P_0 exists only when 3 divides the conductor")

    @property
    def primes(self):
        return [p for p in conductor_primes(self.field.conductor.m) if p != 3]

    @property
    def p_I(self):
        return prod(self.primes[i - 1] for i in self.I)

    @property
    def p_J(self):
        return prod(self.primes[i - 1] for i in self.J)

    @property
    def norm(self):
        return 3 ** self.e0 * self.p_I ** 2 * self.p_J

    def label(self):
        parts = []
        if self.e0:
            parts.append("P0" + ("^2" if self.e0 == 2 else ""))
        if self.I:
            parts.append("P{" + ",".join(map(str, sorted(self.I))) + "}^2")
        if self.J:
            parts.append("P{" + ",".join(map(str, sorted(self.J))) + "}")
        return "*".join(parts) or "O_F"


@dataclass
class IdealBasis:
    elements: tuple
    claimed_norm: int
    construction: str
    spec: RamifiedSpec = None
    note: str = ""


# -- Eisenstein representations ----------------------------------------------

def eisenstein_representations(n):
    """All ``(y, z)`` with ``y^2 - y z + z^2 = n``, in lexicographic order."""
    bound = isqrt(4 * n // 3) + 1
    return [(y, z) for y in range(-bound, bound + 1) for z in range(-bound, bound + 1)
            if y * y - y * z + z * z == n]


def represent_prime_eisenstein(p, cd):
    """``(y, z)`` with ``p = y^2 - yz + z^2``, ``y + z = 1 (mod 3)`` and
    ``p | y(a+3b) + z(a-3b)``.  ``p`` may be a product of primes dividing ``m``."""
    if not isinstance(cd, ConductorData):
        cd = ConductorData(*cd)
    if p < 1 or any(q % 3 != 1 for q in _prime_factors(p)):
        raise NotRepresentable(f"{p} is not a product of primes = 1 (mod 3)")
    a, b = cd.a, cd.b
    for y, z in eisenstein_representations(p):
        if (y + z) % 3 == 1 and (y * (a + 3 * b) + z * (a - 3 * b)) % p == 0:
            return y, z
    raise NotRepresentable(f"no representation of {p} meets the congruence conditions for {cd}")


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- integer lattices in integral-basis coordinates -----------------------------

def hnf(rows):
    """Row Hermite normal form of an integer matrix of rank 3 (three columns)."""
    rows = [list(map(int, r)) for r in rows if any(r)]
    out = []
    for col in range(3):
        piv = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        while len(piv) > 1:
            piv.sort(key=lambda r: abs(r[col]))
            head = piv[0]
            nxt = []
            for r in piv[1:]:
                q = r[col] // head[col]
                r = [x - q * h for x, h in zip(r, head)]
                (nxt if r[col] else rest).append(r)
            piv = [head] + nxt
        if not piv:
            raise ValueError("generators do not span a full-rank lattice")
        h = piv[0]
        if h[col] < 0:
            h = [-x for x in h]
        out.append(h)
        rows = rest
    for i in range(3):
        for k in range(i):
            q = out[k][i] // out[i][i]
            out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


def _structure_constants(F):
    B = F.integral_basis
    table = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            c = F.integral_coordinates(B[i] * B[j])
            if any(x.denominator != 1 for x in c):
                raise ValueError("integral basis is not closed under multiplication")
            table[i][j] = table[j][i] = [int(x) for x in c]
    return table


def _mul_coords(table, x, y, mod=None):
    out = [0, 0, 0]
    for i in range(3):
        if not x[i]:
            continue
        for j in range(3):
            if y[j]:
                c = x[i] * y[j]
                t = table[i][j]
                out[0] += c * t[0]
                out[1] += c * t[1]
                out[2] += c * t[2]
    if mod:
        out = [v % mod for v in out]
    return out


def _kernel_mod_p(M, p):
    """Basis of the null space of ``M`` (3x3, rows) over ``F_p``."""
    A = [[x % p for x in row] for row in M]
    pivots = []
    r = 0
    for c in range(3):
        k = next((i for i in range(r, 3) if A[i][c]), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(3):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(3) if c not in pivots]
    basis = []
    for f in free:
        v = [0, 0, 0]
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = -A[i][f] % p
        basis.append(v)
    return basis


class IdealArithmetic:
    """HNF ideal arithmetic in ``O_F`` (requires a known integral basis)."""

    def __init__(self, F):
        self.F = F
        self.table = _structure_constants(F)
        self._primes = {}

    def from_generators(self, gens):
        """Ideal generated by integral-coordinate vectors ``gens``."""
        rows = []
        for g in gens:
            for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                rows.append(_mul_coords(self.table, g, e))
        return hnf(rows)

    def unit_ideal(self):
        return hnf([[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    def prime_above(self, p):
        """The prime above a totally ramified ``p``: the kernel of Frobenius on ``O_F / p``."""
        if p in self._primes:
            return self._primes[p]
        if not is_prime(p):
            raise InvalidSpec(f"{p} is not prime")
        one = [int(x) % p for x in self.F.integral_coordinates(self.F.one)]
        cols = []
        for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            acc, base, k = one, list(e), p
            while k:
                if k & 1:
                    acc = _mul_coords(self.table, acc, base, p)
                base = _mul_coords(self.table, base, base, p)
                k >>= 1
            cols.append(acc)
        M = linalg.transpose(cols)
        ker = _kernel_mod_p(M, p)
        rows = [[p, 0, 0], [0, p, 0], [0, 0, p]] + ker
        P = hnf(rows)
        if self.index(P) != p:
            raise InvalidSpec(f"{p} is not totally ramified in this field")
        self._primes[p] = P
        return P

    def product(self, A, B):
        rows = [_mul_coords(self.table, a, b) for a in A for b in B]
        return hnf(rows)

    def power(self, A, k):
        return reduce(self.product, [A] * k, self.unit_ideal())

    @staticmethod
    def index(A):
        return abs(linalg.det3(A))

    def contains(self, A, x):
        c = linalg.solve(linalg.transpose([list(map(Fraction, r)) for r in A]), list(x))
        return all(v.denominator == 1 for v in c)

    def is_closed(self, A):
        """Whether the lattice spanned by rows ``A`` is an ``O_F``-module."""
        for r in A:
            for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                if not self.contains(A, _mul_coords(self.table, r, e)):
                    return False
        return True

    def elements(self, A):
        B = self.F.integral_basis
        return tuple(sum((r[k] * B[k] for k in range(3)), self.F.zero) for r in A)

    def coords(self, x):
        c = self.F.integral_coordinates(x)
        if any(v.denominator != 1 for v in c):
            raise ValueError("element is not integral")
        return [int(v) for v in c]

    def ideal_of_spec(self, spec):
        A = self.unit_ideal()
        if spec.e0:
            A = self.product(A, self.power(self.prime_above(3), spec.e0))
        for i in spec.I:
            A = self.product(A, self.power(self.prime_above(spec.primes[i - 1]), 2))
        for j in spec.J:
            A = self.product(A, self.prime_above(spec.primes[j - 1]))
        return A


_ARITH_CACHE_ATTR = "_ideal_arith"


def ideal_arithmetic(F):
    ar = getattr(F, _ARITH_CACHE_ATTR, None)
    if ar is None:
        ar = IdealArithmetic(F)
        setattr(F, _ARITH_CACHE_ATTR, ar)
    return ar


# -- explicit bases -------------------------------------------------------------

def _covolume_ok(ar, elements, norm):
    rows = [ar.coords(e) for e in elements]
    return ar.index(rows) == norm, rows


def _verify(ar, spec, elements, construction, note=""):
    norm = spec.norm
    ok, rows = _covolume_ok(ar, elements, norm)
    if not ok or not ar.is_closed(rows):
        return None
    # same norm from ramified primes: the lattice is the ideal itself
    if hnf(rows) != ar.ideal_of_spec(spec):
        return None
    return IdealBasis(tuple(elements), norm, construction, spec, note)


def kappa_element(spec):
    """Generator of the conjugate-orbit basis of ``P_I^2 P_J`` when ``3 !| m``.

    ``kappa = x + y alpha + z tau(alpha)`` with ``x = (p_I p_J - y - z)/3``.
    With the congruence ``p_I | y(a+3b) + z(a-3b)`` the automorphism ``tau``
    must be ``sigma^2`` under the ``t <= 0`` convention: there
    ``sum beta^2 sigma(beta)`` over the cyclic orbit equals ``m(3b - a)/18``,
    and using ``sigma`` instead puts ``kappa`` outside the ideal.
    """
    F = spec.field
    y, z = represent_prime_eisenstein(spec.p_I, F.conductor)
    x, rem = divmod(spec.p_I * spec.p_J - y - z, 3)
    if rem:
        raise NotRepresentable("x is not an integer")
    alpha = F.rho
    return x + y * alpha + z * galois_apply(alpha, 2), (x, y, z)


def _three_mid_m_candidates(spec):
    """Bases of the shapes known for ``3 | m`` with every admissible ``(A, B)``."""
    F = spec.field
    m = F.conductor.m
    alpha = F.rho
    s_alpha = galois_apply(alpha, 1)
    pI, pJ = spec.p_I, spec.p_J
    reps = eisenstein_representations(m // 9)
    pref = ((F.conductor.a + F.conductor.b) // 6, F.conductor.b // 3)
    if pref in reps:
        reps.remove(pref)
        reps.insert(0, pref)
    for A, B in reps:
        xs = [0] if pI == 1 else [x for x in range(pI) if (B * x + A) % pI == 0]
        for xI in xs:
            if spec.e0 == 0 and spec.I:
                yield ("three_mid_m_shape_i", [F(pI * pJ), pI * alpha, xI * alpha - s_alpha], (A, B, xI))
            elif spec.e0 == 2 and not spec.I:
                yield ("three_mid_m_shape_ii", [F(3 * pJ), 3 * alpha, alpha - s_alpha], (A, B, None))
            elif spec.e0 == 2:
                x = next(t for t in range(3 * pI) if t % pI == xI % pI and t % 3 == 1)
                yield ("three_mid_m_shape_iii", [F(3 * pI * pJ), 3 * pI * alpha, x * alpha - s_alpha],
                       (A, B, x))
            elif spec.e0 == 0:
                # P_J alone is shape (i) with empty I
                yield ("three_mid_m_shape_i", [F(pJ), alpha, -s_alpha], (A, B, 0))


def ideal_basis(spec, allow_generic=True):
    """A basis of ``P_0^e0 P_I^2 P_J``.

    Uses the conjugate orbit of ``kappa`` when ``3 !| m`` and the explicit
    three-element shapes when ``3 | m``; shapes without a closed form fall
    back to the HNF basis built from the prime ideals.
    """
    F = spec.field
    ar = ideal_arithmetic(F)
    if not spec.I and not spec.J and not spec.e0:
        return IdealBasis(tuple(F.integral_basis), 1, "integral_basis", spec)
    if not F.conductor.three_divides:
        kappa, xyz = kappa_element(spec)
        elems = [kappa, galois_apply(kappa, 1), galois_apply(kappa, 2)]
        res = _verify(ar, spec, elems, "kappa_orbit", f"(x, y, z) = {xyz}")
        if res is None:
            raise NotRepresentable(f"kappa orbit does not span {spec.label()}")
        if (54 * kappa.norm()) % (spec.p_I ** 2 * spec.p_J):
            raise NotRepresentable("norm of kappa fails the divisibility check")
        return res
    for tag, elems, params in _three_mid_m_candidates(spec):
        res = _verify(ar, spec, elems, tag, f"(A, B, x) = {params}")
        if res is not None:
            return res
    if not allow_generic:
        raise NotRepresentable(f"no closed-form basis for {spec.label()}")
    A = ar.ideal_of_spec(spec)
    return IdealBasis(ar.elements(A), spec.norm, "prime_product", spec)


# -- closed-form WR verdicts ----------------------------------------------------

def ideal_wr_status(spec):
    """``(is_wr, reason)`` from the closed-form conditions.

    ``reason`` is ``"closed-form"`` for interval conditions and
    ``"proven_not_wr"`` for shapes that are never well-rounded.
    """
    m = spec.field.conductor.m
    pI, pJ = spec.p_I, spec.p_J
    if not spec.field.conductor.three_divides:
        # P_I^2 P_J, including P_I = P_{}^2 P_I and O_F itself
        t = Fraction(pI * pJ * pJ)
        return Fraction(m, 4) <= t <= 4 * m, "closed-form"
    if spec.e0 == 1:
        t = Fraction(pI * pJ * pJ)
        return Fraction(m, 36) <= t <= Fraction(4 * m, 9), "closed-form"
    return False, "proven_not_wr"


def beta_norm(F, m1, m2, m3):
    """Squared length of ``m1 + m2 beta + m3 sigma(beta)`` with ``beta = alpha - 1/3``."""
    m = F.conductor.m
    m1, m2, m3 = Fraction(m1), Fraction(m2), Fraction(m3)
    return 3 * m1 * m1 + Fraction(2, 3) * m * (m2 * m2 - m2 * m3 + m3 * m3)


def first_minimum_formula(spec):
    """Closed-form first minimum of ``P_I^2 P_J`` when ``3 !| m``."""
    m, pI, pJ = spec.field.conductor.m, spec.p_I, spec.p_J
    q = pI * pI * pJ * pJ
    return min(Fraction(3 * q), Fraction(2 * m * pI), Fraction(q, 3) + Fraction(2 * m * pI, 3))


def all_specs(F):
    """Every ideal of norm dividing ``Delta_F``."""
    r = len([p for p in conductor_primes(F.conductor.m) if p != 3])
    e0s = (0, 1, 2) if F.conductor.three_divides else (0,)
    for e0 in e0s:
        for labels in itertools.product((0, 1, 2), repeat=r):
            I = {i + 1 for i, t in enumerate(labels) if t == 2}
            J = {i + 1 for i, t in enumerate(labels) if t == 1}
            yield RamifiedSpec(F, I, J, e0)


@dataclass
class IdealCheck:
    """Closed-form verdict next to the enumeration verdict for one ideal."""

    spec: RamifiedSpec
    basis: IdealBasis
    gram: object
    covolume_ok: bool
    predicted_wr: bool
    reason: str
    enumerated_wr: bool
    first_minimum: Fraction

    @property
    def agrees(self):
        return self.covolume_ok and self.predicted_wr == self.enumerated_wr


def check_ideal(spec):
    """Build the basis, test ``det Gram = N(I)^2 Delta_F`` and compare WR verdicts."""
    ib = ideal_basis(spec)
    L = LatticeBasis3.from_field_elements(list(ib.elements))
    F = spec.field
    cov = L.gram.det() == spec.norm ** 2 * F.discriminant
    predicted, reason = ideal_wr_status(spec)
    res = is_wr_lattice(L)
    return IdealCheck(spec, ib, L.gram, cov, predicted, reason, res.is_wr, res.first_minimum)
