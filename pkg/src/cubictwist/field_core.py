"""Real cyclic cubic fields in exact arithmetic.

A field is given by a monic cubic ``x^3 + c2 x^2 + c1 x + c0`` with rational
coefficients, three real roots and a cyclic Galois group.  Elements are
stored as rational coordinates on the power basis ``{1, rho, rho^2}``.

Floating point is never used.  Real roots are isolated with a Sturm sequence
and refined by dyadic bisection, so every embedding is a certified interval.
The Galois generator is reconstructed from high-precision root approximations
and then verified exactly (see :meth:`CubicField._build_galois`).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, lcm

from . import linalg
from .arith import factorize
from .errors import (
    FieldMismatch,
    GaloisReconstructionError,
    InvalidConductorData,
    NonIntegralPolynomial,
    NoRepresentation,
    ReduciblePolynomial,
)

MAX_GALOIS_BITS = 4096


# ---------------------------------------------------------------------------
# conductor data


@dataclass(frozen=True)
class ConductorData:
    """Conductor ``m`` with ``4m = a^2 + 3b^2`` under the usual congruences."""

    m: int
    a: int
    b: int

    def __post_init__(self):
        m, a, b = self.m, self.a, self.b
        if m <= 0 or b <= 0:
            raise InvalidConductorData(f"need m > 0 and b > 0, got m={m}, b={b}")
        if 4 * m != a * a + 3 * b * b:
            raise InvalidConductorData(f"4m != a^2 + 3b^2 for (m, a, b) = ({m}, {a}, {b})")
        if m % 3:
            if a % 3 != 2 or b % 3 != 0:
                raise InvalidConductorData(f"3 does not divide m: need a = 2 mod 3 and 3 | b, got a={a}, b={b}")
        else:
            if a % 9 != 6 or b % 9 not in (3, 6):
                raise InvalidConductorData(f"3 divides m: need a = 6 mod 9 and b = 3, 6 mod 9, got a={a}, b={b}")

    @property
    def three_divides(self):
        return self.m % 3 == 0


def conductor_primes(m):
    """Primes ``p = 1 mod 3`` of a valid conductor ``m`` (the factor 9 excluded).

    Raises NoRepresentation if ``m`` is not ``p1...pr`` or ``9 p1...pr``.
    """
    if m < 7:
        raise NoRepresentation(f"{m} is not a cyclic cubic conductor")
    factors, _ = factorize(m)
    three = factors.pop(3, 0)
    if three not in (0, 2) or any(e != 1 or p % 3 != 1 for p, e in factors.items()):
        raise NoRepresentation(f"{m} is not a cyclic cubic conductor")
    return sorted(factors)


def is_valid_conductor(m):
    try:
        conductor_primes(m)
    except NoRepresentation:
        return False
    return True


def all_conductor_params(m):
    """Every ``(a, b)`` pair for ``m``; one per cyclic cubic field of conductor ``m``.

    Ordered by ``b`` then ``a``.
    """
    conductor_primes(m)
    out = []
    b = 1
    while 3 * b * b <= 4 * m:
        a2 = 4 * m - 3 * b * b
        r = isqrt(a2)
        if r * r == a2:
            for a in sorted({-r, r}):
                try:
                    out.append(ConductorData(m, a, b))
                except InvalidConductorData:
                    pass
        b += 1
    if not out:
        raise NoRepresentation(f"no (a, b) with 4*{m} = a^2 + 3b^2 under the congruence conditions")
    return out


def conductor_params(m):
    """The first ``(a, b)`` for conductor ``m`` (smallest ``b``).

    For prime ``m`` (or ``9p``) there is exactly one field and one pair;
    composite conductors have several, see :func:`all_conductor_params`.
    """
    return all_conductor_params(m)[0]


# ---------------------------------------------------------------------------
# polynomial helpers (coefficient lists, lowest degree first)


def _poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_rem(a, b):
    a = [Fraction(x) for x in a]
    b = _poly_trim(b)
    while len(_poly_trim(a)) >= len(b):
        a = _poly_trim(a)
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a = _poly_trim(a)
        if not a:
            break
    return _poly_trim(a)


def _poly_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _sign(x):
    return (x > 0) - (x < 0)


def cubic_discriminant(c0, c1, c2):
    """Discriminant of ``x^3 + c2 x^2 + c1 x + c0``."""
    return (c2 * c2 * c1 * c1 - 4 * c1 ** 3 - 4 * c2 ** 3 * c0
            - 27 * c0 * c0 + 18 * c2 * c1 * c0)


class _RootIsolation:
    """Certified isolating intervals for the three real roots of a cubic.

    Roots are kept as dyadic brackets ``[klo/2^e, khi/2^e]`` with a strict sign
    change of the (integer-scaled) polynomial across the bracket.
    """

    def __init__(self, coeffs):
        c0, c1, c2 = coeffs
        den = lcm(c0.denominator, c1.denominator, c2.denominator)
        self.ints = [int(c0 * den), int(c1 * den), int(c2 * den), den]
        self._lock = threading.Lock()
        self._brackets = self._isolate(coeffs)

    def _sign_at(self, k, e):
        a0, a1, a2, a3 = self.ints
        t = 1 << e
        return _sign(((a3 * k + a2 * t) * k + a1 * t * t) * k + a0 * t * t * t)

    def _isolate(self, coeffs):
        c0, c1, c2 = coeffs
        p = [c0, c1, c2, Fraction(1)]
        dp = [c1, 2 * c2, Fraction(3)]
        seq = [p, dp]
        while len(_poly_trim(seq[-1])) > 1:
            r = _poly_rem(seq[-2], seq[-1])
            if not r:
                break
            seq.append([-x for x in r])

        def changes(x):
            vals = [_sign(_poly_eval(q, x)) for q in seq]
            vals = [v for v in vals if v]
            return sum(1 for u, v in zip(vals, vals[1:]) if u != v)

        bound = 1 + max(abs(c0), abs(c1), abs(c2))
        k = 1
        while (1 << k) < bound:
            k += 1
        stack = [(Fraction(-(1 << k)), Fraction(1 << k))]
        found = []
        while stack:
            lo, hi = stack.pop()
            n = changes(lo) - changes(hi)
            if n == 0:
                continue
            if n == 1:
                found.append((lo, hi))
                continue
            mid = (lo + hi) / 2
            stack.append((lo, mid))
            stack.append((mid, hi))
        found.sort()
        brackets = []
        for lo, hi in found:
            e = max(lo.denominator.bit_length(), hi.denominator.bit_length())
            klo, khi = int(lo * (1 << e)), int(hi * (1 << e))
            if self._sign_at(klo, e) == 0 or self._sign_at(khi, e) == 0:
                raise ReduciblePolynomial("defining polynomial has a dyadic rational root")
            brackets.append([klo, khi, e])
        return brackets

    def bracket(self, i, bits):
        """Rational bracket ``(lo, hi)`` of root ``i`` with width <= 2^-bits."""
        with self._lock:
            klo, khi, e = self._brackets[i]
            slo = self._sign_at(klo, e)
            while (khi - klo) << bits > (1 << e):
                e += 1
                klo, khi = 2 * klo, 2 * khi
                mid = (klo + khi) // 2
                sm = self._sign_at(mid, e)
                if sm == 0:
                    raise ReduciblePolynomial("defining polynomial has a dyadic rational root")
                if sm == slo:
                    klo = mid
                else:
                    khi = mid
            self._brackets[i] = [klo, khi, e]
            return Fraction(klo, 1 << e), Fraction(khi, 1 << e)


def _quadratic_range(c, lo, hi):
    """Exact range of ``c0 + c1 t + c2 t^2`` for ``t`` in ``[lo, hi]``."""
    c0, c1, c2 = c
    vals = [c0 + c1 * lo + c2 * lo * lo, c0 + c1 * hi + c2 * hi * hi]
    if c2 != 0:
        t = -c1 / (2 * c2)
        if lo < t < hi:
            vals.append(c0 + c1 * t + c2 * t * t)
    return min(vals), max(vals)


@dataclass(frozen=True)
class RealInterval:
    lo: Fraction
    hi: Fraction

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, x):
        return self.lo <= x <= self.hi

    def sign(self):
        """+1, -1, or 0 when the interval straddles zero."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return 0

    def __float__(self):
        return float(self.mid)


# ---------------------------------------------------------------------------
# fields and elements


class CubicField:
    """A real cyclic cubic field ``Q(rho)``.

    ``coeffs`` are ``(c0, c1, c2)`` of the monic ``x^3 + c2 x^2 + c1 x + c0``.
    ``discriminant`` (the field discriminant) and ``integral_basis`` (three
    coordinate triples) are optional metadata supplied by the constructors
    that know them.
    """

    def __init__(self, coeffs, conductor=None, discriminant=None, integral_basis=None, label=None):
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        c0, c1, c2 = self.coeffs
        self.conductor = conductor
        self.label = label
        self.poly_discriminant = cubic_discriminant(c0, c1, c2)
        if self.poly_discriminant == 0:
            raise ReduciblePolynomial(f"{self.poly_str()} has a repeated root")
        if self.poly_discriminant < 0:
            raise ValueError(f"{self.poly_str()} is not totally real")
        num, den = self.poly_discriminant.numerator, self.poly_discriminant.denominator
        if isqrt(num) ** 2 != num or isqrt(den) ** 2 != den:
            raise ValueError(f"{self.poly_str()} has non-square discriminant; not a cyclic cubic")
        # x^3 = r3 . (1, x, x^2), x^4 = r4 . (1, x, x^2)
        self._r3 = (-c0, -c1, -c2)
        self._r4 = (c2 * c0, c2 * c1 - c0, c2 * c2 - c1)
        self._roots = _RootIsolation(self.coeffs)
        self._check_irreducible()
        if discriminant is None and conductor is not None:
            discriminant = conductor.m ** 2
        self.discriminant = discriminant
        self.galois = self._build_galois()
        self._galois2 = linalg.matmul(self.galois, self.galois)
        # sigma(rho) evaluated at the smallest root is the largest root (t <= 0 convention)
        self.embedding_order = (0, 2, 1)
        self.integral_basis = None
        if integral_basis is not None:
            self.integral_basis = tuple(self._coerce(b) for b in integral_basis)

    # -- construction helpers -------------------------------------------------

    def poly_str(self):
        c0, c1, c2 = self.coeffs
        terms = ["x^3"]
        for c, mono in ((c2, "x^2"), (c1, "x"), (c0, "")):
            if c == 0:
                continue
            sgn = "-" if c < 0 else "+"
            mag = abs(c)
            body = mono if (mag == 1 and mono) else (f"{mag}{'*' + mono if mono else ''}" if mono else f"{mag}")
            if mag != 1 and mono and mag.denominator != 1:
                body = f"({mag})*{mono}"
            terms.append(f"{sgn} {body}")
        return " ".join(terms)

    def _check_irreducible(self):
        # a rational root of the monic cubic is y/den with y an integer root of the scaled monic cubic
        a0, a1, a2, den = self._roots.ints
        for i in range(3):
            lo, hi = self._roots.bracket(i, den.bit_length() + 2)
            for y in range(int((lo * den).__floor__()), int((hi * den).__ceil__()) + 1):
                x = Fraction(y, den)
                if _poly_eval(list(self.coeffs) + [Fraction(1)], x) == 0:
                    raise ReduciblePolynomial(f"{self.poly_str()} has the rational root {x}")

    def root_bracket(self, i, bits):
        return self._roots.bracket(i, bits)

    def _build_galois(self):
        """Numeric-then-verify reconstruction of sigma on the power basis.

        Solve ``c0 + c1 r_i + c2 r_i^2 = r_{pi(i)}`` with rational approximations
        of the roots, round each coordinate by continued fractions with
        denominator bound ``2 |disc|``, then verify exactly.  ``pi`` sends the
        smallest root to the largest, which fixes the sign convention
        ``(b - s b)(s b - s^2 b)(s^2 b - b) <= 0``.
        """
        a0, a1, a2, a3 = self._roots.ints
        # discriminant of the integer-scaled monic polynomial
        dmon = abs(cubic_discriminant(Fraction(a0 * a3 * a3), Fraction(a1 * a3), Fraction(a2)))
        qbound = max(2 * int(dmon), 2)
        target = (2, 0, 1)
        bits = 128 + 2 * qbound.bit_length()
        while bits <= MAX_GALOIS_BITS:
            r = [self._roots.bracket(i, bits)[0] for i in range(3)]
            vand = [[Fraction(1), ri, ri * ri] for ri in r]
            try:
                approx = linalg.solve(vand, [r[t] for t in target])
            except ZeroDivisionError:
                bits *= 2
                continue
            cand = tuple(c.limit_denominator(qbound) for c in approx)
            g = FieldElement(self, cand)
            if self._verify_generator(g):
                col1 = cand
                col2 = (g * g).coords
                return [[Fraction(1), col1[0], col2[0]],
                        [Fraction(0), col1[1], col2[1]],
                        [Fraction(0), col1[2], col2[2]]]
            bits *= 2
        raise GaloisReconstructionError(
            f"could not reconstruct a Galois generator for {self.poly_str()} within {MAX_GALOIS_BITS} bits")

    def _verify_generator(self, g):
        c0, c1, c2 = self.coeffs
        if g.coords == (0, 1, 0):
            return False
        if g * g * g + c2 * (g * g) + c1 * g + c0 != self.zero:
            return False
        # exactness settled; now pin which root sigma(rho) is at the smallest root
        bits = 16
        while bits <= MAX_GALOIS_BITS:
            lo, hi = self._roots.bracket(0, bits)
            vlo, vhi = _quadratic_range(g.coords, lo, hi)
            lo2, hi2 = self._roots.bracket(1, bits)
            lo3, hi3 = self._roots.bracket(2, bits)
            near2 = not (vhi < lo2 or vlo > hi2)
            near3 = not (vhi < lo3 or vlo > hi3)
            if near3 != near2:
                return near3
            bits *= 2
        return False

    # -- element constructors -------------------------------------------------

    def _coerce(self, x):
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise FieldMismatch("element belongs to a different field")
            return x
        if isinstance(x, (int, Fraction)):
            return FieldElement(self, (Fraction(x), Fraction(0), Fraction(0)))
        coords = tuple(Fraction(c) for c in x)
        if len(coords) != 3:
            raise ValueError("need three power-basis coordinates")
        return FieldElement(self, coords)

    def __call__(self, *coords):
        """``F(c0, c1, c2)`` or ``F(int)`` or ``F(element)``."""
        if len(coords) == 1:
            return self._coerce(coords[0])
        return self._coerce(coords)

    @property
    def one(self):
        return self(1)

    @property
    def zero(self):
        return self(0)

    @property
    def rho(self):
        return self(0, 1, 0)

    # -- arithmetic kernels -----------------------------------------------------

    def _mul(self, a, b):
        d = [Fraction(0)] * 5
        for i in range(3):
            if a[i] == 0:
                continue
            for j in range(3):
                if b[j]:
                    d[i + j] += a[i] * b[j]
        r3, r4 = self._r3, self._r4
        return (d[0] + d[3] * r3[0] + d[4] * r4[0],
                d[1] + d[3] * r3[1] + d[4] * r4[1],
                d[2] + d[3] * r3[2] + d[4] * r4[2])

    def mult_matrix(self, x):
        """Matrix of multiplication by ``x`` on the power basis (columns = images)."""
        x = self._coerce(x)
        cols = [self._mul(x.coords, e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        return [[cols[j][i] for j in range(3)] for i in range(3)]

    def integral_coordinates(self, x):
        """Coordinates of ``x`` in the integral basis (rationals)."""
        if self.integral_basis is None:
            raise ValueError("field has no integral basis")
        key = tuple(b.coords for b in self.integral_basis)
        if getattr(self, "_ib_key", None) != key:
            cols = linalg.transpose([list(c) for c in key])
            self._ib_inv = linalg.inverse(cols)
            self._ib_key = key
        return linalg.matvec(self._ib_inv, list(self._coerce(x).coords))

    def min_poly_value(self, x):
        x = self._coerce(x)
        c0, c1, c2 = self.coeffs
        return x * x * x + c2 * (x * x) + c1 * x + c0

    def __repr__(self):
        tag = f" [{self.label}]" if self.label else ""
        return f"CubicField({self.poly_str()}{tag})"


class FieldElement:
    """Element of a :class:`CubicField` as power-basis coordinates."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(Fraction(c) for c in coords)

    def _other(self, y):
        if isinstance(y, FieldElement):
            if y.field is not self.field:
                raise FieldMismatch("elements belong to different fields")
            return y
        if isinstance(y, (int, Fraction)):
            return FieldElement(self.field, (Fraction(y), 0, 0))
        return NotImplemented

    def __add__(self, y):
        y = self._other(y)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, y.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, y):
        y = self._other(y)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coords, y.coords)))

    def __rsub__(self, y):
        return -(self - y)

    def __mul__(self, y):
        if isinstance(y, (int, Fraction)):
            return FieldElement(self.field, tuple(a * y for a in self.coords))
        y = self._other(y)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field._mul(self.coords, y.coords))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        m = self.field.mult_matrix(self)
        return FieldElement(self.field, linalg.solve(m, [1, 0, 0]))

    def __truediv__(self, y):
        if isinstance(y, (int, Fraction)):
            if y == 0:
                raise ZeroDivisionError("division by zero")
            return FieldElement(self.field, tuple(a / y for a in self.coords))
        y = self._other(y)
        if y is NotImplemented:
            return y
        return self * y.inverse()

    def __rtruediv__(self, y):
        return self.inverse() * y

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = self.field.one
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, y):
        if isinstance(y, (int, Fraction)):
            return self.coords == (Fraction(y), 0, 0)
        if not isinstance(y, FieldElement):
            return NotImplemented
        return self.field is y.field and self.coords == y.coords

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def is_zero(self):
        return not any(self.coords)

    def is_rational(self):
        return self.coords[1] == 0 and self.coords[2] == 0

    def __repr__(self):
        return "FieldElement(" + ", ".join(str(c) for c in self.coords) + ")"

    # -- invariants -------------------------------------------------------------

    def trace(self):
        return trace_and_norm(self)[0]

    def norm(self):
        return trace_and_norm(self)[1]

    def conj(self, power=1):
        return galois_apply(self, power)


def elem_arith(x, y, op):
    """Dispatch form of the field operations (``add``, ``sub``, ``mul``, ``inv``, ``scalar_mul``)."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    if op == "scalar_mul":
        return x * Fraction(y)
    raise ValueError(f"unknown op {op!r}")


def trace_and_norm(x):
    """Exact trace and norm from the multiplication matrix."""
    m = x.field.mult_matrix(x)
    return m[0][0] + m[1][1] + m[2][2], linalg.det3(m)


def galois_apply(x, power=1):
    power %= 3
    if power == 0:
        return x
    g = x.field.galois if power == 1 else x.field._galois2
    return FieldElement(x.field, linalg.matvec(g, list(x.coords)))


def conjugates(x):
    return x, galois_apply(x, 1), galois_apply(x, 2)


def embed(x, precision_bits=64):
    """Certified intervals containing ``(x, sigma(x), sigma^2(x))`` at the smallest root.

    Each width is at most ``2^(1 - precision_bits) * max(1, |value|)``.
    """
    if precision_bits < 32:
        raise ValueError("precision_bits must be >= 32")
    F = x.field
    out = []
    for root in F.embedding_order:
        bits = precision_bits + 8
        while True:
            lo, hi = F.root_bracket(root, bits)
            vlo, vhi = _quadratic_range(x.coords, lo, hi)
            scale = max(Fraction(1), abs(vlo), abs(vhi))
            if (vhi - vlo) * (1 << (precision_bits - 1)) <= scale:
                out.append(RealInterval(vlo, vhi))
                break
            bits *= 2
    return out


def sign_pattern(x):
    """Exact signs of the three conjugates, in embedding order."""
    if x.is_zero():
        return (0, 0, 0)
    bits = 32
    while True:
        ivs = embed(x, bits)
        signs = tuple(iv.sign() for iv in ivs)
        if all(signs):
            return signs
        bits *= 2


def is_totally_positive(x):
    return sign_pattern(x) == (1, 1, 1)


def field_from_conductor(cd):
    """The cyclic cubic field of conductor data ``cd`` with its standard integral basis."""
    if not isinstance(cd, ConductorData):
        cd = ConductorData(*cd)
    m, a = Fraction(cd.m), Fraction(cd.a)
    if cd.m % 3:
        c2, c1, c0 = Fraction(-1), (1 - m) / 3, -(m * (a - 3) + 1) / 27
    else:
        c2, c1, c0 = Fraction(0), -m / 3, -a * m / 27
    if any(c.denominator != 1 for c in (c0, c1, c2)):
        raise NonIntegralPolynomial(f"defining polynomial for {cd} has non-integral coefficients")
    F = CubicField((c0, c1, c2), conductor=cd, label=f"conductor {cd.m} (a={cd.a}, b={cd.b})")
    rho = F.rho
    if cd.m % 3:
        basis = [rho, galois_apply(rho, 1), galois_apply(rho, 2)]
    else:
        basis = [F.one, rho, galois_apply(rho, 1)]
    F.integral_basis = tuple(basis)
    return F


def is_algebraic_integer(x):
    """Whether the characteristic polynomial of ``x`` has integer coefficients."""
    t = x.trace()
    e2 = (t * t - (x * x).trace()) / 2
    return all(c.denominator == 1 for c in (t, e2, x.norm()))


def different_generator_candidate(F):
    """``df'(rho)`` for the defining polynomial."""
    c0, c1, c2 = F.coeffs
    return F(c1, 2 * c2, 3)
