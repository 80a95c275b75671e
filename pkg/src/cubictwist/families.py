"""Shanks, Washington and Kishi families of cyclic cubic fields.

Each instance carries its defining polynomial, the squarefree gates that
select an integral basis, and the published good bases together with
closed-form Gram entries (where known) as exact rationals in ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction as Q

from . import linalg
from .arith import Tri, squarefree
from .errors import ConditionOutOfRange, GateFailed, InvalidSpec
from .field_core import CubicField, galois_apply, is_algebraic_integer
from .twist_engine import test_good_basis

FAMILIES = ("shanks", "washington", "kishi")

CASES = {
    "shanks": ("nonmonogenic",),
    "washington": ("1", "2a", "2b"),
    "kishi": ("even", "odd-a", "odd-b", "odd-c", "7_25-a", "7_25-b",
              "16-a", "16-b", "34_52", "43"),
}


def _sgn(n):
    return (n > 0) - (n < 0)


def defining_coefficients(family, n):
    """``(c0, c1, c2)`` of ``x^3 + c2 x^2 + c1 x + c0``."""
    if family == "shanks":
        return (-1, -(n + 3), -n)
    if family == "washington":
        return (-1, -n * n, -(n ** 3 - 2 * n * n + 3 * n - 3))
    if family == "kishi":
        return (-1, -(n ** 3 + 2 * n * n + 3 * n + 3), -n * (n * n + n + 3) * (n * n + 2))
    raise InvalidSpec(f"unknown family {family!r}")


def polynomial_discriminant(family, n):
    """Closed form of ``disc(df)``."""
    if family == "shanks":
        return (n * n + 3 * n + 9) ** 2
    if family == "washington":
        return (n - 1) ** 2 * (n * n + 3) ** 2 * (n * n - 3 * n + 3) ** 2
    if family == "kishi":
        return (n * n + 1) ** 2 * (n * n + 3) ** 2 * (n ** 4 + n ** 3 + 4 * n * n + 3) ** 2
    raise InvalidSpec(f"unknown family {family!r}")


def kishi_N(n):
    d1 = n % 2
    d2 = 0 if n % 3 == 2 else 1
    num = (n * n + 3) * (n ** 4 + n ** 3 + 4 * n * n + 3)
    den = 4 ** d1 * 9 ** d2
    if num % den:
        raise ArithmeticError(f"N is not an integer at n={n}")
    return num // den


def kishi_class(n):
    """Residue class label selecting the Kishi integral-basis row and ``e``."""
    if n % 6 in (0, 2) or n % 18 in (4, 10):
        return "even", 1
    if n % 18 in (1, 13) or n % 6 in (3, 5):
        return "odd", 4
    r = n % 54
    if r in (7, 25):
        return "7_25", 12
    if r == 16:
        return "16", 27
    if r in (34, 52):
        return "34_52", 3
    if r == 43:
        return "43", 108
    raise AssertionError("residue classes mod 54 are exhaustive")


def family_gates(family, n):
    """Named three-valued conditions for the instance."""
    g = {}
    if family == "shanks":
        s = n * n + 3 * n + 9
        g["n >= -1"] = Tri.of(n >= -1)
        g["n^2+3n+9 squarefree"] = squarefree(s)
        nm = Tri.of(n % 27 in (3, 21) and n > 12 and s % 27 == 0)
        if nm:
            nm = squarefree(s // 27)
        g["n = 3,21 (mod 27), n > 12, (n^2+3n+9)/27 squarefree"] = nm
    elif family == "washington":
        delta = 1 if n % 3 == 0 else 0
        prodv = (n * n + 3) * (n * n - 3 * n + 3)
        g["n != 1"] = Tri.of(n != 1)
        if n % 2 == 0:
            g["n even, (n^2+3)(n^2-3n+3)/9^d squarefree"] = squarefree(prodv // 9 ** delta)
        else:
            den = 4 * 9 ** delta
            g["n odd, (n^2+3)(n^2-3n+3)/(4*9^d) squarefree"] = (
                squarefree(prodv // den) if prodv % den == 0 else Tri.FALSE)
        g["n^2-3n+3 divides Delta_F"] = Tri.UNKNOWN
    elif family == "kishi":
        g["N squarefree"] = squarefree(kishi_N(n))
    else:
        raise InvalidSpec(f"unknown family {family!r}")
    return g


@dataclass
class FamilyInstance:
    family: str
    n: int
    field: CubicField
    integral_basis: tuple = None
    basis_case: str = "basis_unknown"
    conditions_met: dict = dc_field(default_factory=dict)
    discriminant: int = None
    galois_match: str = None

    def gate(self):
        return self.basis_case != "basis_unknown"


def _mobius_image(family, n, F):
    rho = F.rho
    if family == "washington":
        return -(rho + 1) / ((n * n - n + 1) * rho + n)
    if family == "kishi":
        return -(n * rho + 1) / ((n ** 4 + n ** 3 + 3 * n * n + n + 1) * rho + (n * n + n + 1))
    return None


def _integral_basis_for(family, n, F, gates):
    """``(case tag, basis, Delta_F)`` or ``("basis_unknown", None, None)``."""
    rho = F.rho
    r2 = rho * rho
    disc = polynomial_discriminant(family, n)
    if family == "shanks":
        if gates["n^2+3n+9 squarefree"]:
            return "monogenic", (F.one, rho, r2), disc
        if gates["n = 3,21 (mod 27), n > 12, (n^2+3n+9)/27 squarefree"]:
            return "nonmonogenic", (F.one, rho, (1 + rho + r2) / 3), disc // 9
        return "basis_unknown", None, None
    if family == "washington":
        if n % 2 == 0:
            if gates["n even, (n^2+3)(n^2-3n+3)/9^d squarefree"]:
                return ("even", (F.one, rho, (r2 - 1) / (n - 1)),
                        (n * n + 3) ** 2 * (n * n - 3 * n + 3) ** 2)
        elif gates["n odd, (n^2+3)(n^2-3n+3)/(4*9^d) squarefree"]:
            return ("odd", ((r2 - 1) / (2 * n - 2), (r2 + rho) / 2, r2),
                    (n * n + 3) ** 2 * (n * n - 3 * n + 3) ** 2 // 16)
        return "basis_unknown", None, None
    if family == "kishi":
        if not gates["N squarefree"]:
            return "basis_unknown", None, None
        cls, e = kishi_class(n)
        theta = kishi_theta(n, F)
        rows = {
            "even": (theta, rho, r2),
            "odd": (theta / 2, (r2 + rho) / 2, r2),
            "7_25": (theta / 6, (r2 + rho) / 2, r2),
            "16": (theta / 9, (2 * r2 + rho) / 3, r2),
            "34_52": (theta / 3, rho, r2),
            "43": (theta / 18, (5 * r2 + rho) / 6, r2),
        }
        dF = (n * n + 3) ** 2 * (n ** 4 + n ** 3 + 4 * n * n + 3) ** 2
        if dF % (e * e):
            raise ArithmeticError("Kishi discriminant is not divisible by e^2")
        return cls, rows[cls], dF // (e * e)
    raise InvalidSpec(f"unknown family {family!r}")


def kishi_theta(n, F):
    rho = F.rho
    return ((3 * n * n + n + 3) * rho * rho + (n * n + n + 2) * rho + 1) / (n * n + 1)


def basis_discriminant(F, basis):
    """``det(coords)^2 * disc(df)``: the discriminant of the lattice spanned by ``basis``."""
    d = linalg.det3([list(b.coords) for b in basis])
    return d * d * F.poly_discriminant


def make_family_field(family, n):
    """Build the family member at ``n`` with gates, integral basis and Galois cross-check."""
    if family not in FAMILIES:
        raise InvalidSpec(f"unknown family {family!r}; expected one of {FAMILIES}")
    n = int(n)
    if family == "shanks" and n < -1:
        raise ConditionOutOfRange("the Shanks family is parametrised by n >= -1")
    F = CubicField(defining_coefficients(family, n), label=f"{family} n={n}")
    if F.poly_discriminant != polynomial_discriminant(family, n):
        raise ArithmeticError("polynomial discriminant disagrees with the closed form")
    gates = family_gates(family, n)
    case, basis, dF = _integral_basis_for(family, n, F, gates)
    if family == "washington":
        gates["n^2-3n+3 divides Delta_F"] = Tri.of(dF is not None and dF % (n * n - 3 * n + 3) == 0)
    inst = FamilyInstance(family, n, F, basis, case, gates, dF)
    if basis is not None:
        if not all(is_algebraic_integer(b) for b in basis):
            raise ArithmeticError(f"integral basis element is not integral for {family} n={n}")
        if basis_discriminant(F, basis) != dF:
            raise ArithmeticError(f"integral basis discriminant mismatch for {family} n={n}")
        F.integral_basis = tuple(basis)
        F.discriminant = dF
    img = _mobius_image(family, n, F)
    if img is not None:
        if img == galois_apply(F.rho, 1):
            inst.galois_match = "sigma"
        elif img == galois_apply(F.rho, 2):
            inst.galois_match = "sigma^2"
        else:
            raise ArithmeticError("Moebius generator is not a Galois automorphism")
    return inst


def family_integral_basis(inst):
    if inst.integral_basis is None:
        failed = [k for k, v in inst.conditions_met.items() if v is not Tri.TRUE]
        raise GateFailed(f"no integral basis for {inst.family} n={inst.n}; "
                         f"conditions not met: {failed}")
    return inst.integral_basis, inst.basis_case


@dataclass
class GoodBasis:
    case: str
    basis: tuple
    expected_gram: tuple = None  # (s, u, v, w) when a closed form is published


def _shanks_good(inst):
    n, F = inst.n, inst.field
    rho = F.rho
    if inst.basis_case != "nonmonogenic":
        raise ConditionOutOfRange("the Shanks good basis needs the integral basis {1, rho, (1+rho+rho^2)/3}")
    t = n * n + 3 * n + 9
    gram = (Q(1, 9) * (n * n + 3 * n + 3) * t, Q(-1, 27) * (n * n + 9 * n + 9) * t,
            Q(1, 27) * (n * n - 3 * n - 9) * t, Q(2, 3) * t)
    return ((1 + rho + rho * rho) / 3, rho, rho + rho * rho), gram


def _washington_good(inst, case):
    n, F = inst.n, inst.field
    rho = F.rho
    r2 = rho * rho
    A = (n * n - 3 * n + 3) * (n * n + 3)
    if case == "1":
        if inst.basis_case != "even":
            raise ConditionOutOfRange("case 1 needs even n with the squarefree gate")
        if n == 2:
            raise ConditionOutOfRange("case 1 excludes n = 2")
        s = (n - 1) ** 2 * A * (n * n - n + 3)
        u = n * (n - 1) ** 2 * A
        return (rho, (r2 - 1) / (n - 1) - rho, r2), (Q(s), Q(u), Q(-u), Q(u))
    if inst.basis_case != "odd":
        raise ConditionOutOfRange(f"case {case} needs odd n with the squarefree gate")
    g = ((n - 2) * r2) / (2 * n - 2) + rho / 2 + Q(1, 2 * n - 2)
    if case == "2a":
        if n < 5:
            raise ConditionOutOfRange("case 2a needs n >= 5")
        gram = (Q(A, 16) * (n ** 4 - 5 * n ** 3 + 10 * n * n - 11 * n + 1),
                Q(A, 32) * (n * n - 2 * n - 1) * (n * n - 4 * n + 7),
                Q(A, 32) * (n ** 4 - 8 * n ** 3 + 16 * n * n - 16 * n - 1),
                Q(A, 64) * (n - 1) * (n ** 3 - 11 * n * n + 19 * n - 1))
        return (r2, g, (r2 + rho) / 2), gram
    if case == "2b":
        if n < 0:
            raise ConditionOutOfRange("case 2b needs n >= 0")
        off = Q(A, 64) * (n - 3) * (n - 1) * (n * n - 4 * n + 7)
        gram = (Q(A, 32) * (n * n - 4 * n + 7) * (n * n - 2 * n + 3), off, off, off)
        return (g, -(r2 - 1) / (2 * n - 2) + rho, (r2 + rho) / 2), gram
    raise InvalidSpec(f"unknown Washington case {case!r}")


def _kishi_good(inst, case):
    n, F = inst.n, inst.field
    rho = F.rho
    r2 = rho * rho
    th = kishi_theta(n, F)
    sg = _sgn(n)
    q = n * n + 1
    cls = inst.basis_case
    family_of = {"even": "even", "odd-a": "odd", "odd-b": "odd", "odd-c": "odd",
                 "7_25-a": "7_25", "7_25-b": "7_25", "16-a": "16", "16-b": "16",
                 "34_52": "34_52", "43": "43"}
    if case not in family_of:
        raise InvalidSpec(f"unknown Kishi row {case!r}")
    if cls != family_of[case]:
        raise ConditionOutOfRange(f"row {case} needs the residue class {family_of[case]}, "
                                  f"n={n} is in class {cls}")

    def need(ok, text):
        if not ok:
            raise ConditionOutOfRange(f"row {case} needs {text}")

    if case == "even":
        need(n != 0, "n != 0")
        return ((n * r2 + (n * n + n + 2) * rho + 1) / q, rho, r2)
    if case == "odd-a":
        need(abs(n) >= 3, "|n| >= 3")
        return (-sg * (n * r2 + (2 * n * n + n + 3) * rho + 1) / (2 * q), (r2 + rho) / 2, sg * rho)
    if case == "odd-b":
        need(abs(n) != 1, "|n| != 1")
        return (((n * n - sg * n + 1) * r2 - sg * (n * n + n + 2) * rho - sg) / (2 * q),
                (r2 + rho) / 2, -sg * r2)
    if case == "odd-c":
        need(n == -1, "n = -1")
        return (((n * n - n + 1) * r2 - (n * n + n + 2) * rho - 1) / (2 * q), (r2 + rho) / 2, -r2)
    if case == "7_25-a":
        need(n <= -8, "n <= -8")
        return (th / 6, (r2 + rho) / 2, r2)
    if case == "7_25-b":
        need(n <= -2, "n <= -2")
        return (th / 6, (-n * r2 + (2 * n * n - n + 1) * rho - 1) / (6 * q),
                (-n * r2 - (n * n + n + 2) * rho - 1) / (3 * q))
    if case == "16-a":
        need(n >= 7 or n <= -6, "n >= 7 or n <= -6")
        return ((r2 - rho) / 3, r2, -th / 9)
    if case == "16-b":
        need(n >= 5 or n <= -2, "n >= 5 or n <= -2")
        # third vector is theta/3 - rho^2; a leading -n rho^2 would leave O_F
        return (th / 9, (n * r2 + (4 * n * n + n + 5) * rho + 1) / (9 * q),
                (n * r2 + (n * n + n + 2) * rho + 1) / (3 * q))
    if case == "34_52":
        need(abs(n) >= 6, "|n| >= 6")
        return ((n * r2 + (n * n + n + 2) * rho + 1) / (3 * q), rho, r2)
    # n = 43 (mod 54): theta/18 makes the basis unimodular over the integral basis
    return (r2, (-r2 + rho) / 6, -th / 18)


def family_good_basis(inst, case):
    """The published good basis for ``case`` and its closed-form Gram, if any."""
    if inst.integral_basis is None:
        raise GateFailed(f"{inst.family} n={inst.n}: integral basis gate failed")
    case = str(case)
    if inst.family == "shanks":
        if case != "nonmonogenic":
            raise InvalidSpec(f"unknown Shanks case {case!r}")
        basis, gram = _shanks_good(inst)
    elif inst.family == "washington":
        basis, gram = _washington_good(inst, case)
    else:
        basis, gram = _kishi_good(inst, case), None
    return GoodBasis(case, tuple(basis), gram)


def unimodular_over_integral_basis(inst, basis):
    """Whether ``basis`` spans exactly the ring of integers."""
    F = inst.field
    rows = [F.integral_coordinates(b) for b in basis]
    if any(x.denominator != 1 for r in rows for x in r):
        return False
    return abs(linalg.det3(rows)) == 1


def applicable_cases(inst):
    """Cases whose conditions hold at this instance."""
    out = []
    for case in CASES[inst.family]:
        try:
            family_good_basis(inst, case)
        except (ConditionOutOfRange, GateFailed):
            continue
        out.append(case)
    return out


def washington_principal_generator(inst):
    """``(rho^2 - 1)/(n - 1) - n rho``, a generator of the ideal of norm ``n^2 - 3n + 3``."""
    if inst.family != "washington":
        raise InvalidSpec("the principal generator belongs to the Washington family")
    n, F = inst.n, inst.field
    target = n * n - 3 * n + 3
    if inst.discriminant is None or inst.discriminant % target:
        raise GateFailed(f"n^2-3n+3 = {target} does not divide the field discriminant")
    rho = F.rho
    g = (rho * rho - 1) / (n - 1) - n * rho
    if g.norm() != -target:
        raise ArithmeticError(f"norm of the generator is {g.norm()}, expected {-target}")
    return g


@dataclass
class CaseVerdict:
    family: str
    n: int
    case: str
    basis: tuple
    report: object
    unimodular: bool
    expected_gram: tuple = None

    @property
    def gram_match(self):
        """Entry-for-entry agreement with the closed form; None when none is published."""
        if self.expected_gram is None:
            return None
        g = self.report.twisted_gram
        return g is not None and g.has_equal_diagonal() and (g.s11, g.u, g.v, g.w) == self.expected_gram

    @property
    def ok(self):
        return self.report.is_good and self.unimodular and self.gram_match is not False


def verify_case(inst, case):
    """Run the good-basis test on a published basis and compare with its closed form."""
    gb = family_good_basis(inst, case)
    rep = test_good_basis(inst.field, *gb.basis)
    return CaseVerdict(inst.family, inst.n, gb.case, gb.basis, rep,
                       unimodular_over_integral_basis(inst, gb.basis), gb.expected_gram)
