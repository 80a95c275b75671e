"""Rank-3 lattice geometry: Gram matrices, the well-rounded criterion,
twist coefficients and an exact shortest-vector enumerator."""

from __future__ import annotations

import itertools
from math import isqrt
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import NamedTuple, Optional

from . import linalg
from .errors import BudgetExceeded, DegenerateGram, NotWR, UnequalDiagonal

DEFAULT_CANDIDATE_CAP = 2_000_000


@dataclass(frozen=True)
class GramMatrix3:
    """Symmetric 3x3 Gram matrix; ``u, v, w`` are <x,y>, <x,z>, <y,z>."""

    s11: Fraction
    s22: Fraction
    s33: Fraction
    u: Fraction
    v: Fraction
    w: Fraction

    def __post_init__(self):
        for name in ("s11", "s22", "s33", "u", "v", "w"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def from_matrix(cls, m):
        if m[0][1] != m[1][0] or m[0][2] != m[2][0] or m[1][2] != m[2][1]:
            raise ValueError("Gram matrix must be symmetric")
        return cls(m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2])

    @classmethod
    def equal_diagonal(cls, s, u, v, w):
        return cls(s, s, s, u, v, w)

    def matrix(self):
        return [[self.s11, self.u, self.v],
                [self.u, self.s22, self.w],
                [self.v, self.w, self.s33]]

    def entries(self):
        return (self.s11, self.s22, self.s33, self.u, self.v, self.w)

    def det(self):
        return linalg.det3(self.matrix())

    def leading_minors(self):
        return (self.s11, self.s11 * self.s22 - self.u * self.u, self.det())

    def is_positive_definite(self):
        return all(d > 0 for d in self.leading_minors())

    def has_equal_diagonal(self):
        return self.s11 == self.s22 == self.s33

    def transform(self, rows):
        """Gram of the basis whose coefficient vectors are ``rows``."""
        m = self.matrix()
        r = [[Fraction(x) for x in row] for row in rows]
        return GramMatrix3.from_matrix(linalg.matmul(linalg.matmul(r, m), linalg.transpose(r)))

    def scaled(self, c):
        c = Fraction(c)
        return GramMatrix3(*(c * x for x in self.entries()))

    def inner(self, a, b):
        m = self.matrix()
        return sum(m[i][j] * a[i] * b[j] for i in range(3) for j in range(3))

    def quad(self, c):
        m = self.matrix()
        return sum(m[i][j] * c[i] * c[j] for i in range(3) for j in range(3))


@dataclass
class LatticeBasis3:
    """A rank-3 lattice given by a basis; the Gram matrix is always exact.

    ``vectors`` holds explicit coordinates when the basis lives in Q^3;
    ``elements``/``field`` hold field elements when it comes from an ideal.
    """

    gram: GramMatrix3
    vectors: Optional[list] = None
    elements: Optional[list] = None
    field: object = None
    meta: dict = dc_field(default_factory=dict)

    @classmethod
    def from_vectors(cls, vectors):
        vs = [[Fraction(x) for x in v] for v in vectors]
        if len(vs) != 3 or any(len(v) != 3 for v in vs):
            raise ValueError("need three vectors in Q^3")
        m = [[sum(a * b for a, b in zip(vs[i], vs[j])) for j in range(3)] for i in range(3)]
        return cls(GramMatrix3.from_matrix(m), vectors=vs)

    @classmethod
    def from_gram(cls, gram):
        return cls(gram)

    @classmethod
    def from_field_elements(cls, elements, weight=None):
        """Lattice of ``Phi(elements)`` optionally twisted by ``diag(sqrt(weight_i))``.

        Entries are ``Tr(weight * b_i * b_j)``; ``weight`` must be totally
        positive for this to be a Gram matrix.
        """
        F = elements[0].field
        w = F.one if weight is None else weight
        m = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i, 3):
                m[i][j] = m[j][i] = (w * elements[i] * elements[j]).trace()
        return cls(GramMatrix3.from_matrix(m), elements=list(elements), field=F)

    def combine(self, rows):
        """Sub-basis with integer coefficient rows relative to this basis."""
        rows = [tuple(int(x) for x in r) for r in rows]
        out = LatticeBasis3(self.gram.transform(rows), field=self.field)
        if self.vectors is not None:
            out.vectors = [[sum(r[k] * self.vectors[k][i] for k in range(3)) for i in range(3)]
                           for r in rows]
        if self.elements is not None:
            out.elements = [sum((r[k] * self.elements[k] for k in range(3)), self.field.zero)
                            for r in rows]
        out.meta["coefficients"] = rows
        return out


def wr_gram_criterion(G):
    """Exact well-roundedness test for an equal-diagonal Gram matrix.

    ``max(|u|,|v|,|w|) <= s/2`` and
    ``max(-u+v+w, u-v+w, u+v-w, -u-v-w) <= s``.  No definiteness check is
    made: a degenerate Gram with violated inequalities simply returns False.
    """
    if not G.has_equal_diagonal():
        raise UnequalDiagonal(f"diagonal entries differ: {G.s11}, {G.s22}, {G.s33}")
    s, u, v, w = G.s11, G.u, G.v, G.w
    return (max(abs(u), abs(v), abs(w)) * 2 <= s
            and max(-u + v + w, u - v + w, u + v - w, -u - v - w) <= s)


def wr_slack(G):
    """Slack of each inequality in :func:`wr_gram_criterion` (all >= 0 iff it holds)."""
    s, u, v, w = G.s11, G.u, G.v, G.w
    return {
        "s/2-|u|": s / 2 - abs(u),
        "s/2-|v|": s / 2 - abs(v),
        "s/2-|w|": s / 2 - abs(w),
        "s-(-u+v+w)": s - (-u + v + w),
        "s-(u-v+w)": s - (u - v + w),
        "s-(u+v-w)": s - (u + v - w),
        "s-(-u-v-w)": s - (-u - v - w),
    }


def twist_coefficients(B):
    """Squared twist entries ``(alpha0, beta0, gamma0)`` for rows ``x, y, z`` of ``B``.

    Any diagonal twist equalising the three lengths has squared entries
    ``k * (alpha0, beta0, gamma0)``.
    """
    x, y, z = ([Fraction(c) for c in row] for row in B)
    d1 = [x[i] ** 2 - y[i] ** 2 for i in range(3)]
    d2 = [y[i] ** 2 - z[i] ** 2 for i in range(3)]

    def minor(i, j):
        return d1[i] * d2[j] - d1[j] * d2[i]

    return minor(1, 2), minor(2, 0), minor(0, 1)


def same_sign(r, s, t):
    """True iff ``r, s, t`` are all strictly positive or all strictly negative."""
    e1 = r + s + t
    e2 = r * s + s * t + t * r
    e3 = r * s * t
    return e1 * e3 > 0 and e2 > 0


def _ldl(G):
    m = G.matrix()
    g11 = m[0][0]
    if g11 <= 0:
        raise DegenerateGram("Gram matrix is not positive definite")
    mu12, mu13 = m[0][1] / g11, m[0][2] / g11
    d2 = m[1][1] - m[0][1] * mu12
    if d2 <= 0:
        raise DegenerateGram("Gram matrix is not positive definite")
    mu23 = (m[1][2] - m[0][1] * mu13) / d2
    d3 = m[2][2] - m[0][2] * mu13 - d2 * mu23 * mu23
    if d3 <= 0:
        raise DegenerateGram("Gram matrix is not positive definite")
    return (g11, d2, d3), (mu12, mu13, mu23)


def _int_range(center, r2):
    """All integers ``c`` with ``(c - center)^2 <= r2`` as ``range``."""
    if r2 < 0:
        return range(0)
    root = isqrt(r2.__floor__())  # floor(sqrt(r2))
    lo = (center - root).__floor__()
    hi = (center + root).__ceil__()
    while (lo - center) ** 2 > r2 and lo <= hi:
        lo += 1
    while (hi - center) ** 2 > r2 and hi >= lo:
        hi -= 1
    while (lo - 1 - center) ** 2 <= r2:
        lo -= 1
    while (hi + 1 - center) ** 2 <= r2:
        hi += 1
    return range(lo, hi + 1)


def lll_reduce(G, delta=Fraction(3, 4)):
    """Exact LLL reduction of a Gram matrix.

    Returns ``(U, G')`` with ``U`` an integer unimodular matrix (rows are
    coefficient vectors) and ``G' = U G U^T``.
    """
    G0 = G.matrix()
    U = [[int(i == j) for j in range(3)] for i in range(3)]

    def gram():
        return [[sum(G0[a][c] * U[i][a] * U[j][c] for a in range(3) for c in range(3))
                 for j in range(3)] for i in range(3)]

    def gso(m):
        mu = [[Fraction(0)] * 3 for _ in range(3)]
        b = [Fraction(0)] * 3
        for i in range(3):
            for j in range(i):
                mu[i][j] = (m[i][j] - sum(mu[j][t] * mu[i][t] * b[t] for t in range(j))) / b[j]
            b[i] = m[i][i] - sum(mu[i][t] ** 2 * b[t] for t in range(i))
            if b[i] <= 0:
                raise DegenerateGram("Gram matrix is not positive definite")
        return mu, b

    m = gram()
    k = 1
    while k < 3:
        mu, b = gso(m)
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                U[k] = [U[k][t] - q * U[j][t] for t in range(3)]
                m = gram()
                mu, b = gso(m)
        if b[k] >= (delta - mu[k][k - 1] ** 2) * b[k - 1]:
            k += 1
        else:
            U[k], U[k - 1] = U[k - 1], U[k]
            m = gram()
            k = max(k - 1, 1)
    return U, GramMatrix3.from_matrix(m)


def enumerate_short_vectors(L, bound, cap=DEFAULT_CANDIDATE_CAP):
    """All nonzero ``(coeffs, norm)`` with squared norm <= ``bound``.

    The Gram matrix is LLL-reduced first, then Fincke-Pohst runs over an
    exact LDL^T factorisation; every bound comparison is a rational
    inequality, so the list is complete.  Coefficients refer to the input
    basis.  Sorted by norm, then coefficients.  Raises BudgetExceeded after
    ``cap`` visited nodes.
    """
    G = L.gram if isinstance(L, LatticeBasis3) else L
    bound = Fraction(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    U, R = lll_reduce(G)
    (d1, d2, d3), (mu12, mu13, mu23) = _ldl(R)
    out = []
    visited = 0
    for c3 in _int_range(Fraction(0), bound / d3):
        r3 = bound - d3 * c3 * c3
        for c2 in _int_range(Fraction(-mu23 * c3), r3 / d2):
            t2 = c2 + mu23 * c3
            r2 = r3 - d2 * t2 * t2
            for c1 in _int_range(-(mu12 * c2 + mu13 * c3), r2 / d1):
                visited += 1
                if visited > cap:
                    raise BudgetExceeded(f"more than {cap} enumeration nodes for bound {bound}")
                if c1 == 0 and c2 == 0 and c3 == 0:
                    continue
                c = tuple(c1 * U[0][k] + c2 * U[1][k] + c3 * U[2][k] for k in range(3))
                n = G.quad(c)
                if n <= bound:
                    out.append((c, n))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


class WRResult(NamedTuple):
    is_wr: bool
    first_minimum: Fraction
    minimal_vectors: list


def is_wr_lattice(L, cap=DEFAULT_CANDIDATE_CAP):
    """Decide well-roundedness by enumeration up to the smallest (reduced) diagonal entry."""
    G = L.gram if isinstance(L, LatticeBasis3) else L
    # any diagonal entry bounds the first minimum; the reduced one is tightest
    R = lll_reduce(G)[1]
    bound = min(G.s11, G.s22, G.s33, R.s11, R.s22, R.s33)
    vecs = enumerate_short_vectors(G, bound, cap)
    first = vecs[0][1]
    minimal = [c for c, n in vecs if n == first]
    return WRResult(linalg.rank(minimal) == 3, first, minimal)


def _independent_triples(vectors):
    # one representative per +- pair
    reps = [v for v in vectors if v > tuple(-x for x in v)]
    for tri in itertools.combinations(reps, 3):
        if linalg.det3([list(t) for t in tri]) != 0:
            yield tri


def minimal_basis(L, cap=DEFAULT_CANDIDATE_CAP):
    """A basis of minimal vectors (exists for WR lattices of rank 3)."""
    if not isinstance(L, LatticeBasis3):
        L = LatticeBasis3(L)
    res = is_wr_lattice(L, cap)
    if not res.is_wr:
        raise NotWR(f"lattice is not well-rounded (first minimum {res.first_minimum})")
    tri = next(_independent_triples(res.minimal_vectors))
    if abs(linalg.det3([list(t) for t in tri])) != 1:
        raise AssertionError("independent minimal vectors of a rank-3 WR lattice must form a basis")
    return L.combine(tri)


def all_minimal_basis_grams(L, cap=DEFAULT_CANDIDATE_CAP):
    """Gram matrices of every minimal basis (one sign per vector)."""
    res = is_wr_lattice(L, cap)
    if not res.is_wr:
        raise NotWR("lattice is not well-rounded")
    G = L.gram if isinstance(L, LatticeBasis3) else L
    out = []
    for tri in _independent_triples(res.minimal_vectors):
        if abs(linalg.det3([list(t) for t in tri])) == 1:
            out.append(G.transform(tri))
    return out


def similarity_invariant(G):
    """Canonical form of an equal-diagonal Gram under signed permutations and scaling.

    Signed permutations permute the three off-diagonal entries freely and
    flip the signs of pairs of them, so the sorted absolute values (relative
    to ``s``) together with the sign of ``u v w`` are complete invariants.
    """
    s = G.s11
    offs = (G.u / s, G.v / s, G.w / s)
    prod = offs[0] * offs[1] * offs[2]
    return tuple(sorted(abs(x) for x in offs)), (prod > 0) - (prod < 0)


def grams_similar(G1, G2):
    return similarity_invariant(G1) == similarity_invariant(G2)


def lattices_similar_by_minimal_bases(L1, L2, cap=DEFAULT_CANDIDATE_CAP):
    """Similarity of two WR lattices via their minimal bases.

    A minimal basis is a basis, so one pair of minimal-basis Grams that agree
    up to scale and signed permutation proves similarity; similar lattices
    share every such Gram, so the test is also complete.  Returns
    ``(similar, scale)`` with ``scale = |L2| / |L1|``.
    """
    g1 = all_minimal_basis_grams(L1, cap)
    g2 = minimal_basis(L2, cap).gram
    if similarity_invariant(g2) not in {similarity_invariant(g) for g in g1}:
        return False, None
    return True, g2.s11 / g1[0].s11
