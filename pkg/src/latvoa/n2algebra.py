"""The N=2 algebra g^(2) on II_{2,2} in closed form.

An isotropic vector lambda = a rho_1 + b rho_2 + c rho'_1 + d rho'_2 is the
determinant-zero matrix [[m1, n2], [m2, n1]] = [[a, d], [-b, c]]: the first
column is lambda^+ (in span(rho_1, rho_2)), the second lambda^-, and
det = ac + bd = (lambda, lambda)/2.  The pairing is the polarisation of the
determinant.  Nothing here touches the Fock space;
``to_lattice``/``from_lattice`` connect to it for cross-checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping

from .series import frac_str


def _det(m) -> int:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


@dataclass(frozen=True, order=True)
class N2Point:
    """Integer 2x2 matrix of determinant zero."""

    m: tuple

    def __init__(self, m):
        mat = tuple(tuple(int(x) for x in row) for row in m)
        if len(mat) != 2 or any(len(r) != 2 for r in mat):
            raise ValueError("N2Point needs a 2x2 matrix")
        if _det(mat) != 0:
            raise ValueError("N2Point needs determinant 0")
        object.__setattr__(self, "m", mat)

    @property
    def plus(self) -> tuple:
        return ((self.m[0][0], 0), (self.m[1][0], 0))

    @property
    def minus(self) -> tuple:
        return ((0, self.m[0][1]), (0, self.m[1][1]))

    def is_zero(self) -> bool:
        return not any(x for r in self.m for x in r)

    def __add__(self, other: "N2Point") -> "N2Point":
        return N2Point([[a + b for a, b in zip(r, s)] for r, s in zip(self.m, other.m)])

    def __neg__(self) -> "N2Point":
        return N2Point([[-a for a in r] for r in self.m])

    def __mul__(self, k: int) -> "N2Point":
        return N2Point([[k * a for a in r] for r in self.m])

    __rmul__ = __mul__

    def to_lattice(self) -> tuple[int, int, int, int]:
        """Coordinates in the basis (rho_1, rho'_2, rho_2, rho'_1) of ``lattice.ii22``."""
        (a, d), (mb, c) = self.m
        return (a, d, -mb, c)

    @classmethod
    def from_lattice(cls, coords) -> "N2Point":
        a, d, b, c = (int(x) for x in coords)
        return cls([[a, d], [-b, c]])

    @classmethod
    def from_abcd(cls, a, b, c, d) -> "N2Point":
        """a rho_1 + b rho_2 + c rho'_1 + d rho'_2."""
        return cls([[a, d], [-b, c]])

    def to_dict(self) -> dict:
        return {"m": [list(r) for r in self.m]}

    def __repr__(self):
        return f"N2Point({[list(r) for r in self.m]})"


def _polar(x, y) -> int:
    s = [[a + b for a, b in zip(r, t)] for r, t in zip(x, y)]
    return _det(s) - _det(x) - _det(y)


def pairing(l1: N2Point, l2: N2Point) -> int:
    """(l1, l2) = det(A + B) - det(A) - det(B)."""
    return _polar(l1.m, l2.m)


def plus_minus_pairing(l1: N2Point, l2: N2Point) -> int:
    """(l1^+, l2^-)."""
    return _polar(l1.plus, l2.minus)


def ur_vr(r) -> tuple[N2Point, N2Point]:
    """u_r = [[p, q], [0, 0]] and v_r = [[0, 0], [p, q]] for r = p/q."""
    if isinstance(r, tuple):
        p, q = r
        if q <= 0 or gcd(p, q) != 1:
            raise ValueError("r must be given as p/q in lowest terms with q > 0")
    else:
        r = Fraction(r)
        p, q = r.numerator, r.denominator
    if p == 0:
        raise ValueError("r must be nonzero")
    return N2Point([[p, q], [0, 0]]), N2Point([[0, 0], [p, q]])


# cocycle from the ordered basis h1..h4 = rho_1, rho'_2, rho_2, rho'_1 (all isotropic)
_H_GRAM = ((0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0))


def epsilon(l1: N2Point, l2: N2Point) -> int:
    """eps(h_i, h_j) = 1 for i <= j and (-1)^{(h_i, h_j)} for j < i, bimultiplicative."""
    x, y = l1.to_lattice(), l2.to_lattice()
    e = 0
    for i in range(4):
        for j in range(i):
            e += x[i] * y[j] * _H_GRAM[i][j]
    return -1 if e % 2 else 1


class N2Element:
    """Finite rational combination of basis elements e^lambda."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms = {}
        for k, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[k] = self.terms.get(k, 0) + c
        self.terms = {k: c for k, c in self.terms.items() if c}

    @classmethod
    def basis(cls, lam: N2Point, coef=1) -> "N2Element":
        return cls({lam: coef})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return N2Element(out)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, c):
        return N2Element({k: v * Fraction(c) for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, N2Element) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def to_dict(self) -> dict:
        return {"terms": [{"m": [list(r) for r in k.m], "coef": frac_str(c)}
                          for k, c in sorted(self.terms.items())]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*e^{[list(r) for r in k.m]}" for k, c in sorted(self.terms.items()))


def g2_bracket(x: N2Element, y: N2Element) -> N2Element:
    """[e^a, e^b] = (a^+, b^-) eps(a, b) e^{a+b} if (a, b) = 0, else 0."""
    out: dict = {}
    for a, ca in x.terms.items():
        for b, cb in y.terms.items():
            if pairing(a, b):
                continue
            k = plus_minus_pairing(a, b) * epsilon(a, b)
            if k:
                s = a + b
                out[s] = out.get(s, 0) + ca * cb * k
    return N2Element(out)


def classify(lam: N2Point):
    """"center", "A0", "Ainf" or ("A", r) with r the unique slope."""
    if lam.is_zero():
        return "center"
    (a, d), (mb, c) = lam.m
    b = -mb
    if a == 0 and b == 0:
        return "A0"
    if c == 0 and d == 0:
        return "Ainf"
    r = Fraction(a, d) if d else Fraction(-b, c)
    return ("A", r)


def component_basis(lam: N2Point) -> tuple[int, int] | None:
    """(m, n) with lam = m u_r + n v_r when lam lies in some A_r, else None."""
    tag = classify(lam)
    if not isinstance(tag, tuple):
        return None
    u, v = ur_vr(tag[1])
    p, q = u.m[0]
    m = Fraction(lam.m[0][0], p)
    n = Fraction(lam.m[1][1], q)
    if m.denominator != 1 or n.denominator != 1 or m * u + n * v != lam:
        return None
    return int(m), int(n)


def _sl2(M) -> tuple:
    M = tuple(tuple(int(x) for x in r) for r in M)
    if _det(M) != 1:
        raise ValueError("matrix must lie in SL(2, Z)")
    return M


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def sl2_left(M, x: N2Element) -> N2Element:
    """e^lam -> e^{M lam}."""
    M = _sl2(M)
    return N2Element({N2Point(_matmul(M, k.m)): c for k, c in x.terms.items()})


def sl2_right(M, x: N2Element) -> N2Element:
    """e^lam -> e^{lam M^t}."""
    M = _sl2(M)
    Mt = [[M[0][0], M[1][0]], [M[0][1], M[1][1]]]
    return N2Element({N2Point(_matmul(k.m, Mt)): c for k, c in x.terms.items()})


def moebius(M, r) -> Fraction | None:
    """(a r + b) / (c r + d), or None for the point at infinity."""
    (a, b), (c, d) = _sl2(M)
    r = Fraction(r)
    den = c * r + d
    return None if den == 0 else (a * r + b) / den
