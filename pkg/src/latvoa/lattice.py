"""Integral lattices, ADE root systems, short vectors, theta series and the cocycle."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from functools import cached_property
from importlib import resources
from math import ceil, isqrt, lcm
from typing import Iterable, Mapping, Sequence

from .linalg import determinant, hermite_rows, inverse
from .series import ExactSeries, MultiSeries, _double, frac_str


def _frac_vec(v) -> tuple[Fraction, ...]:
    if isinstance(v, LatticeVector):
        return v.coords
    return tuple(Fraction(x) for x in v)


class LatticeVector:
    """A vector of L (integral coordinates) or of L tensor Q, in the lattice basis."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        self.coords = tuple(Fraction(x) for x in coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other):
        return LatticeVector(a + b for a, b in zip(self.coords, _frac_vec(other)))

    def __sub__(self, other):
        return LatticeVector(a - b for a, b in zip(self.coords, _frac_vec(other)))

    def __neg__(self):
        return LatticeVector(-a for a in self.coords)

    def __mul__(self, c):
        c = Fraction(c)
        return LatticeVector(c * a for a in self.coords)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, LatticeVector):
            return self.coords == other.coords
        try:
            return self.coords == _frac_vec(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_list(self) -> list[str]:
        return [frac_str(x) for x in self.coords]

    def __repr__(self):
        return "LatticeVector(" + ", ".join(str(x) for x in self.coords) + ")"


class IntegralLattice:
    """A lattice given by an integral symmetric Gram matrix in a fixed basis."""

    def __init__(self, gram: Sequence[Sequence[int]], label: str = "",
                 components: Sequence["IntegralLattice"] | None = None):
        g = [[int(x) for x in row] for row in gram]
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square and non-empty")
        for i in range(n):
            for j in range(n):
                if Fraction(gram[i][j]) != g[i][j]:
                    raise ValueError("Gram matrix must be integral")
                if g[i][j] != g[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        self.gram = tuple(tuple(r) for r in g)
        self.label = label
        # direct summands in coordinate order, used to split enumerations
        self.components = tuple(components) if components else (self,)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def __repr__(self):
        return f"IntegralLattice(label={self.label!r}, rank={self.rank})"

    def __eq__(self, other):
        return isinstance(other, IntegralLattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    # invariants -----------------------------------------------------------
    @cached_property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @cached_property
    def det(self) -> int:
        return int(determinant(self.gram))

    @cached_property
    def gram_inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(r) for r in inverse(self.gram))

    @cached_property
    def signature(self) -> tuple[int, int, int]:
        """(positive, negative, zero) counts from an exact congruence diagonalisation."""
        m = [[Fraction(x) for x in row] for row in self.gram]
        pos = neg = 0
        idx = list(range(self.rank))
        while idx:
            piv = next((i for i in idx if m[i][i] != 0), None)
            if piv is None:
                pair = next(((i, j) for i in idx for j in idx if i < j and m[i][j] != 0), None)
                if pair is None:
                    break
                i, j = pair
                # replace b_i by b_i + b_j, whose norm 2(b_i,b_j) is nonzero
                for k in range(self.rank):
                    m[i][k] += m[j][k]
                for k in range(self.rank):
                    m[k][i] += m[k][j]
                piv = i
            p = m[piv][piv]
            if p > 0:
                pos += 1
            else:
                neg += 1
            idx.remove(piv)
            for i in idx:
                f = m[i][piv] / p
                if f:
                    for k in idx:
                        m[i][k] -= f * m[piv][k]
            for i in idx:
                m[i][piv] = m[piv][i] = Fraction(0)
        return pos, neg, self.rank - pos - neg

    @property
    def is_positive_definite(self) -> bool:
        return self.signature[0] == self.rank

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    # arithmetic -----------------------------------------------------------
    def vector(self, coords) -> LatticeVector:
        v = LatticeVector(coords)
        if len(v) != self.rank:
            raise ValueError(f"vector length {len(v)} does not match rank {self.rank}")
        return v

    def basis_vector(self, i: int) -> LatticeVector:
        return LatticeVector(int(i == j) for j in range(self.rank))

    def zero(self) -> LatticeVector:
        return LatticeVector([0] * self.rank)

    def pairing_row(self, x) -> tuple[Fraction, ...]:
        """The row vector G x, so that (x, y) = y . Gx."""
        x = _frac_vec(x)
        return tuple(sum((g * a for g, a in zip(row, x) if a), Fraction(0)) for row in self.gram)

    def inner(self, x, y) -> Fraction:
        x, y = _frac_vec(x), _frac_vec(y)
        s = Fraction(0)
        for i, a in enumerate(x):
            if a:
                row = self.gram[i]
                for j, b in enumerate(y):
                    if b:
                        s += a * row[j] * b
        return s

    def norm(self, x) -> Fraction:
        return self.inner(x, x)

    def in_dual(self, x) -> bool:
        return all(v.denominator == 1 for v in self.pairing_row(x))

    def dual_coords(self, form: Sequence) -> LatticeVector:
        """The vector x with (x, b_i) = form[i]."""
        ginv = self.gram_inverse
        return LatticeVector(sum(ginv[i][j] * Fraction(form[j]) for j in range(self.rank))
                             for i in range(self.rank))

    @cached_property
    def ldl(self) -> tuple[list[Fraction], list[list[Fraction]]]:
        """d, mu with (x,x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2."""
        n = self.rank
        d: list[Fraction] = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            di = Fraction(self.gram[i][i]) - sum(d[k] * mu[k][i] ** 2 for k in range(i))
            if di <= 0:
                raise ValueError(f"lattice {self.label or ''} is not positive definite")
            d.append(di)
            for j in range(i + 1, n):
                mu[i][j] = (self.gram[i][j] - sum(d[k] * mu[k][i] * mu[k][j] for k in range(i))) / di
        return d, mu

    # serialisation --------------------------------------------------------
    def to_dict(self) -> dict:
        return {"label": self.label, "gram": [list(r) for r in self.gram], "glue": []}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ---------------------------------------------------------------------------
# constructors

def hyperbolic() -> IntegralLattice:
    return IntegralLattice([[0, 1], [1, 0]], "II_{1,1}")


def ii22() -> IntegralLattice:
    """II_{2,2} in the basis (rho_1, rho'_2, rho_2, rho'_1) with (rho_i, rho'_j) = delta_ij.

    Coordinates (a, b, c, d) = a rho_1 + b rho_2 + c rho'_1 + d rho'_2 become
    (a, d, b, c) in this basis; see ``ii22_coords``.
    """
    return IntegralLattice([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], "II_{2,2}")


def ii22_coords(a, b, c, d) -> LatticeVector:
    """The vector a rho_1 + b rho_2 + c rho'_1 + d rho'_2 of ``ii22()``."""
    return LatticeVector((a, d, b, c))


def direct_sum(*lattices: IntegralLattice) -> IntegralLattice:
    if not lattices:
        raise ValueError("direct_sum needs at least one lattice")
    n = sum(L.rank for L in lattices)
    gram = [[0] * n for _ in range(n)]
    off = 0
    comps: list[IntegralLattice] = []
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                gram[off + i][off + j] = L.gram[i][j]
        off += L.rank
        comps.extend(L.components)
    return IntegralLattice(gram, "+".join(L.label or "?" for L in lattices), comps)


def glue(base: IntegralLattice, glue_vectors: Sequence[Sequence], label: str = "") -> IntegralLattice:
    """The overlattice spanned by ``base`` and rational glue vectors from its dual."""
    vecs = [_frac_vec(v) for v in glue_vectors]
    for v in vecs:
        if len(v) != base.rank:
            raise ValueError("glue vector has wrong length")
        if not base.in_dual(v):
            raise ValueError(f"glue vector {[str(x) for x in v]} is not in the dual lattice")
    if not vecs:
        return IntegralLattice(base.gram, label or base.label, base.components)
    den = lcm(*(x.denominator for v in vecs for x in v))
    rows = [[den * int(i == j) for j in range(base.rank)] for i in range(base.rank)]
    rows += [[int(x * den) for x in v] for v in vecs]
    basis = [[Fraction(x, den) for x in r] for r in hermite_rows(rows)]
    gram = [[base.inner(a, b) for b in basis] for a in basis]
    if any(x.denominator != 1 for r in gram for x in r):
        raise ValueError("glue vectors do not generate an integral overlattice")
    return IntegralLattice(gram, label or f"{base.label}[glued]")


def leech() -> IntegralLattice:
    data = json.loads(resources.files("latvoa").joinpath("data/leech.json").read_text())
    return IntegralLattice(data["gram"], "Leech")


def lattice_from_dict(data: Mapping) -> IntegralLattice:
    base = IntegralLattice(data["gram"], data.get("label", ""))
    g = data.get("glue") or []
    return glue(base, [[Fraction(x) for x in v] for v in g], base.label) if g else base


def lattice_from_json(text: str) -> IntegralLattice:
    return lattice_from_dict(json.loads(text))


_TOKEN = re.compile(r"^(II11|II_\{1,1\}|II22|II_\{2,2\}|U|H|leech|Leech|[ADE]\d+)(?:\^(\d+))?$")


def build_lattice(spec) -> IntegralLattice:
    """Lattice from a Gram matrix, a JSON-style dict, or a name such as ``E8^3+II11``."""
    if isinstance(spec, IntegralLattice):
        return spec
    if isinstance(spec, Mapping):
        return lattice_from_dict(spec)
    if isinstance(spec, str):
        parts = []
        for tok in spec.replace(" ", "").split("+"):
            m = _TOKEN.match(tok)
            if not m:
                raise ValueError(f"unknown lattice name {tok!r}")
            name, mult = m.group(1), int(m.group(2) or 1)
            if name in ("II11", "II_{1,1}", "U", "H"):
                piece = hyperbolic()
            elif name in ("II22", "II_{2,2}"):
                piece = ii22()
            elif name.lower() == "leech":
                piece = leech()
            else:
                piece = root_lattice(root_system([(name[0], int(name[1:]))]))
            parts.extend([piece] * mult)
        return parts[0] if len(parts) == 1 else direct_sum(*parts)
    return IntegralLattice(spec)


# ---------------------------------------------------------------------------
# cocycle

class Cocycle:
    """Bimultiplicative sign with e^a e^b = eps(a, b) e^{a+b}.

    ``matrix[i][j]`` is the exponent of -1 on the basis pair (b_i, b_j).  Above
    the diagonal it is 0, below it (b_i, b_j) mod 2, and on the diagonal
    (b_i, b_i)/2 mod 2; the diagonal choice is what makes
    eps(a, -a) = (-1)^{(a,a)/2} hold for basis vectors of norm 2 mod 4.
    """

    def __init__(self, lattice: IntegralLattice):
        if not lattice.is_even:
            raise ValueError("cocycle requires an even lattice")
        self.lattice = lattice
        g = lattice.gram
        n = lattice.rank
        self.matrix = tuple(
            tuple((g[i][j] % 2) if j < i else ((g[i][i] // 2) % 2 if i == j else 0) for j in range(n))
            for i in range(n))
        self._rows = [[j for j in range(n) if self.matrix[i][j]] for i in range(n)]

    def exponent(self, a, b) -> int:
        a, b = _frac_vec(a), _frac_vec(b)
        s = 0
        for i, ai in enumerate(a):
            if ai:
                for j in self._rows[i]:
                    s += int(ai) * int(b[j])
        return s & 1

    def __call__(self, a, b) -> int:
        """eps(a, b) as +-1.  Points off the lattice get the trivial value 1."""
        a, b = _frac_vec(a), _frac_vec(b)
        if any(x.denominator != 1 for x in a) or any(x.denominator != 1 for x in b):
            return 1
        return -1 if self.exponent(a, b) else 1

    def check(self, a, b, c=None) -> bool:
        """Verify the defining conditions on a pair (and a triple if given)."""
        L = self.lattice
        zero = L.zero()
        ok = self(zero, a) == 1 and self(a, zero) == 1
        ok = ok and self(a, -LatticeVector(a)) == (-1) ** int(L.norm(a) / 2)
        ok = ok and self(a, b) == (-1) ** int(L.inner(a, b)) * self(b, a)
        if c is not None:
            a_, b_, c_ = LatticeVector(a), LatticeVector(b), LatticeVector(c)
            ok = ok and self(a_, b_) * self(a_ + b_, c_) == self(a_, b_ + c_) * self(b_, c_)
        return ok


def cocycle(L: IntegralLattice) -> Cocycle:
    return Cocycle(L)


# ---------------------------------------------------------------------------
# root systems

def _cartan(family: str, n: int) -> list[list[int]]:
    a = [[2 * int(i == j) for j in range(n)] for i in range(n)]

    def link(i, j):
        a[i][j] = a[j][i] = -1

    if family == "A":
        if n < 1:
            raise ValueError("A_n needs n >= 1")
        for i in range(n - 1):
            link(i, i + 1)
    elif family == "D":
        if n < 4:
            raise ValueError("D_n needs n >= 4")
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif family == "E":
        if n not in (6, 7, 8):
            raise ValueError("E_n needs n in 6, 7, 8")
        # Bourbaki labels 1-3-4-5-6-7-8 with 2 attached to 4
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    else:
        raise ValueError(f"unsupported root system family {family!r}")
    return a


class RootSystem:
    """A simply laced root system in the basis of its simple roots."""

    def __init__(self, types: Sequence[tuple[str, int]]):
        self.type = [(str(f).upper(), int(n)) for f, n in types]
        if not self.type:
            raise ValueError("empty root system")
        blocks = [_cartan(f, n) for f, n in self.type]
        self.rank = sum(len(b) for b in blocks)
        self.cartan = [[0] * self.rank for _ in range(self.rank)]
        self.offsets = []
        off = 0
        for b in blocks:
            self.offsets.append(off)
            for i in range(len(b)):
                for j in range(len(b)):
                    self.cartan[off + i][off + j] = b[i][j]
            off += len(b)
        comps = [IntegralLattice(b, f"{f}{n}") for b, (f, n) in zip(blocks, self.type)]
        label = "+".join(f"{f}{n}" for f, n in self.type)
        self.lattice = IntegralLattice(self.cartan, label, comps if len(comps) > 1 else None)
        self.simple_roots = [self.lattice.basis_vector(i) for i in range(self.rank)]
        self.positive_roots = self._enumerate_positive()
        self.highest_roots = []
        for (f, n), off in zip(self.type, self.offsets):
            block = [r for r in self.positive_roots if all(r[k] == 0 for k in range(self.rank)
                                                          if not off <= k < off + n)]
            self.highest_roots.append(max(block, key=lambda r: sum(r.coords)))
        total = [sum(r[k] for r in self.positive_roots) for k in range(self.rank)]
        self.weyl_vector = LatticeVector(x / 2 for x in total)

    def _enumerate_positive(self) -> list[LatticeVector]:
        n = self.rank
        layer = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        seen = set(layer)
        out = list(layer)
        while layer:
            nxt = []
            for beta in layer:
                for i in range(n):
                    # simply laced: beta + a_i is a root iff (beta, a_i) = -1
                    if sum(beta[j] * self.cartan[j][i] for j in range(n)) == -1:
                        gamma = tuple(beta[j] + int(i == j) for j in range(n))
                        if gamma not in seen:
                            seen.add(gamma)
                            nxt.append(gamma)
            out.extend(nxt)
            layer = nxt
        return [LatticeVector(r) for r in out]

    @property
    def is_irreducible(self) -> bool:
        return len(self.type) == 1

    @property
    def highest_root(self) -> LatticeVector:
        if not self.is_irreducible:
            raise ValueError("highest root is defined for irreducible root systems; use highest_roots")
        return self.highest_roots[0]

    @property
    def roots(self) -> list[LatticeVector]:
        return self.positive_roots + [-r for r in self.positive_roots]

    @property
    def coxeter_number(self) -> int:
        hs = set()
        for (f, n), off in zip(self.type, self.offsets):
            npos = sum(1 for r in self.positive_roots if any(r[k] for k in range(off, off + n)))
            hs.add(2 * npos // n)
        if len(hs) != 1:
            raise ValueError("components have different Coxeter numbers")
        return hs.pop()

    def height(self, root) -> Fraction:
        return sum(_frac_vec(root), Fraction(0))

    def __repr__(self):
        return f"RootSystem({self.lattice.label})"


def _parse_types(types) -> list[tuple[str, int]]:
    if isinstance(types, str):
        out = []
        for tok in types.replace(" ", "").split("+"):
            m = re.match(r"^([ADEade])_?(\d+)(?:\^(\d+))?$", tok)
            if not m:
                raise ValueError(f"cannot parse root system {tok!r}")
            out.extend([(m.group(1).upper(), int(m.group(2)))] * int(m.group(3) or 1))
        return out
    return [(f, int(n)) for f, n in types]


def root_system(types) -> RootSystem:
    """``root_system([("E", 8)])`` or ``root_system("E8^3")``."""
    return RootSystem(_parse_types(types))


def root_lattice(rs: RootSystem) -> IntegralLattice:
    return rs.lattice


def affine_cartan(rs: RootSystem) -> list[list[int]]:
    """Generalised Cartan matrix with a_0 = delta - gamma in position 0.

    The null vector delta pairs trivially with every finite root, so all
    entries come from (a_i, a_j) with a_0 replaced by -gamma.
    """
    if not rs.is_irreducible:
        raise ValueError("affine_cartan needs an irreducible root system")
    L = rs.lattice
    simple = [-rs.highest_root] + rs.simple_roots
    return [[int(L.inner(a, b)) for b in simple] for a in simple]


# ---------------------------------------------------------------------------
# enumeration

def _require_positive(L: IntegralLattice) -> None:
    if not L.is_positive_definite:
        raise ValueError(f"lattice {L.label or ''} is not positive definite")


def _interval(c: Fraction, t: Fraction) -> range:
    """Integers x with (x - c)^2 <= t."""
    r = isqrt(t.numerator * t.denominator) // t.denominator
    lo, hi = int(c) - r - 2, int(c) + r + 2
    while (lo - c) ** 2 > t and lo <= hi:
        lo += 1
    while (hi - c) ** 2 > t and hi >= lo:
        hi -= 1
    return range(lo, hi + 1)


def short_vectors(L: IntegralLattice, max_norm) -> list[LatticeVector]:
    """All nonzero v with (v,v) <= max_norm, by exact rational Fincke–Pohst."""
    _require_positive(L)
    d, mu = L.ldl
    n = L.rank
    bound = Fraction(max_norm)
    out: list[LatticeVector] = []
    x = [0] * n

    def rec(i: int, used: Fraction):
        c = -sum((mu[i][j] * x[j] for j in range(i + 1, n) if x[j]), Fraction(0))
        t = (bound - used) / d[i]
        if t < 0:
            return
        for xi in _interval(c, t):
            x[i] = xi
            u = used + d[i] * (xi - c) ** 2
            if i == 0:
                if any(x):
                    out.append(LatticeVector(x))
            else:
                rec(i - 1, u)
        x[i] = 0

    rec(n - 1, Fraction(0))
    return out


def _histogram_single(L: IntegralLattice, max_norm: int, form: Sequence[Fraction]) -> dict:
    from . import _enum

    d, mu = L.ldl
    den = lcm(*(Fraction(f).denominator for f in form)) if form else 1
    w = [int(Fraction(f) * den) for f in form]
    # Cauchy-Schwarz: |(x, v0)| <= sqrt(max_norm * v0^2)
    v0 = L.dual_coords(form)
    v0n = L.norm(v0)
    pmax = isqrt(int(ceil(max_norm * v0n * den * den))) + 2
    counts = _enum.histogram(L.gram, [float(x) for x in d],
                             [[float(x) for x in row] for row in mu], max_norm, w, pmax)
    out: dict[tuple[int, Fraction], int] = {}
    nz = counts.nonzero()
    for nrm, p in zip(*nz):
        out[(int(nrm), Fraction(int(p) - pmax, den))] = int(counts[nrm, p])
    return out


def vector_histogram(L: IntegralLattice, max_norm: int, v0=None) -> dict[tuple[int, Fraction], int]:
    """Counts of lattice vectors (zero included) by (norm, pairing with v0), norm <= max_norm.

    Direct sums are handled by convolving the histograms of their summands.
    """
    _require_positive(L)
    max_norm = int(max_norm)
    v0 = L.zero() if v0 is None else LatticeVector(v0)
    form = L.pairing_row(v0)
    pieces = []
    off = 0
    for comp in L.components:
        sub = form[off:off + comp.rank]
        off += comp.rank
        pieces.append((comp, tuple(sub)))
    cache: dict = {}
    total = {(0, Fraction(0)): 1}
    for comp, sub in pieces:
        key = (comp.gram, sub)
        if key not in cache:
            cache[key] = _histogram_single(comp, max_norm, sub)
        h = cache[key]
        new: dict[tuple[int, Fraction], int] = {}
        for (n1, p1), c1 in total.items():
            for (n2, p2), c2 in h.items():
                if n1 + n2 <= max_norm:
                    k = (n1 + n2, p1 + p2)
                    new[k] = new.get(k, 0) + c1 * c2
        total = new
    return total


def _max_norm_below(order) -> int:
    """Largest norm N with N/2 < order."""
    return ceil(2 * Fraction(order)) - 1


def theta_series(L: IntegralLattice, order) -> ExactSeries:
    """Sum over lattice vectors of q^{(v,v)/2}, exact below q^order."""
    if not L.is_even:
        raise ValueError("theta_series needs an even lattice")
    _require_positive(L)
    order2 = _double(order) if Fraction(order) * 2 == int(Fraction(order) * 2) else None
    if order2 is None:
        raise ValueError("order must be in (1/2)Z")
    hist = vector_histogram(L, max(_max_norm_below(order), 0))
    terms: dict[int, int] = {}
    for (nrm, _), c in hist.items():
        terms[nrm] = terms.get(nrm, 0) + c
    return ExactSeries("q", terms, order2)


def jacobi_theta_specialized(L: IntegralLattice, v0, q_order, xi_range=None) -> MultiSeries:
    """Sum over lattice vectors of q^{(v,v)/2} xi^{(v,v0)} in the variables (q, xi).

    ``xi_range`` optionally restricts to |(v, v0)| <= xi_range; the result is
    then a window of the full series, which is a Laurent polynomial in xi at
    every fixed q power.
    """
    if not L.is_even:
        raise ValueError("jacobi_theta_specialized needs an even lattice")
    _require_positive(L)
    hist = vector_histogram(L, max(_max_norm_below(q_order), 0), v0)
    terms = {}
    for (nrm, p), c in hist.items():
        if xi_range is not None and abs(p) > Fraction(xi_range):
            continue
        terms[(nrm, _double(p))] = c
    return MultiSeries(("q", "xi"), terms, (_double(q_order), None))
