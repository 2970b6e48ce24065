"""V_NS = V_L (x) F_d: fermions, the N=1 and N=2 superconformal operators,
super physical states, the N=1 and N=2 brackets and the N=1 DDF operators.

Fermions psi_h(r) are labelled by vectors h of L (x) Q, exactly like bosons,
with {psi_a(r), psi_b(s)} = (a, b) delta_{r+s,0}.  A dual pair (a_i, a_i^*) of
the fermionic frame is therefore (psi_{b_i}, psi_{b_i^*}) for the lattice basis
b_i and its dual basis.  Half-integer modes are stored doubled.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fock import (
    ZERO,
    BudgetError,
    Frame,
    FockVector,
    PhysicalBasis,
    _add,
    _boson_ann_key,
    _boson_create,
    _boson_level_along,
    _constraint_kernel,
    _ddf_checks,
    _colourings,
    _fermion_mode_key,
    _partitions,
    _power_coeff,
    apply_mode,
    apply_virasoro,
    c_series_apply,
    fermion_mode,
    frame_for,
    graded_keys,
    gram_matrix,
    key_level,
    transverse_vectors,
    vertex_coefficient,
    vertex_powers,
)

HALF = Fraction(1, 2)


class SuperVector(FockVector):
    """Element of V_NS; serialises with an explicit "fmodes" list on every term."""

    __slots__ = ()

    @classmethod
    def from_fock(cls, v: FockVector) -> "SuperVector":
        return cls(v.frame, v.terms)


def apply_fermion_mode(a, r, v: FockVector) -> FockVector:
    """psi_a(r): wedge for r < 0, superderivation for r > 0."""
    return fermion_mode(a, r, v)


# ---------------------------------------------------------------------------
# products of modes on keys

def _bmode(frame: Frame, h, row, n: int):
    """Key-level action of the boson h(n)."""
    if n == 0:
        return lambda key: [(key, sum((r * x for r, x in zip(row, key[2]) if x), ZERO))]
    if n < 0:
        nz = [(j, x) for j, x in enumerate(h) if x]
        return lambda key: [(_boson_create(key, n, j), x) for j, x in nz]
    return lambda key: _boson_ann_key(frame, row, n, key)


def _fmode(frame: Frame, h, row, r2: int):
    return lambda key: _fermion_mode_key(frame, h, row, r2, key)


def _apply_products(v: FockVector, products) -> FockVector:
    """sum_t coef_t * (op_1 ... op_k) v, operators applied right to left."""
    out: dict = {}
    for coef, ops in products:
        states = dict(v.terms)
        for op in reversed(ops):
            new: dict = {}
            for k, c in states.items():
                for k2, c2 in op(k):
                    _add(new, k2, c * c2)
            states = new
            if not states:
                break
        for k, c in states.items():
            _add(out, k, coef * c)
    return v._like(out)


def _max_level(v: FockVector) -> int:
    return max((int(key_level(k)) + 1 for k in v.terms), default=0)


class _ModeCache:
    """Per-frame cache of key-level mode closures for basis and dual vectors."""

    def __init__(self, frame: Frame):
        self.frame = frame
        d = frame.d
        self.units = [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
        self.duals = [tuple(frame.ginv[i]) for i in range(d)]
        self._b: dict = {}
        self._f: dict = {}

    def b(self, h, n: int):
        key = (h, n)
        op = self._b.get(key)
        if op is None:
            op = self._b[key] = _bmode(self.frame, h, self.frame.row(h), n)
        return op

    def f(self, h, r2: int):
        key = (h, r2)
        op = self._f.get(key)
        if op is None:
            op = self._f[key] = _fmode(self.frame, h, self.frame.row(h), r2)
        return op


_caches: dict = {}


def _cache(frame: Frame) -> _ModeCache:
    c = _caches.get(frame.lattice.gram)
    if c is None or c.frame is not frame:
        c = _caches[frame.lattice.gram] = _ModeCache(frame)
    return c


def _half2(r) -> int:
    r2 = Fraction(r) * 2
    if r2.denominator != 1 or r2.numerator % 2 == 0:
        raise ValueError("fermionic modes must lie in Z + 1/2")
    return int(r2)


def _g_products(cache: _ModeCache, pairs, r2: int, level: int):
    """sum_k sum_(h, g) h(k) psi_g(r - k) for the listed (h, g) pairs."""
    prods = []
    r = Fraction(r2, 2)
    lo = int((r - level).__floor__())
    for k in range(lo, level + 1):
        s2 = r2 - 2 * k
        if s2 > 2 * level:
            continue
        for h, g in pairs:
            prods.append((Fraction(1), (cache.b(h, k), cache.f(g, s2))))
    return prods


def _normal_pair(cache: _ModeCache, a, r2a: int, b, r2b: int):
    """:psi_a(ra) psi_b(rb): as (sign, ops) with annihilators on the right."""
    if r2a > 0 and r2b < 0:
        return -1, (cache.f(b, r2b), cache.f(a, r2a))
    return 1, (cache.f(a, r2a), cache.f(b, r2b))


def _dual_pairs(frame: Frame, cache: _ModeCache):
    return [(cache.units[i], cache.duals[i]) for i in range(frame.d)]


def apply_G(r, v: FockVector) -> FockVector:
    """G_r = sum_k sum_i b_i(k) psi_{b_i^*}(r - k)."""
    frame = v.frame
    cache = _cache(frame)
    return _apply_products(v, _g_products(cache, _dual_pairs(frame, cache), _half2(r), _max_level(v)))


def apply_fermion_virasoro(n: int, v: FockVector) -> FockVector:
    """L^F_n = 1/2 sum_r (r - n/2) sum_i :psi_{b_i}(n - r) psi_{b_i^*}(r):."""
    frame = v.frame
    cache = _cache(frame)
    n = int(n)
    level = _max_level(v)
    prods = []
    lo, hi = min(n - level, n) - 1, max(level, 0) + 1
    for r2 in range(2 * lo + 1, 2 * hi, 2):
        coef = (Fraction(r2, 2) - Fraction(n, 2)) / 2
        if not coef:
            continue
        s2 = 2 * n - r2
        if s2 > 2 * level or r2 > 2 * level:
            continue
        for h, g in _dual_pairs(frame, cache):
            sign, ops = _normal_pair(cache, h, s2, g, r2)
            prods.append((coef * sign, ops))
    return _apply_products(v, prods)


def apply_super_virasoro(n: int, v: FockVector) -> FockVector:
    """Total L_n = L^B_n + L^F_n with central charge 3d/2."""
    return apply_virasoro(n, v) + apply_fermion_virasoro(n, v)


# ---------------------------------------------------------------------------
# N=2 structure

@dataclass(frozen=True)
class N2Frame:
    """Isotropic dual bases h_i^+, h_i^- with (h_i^+, h_j^-) = delta_ij."""

    plus: tuple
    minus: tuple

    def check(self, frame: Frame) -> None:
        for i, hp in enumerate(self.plus):
            for j, hm in enumerate(self.minus):
                if frame.inner(hp, hm) != int(i == j):
                    raise ValueError("h^+ and h^- are not dual")
                if frame.inner(hp, self.plus[j]) or frame.inner(hm, self.minus[i]):
                    raise ValueError("h^+ or h^- span is not isotropic")
        if 2 * len(self.plus) != frame.d:
            raise ValueError("N=2 frame needs signature (l, l) with l pairs")

    def split(self, frame: Frame, x) -> tuple[tuple, tuple]:
        """(x^+, x^-) with x^+ in span(h^+) and x^- in span(h^-)."""
        x = frame.coords(x)
        xp = [ZERO] * frame.d
        xm = [ZERO] * frame.d
        for hp, hm in zip(self.plus, self.minus):
            cp = frame.inner(x, hm)
            cm = frame.inner(x, hp)
            for t in range(frame.d):
                xp[t] += cp * hp[t]
                xm[t] += cm * hm[t]
        return tuple(xp), tuple(xm)


def n2_frame(L) -> N2Frame:
    """Isotropic frame from the hyperbolic pairing of the basis.

    ``II_{2,2}`` uses L^+ = span(rho_1, rho_2) and L^- = span(rho'_1, rho'_2).
    Otherwise every basis vector must be isotropic and pair to 1 with exactly
    one partner; the lower index of each pair goes to L^+.
    """
    frame = frame_for(L)
    d = frame.d
    unit = lambda i: tuple(Fraction(int(i == j)) for j in range(d))
    if frame.lattice.label == "II_{2,2}":
        nf = N2Frame((unit(0), unit(2)), (unit(3), unit(1)))
        nf.check(frame)
        return nf
    plus, minus = [], []
    for i in range(d):
        row = frame.gram[i]
        partners = [j for j, g in enumerate(row) if g]
        if row[i] or len(partners) != 1 or row[partners[0]] != 1:
            raise ValueError("lattice has no hyperbolic pairing of its basis")
        j = partners[0]
        if i < j:
            plus.append(unit(i))
            minus.append(unit(j))
    nf = N2Frame(tuple(plus), tuple(minus))
    nf.check(frame)
    return nf


def apply_G_pm(sign: int, r, v: FockVector, nf: N2Frame | None = None) -> FockVector:
    """G^+_r = sum h_i^+(k) psi_{h_i^-}(r-k); G^-_r = sum h_i^-(k) psi_{h_i^+}(r-k)."""
    frame = v.frame
    nf = nf or n2_frame(frame.lattice)
    cache = _cache(frame)
    pairs = list(zip(nf.plus, nf.minus)) if sign > 0 else list(zip(nf.minus, nf.plus))
    return _apply_products(v, _g_products(cache, pairs, _half2(r), _max_level(v)))


def apply_J(n: int, v: FockVector, nf: N2Frame | None = None) -> FockVector:
    """J_n = sum_i sum_r :psi_{h_i^-}(r) psi_{h_i^+}(n - r):."""
    frame = v.frame
    nf = nf or n2_frame(frame.lattice)
    cache = _cache(frame)
    n = int(n)
    level = _max_level(v)
    prods = []
    lo, hi = min(n - level, n) - 1, max(level, 0) + 1
    for r2 in range(2 * lo + 1, 2 * hi, 2):
        s2 = 2 * n - r2
        if s2 > 2 * level or r2 > 2 * level:
            continue
        for hp, hm in zip(nf.plus, nf.minus):
            sign, ops = _normal_pair(cache, hm, r2, hp, s2)
            prods.append((Fraction(sign), ops))
    return _apply_products(v, prods)


def apply_super_operator(which: str, index, v: FockVector, nf: N2Frame | None = None) -> FockVector:
    """Dispatch on ``which`` in {"L", "G", "G+", "G-", "J"}."""
    if which == "L":
        return apply_super_virasoro(index, v)
    if which == "G":
        return apply_G(index, v)
    if which == "G+":
        return apply_G_pm(1, index, v, nf)
    if which == "G-":
        return apply_G_pm(-1, index, v, nf)
    if which == "J":
        return apply_J(index, v, nf)
    raise ValueError(f"unknown operator {which!r}")


# ---------------------------------------------------------------------------
# N=1 physical states and bracket

def physical_basis_ns(L, alpha, i, with_gram: bool = True) -> PhysicalBasis:
    """Kernel of G_{1/2} and G_{3/2} on the weight-i piece over e^alpha."""
    frame = frame_for(L)
    alpha = frame.coords(alpha)
    level = Fraction(i) - frame.inner(alpha, alpha) / 2
    if level < 0 or (2 * level).denominator != 1:
        return PhysicalBasis((alpha, Fraction(i)), [], [], 0)
    keys = graded_keys(frame, alpha, level, fermions=True)
    vecs = _constraint_kernel(frame, keys, [lambda v: apply_G(HALF, v),
                                            lambda v: apply_G(Fraction(3, 2), v)], SuperVector)
    g = gram_matrix(vecs) if with_gram else []
    return PhysicalBasis((alpha, Fraction(i)), vecs, g, len(keys))


def is_physical_ns(v: FockVector, weight) -> bool:
    if v.is_zero():
        return True
    if v.weights() != {Fraction(weight)}:
        return False
    return apply_G(HALF, v).is_zero() and apply_G(Fraction(3, 2), v).is_zero()


def ns_bracket(u: FockVector, v: FockVector, weight_budget=None, check: bool = True) -> FockVector:
    """[u, v] = (G_{-1/2} u)_0 v on weight-1/2 physical states."""
    if check and not (is_physical_ns(u, HALF) and is_physical_ns(v, HALF)):
        raise ValueError("ns_bracket needs physical vectors of weight 1/2")
    return vertex_coefficient(apply_G(-HALF, u), 0, v, weight_budget)


# ---------------------------------------------------------------------------
# N=1 DDF operators

def _budget(out: FockVector, weight_budget) -> FockVector:
    if weight_budget is not None and out.terms and max(out.weights()) > Fraction(weight_budget):
        raise BudgetError("output exceeds weight budget")
    return out


def ddf_A_ns(a, m: int, c, v: FockVector, weight_budget=None) -> FockVector:
    """A^a_m = res_z Y(G_{-1/2} psi_a(-1/2) e^{mc}, z)."""
    frame = v.frame
    a, c = frame.coords(a), frame.coords(c)
    _ddf_checks(frame, c, v, a)
    base = SuperVector.vacuum(frame, tuple(m * x for x in c))
    state = apply_G(-HALF, fermion_mode(a, -HALF, base))
    return _budget(vertex_coefficient(state, 0, v), weight_budget)


def ddf_B_ns(a, r, c, v: FockVector, weight_budget=None) -> FockVector:
    """B^a_r = res_z Y(G_{-1/2} psi_c(-1/2) psi_a(-1/2) c(-1)^{-1/2} e^{rc}, z).

    The state is expanded as T1 + T2 + T3 with half-integral powers of c(-1);
    the field of c(-1)^s is z^{-s} (1 + c^x(z))^s, using c(0) = 1 on the
    graded pieces involved, and it commutes with the remaining factors.
    """
    frame = v.frame
    a, c = frame.coords(a), frame.coords(c)
    _ddf_checks(frame, c, v, a)
    r = Fraction(r)
    if (2 * r).denominator != 1 or (2 * r).numerator % 2 == 0:
        raise ValueError("B modes lie in Z + 1/2")
    base = SuperVector.vacuum(frame, tuple(r * x for x in c))
    t1 = fermion_mode(a, -HALF, base)
    t2 = fermion_mode(c, -HALF, apply_mode(a, -1, base)) * -1
    t3 = fermion_mode(c, -HALF, fermion_mode(a, -HALF, fermion_mode(c, Fraction(-3, 2), base))) * -HALF
    crow = frame.row(c)
    lv = _boson_level_along(frame, crow, v)
    out = v._like({})
    for state, s in ((t1, HALF), (t2, -HALF), (t3, Fraction(-3, 2))):
        W = vertex_powers(state, v, -1 + s + lv)
        out = out + v._like(c_series_apply(frame, c, _power_coeff(s), W, -1, shift=-s))
    return _budget(out, weight_budget)


def transverse_basis_ns(L, alpha, c, transverse: Sequence | None = None):
    """DDF words A_{-m} ... B_{-r} ... e^{alpha + Nc} with N = 1/2 - alpha^2/2."""
    frame = frame_for(L)
    alpha, c = frame.coords(alpha), frame.coords(c)
    N = HALF - frame.inner(alpha, alpha) / 2
    if N < 0 or (2 * N).denominator != 1:
        raise ValueError("1/2 - alpha^2/2 must be a nonnegative half-integer")
    if transverse is None:
        transverse = transverse_vectors(frame, alpha, c)
    transverse = [frame.coords(t) for t in transverse]
    point = tuple(x + N * y for x, y in zip(alpha, c))
    base = SuperVector.vacuum(frame, point)
    nt = len(transverse)
    words = []
    for n2 in range(int(2 * N) + 1):
        # n2 = twice the total B mode; B modes distinct-or-coloured half-integers
        for bw in _fermion_words(Fraction(n2, 2), nt):
            rest = N - Fraction(n2, 2)
            if rest.denominator != 1:
                continue
            for parts in _partitions(int(rest)):
                for cols in _coloured(parts, nt):
                    words.append((list(zip(parts, cols)), bw))
    vecs = []
    for aw, bw in words:
        v = base
        for r, col in reversed(bw):
            v = ddf_B_ns(transverse[col], -r, c, v)
        for m, col in reversed(aw):
            v = ddf_A_ns(transverse[col], -m, c, v)
        vecs.append(v)
    return PhysicalBasis((alpha, HALF), vecs, gram_matrix(vecs))


def _coloured(parts, ncol):
    return _colourings(len(parts), ncol, parts)


def _fermion_words(total: Fraction, ncol: int):
    """Sets of distinct (half-integer mode, colour) pairs with modes summing to ``total``."""
    items = []
    r = HALF
    while r <= total:
        for col in range(ncol):
            items.append((r, col))
        r += 1
    out = []

    def rec(start, remaining, acc):
        if remaining == 0:
            out.append(list(acc))
            return
        for idx in range(start, len(items)):
            if items[idx][0] <= remaining:
                rec(idx + 1, remaining - items[idx][0], acc + [items[idx]])
    rec(0, total, [])
    return out


# ---------------------------------------------------------------------------
# N=2 physical states, bracket and lower bound

def n2_constraints(nf: N2Frame):
    return [lambda v: apply_J(0, v, nf),
            lambda v: apply_G_pm(1, HALF, v, nf), lambda v: apply_G_pm(-1, HALF, v, nf),
            lambda v: apply_G_pm(1, Fraction(3, 2), v, nf),
            lambda v: apply_G_pm(-1, Fraction(3, 2), v, nf),
            lambda v: apply_J(1, v, nf)]


def physical_basis_n2(L, alpha, with_gram: bool = True) -> PhysicalBasis:
    """P^{0,0}(alpha): weight 0, charge 0 and killed by G^+-_{n-1/2}, J_n for n > 0."""
    frame = frame_for(L)
    nf = n2_frame(frame.lattice)
    alpha = frame.coords(alpha)
    level = -frame.inner(alpha, alpha) / 2
    if level < 0:
        return PhysicalBasis((alpha, ZERO), [], [], 0)
    keys = graded_keys(frame, alpha, level, fermions=True)
    vecs = _constraint_kernel(frame, keys, n2_constraints(nf), SuperVector)
    g = gram_matrix(vecs) if with_gram else []
    return PhysicalBasis((alpha, ZERO), vecs, g, len(keys))


def is_physical_n2(v: FockVector, nf: N2Frame | None = None) -> bool:
    if v.is_zero():
        return True
    nf = nf or n2_frame(v.frame.lattice)
    if v.weights() != {ZERO}:
        return False
    return all(op(v).is_zero() for op in n2_constraints(nf))


def n2_bracket(u: FockVector, v: FockVector, weight_budget=None, check: bool = True) -> FockVector:
    """[u, v] = res_z Y(G^+_{-1/2} G^-_{-1/2} u, z) v."""
    nf = n2_frame(u.frame.lattice)
    if check and not (is_physical_n2(u, nf) and is_physical_n2(v, nf)):
        raise ValueError("n2_bracket needs vectors of P^{0,0}")
    x = apply_G_pm(1, -HALF, apply_G_pm(-1, -HALF, u, nf), nf)
    return vertex_coefficient(x, 0, v, weight_budget)


def lower_bound_c(L, alpha) -> tuple:
    """Isotropic c = c^+ + c^- with (c^+, alpha) = (c^-, alpha) = -1/2.

    With k = -(alpha, alpha)/2: c = (alpha^+ + alpha^-)/(2k) + h^+ + h^-,
    h^+- orthogonal to alpha and (h^+, h^-) = 1/(4k).
    """
    frame = frame_for(L)
    nf = n2_frame(frame.lattice)
    alpha = frame.coords(alpha)
    if len(nf.plus) != 2:
        raise ValueError("the explicit construction is for l = 2")
    k = -frame.inner(alpha, alpha) / 2
    if k <= 0:
        raise ValueError("alpha must have negative norm")
    ap, am = nf.split(frame, alpha)
    # h^+ in L^+ orthogonal to alpha^-, h^- in L^- orthogonal to alpha^+
    xm = [frame.inner(alpha, h) for h in nf.plus]   # coefficients of alpha^- on h^-
    xp = [frame.inner(alpha, h) for h in nf.minus]  # coefficients of alpha^+ on h^+
    hp = [xm[1] * x - xm[0] * y for x, y in zip(nf.plus[0], nf.plus[1])]
    hm = [xp[1] * x - xp[0] * y for x, y in zip(nf.minus[0], nf.minus[1])]
    pair = frame.inner(hp, hm)
    if not pair:
        raise ArithmeticError("degenerate choice of h^+, h^-")
    scale = 1 / (4 * k * pair)
    c = tuple((a1 + a2) / (2 * k) + x + scale * y for a1, a2, x, y in zip(ap, am, hp, hm))
    return c


def lower_bound_A(m: int, c, v: FockVector, nf: N2Frame | None = None) -> FockVector:
    """A_m = (G~ e^{mc})_0 with G~ = G^+_{-1/2} G^-_{-1/2} - G^-_{-1/2} G^+_{-1/2}."""
    frame = v.frame
    nf = nf or n2_frame(frame.lattice)
    e = SuperVector.vacuum(frame, tuple(m * x for x in frame.coords(c)))
    gt = (apply_G_pm(1, -HALF, apply_G_pm(-1, -HALF, e, nf), nf)
          - apply_G_pm(-1, -HALF, apply_G_pm(1, -HALF, e, nf), nf))
    return vertex_coefficient(gt, 0, v)


def n2_lower_bound_basis(L, alpha, c=None) -> list:
    """The p(M) words A_{m_1} ... A_{m_k} e^{alpha - Mc}, M = -alpha^2/2."""
    frame = frame_for(L)
    nf = n2_frame(frame.lattice)
    alpha = frame.coords(alpha)
    M = -frame.inner(alpha, alpha) / 2
    if M.denominator != 1 or M < 0:
        raise ValueError("-alpha^2/2 must be a nonnegative integer")
    M = int(M)
    if M == 0:
        return [SuperVector.vacuum(frame, alpha)]
    c = frame.coords(c) if c is not None else lower_bound_c(frame.lattice, alpha)
    base = SuperVector.vacuum(frame, tuple(x - M * y for x, y in zip(alpha, c)))
    out = []
    for parts in _partitions(M):
        v = base
        for m in reversed(parts):
            v = lower_bound_A(m, c, v, nf)
        out.append(v)
    return out


def _charge_piece(frame: Frame, nf: N2Frame, point, weight, charge) -> list:
    """Basis of the (L_0, J_0) = (weight, charge) piece over ``point``."""
    level = Fraction(weight) - frame.inner(point, point) / 2
    if level < 0:
        return []
    keys = graded_keys(frame, point, level, fermions=True)
    return _constraint_kernel(frame, keys, [lambda v: apply_J(0, v, nf) - v * charge], SuperVector)


def n2_tilde_dimension(L, alpha) -> int:
    """dim of P^{0,0}(alpha) / (G^+_{-1/2} V_{-1/2,-1} + G^-_{-1/2} V_{-1/2,1}) cap P^{0,0}."""
    from .linalg import rank as _rank
    frame = frame_for(L)
    nf = n2_frame(frame.lattice)
    alpha = frame.coords(alpha)
    P = physical_basis_n2(frame.lattice, alpha, with_gram=False).vectors
    if not P:
        return 0
    img = [apply_G_pm(1, -HALF, w, nf) for w in _charge_piece(frame, nf, alpha, -HALF, -1)]
    img += [apply_G_pm(-1, -HALF, w, nf) for w in _charge_piece(frame, nf, alpha, -HALF, 1)]
    img = [w for w in img if w]
    keys = sorted({k for w in P + img for k in w.terms}, key=repr)
    idx = {k: i for i, k in enumerate(keys)}

    def dense(vs):
        rows = []
        for w in vs:
            row = [ZERO] * len(keys)
            for k, c in w.terms.items():
                row[idx[k]] = c
            rows.append(row)
        return rows

    rp, ri = _rank(dense(P)), _rank(dense(img)) if img else 0
    # dim(P cap I) = dim P + dim I - dim(P + I)
    both = _rank(dense(P + img))
    return rp - (rp + ri - both)
