"""The lattice Fock space V_L with exact operator actions.

A basis monomial is stored as a key ``(bmodes, fmodes, point)``:

* ``bmodes``: sorted tuple of ``(n, j)`` with ``n < 0``, meaning the boson
  ``b_j(n)`` in the direction of the j-th lattice basis vector;
* ``fmodes``: tuple of ``(r2, j)`` with ``r2`` a negative odd integer (twice the
  half-integer mode), strictly decreasing; the monomial is
  ``psi_{b_{j1}}(r1) psi_{b_{j2}}(r2) ... |0>`` in that order;
* ``point``: the lattice point as a tuple of Fractions in the lattice basis.

The bosonic space V_L only uses ``fmodes == ()``; the fermionic directions are
shared with the bosonic ones so that V_NS = V_L (x) F_d uses the same keys.
Vectors in L (x) Q are given by coordinates in the lattice basis; pairings use
the Gram matrix and sums over an orthonormal basis are replaced by sums over
the pair (basis, dual basis), which keeps everything rational.
"""

from __future__ import annotations

import bisect
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

from .lattice import IntegralLattice, LatticeVector, build_lattice, cocycle
from .linalg import nullspace, rank, sparse_nullspace
from .series import frac_str

ZERO = Fraction(0)


class BudgetError(ValueError):
    """Raised when an output would exceed the caller's weight budget."""


def _gbinom(n, k: int) -> Fraction:
    """Generalised binomial coefficient binom(n, k) for rational n."""
    if k < 0:
        return ZERO
    out = Fraction(1)
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return out


def _add(d: dict, key, c) -> None:
    v = d.get(key, 0) + c
    if v:
        d[key] = v
    else:
        d.pop(key, None)


# ---------------------------------------------------------------------------
# frame

class Frame:
    """Lattice data shared by all vectors of one Fock space."""

    def __init__(self, lattice: IntegralLattice):
        self.lattice = lattice
        self.d = lattice.rank
        self.gram = lattice.gram
        self.ginv = lattice.gram_inverse
        self.eps = cocycle(lattice) if lattice.is_even else None
        self._gram_nz = [[(j, g) for j, g in enumerate(row) if g] for row in self.gram]
        self._ginv_nz = [[(j, g) for j, g in enumerate(row) if g] for row in self.ginv]

    def __eq__(self, other):
        return isinstance(other, Frame) and self.lattice.gram == other.lattice.gram

    def __hash__(self):
        return hash(self.lattice.gram)

    def coords(self, h) -> tuple[Fraction, ...]:
        if isinstance(h, LatticeVector):
            c = h.coords
        else:
            c = tuple(Fraction(x) for x in h)
        if len(c) != self.d:
            raise ValueError("vector length does not match the lattice rank")
        return c

    def row(self, h) -> tuple[Fraction, ...]:
        """(h, b_l) for every basis vector b_l."""
        return self.lattice.pairing_row(h)

    def inner(self, x, y) -> Fraction:
        return self.lattice.inner(x, y)

    def cocycle_value(self, a, b) -> int:
        if self.eps is None:
            return 1
        return self.eps(a, b)


_frames: dict = {}


def frame_for(lattice) -> Frame:
    L = build_lattice(lattice)
    f = _frames.get(L.gram)
    if f is None or f.lattice.label != L.label:
        f = _frames[L.gram] = Frame(L)
    return f


# ---------------------------------------------------------------------------
# vectors

def key_level(key) -> Fraction:
    b, f, _ = key
    return Fraction(-sum(n for n, _ in b)) + Fraction(-sum(r2 for r2, _ in f), 2)


class FockVector:
    """Finite exact linear combination of Fock monomials."""

    __slots__ = ("frame", "terms")

    def __init__(self, frame: Frame, terms: Mapping | None = None):
        self.frame = frame
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    # construction ---------------------------------------------------------
    @classmethod
    def vacuum(cls, frame: Frame, point=None):
        point = frame.coords(point) if point is not None else (ZERO,) * frame.d
        return cls(frame, {((), (), point): Fraction(1)})

    @classmethod
    def monomial(cls, frame: Frame, modes: Iterable = (), point=None, fmodes: Iterable = (),
                 coef=1):
        """``modes``: (direction, n<0); ``fmodes``: (direction, r<0) with r half-integral."""
        v = cls.vacuum(frame, point)
        for j, r in reversed(list(fmodes)):
            v = fermion_mode(frame.lattice.basis_vector(j), Fraction(r), v)
        for j, n in modes:
            v = apply_mode(frame.lattice.basis_vector(j), n, v)
        return v * coef

    def _like(self, terms):
        return type(self)(self.frame, terms)

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, FockVector):
            raise TypeError("expected a FockVector")
        if other.frame != self.frame:
            raise ValueError("frame mismatch")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add(out, k, c)
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = Fraction(c)
        if not c:
            return self._like({})
        return self._like({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.frame == other.frame and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    # grading --------------------------------------------------------------
    def points(self) -> set:
        return {k[2] for k in self.terms}

    def point(self) -> tuple[Fraction, ...]:
        pts = self.points()
        if len(pts) != 1:
            raise ValueError("vector is not supported on a single lattice point")
        return next(iter(pts))

    def key_weight(self, key) -> Fraction:
        return key_level(key) + self.frame.lattice.norm(key[2]) / 2

    def weights(self) -> set:
        return {self.key_weight(k) for k in self.terms}

    def weight(self) -> Fraction:
        ws = self.weights()
        if len(ws) != 1:
            raise ValueError("vector is not homogeneous")
        return next(iter(ws))

    def parity(self) -> int:
        ps = {len(k[1]) % 2 for k in self.terms}
        if len(ps) > 1:
            raise ValueError("vector has mixed parity")
        return ps.pop() if ps else 0

    # serialisation --------------------------------------------------------
    def to_dict(self) -> dict:
        pts = self.points()
        out = {"lattice": self.frame.lattice.label, "gram": [list(r) for r in self.frame.gram]}
        if len(pts) == 1:
            out["point"] = [frac_str(x) for x in next(iter(pts))]
        terms = []
        for (b, f, p), c in sorted(self.terms.items(), key=lambda kc: repr(kc[0])):
            t = {"modes": [[j, n] for n, j in b], "coef": frac_str(c)}
            if len(pts) != 1:
                t["point"] = [frac_str(x) for x in p]
            if f or isinstance(self, _fermionic_types()):
                t["fmodes"] = [[j, r2] for r2, j in f]
            terms.append(t)
        out["terms"] = terms
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping, frame: Frame | None = None):
        if frame is None:
            frame = frame_for(IntegralLattice(data["gram"], data.get("lattice", "")))
        terms = {}
        for t in data["terms"]:
            p = tuple(Fraction(x) for x in t.get("point", data.get("point")))
            b = tuple(sorted((int(n), int(j)) for j, n in t["modes"]))
            f = tuple(sorted(((int(r2), int(j)) for j, r2 in t.get("fmodes", [])), reverse=True))
            _add(terms, (b, f, p), Fraction(t["coef"]))
        return cls(frame, terms)

    @classmethod
    def from_json(cls, text: str, frame: Frame | None = None):
        return cls.from_dict(json.loads(text), frame)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (b, f, p), c in sorted(self.terms.items(), key=lambda kc: repr(kc[0])):
            s = "*".join([f"b{j}({n})" for n, j in b] + [f"psi{j}({Fraction(r2, 2)})" for r2, j in f])
            pt = ",".join(str(x) for x in p)
            parts.append(f"{c}*{s + '*' if s else ''}e^({pt})")
        return " + ".join(parts)


def _fermionic_types():
    from .superfock import SuperVector
    return (SuperVector,)


# ---------------------------------------------------------------------------
# single mode actions on keys

def _boson_create(key, n: int, j: int):
    b, f, p = key
    lst = list(b)
    bisect.insort(lst, (n, j))
    return (tuple(lst), f, p)


def _boson_remove(key, idx: int):
    b, f, p = key
    return (b[:idx] + b[idx + 1:], f, p)


def _boson_ann_key(frame: Frame, row, m: int, key):
    """h(m), m > 0, where row[l] = (h, b_l)."""
    out = []
    b = key[0]
    i = 0
    while i < len(b):
        n, l = b[i]
        k = 1
        while i + k < len(b) and b[i + k] == b[i]:
            k += 1
        if n == -m and row[l]:
            out.append((_boson_remove(key, i), row[l] * m * k))
        i += k
    return out


def _boson_mode_key(frame: Frame, h, row, n: int, key):
    if n < 0:
        return [(_boson_create(key, n, j), x) for j, x in enumerate(h) if x]
    return _boson_ann_key(frame, row, n, key)


def _fermion_insert(key, r2: int, j: int):
    """psi_{b_j}(r2/2) with r2 < 0; returns (key, sign) or None."""
    b, f, p = key
    item = (r2, j)
    # f is strictly decreasing; count elements greater than item
    pos = 0
    for x in f:
        if x > item:
            pos += 1
        elif x == item:
            return None
        else:
            break
    return (b, f[:pos] + (item,) + f[pos:], p), (-1 if pos % 2 else 1)


def _fermion_mode_key(frame: Frame, h, row, r2: int, key):
    """psi_h(r2/2) applied to a key."""
    out = []
    if r2 < 0:
        for j, x in enumerate(h):
            if x:
                res = _fermion_insert(key, r2, j)
                if res is not None:
                    out.append((res[0], x * res[1]))
        return out
    b, f, p = key
    for pos, (s2, l) in enumerate(f):
        if s2 == -r2 and row[l]:
            out.append(((b, f[:pos] + f[pos + 1:], p), row[l] * (-1 if pos % 2 else 1)))
    return out


def _apply_keywise(v: FockVector, fn) -> FockVector:
    out: dict = {}
    for k, c in v.terms.items():
        for k2, c2 in fn(k):
            _add(out, k2, c * c2)
    return v._like(out)


def apply_mode(h, n: int, v: FockVector) -> FockVector:
    """The boson h(n) on v: multiplication for n < 0, derivation for n > 0, (h, point) for n = 0."""
    frame = v.frame
    h = frame.coords(h)
    row = frame.row(h)
    n = int(n)
    if n == 0:
        return _apply_keywise(v, lambda k: [(k, sum((r * x for r, x in zip(row, k[2])), ZERO))])
    return _apply_keywise(v, lambda k: _boson_mode_key(frame, h, row, n, k))


def fermion_mode(h, r, v: FockVector) -> FockVector:
    """The fermion psi_h(r) for r in Z + 1/2."""
    frame = v.frame
    h = frame.coords(h)
    row = frame.row(h)
    r2 = Fraction(r) * 2
    if r2.denominator != 1 or r2.numerator % 2 == 0:
        raise ValueError("fermion modes must lie in Z + 1/2")
    r2 = int(r2)
    return _apply_keywise(v, lambda k: _fermion_mode_key(frame, h, row, r2, k))


def apply_group_element(beta, v: FockVector) -> FockVector:
    """e^beta acting by e^beta e^gamma = eps(beta, gamma) e^{beta+gamma}."""
    frame = v.frame
    beta = frame.coords(beta)
    out: dict = {}
    for (b, f, p), c in v.terms.items():
        np = tuple(x + y for x, y in zip(p, beta))
        _add(out, (b, f, np), c * frame.cocycle_value(beta, p))
    return v._like(out)


# ---------------------------------------------------------------------------
# Virasoro (bosonic part) by slot rules

def _virasoro_boson_key(frame: Frame, n: int, key):
    b, f, p = key
    out: dict = {}
    if n == 0:
        c = Fraction(-sum(m for m, _ in b)) + frame.inner(p, p) / 2
        if c:
            out[key] = c
        return out.items()
    gram = frame.gram
    prow = frame.row(p)
    slots = list(b)
    if n > 0:
        # pairs of annihilations
        for s in range(len(slots)):
            for t in range(s + 1, len(slots)):
                (ms, ls), (mt, lt) = slots[s], slots[t]
                if -ms - mt == n and gram[ls][lt]:
                    nk = (tuple(x for i, x in enumerate(slots) if i != s and i != t), f, p)
                    _add(out, nk, Fraction(ms * mt * gram[ls][lt]))
        # zero mode times annihilation: gamma(n)
        for s, (ms, ls) in enumerate(slots):
            if ms == -n and prow[ls]:
                _add(out, _boson_remove(key, s), prow[ls] * n)
        # creation times annihilation: slot level q > n becomes q - n
        for s, (ms, ls) in enumerate(slots):
            q = -ms
            if q > n:
                nk = _boson_create(_boson_remove(key, s), -(q - n), ls)
                _add(out, nk, Fraction(q))
        return out.items()
    m = -n
    # pairs of creations: 1/2 sum_{a+b=m} Ginv_ij b_i(-a) b_j(-b)
    for a in range(1, m):
        bb = m - a
        for i in range(frame.d):
            for j, g in frame._ginv_nz[i]:
                _add(out, _boson_create(_boson_create(key, -a, i), -bb, j), g / 2)
    # gamma(-m)
    for i, x in enumerate(p):
        if x:
            _add(out, _boson_create(key, -m, i), x)
    # annihilation at level q replaced by creation at level q + m
    for s, (ms, ls) in enumerate(slots):
        q = -ms
        _add(out, _boson_create(_boson_remove(key, s), -(q + m), ls), Fraction(q))
    return out.items()


def apply_virasoro(n: int, v: FockVector) -> FockVector:
    """L_n = 1/2 sum_k sum_i :b_i(n-k) b_i^*(k): on the bosonic factor."""
    frame = v.frame
    return _apply_keywise(v, lambda k: _virasoro_boson_key(frame, int(n), k))


# ---------------------------------------------------------------------------
# bilinear form

def _strip_first(key):
    """Split off the leftmost creation operator of a monomial."""
    b, f, p = key
    if b:
        n, j = b[0]
        return ("b", n, j), (b[1:], f, p)
    if f:
        r2, j = f[0]
        return ("f", r2, j), (b, f[1:], p)
    return None, key


@lru_cache(maxsize=None)
def _form_keys(frame: Frame, kx, ky) -> Fraction:
    if kx[2] != ky[2] or key_level(kx) != key_level(ky):
        return ZERO
    if len(kx[1]) != len(ky[1]) or sum(n for n, _ in kx[0]) != sum(n for n, _ in ky[0]):
        return ZERO
    op, rest = _strip_first(kx)
    if op is None:
        return Fraction(1)
    kind, n, j = op
    row = frame.gram[j]
    total = ZERO
    if kind == "b":
        for k2, c2 in _boson_ann_key(frame, row, -n, ky):
            total += c2 * _form_keys(frame, rest, k2)
    else:
        for k2, c2 in _fermion_mode_key(frame, None, row, -n, ky):
            total += c2 * _form_keys(frame, rest, k2)
    return total


def bilinear_form(u: FockVector, v: FockVector) -> Fraction:
    """(u, v) with h(n)^* = h(-n), psi_h(r)^* = psi_h(-r) and (e^a, e^a) = 1."""
    u._check(v)
    total = ZERO
    for ku, cu in u.terms.items():
        for kv, cv in v.terms.items():
            if ku[2] == kv[2]:
                val = _form_keys(u.frame, ku, kv)
                if val:
                    total += cu * cv * val
    return total


def theta(v: FockVector) -> FockVector:
    """The involution: h(n) -> -h(n), psi -> -psi, e^a -> e^{-a}."""
    out = {}
    for (b, f, p), c in v.terms.items():
        sign = -1 if (len(b) + len(f)) % 2 else 1
        _add(out, (b, f, tuple(-x for x in p)), c * sign)
    return v._like(out)


# ---------------------------------------------------------------------------
# vertex operators

def _exp_annihilate(frame: Frame, beta_row, states: dict, sign: int) -> dict:
    """exp(sign * sum_{n>0} beta(n) z^{-n} / n) on states {(key, zpow): coef}."""
    current = states
    levels = sorted({-n for (k, _) in states for n, _ in k[0]}, reverse=True)
    for n in levels:
        nxt: dict = {}
        for (k, zp), c in current.items():
            term = {k: c}
            kk = 0
            z = zp
            while term:
                for k2, c2 in term.items():
                    _add(nxt, (k2, z), c2)
                kk += 1
                z -= n
                new: dict = {}
                for k2, c2 in term.items():
                    for k3, c3 in _boson_ann_key(frame, beta_row, n, k2):
                        _add(new, k3, c2 * c3 * Fraction(sign, n * kk))
                term = new
        current = nxt
    return current


def _exp_create(frame: Frame, beta, states: dict, max_power) -> dict:
    """exp(sum_{n>0} beta(-n) z^n / n) on states, keeping total power <= max_power."""
    nzb = [(j, x) for j, x in enumerate(beta) if x]
    if not nzb:
        return states
    current = states
    top = max((max_power - zp for (_, zp) in states), default=-1)
    n = 1
    while n <= top:
        nxt: dict = {}
        for (k, zp), c in current.items():
            term = {k: c}
            kk = 0
            z = zp
            while term and z <= max_power:
                for k2, c2 in term.items():
                    _add(nxt, (k2, z), c2)
                kk += 1
                z += n
                if z > max_power:
                    break
                new: dict = {}
                for k2, c2 in term.items():
                    for j, x in nzb:
                        _add(new, _boson_create(k2, -n, j), c2 * x / (n * kk))
                term = new
        current = nxt
        n += 1
    return current


def _fields(ukey):
    bf = [(-n - 1, j) for n, j in ukey[0]]
    ff = [((-r2 - 1) // 2, j) for r2, j in ukey[1]]
    return bf, ff


def vertex_powers(u: FockVector, v: FockVector, max_power, min_power=None) -> dict:
    """Coefficients of z^P in Y(u, z) v for every P <= max_power (P >= min_power).

    Returns {P: FockVector}.  For each monomial of u every field is split into
    its creation and annihilation parts; the annihilation stage is finite on v
    and the creation stage only raises the power of z, so truncating at
    ``max_power`` is exact.
    """
    u._check(v)
    frame = v.frame
    max_power = Fraction(max_power)
    result: dict = defaultdict(dict)
    basis_rows = [frame.gram[j] for j in range(frame.d)]
    for ukey, ucoef in u.terms.items():
        bfields, ffields = _fields(ukey)
        beta = ukey[2]
        beta_row = frame.row(beta)
        nf, nb = len(ffields), len(bfields)
        for fmask in range(1 << nf):
            # normal ordering sign: annihilation parts moved right past creation parts
            sgn = 1
            for i in range(nf):
                if fmask >> i & 1:
                    for j in range(i + 1, nf):
                        if not fmask >> j & 1:
                            sgn = -sgn
            for bmask in range(1 << nb):
                states = {(k, ZERO): c * ucoef * sgn for k, c in v.terms.items()}
                # fermion annihilation parts, rightmost first
                for i in reversed(range(nf)):
                    if not fmask >> i & 1:
                        continue
                    kd, j = ffields[i]
                    row = basis_rows[j]
                    new: dict = {}
                    for (k, zp), c in states.items():
                        for pos, (s2, l) in enumerate(k[1]):
                            if row[l]:
                                r = Fraction(-s2, 2)
                                coef = _gbinom(-r - Fraction(1, 2), kd)
                                if coef:
                                    nk = (k[0], k[1][:pos] + k[1][pos + 1:], k[2])
                                    _add(new, (nk, zp - r - Fraction(1, 2) - kd),
                                         c * coef * row[l] * (-1 if pos % 2 else 1))
                    states = new
                # exp(-sum beta(n) z^-n / n)
                if any(beta_row):
                    states = _exp_annihilate(frame, beta_row, states, -1)
                # boson annihilation parts (including zero modes)
                for i in range(nb):
                    if not bmask >> i & 1:
                        continue
                    kd, j = bfields[i]
                    row = basis_rows[j]
                    new = {}
                    for (k, zp), c in states.items():
                        z0 = sum((row[l] * x for l, x in enumerate(k[2]) if x), ZERO)
                        coef = _gbinom(-1, kd)
                        if z0 and coef:
                            _add(new, (k, zp - 1 - kd), c * z0 * coef)
                        seen = set()
                        for n, l in k[0]:
                            m = -n
                            if m in seen:
                                continue
                            seen.add(m)
                            coef = _gbinom(-m - 1, kd)
                            if not coef:
                                continue
                            for k2, c2 in _boson_ann_key(frame, row, m, k):
                                _add(new, (k2, zp - m - 1 - kd), c * c2 * coef)
                    states = new
                # z^{beta(0)} then e^beta
                new = {}
                for (k, zp), c in states.items():
                    p = k[2]
                    z = zp + sum((beta_row[l] * x for l, x in enumerate(p) if x), ZERO)
                    np = tuple(x + y for x, y in zip(p, beta))
                    _add(new, ((k[0], k[1], np), z), c * frame.cocycle_value(beta, p))
                states = {s: c for s, c in new.items() if s[1] <= max_power}
                # creation stage
                for i in reversed(range(nf)):
                    if fmask >> i & 1:
                        continue
                    kd, j = ffields[i]
                    new = {}
                    for (k, zp), c in states.items():
                        # s - 1/2 - kd >= 0 and zp + s - 1/2 - kd <= max_power
                        e = 0
                        while zp + e <= max_power:
                            s = Fraction(2 * (e + kd) + 1, 2)
                            coef = _gbinom(s - Fraction(1, 2), kd)
                            res = _fermion_insert(k, -int(2 * s), j)
                            if res is not None and coef:
                                _add(new, (res[0], zp + e), c * coef * res[1])
                            e += 1
                    states = new
                if any(beta):
                    states = _exp_create(frame, beta, states, max_power)
                for i in range(nb):
                    if bmask >> i & 1:
                        continue
                    kd, j = bfields[i]
                    new = {}
                    for (k, zp), c in states.items():
                        e = 0
                        while zp + e <= max_power:
                            m = e + kd + 1
                            coef = comb(m - 1, kd)
                            _add(new, (_boson_create(k, -m, j), zp + e), c * coef)
                            e += 1
                    states = new
                for (k, zp), c in states.items():
                    if min_power is None or zp >= min_power:
                        _add(result[zp], k, c)
    return {P: v._like(t) for P, t in result.items() if t}


def vertex_coefficient(u: FockVector, n, v: FockVector, weight_budget=None) -> FockVector:
    """u_n v, the coefficient of z^{-n-1} in Y(u, z) v."""
    target = -Fraction(n) - 1
    out = vertex_powers(u, v, target, target).get(target, v._like({}))
    if weight_budget is not None and out.terms:
        w = max(out.weights())
        if w > Fraction(weight_budget):
            raise BudgetError(f"output weight {w} exceeds budget {weight_budget}")
    return out


def residue(u: FockVector, v: FockVector, weight_budget=None) -> FockVector:
    """res_z Y(u, z) v = u_0 v."""
    return vertex_coefficient(u, 0, v, weight_budget)


# ---------------------------------------------------------------------------
# operator series in the modes of an isotropic vector c

def _c_apply(frame: Frame, c, crow, m: int, states: dict, kind: str, max_power) -> dict:
    """Apply sum_{n>0} c(+-n) z^{-+n} to {(key, op_power, w_power): coef}."""
    out: dict = {}
    for (k, op, wp), coef in states.items():
        if kind == "+":
            seen = set()
            for n, _ in k[0]:
                if -n in seen:
                    continue
                seen.add(-n)
                for k2, c2 in _boson_ann_key(frame, crow, -n, k):
                    _add(out, (k2, op + n, wp), coef * c2)
        else:
            e = 1
            while op + wp + e <= max_power:
                for j, x in enumerate(c):
                    if x:
                        _add(out, (_boson_create(k, -e, j), op + e, wp), coef * x)
                e += 1
    return out


def c_series_apply(frame: Frame, c, coeffs, W: Mapping, target, derivative: bool = False,
                   shift=ZERO) -> dict:
    """Coefficient of z^target in z^shift * F(z) W(z), F = sum_i coeffs(i) (c^x(z))^i.

    ``c^x(z) = sum_{n != 0} c(n) z^{-n}`` (c isotropic, c(0) = 1 on the states
    involved) commutes with the fields producing W; with ``derivative`` the
    operator series is differentiated in z first.  ``W`` maps z-powers to
    FockVectors and must contain every power up to target - shift + (level of
    the c-paired modes of the original state).
    """
    c = frame.coords(c)
    crow = frame.row(c)
    target = Fraction(target)
    need = target - shift + (1 if derivative else 0)
    out: dict = {}
    # C_+ part: apply repeatedly until exhausted
    plus_layers = []
    layer = {(k, ZERO, Fraction(wp)): cf for wp, vec in W.items() for k, cf in vec.terms.items()}
    while layer:
        plus_layers.append(layer)
        layer = _c_apply(frame, c, crow, 0, layer, "+", None)
    for p, layer in enumerate(plus_layers):
        cur = {s: cf for s, cf in layer.items() if s[1] + s[2] <= need}
        j = 0
        while cur:
            i = j + p
            f = coeffs(i)
            if f:
                f = f * comb(i, j)
                for (k, op, wp), cf in cur.items():
                    if derivative:
                        if op and op - 1 + wp + shift == target:
                            _add(out, k, cf * f * op)
                    elif op + wp + shift == target:
                        _add(out, k, cf * f)
            cur = _c_apply(frame, c, crow, 0, cur, "-", need)
            j += 1
    return out


def _log_coeff(i: int) -> Fraction:
    return Fraction((-1) ** (i + 1), i) if i else ZERO


def _power_coeff(s):
    s = Fraction(s)
    return lambda i: _gbinom(s, i)


def _boson_level_along(frame: Frame, crow, v: FockVector) -> int:
    lv = 0
    for k in v.terms:
        lv = max(lv, sum(-n for n, l in k[0] if crow[l]))
    return lv


# ---------------------------------------------------------------------------
# physical states

def graded_keys(frame: Frame, point, level, fermions: bool = False) -> list:
    """All monomials over ``point`` with oscillator level ``level``."""
    point = frame.coords(point)
    level = Fraction(level)
    d = frame.d
    out = []
    if level < 0:
        return out

    def bos_parts(total: int, maxpart: int):
        # partitions as tuples of parts (descending)
        if total == 0:
            yield ()
            return
        for part in range(min(total, maxpart), 0, -1):
            for rest in bos_parts(total - part, part):
                yield (part,) + rest

    def bos_keys(total: int):
        res = []
        for parts in bos_parts(total, total):
            groups: dict = {}
            for q in parts:
                groups[q] = groups.get(q, 0) + 1
            choices = [list(combinations_with_replacement(range(d), cnt)) for cnt in groups.values()]
            levels = list(groups.keys())

            def build(i, acc):
                if i == len(levels):
                    res.append(tuple(sorted(acc)))
                    return
                for dirs in choices[i]:
                    build(i + 1, acc + [(-levels[i], j) for j in dirs])
            build(0, [])
        return res

    def ferm_keys(total2: int):
        # strictly decreasing tuples of (r2, j) with sum of -r2 equal total2
        items = []
        r2 = -1
        while -r2 <= total2:
            for j in range(d):
                items.append((r2, j))
            r2 -= 2
        items.sort(reverse=True)
        res = []

        def rec(start, remaining, acc):
            if remaining == 0:
                res.append(tuple(acc))
                return
            for idx in range(start, len(items)):
                r2_, j_ = items[idx]
                if -r2_ <= remaining:
                    rec(idx + 1, remaining + r2_, acc + [items[idx]])
        rec(0, total2, [])
        return res

    if not fermions:
        if level.denominator != 1:
            return out
        return [(b, (), point) for b in bos_keys(int(level))]
    lev2 = int(level * 2)
    for f2 in range(lev2 % 2, lev2 + 1, 2):
        fks = ferm_keys(f2)
        if not fks:
            continue
        bks = bos_keys((lev2 - f2) // 2)
        for fk in fks:
            for bk in bks:
                out.append((bk, fk, point))
    return out


@dataclass
class PhysicalBasis:
    """Basis of a space of physical vectors at one grade with its Gram matrix."""

    grade: tuple
    vectors: list
    gram: list = field(default_factory=list)
    ambient_dim: int = 0

    def __len__(self):
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors)


def _constraint_kernel(frame: Frame, keys: list, ops, vector_type=FockVector) -> list:
    """Kernel of the stacked linear maps ``ops`` (each key -> FockVector) on span(keys)."""
    rows: dict = {}
    for i, k in enumerate(keys):
        v = vector_type(frame, {k: Fraction(1)})
        for tag, op in enumerate(ops):
            for k2, c in op(v).terms.items():
                rows.setdefault((tag, k2), {})[i] = c
    kern = sparse_nullspace(list(rows.values()), len(keys))
    out = []
    for vec in kern:
        out.append(vector_type(frame, {keys[i]: c for i, c in vec.items()}))
    return out


def gram_matrix(vectors: Sequence[FockVector]) -> list[list[Fraction]]:
    n = len(vectors)
    g = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = bilinear_form(vectors[i], vectors[j])
    return g


def physical_basis(L, alpha, i, with_gram: bool = True) -> PhysicalBasis:
    """Basis of P^i(alpha): L_0 v = i v and L_1 v = L_2 v = 0 on the weight-i piece over e^alpha."""
    frame = frame_for(L)
    alpha = frame.coords(alpha)
    if any(x.denominator != 1 for x in alpha):
        raise ValueError("physical states live over lattice points")
    level = Fraction(i) - frame.inner(alpha, alpha) / 2
    if level < 0 or level.denominator != 1:
        return PhysicalBasis((alpha, Fraction(i)), [], [], 0)
    keys = graded_keys(frame, alpha, level)
    vecs = _constraint_kernel(frame, keys, [lambda v: apply_virasoro(1, v),
                                            lambda v: apply_virasoro(2, v)])
    g = gram_matrix(vecs) if with_gram else []
    return PhysicalBasis((alpha, Fraction(i)), vecs, g, len(keys))


def radical_split(basis) -> tuple[int, list]:
    """(rank of the Gram matrix, vectors spanning its kernel)."""
    g = basis.gram if isinstance(basis, PhysicalBasis) else basis
    vectors = basis.vectors if isinstance(basis, PhysicalBasis) else None
    if not g:
        return 0, []
    r = rank(g)
    kern = nullspace(g)
    if vectors is None:
        return r, kern
    nulls = []
    for coeffs in kern:
        acc = vectors[0] * 0
        for cf, vec in zip(coeffs, vectors):
            if cf:
                acc = acc + vec * cf
        nulls.append(acc)
    return r, nulls


def quotient_dimension(L, alpha, i) -> int:
    """dim P^i(alpha) / radical, computed without forming the full Gram matrix.

    With P = ker C on the graded piece and M the (nondegenerate) Fock form
    there, P intersect P-perp is parametrised by ker(C M^-1 C^T) on the row
    space of C, so the radical has dimension rank(C) - rank(C M^-1 C^T).
    """
    frame = frame_for(L)
    alpha = frame.coords(alpha)
    level = Fraction(i) - frame.inner(alpha, alpha) / 2
    if level < 0 or level.denominator != 1:
        return 0
    keys = graded_keys(frame, alpha, level)
    rows_by_out: dict = {}
    for idx, k in enumerate(keys):
        v = FockVector(frame, {k: Fraction(1)})
        for tag, n in enumerate((1, 2)):
            for k2, c in apply_virasoro(n, v).terms.items():
                rows_by_out.setdefault((tag, k2), {})[idx] = c
    C = list(rows_by_out.values())
    n = len(keys)
    dense = [[r.get(j, ZERO) for j in range(n)] for r in C]
    rc = rank(dense) if dense else 0
    if rc == 0:
        return n if n else 0
    Minv_Ct = _solve_fock_form(frame, keys, C)
    cmc = [[sum((r.get(j, ZERO) * col[j] for j in r), ZERO) for col in Minv_Ct] for r in C]
    return (n - rc) - (rc - rank(cmc))


def _solve_fock_form(frame: Frame, keys: list, C: list) -> list:
    """Columns M^-1 c for each row c of C, M the Fock Gram on ``keys``."""
    n = len(keys)
    # the form is block diagonal by the multiset of mode levels
    blocks: dict = defaultdict(list)
    for i, k in enumerate(keys):
        shape = (tuple(n_ for n_, _ in k[0]), tuple(r for r, _ in k[1]))
        blocks[shape].append(i)
    sols = [[ZERO] * n for _ in C]
    for idxs in blocks.values():
        sub = [keys[i] for i in idxs]
        M = [[_form_keys(frame, a, b) for b in sub] for a in sub]
        rhs_rows = [[c.get(i, ZERO) for i in idxs] for c in C]
        aug = [M[r] + [rhs[r] for rhs in rhs_rows] for r in range(len(idxs))]
        from .linalg import rref
        red, piv = rref(aug)
        if piv[:len(idxs)] != list(range(len(idxs))):
            raise ArithmeticError("Fock form is degenerate on a graded block")
        for r, row in enumerate(red):
            for t in range(len(C)):
                sols[t][idxs[r]] = row[len(idxs) + t]
    return sols


def is_physical(v: FockVector, weight) -> bool:
    if v.is_zero():
        return True
    if v.weights() != {Fraction(weight)}:
        return False
    return apply_virasoro(1, v).is_zero() and apply_virasoro(2, v).is_zero()


def bracket_p1(u: FockVector, v: FockVector, weight_budget=None, check: bool = True) -> FockVector:
    """[u, v] = u_0 v on weight-one physical states."""
    if check and not (is_physical(u, 1) and is_physical(v, 1)):
        raise ValueError("bracket_p1 needs physical vectors of weight 1")
    return vertex_coefficient(u, 0, v, weight_budget)


# ---------------------------------------------------------------------------
# DDF operators

def _ddf_checks(frame: Frame, c, v: FockVector, *orth) -> None:
    if frame.inner(c, c) != 0:
        raise ValueError("DDF vector c must be isotropic")
    for a in orth:
        if frame.inner(a, c) != 0:
            raise ValueError("transverse vector must be orthogonal to c")
    for p in v.points():
        if frame.inner(c, p) != 1:
            raise ValueError("(c, point) must equal 1 on the states acted on")


def ddf_A(a, m: int, c, v: FockVector, weight_budget=None) -> FockVector:
    """A^a_m = res_z Y(a(-1) e^{mc}, z)."""
    frame = v.frame
    a, c = frame.coords(a), frame.coords(c)
    _ddf_checks(frame, c, v, a)
    state = apply_mode(a, -1, FockVector.vacuum(frame, tuple(m * x for x in c)))
    return vertex_coefficient(state, 0, v, weight_budget)


def longitudinal_L(m: int, alpha, c, v: FockVector, weight_budget=None) -> FockVector:
    """The corrected longitudinal operator -res_z [Y(alpha(-1)e^{mc}) - (m/2) c'(z) Y(e^{mc})]."""
    frame = v.frame
    alpha, c = frame.coords(alpha), frame.coords(c)
    _ddf_checks(frame, c, v)
    if frame.inner(alpha, c) != 1:
        raise ValueError("(alpha, c) must equal 1")
    mc = tuple(m * x for x in c)
    first = vertex_coefficient(apply_mode(alpha, -1, FockVector.vacuum(frame, mc)), 0, v)
    out = -first
    if m:
        e = FockVector.vacuum(frame, mc)
        crow = frame.row(c)
        lv = _boson_level_along(frame, crow, v)
        # c'(z) Y(e^{mc}, z) at z^{-1}: derivative of log(1 + c^x) minus z^{-1}
        W = vertex_powers(e, v, lv + 1)
        dlog = c_series_apply(frame, c, _log_coeff, W, -1, derivative=True)
        corr = v._like(dlog) - W.get(ZERO, v._like({}))
        out = out + corr * Fraction(m, 2)
    if weight_budget is not None and out.terms and max(out.weights()) > Fraction(weight_budget):
        raise BudgetError("output exceeds weight budget")
    return out


def transverse_basis(L, alpha, c, transverse: Sequence | None = None, count_target=None):
    """DDF states A^{a_1}_{-m_1} ... e^{alpha+Mc} with M = 1 - alpha^2/2.

    ``transverse`` lists vectors a_i spanning c-perp modulo c; by default a
    basis is computed.  Words run over partitions of M coloured by the a_i.
    """
    frame = frame_for(L)
    alpha, c = frame.coords(alpha), frame.coords(c)
    M = 1 - frame.inner(alpha, alpha) / 2
    if M.denominator != 1 or M < 0:
        raise ValueError("1 - alpha^2/2 must be a nonnegative integer")
    M = int(M)
    if transverse is None:
        transverse = transverse_vectors(frame, alpha, c)
    transverse = [frame.coords(a) for a in transverse]
    base_point = tuple(x + M * y for x, y in zip(alpha, c))
    base = FockVector.vacuum(frame, base_point)
    if frame.inner(c, base_point) != 1:
        raise ValueError("(c, alpha) must equal 1")
    words = []
    for parts in _partitions(M):
        for cols in _colourings(len(parts), len(transverse), parts):
            words.append(list(zip(parts, cols)))
    vecs = []
    for word in words:
        v = base
        # rightmost operator acts first
        for m, col in reversed(word):
            v = ddf_A(transverse[col], -m, c, v)
        vecs.append(v)
    pb = PhysicalBasis((tuple(alpha), Fraction(1)), vecs, gram_matrix(vecs))
    if count_target is not None and len(vecs) != count_target:
        raise ValueError(f"expected {count_target} DDF states, got {len(vecs)}")
    return pb


def transverse_vectors(frame: Frame, alpha, c) -> list:
    """Rational basis of {a : (a, c) = (a, alpha) = 0}; spans c-perp modulo c when (alpha, c) = 1."""
    rows = [list(frame.row(c)), list(frame.row(alpha))]
    return [tuple(x) for x in nullspace(rows)]


def _partitions(n: int, maxpart: int | None = None):
    maxpart = n if maxpart is None else maxpart
    if n == 0:
        yield ()
        return
    for p in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - p, p):
            yield (p,) + rest


def _colourings(k: int, ncol: int, parts):
    """Colour assignments giving each multiset of (part, colour) once."""
    def rec(i, acc):
        if i == k:
            yield tuple(acc)
            return
        start = acc[-1] if i > 0 and parts[i] == parts[i - 1] else 0
        for col in range(start, ncol):
            yield from rec(i + 1, acc + [col])
    yield from rec(0, [])
