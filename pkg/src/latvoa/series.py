"""Exact truncated Laurent series in up to three formal variables.

Exponents are stored doubled so that half-integer powers stay integral.
Coefficients are Python ints or ``Fraction``; they are normalised so that an
integral ``Fraction`` is kept as an ``int`` (cheaper arithmetic).

A truncation bound ``T`` for a variable means every coefficient whose
exponent in that variable is below ``T`` is exact and nothing at or above
``T`` is stored.  ``None`` means the variable is not truncated (the series is
polynomial in it).
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

Number = int | Fraction


def _norm(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def _double(e) -> int:
    """Real exponent (int, Fraction, str) to doubled integer exponent."""
    f = Fraction(e) * 2
    if f.denominator != 1:
        raise ValueError(f"exponent {e} is not in (1/2)Z")
    return int(f)


def frac_str(x: Number) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    return Fraction(s)


def _min_trunc(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class MultiSeries:
    """Truncated Laurent series in an ordered list of variables."""

    __slots__ = ("_vars", "_trunc", "_terms")

    def __init__(
        self,
        variables: Sequence[str],
        terms: Mapping[tuple[int, ...], Number] | None = None,
        trunc: Sequence[int | None] | None = None,
    ):
        variables = tuple(variables)
        if not 1 <= len(variables) <= 3:
            raise ValueError("between one and three variables are supported")
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        if trunc is None:
            raise ValueError("truncation is mandatory")
        trunc = tuple(None if t is None else int(t) for t in trunc)
        if len(trunc) != len(variables):
            raise ValueError("one truncation bound per variable")
        clean: dict[tuple[int, ...], Number] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != len(variables):
                raise ValueError("exponent tuple length mismatch")
            if c == 0:
                continue
            if any(t is not None and x >= t for x, t in zip(e, trunc)):
                continue
            clean[e] = _norm(c if isinstance(c, (int, Fraction)) else Fraction(c))
        self._vars = variables
        self._trunc = trunc
        self._terms = clean

    # construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, variables, terms, trunc):
        obj = cls.__new__(cls)
        obj._vars = variables
        obj._trunc = trunc
        obj._terms = terms
        return obj

    def _like(self, terms, trunc=None):
        trunc = self._trunc if trunc is None else trunc
        cls = ExactSeries if len(self._vars) == 1 else MultiSeries
        return cls._raw(self._vars, terms, trunc)

    @classmethod
    def one(cls, variables: Sequence[str], trunc: Sequence[int | None]) -> "MultiSeries":
        variables = tuple(variables)
        out = MultiSeries(variables, {(0,) * len(variables): 1}, trunc)
        return out if len(variables) > 1 else ExactSeries._raw(out._vars, out._terms, out._trunc)

    @classmethod
    def monomial(cls, variables, exps2, coef, trunc) -> "MultiSeries":
        s = MultiSeries(variables, {tuple(exps2): coef}, trunc)
        return s._like(s._terms)

    # basic accessors ------------------------------------------------------
    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def trunc(self) -> tuple[int | None, ...]:
        """Doubled truncation bounds."""
        return self._trunc

    @property
    def terms(self) -> dict[tuple[int, ...], Number]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff2(self, exps2: Sequence[int]) -> Fraction:
        e = tuple(exps2)
        if any(t is not None and x >= t for x, t in zip(e, self._trunc)):
            raise ValueError(f"exponent {e} beyond truncation {self._trunc}")
        return Fraction(self._terms.get(e, 0))

    def coeff(self, *exps) -> Fraction:
        """Coefficient at real exponents (ints, Fractions or strings)."""
        return self.coeff2([_double(e) for e in exps])

    def min_exponent2(self, var: int) -> int | None:
        if not self._terms:
            return None
        return min(e[var] for e in self._terms)

    def max_exponent2(self, var: int) -> int | None:
        if not self._terms:
            return None
        return max(e[var] for e in self._terms)

    def constant_term(self) -> Fraction:
        return Fraction(self._terms.get((0,) * len(self._vars), 0))

    # comparisons ----------------------------------------------------------
    def _check_compatible(self, other: "MultiSeries") -> None:
        if not isinstance(other, MultiSeries):
            raise TypeError("expected a series")
        if other._vars != self._vars:
            raise ValueError(f"incompatible variables {self._vars} vs {other._vars}")

    def agrees_with(self, other: "MultiSeries") -> bool:
        """Equality on the common region of exactness."""
        self._check_compatible(other)
        trunc = tuple(_min_trunc(a, b) for a, b in zip(self._trunc, other._trunc))
        a = self.truncate2(trunc)
        b = other.truncate2(trunc)
        return a._terms == b._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (
            self._vars == other._vars
            and self._trunc == other._trunc
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self._vars, self._trunc, frozenset(self._terms.items())))

    # truncation -----------------------------------------------------------
    def truncate2(self, trunc: Sequence[int | None]) -> "MultiSeries":
        trunc = tuple(_min_trunc(a, b) for a, b in zip(self._trunc, trunc))
        terms = {
            e: c
            for e, c in self._terms.items()
            if not any(t is not None and x >= t for x, t in zip(e, trunc))
        }
        return self._like(terms, trunc)

    def truncate(self, *orders) -> "MultiSeries":
        return self.truncate2([None if o is None else _double(o) for o in orders])

    # arithmetic -----------------------------------------------------------
    def __neg__(self):
        return self._like({e: -c for e, c in self._terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._scalar(other)
        self._check_compatible(other)
        trunc = tuple(_min_trunc(a, b) for a, b in zip(self._trunc, other._trunc))
        out: dict[tuple[int, ...], Number] = {}
        for src in (self._terms, other._terms):
            for e, c in src.items():
                if any(t is not None and x >= t for x, t in zip(e, trunc)):
                    continue
                v = _norm(out.get(e, 0) + c)
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return self._like(out, trunc)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _scalar(self, c: Number) -> "MultiSeries":
        return self._like({(0,) * len(self._vars): _norm(Fraction(c))} if c else {})

    def scale(self, c: Number) -> "MultiSeries":
        c = _norm(Fraction(c))
        if c == 0:
            return self._like({})
        return self._like({e: _norm(v * c) for e, v in self._terms.items()})

    def shift2(self, exps2: Sequence[int]) -> "MultiSeries":
        """Multiply by the monomial with doubled exponents ``exps2``."""
        s = tuple(int(x) for x in exps2)
        terms = {tuple(a + b for a, b in zip(e, s)): c for e, c in self._terms.items()}
        trunc = tuple(None if t is None else t + d for t, d in zip(self._trunc, s))
        return self._like(terms, trunc)

    def shift(self, *exps) -> "MultiSeries":
        return self.shift2([_double(e) for e in exps])

    def product_trunc(self, other: "MultiSeries") -> tuple[int | None, ...]:
        out = []
        for v in range(len(self._vars)):
            ta, tb = self._trunc[v], other._trunc[v]
            ma, mb = self.min_exponent2(v), other.min_exponent2(v)
            cands = []
            if ta is not None:
                cands.append(ta + (mb if mb is not None else ta))
            if tb is not None:
                cands.append(tb + (ma if ma is not None else tb))
            if not self._terms or not other._terms:
                # zero product: keep the tighter of the input bounds
                cands = [t for t in (ta, tb) if t is not None]
            out.append(min(cands) if cands else None)
        return tuple(out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_compatible(other)
        trunc = self.product_trunc(other)
        return self._like(_convolve(self._terms, other._terms, trunc), trunc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return self * other.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        result = MultiSeries.one(self._vars, self._trunc)
        if n == 0:
            return result
        base = self
        first = True
        while n:
            if n & 1:
                result = base if first else result * base
                first = False
            n >>= 1
            if n:
                base = base * base
        return result

    def _is_topologically_nilpotent(self) -> bool:
        """Every term has a positive exponent in some truncated variable and
        no negative exponent in any truncated variable."""
        truncated = [i for i, t in enumerate(self._trunc) if t is not None]
        if not truncated:
            return not self._terms
        for e in self._terms:
            if any(e[i] < 0 for i in truncated):
                return False
            if not any(e[i] > 0 for i in truncated):
                return False
        return True

    def _geometric(self, coeffs) -> "MultiSeries":
        """Sum_k coeffs(k) * self**k for a topologically nilpotent series."""
        if not self._is_topologically_nilpotent():
            raise ValueError("series is not topologically nilpotent")
        total = MultiSeries.one(self._vars, self._trunc).scale(coeffs(0))
        power = MultiSeries.one(self._vars, self._trunc)
        k = 0
        while True:
            k += 1
            # every power is needed only below the input's own bounds
            power = (power * self).truncate2(self._trunc)
            if power.is_zero():
                break
            c = coeffs(k)
            if c:
                total = total + power.scale(c)
        return total.truncate2(self._trunc)

    def inverse(self) -> "MultiSeries":
        if not self._terms:
            raise ZeroDivisionError("inverse of zero series")
        lead = min(self._terms)
        c = self._terms[lead]
        if c == 0:
            raise ZeroDivisionError("non-invertible leading term")
        rest = self.shift2([-x for x in lead]).scale(Fraction(1) / Fraction(c)) - 1
        if not rest.is_zero() and not rest._is_topologically_nilpotent():
            raise ValueError("leading term is not invertible in this ring")
        inv = rest._geometric(lambda k: (-1) ** k)
        inv = inv.scale(Fraction(1) / Fraction(c)).shift2([-x for x in lead])
        # the inverse is exact up to T - 2*lead in each variable
        trunc = tuple(
            None if t is None else t - 2 * x for t, x in zip(self._trunc, lead)
        )
        return inv.truncate2(trunc)

    def exp(self) -> "MultiSeries":
        if self.constant_term() != 0:
            raise ValueError("exp requires constant term 0")
        return self._geometric(lambda k: Fraction(1, factorial(k)))

    def log(self) -> "MultiSeries":
        if self.constant_term() != 1:
            raise ValueError("log requires constant term 1")
        g = self - 1
        if g.is_zero():
            return g
        return g._geometric(lambda k: Fraction((-1) ** (k + 1), k) if k else 0)

    # slicing and reshaping ------------------------------------------------
    def slice2(self, var: int, exp2: int) -> "MultiSeries":
        """Coefficient of var**(exp2/2) as a series in the remaining variables."""
        if len(self._vars) == 1:
            raise ValueError("cannot slice a one-variable series")
        t = self._trunc[var]
        if t is not None and exp2 >= t:
            raise ValueError("slice beyond truncation")
        keep = [i for i in range(len(self._vars)) if i != var]
        terms = {
            tuple(e[i] for i in keep): c for e, c in self._terms.items() if e[var] == exp2
        }
        vars_ = tuple(self._vars[i] for i in keep)
        trunc = tuple(self._trunc[i] for i in keep)
        cls = ExactSeries if len(vars_) == 1 else MultiSeries
        return cls._raw(vars_, terms, trunc)

    def map_exponents(self, variables, fn, trunc) -> "MultiSeries":
        """Re-index terms via ``fn(exps2) -> new exps2``; caller supplies the
        truncation valid for the image."""
        out: dict[tuple[int, ...], Number] = {}
        for e, c in self._terms.items():
            ne = tuple(fn(e))
            v = _norm(out.get(ne, 0) + c)
            if v:
                out[ne] = v
            else:
                out.pop(ne, None)
        return MultiSeries(variables, out, trunc) if len(variables) > 1 else ExactSeries(
            variables[0], out, trunc[0]
        )

    # serialisation --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "vars": list(self._vars),
            "trunc": list(self._trunc),
            "terms": [list(e) + [frac_str(c)] for e, c in sorted(self._terms.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "MultiSeries":
        vars_ = tuple(data["vars"])
        terms = {tuple(int(x) for x in t[:-1]): Fraction(t[-1]) for t in data["terms"]}
        trunc = tuple(data["trunc"])
        if len(vars_) == 1:
            return ExactSeries(vars_[0], {e[0]: c for e, c in terms.items()}, trunc[0])
        return MultiSeries(vars_, terms, trunc)

    @classmethod
    def from_json(cls, text: str) -> "MultiSeries":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        shown = sorted(self._terms.items())[:8]
        body = " + ".join(
            f"{frac_str(c)}*" + "*".join(f"{v}^{Fraction(x, 2)}" for v, x in zip(self._vars, e))
            for e, c in shown
        )
        more = " + ..." if len(self._terms) > 8 else ""
        return f"{type(self).__name__}({body or '0'}{more}; trunc={self._trunc})"


class ExactSeries(MultiSeries):
    """One-variable truncated Laurent series."""

    __slots__ = ()

    def __init__(self, variable: str = "q", terms: Mapping[int, Number] | None = None,
                 trunc: int | None = None):
        if trunc is None:
            raise ValueError("truncation is mandatory")
        super().__init__((variable,), {(e,): c for e, c in (terms or {}).items()}, (trunc,))

    @classmethod
    def from_coeffs(cls, coeffs: Mapping, order, variable: str = "q") -> "ExactSeries":
        """Build from real exponents; ``order`` is the real truncation exponent."""
        return cls(variable, {_double(e): Fraction(c) for e, c in coeffs.items()}, _double(order))

    @classmethod
    def from_list(cls, coeffs: Sequence, order=None, start=0, variable: str = "q") -> "ExactSeries":
        """Integer-spaced coefficients starting at exponent ``start``."""
        order = start + len(coeffs) if order is None else order
        return cls(variable, {_double(start + i): c for i, c in enumerate(coeffs)}, _double(order))

    @property
    def variable(self) -> str:
        return self._vars[0]

    @property
    def order(self) -> Fraction:
        return Fraction(self._trunc[0], 2)

    def __getitem__(self, exponent) -> Fraction:
        return self.coeff(exponent)

    def coefficients(self, start, stop, step=1) -> list[Fraction]:
        """Coefficients at start, start+step, ... below stop (real exponents)."""
        out = []
        e = Fraction(start)
        while e < Fraction(stop):
            out.append(self.coeff(e))
            e += Fraction(step)
        return out


# ---------------------------------------------------------------------------
# convolution kernel


def _convolve(a: Mapping, b: Mapping, trunc: Sequence[int | None]) -> dict:
    if not a or not b:
        return {}
    if len(b) > len(a):
        a, b = b, a
    nv = len(trunc)
    out: dict[tuple[int, ...], Number] = {}
    get = out.get
    if nv == 1:
        t = trunc[0]
        bl = sorted((e[0], c) for e, c in b.items())
        for (ea,), ca in a.items():
            for eb, cb in bl:
                e = ea + eb
                if t is not None and e >= t:
                    break
                out[(e,)] = get((e,), 0) + ca * cb
    else:
        bl = sorted(b.items())
        t0 = trunc[0]
        rest = list(enumerate(trunc))[1:]
        for ea, ca in a.items():
            for eb, cb in bl:
                e0 = ea[0] + eb[0]
                if t0 is not None and e0 >= t0:
                    break
                e = (e0,) + tuple(ea[i] + eb[i] for i in range(1, nv))
                if any(t is not None and e[i] >= t for i, t in rest):
                    continue
                out[e] = get(e, 0) + ca * cb
    return {e: _norm(c) for e, c in out.items() if c}


# ---------------------------------------------------------------------------
# generating functions


def _sigma(n: int, k: int = 1) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def _euler_power(e: int, count: int) -> list[Number]:
    """Coefficients a_0..a_{count-1} of prod_{n>=1} (1 - x^n)^e."""
    a: list[Number] = [1] + [0] * max(count - 1, 0)
    sig = [0] + [_sigma(j) for j in range(1, count)]
    for k in range(1, count):
        s = sum(sig[j] * a[k - j] for j in range(1, k + 1))
        a[k] = _norm(Fraction(-e * s, k))
    return a[:count]


def _ceil_int(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def partitions_colored(l: int, order) -> ExactSeries:
    """p_l(n): coefficients of prod (1 - q^n)^(-l), exponents below ``order``."""
    if l < 1:
        raise ValueError("number of colours must be positive")
    count = max(_ceil_int(Fraction(order)), 0)
    return ExactSeries.from_list(_euler_power(-l, count), order=order)


def eta_product(factors: Iterable[tuple[int, int]], order, split_prefactor: bool = False):
    """prod eta(m tau)^e truncated below ``order`` (absolute exponent).

    When the total prefactor exponent sum(m e)/24 is not in (1/2)Z it can only
    be returned separately: pass ``split_prefactor=True`` to receive
    ``(prefactor, series)`` where the series omits the q^prefactor factor.
    """
    factors = list(factors)
    pref = Fraction(0)
    for m, e in factors:
        if m < 1:
            raise ValueError("eta scales must be positive")
        if not isinstance(e, int):
            raise ValueError("eta exponents must be integers")
        pref += Fraction(m * e, 24)
    order = Fraction(order)
    representable = (pref * 2).denominator == 1
    if not representable and not split_prefactor:
        raise ValueError(
            f"leading exponent {pref} is not in (1/2)Z; pass split_prefactor=True"
        )
    body_order = order - pref
    count = max(_ceil_int(body_order), 0)
    result = ExactSeries("q", {0: 1}, 2 * count)
    for m, e in factors:
        if e == 0:
            continue
        n_terms = count // m + (1 if count % m else 0)
        coeffs = _euler_power(e, max(n_terms, 1))
        f = ExactSeries("q", {2 * m * i: c for i, c in enumerate(coeffs)}, 2 * count)
        result = result * f
    result = result.truncate2([2 * count])
    if split_prefactor:
        return pref, result
    shifted = result.shift(pref)
    if (order * 2).denominator == 1:
        return shifted.truncate2([_double(order)])
    return shifted


def eisenstein(k: int, order) -> ExactSeries:
    """E_k with constant term 1 for k in {2, 4, 6}."""
    consts = {2: -24, 4: 240, 6: -504}
    if k not in consts:
        raise ValueError("only k = 2, 4, 6 are supported")
    count = max(_ceil_int(Fraction(order)), 0)
    coeffs = [1] + [consts[k] * _sigma(n, k - 1) for n in range(1, count)]
    return ExactSeries.from_list(coeffs[:count], order=order)


def j_minus_720(order) -> ExactSeries:
    """E_4^3 eta^(-24) - 720, exact below ``order`` (order >= 0)."""
    order = Fraction(order)
    if order < 0:
        raise ValueError("order must be non-negative")
    e4 = eisenstein(4, order + 1)
    inv_eta = partitions_colored(24, order + 1).shift(-1)
    return (e4**3 * inv_eta - 720).truncate(order)


def ramanujan_tau(n: int) -> Fraction:
    if n < 1:
        raise ValueError("tau(n) needs n >= 1")
    return Fraction(_euler_power(24, n)[n - 1])


def _half_odd_product(sign: int, power: int, order2: int) -> ExactSeries:
    """prod_{i in Z>=0 + 1/2} (1 + sign*q^i)^power, doubled truncation order2."""
    result = ExactSeries("q", {0: 1}, order2)
    i2 = 1
    while i2 < order2:
        binom = {}
        j = 0
        while j * i2 < order2 and j <= power:
            binom[j * i2] = _binom_int(power, j) * sign**j
            j += 1
        result = result * ExactSeries("q", binom, order2)
        i2 += 2
    return result


def _binom_int(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def ns_multiplicity_series(order) -> ExactSeries:
    """prod_{i half-odd} (1+q^i)^8 / prod_{n>=1} (1-q^n)^8."""
    order2 = _double(order)
    num = _half_odd_product(1, 8, order2)
    count = (order2 + 1) // 2
    den = ExactSeries("q", {2 * i: c for i, c in enumerate(_euler_power(-8, max(count, 1)))}, order2)
    return (num * den).truncate2([order2])


def half_odd_product(sign: int, power: int, order) -> ExactSeries:
    """prod_{i in Z>=0+1/2} (1 + sign q^i)^power below ``order``."""
    return _half_odd_product(sign, power, _double(order))


def integer_product(sign: int, power: int, order) -> ExactSeries:
    """prod_{n>=1} (1 + sign q^n)^power below ``order``."""
    order2 = _double(order)
    result = ExactSeries("q", {0: 1}, order2)
    n2 = 2
    while n2 < order2:
        terms = {}
        j = 0
        while j * n2 < order2 and (power < 0 or j <= power):
            terms[j * n2] = _gen_binom(power, j) * sign**j
            j += 1
        result = result * ExactSeries("q", terms, order2)
        n2 += 2
    return result


def _gen_binom(n, k: int) -> Number:
    num = Fraction(1)
    for i in range(k):
        num *= Fraction(n) - i
    return _norm(num / factorial(k))
