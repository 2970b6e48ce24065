"""Borcherds–Kac–Moody side: BKM matrices, denominators, Hecke operators and products.

Two-variable series live in the variables (q, xi) and three-variable ones in
(q, xi, s), where xi is the specialisation z = zeta * v0 of the lattice
variable: the lattice vector l contributes xi^{(l, v0)}.  As everywhere in the
package, exponents inside a ``MultiSeries`` are doubled.

The products over the fake-monster roots contain the factor (1 - q^{-1} s), so
their s^M coefficients start at q^{-M}.  Internally every such product is
expanded in u = s/q instead, where all q-exponents are non-negative and the
usual truncation bookkeeping applies; the result is converted back at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import NamedTuple, Sequence

from .fock import BudgetError
from .lattice import (
    IntegralLattice,
    LatticeVector,
    RootSystem,
    leech,
    short_vectors,
    vector_histogram,
)
from .series import (
    ExactSeries,
    MultiSeries,
    _double,
    _euler_power,
    eta_product,
    frac_str,
    j_minus_720,
    partitions_colored,
)


class IdentityFailure(AssertionError):
    """Two independent computations of the same quantity disagree."""


class Expansion(NamedTuple):
    """A product expansion with its monomial prefactor split off.

    ``prefactor`` maps variable names to real exponents; ``dropped`` counts the
    factors (1 - 1) removed because the specialisation sent them to zero.
    """

    series: MultiSeries
    prefactor: dict
    dropped: int = 0


# ---------------------------------------------------------------------------
# BKM matrices


@dataclass
class BkmMatrix:
    entries: list
    real_indices: list = field(default_factory=list)
    imaginary_indices: list = field(default_factory=list)

    @classmethod
    def from_rows(cls, rows) -> "BkmMatrix":
        ok, diag = is_bkm_matrix(rows)
        if not ok:
            raise ValueError("not a BKM matrix: " + "; ".join(diag))
        A = [[Fraction(x) for x in r] for r in rows]
        real = [i for i in range(len(A)) if A[i][i] == 2]
        imag = [i for i in range(len(A)) if A[i][i] <= 0]
        return cls(A, real, imag)

    @property
    def is_generalized_cartan(self) -> bool:
        return len(self.real_indices) == len(self.entries)


def is_bkm_matrix(A) -> tuple[bool, list[str]]:
    """Check the four BKM conditions; the second value names every violation."""
    rows = [[Fraction(x) for x in r] for r in A]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("BKM check needs a square matrix")
    diag = []
    for i in range(n):
        a = rows[i][i]
        if not (a == 2 or a <= 0):
            diag.append(f"condition 1: a[{i}][{i}] = {frac_str(a)} is neither 2 nor <= 0")
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if rows[i][j] > 0:
                diag.append(f"condition 2: a[{i}][{j}] = {frac_str(rows[i][j])} > 0")
            if (rows[i][j] == 0) != (rows[j][i] == 0) and i < j:
                diag.append(f"condition 3: a[{i}][{j}] and a[{j}][{i}] disagree on vanishing")
    for i in range(n):
        if rows[i][i] == 2:
            bad = [j for j in range(n) if rows[i][j].denominator != 1]
            if bad:
                diag.append(f"condition 4: row {i} has non-integral entries at {bad}")
    return not diag, diag


# ---------------------------------------------------------------------------
# small helpers


def _roots_and_rho(N):
    """(lattice, positive roots, Weyl vector) for a root system or a positive lattice."""
    if isinstance(N, RootSystem):
        return N.lattice, list(N.positive_roots), N.weyl_vector
    if not isinstance(N, IntegralLattice):
        raise TypeError("expected a RootSystem or an IntegralLattice")
    pos = []
    for v in short_vectors(N, 2):
        if N.norm(v) != 2:
            continue
        first = next(x for x in v if x)
        if first > 0:
            pos.append(v)
    rho = LatticeVector([Fraction(0)] * N.rank)
    for r in pos:
        rho = rho + r
    return N, pos, rho * Fraction(1, 2)


def _v0(L: IntegralLattice, v0) -> LatticeVector:
    v = LatticeVector(v0)
    if len(v) != L.rank:
        raise ValueError("specialisation vector has the wrong length")
    return v


def _one_minus_power(mono: tuple, coef, E, variables, trunc) -> MultiSeries:
    """(1 - coef * m)^E for a monomial m with doubled exponents ``mono``."""
    if isinstance(E, Fraction):
        if E.denominator != 1:
            raise ValueError("product exponents must be integers")
        E = E.numerator
    terms = {}
    if E >= 0:
        for j in range(E + 1):
            e = tuple(j * x for x in mono)
            if any(t is not None and x >= t for x, t in zip(e, trunc)):
                break
            terms[e] = comb(E, j) * (-coef) ** j
        return MultiSeries(variables, terms, trunc)
    if not any(x > 0 and t is not None for x, t in zip(mono, trunc)):
        raise ValueError("negative exponent on a factor that is not topologically small")
    j = 0
    while True:
        e = tuple(j * x for x in mono)
        if any(t is not None and x >= t for x, t in zip(e, trunc)):
            break
        terms[e] = comb(-E + j - 1, j) * coef**j
        j += 1
    return MultiSeries(variables, terms, trunc)


def _euler(power: int, order: int, variables, trunc) -> MultiSeries:
    """prod_{n>=1} (1 - q^n)^power as a series in ``variables`` (q first)."""
    coeffs = _euler_power(power, max(order, 1))
    pad = (0,) * (len(variables) - 1)
    return MultiSeries(variables, {(2 * i,) + pad: c for i, c in enumerate(coeffs)}, trunc)


# ---------------------------------------------------------------------------
# affine denominator


def affine_denominator(rs, q_order: int, v0=None, xi_range=None) -> Expansion:
    """Product side of the affine denominator, specialised by p_alpha = xi^{-(alpha, v0)}.

    e^rho prod_m (1-q^m)^d prod_{alpha>0} prod_{n>=1} (1 - q^{n-1} p)(1 - q^n / p);
    the e^rho = xi^{(rho, v0)} prefactor is returned separately.  ``rs`` may be
    an integer d for a rank-d torus (no finite roots).  Factors specialising to
    (1 - 1) are dropped and counted.
    """
    q_order = int(q_order)
    if q_order < 1:
        raise ValueError("truncation too small: q_order must be at least 1")
    variables = ("q", "xi")
    trunc = (2 * q_order, None)
    if isinstance(rs, int):
        return Expansion(_euler(rs, q_order, variables, trunc), {"xi": Fraction(0)}, 0)
    L, pos, rho = _roots_and_rho(rs)
    v0 = _v0(L, v0 if v0 is not None else L.zero())
    result = _euler(L.rank, q_order, variables, trunc)
    dropped = 0
    for alpha in pos:
        p2 = -_double(L.inner(alpha, v0))
        for n in range(1, q_order + 1):
            for mono in (((2 * (n - 1)), p2), (2 * n, -p2)):
                if mono[0] >= 2 * q_order:
                    continue
                if mono == (0, 0):
                    dropped += 1
                    continue
                result = result * _one_minus_power(mono, 1, 1, variables, trunc)
    if xi_range is not None:
        w = _double(xi_range)
        result = MultiSeries(variables, {e: c for e, c in result.items() if abs(e[1]) <= w}, trunc)
    return Expansion(result, {"xi": L.inner(rho, v0)}, dropped)


# ---------------------------------------------------------------------------
# fake monster character


def fake_monster_character(order: int, lattice: IntegralLattice | None = None) -> dict:
    """c(mn) at grades (m, n), m >= 1, -1 <= mn <= order, computed two ways.

    Route one reads the q^{mn} coefficient of j - 720.  Route two sums
    p_24(1 - l^2/2 + mn) over Leech vectors l.  Raises ``IdentityFailure``
    on any disagreement.
    """
    order = int(order)
    if order < 1:
        raise ValueError("order must be at least 1")
    j = j_minus_720(order + 1)
    p24 = partitions_colored(24, order + 2)
    L = leech() if lattice is None else lattice
    hist = vector_histogram(L, 2 + 2 * order)
    by_norm: dict[int, int] = {}
    for (nrm, _), c in hist.items():
        by_norm[nrm] = by_norm.get(nrm, 0) + c
    values = {}
    for k in range(-1, order + 1):
        via_j = j[k]
        via_leech = Fraction(0)
        for nrm, cnt in by_norm.items():
            idx = 1 - nrm // 2 + k
            if idx >= 0:
                via_leech += cnt * p24[idx]
        if via_j != via_leech:
            raise IdentityFailure(
                f"c({k}): j-720 gives {frac_str(via_j)}, Leech sum gives {frac_str(via_leech)}"
            )
        values[k] = via_j
    table = {}
    for m in range(1, max(order, 1) + 1):
        for n in range(-1, order + 1):
            if -1 <= m * n <= order:
                table[(m, n)] = values[m * n]
    return table


# ---------------------------------------------------------------------------
# Jacobi forms and Hecke operators


@dataclass(frozen=True)
class JacobiFormSeries:
    """Coefficient table c(n, r) of sum c(n, r) q^n xi^r, exact for n < order."""

    weight: int
    index: Fraction
    coeffs: dict
    order: int

    def __post_init__(self):
        clean = {}
        for (n, r), c in self.coeffs.items():
            n, r = Fraction(n), Fraction(r)
            if n.denominator != 1 or r.denominator != 1:
                raise ValueError("Jacobi coefficients need integral (n, r)")
            if n >= self.order:
                continue
            c = Fraction(c)
            if c:
                clean[(int(n), int(r))] = c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "index", Fraction(self.index))

    def __getitem__(self, key) -> Fraction:
        n, r = key
        if n >= self.order:
            raise ValueError(f"coefficient q^{n} lies beyond the truncation q^{self.order}")
        return self.coeffs.get((n, r), Fraction(0))

    def to_multiseries(self) -> MultiSeries:
        return MultiSeries(("q", "xi"), {(2 * n, 2 * r): c for (n, r), c in self.coeffs.items()},
                           (2 * self.order, None))

    @classmethod
    def from_multiseries(cls, f: MultiSeries, weight: int, index) -> "JacobiFormSeries":
        if f.variables != ("q", "xi"):
            raise ValueError("expected a series in (q, xi)")
        tq = f.trunc[0]
        if tq is None or tq % 2:
            raise ValueError("expected an integral q truncation")
        coeffs = {}
        for (eq, ex), c in f.items():
            if eq % 2 or ex % 2:
                raise ValueError("half-integral exponent in a Jacobi table")
            coeffs[(eq // 2, ex // 2)] = c
        return cls(weight, index, coeffs, tq // 2)

    def to_dict(self) -> dict:
        return {
            "weight": self.weight,
            "index": frac_str(self.index),
            "order": self.order,
            "coeffs": [[n, r, frac_str(c)] for (n, r), c in sorted(self.coeffs.items())],
        }


def hecke_Tl(phi: JacobiFormSeries, l: int) -> JacobiFormSeries:
    """phi|T_l with coefficients sum_{a | (n, r, l)} a^{k-1} c(n l / a^2, r / a).

    The image is exact for n l < order, i.e. below floor((order - 1)/l) + 1.
    """
    l = int(l)
    if l < 1:
        raise ValueError("Hecke index must be positive")
    k = phi.weight
    new_order = (phi.order - 1) // l + 1
    divisors = [a for a in range(1, l + 1) if l % a == 0]
    out: dict = {}
    for (n0, r0), c in phi.coeffs.items():
        for a in divisors:
            num = n0 * a * a
            if num % l:
                continue
            n = num // l
            if n % a or n >= new_order:
                continue
            key = (n, a * r0)
            out[key] = out.get(key, 0) + Fraction(a) ** (k - 1) * c
    return JacobiFormSeries(k, phi.index * l, out, new_order)


def phi_minus2_1(order: int) -> JacobiFormSeries:
    """Weak Jacobi form of weight -2 and index 1, exact below q^order.

    (xi - 2 + 1/xi) prod_n (1 - q^n xi)^2 (1 - q^n/xi)^2 / (1 - q^n)^4.
    """
    variables, trunc = ("q", "xi"), (2 * order, None)
    f = MultiSeries(variables, {(0, 2): 1, (0, 0): -2, (0, -2): 1}, trunc)
    for n in range(1, order):
        for s in (1, -1):
            f = f * MultiSeries(variables, {(0, 0): 1, (2 * n, 2 * s): -1}, trunc) ** 2
        f = f * MultiSeries(variables, {(0, 0): 1, (2 * n, 0): -1}, trunc) ** -4
    return JacobiFormSeries.from_multiseries(f, -2, 1)


def theta_quotient_phi(N, v0, order: int) -> JacobiFormSeries:
    """eta^{-24} Theta_N along z = zeta v0: the coefficients p_24(1 + n - l^2/2)."""
    L = N.lattice if isinstance(N, RootSystem) else N
    v0 = _v0(L, v0)
    inv_eta = eta_product([(1, -24)], order)
    theta = vector_histogram(L, 2 * order, v0)
    terms = {}
    for (nrm, p), cnt in theta.items():
        terms[(nrm, _double(p))] = cnt
    th = MultiSeries(("q", "xi"), terms, (2 * (order + 1), None))
    eta2 = MultiSeries(("q", "xi"), {(e[0], 0): c for e, c in inv_eta.items()}, (2 * order, None))
    f = (eta2 * th).truncate2((2 * order, None))
    return JacobiFormSeries.from_multiseries(f, 0, L.norm(v0) / 2)


def phi_order_needed(m_max: int, q_order: int) -> int:
    """Truncation of phi needed to know the first ``m_max`` Fourier–Jacobi terms below q^q_order."""
    T = q_order + m_max
    return max(m * (T - m - 1) + 1 for m in range(1, m_max + 1))


def fourier_jacobi_via_hecke(phi: JacobiFormSeries, m_max: int, q_order: int,
                             weights: str = "stated") -> list[MultiSeries]:
    """Coefficients of s^0..s^m_max in exp(-sum_{m>=1} w_m (phi|T_m) s^m).

    ``weights="stated"`` uses w_m = 1/m; ``weights="log"`` uses w_m = 1, the
    weights produced by taking the logarithm of the product directly.
    """
    if weights not in ("stated", "log"):
        raise ValueError("weights must be 'stated' or 'log'")
    m_max, q_order = int(m_max), int(q_order)
    T = q_order + m_max
    variables = ("q", "xi", "u")
    trunc = (2 * T, None, 2 * (m_max + 1))
    X = MultiSeries(variables, {}, trunc)
    for m in range(1, m_max + 1):
        hm = hecke_Tl(phi, m)
        if hm.order < T - m:
            raise ValueError(
                f"insufficient truncation: phi|T_{m} is exact below q^{hm.order}, "
                f"need q^{T - m}; supply phi to order {phi_order_needed(m_max, q_order)}"
            )
        w = Fraction(1, m) if weights == "stated" else Fraction(1)
        X = X + MultiSeries(variables, {(2 * (n + m), 2 * r, 2 * m): -w * c
                                        for (n, r), c in hm.coeffs.items()}, trunc)
    E = X.exp()
    out = []
    for M in range(m_max + 1):
        sl = E.slice2(2, 2 * M).shift2((-2 * M, 0))
        out.append(sl.truncate2((2 * q_order, None)))
    return out


# ---------------------------------------------------------------------------
# cusp Weyl vector and the two product expansions


def weyl_vector_cusp(rs: RootSystem) -> tuple[Fraction, LatticeVector, Fraction]:
    """(A, B, C) = (1 + |R|/24, rho_f, |R|/24) for a rank-24 Niemeier root system."""
    if not isinstance(rs, RootSystem):
        raise TypeError("weyl_vector_cusp needs a RootSystem")
    if rs.rank != 24:
        raise ValueError("Niemeier root systems have rank 24")
    try:
        h = rs.coxeter_number
    except ValueError as exc:
        raise ValueError("unequal Coxeter numbers: not a Niemeier root system") from exc
    C = Fraction(2 * len(rs.positive_roots), 24)
    if C != h:
        raise ValueError(f"|R|/24 = {C} differs from the Coxeter number {h}")
    return 1 + C, rs.weyl_vector, C


def gritsenko_psi(N, v0, q_order: int) -> Expansion:
    """eta^24 prod_{l>0} theta(tau, (l, z)) / eta, expanded through the theta sums.

    theta(tau, z) is taken as q^{1/8} p^{1/2} sum_n (-1)^n q^{n(n+1)/2} p^n.
    A root with (l, v0) = 0 makes theta vanish; it is replaced by the limit
    theta / (p^{1/2} - p^{-1/2}), whose sum is sum_n (-1)^n n q^{n(n+1)/2}.
    The q^{1 + |R+|/12} xi^{(rho, v0)} prefactor is returned separately.
    """
    q_order = int(q_order)
    if q_order < 1:
        raise ValueError("truncation too small: q_order must be at least 1")
    L, pos, rho = _roots_and_rho(N)
    v0 = _v0(L, v0)
    variables = ("q", "xi")
    trunc = (2 * q_order, None)
    counts: dict[int, int] = {}
    for alpha in pos:
        p2 = _double(L.inner(alpha, v0))
        counts[p2] = counts.get(p2, 0) + 1
    result = _euler(24 - len(pos), q_order, variables, trunc)
    dropped = 0
    nmax = 0
    while (nmax + 1) * (nmax + 2) // 2 < q_order:
        nmax += 1
    ns = range(-nmax - 2, nmax + 2)
    for p2, cnt in sorted(counts.items()):
        terms: dict = {}
        for n in ns:
            key = (n * (n + 1), n * p2)
            terms[key] = terms.get(key, 0) + (-1) ** n * (n if p2 == 0 else 1)
        if p2 == 0:
            dropped += cnt
        result = result * MultiSeries(variables, terms, trunc) ** cnt
    pref = {"q": 1 + Fraction(len(pos), 12), "xi": L.inner(rho, v0)}
    return Expansion(result, pref, dropped)


def _exponent_table(exponents: ExactSeries | None, kmax: int) -> tuple[ExactSeries, int]:
    if exponents is None:
        exponents = eta_product([(1, -24)], kmax + 1)
    if exponents.order <= kmax:
        raise ValueError(f"exponent series must be exact through q^{kmax}")
    low = exponents.min_exponent2(0)
    if low is None or low % 2:
        raise ValueError("exponent series must be integral-exponent and nonzero")
    return exponents, low // 2


def borcherds_expand(N, v0, s_order: int = 2, q_order: int = 3,
                     exponents: ExactSeries | None = None, max_norm: int = 40) -> Expansion:
    """prod over (n, l, m) > 0 of (1 - q^n xi^{(l,v0)} s^m)^{c(mn - l^2/2)}.

    c(k) is the q^k coefficient of ``exponents`` (default eta^{-24}, so
    c(k) = p_24(1 + k)).  Positivity: m > 0, or m = 0 and n > 0, or m = n = 0
    and l a negative root.  The result is a series in (q, xi, s) exact below
    q^q_order in every s-slice up to s^s_order; the prefactor q^A xi^{(B,v0)} s^C
    is returned separately.
    """
    s_order, q_order = int(s_order), int(q_order)
    if s_order < 0 or q_order < 1:
        raise ValueError("truncation too small")
    L, pos, rho = _roots_and_rho(N)
    v0 = _v0(L, v0)
    T = q_order + s_order
    kmax = max([m * (T - 1 - m) for m in range(1, s_order + 1)] + [0])
    exps, kmin = _exponent_table(exponents, kmax)
    if kmin < -1:
        raise ValueError("exponent series with poles beyond q^-1 are not supported")

    def c(k: int) -> Fraction:
        return exps[k] if k >= kmin else Fraction(0)

    need = max([2 * (m * (T - 1 - m) - kmin) for m in range(1, s_order + 1)] + [-2 * kmin])
    if need > max_norm:
        raise BudgetError(f"enumeration needs norms up to {need}, budget is {max_norm}")
    hist = vector_histogram(L, need, v0)

    variables = ("q", "xi", "u")
    trunc = (2 * T, None, 2 * (s_order + 1))
    E: dict[tuple[int, int, int], Fraction] = {}
    for m in range(0, s_order + 1):
        n_lo = 1 if m == 0 else -((-kmin) // m)
        for n in range(n_lo, T - m):
            k = m * n
            for (nrm, p), cnt in hist.items():
                if nrm > 2 * (k - kmin):
                    continue
                e = c(k - nrm // 2)
                if e:
                    key = (2 * (n + m), _double(p), 2 * m)
                    E[key] = E.get(key, 0) + cnt * e
    # m = n = 0: negative roots l
    dropped = 0
    for alpha in pos:
        key = (0, -_double(L.inner(alpha, v0)), 0)
        if key == (0, 0, 0):
            dropped += int(c(-1))
            continue
        E[key] = E.get(key, 0) + c(-1)

    result = MultiSeries.one(variables, trunc)
    for mono, e in sorted(E.items()):
        if e:
            result = result * _one_minus_power(mono, 1, e, variables, trunc)
    out_vars = ("q", "xi", "s")
    terms = {}
    for (eq, ex, eu), cf in result.items():
        terms[(eq - eu, ex, eu)] = cf
    series = MultiSeries(out_vars, terms, (2 * q_order, None, 2 * (s_order + 1)))
    if isinstance(N, RootSystem) and N.rank == 24:
        A, B, C = weyl_vector_cusp(N)
    else:
        C = Fraction(2 * len(pos), 24)
        A, B = 1 + C, rho
    return Expansion(series, {"q": A, "xi": L.inner(B, v0), "s": C}, dropped)


def s_slice(exp: Expansion, M: int) -> MultiSeries:
    """Coefficient of s^M of a (q, xi, s) expansion, prefactor omitted."""
    return exp.series.slice2(2, 2 * M)


def fourier_jacobi_check(N, v0, s_order: int = 2, q_order: int = 3,
                         weights: str = "stated") -> dict:
    """Compare the s^M slices of the product with psi * (Hecke exponential term M).

    Returns {M: bool}.  psi is the s^0 slice of a product computed s_order
    orders deeper in q so that every product is exact below q^q_order.
    """
    prod = borcherds_expand(N, v0, s_order, q_order)
    psi = s_slice(borcherds_expand(N, v0, 0, q_order + s_order), 0)
    L = N.lattice if isinstance(N, RootSystem) else N
    phi = theta_quotient_phi(L, v0, phi_order_needed(s_order, q_order))
    terms = fourier_jacobi_via_hecke(phi, s_order, q_order, weights)
    out = {}
    for M in range(s_order + 1):
        lhs = s_slice(prod, M)
        rhs = (psi * terms[M]).truncate2((2 * q_order, None))
        out[M] = lhs.truncate2((2 * q_order, None)).terms == rhs.terms
    return out


def coefficient_window(f: JacobiFormSeries, n_range: Sequence[int], r_range: Sequence[int]) -> list:
    """Rectangular window [[c(n, r) for r] for n] of a coefficient table."""
    return [[f[(n, r)] for r in r_range] for n in n_range]

