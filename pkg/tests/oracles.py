"""Slow, obviously-correct reference computations used only by the tests."""

from fractions import Fraction
from itertools import product
from math import comb


def poly_mul(a, b, n):
    """Product of coefficient lists, truncated to length n."""
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def one_minus_qk_power(k, e, n):
    """(1 - q^k)^e as a list of length n; negative e via the binomial series."""
    out = [0] * n
    j = 0
    while k * j < n:
        if e >= 0:
            c = comb(e, j) * (-1) ** j
        else:
            c = comb(-e + j - 1, j)
        out[k * j] = c
        j += 1
    return out


def euler_product(e, n):
    """prod_{k>=1} (1 - q^k)^e, first n coefficients, by repeated multiplication."""
    out = [1] + [0] * (n - 1)
    for k in range(1, n):
        out = poly_mul(out, one_minus_qk_power(k, e, n), n)
    return out


def colored_partitions_enum(colors, n):
    """Count multisets of (part, colour) with parts summing to n, by direct recursion."""
    items = [(p, c) for p in range(1, n + 1) for c in range(colors)]

    def rec(i, left):
        if left == 0:
            return 1
        if i == len(items):
            return 0
        p = items[i][0]
        total = 0
        k = 0
        while k * p <= left:
            total += rec(i + 1, left - k * p)
            k += 1
        return total

    return rec(0, n)


def sigma(n, k):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def box_vectors(gram, bound, max_norm):
    """All integer vectors with entries in [-bound, bound] and norm <= max_norm (norm > 0)."""
    d = len(gram)
    out = []
    for v in product(range(-bound, bound + 1), repeat=d):
        nrm = sum(v[i] * gram[i][j] * v[j] for i in range(d) for j in range(d))
        if 0 < nrm <= max_norm:
            out.append(v)
    return out


def frac_list(xs):
    return [Fraction(x) for x in xs]
