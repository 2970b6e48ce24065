"""Regenerate the stored Leech generator matrix.

Builds the extended binary Golay code from the cyclic generator polynomial
x^11+x^10+x^6+x^5+x^4+x^2+1, takes the standard generating set of the Leech
lattice scaled by sqrt(8), extracts a Z-basis (Hermite form) and LLL-reduces
it so that short-vector enumeration is cheap.  Output: src/latvoa/data/leech.json
"""

import json
from fractions import Fraction
from pathlib import Path

from latvoa.linalg import determinant, hermite_rows


def golay_basis():
    g = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1]  # coefficients of x^0..x^11
    rows = []
    for s in range(12):
        w = [0] * 23
        for i, c in enumerate(g):
            w[(i + s) % 23] ^= c
        rows.append(w + [sum(w) % 2])
    return rows


def generators():
    gens = [[2 * x for x in c] for c in golay_basis()]
    for i in range(1, 24):
        v = [0] * 24
        v[0], v[i] = 4, -4
        gens.append(v)
    v = [0] * 24
    v[0] = 8
    gens.append(v)
    gens.append([-3] + [1] * 23)
    return gens


def lll(basis, delta=Fraction(3, 4)):
    b = [list(map(Fraction, r)) for r in basis]
    n = len(b)

    def dot(x, y):
        return sum(a * c for a, c in zip(x, y))

    def gso():
        bs, mu = [], [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = b[i][:]
            for j in range(i):
                mu[i][j] = dot(b[i], bs[j]) / dot(bs[j], bs[j])
                v = [a - mu[i][j] * c for a, c in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    bs, mu = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [a - q * c for a, c in zip(b[k], b[j])]
                bs, mu = gso()
        if dot(bs[k], bs[k]) >= (delta - mu[k][k - 1] ** 2) * dot(bs[k - 1], bs[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bs, mu = gso()
            k = max(k - 1, 1)
    return [[int(x) for x in r] for r in b]


def main():
    basis = hermite_rows(generators())
    assert len(basis) == 24
    basis = lll(basis)
    gram = [[sum(a * c for a, c in zip(x, y)) // 8 for y in basis] for x in basis]
    assert all(sum(a * c for a, c in zip(x, y)) % 8 == 0 for x in basis for y in basis)
    assert determinant(gram) == 1
    assert all(gram[i][i] % 2 == 0 for i in range(24))
    out = Path(__file__).resolve().parents[1] / "src" / "latvoa" / "data" / "leech.json"
    out.write_text(json.dumps({"label": "leech", "generator_scale": 8,
                               "generator": basis, "gram": gram}, indent=None))
    print("diag", [gram[i][i] for i in range(24)])


if __name__ == "__main__":
    main()
