"""One-time oracle: is the level-one element a p-th power in the field it generates?

By Capelli's theorem X^p - e is irreducible over F = K(e) unless e is a p-th
power in F.  With f the minimal polynomial of e over K and g = f(X^p) * conj(f)(X^p)
in Z[X], e is a p-th power iff g has an irreducible factor over Q of degree
at most 2 deg(f).  The factorisation is done by FLINT, independently of the
power-residue test in the package.

Run:  python tools/oracle_pth_power.py > tests/fixtures/oracle_pth_power.json
Needs python-flint (pip install python-flint).
"""
import json
import sys

import flint

from ellsoule.characters import epsilon_m1a
from ellsoule.quadfield import make_field, split_prime

CASES = [
    # (d, p, m, a, strict)
    (1, 5, (3, 3), "3+2w", True),
    (1, 5, (3, 1), "3+2w", False),
    (1, 5, (5, 1), "3+2w", True),
]


def integer_norm_poly(minpoly, p, ctx):
    """Coefficients (low to high) of f(X^p) * conj(f)(X^p) over Z."""
    # represent K = Q[t]/(t^2 - trace t + norm); multiply as bivariate over Z
    deg = len(minpoly) - 1
    f = [(c.a, c.b) for c in reversed(minpoly)]  # low to high in X
    fb = [(c.conj().a, c.conj().b) for c in reversed(minpoly)]
    prod = [(0, 0)] * (2 * deg + 1)
    t, n = ctx.trace, ctx.norm
    for i, (a1, b1) in enumerate(f):
        for j, (a2, b2) in enumerate(fb):
            # (a1 + b1 w)(a2 + b2 w) with w^2 = t w - n
            a = a1 * a2 - n * b1 * b2
            b = a1 * b2 + a2 * b1 + t * b1 * b2
            pa, pb = prod[i + j]
            prod[i + j] = (pa + a, pb + b)
    assert all(b == 0 for _, b in prod), "norm polynomial must be rational"
    coeffs = [0] * (p * 2 * deg + 1)
    for k, (a, _) in enumerate(prod):
        coeffs[p * k] = a
    return coeffs, deg


def main():
    out = []
    for d, p, m, a, strict in CASES:
        ctx = make_field(d)
        sp = split_prime(ctx, p)
        alpha = ctx.parse(a)
        eps = epsilon_m1a(sp, m, alpha, check_doubling=False, strict=strict)
        coeffs, deg = integer_norm_poly(eps.unit.minpoly, p, ctx)
        g = flint.fmpz_poly(coeffs)
        _, factors = g.factor()
        degrees = sorted(f.degree() for f, _ in factors)
        is_power = any(fd <= 2 * deg for fd in degrees)
        out.append({
            "d": d, "p": p, "m": list(m), "a": a,
            "minpoly": [[c.a, c.b] for c in eps.unit.minpoly],
            "factor_degrees": degrees,
            "oracle": "Power" if is_power else "NonPower",
            "method": "Capelli criterion, FLINT factorisation of N_{K/Q} f(X^p) over Z",
            "flint_version": flint.__version__,
        })
    json.dump(out, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
