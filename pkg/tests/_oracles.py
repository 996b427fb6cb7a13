"""Slow, independent reference computations shared by the test modules.

Nothing here calls the package's own root finding, splitting or power
residue code; only plain integer arithmetic.
"""
import random

import mpmath
from sympy import isprime

from ellsoule.characters import make_unit, needed_bits, unit_from_minpoly
from ellsoule.quadfield import make_field


def sqrt_minus_one(q):
    return [s for s in range(q) if (s * s + 1) % q == 0]


def brute_simple_roots(coeffs, q):
    """Simple roots in F_q of a polynomial given high-to-low, by exhaustive evaluation."""
    n = len(coeffs) - 1
    deriv = [c * (n - i) for i, c in enumerate(coeffs[:-1])]

    def ev(cs, x):
        acc = 0
        for c in cs:
            acc = (acc * x + c) % q
        return acc

    return [x for x in range(q) if ev(coeffs, x) == 0 and ev(deriv, x) != 0]


def gaussian_certificates(minpoly, p, q_max=2000):
    """{q: {(root, residue), ...}} over both primes above each split q = 1 mod p.

    Only roots with a non-trivial p-th power residue are kept.
    """
    out = {}
    for q in range(p + 1, q_max, p):
        if q % 4 != 1 or not isprime(q):
            continue
        found = set()
        for s in sqrt_minus_one(q):
            red = [(c.a + c.b * s) % q for c in minpoly]
            if red[-1] == 0:
                continue
            for x in brute_simple_roots(red, q):
                r = pow(x, (q - 1) // p, q)
                if r != 1:
                    found.add((x, r))
        if found:
            out[q] = found
    return out


def synthetic_units(count, seed=0, bits=256):
    """Degree-2 units over Z[i]: roots of X^2 - t X + u, u a root of unity, t large."""
    k = make_field(1)
    rng = random.Random(seed)
    units = []
    while len(units) < count:
        t = k(rng.randint(-40, 40), rng.randint(-40, 40))
        if t.norm() < 25:
            continue
        u = rng.choice(k.units)
        x = unit_from_minpoly(k, [k.one, -t, u], bits, label=f"X^2-({t})X+({u})")
        mp = x.mp
        # roots in O_K would make the polynomial reducible
        if any(abs(r - mp.nint(r.real) - 1j * mp.nint(r.imag)) < 0.01 for r in x.conjugates):
            continue
        units.append(x)
    return units


def power_of(unit, e, base=256):
    logs = [e * lg for lg in unit.logs]
    return make_unit(unit.ctx, logs, needed_bits(logs, base), f"({unit.label})^{e}")


def mp_at(bits):
    mp = mpmath.mp.clone()
    mp.prec = bits
    return mp
