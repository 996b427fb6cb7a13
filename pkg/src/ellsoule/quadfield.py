"""Exact arithmetic in the nine imaginary quadratic fields of class number one.

Elements of O_K are stored as ``a + b*w`` where ``w`` is the standard ring
generator: ``sqrt(-d)`` for d = 1, 2 and ``(1 + sqrt(-d))/2`` otherwise.
``w`` satisfies ``w**2 = t*w - n`` with ``t = trace(w)`` and ``n = norm(w)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from sympy import isprime

CLASS_NUMBER_ONE = (1, 2, 3, 7, 11, 19, 43, 67, 163)


class UnsupportedField(ValueError):
    pass


class InertPrime(ValueError):
    pass


class RamifiedPrime(ValueError):
    pass


class NotDivisible(ArithmeticError):
    pass


@dataclass(frozen=True)
class FieldContext:
    d: int
    omega_kind: str  # "sqrt" or "half"
    discriminant: int
    w_K: int
    trace: int = field(repr=False)
    norm: int = field(repr=False)

    @property
    def units(self) -> tuple[QuadInt, ...]:
        return _units(self)

    def __call__(self, a: int, b: int = 0) -> QuadInt:
        return QuadInt(a, b, self)

    @property
    def one(self) -> QuadInt:
        return QuadInt(1, 0, self)

    @property
    def omega(self) -> QuadInt:
        return QuadInt(0, 1, self)

    def parse(self, text: str) -> QuadInt:
        """Parse literals like ``3+2w``, ``-1-w``, ``5``, ``2*w``."""
        s = text.replace(" ", "").replace("*", "").replace("i", "w")
        if not s:
            raise ValueError("empty QuadInt literal")
        a = b = 0
        pos = 0
        terms = []
        for k in range(1, len(s) + 1):
            if k == len(s) or s[k] in "+-":
                terms.append(s[pos:k])
                pos = k
        for term in terms:
            if term.endswith("w"):
                coef = term[:-1]
                if coef in ("", "+"):
                    b += 1
                elif coef == "-":
                    b -= 1
                else:
                    b += int(coef)
            else:
                a += int(term)
        return QuadInt(a, b, self)


@lru_cache(maxsize=None)
def make_field(d: int) -> FieldContext:
    if d not in CLASS_NUMBER_ONE:
        raise UnsupportedField(f"d={d} is not one of {CLASS_NUMBER_ONE}")
    if d in (1, 2):
        kind, disc, t, n = "sqrt", -4 * d, 0, d
    else:
        kind, disc, t, n = "half", -d, 1, (1 + d) // 4
    w_K = {1: 4, 3: 6}.get(d, 2)
    return FieldContext(d, kind, disc, w_K, t, n)


@lru_cache(maxsize=None)
def _units(ctx: FieldContext) -> tuple[QuadInt, ...]:
    if ctx.d == 1:
        gen = QuadInt(0, 1, ctx)
    elif ctx.d == 3:
        gen = QuadInt(0, 1, ctx)  # (1+sqrt(-3))/2, a primitive sixth root of unity
    else:
        gen = QuadInt(-1, 0, ctx)
    out = [QuadInt(1, 0, ctx)]
    while len(out) < ctx.w_K:
        out.append(out[-1] * gen)
    return tuple(out)


@dataclass(frozen=True)
class QuadInt:
    a: int
    b: int
    ctx: FieldContext = field(repr=False, compare=True)

    def _coerce(self, other) -> QuadInt:
        if isinstance(other, QuadInt):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return QuadInt(other, 0, self.ctx)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.a + o.a, self.b + o.b, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.ctx)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.a - o.a, self.b - o.b, self.ctx)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t, n = self.ctx.trace, self.ctx.norm
        bb = self.b * o.b
        return QuadInt(self.a * o.a - n * bb, self.a * o.b + self.b * o.a + t * bb, self.ctx)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> QuadInt:
        if e < 0:
            raise ValueError("negative powers are not integral in general")
        result = QuadInt(1, 0, self.ctx)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self) -> QuadInt:
        return QuadInt(self.a + self.ctx.trace * self.b, -self.b, self.ctx)

    def norm(self) -> int:
        return self.a * self.a + self.ctx.trace * self.a * self.b + self.ctx.norm * self.b * self.b

    def trace(self) -> int:
        return 2 * self.a + self.ctx.trace * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def mod(self, m: int) -> QuadInt:
        return QuadInt(self.a % m, self.b % m, self.ctx)

    def to_complex(self, mp=None):
        """Complex value at the precision of mpmath context ``mp``."""
        if mp is None:
            import mpmath as mp
        return mp.mpf(self.a) + mp.mpf(self.b) * omega_complex(self.ctx, mp)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "d": self.ctx.d}

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        bw = {1: "w", -1: "-w"}.get(self.b, f"{self.b}*w")
        if self.a == 0:
            return bw
        return f"{self.a}{'+' if self.b > 0 else ''}{bw}"


def omega_complex(ctx: FieldContext, mp):
    if ctx.omega_kind == "sqrt":
        return mp.mpc(0, mp.sqrt(ctx.d))
    return mp.mpc(mp.mpf(1) / 2, mp.sqrt(ctx.d) / 2)


def divide_rational(x: QuadInt, y: QuadInt) -> tuple[Fraction, Fraction]:
    """Coordinates of x/y in the basis (1, w), as exact fractions."""
    if y.is_zero():
        raise ZeroDivisionError("division by zero in O_K")
    num = x * y.conj()
    n = y.norm()
    return Fraction(num.a, n), Fraction(num.b, n)


def exact_divide(x: QuadInt, y: QuadInt) -> QuadInt:
    """Return q with x = q*y, raising NotDivisible when y does not divide x."""
    qa, qb = divide_rational(x, y)
    if qa.denominator != 1 or qb.denominator != 1:
        raise NotDivisible(f"{y} does not divide {x}")
    return QuadInt(int(qa), int(qb), x.ctx)


def divides(y: QuadInt, x: QuadInt) -> bool:
    try:
        exact_divide(x, y)
    except NotDivisible:
        return False
    return True


def ideal_index(*gens: QuadInt) -> int:
    """Index in O_K of the ideal generated by ``gens``.

    The ideal is the Z-span of g and g*w over the generators; its index in
    Z^2 is the gcd of all 2x2 minors.
    """
    vecs = []
    for g in gens:
        gw = g * g.ctx.omega
        vecs.append((g.a, g.b))
        vecs.append((gw.a, gw.b))
    g = 0
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            g = gcd(g, vecs[i][0] * vecs[j][1] - vecs[i][1] * vecs[j][0])
    return g


def coprime(x: QuadInt, y: QuadInt | int) -> bool:
    if isinstance(y, int):
        y = QuadInt(y, 0, x.ctx)
    return ideal_index(x, y) == 1


def associates(x: QuadInt) -> list[QuadInt]:
    return [u * x for u in x.ctx.units]


# --- modular square roots and the norm equation --------------------------------


def tonelli_shanks(n: int, p: int) -> int:
    """Square root of n modulo an odd prime p.

    The non-residue is the smallest z >= 2, so results are reproducible.
    """
    n %= p
    if n == 0:
        return 0
    if pow(n, (p - 1) // 2, p) != 1:
        raise ValueError(f"{n} is not a square mod {p}")
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def cornacchia(d: int, m: int) -> tuple[int, int] | None:
    """Primitive solution of x^2 + d*y^2 = m for prime m, or None."""
    if pow(-d % m, (m - 1) // 2, m) != 1:
        return None
    r0 = tonelli_shanks(-d, m)
    if 2 * r0 < m:
        r0 = m - r0
    a, b = m, r0
    limit = isqrt(m)
    while b > limit:
        a, b = b, a % b
    rest = m - b * b
    if rest % d:
        return None
    y2 = rest // d
    y = isqrt(y2)
    if y * y != y2:
        return None
    return b, y


def cornacchia_4p(d: int, p: int) -> tuple[int, int] | None:
    """Solution of x^2 + d*y^2 = 4p for odd prime p and d = 3 mod 4."""
    D = -d
    x0 = tonelli_shanks(D, p)
    if (x0 - D) % 2:
        x0 = p - x0
    a, b = 2 * p, x0
    limit = isqrt(4 * p)
    while b > limit:
        a, b = b, a % b
    rest = 4 * p - b * b
    if rest % d:
        return None
    y2 = rest // d
    y = isqrt(y2)
    if y * y != y2:
        return None
    return b, y


def _small_norm_solution(ctx: FieldContext, m: int) -> QuadInt | None:
    # 4m = (2a + t b)^2 + |disc|/...; bound |b| by the positive definite form
    bmax = isqrt(4 * m // max(1, 4 * ctx.norm - ctx.trace**2)) + 2
    for b in range(0, bmax + 1):
        for a in range(-isqrt(4 * m) - 2 - b, isqrt(4 * m) + 3):
            x = QuadInt(a, b, ctx)
            if x.norm() == m:
                return x
    return None


def _solve_norm_prime(ctx: FieldContext, p: int) -> QuadInt | None:
    if p < 200:
        return _small_norm_solution(ctx, p)
    if ctx.trace == 0:
        sol = cornacchia(ctx.d, p)
        return None if sol is None else QuadInt(sol[0], sol[1], ctx)
    sol = cornacchia_4p(ctx.d, p)
    if sol is None:
        return None
    x, y = sol
    # x^2 + d y^2 = 4p = 4 N(a + b w) = (2a + b)^2 + d b^2
    return QuadInt((x - y) // 2, y, ctx)


def splitting_type(ctx: FieldContext, p: int) -> str:
    """'split', 'inert' or 'ramified' for a rational prime p."""
    if ctx.discriminant % p == 0:
        return "ramified"
    if p == 2:
        return "split" if ctx.discriminant % 8 == 1 else "inert"
    return "split" if pow(ctx.discriminant % p, (p - 1) // 2, p) == 1 else "inert"


def canonical_associate(x: QuadInt) -> QuadInt:
    """Deterministic representative of {u*x, u*conj(x) : u unit}.

    Among candidates with b > 0 take the largest a, then the smallest b.
    """
    cands = [c for c in associates(x) + associates(x.conj()) if c.b > 0]
    if not cands:
        cands = associates(x) + associates(x.conj())
    return max(cands, key=lambda c: (c.a, -c.b))


@dataclass(frozen=True)
class SplitPrime:
    p: int
    pi: QuadInt
    pi_bar: QuadInt

    @property
    def ctx(self) -> FieldContext:
        return self.pi.ctx

    def swapped(self) -> SplitPrime:
        return SplitPrime(self.p, self.pi_bar, self.pi)


@lru_cache(maxsize=4096)
def prime_element(ctx: FieldContext, p: int) -> QuadInt:
    """A generator of some prime ideal above the rational prime p."""
    kind = splitting_type(ctx, p)
    if kind == "inert":
        return QuadInt(p, 0, ctx)
    x = _solve_norm_prime(ctx, p)
    if x is None:
        x = _small_norm_solution(ctx, p)
    if x is None:  # pragma: no cover - class number one guarantees a solution
        raise ArithmeticError(f"no element of norm {p} in Q(sqrt(-{ctx.d}))")
    return x


def split_prime(ctx: FieldContext, p: int, swap: bool = False) -> SplitPrime:
    if p < 5 or not isprime(p):
        raise ValueError(f"p={p} must be a prime >= 5")
    kind = splitting_type(ctx, p)
    if kind == "ramified":
        raise RamifiedPrime(f"{p} ramifies in Q(sqrt(-{ctx.d}))")
    if kind == "inert":
        raise InertPrime(f"{p} is inert in Q(sqrt(-{ctx.d}))")
    pi = canonical_associate(prime_element(ctx, p))
    sp = SplitPrime(p, pi, pi.conj())
    return sp.swapped() if swap else sp


def prime_ideal_divisors(x: QuadInt) -> list[QuadInt]:
    """Generators of the distinct prime ideals dividing x (x not a unit)."""
    from sympy import factorint

    out = []
    for ell in sorted(factorint(x.norm())):
        lam = prime_element(x.ctx, ell)
        for cand in (lam, lam.conj()):
            if divides(cand, x) and not any(
                divides(c, cand) and divides(cand, c) for c in out
            ):
                out.append(cand)
    return out


# --- residue classes --------------------------------------------------------------


def _hnf(vecs: list[tuple[int, int]]) -> tuple[int, int, int]:
    """Row-style HNF basis {(e, f), (0, g)} of the full-rank lattice spanned by vecs."""
    pivot = (0, 0)
    g = 0
    for r in vecs:
        a, b = pivot, r
        while b[0] != 0:
            q = a[0] // b[0]
            a, b = b, (a[0] - q * b[0], a[1] - q * b[1])
        pivot = a
        g = gcd(g, b[1])
    if pivot[0] < 0:
        pivot = (-pivot[0], -pivot[1])
    return pivot[0], pivot[1] % g, g


@lru_cache(maxsize=4096)
def residue_basis(mu: QuadInt) -> tuple[int, int, int]:
    mw = mu * mu.ctx.omega
    return _hnf([(mu.a, mu.b), (mw.a, mw.b)])


def reduce_mod(x: QuadInt, mu: QuadInt) -> QuadInt:
    """Canonical representative of x modulo the ideal (mu)."""
    e, f, g = residue_basis(mu)
    k = x.a // e
    a, b = x.a - k * e, x.b - k * f
    return QuadInt(a, b % g, x.ctx)


def residues(mu: QuadInt) -> list[QuadInt]:
    """All N(mu) canonical residues modulo (mu), in a fixed order."""
    e, f, g = residue_basis(mu)
    return [QuadInt(a, b, mu.ctx) for a in range(e) for b in range(g)]


def crt_lift(sp: SplitPrime, x1: int, x2: int, r1: int, r2: int, modulus: int) -> QuadInt:
    """Element c with c = x1 under i_1 and c = x2 under i_2 (mod modulus)."""
    b = (x1 - x2) * pow(r1 - r2, -1, modulus) % modulus
    a = (x1 - b * r1) % modulus
    return QuadInt(a, b, sp.ctx)


def residue_transversal(ctx: FieldContext, sp: SplitPrime) -> list[QuadInt]:
    """Representatives of (O_K/p)^x modulo the image of the unit group.

    Each class is represented by the lexicographically smallest pair
    (i_1(c), i_2(c)) in its orbit; the list is ordered by that pair.
    """
    from .padic import hensel_embed

    emb = hensel_embed(sp, 1)
    p = sp.p
    unit_pairs = [(emb.i1(u), emb.i2(u)) for u in ctx.units]
    out = []
    for x1 in range(1, p):
        for x2 in range(1, p):
            orbit = [(x1 * u1 % p, x2 * u2 % p) for u1, u2 in unit_pairs]
            if min(orbit) == (x1, x2):
                out.append(crt_lift(sp, x1, x2, emb.r1, emb.r2, p))
    return out


def prime_transversal(ctx: FieldContext, sp: SplitPrime, side: int = 1) -> list[int]:
    """Integers representing (O_K/P)^x / units for P = pi (side 1) or pi_bar (side 2)."""
    from .padic import hensel_embed

    emb = hensel_embed(sp, 1)
    p = sp.p
    images = {(emb.i1(u) if side == 1 else emb.i2(u)) for u in ctx.units}
    return [x for x in range(1, p) if min(x * u % p for u in images) == x]
