"""The two p-adic embeddings i_1, i_2 of O_K, truncated at level p^n.

``i_1`` has kernel (pi) and ``i_2`` has kernel (pi_bar).  Everything here is
plain modular integer arithmetic; no p-adic number type is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from sympy import factorint

from .quadfield import QuadInt, SplitPrime


class NonInvertible(ArithmeticError):
    pass


class FactorizationFailure(ArithmeticError):
    pass


@dataclass(frozen=True)
class PadicEmbed:
    sp: SplitPrime
    n: int
    r1: int
    r2: int

    @property
    def modulus(self) -> int:
        return self.sp.p**self.n

    def i1(self, x: QuadInt) -> int:
        return (x.a + x.b * self.r1) % self.modulus

    def i2(self, x: QuadInt) -> int:
        return (x.a + x.b * self.r2) % self.modulus

    def i_power(self, m: tuple[int, int], x: QuadInt) -> int:
        return i_power(self, m, x)


def _lift_root(a: int, b: int, t: int, n_: int, p: int, n: int) -> int:
    # root of X^2 - tX + n_ with a + b*X = 0 mod p, lifted to mod p^n
    r = -a * pow(b, -1, p) % p
    mod = p
    for _ in range(1, n):
        mod *= p
        f = r * r - t * r + n_
        r = (r - f * pow(2 * r - t, -1, mod)) % mod
    return r % (p**n)


@lru_cache(maxsize=1024)
def hensel_embed(sp: SplitPrime, n: int) -> PadicEmbed:
    if n < 1:
        raise ValueError("level n must be >= 1")
    ctx = sp.ctx
    p = sp.p
    r1 = _lift_root(sp.pi.a, sp.pi.b, ctx.trace, ctx.norm, p, n)
    r2 = _lift_root(sp.pi_bar.a, sp.pi_bar.b, ctx.trace, ctx.norm, p, n)
    return PadicEmbed(sp, n, r1, r2)


def i_power(embed: PadicEmbed, m: tuple[int, int], x: QuadInt) -> int:
    """i_1(x)^m1 * i_2(x)^m2 modulo p^n."""
    mod = embed.modulus
    out = 1
    for e, v in zip(m, (embed.i1(x), embed.i2(x))):
        if e < 0:
            if v % embed.sp.p == 0:
                raise NonInvertible(f"{x} is not invertible at the relevant prime")
            v = pow(v, -1, mod)
            e = -e
        out = out * pow(v, e, mod) % mod
    return out


def purely_local_test(sp: SplitPrime, side: str = "pibar") -> bool:
    """True when pi^(p-1) - 1 is not divisible by pi_bar^2 (side "pibar").

    For side "pi" the roles of pi and pi_bar are exchanged.
    """
    emb = hensel_embed(sp, 2)
    p2 = sp.p * sp.p
    if side == "pibar":
        v = emb.i2(sp.pi)
    elif side == "pi":
        v = emb.i1(sp.pi_bar)
    else:
        raise ValueError(f"side must be 'pi' or 'pibar', not {side!r}")
    return pow(v, sp.p - 1, p2) != 1


def prime_factors(n: int, limit: int = 10**12) -> list[int]:
    if n > limit:
        raise FactorizationFailure(f"refusing to factor {n} above {limit}")
    return sorted(factorint(n))


def frobenius_generates_test(sp: SplitPrime) -> bool:
    """Does i_2(pi) generate F_p^x modulo the image of the unit group?"""
    p, w = sp.p, sp.ctx.w_K
    g = hensel_embed(sp, 1).i2(sp.pi)
    k = (p - 1) // w
    return all(pow(g, (p - 1) // q, p) != 1 for q in prime_factors(k))
