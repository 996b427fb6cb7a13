"""High-precision complex model C/O_K of the CM curve.

Points are carried as exact rational lattice coordinates ``(x, y)`` meaning
``z = x + y*w``; complex numbers only appear at evaluation time.  The
Weierstrass function uses the q-expansion in ``u = exp(2 pi i z)``, which
converges geometrically because |q| <= exp(-pi sqrt 3) for every field here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Union

import mpmath

from .quadfield import FieldContext, QuadInt, coprime, divide_rational, omega_complex, residues


class PoleAtLatticePoint(ValueError):
    pass


class EvaluationAtDivisor(ValueError):
    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


MIN_BITS = 128


@dataclass(frozen=True)
class PrecisionContext:
    bits: int = 256

    def __post_init__(self):
        if self.bits < MIN_BITS:
            raise ValueError(f"precision {self.bits} is below the minimum of {MIN_BITS} bits")

    @property
    def tol(self) -> float:
        return 2.0 ** (-self.bits / 2 + 8)

    def make_mp(self) -> mpmath.ctx_mp.MPContext:
        mp = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.MPContext()
        mp.prec = self.bits
        return mp


Coords = tuple[Fraction, Fraction]


def frac_coords(x, y) -> Coords:
    """Reduce exact coordinates into [0, 1) x [0, 1)."""
    x, y = Fraction(x), Fraction(y)
    return x - (x.numerator // x.denominator), y - (y.numerator // y.denominator)


def mul_coords(c: QuadInt, z: Coords) -> Coords:
    """Coordinates of c*z, reduced mod the lattice."""
    x, y = z
    t, n = c.ctx.trace, c.ctx.norm
    return frac_coords(x * c.a - n * y * c.b, x * c.b + y * c.a + t * y * c.b)


def add_coords(z1: Coords, z2: Coords) -> Coords:
    return frac_coords(z1[0] + z2[0], z1[1] + z2[1])


def in_lattice(z: Coords) -> bool:
    return z[0].denominator == 1 and z[1].denominator == 1


@dataclass(frozen=True)
class TorsionPoint:
    modulus: QuadInt
    residue: QuadInt
    coords: Coords
    primitive: bool
    tag: str = ""

    def times(self, c: QuadInt) -> TorsionPoint:
        r = c * self.residue
        return make_torsion_point(self.modulus, r, tag=self.tag)


def make_torsion_point(mu: QuadInt, r: QuadInt, tag: str = "") -> TorsionPoint:
    x, y = divide_rational(r, mu)
    return TorsionPoint(mu, r, frac_coords(x, y), coprime(r, mu), tag)


Point = Union[TorsionPoint, tuple, "mpmath.mpc", complex]


class Lattice:
    """The lattice Z + Z*w with cached q-series data at a fixed precision."""

    def __init__(self, ctx: FieldContext, prec: PrecisionContext | int = 256):
        if isinstance(prec, int):
            prec = PrecisionContext(prec)
        self.ctx = ctx
        self.prec = prec
        self.mp = prec.make_mp()
        mp = self.mp
        self.tau = omega_complex(ctx, mp)
        if self.tau.imag <= 0:  # pragma: no cover - w is always in the upper half plane
            self.tau = -self.tau
        self.q = mp.exp(2j * mp.pi * self.tau)
        self._cutoff = mp.mpf(2) ** (-(prec.bits + 16))
        self._wp_cache: dict = {}
        self._nterms = self._count_terms()
        self._qn = [self.q**k for k in range(self._nterms + 1)]
        self._lam2 = (2j * mp.pi) ** 2

    def _count_terms(self) -> int:
        aq = abs(self.q)
        n = 1
        while aq ** (n - mpmath.mpf(1) / 2) > self._cutoff:
            n += 1
        return n + 1

    @property
    def bits(self) -> int:
        return self.prec.bits

    @property
    def tol(self) -> float:
        return self.prec.tol

    def complex_of(self, z: Coords):
        mp = self.mp
        return mp.mpf(z[0].numerator) / z[0].denominator + (mp.mpf(z[1].numerator) / z[1].denominator) * self.tau

    def coords_of(self, z) -> tuple:
        """Real lattice coordinates of a complex number."""
        mp = self.mp
        z = mp.mpc(z)
        y = z.imag / self.tau.imag
        x = z.real - y * self.tau.real
        return x, y

    @cached_property
    def discriminant(self):
        return discriminant(self)

    def check_cm(self) -> bool:
        """w*1 and w*w are integral combinations of the periods 1 and w."""
        w = self.ctx.omega
        return all(in_lattice(mul_coords(w, z)) for z in ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))))


def make_lattice(ctx: FieldContext, prec: PrecisionContext | int = 256) -> Lattice:
    lat = Lattice(ctx, prec)
    lat.discriminant  # warm cache
    return lat


def _wp_series(lat: Lattice, x, y):
    """(2 pi i)^-2 * wp at real coordinates (x, y), |x|, |y| <= 1/2."""
    mp = lat.mp
    z = x + y * lat.tau
    u = mp.exp(2j * mp.pi * z)
    ui = 1 / u
    s = mp.mpf(1) / 12 + u / (1 - u) ** 2
    for k in range(1, lat._nterms + 1):
        qk = lat._qn[k]
        a = qk * u
        b = qk * ui
        s += a / (1 - a) ** 2 + b / (1 - b) ** 2 - 2 * qk / (1 - qk) ** 2
    return s


def _center(v):
    return v - mpmath.floor(v + mpmath.mpf(1) / 2)


def wp_coords(lat: Lattice, x, y):
    mp = lat.mp
    x = mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x)
    y = mp.mpf(y.numerator) / y.denominator if isinstance(y, Fraction) else mp.mpf(y)
    x, y = _center(x), _center(y)
    if abs(x) + abs(y) < mp.mpf(2) ** (-lat.bits // 4):
        raise PoleAtLatticePoint("wp evaluated at a lattice point")
    return lat._lam2 * _wp_series(lat, x, y)


def _as_coords_or_real(lat: Lattice, z):
    if isinstance(z, TorsionPoint):
        return z.coords
    if isinstance(z, tuple):
        return z
    return lat.coords_of(z)


def wp(lat: Lattice, z):
    """Weierstrass wp(z; Z + Zw).  ``z`` is complex, a coordinate pair or a TorsionPoint."""
    zc = _as_coords_or_real(lat, z)
    if isinstance(zc[0], Fraction):
        key = frac_coords(*zc)
        if in_lattice(key):
            raise PoleAtLatticePoint("wp evaluated at a lattice point")
        if key not in lat._wp_cache:
            lat._wp_cache[key] = wp_coords(lat, *key)
        return lat._wp_cache[key]
    return wp_coords(lat, *zc)


def wp_general(z, w1, w2, prec: int = 256):
    """wp for the lattice Z*w1 + Z*w2 (Im(w2/w1) > 0), by rescaling to Z + Z*tau."""
    mp = PrecisionContext(prec).make_mp()
    w1, w2, z = mp.mpc(w1), mp.mpc(w2), mp.mpc(z)
    tau = w2 / w1
    if tau.imag <= 0:
        raise ValueError("need Im(w2/w1) > 0")
    zz = z / w1
    y = zz.imag / tau.imag
    x = zz.real - y * tau.real
    x, y = _center(x), _center(y)
    q = mp.exp(2j * mp.pi * tau)
    # reduce tau is not attempted; callers pass reasonably reduced bases
    u = mp.exp(2j * mp.pi * (x + y * tau))
    s = mp.mpf(1) / 12 + u / (1 - u) ** 2
    cutoff = mp.mpf(2) ** (-(prec + 16))
    k, qk = 1, q
    while abs(qk) > cutoff * abs(u) and k < 100000:
        a, b = qk * u, qk / u
        s += a / (1 - a) ** 2 + b / (1 - b) ** 2 - 2 * qk / (1 - qk) ** 2
        k += 1
        qk *= q
    return (2j * mp.pi) ** 2 * s / w1**2


def discriminant(lat: Lattice):
    """Delta(Z + Zw) = (2 pi)^12 q prod (1 - q^n)^24."""
    mp = lat.mp
    prod = mp.mpf(1)
    for k in range(1, lat._nterms + 1):
        prod *= (1 - lat._qn[k]) ** 24
    return (2 * mp.pi) ** 12 * lat.q * prod


def discriminant_general(w1, w2, prec: int = 256):
    mp = PrecisionContext(prec).make_mp()
    tau = mp.mpc(w2) / mp.mpc(w1)
    q = mp.exp(2j * mp.pi * tau)
    prod, qk = mp.mpf(1), q
    cutoff = mp.mpf(2) ** (-(prec + 16))
    while abs(qk) > cutoff:
        prod *= (1 - qk) ** 24
        qk *= q
    return (2 * mp.pi) ** 12 * q * prod / mp.mpc(w1) ** 12


def half_period_values(lat: Lattice):
    half = Fraction(1, 2)
    return tuple(wp(lat, z) for z in ((half, Fraction(0)), (Fraction(0), half), (half, half)))


def torsion_points(lat: Lattice | None, mu: QuadInt, primitive_only: bool = False) -> list[TorsionPoint]:
    """The N(mu) points of E[mu] (or only the primitive ones), in residue order."""
    if mu.is_zero() or mu.is_unit():
        raise ValueError("torsion modulus must be a nonzero non-unit")
    pts = [make_torsion_point(mu, r) for r in residues(mu)]
    if primitive_only:
        pts = [t for t in pts if t.primitive]
    return pts


def p_power_basis(sp, n: int) -> tuple[Coords, Coords]:
    """Coordinates of omega_{1,n} = 1/pi^n and omega_{2,n} = 1/pi_bar^n."""
    one = sp.ctx.one
    w1 = frac_coords(*divide_rational(one, sp.pi**n))
    w2 = frac_coords(*divide_rational(one, sp.pi_bar**n))
    return w1, w2


def combo(a: int, w1: Coords, b: int, w2: Coords) -> Coords:
    return frac_coords(a * w1[0] + b * w2[0], a * w1[1] + b * w2[1])


# --- theta_a --------------------------------------------------------------------


@dataclass
class ThetaValue:
    value: object
    log_abs: object
    arg: object
    provenance: tuple = field(default=())

    def log(self):
        return self.log_abs + 1j * self.arg


class _ThetaData:
    def __init__(self, lat: Lattice, alpha: QuadInt):
        mp = lat.mp
        self.alpha = alpha
        self.norm = alpha.norm()
        self.nu = [t.coords for t in torsion_points(lat, alpha) if not in_lattice(t.coords)]
        self.wp_nu = [wp(lat, z) for z in self.nu]
        self.const_log = -12 * mp.log(alpha.to_complex(mp)) + (self.norm - 1) * mp.log(lat.discriminant)


def _theta_data(lat: Lattice, alpha: QuadInt) -> _ThetaData:
    cache = lat.__dict__.setdefault("_theta_cache", {})
    key = (alpha.a, alpha.b)
    if key not in cache:
        cache[key] = _ThetaData(lat, alpha)
    return cache[key]


def theta_log(lat: Lattice, alpha: QuadInt, z) -> object:
    """log theta_a(z) as an unreduced complex logarithm (sum of principal logs)."""
    mp = lat.mp
    if alpha.is_unit() or alpha.is_zero():
        raise ValueError("theta_a needs a nontrivial ideal a")
    zc = _as_coords_or_real(lat, z)
    exact = isinstance(zc[0], Fraction)
    if exact:
        zc = frac_coords(*zc)
        if in_lattice(zc) or in_lattice(mul_coords(alpha, zc)):
            raise EvaluationAtDivisor(f"point {zc} lies in the divisor of theta_{alpha}", zc)
    data = _theta_data(lat, alpha)
    try:
        wz = wp(lat, zc)
    except PoleAtLatticePoint as exc:
        raise EvaluationAtDivisor(str(exc), zc) from None
    eps = mp.mpf(2) ** (-lat.bits // 4)
    acc = data.const_log
    for w in data.wp_nu:
        diff = wz - w
        if abs(diff) <= eps * (1 + abs(w)):
            raise EvaluationAtDivisor(f"point {zc} is within 2^(-B/4) of the divisor of theta_{alpha}", zc)
        acc -= 6 * mp.log(diff)
    return acc


def theta_a(lat: Lattice, alpha: QuadInt, z) -> ThetaValue:
    mp = lat.mp
    lg = theta_log(lat, alpha, z)
    tag = z.coords if isinstance(z, TorsionPoint) else z
    return ThetaValue(mp.exp(lg), lg.real, lg.imag, (str(alpha), tag))
