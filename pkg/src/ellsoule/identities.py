"""Numerical verification of exact theta-function identities.

Every check evaluates both sides independently as complex logarithms and
reports the relative residual ``|exp(L - R) - 1|``.  A check passes when the
residual is below the lattice tolerance ``2^(-B/2+8)``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .analytic import (
    Lattice,
    add_coords,
    combo,
    frac_coords,
    in_lattice,
    make_torsion_point,
    mul_coords,
    p_power_basis,
    theta_log,
    torsion_points,
)
from .padic import NonInvertible, hensel_embed, i_power
from .quadfield import (
    FieldContext,
    QuadInt,
    SplitPrime,
    coprime,
    prime_ideal_divisors,
    reduce_mod,
    residues,
)


class BadCosets(ArithmeticError):
    pass


class NonInvertibleDenominator(ArithmeticError):
    pass


@dataclass
class IdentityReport:
    name: str
    params: dict
    lhs: object
    rhs: object
    residual: object
    tol: float
    bits: int
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.residual < self.tol)

    def as_dict(self) -> dict:
        return {
            "identity": self.name,
            "params": self.params,
            "bits": self.bits,
            "lhs_log": _cstr(self.lhs),
            "rhs_log": _cstr(self.rhs),
            "residual": mpmath.nstr(self.residual, 6),
            "log2_residual": float(mpmath.log(self.residual, 2)) if self.residual > 0 else None,
            "tol": self.tol,
            "pass": self.passed,
        }

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name:<14} residual={mpmath.nstr(self.residual, 3):>10}  {self.params}"


def _cstr(z) -> str:
    return mpmath.nstr(z, 30)


def reports_to_json(reports: list[IdentityReport]) -> str:
    return json.dumps([r.as_dict() for r in reports], indent=2)


def _report(lat: Lattice, name: str, params: dict, lhs, rhs) -> IdentityReport:
    res = abs(lat.mp.expm1(lhs - rhs))
    return IdentityReport(name, params, lhs, rhs, res, lat.tol, lat.bits)


def _nontrivial(x: QuadInt, what: str):
    if x.is_zero() or x.is_unit():
        raise ValueError(f"{what}={x} must generate a nontrivial ideal")


def _coprime_norms(a: QuadInt, b: QuadInt):
    if not coprime(a, b):
        raise ValueError(f"ideals ({a}) and ({b}) must be coprime")


def random_point(rng: random.Random, denom_bits: int = 40) -> tuple[Fraction, Fraction]:
    """A 'generic' point with large odd denominators, far from low-level torsion."""
    d1 = rng.getrandbits(denom_bits) | (1 << (denom_bits - 1)) | 1
    d2 = rng.getrandbits(denom_bits) | (1 << (denom_bits - 1)) | 1
    return frac_coords(Fraction(rng.randrange(d1), d1), Fraction(rng.randrange(d2), d2))


def _pt(z):
    return z.coords if hasattr(z, "coords") else frac_coords(*z)


def _tag(z) -> list[str]:
    z = _pt(z)
    return [str(z[0]), str(z[1])]


# --- section 2 identities ---------------------------------------------------------


def check_distribution(lat: Lattice, alpha: QuadInt, beta: QuadInt, tau) -> IdentityReport:
    """prod over nu in E[b] of theta_a(tau + nu) against theta_a(beta * tau)."""
    _nontrivial(alpha, "a")
    _nontrivial(beta, "b")
    _coprime_norms(alpha, beta)
    tau = _pt(tau)
    lhs = 0
    for nu in torsion_points(lat, beta):
        lhs += theta_log(lat, alpha, add_coords(tau, nu.coords))
    rhs = theta_log(lat, alpha, mul_coords(beta, tau))
    params = {"d": lat.ctx.d, "a": str(alpha), "b": str(beta), "tau": _tag(tau)}
    return _report(lat, "distribution", params, lhs, rhs)


def check_galois_action(lat: Lattice, alpha: QuadInt, c: QuadInt, tau) -> IdentityReport:
    """theta_a(c tau) against theta_ac(tau) * theta_c(tau)^(-Na).

    For a unit c the right side is replaced by theta_a(tau) (theta_c is undefined).
    """
    _nontrivial(alpha, "a")
    if c.is_zero():
        raise ValueError("c must be nonzero")
    if hasattr(tau, "modulus"):
        if not tau.primitive:
            raise ValueError("tau must be a primitive torsion point")
        if not coprime(c, tau.modulus) or not coprime(alpha, tau.modulus):
            raise ValueError("a and c must be prime to the level of tau")
    z = _pt(tau)
    lhs = theta_log(lat, alpha, mul_coords(c, z))
    if c.is_unit():
        rhs = theta_log(lat, alpha, z)
    else:
        rhs = theta_log(lat, alpha * c, z) - alpha.norm() * theta_log(lat, c, z)
    params = {"d": lat.ctx.d, "a": str(alpha), "c": str(c), "tau": _tag(z)}
    if hasattr(tau, "modulus"):
        params["m"] = str(tau.modulus)
    return _report(lat, "galois", params, lhs, rhs)


def check_galois_composition(lat: Lattice, alpha: QuadInt, c1: QuadInt, c2: QuadInt, tau) -> IdentityReport:
    """Acting by c1 then c2 (each through the right side formula) equals acting by c1*c2."""
    z = _pt(tau)
    na = alpha.norm()

    def act(c, point):
        return theta_log(lat, alpha * c, point) - na * theta_log(lat, c, point)

    # sigma_c2 applied to the right side of sigma_c1: evaluate the same formula at c2*tau
    z2 = mul_coords(c2, z)
    lhs = act(c1, z2)
    rhs = act(c1 * c2, z)
    params = {"d": lat.ctx.d, "a": str(alpha), "c1": str(c1), "c2": str(c2), "tau": _tag(z)}
    return _report(lat, "galois-compose", params, lhs, rhs)


def check_cross_relation(lat: Lattice, a: QuadInt, b: QuadInt, z) -> IdentityReport:
    """theta_b(z)^Na / theta_b(a z) against theta_a(z)^Nb / theta_a(b z)."""
    _nontrivial(a, "a")
    _nontrivial(b, "b")
    _coprime_norms(a, b)
    z = _pt(z)
    lhs = a.norm() * theta_log(lat, b, z) - theta_log(lat, b, mul_coords(a, z))
    rhs = b.norm() * theta_log(lat, a, z) - theta_log(lat, a, mul_coords(b, z))
    params = {"d": lat.ctx.d, "a": str(a), "b": str(b), "z": _tag(z)}
    return _report(lat, "cross", params, lhs, rhs)


# --- Galois bookkeeping for ray class fields ------------------------------------


def congruent_units(ctx: FieldContext, f: QuadInt) -> int:
    """Number of roots of unity of K congruent to 1 modulo (f)."""
    one = reduce_mod(ctx.one, f)
    return sum(1 for u in ctx.units if reduce_mod(u, f) == one)


def _unit_orbit_min(x: QuadInt, g: QuadInt) -> tuple[int, int]:
    return min((r.a, r.b) for r in (reduce_mod(u * x, g) for u in x.ctx.units))


def relative_cosets(f: QuadInt, g: QuadInt) -> list[QuadInt]:
    """Representatives c of Gal(K(g)/K(f)) inside (O_K/g)^x / units, for f | g.

    These are the classes c with c = (unit) mod f; one per unit orbit mod g.
    """
    ctx = f.ctx
    unit_res_f = {reduce_mod(u, f) for u in ctx.units}
    seen: dict[tuple[int, int], QuadInt] = {}
    for r in residues(g):
        if not coprime(r, g) or reduce_mod(r, f) not in unit_res_f:
            continue
        key = _unit_orbit_min(r, g)
        seen.setdefault(key, r)
    reps = [seen[k] for k in sorted(seen)]
    # consistency: |reps| must equal [K(g):K(f)] computed from group orders
    phi = lambda m: sum(1 for r in residues(m) if coprime(r, m))  # noqa: E731
    w = ctx.w_K
    deg_g = phi(g) * congruent_units(ctx, g) // w
    deg_f = phi(f) * congruent_units(ctx, f) // w if not f.is_unit() else 1
    if deg_f == 0 or deg_g % deg_f or len(reps) != deg_g // deg_f:
        raise BadCosets(f"found {len(reps)} coset representatives, expected {deg_g}/{deg_f}")
    return reps


def is_prime_element(x: QuadInt) -> bool:
    divs = prime_ideal_divisors(x) if not (x.is_zero() or x.is_unit()) else []
    return len(divs) == 1 and divs[0].norm() == x.norm()


def inverse_mod(x: QuadInt, m: QuadInt) -> QuadInt:
    """y with x*y = 1 modulo (m)."""
    one = reduce_mod(x.ctx.one, m)
    for r in residues(m):
        if reduce_mod(x * r, m) == one:
            return r
    raise NonInvertible(f"{x} is not invertible modulo ({m})")


def check_norm_relation(lat: Lattice, f: QuadInt, l: QuadInt, alpha: QuadInt, tau=None) -> IdentityReport:
    """Norm from K(fl) to K(f) of theta_a(tau)^e against the Euler-factor expression."""
    _nontrivial(f, "f")
    _nontrivial(alpha, "a")
    if not is_prime_element(l):
        raise ValueError(f"l={l} must generate a prime ideal")
    g = f * l
    if not coprime(alpha, 6 * g):
        raise ValueError("a must be prime to 6g")
    if tau is None:
        tau = make_torsion_point(g, g.ctx.one)
    if not (hasattr(tau, "modulus") and tau.primitive and tau.modulus == g):
        raise ValueError("tau must be a primitive g-torsion point")
    z = tau.coords
    e = congruent_units(lat.ctx, f) // congruent_units(lat.ctx, g)
    lhs = 0
    for c in relative_cosets(f, g):
        lhs += e * theta_log(lat, alpha, mul_coords(c, z))
    lz = mul_coords(l, z)
    divides_f = reduce_mod(f, l).is_zero()
    if divides_f:
        rhs = theta_log(lat, alpha, lz)
        branch = "l|f"
    else:
        l_inv = inverse_mod(l, f)
        rhs = theta_log(lat, alpha, lz) - theta_log(lat, alpha, mul_coords(l_inv, lz))
        branch = "l∤f"
    params = {"d": lat.ctx.d, "f": str(f), "l": str(l), "a": str(alpha), "e": e, "branch": branch}
    return _report(lat, "norm", params, lhs, rhs)


# --- section 3 constituents -------------------------------------------------------


def check_lemma32_step(
    lat: Lattice, sp: SplitPrime, n: int, alpha: QuadInt, abar: int, b: int, steps: int = 1
) -> IdentityReport:
    """Collapse the E[P^steps]-translates in the first coordinate.

    LHS: product of theta_a(a w1 + b w2) over a mod p^n with p^steps * a = abar.
    RHS: theta_a(pi^steps (a w1 + b w2)), whose coordinates are
    abar * i1(pi_bar)^(-steps) and b * i2(pi)^steps.
    """
    p = sp.p
    if not coprime(alpha, 6 * p):
        raise ValueError("a must be prime to 6p")
    if not 1 <= steps <= n:
        raise ValueError("need 1 <= steps <= n")
    mod = p**n
    ps = p**steps
    if abar % ps or (n > steps and (abar // ps) % p == 0):
        raise ValueError(f"abar must lie in p^{steps} (Z/p^{n})^x")
    if b % p == 0:
        raise ValueError("b must be a unit mod p")
    emb = hensel_embed(sp, n)
    w1, w2 = p_power_basis(sp, n)
    sols = [a for a in range(mod) if (ps * a - abar) % mod == 0]
    lhs = 0
    for a in sols:
        lhs += theta_log(lat, alpha, combo(a, w1, b, w2))
    c1 = abar * pow(emb.i1(sp.pi_bar), -steps, mod) % mod
    c2 = b * pow(emb.i2(sp.pi), steps, mod) % mod
    rhs = theta_log(lat, alpha, combo(c1, w1, c2, w2))
    # the same point as pi^steps applied to any solution
    assert combo(c1, w1, c2, w2) == mul_coords(sp.pi**steps, combo(sols[0], w1, b, w2))
    params = {"d": lat.ctx.d, "p": p, "n": n, "a": str(alpha), "abar": abar, "b": b, "steps": steps}
    return _report(lat, "lemma32-step", params, lhs, rhs)


def check_lemma33_norm_step(lat: Lattice, sp: SplitPrime, n: int, alpha: QuadInt, a: int) -> IdentityReport:
    """prod over b in (Z/p^n)^x of theta_a(a w1 + b w2) against
    theta_a(a pi_bar^n w1) / sigma^{-1}(theta_a(a pi_bar^n w1)), sigma the Frobenius at pi_bar."""
    p = sp.p
    if not coprime(alpha, 6 * p):
        raise ValueError("a must be prime to 6p")
    if a % p == 0:
        raise ValueError("a must be a unit mod p")
    mod = p**n
    w1, w2 = p_power_basis(sp, n)
    lhs = 0
    for b in range(1, mod):
        if b % p:
            lhs += theta_log(lat, alpha, combo(a, w1, b, w2))
    top = mul_coords(sp.pi_bar**n, combo(a, w1, 0, w2))
    # sigma^{-1} acts on E[P^n] through an integer inverse of pi_bar mod P^n
    inv = pow(hensel_embed(sp, n).i1(sp.pi_bar), -1, mod)
    lower = mul_coords(sp.ctx(inv), top)
    assert lower == mul_coords(sp.pi_bar ** (n - 1), combo(a, w1, 0, w2))
    rhs = theta_log(lat, alpha, top) - theta_log(lat, alpha, lower)
    params = {"d": lat.ctx.d, "p": p, "n": n, "a_ideal": str(alpha), "a": a}
    return _report(lat, "lemma33-step", params, lhs, rhs)


def check_lemma33_translate(lat: Lattice, sp: SplitPrime, n: int, alpha: QuadInt, a: int) -> IdentityReport:
    """prod over b in pZ/p^n of theta_a(a w1 + b w2) against theta_a(a pi_bar^(n-1) w1)."""
    p = sp.p
    if n < 2:
        raise ValueError("the translate identity needs n >= 2")
    mod = p**n
    w1, w2 = p_power_basis(sp, n)
    lhs = 0
    for b in range(0, mod, p):
        lhs += theta_log(lat, alpha, combo(a, w1, b, w2))
    rhs = theta_log(lat, alpha, mul_coords(sp.pi_bar ** (n - 1), combo(a, w1, 0, w2)))
    params = {"d": lat.ctx.d, "p": p, "n": n, "a_ideal": str(alpha), "a": a}
    return _report(lat, "lemma33-translate", params, lhs, rhs)


def exponent_constants(m: tuple[int, int], sp: SplitPrime, n: int) -> tuple[int, int]:
    """The two p-adic exponent constants attached to m, modulo p^n.

    first  = 1/(1-x) + 1/(1-y) - 1
    second = (1-y)/(1-x) + y
    with x = i^(m-1)(pi), y = i^(m-1)(pi_bar).
    """
    emb = hensel_embed(sp, n)
    mod = emb.modulus
    e = (m[0] - 1, m[1] - 1)
    if min(e) < 0:
        raise ValueError("m must be >= (1, 1)")
    x = i_power(emb, e, sp.pi)
    y = i_power(emb, e, sp.pi_bar)
    if (1 - x) % sp.p == 0:
        raise NonInvertibleDenominator(f"1 - i^(m-1)(pi) is divisible by p for m={m}")
    inv_x = pow(1 - x, -1, mod)
    first = None
    if (1 - y) % sp.p:
        first = (inv_x + pow(1 - y, -1, mod) - 1) % mod
    second = ((1 - y) * inv_x + y) % mod
    return first, second


def geometric_constants(m: tuple[int, int], sp: SplitPrime, n: int, terms: int | None = None):
    """The same constants from truncated geometric series (slow, used as a cross-check)."""
    emb = hensel_embed(sp, n)
    mod = emb.modulus
    e = (m[0] - 1, m[1] - 1)
    x = i_power(emb, e, sp.pi)
    y = i_power(emb, e, sp.pi_bar)
    terms = terms or n * sp.p + 2

    def series(v):
        # 1/(1-v) = sum v^k converges p-adically only when p | v; otherwise
        # multiply through by the order of v to reach a p-divisible power.
        if v % sp.p == 0:
            return sum(pow(v, k, mod) for k in range(terms)) % mod
        # v unit: 1/(1-v) = (1 + v + ... + v^(r-1)) / (1 - v^r), r the order of v mod p
        r = 1
        while pow(v, r, sp.p) != 1:
            r += 1
        head = sum(pow(v, k, mod) for k in range(r)) % mod
        vr = pow(v, r, mod)
        if (1 - vr) % sp.p == 0:
            raise NonInvertibleDenominator("geometric series does not converge")
        return head * pow(1 - vr, -1, mod) % mod

    sx = series(x)
    first = (sx + series(y) - 1) % mod if (1 - y) % sp.p else None
    second = ((1 - y) * sx + y) % mod
    return first, second


def in_one_plus_p(v: int | None, p: int) -> bool | None:
    return None if v is None else v % p == 1


# --- parameter sets ---------------------------------------------------------------


def small_elements(ctx: FieldContext, bound: int = 400) -> list[QuadInt]:
    """Non-unit elements of small norm, one per ideal, ordered by (norm, a, b)."""
    from .quadfield import canonical_associate

    found = {}
    r = 30
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            x = QuadInt(a, b, ctx)
            nx = x.norm()
            if 1 < nx <= bound:
                key = min(((u * x).a, (u * x).b) for u in ctx.units)
                found.setdefault(key, x)
    elems = sorted(found.values(), key=lambda x: (x.norm(), x.a, x.b))
    return elems


def default_parameters(ctx: FieldContext) -> dict:
    """A deterministic admissible parameter set for the section 2 checks."""
    elems = small_elements(ctx)
    a = elems[0]
    b = next(x for x in elems if coprime(x, a))
    # a level m prime to a and b, and c prime to m
    m = next(x for x in elems if coprime(x, a * b) and x.norm() > 2)
    c = next(x for x in elems if coprime(x, m) and x not in (a,))
    a6 = next(x for x in elems if coprime(x, 6 * m * c))
    return {"a": a, "b": b, "m": m, "c": c, "a_galois": a6}


def run_suite(lat: Lattice, suite: str = "all", seed: int = 0, sp: SplitPrime | None = None) -> list[IdentityReport]:
    """The standard battery of checks for one field."""
    ctx = lat.ctx
    rng = random.Random(seed * 1000 + ctx.d)
    pars = default_parameters(ctx)
    out: list[IdentityReport] = []
    want = (lambda s: suite in ("all", s))
    if want("distribution"):
        z = random_point(rng)
        out.append(check_distribution(lat, pars["a"], pars["b"], z))
        out.append(check_distribution(lat, pars["b"], pars["a"], z))
    if want("galois"):
        tau = next(t for t in torsion_points(lat, pars["m"], primitive_only=True))
        out.append(check_galois_action(lat, pars["a_galois"], pars["c"], tau))
    if want("cross"):
        out.append(check_cross_relation(lat, pars["a"], pars["b"], random_point(rng)))
    if ctx.d == 1 and (want("norm") or want("lemma32") or want("lemma33")):
        from .quadfield import split_prime

        sp = sp or split_prime(ctx, 5)
        alpha = ctx(3, 2)
        if want("norm"):
            out.append(check_norm_relation(lat, sp.pi, sp.pi_bar, alpha))
            out.append(check_norm_relation(lat, sp.pi, sp.pi, alpha))
        if want("lemma32"):
            out.append(check_lemma32_step(lat, sp, 1, alpha, 0, 1))
            out.append(check_lemma32_step(lat, sp, 2, alpha, 5, 1))
        if want("lemma33"):
            out.append(check_lemma33_norm_step(lat, sp, 2, alpha, 1))
            out.append(check_lemma33_norm_step(lat, sp, 2, alpha, 2))
    return out
