import json

import pytest

from _oracles import gaussian_certificates, power_of, synthetic_units
from conftest import epsilon, lattice
from ellsoule.analytic import combo, mul_coords, p_power_basis
from ellsoule.characters import (
    AdmissibilityError,
    PowerTest,
    RayGroup,
    RecognitionFailure,
    SearchExhausted,
    Verdict,
    admissibility_defect,
    check_admissible,
    conjugate_vector,
    default_ideal,
    epsilon_m1a,
    in_index_set,
    isotypic_product,
    make_unit,
    needed_bits,
    pth_power_test,
    surjectivity_verdict,
    unit_from_minpoly,
    unit_from_values,
)
from ellsoule.quadfield import make_field, split_prime


@pytest.fixture(scope="module")
def setup():
    k = make_field(1)
    sp = split_prime(k, 5)
    lat = lattice(1)
    w1, w2 = p_power_basis(sp, 1)
    return k, sp, lat, combo(1, w1, 1, w2)


# --- ray class groups ---------------------------------------------------------------


def test_ray_group_sizes():
    k = make_field(1)
    sp = split_prime(k, 5)
    assert len(RayGroup(sp, "p")) == 4
    # units already fill (O/P)^x when p = 5, so K(P) = K
    assert len(RayGroup(sp, "pi")) == 1
    sp13 = split_prime(k, 13)
    assert len(RayGroup(sp13, "p")) == 144 // 4
    assert len(RayGroup(sp13, "pi")) == 3
    k3 = make_field(3)
    assert len(RayGroup(split_prime(k3, 7), "p")) == 36 // 6
    with pytest.raises(ValueError):
        RayGroup(sp, "q")


def test_ray_group_is_a_group():
    sp = split_prime(make_field(3), 13)
    g = RayGroup(sp, "p")
    n = len(g)
    table = g.mult_table
    ident = g.index(sp.ctx.one)
    for i in range(n):
        assert sorted(table[i]) == list(range(n))
        assert table[ident][i] == i
        for j in range(n):
            assert table[i][j] == table[j][i]


def test_index_set():
    assert in_index_set((3, 3), 4) and in_index_set((7, 3), 4)
    assert not in_index_set((3, 1), 4)
    assert not in_index_set((1, 1), 4)
    assert in_index_set((3, 1), 2)
    assert not in_index_set((2, 4), 4)


def test_character_trivial_on_units_iff_index_set():
    k = make_field(1)
    sp = split_prime(k, 13)
    g = RayGroup(sp, "p")
    for m in ((3, 3), (2, 4), (5, 1), (4, 4), (6, 2)):
        e = (m[0] - 1, m[1] - 1)
        trivial = all(g.chi(e, u) == 1 for u in k.units)
        assert trivial == ((m[0] - m[1]) % 4 == 0)


# --- recognition ---------------------------------------------------------------------


def test_conjugate_vector_degree_four(setup):
    k, sp, lat, omega = setup
    g = RayGroup(sp, "p")
    u = conjugate_vector(lat, k(3, 2), omega, g)
    assert u.degree == 4 and u.rounding_residual < lat.tol
    # modulus 5 is not a prime power in O_K, so the value is a global unit
    assert u.constant_term() in k.units
    u2 = conjugate_vector(lattice(1, 512), k(3, 2), omega, g)
    assert [(c.a, c.b) for c in u2.minpoly] == [(c.a, c.b) for c in u.minpoly]


def test_conjugate_vector_permutes_under_galois(setup):
    k, sp, lat, omega = setup
    g = RayGroup(sp, "p")
    a = k(3, 2)
    u = conjugate_vector(lat, a, omega, g, recognize_poly=False)
    for d in range(len(g)):
        moved = conjugate_vector(lat, a, mul_coords(g.reps[d], omega), g, recognize_poly=False)
        for c in range(len(g)):
            j = g.mult_table[d][c]
            assert abs(lat.mp.expm1(moved.logs[c] - u.logs[j])) < lat.tol


def test_single_conjugate(setup):
    k, sp, lat, omega = setup
    g = RayGroup(sp, "pi")
    u = conjugate_vector(lat, k(3, 2), mul_coords(sp.pi_bar, omega), g)
    assert u.degree == 1


def test_recognition_failure_at_low_precision():
    k = make_field(1)
    big = k(10**40 + 7, 3)
    with pytest.raises(RecognitionFailure):
        unit_from_values(k, [big.to_complex(lattice(1).mp) * (1 + 2**-100)], 256)


def test_unit_from_minpoly_roundtrip():
    k = make_field(2)
    coeffs = [k.one, k(3, -1), k(0, 2), k(-1)]
    u = unit_from_minpoly(k, coeffs)
    again = make_unit(k, u.logs, u.bits)
    assert [(c.a, c.b) for c in again.minpoly] == [(c.a, c.b) for c in coeffs]
    json.dumps(u.as_dict())


# --- isotypic projection --------------------------------------------------------------


def test_isotypic_trivial_character_is_norm(setup):
    k, sp, lat, omega = setup
    g = RayGroup(sp, "p")
    u = conjugate_vector(lat, k(3, 2), omega, g)
    n = isotypic_product(u, g, (1, 1))
    assert n.degree == 1
    assert n.minpoly[1] in k.units or -n.minpoly[1] in k.units
    assert n.meta["exponents"] == [1] * len(g)


def test_isotypic_nontrivial_weights(setup):
    k, sp, lat, omega = setup
    g = RayGroup(sp, "p")
    u = conjugate_vector(lat, k(3, 2), omega, g)
    with pytest.raises(RecognitionFailure, match="raise the precision"):
        isotypic_product(u, g, (3, 3))
    raw = isotypic_product(u, g, (3, 3), recognize_poly=False)
    assert sorted(raw.meta["exponents"]) == [1, 1, 4, 4]
    bits = needed_bits(raw.logs, 256)
    polys = []
    for b in (bits, 2 * bits):
        ub = conjugate_vector(lattice(1, b), k(3, 2), omega, g, recognize_poly=False)
        v = isotypic_product(ub, g, (3, 3))
        assert v.rounding_residual < 2.0 ** (-b / 2 + 8)
        polys.append([(c.a, c.b) for c in v.minpoly])
    assert polys[0] == polys[1]


def test_isotypic_weights_outside_index_set():
    # chi^(2,0) is not trivial on units of Z[i]; at p = 5 the orbit-minimal
    # representatives all have i1 = 1, so the weights collapse to 1
    k, sp, lat, omega = (make_field(1), split_prime(make_field(1), 5), lattice(1), None)
    g = RayGroup(sp, "p")
    assert {g.chi((2, 0), c) for c in g.reps} == {1}
    g13 = RayGroup(split_prime(k, 13), "p")
    assert len({g13.chi((2, 0), c) for c in g13.reps}) > 1


def test_projection_applied_twice():
    # phi o phi has exponents E2[r] = sum_s e_s e_(r/s), which is |G| e_r modulo p
    k = make_field(1)
    sp = split_prime(k, 13)
    g = RayGroup(sp, "p")
    lat = lattice(1)
    w1, w2 = p_power_basis(sp, 1)
    u = conjugate_vector(lat, k(2, 1), combo(1, w1, 1, w2), g, recognize_poly=False)
    m = (3, 3)
    once = isotypic_product(u, g, m, recognize_poly=False)
    twice = isotypic_product(once, g, m, recognize_poly=False)
    e = once.meta["exponents"]
    n = len(g)
    inv = [next(j for j in range(n) if g.mult_table[i][j] == g.index(k.one)) for i in range(n)]
    e2 = [sum(e[s] * e[g.mult_table[inv[s]][r]] for s in range(n)) for r in range(n)]
    assert all((x - n * y) % 13 == 0 for x, y in zip(e2, e))
    # direct product with the E2 weights, conjugate by conjugate
    for d in range(n):
        direct = sum(e2[c] * u.logs[g.mult_table[d][c]] for c in range(n))
        assert abs(lat.mp.expm1(direct - twice.logs[d])) < lat.tol


# --- level-one elements ----------------------------------------------------------------


def test_epsilon_33_two_pipelines():
    r = epsilon((3, 3))
    assert r.pipeline_residual < 2.0**-120
    assert r.doubled_minpoly_equal
    assert r.unit.constant_term() in make_field(1).units


def test_epsilon_55_lands_in_k():
    r = epsilon((5, 5))
    assert r.unit.degree == 1
    vals = r.direct.conjugates
    assert all(abs(v / vals[0] - 1) < 2.0**-120 for v in vals)


def test_epsilon_51_is_pi_power():
    k = make_field(1)
    sp = split_prime(k, 5)
    r = epsilon((5, 1))
    c = r.unit.constant_term()
    target = sp.pi ** (12 * 1 * (k(3, 2).norm() - 1))
    assert any(c == u * target for u in k.units)
    # conjugate case (1,5) gives the conjugate prime
    c2 = epsilon((1, 5)).unit.constant_term()
    assert any(c2 == u * target.conj() for u in k.units)


def test_epsilon_periodic_in_m():
    a = epsilon((3, 3)).unit.minpoly
    b = epsilon((7, 7)).unit.minpoly
    assert a == b


def test_admissibility():
    k = make_field(1)
    sp = split_prime(k, 5)
    with pytest.raises(AdmissibilityError):
        check_admissible(sp, (3, 1), k(3, 2))
    with pytest.raises(AdmissibilityError):
        check_admissible(sp, (3, 3), k(1, 1))  # 1+i divides 2
    with pytest.raises(AdmissibilityError):
        check_admissible(sp, (3, 3), k(2, 1))  # divides p
    # find an ideal with zero defect and check it is refused
    bad = next(x for x in (k(a, b) for a in range(1, 12) for b in range(0, 12))
               if x.norm() > 1 and x.norm() % 2 and x.norm() % 3 and x.norm() % 5
               and admissibility_defect(sp, (3, 3), x) == 0)
    with pytest.raises(AdmissibilityError, match="choose a different"):
        epsilon_m1a(sp, (3, 3), bad)
    assert admissibility_defect(sp, (3, 3), default_ideal(sp, (3, 3))) != 0


# --- p-th power test --------------------------------------------------------------------


def test_pth_power_rational_examples():
    k2 = make_field(2)
    two = unit_from_minpoly(k2, [k2.one, k2(-2)])
    res = pth_power_test(two, 5, trials=3)
    assert res.outcome is PowerTest.NON_POWER
    assert res.certificates[0] == {"q": 11, "root": 2, "residue": 4}
    thirty_two = unit_from_minpoly(k2, [k2.one, k2(-32)])
    assert pth_power_test(thirty_two, 5).outcome is PowerTest.LIKELY_POWER
    with pytest.raises(ValueError):
        pth_power_test(two, 5, trials=2)


def test_pth_power_search_exhausted():
    k = make_field(1)
    two = unit_from_minpoly(k, [k.one, k(-2)])
    with pytest.raises(SearchExhausted):
        pth_power_test(two, 5, max_q=10)


def test_pth_power_synthetic_properties():
    units = synthetic_units(8, seed=5)
    for u in units:
        assert pth_power_test(power_of(u, 5), 5).outcome is PowerTest.LIKELY_POWER
        base = pth_power_test(u, 5, trials=8)
        if base.outcome is PowerTest.NON_POWER:
            assert pth_power_test(power_of(u, 6), 5, trials=8).outcome is PowerTest.NON_POWER


def test_certificates_match_brute_force():
    for u in synthetic_units(5, seed=9):
        res = pth_power_test(u, 5, trials=6)
        oracle = gaussian_certificates(u.minpoly, 5)
        for cert in res.certificates:
            assert (cert["root"], cert["residue"]) in oracle[cert["q"]]


def test_epsilon_33_non_power():
    res = pth_power_test(epsilon((3, 3)).unit, 5)
    assert res.outcome is PowerTest.NON_POWER
    oracle = gaussian_certificates(epsilon((3, 3)).unit.minpoly, 5, q_max=400)
    for cert in res.certificates:
        if cert["q"] < 400:
            assert (cert["root"], cert["residue"]) in oracle[cert["q"]]


# --- verdicts -------------------------------------------------------------------------------


@pytest.mark.parametrize("m,expected", [
    ((5, 5), Verdict.NOT_SURJECTIVE),
    ((9, 9), Verdict.NOT_SURJECTIVE),
    ((5, 1), Verdict.SURJECTIVE),
    ((1, 5), Verdict.SURJECTIVE),
    ((9, 1), Verdict.SURJECTIVE),
    ((2, 4), Verdict.TRIVIALLY_ZERO),
    ((3, 1), Verdict.TRIVIALLY_ZERO),
    ((1, 1), Verdict.TRIVIALLY_ZERO),
])
def test_unconditional_verdicts(m, expected):
    v = surjectivity_verdict(1, 5, m)
    assert v.verdict is expected
    assert not v.numerical
    assert json.loads(v.to_json())["schema"] == 1


def test_verdict_fact_routes():
    # m = (4,4) at p=5: case 2 with m = (0,0) mod p-1 stays inconclusive without computation
    v = surjectivity_verdict(1, 5, (4, 4))
    assert v.verdict is Verdict.INCONCLUSIVE and not v.numerical
    v = surjectivity_verdict(1, 13, (3, 3), facts={"class_number_K(p)_prime_to_p": True})
    assert v.verdict is Verdict.SURJECTIVE and not v.numerical
    assert any(e.get("status") == "assumed" for e in v.evidence)
    v = surjectivity_verdict(1, 13, (5, 1), facts={"class_number_K(P)_prime_to_p": True})
    assert v.verdict is Verdict.SURJECTIVE


def test_verdict_bad_input():
    with pytest.raises(ValueError):
        surjectivity_verdict(1, 5, (0, 4))


def test_numeric_verdict_33_and_shift():
    v = surjectivity_verdict(1, 5, (3, 3), "3+2w")
    assert v.verdict is Verdict.SURJECTIVE and v.numerical
    test = next(e for e in v.evidence if e["step"] == "pth-power-test")
    assert len(test["records"]) == 5
    shifted = surjectivity_verdict(1, 5, (7, 7), "3+2w")
    assert shifted.verdict is v.verdict
