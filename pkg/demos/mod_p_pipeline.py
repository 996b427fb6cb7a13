# %% [markdown]
# # The level-one element for Q(i), p = 5
#
# epsilon is built twice: as the weighted product over (a, b) in (Z/5)^x squared,
# and as w_K times the isotypic projection of one theta value.  The minimal
# polynomial over Z[i] is then read off the conjugates and tested for being
# a fifth power by power residues at split primes q = 1 mod 5.

# %%
from ellsoule.characters import epsilon_m1a, pth_power_test, surjectivity_verdict
from ellsoule.quadfield import make_field, split_prime

k = make_field(1)
sp = split_prime(k, 5)
res = epsilon_m1a(sp, (3, 3), k(3, 2))
print("working precision:", res.bits, "bits")
print("pipeline residual:", res.pipeline_residual)
print("minpoly stable when precision doubles:", res.doubled_minpoly_equal)
trace = -res.unit.minpoly[1]
print(f"minpoly: X^2 - T X + 1 with T ~ 10^{len(str(abs(trace.a))) - 1}")

# %%
test = pth_power_test(res.unit, 5)
print(test.outcome.value, test.note)
for c in test.certificates:
    print("  q =", c["q"], "root", c["root"], "residue", c["residue"])

# %% [markdown]
# Verdicts: the first four need no numerics at all.

# %%
for m in [(5, 5), (5, 1), (1, 5), (2, 4), (3, 3)]:
    v = surjectivity_verdict(1, 5, m)
    print(m, v.verdict.value, "(numerical)" if v.numerical else "")
