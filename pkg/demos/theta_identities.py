# %% [markdown]
# # Numerical checks of the theta-function identities
#
# theta_a is evaluated from the q-series of the Weierstrass function on
# C / O_K.  Each identity is compared in log space; the residual should sit
# far below 2^(-B/2+8) and shrink when the precision is doubled.

# %%
from ellsoule.analytic import make_lattice, theta_a
from ellsoule.identities import run_suite
from ellsoule.quadfield import make_field

for d in (1, 3, 163):
    lat = make_lattice(make_field(d), 256)
    for rep in run_suite(lat):
        print(d, rep.summary())

# %% [markdown]
# Doubling the precision: the same checks at 512 bits.

# %%
lo = run_suite(make_lattice(make_field(1), 256))
hi = run_suite(make_lattice(make_field(1), 512))
for a, b in zip(lo, hi):
    print(f"{a.name:<16} {float(a.residual):9.2e} -> {float(b.residual):9.2e}")

# %% [markdown]
# A single value, with its log-space bookkeeping:

# %%
from fractions import Fraction

lat = make_lattice(make_field(1), 256)
k = lat.ctx
t = theta_a(lat, k(3, 2), (Fraction(1, 5), Fraction(2, 5)))
print(t.value)
print("log|theta| =", t.log_abs)
