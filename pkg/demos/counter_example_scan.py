# %% [markdown]
# # Purely-local primes in Q(i)
#
# For a split prime p = pi * pi_bar, the pi_bar-side test asks whether
# pi^(p-1) - 1 is divisible by pi_bar exactly once.  It almost always is.
# This script scans every split prime below 50000 and prints the exceptions.

# %%
from ellsoule.cli import run_scan
from ellsoule.quadfield import divides, make_field, split_prime

report = run_scan(1, 50_000, threads=4)
print(f"{len(report['records'])} split primes scanned in {report['timing']['seconds']} s")
by_test = report["failures_by_test"]
print("pi_bar side fails at", by_test["purely_local_pibar"])
print("pi side fails at    ", by_test["purely_local_pi"])
print("Frobenius fails to generate at", len(by_test["frobenius_generates"]), "primes")

# %% [markdown]
# The single exception, redone with exact Gaussian-integer arithmetic
# (no embeddings, no modular shortcuts):

# %%
k = make_field(1)
sp = split_prime(k, 29789)
y = sp.pi ** (sp.p - 1) - 1
print(f"pi = {sp.pi}")
print("pi_bar   | pi^(p-1) - 1 :", divides(sp.pi_bar, y))
print("pi_bar^2 | pi^(p-1) - 1 :", divides(sp.pi_bar**2, y))

# %% [markdown]
# Other fields, smaller range:

# %%
for d in (2, 3, 7, 11):
    rep = run_scan(d, 20_000)
    print(f"d={d}: purely-local failures {rep['failures_by_test']['purely_local_pibar']}")
