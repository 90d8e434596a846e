# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Squares with few nonzero digits
#
# We count squares of the shape $c_1 g^{k_1} + \dots + c_m g^{k_m}$ with every
# exponent in a box $\{0, \dots, K\}$, then look at how a small set of sieving
# primes sees those values through quadratic characters.

# %%
from sparsity_lab import (
    SparseForm,
    build_sieve_set,
    count_representable_n,
    count_square_tuples,
    gamma_m,
    jacobi,
    sieve_statistics,
)
from sparsity_lab.harness import growth_table

# %% [markdown]
# ## Counting hits in a box
#
# For $2^{k_1} + 2^{k_2}$ with $K = 10$ there are 13 ordered exponent pairs whose
# value is a perfect square.

# %%
form = SparseForm(2, (1, 1))
M, hits = count_square_tuples(form, 10)
print(M)
for h in hits[:6]:
    print(h.k, h.value, h.root)

# %% [markdown]
# Switching the point of view to the square roots: which $n \le 20$ have $n^2$
# of this shape? The exponent box is derived automatically from $N$.

# %%
count_representable_n(form, 20)

# %% [markdown]
# ## How fast does the count grow?
#
# The log-power comparison column uses exponent $m$; the refined column uses
# $\gamma_m$, which is only defined for $m \ge 3$.

# %%
for row in growth_table(SparseForm(2, (1, 1, 1)), [50, 200, 1000]):
    print(row)

# %%
[(m, float(gamma_m(m))) for m in (3, 4, 10, 44, 100)]

# %% [markdown]
# ## The sieve set
#
# Primes $\ell \in [z, z^{C_1}]$ whose $2$-order has a large prime factor of
# $\ell - 1$ and a fixed $2$-adic valuation. With $z = 11$ only 23 and 31 survive.

# %%
L = build_sieve_set(2, 11, 0.5, 3)
print(L.u0, L.ells)

# %% [markdown]
# A perfect square is a quadratic residue for every sieving prime that does not
# divide it, so the character sum over the set equals the size of the set minus
# the number of dividing primes.

# %%
for h in hits:
    s = sum(jacobi(h.value, ell) for ell in L.ells)
    print(h.value, s)

# %% [markdown]
# Over the whole box the statistics split as $W = U + V$.

# %%
sieve_statistics(form, 10, L)
