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
# # Character sums along geometric progressions
#
# Exact evaluation of the sums that drive the sieve: diagonal sums over finite
# fields, sums over powers of $\theta$ modulo one prime, and their products over
# two primes.

# %%
import math
import random

from sparsity_lab import CharSumSpec, korobov_sum, product_sum, product_sum_check, quad_diag_sum
from sparsity_lab.charsums import diag_sum_bound

# %% [markdown]
# ## Diagonal sums
#
# Each sum is computed exactly and compared with its square-root-type bound.

# %%
rng = random.Random(0)
rows = []
for q in (5, 7, 11, 13):
    for m in (1, 2, 3):
        a = tuple(rng.randrange(1, q) for _ in range(m))
        S = quad_diag_sum(q, 2, a)
        rows.append((q, m, a, S, abs(S) / diag_sum_bound(q, 2, m)))
rows

# %% [markdown]
# A small special case: with $q = 3$, $d = 2$ and $a = (1, 1)$ the sum vanishes.

# %%
quad_diag_sum(3, 2, (1, 1))

# %% [markdown]
# ## Splitting over two primes
#
# When the orders of $\theta$ modulo $\ell$ and $r$ are coprime, the sum modulo
# $\ell r$ factors through the Chinese remainder theorem.

# %%
spec = CharSumSpec(5, 2, (1,), r=7)
print(product_sum(spec))
chk = product_sum_check(spec)
print(chk.S, chk.S_ell * chk.S_r, chk.exact_match)

# %% [markdown]
# ## Korobov-type sums
#
# The normalised maximum over all $a$ stays below one.

# %%
worst = {}
for ell in (31, 61, 101, 151, 197):
    worst[ell] = max(abs(korobov_sum(a, 3, ell)) / math.sqrt(ell) for a in range(1, ell))
worst
