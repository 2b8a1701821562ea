# %% [markdown]
# # Mutually unbiased bases from finite fields
#
# A complete set of d+1 MUBs exists whenever d is a prime power.  The
# construction indexes basis vectors by elements of GF(d), so we start with
# the field itself.

# %%
import numpy as np

from steersim.finitefield import Field
from steersim.mub import build_mubs, conjugate_family, verify_mub

gf4 = Field(2, 2)
print("GF(4) modulus (low -> high):", gf4.modulus)
omega = gf4.element([0, 1])
print("omega^2 =", (omega * omega).coefficients, "  Tr(omega) =", omega.trace())

# %% [markdown]
# Odd dimensions use quadratic phases w^{Tr(x j^2 + a j)}; powers of two need
# fourth roots of unity.  Either way the verifier is the contract.

# %%
for d in (2, 3, 4, 5, 7, 8, 9, 11, 13):
    rep = verify_mub(build_mubs(d), tol=1e-12)
    print(f"d={d:2d}  bases={rep.n_bases:2d}  "
          f"orthonormality dev={rep.max_orthonormality_dev:.1e}  "
          f"unbiasedness dev={rep.max_unbiasedness_dev:.1e}  pass={rep.passed}")

# %% [markdown]
# Every cross-basis overlap has modulus 1/sqrt(d):

# %%
fam = build_mubs(5)
overlaps = np.abs(fam.vectors[1].conj() @ fam.vectors[3].T)
print(np.round(overlaps, 6))
print("1/sqrt(5) =", 1 / np.sqrt(5))

# %% [markdown]
# Bob measures in the complex-conjugate bases.  For d = 2 the third basis is
# the sigma_y eigenbasis and conjugation swaps its two vectors.

# %%
fam2 = build_mubs(2)
print("Alice basis 2:\n", np.round(fam2.vectors[2] * np.sqrt(2), 3))
print("Bob basis 2:\n", np.round(conjugate_family(fam2).vectors[2] * np.sqrt(2), 3))
