# %% [markdown]
# # The n-setting steering functional
#
# S sums the probability that Alice and Bob get the same outcome in each of
# the d+1 MUB settings.  Quantum mechanics reaches d+1, local hidden state
# models stay below 1+sqrt(d), so the ratio grows like sqrt(d).

# %%
import math

from steersim.mub import build_mubs
from steersim.states import isotropic, max_entangled
from steersim.steering import (lhs_bound, lhs_max_numeric, p_min_theory, p_min_two_setting,
                               steering_functional, two_setting_violation_max, violation)

print(" d    S(Phi)   LHS bound   V       2-setting Vmax")
for d in (2, 3, 4, 5, 7, 11):
    rep = steering_functional(max_entangled(d))
    print(f"{d:2d}  {rep.S:7.3f}  {rep.lhs_bound:9.4f}  {rep.V:6.4f}  {two_setting_violation_max(d):6.4f}")

# %% [markdown]
# From d = 7 on the violation exceeds 2, which no 2-setting linear criterion
# can reach.

# %% [markdown]
# ## How tight is the LHS bound?
#
# The deterministic LHS value is max_psi sum_x max_a |<phi_x^a|psi>|^2.  A
# multi-restart local ascent finds it numerically; the bound is not attained.

# %%
for d in (2, 3, 4, 5):
    val = lhs_max_numeric(build_mubs(d), restarts=50)
    print(f"d={d}: numeric LHS max {val:.5f}  vs  1+sqrt(d) = {lhs_bound(d):.5f}")
print("qubit closed form (3+sqrt3)/2 =", (3 + math.sqrt(3)) / 2)

# %% [markdown]
# ## Isotropic noise
#
# Mixing in white noise lowers S linearly.  Steering survives down to the
# threshold weight p_min, which tends to zero with d while the 2-setting
# threshold stays above one half.

# %%
for d in (4, 5, 7, 11):
    pm = p_min_theory(d)
    at = steering_functional(isotropic(d, pm)).S
    print(f"d={d:2d}  p_min={pm:.4f}  (S at p_min = {at:.4f}, bound {lhs_bound(d):.4f})"
          f"  2-setting p_min={p_min_two_setting(d):.4f}")
