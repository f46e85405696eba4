
# coding: utf-8

# # Global chart of the reduced phase space
#
# The reduced space is covered by a single chart `z` in C^n with `z_n != 0`. `section_global(params, z)` returns a matrix `K_hat(z)` on the constraint surface, and `z_from_constraint` inverts it on the whole gauge orbit.

# In[1]:

import numpy as np

from sunn_reduction import (
    ModelParams,
    angles_of_z,
    apply_gauge,
    constraint_residuals,
    random_gauge,
    sample_section,
    section_global,
    z_from_constraint,
)

params = ModelParams(n=3, x=1.0, u=0.3, v=0.5)
rng = np.random.default_rng(11)
z = sample_section(params, rng, count=1)[0]
z


# In[2]:

k = section_global(params, z)
constraint_residuals(params, k)


# The chart coordinates are related to action-angle variables by `|z_j|^2` and the phases of `z`. `angles_of_z` goes back to `phat` and the unit phases `exp(i qhat)`.

# In[3]:

phat, phases = angles_of_z(params, z)
phat, np.angle(phases)


# ## Round trip through a random gauge

# In[4]:

gauge = random_gauge(params, rng)
kg = apply_gauge(gauge, k)
z_back = z_from_constraint(params, kg)
np.abs(z_back - z).max()


# ## Boundary points
#
# Where a chamber inequality is saturated the corresponding `z_j` vanishes. The chart is smooth there and the recovered zero is exact.

# In[5]:

zb = sample_section(params, rng, count=5, boundary_fraction=1.0)
for zz in zb:
    back = z_from_constraint(params, apply_gauge(random_gauge(params, rng), section_global(params, zz)))
    print(np.count_nonzero(zz == 0), np.count_nonzero(back == 0), np.abs(back - zz).max())


# ## Conditioning
#
# Far from the origin of the chart `K_hat` becomes badly conditioned as `n` grows. Rounding the gauged matrix to double precision then limits how well `z` is determined.

# In[6]:

for n in [2, 4, 6]:
    p = ModelParams(n=n, x=1.0, u=0.3, v=0.5)
    worst, cond = 0.0, 0.0
    for zz in sample_section(p, rng, count=20):
        kk = section_global(p, zz)
        cond = max(cond, np.linalg.cond(kk))
        back = z_from_constraint(p, apply_gauge(random_gauge(p, rng), kk))
        worst = max(worst, np.max(np.abs(back - zz) / np.maximum(1, np.abs(zz))))
    print(f"n={n}  max cond {cond:.1e}  max relative error {worst:.1e}")
