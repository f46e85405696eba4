
# coding: utf-8

# # Model data
#
# `ModelParams(n, x, u, v)` fixes the deformation. From it we get the moment map value, the constant matrix `nu`, and the chamber-dependent matrices `theta` and `zeta`.

# In[1]:

import numpy as np

from sunn_reduction import ModelParams, kappa, momentum_value, nu, theta, zeta
from sunn_reduction.model import chamber_gaps

params = ModelParams(n=3, x=1.0, u=0.3, v=0.5)
params


# `nu` is lower triangular with positive diagonal, and `kappa` diagonalizes `nu nu^†` up to the one simple eigenvalue that carries the constraint.

# In[2]:

nn = nu(params)
print(np.round(nn.real, 4))
lam = kappa(params).T @ nn @ nn.conj().T @ kappa(params)
print(np.round(lam.real, 6))
print("simple eigenvalue at", params.simple_eigen_index)


# In[3]:

mu = momentum_value(params)
mu.mu_L.shape, mu.mu_R.shape


# ## The chamber
#
# `phat` must satisfy `phat_k - phat_{k+1} >= x/2`. `theta` is unitary everywhere in the closed chamber.

# In[4]:

phat = np.array([2.0, 1.0, -0.2])
print("gaps", chamber_gaps(phat))
th = theta(params, phat)
print("unitarity", np.abs(th @ th.conj().T - np.eye(3)).max())


# Approaching a wall, `theta` stays continuous. The change scales like the square root of the distance to the wall.

# In[5]:

wall = np.array([2.0, 1.5, -0.2])
for eps in [1e-2, 1e-4, 1e-6]:
    near = wall + np.array([eps, 0, 0])
    print(eps, np.abs(theta(params, near) - theta(params, wall)).max())


# `zeta` is the companion vector used by the global chart.

# In[6]:

zeta(params, phat)
