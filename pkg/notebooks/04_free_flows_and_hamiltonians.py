
# coding: utf-8

# # Free Hamiltonians and the Lax matrix
#
# On the unreduced space the Hamiltonians `H_j(K) = tr (K J K^† J)^j / (2j)` generate flows that are exponentials. After reduction they become functions of the spectrum of the Lax matrix.

# In[1]:

import numpy as np

from sunn_reduction import (
    ModelParams,
    conserved_spectrum,
    expressibility_fit,
    free_flow,
    free_hamiltonian,
    lax,
    reduced_H1,
    sample_section,
    section_global,
)
from sunn_reduction.phasespace import angles_of_z, section_global_inverse

params = ModelParams(n=3, x=1.0, u=0.3, v=0.5)
rng = np.random.default_rng(5)
z = sample_section(params, rng, count=1)[0]
k = section_global(params, z)


# The free flow conserves every `H_j`.

# In[2]:

for t in [0.0, 0.5, 2.0]:
    kt = free_flow(k, 1, t)
    print(t, [free_hamiltonian(kt, j) for j in (1, 2, 3)])


# Negative indices follow from the inverse. An accurate inverse of the section is available in closed form, which keeps the parity relation `H_{-j}(K) = -H_j(K^{-1})` tight.

# In[3]:

k_inv = section_global_inverse(params, z)
print(free_hamiltonian(k, -1, k_inv=k_inv), -free_hamiltonian(k_inv, 1))


# ## Lax matrix and the main reduced Hamiltonian

# In[4]:

lm = lax(params, z)
h, eig = conserved_spectrum(lm)
print("h =", h)
print("eigenvalues =", eig)


# In[5]:

phat, phases = angles_of_z(params, z)
print(reduced_H1(params, phat, phases), free_hamiltonian(k, 1))


# ## Expressibility
#
# For `j <= n` the restriction of `H_j` is an affine function of `h_1, ..., h_n`.

# In[6]:

samples = sample_section(params, rng, count=30)
for j in (1, 2, 3):
    coef, residual = expressibility_fit(params, samples, j)
    print(j, np.round(coef, 6), f"{residual:.1e}")
