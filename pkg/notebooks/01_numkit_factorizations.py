
# coding: utf-8

# # Matrix factorizations in SU(n, n)

# The reduction rests on a handful of structured factorizations of matrices in SL(2n, C). This notebook walks through them on a random group element and prints the reconstruction residuals.

# In[1]:

import numpy as np

from sunn_reduction import cartan, iwasawa, j_cholesky, signature
from sunn_reduction.numkit import mat_exp, polar, pseudo_unitarity_residual

rng = np.random.default_rng(3)
n = 3
J = np.diag(signature(n))
J


# A point of SL(2n, C) near the identity. Large random matrices fall outside the open subset where the Iwasawa factorization exists, so the generator is scaled down.

# In[2]:

a = (rng.standard_normal((2 * n, 2 * n)) + 1j * rng.standard_normal((2 * n, 2 * n))) / (4 * n)
a -= np.trace(a) / (2 * n) * np.eye(2 * n)
k = mat_exp(a)
print(abs(np.linalg.det(k) - 1))


# ## Iwasawa
#
# `side="right"` gives `K = g_L inv(b_R)` with `g_L` in SU(n, n) and `b_R` upper triangular. The default method works on `K` directly with hyperbolic Householder reflections.

# In[3]:

right = iwasawa(k, "right")
print("residual", right.residual)
print("g_L pseudo-unitarity", pseudo_unitarity_residual(right.unitary_like))
print("b_R lower part", np.abs(np.tril(right.triangular, -1)).max())


# The Cholesky route squares the condition number; on this well conditioned example both agree.

# In[4]:

chol = iwasawa(k, "right", method="cholesky")
np.abs(chol.unitary_like - right.unitary_like).max()


# `j_cholesky` is the underlying indefinite factorization `m = b J b^†`.

# In[5]:

m = (k * np.diag(J)) @ k.conj().T
b = j_cholesky(m)
np.abs(b @ J @ b.conj().T - m).max()


# ## Cartan
#
# Any `g` in SU(n, n) splits as `g_+ exp(q) h_+` with block-diagonal outer factors. `sinh q` are the singular values of the upper right block.

# In[6]:

cf = cartan(right.unitary_like)
print("q =", cf.q)
print("residual", cf.residual)


# ## Polar

# In[7]:

pf = polar(k[:n, :n])
print(np.abs(pf.hermitian @ pf.unitary - k[:n, :n]).max())
